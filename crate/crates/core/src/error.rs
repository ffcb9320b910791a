use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("placement shape does not match the topology")]
    PlacementShape,
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("chain {chain} is not completely placed")]
    IncompletePlacement { chain: usize },
    #[error("VNFs at positions {from} and {to} of chain {chain} are not consecutive")]
    NotConsecutive { chain: usize, from: usize, to: usize },
    #[error("no link allocation for hop {0}")]
    MissingLinkAllocation(String),
    #[error("enumeration needs {needed} candidates, bound is {bound}")]
    EnumerationBound { needed: u128, bound: u64 },
    #[error("row {row} is not stochastic (sum {sum})")]
    NotStochastic { row: usize, sum: f64 },
    #[error("state {0} has no outgoing transition")]
    NoSuccessor(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("critic diverged at episode {episode}: |V| = {magnitude}")]
    Diverged { episode: usize, magnitude: f64 },
    #[error("no feasible completion for chain {chain} at position {position}")]
    NoFeasibleCompletion { chain: usize, position: usize },
    #[error("no feasible placement")]
    NoFeasiblePlacement,
}
