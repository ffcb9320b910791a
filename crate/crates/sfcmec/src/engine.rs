//! Runs one engine on one scenario and returns its final placement.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

use sfcmec_core::ga::{evolve, Evolution, GaConfig};
use sfcmec_core::learner::{extract_placement, train, LearnerConfig, Policy, Trained};
use sfcmec_core::mfg::{forward_sweep, solve_mfg, CongestionKernel, MfgSolution, RewardModel, StateSpace};
use sfcmec_core::oracle::optimal_placement;
use sfcmec_core::{delay, PlacementMatrix, Topology};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum)]
pub enum Engine {
    Mfg,
    Rl,
    Ga,
    Oracle,
}

impl Engine {
    pub const ALL: [Engine; 4] = [Engine::Mfg, Engine::Rl, Engine::Ga, Engine::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Mfg => "mfg",
            Engine::Rl => "rl",
            Engine::Ga => "ga",
            Engine::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| anyhow!("unknown engine `{s}` (expected mfg, rl, ga or oracle)"))
    }
}

#[derive(Debug, Clone)]
pub enum Artifacts {
    Mfg(Box<MfgSolution>),
    Rl(Box<Trained>),
    Ga(Evolution),
    Oracle { evaluated: usize },
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub engine: Engine,
    pub seed: u64,
    /// Packet size the engine was trained and scored at.
    pub beta: f64,
    pub placement: PlacementMatrix,
    /// One request per chain at `beta`, in ms.
    pub objective: f64,
    /// False only for an MFG solve that hit its iteration limit.
    pub converged: bool,
    pub artifacts: Artifacts,
}

pub fn congestion_model(topology: &Topology, space: &StateSpace, config: &RunConfig, beta: f64) -> Result<CongestionKernel> {
    Ok(CongestionKernel::new(topology, space, beta, config.congestion_weight)?)
}

fn learner_config(config: &RunConfig, seed: u64, beta: f64) -> LearnerConfig {
    LearnerConfig { seed, delay_beta: beta, ..config.learner.clone() }
}

/// Trains or solves with `engine` at packet size `beta`.
pub fn run_engine(engine: Engine, topology: &Topology, config: &RunConfig, seed: u64, beta: f64) -> Result<RunOutput> {
    if beta.is_nan() || beta <= 0.0 {
        bail!("packet size must be positive, got {beta}");
    }
    let space = StateSpace::for_topology(topology)?;
    let (placement, converged, artifacts) = match engine {
        Engine::Mfg => {
            let model = congestion_model(topology, &space, config, beta)?;
            let solution = solve_mfg(&space, &model, &space.source_density(), &config.mfg)?;
            let policy = Policy::from_matrix(&space, &solution.layer_policy(&space))?;
            let placement = extract_placement(topology, &space, &policy, &solution.kernel)
                .context("decoding the equilibrium policy")?;
            (placement, solution.converged, Artifacts::Mfg(Box::new(solution)))
        }
        Engine::Rl => {
            let model = congestion_model(topology, &space, config, beta)?;
            let trained = train(topology, &space, &model, &learner_config(config, seed, beta))?;
            let placement = extract_placement(topology, &space, &trained.policy, &trained.kernel)
                .context("decoding the trained policy")?;
            (placement, true, Artifacts::Rl(Box::new(trained)))
        }
        Engine::Ga => {
            let ga = GaConfig { seed, ..config.ga.clone() };
            let evolution = evolve(&ga, topology, &[beta])?;
            let placement = evolution.best.decode(topology)?;
            (placement, true, Artifacts::Ga(evolution))
        }
        Engine::Oracle => {
            let optimum = optimal_placement(topology, &[beta], config.enumeration_bound)?;
            (optimum.placement, true, Artifacts::Oracle { evaluated: optimum.evaluated })
        }
    };
    let objective = delay::grid_objective(topology, &placement, &[beta])?;
    Ok(RunOutput { engine, seed, beta, placement, objective, converged, artifacts })
}

/// Greedy decode of a stored policy, with the kernel priced at the
/// density the policy induces at the final training temperature.
pub fn decode_policy(topology: &Topology, config: &RunConfig, policy: &Policy) -> Result<PlacementMatrix> {
    let space = StateSpace::for_topology(topology)?;
    let model = congestion_model(topology, &space, config, config.reference_beta)?;
    let p = policy.decode(&space, config.learner.temperature_end);
    let densities = forward_sweep(&space.source_density(), &vec![p; space.depth()], Default::default())?;
    let kernel = model.kernel(&space, &densities);
    Ok(extract_placement(topology, &space, policy, &kernel)?)
}

/// Delay of every chain at each packet size, chain-major.
pub fn chain_delays(topology: &Topology, placement: &PlacementMatrix, betas: &[f64]) -> Result<Vec<Vec<f64>>> {
    topology
        .chain_ids()
        .map(|k| betas.iter().map(|b| Ok(delay::chain_delay(topology, placement, k, *b)?.total)).collect())
        .collect()
}
