//! Exhaustive references used to check the solvers at desk scale.
//!
//! Nothing here calls into `delay` or the solvers in `mfg`; the delay
//! equations and the backward recursion are written out again so that the
//! two implementations check each other.

use alloc::vec;
use alloc::vec::Vec;

use crate::mfg::{RewardKernel, StateSpace, ValueVector};
use crate::topology::{enumerate_feasible_placements, Hop};
use crate::{ChainId, Error, NodeId, PlacementMatrix, Result, Topology};

/// Processing and transmission delay of one request on `chain` of size
/// `beta`, summed term by term over every (node, VNF) pair.
pub fn straight_line_delay(
    topology: &Topology,
    placement: &PlacementMatrix,
    chain: ChainId,
    beta: f64,
) -> Result<(f64, f64)> {
    let spec = topology.chain(chain)?;
    for p in 0..spec.len() {
        if placement.placed_count(chain, p)? != 1 {
            return Err(Error::IncompletePlacement { chain: chain.0 });
        }
    }
    let n = topology.nodes.len();
    let x = |i: usize, p: usize| placement.get(NodeId(i), chain, p);

    let mut processing = 0.0;
    for i in 0..n {
        let alpha = topology.nodes[i].processing_capacity;
        for (p, j) in spec.vnfs.iter().enumerate() {
            if x(i, p)? {
                processing += topology.vnfs[j.0].demand.compute * beta / alpha;
            }
        }
    }

    let mut transmission = 0.0;
    for p in 1..spec.len() {
        let (j, jj) = (spec.vnfs[p - 1], spec.vnfs[p]);
        for i in 0..n {
            for ii in 0..n {
                if i == ii || !(x(i, p - 1)? && x(ii, p)?) {
                    continue;
                }
                let hop = Hop { from_node: NodeId(i), from_vnf: j, to_node: NodeId(ii), to_vnf: jj };
                let l = topology
                    .links
                    .allocation(&hop)
                    .ok_or_else(|| Error::MissingLinkAllocation(alloc::format!("{hop}")))?;
                transmission += topology.vnfs[j.0].demand.transmission * beta / l;
            }
        }
    }
    Ok((processing, transmission))
}

/// One request per chain per packet size.
pub fn straight_line_objective(topology: &Topology, placement: &PlacementMatrix, betas: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for beta in betas {
        for k in 0..topology.chains.len() {
            let (p, t) = straight_line_delay(topology, placement, ChainId(k), *beta)?;
            total += p + t;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub placement: PlacementMatrix,
    pub objective: f64,
    /// Feasible placements inspected.
    pub evaluated: usize,
}

/// The feasible complete placement with the smallest objective; the first
/// in enumeration order wins ties. Placements using a hop without a link
/// allocation are skipped.
pub fn optimal_placement(topology: &Topology, betas: &[f64], bound: u64) -> Result<Optimum> {
    let mut best: Option<(PlacementMatrix, f64)> = None;
    let mut evaluated = 0;
    for placement in enumerate_feasible_placements(topology, bound)? {
        let objective = match straight_line_objective(topology, &placement, betas) {
            Ok(v) => v,
            Err(Error::MissingLinkAllocation(_)) => continue,
            Err(e) => return Err(e),
        };
        evaluated += 1;
        if best.as_ref().is_none_or(|(_, b)| objective < *b) {
            best = Some((placement, objective));
        }
    }
    let (placement, objective) = best.ok_or(Error::NoFeasiblePlacement)?;
    Ok(Optimum { placement, objective, evaluated })
}

/// Best total reward from each state to absorption, by memoized recursion.
/// Valid for density-independent kernels on acyclic spaces.
pub fn dp_values(space: &StateSpace, kernel: &RewardKernel) -> ValueVector {
    fn visit(s: usize, kernel: &RewardKernel, memo: &mut Vec<Option<f64>>) -> f64 {
        if let Some(v) = memo[s] {
            return v;
        }
        let mut best = f64::NEG_INFINITY;
        let mut any = false;
        for (t, r) in kernel.edges(s) {
            if *t == s {
                continue;
            }
            any = true;
            let candidate = r + visit(*t, kernel, memo);
            if candidate > best {
                best = candidate;
            }
        }
        let v = if any { best } else { 0.0 };
        memo[s] = Some(v);
        v
    }
    let mut memo = vec![None; space.len()];
    let values = (0..space.len()).map(|s| visit(s, kernel, &mut memo)).collect();
    ValueVector(values)
}

/// Every path from `start` to an absorbing state with its total reward.
pub fn enumerate_paths(space: &StateSpace, kernel: &RewardKernel, start: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut stack = vec![(vec![start], 0.0)];
    while let Some((path, reward)) = stack.pop() {
        let s = *path.last().expect("nonempty");
        let next: Vec<(usize, f64)> = space
            .successors(s)
            .iter()
            .filter(|t| **t != s)
            .map(|t| (*t, kernel.get(s, *t).unwrap_or(0.0)))
            .collect();
        if next.is_empty() {
            out.push((path, reward));
            continue;
        }
        for (t, r) in next {
            let mut p = path.clone();
            p.push(t);
            stack.push((p, reward + r));
        }
    }
    out
}
