//! The placement game: states are `(chain, position, node)` slots plus one
//! source state per chain, rewards are negative incremental delays with a
//! congestion penalty driven by the population density.

use alloc::vec;
use alloc::vec::Vec;

use super::{DensityVector, RewardKernel, RewardModel, StateSpace};
use crate::topology::Hop;
use crate::{ChainId, Error, NodeId, Result, ResourceVector, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateLabel {
    /// State of a space built from raw successor lists.
    Abstract(usize),
    /// Where a request of the chain enters, before its ingress is placed.
    Source(ChainId),
    /// VNF at `position` of `chain` hosted on `node`.
    Slot { chain: ChainId, position: usize, node: NodeId },
}

impl StateSpace {
    /// Source states and slot states for every chain of `topology`.
    ///
    /// A cross-node edge exists only where the link set allocates capacity
    /// for that hop; same-node edges always exist. Egress slots absorb.
    pub fn for_topology(topology: &Topology) -> Result<Self> {
        let n = topology.nodes.len();
        if n == 0 {
            return Err(Error::Config("topology has no nodes".into()));
        }
        let mut labels = Vec::new();
        let mut bases = Vec::new();
        for (k, chain) in topology.chains.iter().enumerate() {
            if chain.is_empty() {
                return Err(Error::Config(alloc::format!("chain {k} is empty")));
            }
            bases.push(labels.len());
            labels.push(StateLabel::Source(ChainId(k)));
            for p in 0..chain.len() {
                for i in 0..n {
                    labels.push(StateLabel::Slot { chain: ChainId(k), position: p, node: NodeId(i) });
                }
            }
        }
        let slot_index = |k: usize, p: usize, i: usize| bases[k] + 1 + p * n + i;
        let mut successors = Vec::with_capacity(labels.len());
        for (s, label) in labels.iter().enumerate() {
            let succ = match *label {
                StateLabel::Source(k) => (0..n).map(|i| slot_index(k.0, 0, i)).collect(),
                StateLabel::Slot { chain, position, node } => {
                    let vnfs = &topology.chains[chain.0].vnfs;
                    if position + 1 == vnfs.len() {
                        vec![s]
                    } else {
                        (0..n)
                            .filter(|i| {
                                *i == node.0
                                    || topology
                                        .links
                                        .allocation(&Hop {
                                            from_node: node,
                                            from_vnf: vnfs[position],
                                            to_node: NodeId(*i),
                                            to_vnf: vnfs[position + 1],
                                        })
                                        .is_some()
                            })
                            .map(|i| slot_index(chain.0, position + 1, i))
                            .collect()
                    }
                }
                StateLabel::Abstract(_) => unreachable!(),
            };
            successors.push(succ);
        }
        Self::with_labels(successors, labels)
    }

    pub fn find(&self, label: StateLabel) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    pub fn source_of(&self, chain: ChainId) -> Option<usize> {
        self.find(StateLabel::Source(chain))
    }

    /// Unit mass at every chain's source state.
    pub fn source_density(&self) -> DensityVector {
        DensityVector(
            self.labels
                .iter()
                .map(|l| if matches!(l, StateLabel::Source(_)) { 1.0 } else { 0.0 })
                .collect(),
        )
    }

    /// Unit mass per chain spread evenly over its ingress slot states.
    pub fn uniform_ingress_density(&self) -> DensityVector {
        let ingress: Vec<bool> = self
            .labels
            .iter()
            .map(|l| matches!(l, StateLabel::Slot { position: 0, .. }))
            .collect();
        let mut per_chain = alloc::collections::BTreeMap::new();
        for l in &self.labels {
            if let StateLabel::Slot { chain, position: 0, .. } = l {
                *per_chain.entry(*chain).or_insert(0usize) += 1;
            }
        }
        DensityVector(
            self.labels
                .iter()
                .zip(ingress)
                .map(|(l, is_ingress)| match l {
                    StateLabel::Slot { chain, .. } if is_ingress => 1.0 / per_chain[chain] as f64,
                    _ => 0.0,
                })
                .collect(),
        )
    }
}

/// Reward for entering a slot: minus the hop's transmission delay and the
/// slot's processing delay at a reference packet size, minus
/// `weight × relative overflow` of the target node, where the node's load
/// is projected from the density of every other slot plus the entering
/// VNF's own demand.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionKernel {
    base: RewardKernel,
    /// `(slot, node)` for slot states.
    slot_of_state: Vec<Option<(usize, usize)>>,
    slot_demand: Vec<ResourceVector>,
    capacities: Vec<ResourceVector>,
    weight: f64,
    max_hop_delay: f64,
}

impl CongestionKernel {
    /// `weight = None` uses ten times the largest single-hop delay.
    pub fn new(topology: &Topology, space: &StateSpace, reference_beta: f64, weight: Option<f64>) -> Result<Self> {
        let mut offsets = Vec::new();
        let mut acc = 0;
        for c in &topology.chains {
            offsets.push(acc);
            acc += c.len();
        }
        let slot_demand = topology
            .slots()
            .map(|(k, p)| topology.vnf(topology.chains[k.0].vnfs[p]).map(|v| v.demand))
            .collect::<Result<Vec<_>>>()?;
        let slot_of_state = (0..space.len())
            .map(|s| match space.label(s) {
                StateLabel::Slot { chain, position, node } => Some((offsets[chain.0] + position, node.0)),
                _ => None,
            })
            .collect();

        let mut failure = None;
        let base = RewardKernel::from_fn(space, |from, to| {
            if from == to {
                return 0.0;
            }
            match edge_delay(topology, space.label(from), space.label(to), reference_beta) {
                Ok(d) => -d,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        let max_hop_delay = base.max_abs();
        let weight = weight.unwrap_or(10.0 * max_hop_delay);
        if !(weight >= 0.0) {
            return Err(Error::Config("congestion weight must be nonnegative".into()));
        }
        Ok(Self {
            base,
            slot_of_state,
            slot_demand,
            capacities: topology.nodes.iter().map(|n| n.capacity).collect(),
            weight,
            max_hop_delay,
        })
    }

    /// Same rewards without the density term.
    pub fn congestion_free(topology: &Topology, space: &StateSpace, reference_beta: f64) -> Result<Self> {
        Self::new(topology, space, reference_beta, Some(0.0))
    }

    pub fn base(&self) -> &RewardKernel {
        &self.base
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn max_hop_delay(&self) -> f64 {
        self.max_hop_delay
    }

    /// Occupancy of each state: the largest mass it holds in any slot.
    pub fn occupancy(densities: &[DensityVector]) -> Vec<f64> {
        let n = densities.first().map_or(0, |d| d.0.len());
        (0..n)
            .map(|s| densities.iter().map(|d| d.0[s]).fold(0.0, f64::max))
            .collect()
    }
}

impl RewardModel for CongestionKernel {
    fn kernel(&self, space: &StateSpace, densities: &[DensityVector]) -> RewardKernel {
        if self.weight == 0.0 {
            return self.base.clone();
        }
        let occupancy = Self::occupancy(densities);
        let mut load = vec![ResourceVector::ZERO; self.capacities.len()];
        for (s, occ) in occupancy.iter().enumerate() {
            if let Some((slot, node)) = self.slot_of_state[s] {
                load[node] += self.slot_demand[slot].scaled(*occ);
            }
        }
        RewardKernel::from_fn(space, |from, to| {
            let base = self.base.get(from, to).unwrap_or(0.0);
            if from == to {
                return base;
            }
            match self.slot_of_state[to] {
                Some((slot, node)) => {
                    let demand = self.slot_demand[slot];
                    let own = demand.scaled(occupancy[to]);
                    let others = load[node] + own.scaled(-1.0);
                    let projected = others + demand;
                    base - self.weight * projected.relative_overflow(&self.capacities[node])
                }
                None => base,
            }
        })
    }

    fn depends_on_density(&self) -> bool {
        self.weight != 0.0
    }
}

/// Transmission delay of the hop (zero from a source or within a node)
/// plus processing delay of the entered VNF, at packet size `beta`.
pub(crate) fn edge_delay(topology: &Topology, from: StateLabel, to: StateLabel, beta: f64) -> Result<f64> {
    let StateLabel::Slot { chain, position, node } = to else {
        return Err(Error::Config("edge into a non-slot state".into()));
    };
    let vnf_id = topology.chains[chain.0].vnfs[position];
    let processing = topology.vnf(vnf_id)?.demand.compute * beta / topology.node(node)?.processing_capacity;
    let transmission = match from {
        StateLabel::Slot { chain: c, position: p, node: from_node } if c == chain && p + 1 == position => {
            if from_node == node {
                0.0
            } else {
                let from_vnf = topology.chains[chain.0].vnfs[p];
                let hop = Hop { from_node, from_vnf, to_node: node, to_vnf: vnf_id };
                let share = topology
                    .links
                    .allocation(&hop)
                    .ok_or_else(|| Error::MissingLinkAllocation(alloc::format!("{hop}")))?;
                topology.vnf(from_vnf)?.demand.transmission * beta / share
            }
        }
        StateLabel::Source(c) if c == chain && position == 0 => 0.0,
        _ => return Err(Error::Config("edge does not follow chain order".into())),
    };
    Ok(transmission + processing)
}
