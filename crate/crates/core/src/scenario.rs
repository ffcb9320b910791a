//! Bundled scenarios.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::topology::Hop;
use crate::workload::WorkloadConfig;
use crate::{Error, LinkCapacitySet, MecNode, NodeId, ResourceVector, Result, ServiceChain, Topology, VnfId, VnfSpec};

/// Topology plus the request generator settings that go with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub topology: Topology,
    pub workload: WorkloadConfig,
}

/// Smallest and largest packet size of the bundled workload, in bytes.
pub const PACKET_MIN: f64 = 100_000.0;
pub const PACKET_MAX: f64 = 2_000_000.0;
/// Packet size used when training placements, in bytes.
pub const REFERENCE_BETA: f64 = 1_000_000.0;

pub const NODE_CAPACITY: f64 = 100.0;
const PROCESSING: [f64; 3] = [600_000.0, 450_000.0, 300_000.0];
/// Link totals for the node pairs (1,2), (1,3), (2,3), both directions.
const LINKS: [((usize, usize), f64); 3] = [((0, 1), 6_000_000.0), ((0, 2), 3_000_000.0), ((1, 2), 4_500_000.0)];
/// The three chains, as 1-based VNF numbers.
pub const PAPER_CHAINS: [&[usize]; 3] = [&[1, 2, 3], &[1, 4, 6], &[3, 4, 5, 7]];

/// Parameters of the three-node, seven-VNF, three-chain scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaperTemplate {
    /// Share of the aggregate node capacity the VNF instances require
    /// together, between 0.10 and 0.70.
    pub load: f64,
    pub seed: u64,
}

impl Default for PaperTemplate {
    fn default() -> Self {
        Self { load: 0.5, seed: 2021 }
    }
}

/// Builds the bundled scenario. Demands are random per-VNF shares (fixed
/// seed) of `load × aggregate capacity`, counted once per chain instance,
/// rounded to two decimals.
pub fn paper_scenario(template: PaperTemplate) -> Result<Scenario> {
    if !(0.10..=0.70).contains(&template.load) {
        return Err(Error::Config(format!("load {} outside [0.10, 0.70]", template.load)));
    }
    let nodes: Vec<MecNode> = PROCESSING
        .iter()
        .enumerate()
        .map(|(i, speed)| MecNode {
            name: format!("mec-{}", i + 1),
            capacity: ResourceVector::new(NODE_CAPACITY, NODE_CAPACITY, NODE_CAPACITY),
            processing_capacity: *speed,
        })
        .collect();
    let chains: Vec<ServiceChain> = PAPER_CHAINS
        .iter()
        .enumerate()
        .map(|(k, vnfs)| ServiceChain {
            name: format!("sfc-{}", k + 1),
            vnfs: vnfs.iter().map(|j| VnfId(j - 1)).collect(),
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(template.seed);
    let share = Uniform::new(1.0, 2.0).map_err(|e| Error::Config(e.to_string()))?;
    let weights: Vec<[f64; 3]> = (0..7)
        .map(|_| [share.sample(&mut rng), share.sample(&mut rng), share.sample(&mut rng)])
        .collect();
    let mut instances = [0usize; 7];
    for chain in &chains {
        for v in &chain.vnfs {
            instances[v.0] += 1;
        }
    }
    let budget = template.load * NODE_CAPACITY * nodes.len() as f64;
    let mut totals = [0.0f64; 3];
    for (w, count) in weights.iter().zip(instances) {
        for c in 0..3 {
            totals[c] += w[c] * count as f64;
        }
    }
    let round = |x: f64| libm::round(x * 100.0) / 100.0;
    let vnfs: Vec<VnfSpec> = weights
        .iter()
        .enumerate()
        .map(|(j, w)| VnfSpec {
            name: format!("vnf-{}", j + 1),
            demand: ResourceVector::new(
                round(budget * w[0] / totals[0]),
                round(budget * w[1] / totals[1]),
                round(budget * w[2] / totals[2]),
            ),
        })
        .collect();

    let mut hops: Vec<(VnfId, VnfId)> = chains.iter().flat_map(|c| c.vnfs.windows(2).map(|w| (w[0], w[1]))).collect();
    hops.sort();
    hops.dedup();
    let mut links = LinkCapacitySet::new();
    for ((a, b), total) in LINKS {
        for (from, to) in [(a, b), (b, a)] {
            links.set_total(NodeId(from), NodeId(to), total);
            let per_hop = libm::floor(total / hops.len() as f64);
            for (from_vnf, to_vnf) in &hops {
                links.allocate(
                    Hop { from_node: NodeId(from), from_vnf: *from_vnf, to_node: NodeId(to), to_vnf: *to_vnf },
                    per_hop,
                );
            }
        }
    }

    let topology = Topology { nodes, vnfs, chains, links };
    let workload = WorkloadConfig {
        packet_min: PACKET_MIN,
        packet_max: PACKET_MAX,
        arrival_rate: 2.0,
        horizon: 100,
        chain_weights: vec![1.0 / 3.0; 3],
        timeouts: vec![500.0, 500.0, 800.0],
        seed: template.seed,
    };
    Ok(Scenario { topology, workload })
}
