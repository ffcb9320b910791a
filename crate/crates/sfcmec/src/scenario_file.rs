//! TOML scenario files.
//!
//! See `docs/scenario-format.md` for the schema.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sfcmec_core::scenario::Scenario;
use sfcmec_core::topology::{validate_topology, Hop};
use sfcmec_core::workload::WorkloadConfig;
use sfcmec_core::{LinkCapacitySet, MecNode, NodeId, ResourceVector, ServiceChain, Topology, VnfId, VnfSpec};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parsing scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("writing scenario: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(rename = "node")]
    pub nodes: Vec<NodeEntry>,
    #[serde(rename = "vnf")]
    pub vnfs: Vec<VnfEntry>,
    #[serde(rename = "chain")]
    pub chains: Vec<ChainEntry>,
    #[serde(rename = "link", default)]
    pub links: Vec<LinkEntry>,
    pub workload: WorkloadEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub name: String,
    pub compute: f64,
    pub storage: f64,
    pub transmission: f64,
    /// Divisor of the processing delay, in bytes per ms.
    pub processing_capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VnfEntry {
    pub name: String,
    pub compute: f64,
    pub storage: f64,
    pub transmission: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainEntry {
    pub name: String,
    pub vnfs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkEntry {
    pub from: String,
    pub to: String,
    pub capacity: f64,
    #[serde(rename = "allocation", default)]
    pub allocations: Vec<AllocationEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationEntry {
    pub from_vnf: String,
    pub to_vnf: String,
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadEntry {
    pub packet_min: f64,
    pub packet_max: f64,
    pub arrival_rate: f64,
    pub horizon: u64,
    pub seed: u64,
    /// Keyed by chain name.
    pub chain_weights: BTreeMap<String, f64>,
    pub timeouts_ms: BTreeMap<String, f64>,
}

fn index_by_name<'a>(kind: &'static str, names: impl Iterator<Item = &'a str>) -> Result<BTreeMap<&'a str, usize>, ScenarioError> {
    let mut map = BTreeMap::new();
    for (i, name) in names.enumerate() {
        if map.insert(name, i).is_some() {
            return Err(ScenarioError::Duplicate { kind, name: name.to_string() });
        }
    }
    Ok(map)
}

fn lookup(map: &BTreeMap<&str, usize>, kind: &'static str, name: &str) -> Result<usize, ScenarioError> {
    map.get(name).copied().ok_or_else(|| ScenarioError::UnknownName { kind, name: name.to_string() })
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String, ScenarioError> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_scenario(scenario: &Scenario) -> Self {
        let t = &scenario.topology;
        let w = &scenario.workload;
        let nodes = t
            .nodes
            .iter()
            .map(|n| NodeEntry {
                name: n.name.clone(),
                compute: n.capacity.compute,
                storage: n.capacity.storage,
                transmission: n.capacity.transmission,
                processing_capacity: n.processing_capacity,
            })
            .collect();
        let vnfs = t
            .vnfs
            .iter()
            .map(|v| VnfEntry {
                name: v.name.clone(),
                compute: v.demand.compute,
                storage: v.demand.storage,
                transmission: v.demand.transmission,
            })
            .collect();
        let chains = t
            .chains
            .iter()
            .map(|c| ChainEntry { name: c.name.clone(), vnfs: c.vnfs.iter().map(|v| t.vnfs[v.0].name.clone()).collect() })
            .collect();
        let links = t
            .links
            .totals()
            .map(|((from, to), capacity)| LinkEntry {
                from: t.nodes[from.0].name.clone(),
                to: t.nodes[to.0].name.clone(),
                capacity,
                allocations: t
                    .links
                    .allocations()
                    .filter(|(h, _)| h.from_node == from && h.to_node == to)
                    .map(|(h, c)| AllocationEntry {
                        from_vnf: t.vnfs[h.from_vnf.0].name.clone(),
                        to_vnf: t.vnfs[h.to_vnf.0].name.clone(),
                        capacity: c,
                    })
                    .collect(),
            })
            .collect();
        let by_chain = |values: &[f64]| t.chains.iter().zip(values).map(|(c, v)| (c.name.clone(), *v)).collect();
        let workload = WorkloadEntry {
            packet_min: w.packet_min,
            packet_max: w.packet_max,
            arrival_rate: w.arrival_rate,
            horizon: w.horizon,
            seed: w.seed,
            chain_weights: by_chain(&w.chain_weights),
            timeouts_ms: by_chain(&w.timeouts),
        };
        Self { nodes, vnfs, chains, links, workload }
    }

    /// Resolves names and checks the topology invariants.
    pub fn to_scenario(&self) -> Result<Scenario, ScenarioError> {
        let node_idx = index_by_name("node", self.nodes.iter().map(|n| n.name.as_str()))?;
        let vnf_idx = index_by_name("VNF", self.vnfs.iter().map(|v| v.name.as_str()))?;
        let chain_idx = index_by_name("chain", self.chains.iter().map(|c| c.name.as_str()))?;

        let nodes = self
            .nodes
            .iter()
            .map(|n| MecNode {
                name: n.name.clone(),
                capacity: ResourceVector::new(n.compute, n.storage, n.transmission),
                processing_capacity: n.processing_capacity,
            })
            .collect();
        let vnfs = self
            .vnfs
            .iter()
            .map(|v| VnfSpec { name: v.name.clone(), demand: ResourceVector::new(v.compute, v.storage, v.transmission) })
            .collect();
        let chains = self
            .chains
            .iter()
            .map(|c| {
                let vnfs = c.vnfs.iter().map(|v| lookup(&vnf_idx, "VNF", v).map(VnfId)).collect::<Result<_, _>>()?;
                Ok(ServiceChain { name: c.name.clone(), vnfs })
            })
            .collect::<Result<_, ScenarioError>>()?;
        let mut links = LinkCapacitySet::new();
        for l in &self.links {
            let from = NodeId(lookup(&node_idx, "node", &l.from)?);
            let to = NodeId(lookup(&node_idx, "node", &l.to)?);
            links.set_total(from, to, l.capacity);
            for a in &l.allocations {
                let hop = Hop {
                    from_node: from,
                    from_vnf: VnfId(lookup(&vnf_idx, "VNF", &a.from_vnf)?),
                    to_node: to,
                    to_vnf: VnfId(lookup(&vnf_idx, "VNF", &a.to_vnf)?),
                };
                links.allocate(hop, a.capacity);
            }
        }
        let topology = Topology { nodes, vnfs, chains, links };
        let report = validate_topology(&topology);
        if !report.is_valid() {
            let list: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            return Err(ScenarioError::Invalid(list.join("; ")));
        }

        let w = &self.workload;
        let per_chain = |map: &BTreeMap<String, f64>, what: &str| -> Result<Vec<f64>, ScenarioError> {
            for name in map.keys() {
                lookup(&chain_idx, "chain", name)?;
            }
            self.chains
                .iter()
                .map(|c| {
                    map.get(&c.name)
                        .copied()
                        .ok_or_else(|| ScenarioError::Invalid(format!("workload.{what} has no entry for chain `{}`", c.name)))
                })
                .collect()
        };
        let workload = WorkloadConfig {
            packet_min: w.packet_min,
            packet_max: w.packet_max,
            arrival_rate: w.arrival_rate,
            horizon: w.horizon,
            chain_weights: per_chain(&w.chain_weights, "chain_weights")?,
            timeouts: per_chain(&w.timeouts_ms, "timeouts_ms")?,
            seed: w.seed,
        };
        workload.validate().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        Ok(Scenario { topology, workload })
    }
}

/// Hex SHA-256 of the file contents, used to key golden values.
pub fn fingerprint(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A parsed scenario together with the fingerprint of its file.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub fingerprint: String,
}

pub fn load(path: &Path) -> Result<LoadedScenario, ScenarioError> {
    let bytes = fs::read(path).map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    let text = String::from_utf8_lossy(&bytes);
    let scenario = ScenarioFile::parse(&text)?.to_scenario()?;
    Ok(LoadedScenario { scenario, fingerprint: fingerprint(&bytes) })
}

pub fn save(scenario: &Scenario, path: &Path) -> Result<(), ScenarioError> {
    let text = ScenarioFile::from_scenario(scenario).to_toml()?;
    fs::write(path, text).map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use sfcmec_core::scenario::{paper_scenario, PaperTemplate};

    #[test]
    fn round_trip() {
        let s = paper_scenario(PaperTemplate::default()).unwrap();
        let text = ScenarioFile::from_scenario(&s).to_toml().unwrap();
        let back = ScenarioFile::parse(&text).unwrap().to_scenario().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_unknown_fields_and_names() {
        let s = paper_scenario(PaperTemplate::default()).unwrap();
        let text = ScenarioFile::from_scenario(&s).to_toml().unwrap();
        let extra = text.replacen("[workload]", "[workload]\nburst = 3", 1);
        assert!(matches!(ScenarioFile::parse(&extra), Err(ScenarioError::Parse(_))));
        let renamed = text.replacen("vnfs = [\"vnf-1\"", "vnfs = [\"vnf-9\"", 1);
        let err = ScenarioFile::parse(&renamed).unwrap().to_scenario().unwrap_err();
        assert!(matches!(err, ScenarioError::UnknownName { kind: "VNF", .. }), "{err}");
    }
}
