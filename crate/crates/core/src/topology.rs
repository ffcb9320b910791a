//! MEC infrastructure, VNF catalog, service chains and placements.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign};

use crate::{Error, Result};

/// Compute, storage and transmission capacity (or demand).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResourceVector {
    pub compute: f64,
    pub storage: f64,
    pub transmission: f64,
}

impl ResourceVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(compute: f64, storage: f64, transmission: f64) -> Self {
        Self { compute, storage, transmission }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.compute, self.storage, self.transmission]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.components().iter().all(|c| *c >= 0.0)
    }

    /// Component-wise `self <= capacity`.
    pub fn fits_within(&self, capacity: &ResourceVector) -> bool {
        self.components()
            .iter()
            .zip(capacity.components())
            .all(|(d, c)| *d <= c)
    }

    /// Sum over components of the overflow relative to `capacity`.
    pub fn relative_overflow(&self, capacity: &ResourceVector) -> f64 {
        self.components()
            .iter()
            .zip(capacity.components())
            .map(|(d, c)| {
                let excess = d - c;
                if excess <= 0.0 {
                    0.0
                } else if c > 0.0 {
                    excess / c
                } else {
                    excess
                }
            })
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.compute * factor, self.storage * factor, self.transmission * factor)
    }
}

impl Add for ResourceVector {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.compute + rhs.compute,
            self.storage + rhs.storage,
            self.transmission + rhs.transmission,
        )
    }
}

impl AddAssign for ResourceVector {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

macro_rules! index_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

index_id!(
    /// Position of a node in [`Topology::nodes`].
    NodeId
);
index_id!(
    /// Position of a VNF in [`Topology::vnfs`].
    VnfId
);
index_id!(
    /// Position of a chain in [`Topology::chains`].
    ChainId
);

#[derive(Debug, Clone, PartialEq)]
pub struct MecNode {
    pub name: String,
    pub capacity: ResourceVector,
    /// Divisor of the processing-delay term, in bytes per millisecond per
    /// unit of compute demand.
    pub processing_capacity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VnfSpec {
    pub name: String,
    pub demand: ResourceVector,
}

/// Ordered VNF sequence; the first element is the ingress, the last the egress.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceChain {
    pub name: String,
    pub vnfs: Vec<VnfId>,
}

impl ServiceChain {
    pub fn len(&self) -> usize {
        self.vnfs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vnfs.is_empty()
    }

    pub fn ingress(&self) -> Option<VnfId> {
        self.vnfs.first().copied()
    }

    pub fn egress(&self) -> Option<VnfId> {
        self.vnfs.last().copied()
    }

    pub fn position_of(&self, vnf: VnfId) -> Option<usize> {
        self.vnfs.iter().position(|v| *v == vnf)
    }
}

/// Directed hop from VNF `from_vnf` on `from_node` to `to_vnf` on `to_node`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hop {
    pub from_node: NodeId,
    pub from_vnf: VnfId,
    pub to_node: NodeId,
    pub to_vnf: VnfId,
}

impl fmt::Display for Hop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(node {}, vnf {}) -> (node {}, vnf {})",
            self.from_node, self.from_vnf, self.to_node, self.to_vnf
        )
    }
}

/// Inter-node link capacities and their per-VNF-pair shares.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinkCapacitySet {
    totals: BTreeMap<(NodeId, NodeId), f64>,
    allocations: BTreeMap<Hop, f64>,
}

impl LinkCapacitySet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_total(&mut self, from: NodeId, to: NodeId, capacity: f64) {
        self.totals.insert((from, to), capacity);
    }

    pub fn allocate(&mut self, hop: Hop, capacity: f64) {
        self.allocations.insert(hop, capacity);
    }

    pub fn total(&self, from: NodeId, to: NodeId) -> Option<f64> {
        self.totals.get(&(from, to)).copied()
    }

    pub fn allocation(&self, hop: &Hop) -> Option<f64> {
        self.allocations.get(hop).copied()
    }

    pub fn totals(&self) -> impl Iterator<Item = ((NodeId, NodeId), f64)> + '_ {
        self.totals.iter().map(|(k, v)| (*k, *v))
    }

    pub fn allocations(&self) -> impl Iterator<Item = (Hop, f64)> + '_ {
        self.allocations.iter().map(|(k, v)| (*k, *v))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Topology {
    pub nodes: Vec<MecNode>,
    pub vnfs: Vec<VnfSpec>,
    pub chains: Vec<ServiceChain>,
    pub links: LinkCapacitySet,
}

impl Topology {
    pub fn node(&self, id: NodeId) -> Result<&MecNode> {
        self.nodes
            .get(id.0)
            .ok_or_else(|| Error::OutOfRange(format!("node {}", id)))
    }

    pub fn vnf(&self, id: VnfId) -> Result<&VnfSpec> {
        self.vnfs
            .get(id.0)
            .ok_or_else(|| Error::OutOfRange(format!("vnf {}", id)))
    }

    pub fn chain(&self, id: ChainId) -> Result<&ServiceChain> {
        self.chains
            .get(id.0)
            .ok_or_else(|| Error::OutOfRange(format!("chain {}", id)))
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn chain_ids(&self) -> impl Iterator<Item = ChainId> {
        (0..self.chains.len()).map(ChainId)
    }

    /// Number of (chain, position) slots, i.e. VNF instances to place.
    pub fn slot_count(&self) -> usize {
        self.chains.iter().map(ServiceChain::len).sum()
    }

    /// `(chain, position)` for every slot, in lexicographic order.
    pub fn slots(&self) -> impl Iterator<Item = (ChainId, usize)> + '_ {
        self.chains
            .iter()
            .enumerate()
            .flat_map(|(k, c)| (0..c.len()).map(move |p| (ChainId(k), p)))
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name).map(NodeId)
    }

    pub fn vnf_by_name(&self, name: &str) -> Option<VnfId> {
        self.vnfs.iter().position(|v| v.name == name).map(VnfId)
    }

    pub fn chain_by_name(&self, name: &str) -> Option<ChainId> {
        self.chains.iter().position(|c| c.name == name).map(ChainId)
    }
}

/// A structural problem found by [`validate_topology`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NegativeCapacity { node: usize },
    NonPositiveProcessingCapacity { node: usize },
    NegativeDemand { vnf: usize },
    EmptyChain { chain: usize },
    UnknownVnf { chain: usize, vnf: usize },
    DuplicateVnf { chain: usize, vnf: usize },
    UnknownNode { node: usize },
    NonPositiveLink { from: usize, to: usize },
    SelfAllocation { node: usize },
    AllocationWithoutTotal { from: usize, to: usize },
    LinkOverAllocation { from: usize, to: usize, allocated: f64, total: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeCapacity { node } => write!(f, "negative capacity on node {node}"),
            Violation::NonPositiveProcessingCapacity { node } => {
                write!(f, "non-positive processing capacity on node {node}")
            }
            Violation::NegativeDemand { vnf } => write!(f, "negative demand for vnf {vnf}"),
            Violation::EmptyChain { chain } => write!(f, "chain {chain} is empty"),
            Violation::UnknownVnf { chain, vnf } => {
                write!(f, "unknown VNF {vnf} referenced by chain {chain}")
            }
            Violation::DuplicateVnf { chain, vnf } => {
                write!(f, "VNF {vnf} appears twice in chain {chain}")
            }
            Violation::UnknownNode { node } => write!(f, "unknown node {node} in link set"),
            Violation::NonPositiveLink { from, to } => {
                write!(f, "non-positive link capacity {from} -> {to}")
            }
            Violation::SelfAllocation { node } => {
                write!(f, "link allocation from node {node} to itself")
            }
            Violation::AllocationWithoutTotal { from, to } => {
                write!(f, "allocation on {from} -> {to} without a link total")
            }
            Violation::LinkOverAllocation { from, to, allocated, total } => write!(
                f,
                "link over-allocation on {from} -> {to}: {allocated} allocated, {total} available"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_topology(topology: &Topology) -> ValidationReport {
    let mut violations = Vec::new();
    let n_nodes = topology.nodes.len();
    let n_vnfs = topology.vnfs.len();

    for (i, node) in topology.nodes.iter().enumerate() {
        if !node.capacity.is_nonnegative() {
            violations.push(Violation::NegativeCapacity { node: i });
        }
        if !(node.processing_capacity > 0.0) {
            violations.push(Violation::NonPositiveProcessingCapacity { node: i });
        }
    }
    for (j, vnf) in topology.vnfs.iter().enumerate() {
        if !vnf.demand.is_nonnegative() {
            violations.push(Violation::NegativeDemand { vnf: j });
        }
    }
    for (k, chain) in topology.chains.iter().enumerate() {
        if chain.is_empty() {
            violations.push(Violation::EmptyChain { chain: k });
        }
        for (p, vnf) in chain.vnfs.iter().enumerate() {
            if vnf.0 >= n_vnfs {
                violations.push(Violation::UnknownVnf { chain: k, vnf: vnf.0 });
            }
            if chain.vnfs[..p].contains(vnf) {
                violations.push(Violation::DuplicateVnf { chain: k, vnf: vnf.0 });
            }
        }
    }

    let mut allocated: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
    for ((from, to), total) in topology.links.totals() {
        for id in [from, to] {
            if id.0 >= n_nodes {
                violations.push(Violation::UnknownNode { node: id.0 });
            }
        }
        if !(total > 0.0) {
            violations.push(Violation::NonPositiveLink { from: from.0, to: to.0 });
        }
    }
    for (hop, capacity) in topology.links.allocations() {
        if hop.from_node == hop.to_node {
            violations.push(Violation::SelfAllocation { node: hop.from_node.0 });
            continue;
        }
        if !(capacity > 0.0) {
            violations.push(Violation::NonPositiveLink { from: hop.from_node.0, to: hop.to_node.0 });
        }
        *allocated.entry((hop.from_node, hop.to_node)).or_insert(0.0) += capacity;
    }
    for ((from, to), sum) in allocated {
        match topology.links.total(from, to) {
            None => violations.push(Violation::AllocationWithoutTotal { from: from.0, to: to.0 }),
            Some(total) if sum > total => violations.push(Violation::LinkOverAllocation {
                from: from.0,
                to: to.0,
                allocated: sum,
                total,
            }),
            Some(_) => {}
        }
    }

    ValidationReport { violations }
}

/// Binary VNF-node-chain assignment `x[(i, j)][k]`.
///
/// Entries are stored per chain slot `(k, position)`, which is equivalent to
/// indexing by VNF because a VNF appears at most once per chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlacementMatrix {
    nodes: usize,
    offsets: Vec<usize>,
    lens: Vec<usize>,
    entries: Vec<bool>,
}

impl PlacementMatrix {
    /// All-zero placement shaped for `topology`.
    pub fn new(topology: &Topology) -> Self {
        let lens: Vec<usize> = topology.chains.iter().map(ServiceChain::len).collect();
        let mut offsets = Vec::with_capacity(lens.len());
        let mut acc = 0;
        for len in &lens {
            offsets.push(acc);
            acc += len;
        }
        Self {
            nodes: topology.nodes.len(),
            offsets,
            lens,
            entries: vec![false; acc * topology.nodes.len()],
        }
    }

    /// Complete placement from one node per slot, chain-major.
    pub fn from_slots(topology: &Topology, slots: &[NodeId]) -> Result<Self> {
        let mut placement = Self::new(topology);
        if slots.len() != placement.slot_count() {
            return Err(Error::Dimension { expected: placement.slot_count(), got: slots.len() });
        }
        for (slot, node) in slots.iter().enumerate() {
            if node.0 >= placement.nodes {
                return Err(Error::OutOfRange(format!("node {}", node)));
            }
            placement.entries[slot * placement.nodes + node.0] = true;
        }
        Ok(placement)
    }

    /// Complete placement from per-chain node lists.
    pub fn from_assignment(topology: &Topology, assignment: &[Vec<NodeId>]) -> Result<Self> {
        let flat: Vec<NodeId> = assignment.iter().flatten().copied().collect();
        let placement = Self::from_slots(topology, &flat)?;
        for (k, nodes) in assignment.iter().enumerate() {
            if placement.lens.get(k) != Some(&nodes.len()) {
                return Err(Error::PlacementShape);
            }
        }
        if assignment.len() != placement.lens.len() {
            return Err(Error::PlacementShape);
        }
        Ok(placement)
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn chain_count(&self) -> usize {
        self.lens.len()
    }

    pub fn chain_len(&self, chain: ChainId) -> usize {
        self.lens.get(chain.0).copied().unwrap_or(0)
    }

    pub fn slot_count(&self) -> usize {
        self.lens.iter().sum()
    }

    fn index(&self, node: NodeId, chain: ChainId, position: usize) -> Result<usize> {
        let len = *self
            .lens
            .get(chain.0)
            .ok_or_else(|| Error::OutOfRange(format!("chain {}", chain)))?;
        if position >= len {
            return Err(Error::OutOfRange(format!("position {} of chain {}", position, chain)));
        }
        if node.0 >= self.nodes {
            return Err(Error::OutOfRange(format!("node {}", node)));
        }
        Ok((self.offsets[chain.0] + position) * self.nodes + node.0)
    }

    pub fn get(&self, node: NodeId, chain: ChainId, position: usize) -> Result<bool> {
        Ok(self.entries[self.index(node, chain, position)?])
    }

    pub fn set(&mut self, node: NodeId, chain: ChainId, position: usize, value: bool) -> Result<()> {
        let idx = self.index(node, chain, position)?;
        self.entries[idx] = value;
        Ok(())
    }

    /// `x[(node, vnf)][chain]`; zero when the VNF is not part of the chain.
    pub fn x(&self, topology: &Topology, node: NodeId, vnf: VnfId, chain: ChainId) -> Result<bool> {
        let chain_spec = topology.chain(chain)?;
        match chain_spec.position_of(vnf) {
            Some(p) => self.get(node, chain, p),
            None => {
                if node.0 >= self.nodes {
                    return Err(Error::OutOfRange(format!("node {}", node)));
                }
                Ok(false)
            }
        }
    }

    pub fn placed_count(&self, chain: ChainId, position: usize) -> Result<usize> {
        let base = self.index(NodeId(0), chain, position)?;
        Ok(self.entries[base..base + self.nodes].iter().filter(|x| **x).count())
    }

    /// The unique node hosting the slot, if it is placed exactly once.
    pub fn assigned_node(&self, chain: ChainId, position: usize) -> Result<Option<NodeId>> {
        let base = self.index(NodeId(0), chain, position)?;
        let row = &self.entries[base..base + self.nodes];
        let mut found = None;
        for (i, x) in row.iter().enumerate() {
            if *x {
                if found.is_some() {
                    return Ok(None);
                }
                found = Some(NodeId(i));
            }
        }
        Ok(found)
    }

    pub fn is_chain_complete(&self, chain: ChainId) -> Result<bool> {
        for p in 0..self.chain_len(chain) {
            if self.placed_count(chain, p)? != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_complete(&self) -> bool {
        (0..self.lens.len()).all(|k| self.is_chain_complete(ChainId(k)).unwrap_or(false))
    }

    /// One node per slot, chain-major, for complete placements.
    pub fn slot_nodes(&self) -> Option<Vec<NodeId>> {
        let mut out = Vec::with_capacity(self.slot_count());
        for k in 0..self.lens.len() {
            for p in 0..self.lens[k] {
                out.push(self.assigned_node(ChainId(k), p).ok()??);
            }
        }
        Some(out)
    }

    /// Σ_j Σ_k demand(j)·x over every slot placed on `node`.
    pub fn node_load(&self, topology: &Topology, node: NodeId) -> Result<ResourceVector> {
        let mut load = ResourceVector::ZERO;
        for (k, chain) in topology.chains.iter().enumerate() {
            for (p, vnf) in chain.vnfs.iter().enumerate() {
                if self.get(node, ChainId(k), p)? {
                    load += topology.vnf(*vnf)?.demand;
                }
            }
        }
        Ok(load)
    }

    fn check_shape(&self, topology: &Topology) -> Result<()> {
        let lens_match = self.lens.len() == topology.chains.len()
            && self.lens.iter().zip(&topology.chains).all(|(l, c)| *l == c.len());
        if self.nodes != topology.nodes.len() || !lens_match {
            return Err(Error::PlacementShape);
        }
        Ok(())
    }
}

/// How strictly [`is_feasible`] treats unplaced VNFs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityMode {
    /// Each slot is placed at most once.
    Partial,
    /// Each slot is placed exactly once.
    Complete,
}

pub fn is_feasible(placement: &PlacementMatrix, topology: &Topology, mode: FeasibilityMode) -> Result<bool> {
    placement.check_shape(topology)?;
    for (chain, position) in topology.slots() {
        let count = placement.placed_count(chain, position)?;
        let ok = match mode {
            FeasibilityMode::Partial => count <= 1,
            FeasibilityMode::Complete => count == 1,
        };
        if !ok {
            return Ok(false);
        }
    }
    for node in topology.node_ids() {
        let load = placement.node_load(topology, node)?;
        if !load.fits_within(&topology.node(node)?.capacity) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Complete feasible placements in lexicographic order of their per-slot
/// node assignment (first slot most significant).
pub struct FeasiblePlacements<'a> {
    topology: &'a Topology,
    demands: Vec<ResourceVector>,
    digits: Vec<usize>,
    done: bool,
}

impl<'a> Iterator for FeasiblePlacements<'a> {
    type Item = PlacementMatrix;

    fn next(&mut self) -> Option<PlacementMatrix> {
        let n = self.topology.nodes.len();
        while !self.done {
            let current = self.digits.clone();
            // advance odometer, last slot fastest
            let mut pos = self.digits.len();
            loop {
                if pos == 0 {
                    self.done = true;
                    break;
                }
                pos -= 1;
                self.digits[pos] += 1;
                if self.digits[pos] < n {
                    break;
                }
                self.digits[pos] = 0;
            }
            if self.fits(&current) {
                let slots: Vec<NodeId> = current.into_iter().map(NodeId).collect();
                return PlacementMatrix::from_slots(self.topology, &slots).ok();
            }
        }
        None
    }
}

impl FeasiblePlacements<'_> {
    fn fits(&self, digits: &[usize]) -> bool {
        let mut loads = vec![ResourceVector::ZERO; self.topology.nodes.len()];
        for (slot, node) in digits.iter().enumerate() {
            loads[*node] += self.demands[slot];
        }
        loads
            .iter()
            .zip(&self.topology.nodes)
            .all(|(load, node)| load.fits_within(&node.capacity))
    }
}

/// Streams every complete placement satisfying both feasibility constraints.
///
/// Fails with [`Error::EnumerationBound`] when `nodes^slots` exceeds `bound`.
pub fn enumerate_feasible_placements(topology: &Topology, bound: u64) -> Result<FeasiblePlacements<'_>> {
    let n = topology.nodes.len() as u128;
    let slots = topology.slot_count() as u32;
    let needed = n.checked_pow(slots).unwrap_or(u128::MAX);
    if needed > bound as u128 {
        return Err(Error::EnumerationBound { needed, bound });
    }
    let demands = topology
        .slots()
        .map(|(k, p)| {
            let vnf = topology.chains[k.0].vnfs[p];
            topology.vnf(vnf).map(|v| v.demand)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeasiblePlacements {
        topology,
        demands,
        digits: vec![0; slots as usize],
        done: n == 0,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use alloc::string::ToString;

    pub(crate) fn uniform_node(name: &str, cap: f64, speed: f64) -> MecNode {
        MecNode {
            name: name.to_string(),
            capacity: ResourceVector::new(cap, cap, cap),
            processing_capacity: speed,
        }
    }

    pub(crate) fn vnf(name: &str, d: f64) -> VnfSpec {
        VnfSpec { name: name.to_string(), demand: ResourceVector::new(d, d, d) }
    }

    fn tiny(nodes: usize, demand: f64) -> Topology {
        Topology {
            nodes: (0..nodes).map(|i| uniform_node(&format!("n{i}"), 1.0, 100.0)).collect(),
            vnfs: vec![vnf("a", demand)],
            chains: vec![ServiceChain { name: "c".to_string(), vnfs: vec![VnfId(0)] }],
            links: LinkCapacitySet::new(),
        }
    }

    #[test]
    fn unknown_vnf_reported_once() {
        let mut t = tiny(1, 0.5);
        t.chains.push(ServiceChain { name: "bad".to_string(), vnfs: vec![VnfId(8)] });
        let report = validate_topology(&t);
        assert_eq!(report.violations, vec![Violation::UnknownVnf { chain: 1, vnf: 8 }]);
        assert!(report.violations[0].to_string().contains("unknown VNF"));
    }

    #[test]
    fn over_allocated_link_reported_once() {
        let mut t = tiny(2, 0.5);
        t.vnfs.push(vnf("b", 0.1));
        t.links.set_total(NodeId(0), NodeId(1), 10.0);
        let hop = |j, jj| Hop { from_node: NodeId(0), from_vnf: VnfId(j), to_node: NodeId(1), to_vnf: VnfId(jj) };
        t.links.allocate(hop(0, 1), 6.0);
        t.links.allocate(hop(1, 0), 6.0);
        let report = validate_topology(&t);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].to_string().contains("link over-allocation"));
    }

    #[test]
    fn negative_capacity_and_zero_speed() {
        let mut t = tiny(1, 0.5);
        t.nodes[0].capacity.storage = -1.0;
        t.nodes[0].processing_capacity = 0.0;
        let report = validate_topology(&t);
        assert_eq!(report.violations.len(), 2);
    }

    #[test]
    fn empty_placement_is_partially_feasible() {
        let t = tiny(2, 0.5);
        let p = PlacementMatrix::new(&t);
        assert!(is_feasible(&p, &t, FeasibilityMode::Partial).unwrap());
        assert!(!is_feasible(&p, &t, FeasibilityMode::Complete).unwrap());
    }

    #[test]
    fn double_placement_breaks_at_most_once() {
        let t = tiny(2, 0.1);
        let mut p = PlacementMatrix::new(&t);
        p.set(NodeId(0), ChainId(0), 0, true).unwrap();
        p.set(NodeId(1), ChainId(0), 0, true).unwrap();
        assert!(!is_feasible(&p, &t, FeasibilityMode::Partial).unwrap());
    }

    #[test]
    fn two_heavy_vnfs_overflow_one_node() {
        let t = Topology {
            nodes: vec![uniform_node("n", 1.0, 10.0)],
            vnfs: vec![vnf("a", 0.7), vnf("b", 0.7)],
            chains: vec![ServiceChain { name: "c".to_string(), vnfs: vec![VnfId(0), VnfId(1)] }],
            links: LinkCapacitySet::new(),
        };
        let p = PlacementMatrix::from_slots(&t, &[NodeId(0), NodeId(0)]).unwrap();
        assert!(!is_feasible(&p, &t, FeasibilityMode::Complete).unwrap());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let t = tiny(2, 0.1);
        let p = PlacementMatrix::new(&tiny(3, 0.1));
        assert_eq!(is_feasible(&p, &t, FeasibilityMode::Partial), Err(Error::PlacementShape));
        assert!(PlacementMatrix::new(&t).set(NodeId(5), ChainId(0), 0, true).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_feasible_placements(&tiny(1, 0.5), 100).unwrap().count(), 1);
        assert_eq!(enumerate_feasible_placements(&tiny(2, 0.5), 100).unwrap().count(), 2);
        assert_eq!(enumerate_feasible_placements(&tiny(2, 1.5), 100).unwrap().count(), 0);
    }

    #[test]
    fn enumeration_bound() {
        let err = enumerate_feasible_placements(&tiny(3, 0.5), 2).err().unwrap();
        assert_eq!(err, Error::EnumerationBound { needed: 3, bound: 2 });
    }

    #[test]
    fn x_is_zero_for_vnf_outside_chain() {
        let mut t = tiny(2, 0.1);
        t.vnfs.push(vnf("b", 0.1));
        let p = PlacementMatrix::from_slots(&t, &[NodeId(1)]).unwrap();
        assert!(p.x(&t, NodeId(1), VnfId(0), ChainId(0)).unwrap());
        assert!(!p.x(&t, NodeId(1), VnfId(1), ChainId(0)).unwrap());
    }
}
