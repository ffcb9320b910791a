//! Processing, transmission and end-to-end delay of a request under a
//! placement. Packet sizes are in bytes and capacities in bytes per
//! millisecond, so every delay is in milliseconds.

use alloc::format;

use crate::topology::Hop;
use crate::workload::Request;
use crate::{ChainId, Error, NodeId, PlacementMatrix, Result, Topology, VnfId};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DelayBreakdown {
    pub processing: f64,
    pub transmission: f64,
    pub total: f64,
}

impl DelayBreakdown {
    pub fn new(processing: f64, transmission: f64) -> Self {
        Self { processing, transmission, total: processing + transmission }
    }
}

/// `x · ĉ_j · β / α_i` for VNF `vnf` of `chain` on `node`.
pub fn processing_delay(
    topology: &Topology,
    placement: &PlacementMatrix,
    node: NodeId,
    vnf: VnfId,
    chain: ChainId,
    beta: f64,
) -> Result<f64> {
    if !placement.x(topology, node, vnf, chain)? {
        return Ok(0.0);
    }
    let capacity = topology.node(node)?.processing_capacity;
    Ok(topology.vnf(vnf)?.demand.compute * beta / capacity)
}

fn require_complete(placement: &PlacementMatrix, chain: ChainId) -> Result<()> {
    if placement.is_chain_complete(chain)? {
        Ok(())
    } else {
        Err(Error::IncompletePlacement { chain: chain.0 })
    }
}

pub fn total_processing_delay(
    topology: &Topology,
    placement: &PlacementMatrix,
    chain: ChainId,
    beta: f64,
) -> Result<f64> {
    require_complete(placement, chain)?;
    let mut total = 0.0;
    for node in topology.node_ids() {
        for vnf in &topology.chain(chain)?.vnfs {
            total += processing_delay(topology, placement, node, *vnf, chain, beta)?;
        }
    }
    Ok(total)
}

/// Forwarding time from `from_vnf` on `from_node` to the next VNF of the
/// chain, `to_vnf` on `to_node`. Same-node hops cost exactly zero.
#[allow(clippy::too_many_arguments)]
pub fn transmission_delay(
    topology: &Topology,
    placement: &PlacementMatrix,
    from_node: NodeId,
    to_node: NodeId,
    from_vnf: VnfId,
    to_vnf: VnfId,
    chain: ChainId,
    beta: f64,
) -> Result<f64> {
    let spec = topology.chain(chain)?;
    let (p, q) = match (spec.position_of(from_vnf), spec.position_of(to_vnf)) {
        (Some(p), Some(q)) => (p, q),
        _ => return Err(Error::OutOfRange(format!("hop outside chain {}", chain))),
    };
    if q != p + 1 {
        return Err(Error::NotConsecutive { chain: chain.0, from: p, to: q });
    }
    if from_node == to_node {
        topology.node(from_node)?;
        return Ok(0.0);
    }
    let placed = placement.get(from_node, chain, p)? && placement.get(to_node, chain, q)?;
    if !placed {
        return Ok(0.0);
    }
    let hop = Hop { from_node, from_vnf, to_node, to_vnf };
    let share = topology
        .links
        .allocation(&hop)
        .ok_or_else(|| Error::MissingLinkAllocation(format!("{}", hop)))?;
    Ok(topology.vnf(from_vnf)?.demand.transmission * beta / share)
}

/// Sum of hop delays over consecutive VNFs of the chain.
pub fn total_transmission_delay(
    topology: &Topology,
    placement: &PlacementMatrix,
    chain: ChainId,
    beta: f64,
) -> Result<f64> {
    require_complete(placement, chain)?;
    let vnfs = &topology.chain(chain)?.vnfs;
    let mut total = 0.0;
    for pair in vnfs.windows(2) {
        for from_node in topology.node_ids() {
            for to_node in topology.node_ids() {
                total += transmission_delay(
                    topology, placement, from_node, to_node, pair[0], pair[1], chain, beta,
                )?;
            }
        }
    }
    Ok(total)
}

pub fn chain_delay(
    topology: &Topology,
    placement: &PlacementMatrix,
    chain: ChainId,
    beta: f64,
) -> Result<DelayBreakdown> {
    Ok(DelayBreakdown::new(
        total_processing_delay(topology, placement, chain, beta)?,
        total_transmission_delay(topology, placement, chain, beta)?,
    ))
}

pub fn request_delay(
    topology: &Topology,
    placement: &PlacementMatrix,
    request: &Request,
) -> Result<DelayBreakdown> {
    chain_delay(topology, placement, request.chain, request.packet_size)
}

/// Sum of end-to-end delays over all requests.
pub fn objective<'a, I>(topology: &Topology, placement: &PlacementMatrix, requests: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a Request>,
{
    requests
        .into_iter()
        .map(|r| request_delay(topology, placement, r).map(|d| d.total))
        .sum()
}

/// Objective for one request per chain at each packet size of `betas`.
pub fn grid_objective(topology: &Topology, placement: &PlacementMatrix, betas: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for beta in betas {
        for chain in topology.chain_ids() {
            total += chain_delay(topology, placement, chain, *beta)?.total;
        }
    }
    Ok(total)
}

/// Requests whose end-to-end delay exceeds their timeout. They are only
/// counted, never rescheduled.
pub fn count_timeouts<'a, I>(topology: &Topology, placement: &PlacementMatrix, requests: I) -> Result<usize>
where
    I: IntoIterator<Item = &'a Request>,
{
    let mut late = 0;
    for r in requests {
        if request_delay(topology, placement, r)?.total > r.timeout {
            late += 1;
        }
    }
    Ok(late)
}
