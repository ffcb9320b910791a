//! Stochastic request generation.

use alloc::format;
use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;

use crate::math::abs;
use crate::{ChainId, Error, Result};

/// One service request: chain, packet size in bytes, timeout in ms.
#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub user: u64,
    pub chain: ChainId,
    pub packet_size: f64,
    pub timeout: f64,
    pub arrival_slot: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadConfig {
    pub packet_min: f64,
    pub packet_max: f64,
    /// Mean Poisson arrivals per slot.
    pub arrival_rate: f64,
    pub horizon: u64,
    /// Probability of each chain, indexed by [`ChainId`].
    pub chain_weights: Vec<f64>,
    /// Timeout in ms for each chain.
    pub timeouts: Vec<f64>,
    pub seed: u64,
}

impl WorkloadConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(format!("workload: {msg}")));
        if !(self.packet_min > 0.0) || !(self.packet_min <= self.packet_max) || !self.packet_max.is_finite() {
            return fail("need 0 < packet_min <= packet_max");
        }
        if !(self.arrival_rate >= 0.0) || !self.arrival_rate.is_finite() {
            return fail("arrival_rate must be finite and nonnegative");
        }
        if self.chain_weights.is_empty() || self.chain_weights.iter().any(|w| !(*w >= 0.0)) {
            return fail("chain weights must be nonnegative");
        }
        let sum: f64 = self.chain_weights.iter().sum();
        if abs(sum - 1.0) > 1e-9 {
            return fail("chain weights must sum to 1");
        }
        if self.timeouts.len() != self.chain_weights.len() || self.timeouts.iter().any(|t| !(*t > 0.0)) {
            return fail("one positive timeout per chain");
        }
        Ok(())
    }
}

/// Poisson arrivals per slot, uniform packet sizes, chains drawn by weight.
/// Deterministic for a given seed.
pub fn generate_requests(config: &WorkloadConfig) -> Result<Vec<Request>> {
    config.validate()?;
    let mut out = Vec::new();
    if config.arrival_rate == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let arrivals = Poisson::new(config.arrival_rate).map_err(|e| Error::Config(format!("{e}")))?;
    let sizes = Uniform::new_inclusive(config.packet_min, config.packet_max)
        .map_err(|e| Error::Config(format!("{e}")))?;
    let chains = WeightedIndex::new(&config.chain_weights).map_err(|e| Error::Config(format!("{e}")))?;
    let mut user = 0u64;
    for slot in 0..config.horizon {
        let count = arrivals.sample(&mut rng) as u64;
        for _ in 0..count {
            let k = chains.sample(&mut rng);
            out.push(Request {
                user,
                chain: ChainId(k),
                packet_size: sizes.sample(&mut rng),
                timeout: config.timeouts[k],
                arrival_slot: slot,
            });
            user += 1;
        }
    }
    Ok(out)
}
