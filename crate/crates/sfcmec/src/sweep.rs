//! Packet-size sweep: per-chain delay of each engine's placement over a
//! grid of packet sizes, aggregated over seeds.

use anyhow::{ensure, Result};
use rayon::prelude::*;

use sfcmec_core::Topology;

use crate::config::RunConfig;
use crate::engine::{chain_delays, run_engine, Engine};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub engines: Vec<Engine>,
    pub betas: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Train a fresh placement at every packet size instead of once at the
    /// reference size.
    pub retrain_per_beta: bool,
}

/// One trained placement and its delays.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub engine: Engine,
    pub seed: u64,
    pub betas: Vec<f64>,
    /// `delays[chain][beta]` in ms.
    pub delays: Vec<Vec<f64>>,
    /// Objective at the packet size the placement was trained for.
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub chain: String,
    pub beta: f64,
    pub engine: Engine,
    pub mean: f64,
    /// Sample standard deviation over seeds; 0 for a single seed.
    pub stddev: f64,
    pub samples: usize,
}

/// `steps` evenly spaced sizes from `min` to `max`; one step gives `min`.
pub fn beta_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    ensure!(min > 0.0 && min <= max && max.is_finite(), "need 0 < beta-min <= beta-max");
    ensure!(steps >= 1, "need at least one step");
    if steps == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { max } else { min + step * i as f64 }).collect())
}

/// Runs every cell in parallel; results come back in a fixed order
/// (engine, seed, then packet size).
pub fn run_cells(topology: &Topology, config: &RunConfig, spec: &SweepSpec) -> Result<Vec<SweepCell>> {
    ensure!(!spec.engines.is_empty() && !spec.seeds.is_empty() && !spec.betas.is_empty(), "empty sweep");
    let mut jobs = Vec::new();
    for engine in &spec.engines {
        for seed in &spec.seeds {
            if spec.retrain_per_beta {
                for beta in &spec.betas {
                    jobs.push((*engine, *seed, *beta, vec![*beta]));
                }
            } else {
                jobs.push((*engine, *seed, config.reference_beta, spec.betas.clone()));
            }
        }
    }
    let cells: Vec<Result<SweepCell>> = jobs
        .into_par_iter()
        .map(|(engine, seed, train_beta, betas)| {
            let run = run_engine(engine, topology, config, seed, train_beta)?;
            let delays = chain_delays(topology, &run.placement, &betas)?;
            Ok(SweepCell { engine, seed, betas, delays, objective: run.objective })
        })
        .collect();
    cells.into_iter().collect()
}

/// Mean and spread over seeds per (chain, packet size, engine).
pub fn aggregate(topology: &Topology, spec: &SweepSpec, cells: &[SweepCell]) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for (k, chain) in topology.chains.iter().enumerate() {
        for beta in &spec.betas {
            for engine in &spec.engines {
                let samples: Vec<f64> = cells
                    .iter()
                    .filter(|c| c.engine == *engine)
                    .filter_map(|c| c.betas.iter().position(|b| b == beta).map(|i| c.delays[k][i]))
                    .collect();
                let n = samples.len() as f64;
                let mean = samples.iter().sum::<f64>() / n;
                let stddev = if samples.len() > 1 {
                    (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
                } else {
                    0.0
                };
                rows.push(SweepRow { chain: chain.name.clone(), beta: *beta, engine: *engine, mean, stddev, samples: samples.len() });
            }
        }
    }
    rows
}

pub fn run_sweep(topology: &Topology, config: &RunConfig, spec: &SweepSpec) -> Result<(Vec<SweepCell>, Vec<SweepRow>)> {
    let cells = run_cells(topology, config, spec)?;
    let rows = aggregate(topology, spec, &cells);
    Ok((cells, rows))
}
