//! CSV artifacts. Every file has a header row and a fixed row order; floats
//! use the shortest representation that reads back exactly.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use sfcmec_core::ga::GenerationStats;
use sfcmec_core::learner::{Policy, TrainingLog};
use sfcmec_core::mfg::{MfgSolution, StateLabel, StateSpace};
use sfcmec_core::workload::Request;
use sfcmec_core::{PlacementMatrix, Topology};

use crate::engine::RunOutput;
use crate::sweep::{SweepCell, SweepRow};

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush().with_context(|| format!("writing {}", path.display()))
}

/// `chain,position,vnf,node,…` columns describing a state.
fn state_columns(topology: &Topology, label: StateLabel) -> [String; 4] {
    match label {
        StateLabel::Slot { chain, position, node } => {
            let c = &topology.chains[chain.0];
            [
                c.name.clone(),
                position.to_string(),
                topology.vnfs[c.vnfs[position].0].name.clone(),
                topology.nodes[node.0].name.clone(),
            ]
        }
        StateLabel::Source(chain) => [topology.chains[chain.0].name.clone(), "source".into(), String::new(), String::new()],
        StateLabel::Abstract(s) => [String::new(), s.to_string(), String::new(), String::new()],
    }
}

pub fn write_placement(path: &Path, topology: &Topology, placement: &PlacementMatrix) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["chain", "position", "vnf", "node"])?;
    for (k, p) in topology.slots() {
        let node = placement.assigned_node(k, p)?.map(|n| topology.nodes[n.0].name.clone()).unwrap_or_default();
        let c = &topology.chains[k.0];
        w.write_record([c.name.clone(), p.to_string(), topology.vnfs[c.vnfs[p].0].name.clone(), node])?;
    }
    finish(w, path)
}

/// Summary row plus per-chain delays at the run's packet size.
pub fn write_summary(path: &Path, run: &RunOutput, chain_delays: &[f64], requests: usize, timeouts: usize) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["engine", "seed", "beta_bytes", "objective_ms", "converged", "requests", "timeouts"];
    let names: Vec<String> = (0..chain_delays.len()).map(|k| format!("chain{}_ms", k + 1)).collect();
    header.extend(names.iter().map(|s| s.as_str()));
    w.write_record(&header)?;
    let mut row = vec![
        run.engine.to_string(),
        run.seed.to_string(),
        run.beta.to_string(),
        run.objective.to_string(),
        run.converged.to_string(),
        requests.to_string(),
        timeouts.to_string(),
    ];
    row.extend(chain_delays.iter().map(|d| d.to_string()));
    w.write_record(&row)?;
    finish(w, path)
}

pub fn write_requests(path: &Path, topology: &Topology, requests: &[Request]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["slot", "user", "chain", "bytes", "timeout_ms"])?;
    for r in requests {
        w.write_record([
            r.arrival_slot.to_string(),
            r.user.to_string(),
            topology.chains[r.chain.0].name.clone(),
            r.packet_size.to_string(),
            r.timeout.to_string(),
        ])?;
    }
    finish(w, path)
}

pub fn write_training_log(path: &Path, log: &TrainingLog) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["episode", "reward", "delay_ms", "temperature"])?;
    for e in &log.episodes {
        w.write_record([e.episode.to_string(), e.total_reward.to_string(), e.placement_delay.to_string(), e.temperature.to_string()])?;
    }
    finish(w, path)
}

/// Long format: one row per episode and slot state.
pub fn write_reward_curves(path: &Path, topology: &Topology, space: &StateSpace, log: &TrainingLog) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["episode", "chain", "position", "vnf", "node", "reward"])?;
    let slots: Vec<usize> = (0..space.len()).filter(|s| matches!(space.label(*s), StateLabel::Slot { .. })).collect();
    for e in &log.episodes {
        for s in &slots {
            let [c, p, v, n] = state_columns(topology, space.label(*s));
            w.write_record([e.episode.to_string(), c, p, v, n, e.state_rewards[*s].to_string()])?;
        }
    }
    finish(w, path)
}

pub fn write_fitness_history(path: &Path, history: &[GenerationStats]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["generation", "best", "mean"])?;
    for g in history {
        w.write_record([g.generation.to_string(), g.best.to_string(), g.mean.to_string()])?;
    }
    finish(w, path)
}

pub fn write_mfg_iterations(path: &Path, solution: &MfgSolution) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["iteration", "value_change", "density_change"])?;
    for h in &solution.history {
        w.write_record([h.iteration.to_string(), h.value_change.to_string(), h.density_change.to_string()])?;
    }
    finish(w, path)
}

/// Value, density and most likely successor of every state in every slot.
pub fn write_mfg_solution(path: &Path, topology: &Topology, space: &StateSpace, solution: &MfgSolution) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["slot", "state", "chain", "position", "vnf", "node", "value", "density", "next_state", "next_probability"])?;
    for t in 0..=solution.horizon() {
        for s in 0..space.len() {
            let [c, p, v, n] = state_columns(topology, space.label(s));
            let (next, prob) = match solution.policies.get(t) {
                Some(m) => {
                    // first maximum in successor order
                    let mut best = (space.successors(s)[0], m.get(s, space.successors(s)[0]));
                    for x in space.successors(s) {
                        if m.get(s, *x) > best.1 {
                            best = (*x, m.get(s, *x));
                        }
                    }
                    (best.0.to_string(), best.1.to_string())
                }
                None => (String::new(), String::new()),
            };
            w.write_record([
                t.to_string(),
                s.to_string(),
                c,
                p,
                v,
                n,
                solution.values[t].0[s].to_string(),
                solution.densities[t].0[s].to_string(),
                next,
                prob,
            ])?;
        }
    }
    finish(w, path)
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["chain", "beta_bytes", "engine", "mean_delay_ms", "stddev_ms", "seeds"])?;
    for r in rows {
        w.write_record([
            r.chain.clone(),
            r.beta.to_string(),
            r.engine.to_string(),
            r.mean.to_string(),
            r.stddev.to_string(),
            r.samples.to_string(),
        ])?;
    }
    finish(w, path)
}

pub fn write_sweep_cells(path: &Path, topology: &Topology, cells: &[SweepCell]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["engine", "seed", "chain", "beta_bytes", "delay_ms", "objective_ms"])?;
    for c in cells {
        for (k, chain) in topology.chains.iter().enumerate() {
            for (b, beta) in c.betas.iter().enumerate() {
                w.write_record([
                    c.engine.to_string(),
                    c.seed.to_string(),
                    chain.name.clone(),
                    beta.to_string(),
                    c.delays[k][b].to_string(),
                    c.objective.to_string(),
                ])?;
            }
        }
    }
    finish(w, path)
}

/// Policy snapshot: a header line, then one line per state holding its
/// weights in successor order.
pub fn policy_to_text(policy: &Policy) -> String {
    let mut out = format!("sfcmec-policy {}\n", policy.weights().len());
    for (s, row) in policy.weights().iter().enumerate() {
        out.push_str(&s.to_string());
        for w in row {
            out.push(' ');
            out.push_str(&w.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn policy_from_text(space: &StateSpace, text: &str) -> Result<Policy> {
    let mut lines = text.lines();
    let header = lines.next().context("empty policy file")?;
    let n: usize = header
        .strip_prefix("sfcmec-policy ")
        .context("not a policy snapshot")?
        .trim()
        .parse()
        .context("bad state count")?;
    let mut weights = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let mut fields = line.split_whitespace();
        let s: usize = fields.next().context("missing state index")?.parse().context("bad state index")?;
        anyhow::ensure!(s == i, "policy rows out of order at line {}", i + 2);
        let row = fields.map(|f| f.parse::<f64>().with_context(|| format!("bad weight `{f}`"))).collect::<Result<Vec<_>>>()?;
        weights.push(row);
    }
    anyhow::ensure!(weights.len() == n, "expected {n} rows, found {}", weights.len());
    Ok(Policy::from_weights(space, weights)?)
}
