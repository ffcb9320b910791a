//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any of them fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{self, Command};
use std::time::{Duration, Instant};

use anyhow::{bail, ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sfcmec::config::RunConfig;
use sfcmec::engine::{run_engine, Artifacts, Engine, RunOutput};
use sfcmec::golden;
use sfcmec::scenario_file;
use sfcmec::sweep::{beta_grid, run_sweep, SweepSpec};
use sfcmec_core::delay;
use sfcmec_core::learner::{run_episode, Critic, LearnerConfig, Policy};
use sfcmec_core::mfg::{
    fpk_step, forward_sweep, hjb_backstep, solve_mfg, verify_nash, CongestionKernel, DensityVector, MfgConfig, MfgSolution,
    RewardKernel, RewardModel, StateLabel, StateSpace, TieBreak, TransitionMatrix, UpdateOrder, ValueVector,
};
use sfcmec_core::oracle::{dp_values, optimal_placement, straight_line_delay, straight_line_objective};
use sfcmec_core::scenario::REFERENCE_BETA;
use sfcmec_core::topology::enumerate_feasible_placements;
use sfcmec_core::{NodeId, PlacementMatrix, Topology};

const ROW_SUM_TOL: f64 = 1e-9;
const MASS_TOL: f64 = 1e-9;
const FPK_STEPS: usize = 10_000;
const INVARIANT_BUDGET: Duration = Duration::from_secs(60);

const ORACLE_REL_TOL: f64 = 1e-12;
const ORACLE_SAMPLES: usize = 1000;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);

const DP_REL_TOL: f64 = 1e-9;
const NASH_EPS: f64 = 1e-6;
const DP_BUDGET: Duration = Duration::from_secs(60);

const RL_SEEDS: u64 = 10;
const RL_EPISODES: usize = 2000;
const RL_GAP: f64 = 0.10;
const RL_MIN_HITS: usize = 8;
const RL_BUDGET: Duration = Duration::from_secs(5 * 60);

const TAIL_FRACTION: f64 = 0.10;
const TAIL_VARIANCE_SHARE: f64 = 0.05;
const SHARED_VNF_GAP: f64 = 0.10;

const SWEEP_BETA_MIN: f64 = 100_000.0;
const SWEEP_BETA_MAX: f64 = 2_000_000.0;
const SWEEP_STEPS: usize = 20;
const SWEEP_SEEDS: u64 = 10;
const SWEEP_BUDGET: Duration = Duration::from_secs(10 * 60);

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn paper_file() -> PathBuf {
    repo_root().join("scenarios/paper.toml")
}

fn bundled_scenarios() -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(repo_root().join("scenarios"))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|x| x == "toml"));
    files.sort();
    ensure!(!files.is_empty(), "no bundled scenarios");
    Ok(files)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn rows_stochastic(p: &TransitionMatrix) -> bool {
    (0..p.len()).all(|s| (p.row(s).iter().sum::<f64>() - 1.0).abs() <= ROW_SUM_TOL)
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn within(budget: Duration, elapsed: Duration) -> bool {
    elapsed < budget
}

// 1

fn invariants() -> Result<Verdict> {
    let start = Instant::now();
    let topology = scenario_file::load(&paper_file())?.scenario.topology;
    let space = StateSpace::for_topology(&topology)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();

    // actor updates as the trainer applies them, checked after each one
    let model = CongestionKernel::new(&topology, &space, REFERENCE_BETA, None)?;
    let config = LearnerConfig { episodes: 300, ..LearnerConfig::default() };
    let starts: Vec<usize> = topology.chain_ids().filter_map(|k| space.source_of(k)).collect();
    let mut policy = Policy::zeros(&space);
    let mut critic = Critic::zeros(&space);
    let mut actor_updates = 0usize;
    let mut scale = 0.0;
    for episode in 0..config.episodes {
        let temperature = config.temperature(episode);
        let p = policy.decode(&space, temperature);
        let densities = forward_sweep(&space.source_density(), &vec![p; space.depth()], Default::default())?;
        let kernel = model.kernel(&space, &densities);
        if episode == 0 {
            scale = kernel.max_abs();
        }
        let trace = run_episode(&space, &policy, &critic, &kernel, temperature, &starts, scale, &mut rng)?;
        for step in &trace.steps {
            critic.values[step.from] += config.critic_lr * step.td_error;
            if let Some(w) = policy.weight_mut(&space, step.from, step.to) {
                *w += config.actor_lr * step.td_error;
            }
            actor_updates += 1;
            let decoded = policy.decode(&space, temperature);
            if !rows_stochastic(&decoded) || !decoded.is_supported_on(&space) {
                failures.push(format!("actor update {actor_updates}"));
            }
        }
    }
    // large random perturbations at extreme temperatures
    for _ in 0..5000 {
        let s = rng.random_range(0..space.len());
        let succ = space.successors(s);
        let to = succ[rng.random_range(0..succ.len())];
        *policy.weight_mut(&space, s, to).unwrap() += rng.random_range(-500.0..500.0);
        actor_updates += 1;
        let decoded = policy.decode(&space, rng.random_range(0.01..5.0));
        if !rows_stochastic(&decoded) {
            failures.push(format!("perturbed update {actor_updates}"));
        }
    }

    let mut backsteps = 0usize;
    for case in 0..200 {
        let kernel = RewardKernel::from_fn(&space, |_, _| -(rng.random_range(0..4) as f64) * rng.random::<f64>());
        let tie = if case % 2 == 0 { TieBreak::LowestIndex } else { TieBreak::Uniform };
        let mut v = ValueVector(vec![0.0; space.len()]);
        for _ in 0..space.depth() {
            let (next, p) = hjb_backstep(&v, &kernel, tie)?;
            backsteps += 1;
            if !rows_stochastic(&p) || !p.is_supported_on(&space) {
                failures.push(format!("hjb backstep {backsteps}"));
            }
            v = next;
        }
    }

    let mut theta = space.source_density();
    let mass = theta.mass();
    for step in 0..FPK_STEPS {
        let mut p = TransitionMatrix::zeros(space.len());
        for s in 0..space.len() {
            let succ = space.successors(s);
            let w: Vec<f64> = succ.iter().map(|_| rng.random::<f64>() + 1e-3).collect();
            let total: f64 = w.iter().sum();
            for (t, x) in succ.iter().zip(&w) {
                p.set(s, *t, x / total);
            }
        }
        if step % 50 == 0 {
            let raw: Vec<f64> = (0..space.len()).map(|_| rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            theta = DensityVector(raw.into_iter().map(|x| x * mass / total).collect());
        }
        theta = fpk_step(&theta, &p)?;
        if (theta.mass() - mass).abs() > MASS_TOL {
            failures.push(format!("fpk step {step}: mass {}", theta.mass()));
        }
    }

    let mut placements = 0usize;
    for _ in 0..2000 {
        let slots: Vec<NodeId> = (0..topology.slot_count()).map(|_| NodeId(rng.random_range(0..topology.nodes.len()))).collect();
        let placement = PlacementMatrix::from_slots(&topology, &slots)?;
        let beta = rng.random_range(SWEEP_BETA_MIN..SWEEP_BETA_MAX);
        placements += 1;
        for k in topology.chain_ids() {
            let d = delay::chain_delay(&topology, &placement, k, beta)?;
            if !(d.processing >= 0.0 && d.transmission >= 0.0) || d.total != d.processing + d.transmission {
                failures.push(format!("delay decomposition, placement {placements}"));
            }
            let chain = &topology.chains[k.0].vnfs;
            for (p, pair) in chain.windows(2).enumerate() {
                let (a, b) = (slots_of(&topology, &slots, k.0, p), slots_of(&topology, &slots, k.0, p + 1));
                let hop = delay::transmission_delay(&topology, &placement, a, b, pair[0], pair[1], k, beta)?;
                if hop < 0.0 || (a == b && hop != 0.0) {
                    failures.push(format!("hop {p} of chain {}, placement {placements}", k.0));
                }
            }
        }
    }

    let elapsed = start.elapsed();
    let detail = format!(
        "{actor_updates} actor updates, {backsteps} backsteps, {FPK_STEPS} fpk steps, {placements} placements; {} violations; {:.1} s",
        failures.len(),
        elapsed.as_secs_f64()
    );
    if let Some(first) = failures.first() {
        return Ok(verdict(false, format!("{detail}; first: {first}")));
    }
    Ok(verdict(within(INVARIANT_BUDGET, elapsed), detail))
}

fn slots_of(topology: &Topology, slots: &[NodeId], chain: usize, position: usize) -> NodeId {
    let offset: usize = topology.chains[..chain].iter().map(|c| c.vnfs.len()).sum();
    slots[offset + position]
}

// 2

fn oracle_equivalence() -> Result<Verdict> {
    let start = Instant::now();
    let topology = scenario_file::load(&paper_file())?.scenario.topology;
    let all: Vec<PlacementMatrix> = enumerate_feasible_placements(&topology, 1 << 20)?.collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut mismatches = 0usize;
    for _ in 0..ORACLE_SAMPLES {
        let placement = &all[rng.random_range(0..all.len())];
        let beta = rng.random_range(SWEEP_BETA_MIN..SWEEP_BETA_MAX);
        for k in topology.chain_ids() {
            let d = delay::chain_delay(&topology, placement, k, beta)?;
            let (p, x) = straight_line_delay(&topology, placement, k, beta)?;
            for (a, b) in [(d.processing, p), (d.transmission, x), (d.total, p + x)] {
                worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
                mismatches += usize::from(!rel_close(a, b, ORACLE_REL_TOL));
            }
        }
        let a = delay::grid_objective(&topology, placement, &[beta])?;
        let b = straight_line_objective(&topology, placement, &[beta])?;
        mismatches += usize::from(!rel_close(a, b, ORACLE_REL_TOL));
    }
    let elapsed = start.elapsed();
    Ok(verdict(
        mismatches == 0 && within(ORACLE_BUDGET, elapsed),
        format!(
            "{ORACLE_SAMPLES} of {} feasible placements, worst relative gap {worst:.2e}, {mismatches} mismatches; {:.1} s",
            all.len(),
            elapsed.as_secs_f64()
        ),
    ))
}

// 3

fn dp_equivalence() -> Result<Verdict> {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;
    let (mut total, mut converged) = (0usize, 0usize);
    for file in bundled_scenarios()? {
        let name = file.file_stem().unwrap().to_string_lossy().to_string();
        let topology = scenario_file::load(&file)?.scenario.topology;
        let space = StateSpace::for_topology(&topology)?;
        let free = CongestionKernel::congestion_free(&topology, &space, REFERENCE_BETA)?;
        let dp = dp_values(&space, free.base());
        let mut worst = 0.0f64;
        let mut solves: Vec<MfgSolution> = Vec::new();
        for tie_break in [TieBreak::LowestIndex, TieBreak::Uniform] {
            let sol = solve_mfg(&space, &free, &space.source_density(), &MfgConfig { tie_break, ..MfgConfig::default() })?;
            if !sol.converged {
                pass = false;
                notes.push(format!("{name}: congestion-free solve did not converge"));
            }
            for s in 0..space.len() {
                let (a, b) = (sol.values[0].0[s], dp.0[s]);
                worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
                if !rel_close(a, b, DP_REL_TOL) {
                    pass = false;
                }
            }
            solves.push(sol);
        }
        let congested = CongestionKernel::new(&topology, &space, REFERENCE_BETA, None)?;
        for update in [UpdateOrder::Simultaneous, UpdateOrder::PerComponent] {
            for tie_break in [TieBreak::LowestIndex, TieBreak::Uniform] {
                let config = MfgConfig { update, tie_break, ..MfgConfig::default() };
                solves.push(solve_mfg(&space, &congested, &space.source_density(), &config)?);
            }
        }
        total += solves.len();
        for sol in solves.iter().filter(|s| s.converged) {
            converged += 1;
            if !verify_nash(sol, &sol.kernel, NASH_EPS) {
                pass = false;
                notes.push(format!("{name}: converged solve is not an {NASH_EPS:e}-Nash maximizer"));
            }
        }
        notes.push(format!("{name} worst {worst:.1e}"));
    }
    let elapsed = start.elapsed();
    pass &= within(DP_BUDGET, elapsed);
    Ok(verdict(
        pass,
        format!("{}; {converged} of {total} solves converged, all of them checked for Nash; {:.1} s", notes.join(", "), elapsed.as_secs_f64()),
    ))
}

// 4 and 5 share the same training runs

fn train_rl_seeds(topology: &Topology, config: &RunConfig) -> Result<Vec<RunOutput>> {
    (0..RL_SEEDS).into_par_iter().map(|seed| run_engine(Engine::Rl, topology, config, seed, REFERENCE_BETA)).collect()
}

fn rl_optimality(topology: &Topology, fingerprint: &str, runs: &[RunOutput], elapsed: Duration) -> Result<Verdict> {
    let optimum = optimal_placement(topology, &[REFERENCE_BETA], 1 << 24)?.objective;
    let golden = golden::lookup(&repo_root().join("data/oracle_golden.csv"), fingerprint, REFERENCE_BETA)?
        .context("no golden optimum for the bundled scenario")?;
    if !rel_close(optimum, golden, 1e-12) {
        bail!("oracle optimum {optimum} disagrees with the golden value {golden}");
    }
    let hits = runs.iter().filter(|r| r.objective <= optimum * (1.0 + RL_GAP)).count();
    let gaps: Vec<String> = runs.iter().map(|r| format!("{:+.1}%", 100.0 * (r.objective / optimum - 1.0))).collect();
    Ok(verdict(
        hits >= RL_MIN_HITS && within(RL_BUDGET, elapsed),
        format!(
            "{hits} of {RL_SEEDS} seeds within {:.0}% of the optimum {optimum:.4} ms (gaps {}); {:.1} s",
            RL_GAP * 100.0,
            gaps.join(" "),
            elapsed.as_secs_f64()
        ),
    ))
}

fn reward_convergence(topology: &Topology, runs: &[RunOutput]) -> Result<Verdict> {
    let space = StateSpace::for_topology(topology)?;
    let slot_states: Vec<usize> = (0..space.len()).filter(|s| matches!(space.label(*s), StateLabel::Slot { .. })).collect();
    let find = |kind: &str, name: &str, names: Vec<&str>| -> Result<usize> {
        names.iter().position(|n| *n == name).with_context(|| format!("scenario has no {kind} `{name}`"))
    };
    let vnf1 = find("vnf", "vnf-1", topology.vnfs.iter().map(|v| v.name.as_str()).collect())?;
    let node1 = NodeId(find("node", "mec-1", topology.nodes.iter().map(|n| n.name.as_str()).collect())?);
    // (chain, position) of every VNF-1 instance
    let instances: Vec<(usize, usize)> = topology
        .chains
        .iter()
        .enumerate()
        .flat_map(|(k, c)| c.vnfs.iter().enumerate().filter(|(_, v)| v.0 == vnf1).map(move |(p, _)| (k, p)))
        .collect();
    ensure!(instances.len() == 2, "expected two VNF-1 instances, found {}", instances.len());
    let state_of = |k: usize, p: usize, node: NodeId| {
        (0..space.len())
            .find(|s| space.label(*s) == StateLabel::Slot { chain: sfcmec_core::ChainId(k), position: p, node })
            .expect("slot state exists")
    };

    let (mut curves, mut noisy) = (0usize, Vec::new());
    let (mut colocated, mut close) = (0usize, 0usize);
    let mut finals = Vec::new();
    for run in runs {
        let Artifacts::Rl(trained) = &run.artifacts else { bail!("not an rl run") };
        let episodes = &trained.log.episodes;
        ensure!(episodes.len() == RL_EPISODES, "expected {RL_EPISODES} episodes");
        let tail_start = episodes.len() - ((episodes.len() as f64 * TAIL_FRACTION).round() as usize);
        for s in &slot_states {
            let curve: Vec<f64> = episodes.iter().map(|e| e.state_rewards[*s]).collect();
            let (lo, hi) = curve.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(*x), hi.max(*x)));
            let range = hi - lo;
            let tail = &curve[tail_start..];
            let mean = tail.iter().sum::<f64>() / tail.len() as f64;
            let variance = tail.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / tail.len() as f64;
            curves += 1;
            // a flat curve has nothing left to settle
            if range > 0.0 && (variance.is_nan() || variance >= TAIL_VARIANCE_SHARE * range) {
                noisy.push(format!("seed {} state {s}: variance {variance:.3e}, range {range:.3e}", run.seed));
            }
        }
        let on_node1 = instances.iter().all(|(k, p)| run.placement.assigned_node(sfcmec_core::ChainId(*k), *p).ok().flatten() == Some(node1));
        let last = episodes.last().unwrap();
        let [a, b] = [instances[0], instances[1]].map(|(k, p)| last.state_rewards[state_of(k, p, node1)]);
        let gap = (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        finals.push(format!("seed {}{} {:.1}%", run.seed, if on_node1 { "*" } else { "" }, 100.0 * gap));
        if on_node1 {
            colocated += 1;
            close += usize::from(gap <= SHARED_VNF_GAP);
        }
    }
    let pass = noisy.is_empty() && colocated > 0 && close == colocated;
    let mut detail = format!(
        "{} of {curves} curves settle in the last {:.0}%; VNF-1 pair on mec-1 in {colocated} of {} runs, {close} of those within {:.0}% (final gaps, * = both on mec-1: {})",
        curves - noisy.len(),
        TAIL_FRACTION * 100.0,
        runs.len(),
        SHARED_VNF_GAP * 100.0,
        finals.join(", ")
    );
    if let Some(first) = noisy.first() {
        detail.push_str(&format!("; first unsettled: {first}"));
    }
    Ok(verdict(pass, detail))
}

// 6

fn comparative_ordering(topology: &Topology, config: &RunConfig) -> Result<Verdict> {
    let start = Instant::now();
    let spec = SweepSpec {
        engines: vec![Engine::Rl, Engine::Ga],
        betas: beta_grid(SWEEP_BETA_MIN, SWEEP_BETA_MAX, SWEEP_STEPS)?,
        seeds: (0..SWEEP_SEEDS).collect(),
        retrain_per_beta: false,
    };
    let (_, rows) = run_sweep(topology, config, &spec)?;
    let elapsed = start.elapsed();
    let mean = |engine: Engine, chain: &str, beta: f64| {
        rows.iter().find(|r| r.engine == engine && r.chain == chain && r.beta == beta).map(|r| r.mean).expect("sweep row")
    };

    let mut losses = Vec::new();
    let mut cells = 0usize;
    for chain in &topology.chains {
        for beta in &spec.betas {
            cells += 1;
            let (rl, ga) = (mean(Engine::Rl, &chain.name, *beta), mean(Engine::Ga, &chain.name, *beta));
            if rl > ga {
                losses.push((chain.name.clone(), *beta, rl, ga));
            }
        }
    }
    let names: Vec<&str> = topology.chains.iter().map(|c| c.name.as_str()).collect();
    let ga_max: BTreeMap<&str, f64> = names.iter().map(|c| (*c, mean(Engine::Ga, c, SWEEP_BETA_MAX))).collect();
    let rl_max: BTreeMap<&str, f64> = names.iter().map(|c| (*c, mean(Engine::Rl, c, SWEEP_BETA_MAX))).collect();
    let sfc3 = ga_max.get("sfc-3").copied().context("scenario has no sfc-3")?;
    let ga_sfc3_worst = names.iter().filter(|c| **c != "sfc-3").all(|c| sfc3 > ga_max[c]);
    let mut monotone = true;
    for engine in &spec.engines {
        for chain in &names {
            let curve: Vec<f64> = spec.betas.iter().map(|b| mean(*engine, chain, *b)).collect();
            monotone &= curve.windows(2).all(|w| w[1] >= w[0]);
        }
    }

    let fmt = |m: &BTreeMap<&str, f64>| m.iter().map(|(c, v)| format!("{c} {v:.1}")).collect::<Vec<_>>().join(", ");
    let mut detail = format!(
        "rl <= ga in {} of {cells} cells; ga sfc-3 above sfc-1 and sfc-2 at max size: {ga_sfc3_worst}; monotone: {monotone}; at {SWEEP_BETA_MAX} B rl [{}] ga [{}]; {:.1} s",
        cells - losses.len(),
        fmt(&rl_max),
        fmt(&ga_max),
        elapsed.as_secs_f64()
    );
    if let Some((chain, beta, rl, ga)) = losses.first() {
        let chains: std::collections::BTreeSet<&str> = losses.iter().map(|l| l.0.as_str()).collect();
        detail.push_str(&format!(
            "; rl loses on {} (first: {chain} at {beta} B, rl {rl:.2} ms vs ga {ga:.2} ms)",
            chains.into_iter().collect::<Vec<_>>().join(", ")
        ));
    }
    Ok(verdict(losses.is_empty() && ga_sfc3_worst && monotone && within(SWEEP_BUDGET, elapsed), detail))
}

// 7

fn sfcmec(args: &[&str]) -> Result<()> {
    let out = Command::new(env!("CARGO_BIN_EXE_sfcmec")).args(args).output()?;
    ensure!(out.status.success(), "sfcmec {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr));
    Ok(())
}

/// Every file in `dir` except the wall-clock record, by name.
fn artifacts(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        if name != "wall_time.txt" {
            files.insert(name, fs::read(&path)?);
        }
    }
    Ok(files)
}

fn determinism() -> Result<Verdict> {
    let scratch = tempfile::tempdir()?;
    let scenario = paper_file();
    let scenario = scenario.to_str().context("non-utf8 path")?;
    let mut commands: Vec<(String, Vec<String>)> = Vec::new();
    for engine in ["mfg", "rl", "ga", "oracle"] {
        commands.push((format!("run {engine}"), ["run", "--scenario", scenario, "--engine", engine, "--seed", "3"].map(String::from).to_vec()));
    }
    commands.push((
        "sweep".into(),
        ["sweep", "--scenario", scenario, "--seeds", "3", "--beta-steps", "4"].map(String::from).to_vec(),
    ));
    commands.push((
        "sweep per size".into(),
        ["sweep", "--scenario", scenario, "--seeds", "2", "--beta-steps", "3", "--retrain-per-beta", "--engines", "rl,ga,mfg"]
            .map(String::from)
            .to_vec(),
    ));

    let (mut compared, mut differing) = (0usize, Vec::new());
    for (label, args) in &commands {
        let mut outputs = Vec::new();
        for attempt in 0..2 {
            let dir = scratch.path().join(format!("{}-{attempt}", label.replace(' ', "-")));
            let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
            let dir_str = dir.to_str().unwrap().to_string();
            full.extend(["--out", &dir_str]);
            sfcmec(&full)?;
            outputs.push(artifacts(&dir)?);
        }
        ensure!(outputs[0].keys().any(|k| k.ends_with(".csv")), "{label} wrote no CSV files");
        for (name, bytes) in &outputs[0] {
            compared += 1;
            if outputs[1].get(name) != Some(bytes) {
                differing.push(format!("{label}/{name}"));
            }
        }
    }

    // decode of the stored policy, and scenario generation
    let policy = scratch.path().join("run-rl-0/policy.txt");
    let mut decoded = Vec::new();
    let mut generated = Vec::new();
    for attempt in 0..2 {
        let dir = scratch.path().join(format!("decode-{attempt}"));
        sfcmec(&["decode", "--scenario", scenario, "--policy", policy.to_str().unwrap(), "--out", dir.to_str().unwrap()])?;
        decoded.push(fs::read(dir.join("placement.csv"))?);
        let file = scratch.path().join(format!("gen-{attempt}.toml"));
        sfcmec(&["scenario-gen", "--seed", "7", "--load", "0.4", "--out", file.to_str().unwrap()])?;
        generated.push(fs::read(file)?);
    }
    compared += 2;
    if decoded[0] != decoded[1] {
        differing.push("decode/placement.csv".into());
    }
    if generated[0] != generated[1] {
        differing.push("scenario-gen".into());
    }
    let mut detail = format!("{} commands run twice, {compared} files compared, {} differ", commands.len() + 2, differing.len());
    if !differing.is_empty() {
        detail.push_str(&format!(": {}", differing.join(", ")));
    }
    Ok(verdict(differing.is_empty(), detail))
}

fn report(number: usize, name: &str, result: Result<Verdict>) -> bool {
    let (status, detail, pass) = match result {
        Ok(v) => (if v.pass { "PASS" } else { "FAIL" }, v.detail, v.pass),
        Err(e) => ("FAIL", format!("error: {e:#}"), false),
    };
    println!("criterion {number} {name}: {status} | {detail}");
    pass
}

fn main() {
    // cargo passes harness flags through; only `--list` needs an answer
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut results = Vec::new();
    results.push(report(1, "invariants", invariants()));
    results.push(report(2, "delay model vs independent oracle", oracle_equivalence()));
    results.push(report(3, "congestion-free MFG vs DP, Nash check", dp_equivalence()));

    let loaded = scenario_file::load(&paper_file());
    let config = RunConfig { learner: LearnerConfig { episodes: RL_EPISODES, ..RunConfig::default().learner }, ..RunConfig::default() };
    let training = loaded.as_ref().map_err(|e| anyhow::anyhow!("{e:#}")).and_then(|l| {
        let start = Instant::now();
        let runs = train_rl_seeds(&l.scenario.topology, &config)?;
        Ok((runs, start.elapsed()))
    });
    match (&loaded, &training) {
        (Ok(l), Ok((runs, elapsed))) => {
            results.push(report(4, "rl within 10% of the optimum", rl_optimality(&l.scenario.topology, &l.fingerprint, runs, *elapsed)));
            results.push(report(5, "reward convergence", reward_convergence(&l.scenario.topology, runs)));
        }
        (_, Err(e)) => {
            results.push(report(4, "rl within 10% of the optimum", Err(anyhow::anyhow!("{e:#}"))));
            results.push(report(5, "reward convergence", Err(anyhow::anyhow!("{e:#}"))));
        }
        (Err(_), Ok(_)) => unreachable!(),
    }
    let ordering = loaded.as_ref().map_err(|e| anyhow::anyhow!("{e:#}")).and_then(|l| comparative_ordering(&l.scenario.topology, &config));
    results.push(report(6, "rl <= ga per chain and size", ordering));
    results.push(report(7, "determinism", determinism()));

    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed} of {} criteria passed", results.len());
    if passed != results.len() {
        process::exit(1);
    }
}
