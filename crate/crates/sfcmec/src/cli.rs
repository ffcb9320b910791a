//! Command-line interface.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use sfcmec_core::delay::count_timeouts;
use sfcmec_core::mfg::StateSpace;
use sfcmec_core::scenario::{paper_scenario, PaperTemplate};
use sfcmec_core::workload::generate_requests;

use crate::config::RunConfig;
use crate::engine::{chain_delays, decode_policy, run_engine, Artifacts, Engine};
use crate::output;
use crate::scenario_file;
use crate::sweep::{beta_grid, run_sweep, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "sfcmec", version, about = "Service-chain placement on MEC nodes: mean-field game, actor-critic, GA and exhaustive oracle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one engine on a scenario and write its CSV artifacts.
    Run(RunArgs),
    /// Evaluate engines' placements over a range of packet sizes.
    Sweep(SweepArgs),
    /// Write a bundled scenario file.
    ScenarioGen(GenArgs),
    /// Decode a stored policy snapshot into a placement.
    Decode(DecodeArgs),
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory.
    #[arg(long, env = "SFCMEC_OUT", default_value = "out")]
    pub out: PathBuf,
    /// TOML file overriding engine settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Training episodes for the rl engine [default: 2000].
    #[arg(long)]
    pub episodes: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub engine: Engine,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated engines.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "rl,ga")]
    pub engines: Vec<Engine>,
    /// Smallest packet size in bytes.
    #[arg(long, default_value_t = 100_000.0)]
    pub beta_min: f64,
    /// Largest packet size in bytes.
    #[arg(long, default_value_t = 2_000_000.0)]
    pub beta_max: f64,
    /// Number of packet sizes, evenly spaced.
    #[arg(long, default_value_t = 20)]
    pub beta_steps: usize,
    /// Number of seeds per engine.
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Train at every packet size instead of once at the reference size.
    #[arg(long)]
    pub retrain_per_beta: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Template {
    /// Three nodes, seven VNFs, three chains.
    Paper,
}

#[derive(Debug, clap::Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "paper")]
    pub template: Template,
    /// Destination file.
    #[arg(long)]
    pub out: PathBuf,
    /// Share of the aggregate node capacity the VNFs need, 0.10 to 0.70.
    #[arg(long, default_value_t = 0.5)]
    pub load: f64,
    /// Seed of the demand draw.
    #[arg(long, default_value_t = 2021)]
    pub seed: u64,
}

#[derive(Debug, clap::Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Policy snapshot written by `run --engine rl`.
    #[arg(long)]
    pub policy: PathBuf,
}

/// Exit status of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// Outputs were written but the solver did not converge.
    NotConverged,
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = common.episodes {
        config.learner.episodes = n;
    }
    Ok(config)
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_wall_time(dir: &Path, start: Instant) -> Result<()> {
    let path = dir.join("wall_time.txt");
    fs::write(&path, format!("{:.3} s\n", start.elapsed().as_secs_f64())).with_context(|| format!("writing {}", path.display()))
}

pub fn execute(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::ScenarioGen(args) => cmd_scenario_gen(args),
        Command::Decode(args) => cmd_decode(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<Outcome> {
    let loaded = scenario_file::load(&args.common.scenario)?;
    let config = load_config(&args.common)?;
    let topology = &loaded.scenario.topology;
    let start = Instant::now();
    let run = run_engine(args.engine, topology, &config, args.seed, config.reference_beta)?;

    let dir = &args.common.out;
    prepare_out(dir)?;
    let requests = generate_requests(&loaded.scenario.workload)?;
    let timeouts = count_timeouts(topology, &run.placement, &requests)?;
    let delays: Vec<f64> = chain_delays(topology, &run.placement, &[run.beta])?.into_iter().map(|d| d[0]).collect();
    output::write_summary(&dir.join("summary.csv"), &run, &delays, requests.len(), timeouts)?;
    output::write_placement(&dir.join("placement.csv"), topology, &run.placement)?;
    output::write_requests(&dir.join("requests.csv"), topology, &requests)?;
    let space = StateSpace::for_topology(topology)?;
    match &run.artifacts {
        Artifacts::Rl(trained) => {
            output::write_training_log(&dir.join("training_log.csv"), &trained.log)?;
            output::write_reward_curves(&dir.join("reward_curves.csv"), topology, &space, &trained.log)?;
            let path = dir.join("policy.txt");
            fs::write(&path, output::policy_to_text(&trained.policy)).with_context(|| format!("writing {}", path.display()))?;
        }
        Artifacts::Ga(evolution) => output::write_fitness_history(&dir.join("fitness_history.csv"), &evolution.history)?,
        Artifacts::Mfg(solution) => {
            output::write_mfg_iterations(&dir.join("mfg_iterations.csv"), solution)?;
            output::write_mfg_solution(&dir.join("mfg_solution.csv"), topology, &space, solution)?;
        }
        Artifacts::Oracle { .. } => {}
    }
    write_wall_time(dir, start)?;

    println!("{} seed {}: objective {} ms ({} of {} requests late)", run.engine, run.seed, run.objective, timeouts, requests.len());
    if !run.converged {
        eprintln!(
            "warning: mfg fixed point did not converge within {} iterations; outputs hold the last iterate",
            config.mfg.max_iters
        );
        return Ok(Outcome::NotConverged);
    }
    Ok(Outcome::Ok)
}

fn cmd_sweep(args: SweepArgs) -> Result<Outcome> {
    let loaded = scenario_file::load(&args.common.scenario)?;
    let config = load_config(&args.common)?;
    let spec = SweepSpec {
        engines: args.engines,
        betas: beta_grid(args.beta_min, args.beta_max, args.beta_steps)?,
        seeds: (0..args.seeds as u64).map(|i| args.seed + i).collect(),
        retrain_per_beta: args.retrain_per_beta,
    };
    let start = Instant::now();
    let (cells, rows) = run_sweep(&loaded.scenario.topology, &config, &spec)?;
    let dir = &args.common.out;
    prepare_out(dir)?;
    output::write_sweep(&dir.join("sweep.csv"), &rows)?;
    output::write_sweep_cells(&dir.join("sweep_cells.csv"), &loaded.scenario.topology, &cells)?;
    write_wall_time(dir, start)?;
    println!("{} rows written to {}", rows.len(), dir.join("sweep.csv").display());
    Ok(Outcome::Ok)
}

fn cmd_scenario_gen(args: GenArgs) -> Result<Outcome> {
    let scenario = match args.template {
        Template::Paper => paper_scenario(PaperTemplate { load: args.load, seed: args.seed })?,
    };
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        prepare_out(parent)?;
    }
    scenario_file::save(&scenario, &args.out)?;
    Ok(Outcome::Ok)
}

fn cmd_decode(args: DecodeArgs) -> Result<Outcome> {
    let loaded = scenario_file::load(&args.common.scenario)?;
    let config = load_config(&args.common)?;
    let topology = &loaded.scenario.topology;
    let space = StateSpace::for_topology(topology)?;
    let text = fs::read_to_string(&args.policy).with_context(|| format!("reading {}", args.policy.display()))?;
    let policy = output::policy_from_text(&space, &text)?;
    let placement = decode_policy(topology, &config, &policy)?;
    let dir = &args.common.out;
    prepare_out(dir)?;
    output::write_placement(&dir.join("placement.csv"), topology, &placement)?;
    let objective = sfcmec_core::delay::grid_objective(topology, &placement, &[config.reference_beta])?;
    println!("decoded objective {objective} ms");
    Ok(Outcome::Ok)
}
