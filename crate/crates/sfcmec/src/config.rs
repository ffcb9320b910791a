//! Run configuration: engine defaults plus an optional TOML overrides file.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

use sfcmec_core::ga::GaConfig;
use sfcmec_core::learner::LearnerConfig;
use sfcmec_core::mfg::{FpkOrder, MfgConfig, TieBreak, UpdateOrder};
use sfcmec_core::scenario::REFERENCE_BETA;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Packet size in bytes used to price rewards and score placements.
    pub reference_beta: f64,
    pub learner: LearnerConfig,
    /// Weight of the congestion penalty; `None` uses the kernel default.
    pub congestion_weight: Option<f64>,
    pub ga: GaConfig,
    pub mfg: MfgConfig,
    pub enumeration_bound: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            reference_beta: REFERENCE_BETA,
            learner: LearnerConfig::default(),
            congestion_weight: None,
            ga: GaConfig::default(),
            mfg: MfgConfig { update: UpdateOrder::PerComponent, ..MfgConfig::default() },
            enumeration_bound: 1 << 24,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Overrides {
    reference_beta: Option<f64>,
    #[serde(default)]
    learner: LearnerOverrides,
    #[serde(default)]
    ga: GaOverrides,
    #[serde(default)]
    mfg: MfgOverrides,
    #[serde(default)]
    oracle: OracleOverrides,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LearnerOverrides {
    episodes: Option<usize>,
    actor_lr: Option<f64>,
    critic_lr: Option<f64>,
    temperature_start: Option<f64>,
    temperature_end: Option<f64>,
    value_bound: Option<f64>,
    reward_scale: Option<f64>,
    congestion_weight: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaOverrides {
    population_size: Option<usize>,
    generations: Option<usize>,
    crossover_rate: Option<f64>,
    mutation_rate: Option<f64>,
    tournament_size: Option<usize>,
    infeasibility_penalty: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
enum TieBreakName {
    #[default]
    LowestIndex,
    Uniform,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
enum UpdateName {
    Simultaneous,
    #[default]
    PerComponent,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
enum FpkName {
    #[default]
    Forward,
    Printed,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MfgOverrides {
    horizon: Option<usize>,
    tol: Option<f64>,
    max_iters: Option<usize>,
    damping: Option<f64>,
    tie_break: Option<TieBreakName>,
    update: Option<UpdateName>,
    fpk_order: Option<FpkName>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleOverrides {
    enumeration_bound: Option<u64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let o: Overrides = toml::from_str(text).context("parsing config overrides")?;
        let mut c = Self::default();
        set(&mut c.reference_beta, o.reference_beta);
        let l = o.learner;
        set(&mut c.learner.episodes, l.episodes);
        set(&mut c.learner.actor_lr, l.actor_lr);
        set(&mut c.learner.critic_lr, l.critic_lr);
        set(&mut c.learner.temperature_start, l.temperature_start);
        set(&mut c.learner.temperature_end, l.temperature_end);
        set(&mut c.learner.value_bound, l.value_bound);
        c.learner.reward_scale = l.reward_scale.or(c.learner.reward_scale);
        c.congestion_weight = l.congestion_weight;
        let g = o.ga;
        set(&mut c.ga.population_size, g.population_size);
        set(&mut c.ga.generations, g.generations);
        set(&mut c.ga.crossover_rate, g.crossover_rate);
        set(&mut c.ga.mutation_rate, g.mutation_rate);
        set(&mut c.ga.tournament_size, g.tournament_size);
        set(&mut c.ga.infeasibility_penalty, g.infeasibility_penalty);
        let m = o.mfg;
        c.mfg.horizon = m.horizon.or(c.mfg.horizon);
        set(&mut c.mfg.tol, m.tol);
        set(&mut c.mfg.max_iters, m.max_iters);
        set(&mut c.mfg.damping, m.damping);
        if let Some(t) = m.tie_break {
            c.mfg.tie_break = match t {
                TieBreakName::LowestIndex => TieBreak::LowestIndex,
                TieBreakName::Uniform => TieBreak::Uniform,
            };
        }
        if let Some(u) = m.update {
            c.mfg.update = match u {
                UpdateName::Simultaneous => UpdateOrder::Simultaneous,
                UpdateName::PerComponent => UpdateOrder::PerComponent,
            };
        }
        if let Some(f) = m.fpk_order {
            c.mfg.fpk_order = match f {
                FpkName::Forward => FpkOrder::Forward,
                FpkName::Printed => FpkOrder::Printed,
            };
        }
        set(&mut c.enumeration_bound, o.oracle.enumeration_bound);
        c.learner.delay_beta = c.reference_beta;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn overrides_apply() {
        let c = RunConfig::from_toml("reference_beta = 2e6\n[learner]\nepisodes = 10\n[mfg]\nupdate = \"simultaneous\"\ntie_break = \"uniform\"\n").unwrap();
        assert_eq!(c.learner.episodes, 10);
        assert_eq!(c.learner.delay_beta, 2e6);
        assert_eq!(c.mfg.update, UpdateOrder::Simultaneous);
        assert_eq!(c.mfg.tie_break, TieBreak::Uniform);
        assert!(RunConfig::from_toml("[ga]\nelite = 2\n").is_err());
    }
}
