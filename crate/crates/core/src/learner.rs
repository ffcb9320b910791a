//! Tabular actor-critic on the MDP obtained from the placement game.
//!
//! States of the MDP are the population density over `(chain, position,
//! node)` slots; an action is a row-stochastic transition matrix, decoded
//! from per-edge preference weights by a softmax with annealed temperature.
//! Each episode regenerates the density under the current policy, prices the
//! edges with the density-dependent kernel, samples one traversal per chain
//! and moves critic and actor along the temporal-difference errors.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::{abs, exp, powf};
use crate::mfg::{forward_sweep, CongestionKernel, FpkOrder, RewardKernel, RewardModel, StateLabel, StateSpace, TransitionMatrix};
use crate::{delay, ChainId, Error, NodeId, PlacementMatrix, ResourceVector, Result, Topology};

/// Preference weights per edge, aligned with [`StateSpace::successors`].
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    weights: Vec<Vec<f64>>,
}

impl Policy {
    pub fn zeros(space: &StateSpace) -> Self {
        Self { weights: (0..space.len()).map(|s| vec![0.0; space.successors(s).len()]).collect() }
    }

    pub fn from_weights(space: &StateSpace, weights: Vec<Vec<f64>>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::Dimension { expected: space.len(), got: weights.len() });
        }
        for (s, row) in weights.iter().enumerate() {
            if row.len() != space.successors(s).len() {
                return Err(Error::Dimension { expected: space.successors(s).len(), got: row.len() });
            }
            if row.iter().any(|w| !w.is_finite()) {
                return Err(Error::Config(alloc::format!("non-finite weight in row {s}")));
            }
        }
        Ok(Self { weights })
    }

    /// Weights equal to the transition probabilities of `p`, so the greedy
    /// decode follows the most likely successor.
    pub fn from_matrix(space: &StateSpace, p: &TransitionMatrix) -> Result<Self> {
        if p.len() != space.len() {
            return Err(Error::Dimension { expected: space.len(), got: p.len() });
        }
        Ok(Self { weights: (0..space.len()).map(|s| space.successors(s).iter().map(|t| p.get(s, *t)).collect()).collect() })
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn weight_mut(&mut self, space: &StateSpace, from: usize, to: usize) -> Option<&mut f64> {
        let idx = space.successors(from).iter().position(|t| *t == to)?;
        self.weights[from].get_mut(idx)
    }

    /// Softmax of `weights / temperature` on every row.
    pub fn decode(&self, space: &StateSpace, temperature: f64) -> TransitionMatrix {
        let mut m = TransitionMatrix::zeros(space.len());
        for (s, row) in self.weights.iter().enumerate() {
            let top = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let e: Vec<f64> = row.iter().map(|w| exp((w - top) / temperature)).collect();
            let z: f64 = e.iter().sum();
            for (t, x) in space.successors(s).iter().zip(e) {
                m.set(s, *t, x / z);
            }
        }
        m
    }

    /// Successors of `state` by decreasing weight, lowest index first on ties.
    pub fn ranked(&self, space: &StateSpace, state: usize) -> Vec<usize> {
        let mut order: Vec<(usize, f64)> = space.successors(state).iter().copied().zip(self.weights[state].iter().copied()).collect();
        order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        order.into_iter().map(|(t, _)| t).collect()
    }
}

/// Value estimate per state.
#[derive(Debug, Clone, PartialEq)]
pub struct Critic {
    pub values: Vec<f64>,
}

impl Critic {
    pub fn zeros(space: &StateSpace) -> Self {
        Self { values: vec![0.0; space.len()] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub episodes: usize,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub temperature_start: f64,
    pub temperature_end: f64,
    /// Abort when any critic value exceeds this magnitude.
    pub value_bound: f64,
    /// Rewards are divided by this before the TD update; `None` uses the
    /// largest edge reward magnitude of the first episode's kernel.
    pub reward_scale: Option<f64>,
    /// Packet size at which the logged placement delay is evaluated.
    pub delay_beta: f64,
    pub seed: u64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            episodes: 2000,
            actor_lr: 0.05,
            critic_lr: 0.1,
            temperature_start: 1.0,
            temperature_end: 0.1,
            value_bound: 1e6,
            reward_scale: None,
            delay_beta: crate::scenario::REFERENCE_BETA,
            seed: 0,
        }
    }
}

impl LearnerConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.episodes >= 1
            && self.actor_lr >= 0.0
            && self.critic_lr > 0.0
            && self.temperature_start > 0.0
            && self.temperature_end > 0.0
            && self.value_bound > 0.0
            && self.reward_scale.is_none_or(|s| s > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::Config("learner: need episodes >= 1, positive rates, temperatures and bounds".into()))
        }
    }

    /// Geometric schedule from `temperature_start` to `temperature_end`.
    pub fn temperature(&self, episode: usize) -> f64 {
        if self.episodes <= 1 {
            return self.temperature_start;
        }
        let frac = episode as f64 / (self.episodes - 1) as f64;
        self.temperature_start * powf(self.temperature_end / self.temperature_start, frac)
    }
}

/// One sampled edge and its temporal-difference error.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub from: usize,
    pub to: usize,
    pub reward: f64,
    pub td_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    pub steps: Vec<Step>,
    pub total_reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub episode: usize,
    /// Sum of sampled edge rewards over all chains.
    pub total_reward: f64,
    /// Objective of the greedy decode at `delay_beta`; NaN when the decode
    /// has no feasible completion.
    pub placement_delay: f64,
    pub temperature: f64,
    /// Reward for entering each state of the space, weighted by the
    /// current inflow.
    pub state_rewards: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingLog {
    pub episodes: Vec<EpisodeRecord>,
    pub reward_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub policy: Policy,
    pub critic: Critic,
    pub log: TrainingLog,
    /// Kernel priced at the final policy's density.
    pub kernel: RewardKernel,
}

/// `Σ_{s ∈ chain} Σ_s' P[s][s'] r[s → s']`.
pub fn mdp_reward(space: &StateSpace, p: &TransitionMatrix, kernel: &RewardKernel, chain: ChainId) -> f64 {
    (0..space.len())
        .filter(|s| match space.label(*s) {
            StateLabel::Source(k) => k == chain,
            StateLabel::Slot { chain: k, .. } => k == chain,
            StateLabel::Abstract(_) => false,
        })
        .map(|s| kernel.edges(s).iter().map(|(t, r)| p.get(s, *t) * r).sum::<f64>())
        .sum()
}

fn sample_row<R: Rng>(row: &[f64], successors: &[usize], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for t in successors {
        acc += row[*t];
        if u < acc {
            return *t;
        }
    }
    *successors.last().expect("state has successors")
}

/// Samples one traversal from each of `starts` to absorption and records
/// `δ = r/scale + V̂(s') − V̂(s)` on every edge. Nothing is updated.
#[allow(clippy::too_many_arguments)]
pub fn run_episode<R: Rng>(
    space: &StateSpace,
    policy: &Policy,
    critic: &Critic,
    kernel: &RewardKernel,
    temperature: f64,
    starts: &[usize],
    reward_scale: f64,
    rng: &mut R,
) -> Result<EpisodeTrace> {
    let p = policy.decode(space, temperature);
    let mut steps = Vec::new();
    let mut total_reward = 0.0;
    for start in starts {
        let mut s = *start;
        let mut guard = 0;
        while !space.is_absorbing(s) {
            let t = sample_row(p.row(s), space.successors(s), rng);
            let reward = kernel.get(s, t).ok_or(Error::NoSuccessor(s))?;
            let next_value = if space.is_absorbing(t) { 0.0 } else { critic.values[t] };
            let td_error = reward / reward_scale + next_value - critic.values[s];
            steps.push(Step { from: s, to: t, reward, td_error });
            total_reward += reward;
            s = t;
            guard += 1;
            if guard > space.len() {
                return Err(Error::NoSuccessor(s));
            }
        }
    }
    Ok(EpisodeTrace { steps, total_reward })
}

/// Reward for entering each state, averaged over the inflow `θ(s)·P[s][t]`
/// from its predecessors, or over the predecessors evenly when nothing
/// flows in. Source states get 0.
fn state_rewards(space: &StateSpace, p: &TransitionMatrix, kernel: &RewardKernel, occupancy: &[f64]) -> Vec<f64> {
    let n = space.len();
    let (mut num, mut den) = (vec![0.0; n], vec![0.0; n]);
    let (mut plain, mut preds) = (vec![0.0; n], vec![0usize; n]);
    for (s, theta) in occupancy.iter().enumerate().take(n) {
        for (t, r) in kernel.edges(s) {
            if *t == s {
                continue;
            }
            let w = theta * p.get(s, *t);
            num[*t] += w * r;
            den[*t] += w;
            plain[*t] += r;
            preds[*t] += 1;
        }
    }
    (0..n)
        .map(|t| {
            if den[t] > 1e-12 {
                num[t] / den[t]
            } else if preds[t] > 0 {
                plain[t] / preds[t] as f64
            } else {
                0.0
            }
        })
        .collect()
}

pub fn train(topology: &Topology, space: &StateSpace, model: &dyn RewardModel, config: &LearnerConfig) -> Result<Trained> {
    train_from(topology, space, model, config, Critic::zeros(space))
}

/// Actor-critic training from an initial critic `V(0)`.
pub fn train_from(
    topology: &Topology,
    space: &StateSpace,
    model: &dyn RewardModel,
    config: &LearnerConfig,
    mut critic: Critic,
) -> Result<Trained> {
    config.validate()?;
    if critic.values.len() != space.len() {
        return Err(Error::Dimension { expected: space.len(), got: critic.values.len() });
    }
    let starts: Vec<usize> = topology
        .chain_ids()
        .map(|k| space.source_of(k).ok_or_else(|| Error::Config("space has no source state".into())))
        .collect::<Result<_>>()?;
    let theta0 = space.source_density();
    let horizon = space.depth();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut policy = Policy::zeros(space);
    let mut log = TrainingLog { episodes: Vec::with_capacity(config.episodes), reward_scale: 0.0 };

    for episode in 0..config.episodes {
        let temperature = config.temperature(episode);
        // regenerate the VNF distribution under the current policy
        let p = policy.decode(space, temperature);
        let densities = forward_sweep(&theta0, &vec![p.clone(); horizon], FpkOrder::Forward)?;
        let kernel = model.kernel(space, &densities);
        if episode == 0 {
            log.reward_scale = config.reward_scale.unwrap_or_else(|| kernel.max_abs().max(f64::MIN_POSITIVE));
        }
        let occupancy = CongestionKernel::occupancy(&densities);
        let rewards = state_rewards(space, &p, &kernel, &occupancy);

        let trace = run_episode(space, &policy, &critic, &kernel, temperature, &starts, log.reward_scale, &mut rng)?;
        for step in &trace.steps {
            critic.values[step.from] += config.critic_lr * step.td_error;
            if let Some(w) = policy.weight_mut(space, step.from, step.to) {
                *w += config.actor_lr * step.td_error;
            }
            let magnitude = abs(critic.values[step.from]);
            if !(magnitude <= config.value_bound) {
                return Err(Error::Diverged { episode, magnitude });
            }
        }

        let placement_delay = extract_placement(topology, space, &policy, &kernel)
            .and_then(|pl| delay::grid_objective(topology, &pl, &[config.delay_beta]))
            .unwrap_or(f64::NAN);
        log.episodes.push(EpisodeRecord {
            episode,
            total_reward: trace.total_reward,
            placement_delay,
            temperature,
            state_rewards: rewards,
        });
    }

    let p = policy.decode(space, config.temperature(config.episodes - 1));
    let densities = forward_sweep(&theta0, &vec![p; horizon], FpkOrder::Forward)?;
    let kernel = model.kernel(space, &densities);
    Ok(Trained { policy, critic, log, kernel })
}

/// Greedy decode: per chain, walk from the source along the highest-weight
/// successor. If that successor would overload its node, take the feasible
/// successor with the highest kernel reward instead.
pub fn extract_placement(topology: &Topology, space: &StateSpace, policy: &Policy, kernel: &RewardKernel) -> Result<PlacementMatrix> {
    let mut placement = PlacementMatrix::new(topology);
    let mut loads = vec![ResourceVector::ZERO; topology.nodes.len()];
    for chain in topology.chain_ids() {
        let mut s = space.source_of(chain).ok_or_else(|| Error::Config("space has no source state".into()))?;
        while !space.is_absorbing(s) {
            let fits = |t: usize| -> Option<(usize, NodeId, ResourceVector)> {
                let StateLabel::Slot { chain: k, position, node } = space.label(t) else { return None };
                let demand = topology.vnfs[topology.chains[k.0].vnfs[position].0].demand;
                (loads[node.0] + demand).fits_within(&topology.nodes[node.0].capacity).then_some((position, node, demand))
            };
            let ranked = policy.ranked(space, s);
            let greedy = ranked[0];
            let choice = if fits(greedy).is_some() {
                greedy
            } else {
                let mut feasible: Vec<(usize, f64)> = kernel
                    .edges(s)
                    .iter()
                    .filter(|(t, _)| fits(*t).is_some())
                    .map(|(t, r)| (*t, *r))
                    .collect();
                feasible.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                match feasible.first() {
                    Some((t, _)) => *t,
                    None => {
                        let position = match space.label(greedy) {
                            StateLabel::Slot { position, .. } => position,
                            _ => 0,
                        };
                        return Err(Error::NoFeasibleCompletion { chain: chain.0, position });
                    }
                }
            };
            let (position, node, demand) = fits(choice).expect("checked");
            placement.set(node, chain, position, true)?;
            loads[node.0] += demand;
            s = choice;
        }
    }
    Ok(placement)
}
