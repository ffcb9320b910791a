//! Discrete-time mean-field game over a layered state graph.
//!
//! Each state carries a density (population mass). A row-stochastic
//! transition matrix moves mass forward one slot at a time (the forward,
//! Fokker-Planck-Kolmogorov recursion) while values are propagated backward
//! from the horizon by maximizing one-step reward plus continuation value
//! (the backward, Hamilton-Jacobi-Bellman recursion). [`solve_mfg`]
//! alternates the two sweeps until the density and value trajectories stop
//! moving.

mod sfc;

pub use sfc::{CongestionKernel, StateLabel};

use alloc::vec;
use alloc::vec::Vec;

use crate::math::abs;
use crate::{Error, Result};

const STOCHASTIC_TOL: f64 = 1e-9;

/// Directed state graph. A state whose only successor is itself is
/// absorbing (an egress); every other edge points to a later layer.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    successors: Vec<Vec<usize>>,
    layers: Vec<usize>,
    labels: Vec<StateLabel>,
}

impl StateSpace {
    /// Builds a space from successor lists. Layers are longest-path depths
    /// from the states without predecessors.
    pub fn from_successors(successors: Vec<Vec<usize>>) -> Result<Self> {
        let labels = (0..successors.len()).map(StateLabel::Abstract).collect();
        Self::with_labels(successors, labels)
    }

    pub(crate) fn with_labels(successors: Vec<Vec<usize>>, labels: Vec<StateLabel>) -> Result<Self> {
        let n = successors.len();
        let mut indegree = vec![0usize; n];
        for (s, succ) in successors.iter().enumerate() {
            if succ.is_empty() {
                return Err(Error::NoSuccessor(s));
            }
            for t in succ {
                if *t >= n {
                    return Err(Error::Dimension { expected: n, got: *t });
                }
                if *t != s {
                    indegree[*t] += 1;
                }
            }
            if succ.contains(&s) && succ.len() > 1 {
                return Err(Error::Config(alloc::format!("state {s} mixes a self-loop with other edges")));
            }
        }
        // Kahn's algorithm; leftovers mean a cycle.
        let mut layers = vec![0usize; n];
        let mut queue: Vec<usize> = (0..n).filter(|s| indegree[*s] == 0).collect();
        let mut seen = 0;
        while let Some(s) = queue.pop() {
            seen += 1;
            for t in &successors[s] {
                if *t == s {
                    continue;
                }
                layers[*t] = layers[*t].max(layers[s] + 1);
                indegree[*t] -= 1;
                if indegree[*t] == 0 {
                    queue.push(*t);
                }
            }
        }
        if seen != n {
            return Err(Error::Config(alloc::string::String::from("state graph has a cycle")));
        }
        Ok(Self { successors, layers, labels })
    }

    pub fn len(&self) -> usize {
        self.successors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successors.is_empty()
    }

    pub fn successors(&self, state: usize) -> &[usize] {
        &self.successors[state]
    }

    pub fn layer(&self, state: usize) -> usize {
        self.layers[state]
    }

    pub fn label(&self, state: usize) -> StateLabel {
        self.labels[state]
    }

    pub fn is_absorbing(&self, state: usize) -> bool {
        self.successors[state] == [state]
    }

    /// Number of steps needed for mass to reach an absorbing state from layer 0.
    pub fn depth(&self) -> usize {
        self.layers.iter().copied().max().unwrap_or(0)
    }

    pub fn allows(&self, from: usize, to: usize) -> bool {
        self.successors[from].contains(&to)
    }

    /// States grouped by weakly connected component, in order of each
    /// component's lowest state.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut [usize], mut s: usize) -> usize {
            while parent[s] != s {
                parent[s] = parent[parent[s]];
                s = parent[s];
            }
            s
        }
        for s in 0..n {
            for t in &self.successors[s] {
                let (a, b) = (root(&mut parent, s), root(&mut parent, *t));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut index = vec![usize::MAX; n];
        for s in 0..n {
            let r = root(&mut parent, s);
            if index[r] == usize::MAX {
                index[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[index[r]].push(s);
        }
        groups
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityVector(pub Vec<f64>);

impl DensityVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn mass(&self) -> f64 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector(pub Vec<f64>);

/// Dense row-stochastic matrix `P[from][to]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    data: Vec<f64>,
}

impl TransitionMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Dimension { expected: n, got: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    /// Uniform over the successors of each state.
    pub fn uniform(space: &StateSpace) -> Self {
        let mut m = Self::zeros(space.len());
        for s in 0..space.len() {
            let succ = space.successors(s);
            for t in succ {
                m.set(s, *t, 1.0 / succ.len() as f64);
            }
        }
        m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.data[from * self.n + to]
    }

    pub fn set(&mut self, from: usize, to: usize, p: f64) {
        self.data[from * self.n + to] = p;
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.data[from * self.n..(from + 1) * self.n]
    }

    pub fn set_row(&mut self, from: usize, row: &[f64]) {
        self.data[from * self.n..(from + 1) * self.n].copy_from_slice(row);
    }

    /// Copy with row `state` replaced by `q`.
    pub fn with_row(&self, state: usize, q: &[f64]) -> Self {
        let mut m = self.clone();
        m.set_row(state, q);
        m
    }

    pub fn check_stochastic(&self) -> Result<()> {
        for r in 0..self.n {
            let row = self.row(r);
            let sum: f64 = row.iter().sum();
            if abs(sum - 1.0) > STOCHASTIC_TOL || row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::NotStochastic { row: r, sum });
            }
        }
        Ok(())
    }

    /// Stochastic and zero outside the allowed edges of `space`.
    pub fn is_supported_on(&self, space: &StateSpace) -> bool {
        self.check_stochastic().is_ok()
            && (0..self.n).all(|s| (0..self.n).all(|t| self.get(s, t) == 0.0 || space.allows(s, t)))
    }
}

/// Edge rewards `r[from → to]`, defined exactly on the edges of a space.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardKernel {
    edges: Vec<Vec<(usize, f64)>>,
}

impl RewardKernel {
    pub fn from_fn(space: &StateSpace, mut reward: impl FnMut(usize, usize) -> f64) -> Self {
        let edges = (0..space.len())
            .map(|s| space.successors(s).iter().map(|t| (*t, reward(s, *t))).collect())
            .collect();
        Self { edges }
    }

    pub fn zeros(space: &StateSpace) -> Self {
        Self::from_fn(space, |_, _| 0.0)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self, state: usize) -> &[(usize, f64)] {
        &self.edges[state]
    }

    pub fn get(&self, from: usize, to: usize) -> Option<f64> {
        self.edges[from].iter().find(|(t, _)| *t == to).map(|(_, r)| *r)
    }

    /// Every entry shifted by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            edges: self
                .edges
                .iter()
                .map(|row| row.iter().map(|(t, r)| (*t, r + c)).collect())
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.edges.iter().flatten().map(|(_, r)| abs(*r)).fold(0.0, f64::max)
    }
}

/// Produces the reward kernel seen by the population given its density
/// trajectory.
pub trait RewardModel {
    fn kernel(&self, space: &StateSpace, densities: &[DensityVector]) -> RewardKernel;

    fn depends_on_density(&self) -> bool;
}

/// A kernel that ignores the density.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticKernel(pub RewardKernel);

impl RewardModel for StaticKernel {
    fn kernel(&self, _: &StateSpace, _: &[DensityVector]) -> RewardKernel {
        self.0.clone()
    }

    fn depends_on_density(&self) -> bool {
        false
    }
}

/// Index order used by [`fpk_step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FpkOrder {
    /// `θ'[j] = Σ_i P[i][j] θ[i]`: mass flows along transitions.
    #[default]
    Forward,
    /// `θ'[j] = Σ_i P[j][i] θ[i]`, the index order as printed in the
    /// original recursion; kept for comparison only.
    Printed,
}

/// How [`hjb_backstep`] splits mass among equally good successors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestIndex,
    Uniform,
}

pub fn fpk_step(density: &DensityVector, p: &TransitionMatrix) -> Result<DensityVector> {
    fpk_step_with(density, p, FpkOrder::Forward)
}

pub fn fpk_step_with(density: &DensityVector, p: &TransitionMatrix, order: FpkOrder) -> Result<DensityVector> {
    let n = p.len();
    if density.0.len() != n {
        return Err(Error::Dimension { expected: n, got: density.0.len() });
    }
    p.check_stochastic()?;
    let mut next = vec![0.0; n];
    for (i, mass) in density.0.iter().enumerate() {
        if *mass == 0.0 {
            continue;
        }
        for (j, out) in next.iter_mut().enumerate() {
            let w = match order {
                FpkOrder::Forward => p.get(i, j),
                FpkOrder::Printed => p.get(j, i),
            };
            *out += w * mass;
        }
    }
    Ok(DensityVector(next))
}

/// `Σ_j' P[state][j'] · r[state → j']`.
pub fn expected_reward(state: usize, row: &[f64], kernel: &RewardKernel) -> f64 {
    kernel.edges(state).iter().map(|(t, r)| row[*t] * r).sum()
}

/// One-step payoff plus continuation: `Σ_j' P[state][j'] (r[state → j'] + V[j'])`.
pub fn average_reward(state: usize, p: &TransitionMatrix, kernel: &RewardKernel, values: &ValueVector) -> f64 {
    kernel
        .edges(state)
        .iter()
        .map(|(t, r)| p.get(state, *t) * (r + values.0[*t]))
        .sum()
}

fn is_tie(a: f64, best: f64) -> bool {
    abs(a - best) <= 1e-12 * best.abs().max(1.0)
}

/// One backward step: for every state, the row maximizing
/// `Σ q[j'] (r + V_next[j'])` over stochastic rows `q`. The objective is
/// linear in `q`, so the maximum sits on the best successor(s).
pub fn hjb_backstep(
    v_next: &ValueVector,
    kernel: &RewardKernel,
    tie: TieBreak,
) -> Result<(ValueVector, TransitionMatrix)> {
    let n = kernel.len();
    if v_next.0.len() != n {
        return Err(Error::Dimension { expected: n, got: v_next.0.len() });
    }
    let mut values = vec![0.0; n];
    let mut policy = TransitionMatrix::zeros(n);
    for (s, value) in values.iter_mut().enumerate() {
        let edges = kernel.edges(s);
        if edges.is_empty() {
            return Err(Error::NoSuccessor(s));
        }
        let payoff = |(t, r): &(usize, f64)| r + v_next.0[*t];
        let best = edges.iter().map(payoff).fold(f64::NEG_INFINITY, f64::max);
        if !best.is_finite() {
            return Err(Error::Config(alloc::format!("non-finite value at state {s}")));
        }
        *value = best;
        let mut winners: Vec<usize> = edges.iter().filter(|e| is_tie(payoff(e), best)).map(|e| e.0).collect();
        winners.sort_unstable();
        match tie {
            TieBreak::LowestIndex => policy.set(s, winners[0], 1.0),
            TieBreak::Uniform => {
                for t in &winners {
                    policy.set(s, *t, 1.0 / winners.len() as f64);
                }
            }
        }
    }
    Ok((ValueVector(values), policy))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MfgConfig {
    /// Number of slots; defaults to the depth of the state space.
    pub horizon: Option<usize>,
    pub tol: f64,
    pub max_iters: usize,
    /// Weight of the new density in the damped update.
    pub damping: f64,
    pub tie_break: TieBreak,
    pub fpk_order: FpkOrder,
    pub update: UpdateOrder,
}

/// Which part of the density guess moves toward the best response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateOrder {
    /// Every state at once.
    #[default]
    Simultaneous,
    /// One connected component at a time, each against the guess left by
    /// the previous one.
    PerComponent,
}

impl Default for MfgConfig {
    fn default() -> Self {
        Self {
            horizon: None,
            tol: 1e-9,
            max_iters: 200,
            damping: 0.5,
            tie_break: TieBreak::LowestIndex,
            fpk_order: FpkOrder::Forward,
            update: UpdateOrder::Simultaneous,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationStats {
    pub iteration: usize,
    pub value_change: f64,
    pub density_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MfgSolution {
    /// `V(t)` for `t = 0..=horizon`; `V(horizon)` is zero.
    pub values: Vec<ValueVector>,
    /// `P(t)` for `t = 0..horizon`.
    pub policies: Vec<TransitionMatrix>,
    /// `θ(t)` under `policies` from the initial density.
    pub densities: Vec<DensityVector>,
    /// Kernel the final backward sweep maximized against.
    pub kernel: RewardKernel,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<IterationStats>,
}

impl MfgSolution {
    pub fn horizon(&self) -> usize {
        self.policies.len()
    }

    /// The row each state follows in the slot it is occupied (its layer).
    pub fn layer_policy(&self, space: &StateSpace) -> TransitionMatrix {
        let mut m = TransitionMatrix::zeros(space.len());
        let last = self.horizon().saturating_sub(1);
        for s in 0..space.len() {
            let t = space.layer(s).min(last);
            m.set_row(s, self.policies[t].row(s));
        }
        m
    }
}

pub fn forward_sweep(
    theta0: &DensityVector,
    policies: &[TransitionMatrix],
    order: FpkOrder,
) -> Result<Vec<DensityVector>> {
    let mut out = Vec::with_capacity(policies.len() + 1);
    out.push(theta0.clone());
    for p in policies {
        let next = fpk_step_with(out.last().expect("nonempty"), p, order)?;
        out.push(next);
    }
    Ok(out)
}

fn backward_sweep(
    kernel: &RewardKernel,
    horizon: usize,
    tie: TieBreak,
) -> Result<(Vec<ValueVector>, Vec<TransitionMatrix>)> {
    let n = kernel.len();
    let mut values = vec![ValueVector(vec![0.0; n]); horizon + 1];
    let mut policies = vec![TransitionMatrix::zeros(n); horizon];
    for t in (0..horizon).rev() {
        let (v, p) = hjb_backstep(&values[t + 1], kernel, tie)?;
        values[t] = v;
        policies[t] = p;
    }
    Ok((values, policies))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| abs(x - y)).fold(0.0, f64::max)
}

/// Coupled fixed point of the backward and forward recursions.
///
/// The density guess starts from the uniform-policy trajectory and is
/// damped toward each new forward sweep, either all at once or one
/// component at a time (see [`UpdateOrder`]). A density-independent model is
/// solved in one pass. If `max_iters` is hit the last iterate is returned
/// with `converged == false`.
pub fn solve_mfg(
    space: &StateSpace,
    model: &dyn RewardModel,
    theta0: &DensityVector,
    config: &MfgConfig,
) -> Result<MfgSolution> {
    let horizon = config.horizon.unwrap_or_else(|| space.depth());
    if theta0.0.len() != space.len() {
        return Err(Error::Dimension { expected: space.len(), got: theta0.0.len() });
    }
    if !(config.tol > 0.0) || config.max_iters == 0 || !(config.damping > 0.0 && config.damping <= 1.0) {
        return Err(Error::Config(alloc::string::String::from(
            "mfg: need tol > 0, max_iters >= 1, damping in (0, 1]",
        )));
    }
    let uniform = vec![TransitionMatrix::uniform(space); horizon];
    let mut guess = forward_sweep(theta0, &uniform, config.fpk_order)?;
    let mut prev_values: Option<Vec<ValueVector>> = None;
    let mut history = Vec::new();
    let all_states: Vec<usize> = (0..space.len()).collect();
    let blocks = space.components();

    for iteration in 1..=config.max_iters {
        let kernel = model.kernel(space, &guess);
        let (values, policies) = backward_sweep(&kernel, horizon, config.tie_break)?;
        let densities = forward_sweep(theta0, &policies, config.fpk_order)?;

        let density_change = guess
            .iter()
            .zip(&densities)
            .map(|(a, b)| max_diff(&a.0, &b.0))
            .fold(0.0, f64::max);
        let value_change = match &prev_values {
            Some(prev) => prev.iter().zip(&values).map(|(a, b)| max_diff(&a.0, &b.0)).fold(0.0, f64::max),
            None => f64::INFINITY,
        };
        history.push(IterationStats { iteration, value_change, density_change });

        let independent = !model.depends_on_density();
        let converged = independent || (density_change < config.tol && value_change < config.tol);
        if converged || iteration == config.max_iters {
            return Ok(MfgSolution { values, policies, densities, kernel, iterations: iteration, converged, history });
        }
        let damp = |guess: &mut [DensityVector], target: &[DensityVector], states: &[usize]| {
            for (g, d) in guess.iter_mut().zip(target) {
                for s in states {
                    g.0[*s] = (1.0 - config.damping) * g.0[*s] + config.damping * d.0[*s];
                }
            }
        };
        match config.update {
            UpdateOrder::Simultaneous => damp(&mut guess, &densities, &all_states),
            UpdateOrder::PerComponent => {
                for (b, block) in blocks.iter().enumerate() {
                    if b == 0 {
                        damp(&mut guess, &densities, block);
                    } else {
                        let kernel = model.kernel(space, &guess);
                        let (_, policies) = backward_sweep(&kernel, horizon, config.tie_break)?;
                        let target = forward_sweep(theta0, &policies, config.fpk_order)?;
                        damp(&mut guess, &target, block);
                    }
                }
            }
        }
        prev_values = Some(values);
    }
    unreachable!("loop returns on the last iteration")
}

/// Checks that no single-row deviation to a point mass improves any
/// state's average reward by more than `eps`, in every slot.
pub fn verify_nash(solution: &MfgSolution, kernel: &RewardKernel, eps: f64) -> bool {
    for (t, p) in solution.policies.iter().enumerate() {
        let v_next = &solution.values[t + 1];
        for s in 0..kernel.len() {
            let current = average_reward(s, p, kernel, v_next);
            for (target, r) in kernel.edges(s) {
                // a point-mass deviation q = e_target
                let deviation = r + v_next.0[*target];
                if deviation > current + eps {
                    return false;
                }
            }
        }
    }
    true
}
