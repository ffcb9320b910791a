//! Genetic-algorithm baseline: one gene per chain slot holding a node id.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{delay, Error, NodeId, PlacementMatrix, ResourceVector, Result, Topology};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chromosome {
    /// Node per `(chain, position)` slot, chain-major.
    pub genes: Vec<NodeId>,
}

impl Chromosome {
    pub fn decode(&self, topology: &Topology) -> Result<PlacementMatrix> {
        PlacementMatrix::from_slots(topology, &self.genes)
    }

    pub fn random<R: Rng>(topology: &Topology, rng: &mut R) -> Self {
        let n = topology.nodes.len();
        Self { genes: (0..topology.slot_count()).map(|_| NodeId(rng.random_range(0..n))).collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    /// Fitness lost per unit of relative capacity overflow.
    pub infeasibility_penalty: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 200,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            tournament_size: 3,
            infeasibility_penalty: 1e4,
            seed: 0,
        }
    }
}

impl GaConfig {
    fn validate(&self) -> Result<()> {
        let rates = (0.0..=1.0).contains(&self.crossover_rate) && (0.0..=1.0).contains(&self.mutation_rate);
        if !rates || self.population_size == 0 || self.tournament_size == 0 || !(self.infeasibility_penalty >= 0.0) {
            return Err(Error::Config("ga: rates must lie in [0, 1] and sizes be >= 1".into()));
        }
        Ok(())
    }
}

/// Scores chromosomes against one scenario and packet-size grid.
#[derive(Debug, Clone)]
pub struct FitnessModel<'a> {
    topology: &'a Topology,
    betas: Vec<f64>,
    penalty: f64,
    /// Upper bound on any complete placement's objective; subtracting it
    /// puts every infeasible chromosome below every feasible one.
    objective_bound: f64,
}

impl<'a> FitnessModel<'a> {
    pub fn new(topology: &'a Topology, betas: &[f64], penalty: f64) -> Self {
        let mut bound = 0.0;
        for beta in betas {
            for chain in &topology.chains {
                for (p, j) in chain.vnfs.iter().enumerate() {
                    let d = topology.vnfs[j.0].demand;
                    let slowest = topology.nodes.iter().map(|n| n.processing_capacity).fold(f64::INFINITY, f64::min);
                    bound += d.compute * beta / slowest;
                    if p + 1 < chain.len() {
                        let narrowest = topology
                            .links
                            .allocations()
                            .filter(|(h, _)| h.from_vnf == *j && h.to_vnf == chain.vnfs[p + 1])
                            .map(|(_, l)| l)
                            .fold(f64::INFINITY, f64::min);
                        if narrowest.is_finite() {
                            bound += d.transmission * beta / narrowest;
                        }
                    }
                }
            }
        }
        Self { topology, betas: betas.to_vec(), penalty, objective_bound: bound }
    }

    /// Σ over nodes of relative capacity overflow, plus one per cross-node
    /// hop without a link allocation.
    pub fn violation(&self, chromosome: &Chromosome) -> f64 {
        let t = self.topology;
        let mut loads = alloc::vec![ResourceVector::ZERO; t.nodes.len()];
        let mut missing = 0.0;
        let mut slot = 0;
        for chain in &t.chains {
            for (p, j) in chain.vnfs.iter().enumerate() {
                let node = chromosome.genes[slot];
                loads[node.0] += t.vnfs[j.0].demand;
                if p > 0 {
                    let from = chromosome.genes[slot - 1];
                    let hop = crate::topology::Hop { from_node: from, from_vnf: chain.vnfs[p - 1], to_node: node, to_vnf: *j };
                    if from != node && t.links.allocation(&hop).is_none() {
                        missing += 1.0;
                    }
                }
                slot += 1;
            }
        }
        let overflow: f64 = loads.iter().zip(&t.nodes).map(|(l, n)| l.relative_overflow(&n.capacity)).sum();
        overflow + missing
    }

    /// Objective with hops lacking a link allocation charged nothing.
    fn clamped_objective(&self, chromosome: &Chromosome) -> Result<f64> {
        let placement = chromosome.decode(self.topology)?;
        let mut total = 0.0;
        for beta in &self.betas {
            for chain in self.topology.chain_ids() {
                total += delay::total_processing_delay(self.topology, &placement, chain, *beta)?;
                let vnfs = &self.topology.chains[chain.0].vnfs;
                for (p, pair) in vnfs.windows(2).enumerate() {
                    let (from, to) = (chromosome.genes[self.slot(chain.0, p)], chromosome.genes[self.slot(chain.0, p + 1)]);
                    match delay::transmission_delay(self.topology, &placement, from, to, pair[0], pair[1], chain, *beta) {
                        Ok(d) => total += d,
                        Err(Error::MissingLinkAllocation(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Ok(total)
    }

    fn slot(&self, chain: usize, position: usize) -> usize {
        self.topology.chains[..chain].iter().map(|c| c.len()).sum::<usize>() + position
    }

    /// `−objective` when feasible; otherwise
    /// `−(objective + bound + penalty × violation)`.
    pub fn fitness(&self, chromosome: &Chromosome) -> Result<f64> {
        let objective = self.clamped_objective(chromosome)?;
        let violation = self.violation(chromosome);
        if violation == 0.0 {
            Ok(-objective)
        } else {
            Ok(-(objective + self.objective_bound + self.penalty * violation))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub best: Chromosome,
    pub best_fitness: f64,
    /// Generation 0 is the random initial population.
    pub history: Vec<GenerationStats>,
}

fn tournament<'p, R: Rng>(scored: &'p [(Chromosome, f64)], size: usize, rng: &mut R) -> &'p Chromosome {
    let mut best = &scored[rng.random_range(0..scored.len())];
    for _ in 1..size {
        let c = &scored[rng.random_range(0..scored.len())];
        if c.1 > best.1 {
            best = c;
        }
    }
    &best.0
}

/// Tournament selection, single-point crossover, per-gene uniform mutation
/// and an elite of one. Returns the best chromosome ever seen.
pub fn evolve(config: &GaConfig, topology: &Topology, betas: &[f64]) -> Result<Evolution> {
    config.validate()?;
    if topology.nodes.is_empty() || topology.slot_count() == 0 {
        return Err(Error::Config("ga: nothing to place".into()));
    }
    let model = FitnessModel::new(topology, betas, config.infeasibility_penalty);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_nodes = topology.nodes.len();
    let n_genes = topology.slot_count();

    let score = |pop: Vec<Chromosome>| -> Result<Vec<(Chromosome, f64)>> {
        pop.into_iter().map(|c| model.fitness(&c).map(|f| (c, f))).collect()
    };
    let stats = |generation: usize, scored: &[(Chromosome, f64)]| GenerationStats {
        generation,
        best: scored.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max),
        mean: scored.iter().map(|s| s.1).sum::<f64>() / scored.len() as f64,
    };
    let fittest = |scored: &[(Chromosome, f64)]| -> (Chromosome, f64) {
        // first maximum in population order
        let mut best = &scored[0];
        for s in &scored[1..] {
            if s.1 > best.1 {
                best = s;
            }
        }
        best.clone()
    };

    let initial = (0..config.population_size).map(|_| Chromosome::random(topology, &mut rng)).collect();
    let mut scored = score(initial)?;
    let mut history = alloc::vec![stats(0, &scored)];
    let (mut best, mut best_fitness) = fittest(&scored);

    for generation in 1..=config.generations {
        let mut next = Vec::with_capacity(config.population_size);
        next.push(best.clone());
        while next.len() < config.population_size {
            let a = tournament(&scored, config.tournament_size, &mut rng);
            let b = tournament(&scored, config.tournament_size, &mut rng);
            let (mut x, mut y) = (a.clone(), b.clone());
            if n_genes > 1 && rng.random::<f64>() < config.crossover_rate {
                let cut = rng.random_range(1..n_genes);
                x.genes[cut..].copy_from_slice(&b.genes[cut..]);
                y.genes[cut..].copy_from_slice(&a.genes[cut..]);
            }
            for child in [&mut x, &mut y] {
                for gene in child.genes.iter_mut() {
                    if rng.random::<f64>() < config.mutation_rate {
                        *gene = NodeId(rng.random_range(0..n_nodes));
                    }
                }
            }
            next.push(x);
            if next.len() < config.population_size {
                next.push(y);
            }
        }
        scored = score(next)?;
        let (cand, fit) = fittest(&scored);
        if fit > best_fitness {
            best = cand;
            best_fitness = fit;
        }
        history.push(GenerationStats { best: best_fitness, ..stats(generation, &scored) });
    }
    Ok(Evolution { best, best_fitness, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{paper_scenario, PaperTemplate, REFERENCE_BETA};

    #[test]
    fn same_placement_same_fitness() {
        let s = paper_scenario(PaperTemplate::default()).unwrap();
        let model = FitnessModel::new(&s.topology, &[REFERENCE_BETA], 1e4);
        let c = Chromosome { genes: alloc::vec![NodeId(1); 10] };
        assert_eq!(model.fitness(&c).unwrap(), model.fitness(&c.clone()).unwrap());
    }

    #[test]
    fn zero_generations_is_best_initial() {
        let s = paper_scenario(PaperTemplate::default()).unwrap();
        let cfg = GaConfig { generations: 0, seed: 4, ..GaConfig::default() };
        let evo = evolve(&cfg, &s.topology, &[REFERENCE_BETA]).unwrap();
        assert_eq!(evo.history.len(), 1);
        assert_eq!(evo.best_fitness, evo.history[0].best);
    }

    #[test]
    fn rejects_bad_rates() {
        let s = paper_scenario(PaperTemplate::default()).unwrap();
        let cfg = GaConfig { mutation_rate: 1.5, ..GaConfig::default() };
        assert!(evolve(&cfg, &s.topology, &[REFERENCE_BETA]).is_err());
    }
}
