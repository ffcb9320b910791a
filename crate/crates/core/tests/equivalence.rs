use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfcmec_core::delay;
use sfcmec_core::mfg::{solve_mfg, verify_nash, CongestionKernel, MfgConfig, StateSpace, StaticKernel, TieBreak};
use sfcmec_core::oracle::{dp_values, enumerate_paths, optimal_placement, straight_line_delay, straight_line_objective};
use sfcmec_core::scenario::{paper_scenario, PaperTemplate, REFERENCE_BETA};
use sfcmec_core::topology::enumerate_feasible_placements;
use sfcmec_core::{PlacementMatrix, Topology};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn sample_feasible(t: &Topology, count: usize, seed: u64) -> Vec<PlacementMatrix> {
    let all: Vec<PlacementMatrix> = enumerate_feasible_placements(t, 1 << 20).unwrap().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| all[rng.random_range(0..all.len())].clone()).collect()
}

#[test]
fn delay_model_matches_straight_line_oracle() {
    let t = paper_scenario(PaperTemplate::default()).unwrap().topology;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for placement in sample_feasible(&t, 1000, 3) {
        let beta = rng.random_range(1e5..2e6);
        for k in t.chain_ids() {
            let d = delay::chain_delay(&t, &placement, k, beta).unwrap();
            let (p, x) = straight_line_delay(&t, &placement, k, beta).unwrap();
            assert!(rel_close(d.processing, p, 1e-12));
            assert!(rel_close(d.transmission, x, 1e-12));
            assert!(rel_close(d.total, p + x, 1e-12));
        }
        let a = delay::grid_objective(&t, &placement, &[beta]).unwrap();
        let b = straight_line_objective(&t, &placement, &[beta]).unwrap();
        assert!(rel_close(a, b, 1e-12));
    }
}

#[test]
fn oracle_optimum_is_minimal_over_samples() {
    let t = paper_scenario(PaperTemplate::default()).unwrap().topology;
    let best = optimal_placement(&t, &[REFERENCE_BETA], 1 << 20).unwrap();
    for placement in sample_feasible(&t, 500, 5) {
        assert!(delay::grid_objective(&t, &placement, &[REFERENCE_BETA]).unwrap() >= best.objective - 1e-9);
    }
}

#[test]
fn congestion_free_mfg_values_match_dp() {
    for (load, seed) in [(0.5, 2021), (0.2, 1), (0.7, 9)] {
        let t = paper_scenario(PaperTemplate { load, seed }).unwrap().topology;
        let space = StateSpace::for_topology(&t).unwrap();
        let model = CongestionKernel::congestion_free(&t, &space, REFERENCE_BETA).unwrap();
        let sol = solve_mfg(&space, &model, &space.source_density(), &MfgConfig::default()).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.iterations, 1);
        let dp = dp_values(&space, model.base());
        for s in 0..space.len() {
            assert!(rel_close(sol.values[0].0[s], dp.0[s], 1e-12), "state {s}");
        }
        assert!(verify_nash(&sol, &sol.kernel, 1e-6));
        for k in t.chain_ids() {
            let source = space.source_of(k).unwrap();
            let best = enumerate_paths(&space, model.base(), source).into_iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            assert!((best - dp.0[source]).abs() <= 1e-9);
        }
    }
}

#[test]
fn shifted_kernel_keeps_policy() {
    let t = paper_scenario(PaperTemplate::default()).unwrap().topology;
    let space = StateSpace::for_topology(&t).unwrap();
    let model = CongestionKernel::congestion_free(&t, &space, REFERENCE_BETA).unwrap();
    let base = solve_mfg(&space, &model, &space.source_density(), &MfgConfig::default()).unwrap();
    let c = 3.5;
    let shifted = StaticKernel(model.base().shifted(c));
    let moved = solve_mfg(&space, &shifted, &space.source_density(), &MfgConfig::default()).unwrap();
    assert_eq!(base.policies, moved.policies);
    let horizon = base.horizon() as f64;
    for s in 0..space.len() {
        assert!((moved.values[0].0[s] - base.values[0].0[s] - c * horizon).abs() <= 1e-9);
    }
}

#[test]
fn symmetric_nodes_split_evenly() {
    use sfcmec_core::{LinkCapacitySet, MecNode, ResourceVector, ServiceChain, VnfId, VnfSpec};
    let node = |name: &str| MecNode {
        name: name.into(),
        capacity: ResourceVector::new(10.0, 10.0, 10.0),
        processing_capacity: 1e6,
    };
    let t = Topology {
        nodes: vec![node("a"), node("b")],
        vnfs: vec![VnfSpec { name: "f".into(), demand: ResourceVector::new(1.0, 1.0, 1.0) }],
        chains: vec![ServiceChain { name: "c".into(), vnfs: vec![VnfId(0)] }],
        links: LinkCapacitySet::new(),
    };
    let space = StateSpace::for_topology(&t).unwrap();
    let model = CongestionKernel::congestion_free(&t, &space, REFERENCE_BETA).unwrap();
    let config = MfgConfig { tie_break: TieBreak::Uniform, ..MfgConfig::default() };
    let sol = solve_mfg(&space, &model, &space.source_density(), &config).unwrap();
    let last = sol.densities.last().unwrap();
    assert_eq!(last.0[1], 0.5);
    assert_eq!(last.0[2], 0.5);
    assert!(verify_nash(&sol, &sol.kernel, 1e-6));
}
