use sfcmec_core::workload::{generate_requests, WorkloadConfig};

fn config(seed: u64) -> WorkloadConfig {
    WorkloadConfig {
        packet_min: 100_000.0,
        packet_max: 2_000_000.0,
        arrival_rate: 2.0,
        horizon: 20_000,
        chain_weights: vec![0.5, 0.3, 0.2],
        timeouts: vec![500.0, 500.0, 800.0],
        seed,
    }
}

#[test]
fn arrival_mean_within_three_sigma() {
    for seed in [1, 2, 3] {
        let c = config(seed);
        let n = generate_requests(&c).unwrap().len() as f64;
        let mean = n / c.horizon as f64;
        let sigma = (c.arrival_rate / c.horizon as f64).sqrt();
        assert!((mean - c.arrival_rate).abs() < 3.0 * sigma, "seed {seed}: mean {mean}");
    }
}

#[test]
fn chain_frequencies_pass_chi_square() {
    let c = config(4);
    let requests = generate_requests(&c).unwrap();
    let mut counts = [0.0f64; 3];
    for r in &requests {
        counts[r.chain.0] += 1.0;
    }
    let n = requests.len() as f64;
    let chi2: f64 = counts.iter().zip(&c.chain_weights).map(|(o, w)| (o - n * w).powi(2) / (n * w)).sum();
    // two degrees of freedom, p = 0.001
    assert!(chi2 < 13.816, "chi2 = {chi2}");
}

#[test]
fn packet_sizes_uniform_in_range() {
    let c = config(5);
    let requests = generate_requests(&c).unwrap();
    assert!(requests.iter().all(|r| r.packet_size >= c.packet_min && r.packet_size <= c.packet_max));
    let n = requests.len() as f64;
    let mean = requests.iter().map(|r| r.packet_size).sum::<f64>() / n;
    let width = c.packet_max - c.packet_min;
    let sigma = width / 12f64.sqrt() / n.sqrt();
    assert!((mean - (c.packet_min + c.packet_max) / 2.0).abs() < 3.0 * sigma);
}

#[test]
fn timeouts_follow_chain() {
    let c = config(6);
    for r in generate_requests(&c).unwrap() {
        assert_eq!(r.timeout, c.timeouts[r.chain.0]);
        assert!(r.arrival_slot < c.horizon);
    }
}
