use los_glm::diagnostics;
use los_glm::special::normal_cdf;
use los_glm_testkit::synthetic;
use rand_distr::{Distribution, StandardNormal};

const N: usize = 10_000;
const SEEDS: u64 = 200;

fn qq(seed: u64) -> diagnostics::QqData {
    let mut rng = synthetic::rng(seed);
    let sample: Vec<f64> = (0..N).map(|_| StandardNormal.sample(&mut rng)).collect();
    diagnostics::qq_data(&sample).unwrap()
}

/// Largest gap between the empirical and normal CDFs at the plotted points.
fn ks_deviation(q: &diagnostics::QqData) -> f64 {
    q.sample
        .iter()
        .enumerate()
        .map(|(i, s)| (normal_cdf(*s) - (i as f64 + 0.5) / N as f64).abs())
        .fold(0.0, f64::max)
}

#[test]
fn normal_samples_stay_inside_the_band() {
    let ok = (0..SEEDS)
        .filter(|&seed| ks_deviation(&qq(seed)) < 0.1)
        .count();
    let needed = (0.99 * SEEDS as f64).ceil() as usize;
    assert!(ok >= needed, "{ok}/{SEEDS}");
}

#[test]
fn theoretical_quantiles_invert_plotting_positions() {
    let q = qq(0);
    for (i, t) in q.theoretical.iter().enumerate() {
        let p = (i as f64 + 0.5) / N as f64;
        assert!((normal_cdf(*t) - p).abs() < 1e-9 * p.max(1e-3));
    }
}
