//! Chi-square goodness of fit for both samplers against their exact (or
//! certified-truncation) laws, plus moment identities; all fully
//! deterministic under fixed seeds.

use mih_core::gof;
use mih_core::mih::{enumerate_mih_support, sample_mih};
use mih_core::moments::moments_from_samples;
use mih_core::nm::{sample_nm, truncate_nm_support};
use mih_core::{CountVector, CounterRng, ModelParams, Ratio};

const DRAWS: usize = 100_000;
const ALPHA: f64 = 0.001;

fn r(n: u64, d: u64) -> Ratio {
    Ratio::new(n, d).unwrap()
}

#[test]
fn mih_sampler_gof_on_fixed_grid() {
    let grid = [
        (ModelParams::finite(4, 1, &[r(1, 2)]).unwrap(), 101u64),
        (
            ModelParams::finite(12, 2, &[r(1, 3), r(1, 4)]).unwrap(),
            202,
        ),
        (ModelParams::finite(20, 3, &[r(2, 5)]).unwrap(), 303),
        (ModelParams::finite(6, 2, &[r(1, 3), r(1, 3)]).unwrap(), 404),
    ];
    for (params, seed) in grid {
        let law = enumerate_mih_support(&params, 1 << 16).unwrap();
        let mut rng = CounterRng::new(seed);
        let samples: Vec<CountVector> = (0..DRAWS)
            .map(|_| sample_mih(&params, &mut rng).unwrap())
            .collect();
        let p = gof::gof_p_value(&law, &samples, 5.0);
        assert!(p > ALPHA, "seed {seed}: p-value {p}");
    }
}

#[test]
fn nm_sampler_gof_on_fixed_grid() {
    let grid = [
        (ModelParams::infinite(1, &[r(1, 2)]).unwrap(), 7u64),
        (ModelParams::infinite(2, &[r(3, 10), r(1, 5)]).unwrap(), 8),
        (ModelParams::infinite(3, &[r(2, 5)]).unwrap(), 9),
    ];
    for (params, seed) in grid {
        let law = truncate_nm_support(&params, 1e-12, 1 << 20).unwrap();
        let mut rng = CounterRng::new(seed);
        let samples: Vec<CountVector> = (0..DRAWS)
            .map(|_| sample_nm(&params, &mut rng).unwrap())
            .collect();
        let p = gof::gof_p_value(&law, &samples, 5.0);
        assert!(p > ALPHA, "seed {seed}: p-value {p}");
    }
}

#[test]
fn nm_univariate_tail_frequency_in_band() {
    // P(k = 3) = 1/8 at n = 2, p = 1/2.
    let params = ModelParams::infinite(2, &[r(1, 2)]).unwrap();
    let mut rng = CounterRng::new(42);
    let mut hits = 0u64;
    for _ in 0..DRAWS {
        if sample_nm(&params, &mut rng).unwrap().get(0) == 3 {
            hits += 1;
        }
    }
    let freq = hits as f64 / DRAWS as f64;
    let sigma = (0.125 * 0.875 / DRAWS as f64).sqrt();
    assert!((freq - 0.125).abs() < 3.0 * sigma, "freq = {freq}");
}

#[test]
fn nm_sample_mean_matches_mean_identity() {
    // Componentwise sample mean within 3 sigma of n p_i / q.
    let params = ModelParams::infinite(4, &[r(3, 10), r(1, 5)]).unwrap();
    let mut rng = CounterRng::new(2024);
    let samples: Vec<CountVector> = (0..DRAWS)
        .map(|_| sample_nm(&params, &mut rng).unwrap())
        .collect();
    let m = moments_from_samples(&samples).unwrap();
    for i in 0..2 {
        let ratio = params.weight_f64(i) / params.failure_weight_f64();
        let mean = 4.0 * ratio;
        let var = 4.0 * ratio * (1.0 + ratio);
        let band = 3.0 * (var / DRAWS as f64).sqrt();
        assert!(
            (m.mean[i] - mean).abs() < band,
            "coord {i}: {} vs {mean}",
            m.mean[i]
        );
    }
}

#[test]
fn samplers_are_deterministic_given_seed() {
    let params = ModelParams::finite(12, 2, &[r(1, 3), r(1, 4)]).unwrap();
    let draw = |seed: u64| -> Vec<CountVector> {
        let mut rng = CounterRng::new(seed);
        (0..200)
            .map(|_| sample_mih(&params, &mut rng).unwrap())
            .collect()
    };
    assert_eq!(draw(5), draw(5));
    assert_ne!(draw(5), draw(6));

    let nm_params = ModelParams::infinite(2, &[r(1, 2)]).unwrap();
    let draw_nm = |seed: u64| -> Vec<CountVector> {
        let mut rng = CounterRng::new(seed);
        (0..200)
            .map(|_| sample_nm(&nm_params, &mut rng).unwrap())
            .collect()
    };
    assert_eq!(draw_nm(11), draw_nm(11));
}

#[test]
fn split_streams_give_independent_reproducible_draws() {
    let params = ModelParams::finite(4, 1, &[r(1, 2)]).unwrap();
    let root = CounterRng::new(99);
    let mut a = root.split(0);
    let mut b = root.split(1);
    let da: Vec<CountVector> = (0..100)
        .map(|_| sample_mih(&params, &mut a).unwrap())
        .collect();
    let db: Vec<CountVector> = (0..100)
        .map(|_| sample_mih(&params, &mut b).unwrap())
        .collect();
    assert_ne!(da, db);
    let mut a2 = root.split(0);
    let da2: Vec<CountVector> = (0..100)
        .map(|_| sample_mih(&params, &mut a2).unwrap())
        .collect();
    assert_eq!(da, da2);
}
