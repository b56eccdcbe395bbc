//! Dense-grid oracles for the quadrature distances and refinement
//! invariants for their error estimates.

use mih_core::kernels::{
    deficiency_upper_bound_pq, deficiency_upper_bound_qp, normal_family_spec, ExperimentFamily,
    FamilyKind,
};
use mih_core::metrics::{hellinger_jittered_vs_normal, JitteredLaw};
use mih_core::mih::enumerate_mih_support;
use mih_core::normal::NormalSpec;
use mih_core::quadrature::QuadratureSpec;
use mih_core::{CountVector, DiscreteLaw, ModelParams, Ratio};

fn r(s: &str) -> Ratio {
    s.parse().unwrap()
}

/// Midpoint-rule total variation between a jittered law and a normal
/// density, on a dense one-dimensional grid.
fn dense_tv_oracle(law: &DiscreteLaw, g: &NormalSpec, step: f64) -> f64 {
    let max_k = law.support_max()[0] as f64;
    let lo = (g.mean()[0] - 12.0 * g.marginal_sd(0)).min(-0.5);
    let hi = (g.mean()[0] + 12.0 * g.marginal_sd(0)).max(max_k + 0.5);
    let cells = ((hi - lo) / step).ceil() as usize;
    let mut acc = 0.0;
    for i in 0..cells {
        let x = lo + (i as f64 + 0.5) * step;
        let k = x.round();
        let mass = if k >= 0.0 {
            law.mass(&CountVector::new(vec![k as u64]))
        } else {
            0.0
        };
        acc += (mass - g.pdf(&[x])).abs() * step;
    }
    0.5 * acc
}

#[test]
fn jitter_direction_bound_matches_dense_grid_oracle() {
    // N = 1e4, n = 25, p = 2/5: the bound is finite, below one, and agrees
    // with a dense Riemann evaluation to 1e-4.
    let params = ModelParams::finite(10_000, 25, &[r("2/5")]).unwrap();
    let family = ExperimentFamily::new(FamilyKind::NormalQ, 0.2).unwrap();
    let quad = QuadratureSpec::with_nodes(16);
    let report = deficiency_upper_bound_pq(&params, &family, &quad, 1 << 21).unwrap();
    assert!(report.upper_bound > 0.0 && report.upper_bound < 1.0);

    let law = enumerate_mih_support(&params, 1 << 21).unwrap();
    let g = normal_family_spec(&params, FamilyKind::NormalQ).unwrap();
    let oracle = dense_tv_oracle(&law, &g, 1e-3);
    assert!(
        (report.upper_bound - oracle).abs() < 1e-4,
        "{} vs oracle {oracle}",
        report.upper_bound
    );
}

#[test]
fn rounding_direction_bound_matches_riemann_cell_masses() {
    // Rounded-normal cell masses recomputed by Riemann integration of the
    // density, then the same half-L1 sum.
    let params = ModelParams::finite(1_000, 9, &[r("3/10")]).unwrap();
    let family = ExperimentFamily::new(FamilyKind::NormalQ, 0.2).unwrap();
    let quad = QuadratureSpec::with_nodes(16);
    let report = deficiency_upper_bound_qp(&params, &family, &quad, 1 << 21).unwrap();

    let law = enumerate_mih_support(&params, 1 << 21).unwrap();
    let g = normal_family_spec(&params, FamilyKind::NormalQ).unwrap();
    let steps_per_cell = 2000;
    let window = (g.mean()[0] + 10.0 * g.marginal_sd(0)).ceil() as i64;
    let mut acc = 0.0;
    let mut covered = 0.0;
    for k in 0..=window.max(law.support_max()[0] as i64) {
        let mut cell_mass = 0.0;
        for s in 0..steps_per_cell {
            let x = k as f64 - 0.5 + (s as f64 + 0.5) / steps_per_cell as f64;
            cell_mass += g.pdf(&[x]) / steps_per_cell as f64;
        }
        covered += cell_mass;
        let a = law.mass(&CountVector::new(vec![k as u64]));
        acc += (a - cell_mass).abs();
    }
    // Mass the window misses (negative axis and far right) transfers whole.
    let oracle = 0.5 * (acc + (1.0 - covered).max(0.0));
    assert!(
        (report.upper_bound - oracle).abs() < 1e-4,
        "{} vs oracle {oracle}",
        report.upper_bound
    );
}

#[test]
fn hellinger_vs_normal_stable_under_tenfold_refinement() {
    let params = ModelParams::finite(400, 20, &[r("1/2")]).unwrap();
    let law = enumerate_mih_support(&params, 1 << 20).unwrap();
    let g = normal_family_spec(&params, FamilyKind::NormalQ).unwrap();
    let j = JitteredLaw::new(law);
    let coarse = hellinger_jittered_vs_normal(&j, &g, &QuadratureSpec::with_nodes(16)).unwrap();
    let fine = hellinger_jittered_vs_normal(&j, &g, &QuadratureSpec::with_nodes(160)).unwrap();
    assert!(
        (coarse.value - fine.value).abs() < 1e-6,
        "{} vs {} at 10x resolution",
        coarse.value,
        fine.value
    );
}

#[test]
fn doubling_resolution_stays_within_reported_error() {
    let params = ModelParams::finite(1_000, 9, &[r("3/10")]).unwrap();
    let law = enumerate_mih_support(&params, 1 << 20).unwrap();
    let g = normal_family_spec(&params, FamilyKind::NormalQ).unwrap();
    let j = JitteredLaw::new(law);
    for nodes in [8usize, 16, 32] {
        let base =
            hellinger_jittered_vs_normal(&j, &g, &QuadratureSpec::with_nodes(nodes)).unwrap();
        let doubled =
            hellinger_jittered_vs_normal(&j, &g, &QuadratureSpec::with_nodes(2 * nodes)).unwrap();
        assert!(
            (doubled.value - base.value).abs() <= base.error_estimate,
            "nodes {nodes}: delta {} vs estimate {}",
            (doubled.value - base.value).abs(),
            base.error_estimate
        );
    }
}

#[test]
fn certification_gate_rejects_coarse_resolution() {
    let params = ModelParams::finite(400, 20, &[r("1/2")]).unwrap();
    let law = enumerate_mih_support(&params, 1 << 20).unwrap();
    let g = normal_family_spec(&params, FamilyKind::NormalQ).unwrap();
    let j = JitteredLaw::new(law);
    let strict = QuadratureSpec {
        nodes_per_axis: 16,
        certify_tolerance: Some(1e-30),
    };
    assert!(matches!(
        hellinger_jittered_vs_normal(&j, &g, &strict),
        Err(mih_core::Error::ResolutionTooCoarse { .. })
    ));
}
