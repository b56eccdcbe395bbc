//! Local expansion of the log-ratio between the finite-population law and
//! its infinite-population limit, with empirically checkable remainders.
//!
//! On the region `max_i k_i / p_i <= gamma N` the log-ratio admits an
//! expansion in powers of `1/N` whose first two brackets are explicit
//! polynomials in `k_+`, the counts and the weights (the failure coordinate
//! `k_{d+1} = n` is included in every sum). The third bracket is only known
//! up to a constant; [`ExpansionTerms::remainder_scale`] reports it with
//! constant one so the constant can be fitted from sweeps rather than
//! assumed.

use crate::count::CountVector;
use crate::error::{Error, Result};
use crate::math::KahanSum;
use crate::mih::finite_population_log_correction;
use crate::params::ModelParams;

/// Region parameter `gamma` for the expansion's domain of validity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionSpec {
    gamma: f64,
}

impl RegionSpec {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma < 1.0 {
            Ok(RegionSpec { gamma })
        } else {
            Err(Error::InvalidGamma(gamma))
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Default for RegionSpec {
    /// `gamma = 3/4`, the threshold used by the distance bounds.
    fn default() -> Self {
        RegionSpec { gamma: 0.75 }
    }
}

/// The evaluated expansion brackets at one support point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionTerms {
    /// The `1/N` bracket.
    pub first_order: f64,
    /// The `1/N^2` bracket.
    pub second_order: f64,
    /// The `1/N^3` bracket with unit constant.
    pub remainder_scale: f64,
    pub gamma: f64,
}

impl ExpansionTerms {
    /// Partial sum of the expansion up to `order` (0, 1 or 2).
    pub fn partial_sum(&self, order: usize) -> Result<f64> {
        match order {
            0 => Ok(0.0),
            1 => Ok(self.first_order),
            2 => Ok(self.first_order + self.second_order),
            o => Err(Error::InvalidOrder(o)),
        }
    }
}

/// Whether `k` lies in the region `max_{i<=d} k_i/p_i <= gamma N` (and in
/// the support).
pub fn in_region(params: &ModelParams, k: &CountVector, region: &RegionSpec) -> Result<bool> {
    let population = params.finite_population()?;
    if !params.support_contains(k)? {
        return Ok(false);
    }
    let bound = region.gamma * population as f64;
    for (i, &ki) in k.iter().enumerate() {
        if ki as f64 / params.weight_f64(i) > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Evaluates the three expansion brackets at `k`.
///
/// Requires the stricter parameter condition `n <= (1/2) N q` and `k` inside
/// the region; every sum runs over the `d` observed categories plus the
/// failure coordinate.
pub fn expansion_terms(
    params: &ModelParams,
    k: &CountVector,
    region: &RegionSpec,
) -> Result<ExpansionTerms> {
    params.require_half_bound()?;
    if !in_region(params, k, region)? {
        return Err(Error::OutOfRegion {
            gamma: region.gamma,
        });
    }
    let population = params.finite_population()? as f64;
    let k_plus = params.total_draws(k) as f64;

    // x^2/2 - x/2 and x^3/6 - x^2/4 + x/12, factored so both vanish exactly
    // at x = 0 and x = 1.
    let poly1 = |x: f64| x * (x - 1.0) / 2.0;
    let poly2 = |x: f64| x * (x - 1.0) * (2.0 * x - 1.0) / 12.0;

    let mut first = KahanSum::new();
    let mut second = KahanSum::new();
    let mut remainder = KahanSum::new();
    first.add(poly1(k_plus));
    second.add(poly2(k_plus));
    remainder.add(k_plus * k_plus * k_plus * k_plus);

    let mut coordinate = |ki: f64, p: f64| {
        first.add(-poly1(ki) / p);
        second.add(-poly2(ki) / (p * p));
        remainder.add(ki * ki * ki * ki / (p * p * p) + ki * ki / (p * p));
    };
    for (i, &ki) in k.iter().enumerate() {
        coordinate(ki as f64, params.weight_f64(i));
    }
    coordinate(params.failure_target() as f64, params.failure_weight_f64());

    Ok(ExpansionTerms {
        first_order: first.value() / population,
        second_order: second.value() / (population * population),
        remainder_scale: remainder.value() / (population * population * population),
        gamma: region.gamma,
    })
}

/// The exact log-ratio `ln(P(k)/Q(k))`, the oracle every residual is
/// measured against.
///
/// Computed directly from the finite-population correction, which equals
/// `mih_log_pmf - nm_log_pmf` algebraically but avoids the cancellation of
/// two O(1) log-masses, keeping the value accurate to a few ulps.
pub fn exact_log_ratio(params: &ModelParams, k: &CountVector) -> Result<f64> {
    if !params.support_contains(k)? {
        return Err(Error::OutOfSupport);
    }
    finite_population_log_correction(params, k)
}

/// Residual of the expansion truncated at `order` against the exact
/// log-ratio; order 0 returns the exact log-ratio itself.
pub fn expansion_residual(
    params: &ModelParams,
    k: &CountVector,
    region: &RegionSpec,
    order: usize,
) -> Result<f64> {
    if order > 2 {
        return Err(Error::InvalidOrder(order));
    }
    let exact = exact_log_ratio(params, k)?;
    if order == 0 {
        if !in_region(params, k, region)? {
            return Err(Error::OutOfRegion {
                gamma: region.gamma,
            });
        }
        return Ok(exact);
    }
    let terms = expansion_terms(params, k, region)?;
    Ok(exact - terms.partial_sum(order)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::ln;
    use crate::mih::mih_log_pmf;
    use crate::nm::nm_log_pmf;
    use crate::params::Ratio;
    use alloc::vec;
    use alloc::vec::Vec;

    fn r(n: u64, d: u64) -> Ratio {
        Ratio::new(n, d).unwrap()
    }

    fn kv(v: Vec<u64>) -> CountVector {
        CountVector::new(v)
    }

    #[test]
    fn region_examples() {
        let region = RegionSpec::new(0.5).unwrap();
        let params = ModelParams::finite(100, 1, &[r(1, 2)]).unwrap();
        // k/p = 60 > gamma N = 50.
        assert!(!in_region(&params, &kv(vec![30]), &region).unwrap());
        // k/p = 40 <= 50.
        assert!(in_region(&params, &kv(vec![20]), &region).unwrap());
        // The zero vector is always inside.
        assert!(in_region(&params, &kv(vec![0]), &region).unwrap());
    }

    #[test]
    fn brackets_vanish_at_zero_counts_with_single_failure() {
        // k = 0, n = 1: both polynomials vanish at 0 and 1, and the
        // remainder keeps the failure-coordinate contribution.
        let params = ModelParams::finite(50, 1, &[r(1, 5)]).unwrap();
        let terms = expansion_terms(&params, &kv(vec![0]), &RegionSpec::default()).unwrap();
        assert_eq!(terms.first_order, 0.0);
        assert_eq!(terms.second_order, 0.0);
        let q = 0.8f64;
        let n3 = 50f64.powi(3);
        let expect = (1.0 + 1.0 / (q * q * q) + 1.0 / (q * q)) / n3;
        assert!((terms.remainder_scale - expect).abs() < 1e-15);
    }

    #[test]
    fn first_order_hand_value() {
        // N=100, n=2, p=1/2, k=2: bracket = (8-2) - 2(2-1) - 2(2-1) = 2.
        let params = ModelParams::finite(100, 2, &[r(1, 2)]).unwrap();
        let terms = expansion_terms(&params, &kv(vec![2]), &RegionSpec::default()).unwrap();
        assert!((terms.first_order - 0.02).abs() < 1e-15);
        // Second bracket by hand: (64/6 - 4 + 1/3) - 4(8/6 - 1 + 1/6) - 4(8/6 - 1 + 1/6).
        let expect = ((64.0 / 6.0 - 4.0 + 1.0 / 3.0) - 8.0 * (8.0 / 6.0 - 1.0 + 1.0 / 6.0)) / 1e4;
        assert!((terms.second_order - expect).abs() < 1e-15);
    }

    #[test]
    fn exact_log_ratio_trivial_and_hand_values() {
        // k = 0, n = 1: P(0) = q = Q(0); the generic path reproduces zero
        // up to f64 rounding.
        for &(pop, num, den) in &[(4u64, 1u64, 2u64), (30, 1, 5), (128, 1, 2)] {
            let params = ModelParams::finite(pop, 1, &[r(num, den)]).unwrap();
            let v = exact_log_ratio(&params, &kv(vec![0])).unwrap();
            assert!(v.abs() < 1e-13, "N={pop}: {v}");
        }
        // N=4, n=1, p=1/2: ln((1/6)/(1/8)) and ln((1/3)/(1/4)).
        let params = ModelParams::finite(4, 1, &[r(1, 2)]).unwrap();
        let v2 = exact_log_ratio(&params, &kv(vec![2])).unwrap();
        let v1 = exact_log_ratio(&params, &kv(vec![1])).unwrap();
        assert!((v2 - ln(4.0 / 3.0)).abs() < 1e-14);
        assert!((v1 - ln(4.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn exact_log_ratio_agrees_with_pmf_difference() {
        let params = ModelParams::finite(60, 2, &[r(1, 3), r(1, 5)]).unwrap();
        for k in [kv(vec![0, 0]), kv(vec![3, 2]), kv(vec![7, 1])] {
            let direct = exact_log_ratio(&params, &k).unwrap();
            let diff = mih_log_pmf(&params, &k).unwrap().finite().unwrap()
                - nm_log_pmf(&params, &k).unwrap();
            assert!((direct - diff).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_at_zero_with_single_failure_is_zero() {
        let params = ModelParams::finite(40, 1, &[r(1, 2)]).unwrap();
        let v = expansion_residual(&params, &kv(vec![0]), &RegionSpec::default(), 2).unwrap();
        assert!(v.abs() < 1e-13);
    }

    #[test]
    fn out_of_region_is_an_error() {
        let params = ModelParams::finite(100, 2, &[r(1, 2)]).unwrap();
        let tight = RegionSpec::new(0.05).unwrap();
        assert!(matches!(
            expansion_terms(&params, &kv(vec![40]), &tight),
            Err(Error::OutOfRegion { .. })
        ));
    }

    #[test]
    fn half_bound_is_enforced() {
        // n = 2 = N q violates n <= (1/2) N q.
        let params = ModelParams::finite(4, 2, &[r(1, 2)]).unwrap();
        assert!(matches!(
            expansion_terms(&params, &kv(vec![0]), &RegionSpec::default()),
            Err(Error::HalfFailureBoundViolated { .. })
        ));
    }

    #[test]
    fn residual_shrinks_with_population_growth() {
        // Same (n, p, k) across a doubling N-sweep: order-1 residuals fall
        // roughly fourfold per doubling, order-2 roughly eightfold.
        let region = RegionSpec::default();
        let mut prev1 = f64::INFINITY;
        let mut prev2 = f64::INFINITY;
        for &pop in &[64u64, 128, 256, 512] {
            let params = ModelParams::finite(pop, 2, &[r(1, 2)]).unwrap();
            let r1 = expansion_residual(&params, &kv(vec![2]), &region, 1)
                .unwrap()
                .abs();
            let r2 = expansion_residual(&params, &kv(vec![2]), &region, 2)
                .unwrap()
                .abs();
            assert!(r1 < prev1 / 3.0, "order-1 decay too slow at N={pop}");
            assert!(r2 < prev2 / 6.0, "order-2 decay too slow at N={pop}");
            prev1 = r1;
            prev2 = r2;
        }
    }
}
