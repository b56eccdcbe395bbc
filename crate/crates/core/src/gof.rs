//! Chi-square goodness of fit for validating samplers against enumerated
//! laws.

use alloc::collections::BTreeMap;

use crate::count::CountVector;
use crate::law::DiscreteLaw;
use crate::math::{exp, ln};

/// `ln Gamma(k/2)` by recurrence from `Gamma(1) = 1` and
/// `Gamma(1/2) = sqrt(pi)`; covers every chi-square degree of freedom.
fn ln_gamma_half(two_a: u64) -> f64 {
    debug_assert!(two_a >= 1);
    let mut acc: f64;
    let mut z: f64;
    if two_a.is_multiple_of(2) {
        acc = 0.0;
        z = 1.0;
    } else {
        acc = 0.5 * ln(core::f64::consts::PI);
        z = 0.5;
    }
    while 2.0 * z < two_a as f64 {
        acc += ln(z);
        z += 1.0;
    }
    acc
}

/// Regularized lower incomplete gamma `P(a, x)` for `a = two_a / 2`:
/// series expansion below `a + 1`, Lentz continued fraction above.
pub fn reg_lower_gamma(two_a: u64, x: f64) -> f64 {
    let a = two_a as f64 / 2.0;
    if x <= 0.0 {
        return 0.0;
    }
    let log_prefix = -x + a * ln(x) - ln_gamma_half(two_a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut sum = 1.0 / a;
        let mut del = sum;
        for _ in 0..1000 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-15 {
                break;
            }
        }
        (sum * exp(log_prefix)).clamp(0.0, 1.0)
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1e300;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < 1e-300 {
                d = 1e-300;
            }
            c = b + an / c;
            if c.abs() < 1e-300 {
                c = 1e-300;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-15 {
                break;
            }
        }
        (1.0 - exp(log_prefix) * h).clamp(0.0, 1.0)
    }
}

/// Chi-square survival function `P(X > stat)` at `df` degrees of freedom.
pub fn chi_square_sf(stat: f64, df: u64) -> f64 {
    1.0 - reg_lower_gamma(df, stat / 2.0)
}

/// Goodness-of-fit p-value of a sample batch against a law.
///
/// Support points whose expected count falls below `min_expected` are
/// pooled with the law's tail into one residual bin; draws landing outside
/// the enumerated support count toward that bin as well.
pub fn gof_p_value(law: &DiscreteLaw, samples: &[CountVector], min_expected: f64) -> f64 {
    let draws = samples.len() as f64;
    let mut observed: BTreeMap<&CountVector, u64> = BTreeMap::new();
    for s in samples {
        *observed.entry(s).or_insert(0) += 1;
    }
    let mut stat = 0.0f64;
    let mut bins = 0u64;
    let mut pooled_expected = law.tail_mass() * draws;
    let mut pooled_observed = 0u64;
    let mut in_support = 0u64;
    for (k, logp) in law.iter() {
        let expected = exp(logp) * draws;
        let obs = observed.get(k).copied().unwrap_or(0);
        in_support += obs;
        if expected >= min_expected {
            let delta = obs as f64 - expected;
            stat += delta * delta / expected;
            bins += 1;
        } else {
            pooled_expected += expected;
            pooled_observed += obs;
        }
    }
    pooled_observed += samples.len() as u64 - in_support;
    if pooled_expected > 1.0 {
        let delta = pooled_observed as f64 - pooled_expected;
        stat += delta * delta / pooled_expected;
        bins += 1;
    }
    assert!(bins >= 2, "need at least two bins for a chi-square test");
    chi_square_sf(stat, bins - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incomplete_gamma_agrees_with_closed_form() {
        // df = 2: the chi-square CDF is 1 - e^{-x/2}.
        for x in [0.1f64, 1.0, 3.0, 10.0] {
            let got = reg_lower_gamma(2, x / 2.0);
            let want = 1.0 - (-x / 2.0f64).exp();
            assert!((got - want).abs() < 1e-12, "x = {x}: {got} vs {want}");
        }
    }

    #[test]
    fn survival_is_monotone_and_in_range() {
        let mut prev = 1.0;
        for i in 1..40 {
            let s = chi_square_sf(i as f64, 5);
            assert!((0.0..=1.0).contains(&s));
            assert!(s <= prev);
            prev = s;
        }
    }

    #[test]
    fn gamma_half_values() {
        // Gamma(1/2) = sqrt(pi), Gamma(3/2) = sqrt(pi)/2, Gamma(3) = 2.
        assert!((ln_gamma_half(1) - 0.5 * core::f64::consts::PI.ln()).abs() < 1e-14);
        assert!(
            (ln_gamma_half(3) - (0.5 * core::f64::consts::PI.ln() - 2.0f64.ln())).abs() < 1e-13
        );
        assert!((ln_gamma_half(6) - 2.0f64.ln()).abs() < 1e-14);
    }
}
