//! Independent oracles for the exact laws.
//!
//! The urn oracle enumerates every draw order of the sequential experiment
//! in exact rational arithmetic; the factorial oracle extracts `ln(m!)` from
//! an exact big-integer factorial. Neither shares a code path with the
//! implementations they check.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use mih_core::mih::{enumerate_mih_support, mih_log_pmf};
use mih_core::nm::nm_log_pmf;
use mih_core::{CountVector, ModelParams, Ratio};

/// Exact law of the stopped urn by recursion over every draw order.
///
/// State: objects left per observed category, failures left, failures still
/// needed. Probabilities stay `BigRational` throughout.
fn urn_law_by_draw_orders(
    category_objects: &[u64],
    failure_objects: u64,
    failures_needed: u64,
) -> BTreeMap<Vec<u64>, BigRational> {
    fn recurse(
        remaining: &mut Vec<u64>,
        failures_left: u64,
        needed: u64,
        drawn: &mut Vec<u64>,
        prob: BigRational,
        out: &mut BTreeMap<Vec<u64>, BigRational>,
    ) {
        if needed == 0 {
            *out.entry(drawn.clone()).or_insert_with(BigRational::zero) += prob;
            return;
        }
        let total: u64 = remaining.iter().sum::<u64>() + failures_left;
        for i in 0..remaining.len() {
            if remaining[i] > 0 {
                let p = prob.clone() * BigRational::new(remaining[i].into(), total.into());
                remaining[i] -= 1;
                drawn[i] += 1;
                recurse(remaining, failures_left, needed, drawn, p, out);
                drawn[i] -= 1;
                remaining[i] += 1;
            }
        }
        if failures_left > 0 {
            let p = prob.clone() * BigRational::new(failures_left.into(), total.into());
            recurse(remaining, failures_left - 1, needed - 1, drawn, p, out);
        }
    }
    let mut out = BTreeMap::new();
    let mut remaining = category_objects.to_vec();
    let mut drawn = vec![0u64; category_objects.len()];
    recurse(
        &mut remaining,
        failure_objects,
        failures_needed,
        &mut drawn,
        BigRational::one(),
        &mut out,
    );
    out
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational in f64 range")
}

#[test]
fn urn_oracle_four_object_case() {
    let oracle = urn_law_by_draw_orders(&[2], 2, 1);
    assert_eq!(rational_to_f64(&oracle[&vec![0]]), 0.5);
    assert!((rational_to_f64(&oracle[&vec![1]]) - 1.0 / 3.0).abs() < 1e-15);
    assert!((rational_to_f64(&oracle[&vec![2]]) - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn pmf_matches_urn_oracle_on_univariate_grid() {
    for (population, n, num, den) in [
        (4u64, 1u64, 1u64, 2u64),
        (6, 2, 1, 3),
        (8, 3, 1, 4),
        (10, 2, 2, 5),
        (9, 4, 1, 3),
    ] {
        let params = ModelParams::finite(population, n, &[Ratio::new(num, den).unwrap()]).unwrap();
        let objects = params.category_count(0).unwrap();
        let oracle = urn_law_by_draw_orders(&[objects], params.failure_count().unwrap(), n);
        let mut total = BigRational::zero();
        for (k, prob) in &oracle {
            let got = mih_log_pmf(&params, &CountVector::new(k.clone()))
                .unwrap()
                .finite()
                .expect("in support");
            let want = rational_to_f64(prob).ln();
            assert!(
                (got - want).abs() < 1e-12,
                "N={population} n={n} k={k:?}: {got} vs {want}"
            );
            total += prob.clone();
        }
        assert!(total.is_one(), "oracle masses must sum to one exactly");
    }
}

#[test]
fn pmf_matches_urn_oracle_bivariate() {
    // N=6, n=2, p=(1/3,1/3): the nine-point law.
    let params = ModelParams::finite(
        6,
        2,
        &[Ratio::new(1, 3).unwrap(), Ratio::new(1, 3).unwrap()],
    )
    .unwrap();
    let oracle = urn_law_by_draw_orders(&[2, 2], 2, 2);
    assert_eq!(oracle.len(), 9);
    let law = enumerate_mih_support(&params, 1024).unwrap();
    assert_eq!(law.len(), 9);
    for (k, prob) in &oracle {
        let got = law.mass(&CountVector::new(k.clone()));
        let want = rational_to_f64(prob);
        assert!((got - want).abs() < 1e-13, "k={k:?}: {got} vs {want}");
    }
}

/// `ln(m!)` from the exact big-integer factorial: take the top 64 bits of
/// the mantissa and add the discarded power of two.
fn ln_factorial_oracle(m: u64) -> f64 {
    let mut fact = BigUint::one();
    for j in 2..=m {
        fact *= BigUint::from(j);
    }
    let bits = fact.bits();
    if bits <= 53 {
        return fact.to_f64().unwrap().ln();
    }
    let shift = bits - 53;
    let top: BigUint = fact >> shift;
    (top.to_f64().unwrap()).ln() + shift as f64 * std::f64::consts::LN_2
}

#[test]
fn log_factorial_against_big_integer_oracle() {
    use mih_core::logfact::log_factorial;
    for m in [5u64, 20, 100, 170, 200, 255, 256, 300, 500, 1000, 5000] {
        let got = log_factorial(m);
        let want = ln_factorial_oracle(m);
        // The oracle's own rounding is ~eps * ln(m!); allow 1e-12 absolute
        // plus that relative floor.
        let tol = 1e-12 + 4.0 * f64::EPSILON * want.abs();
        assert!((got - want).abs() < tol, "m={m}: {got} vs {want}");
    }
}

#[test]
fn nm_pmf_against_direct_rational_evaluation() {
    // Q(k) = Gamma(k+n)/(Gamma(n) k!) p^k q^n for d=1 via exact rationals.
    let params = ModelParams::infinite(3, &[Ratio::new(2, 5).unwrap()]).unwrap();
    for k in 0u64..40 {
        // Gamma(k+3)/Gamma(3)/k! = (k+1)(k+2)/2.
        let comb = BigRational::from_integer(((k + 1) * (k + 2) / 2).into());
        let p = BigRational::new(2.into(), 5.into());
        let q = BigRational::new(3.into(), 5.into());
        let mut mass = comb;
        for _ in 0..k {
            mass *= p.clone();
        }
        for _ in 0..3 {
            mass *= q.clone();
        }
        let got = nm_log_pmf(&params, &CountVector::new(vec![k])).unwrap();
        let want = rational_to_f64(&mass).ln();
        assert!((got - want).abs() < 1e-12, "k={k}: {got} vs {want}");
    }
}

/// Exact factorial as a big integer.
fn big_factorial(m: u64) -> BigUint {
    let mut fact = BigUint::one();
    for j in 2..=m {
        fact *= BigUint::from(j);
    }
    fact
}

/// Direct rational-arithmetic evaluation of the finite-population mass
/// formula: `(k_+ - 1)! (N - k_+)! / N! * (Nq)! / ((n-1)! (Nq - n)!) *
/// prod (Np_i)! / (k_i! (Np_i - k_i)!)`.
fn mass_by_rational_factorials(params: &ModelParams, k: &[u64]) -> BigRational {
    let population = params.finite_population().unwrap();
    let n = params.failure_target();
    let k_plus = n + k.iter().sum::<u64>();
    let failure_objects = params.failure_count().unwrap();
    let big = |m: u64| BigRational::from_integer(big_factorial(m).into());
    let mut mass = big(k_plus - 1) * big(population - k_plus) / big(population);
    mass *= big(failure_objects) / (big(n - 1) * big(failure_objects - n));
    for (i, &ki) in k.iter().enumerate() {
        let objects = params.category_count(i).unwrap();
        mass *= big(objects) / (big(ki) * big(objects - ki));
    }
    mass
}

#[test]
fn pmf_matches_rational_factorial_formula() {
    // Degenerate-limit equivalence: the log-space evaluation agrees with
    // exact rational factorial arithmetic to 1e-10 relative error.
    for (population, n, num, den) in [
        (4u64, 1u64, 1u64, 2u64),
        (20, 3, 2, 5),
        (60, 4, 1, 5),
        (128, 8, 1, 2),
        (90, 5, 1, 3),
    ] {
        let params = ModelParams::finite(population, n, &[Ratio::new(num, den).unwrap()]).unwrap();
        let objects = params.category_count(0).unwrap();
        for ki in [0u64, 1, objects / 2, objects] {
            let got = mih_log_pmf(&params, &CountVector::new(vec![ki]))
                .unwrap()
                .finite()
                .unwrap()
                .exp();
            let want = rational_to_f64(&mass_by_rational_factorials(&params, &[ki]));
            assert!(
                (got - want).abs() <= 1e-10 * want,
                "N={population} n={n} k={ki}: {got} vs {want}"
            );
        }
    }
    // A bivariate case exercises the product over categories.
    let params = ModelParams::finite(
        40,
        3,
        &[Ratio::new(3, 10).unwrap(), Ratio::new(1, 5).unwrap()],
    )
    .unwrap();
    for k in [[0u64, 0u64], [5, 3], [12, 8], [2, 7]] {
        let got = mih_log_pmf(&params, &CountVector::new(k.to_vec()))
            .unwrap()
            .finite()
            .unwrap()
            .exp();
        let want = rational_to_f64(&mass_by_rational_factorials(&params, &k));
        assert!(
            (got - want).abs() <= 1e-10 * want,
            "k={k:?}: {got} vs {want}"
        );
    }
}
