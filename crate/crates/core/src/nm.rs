//! The infinite-population limit: counts from sequential categorical trials
//! with replacement until the `n`-th failure.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::count::CountVector;
use crate::error::{Error, Result};
use crate::law::DiscreteLaw;
use crate::logfact::log_factorial;
use crate::math::{exp, ln, KahanSum};
use crate::params::ModelParams;
use crate::rng::CounterRng;

/// Exact log-mass of the negative multinomial law at `k`.
///
/// The support is all of `N_0^d`, so every point carries positive mass;
/// only dimension mismatches are errors. Works for both finite and
/// infinite-population parameter sets (only `n` and the weights enter).
pub fn nm_log_pmf(params: &ModelParams, k: &CountVector) -> Result<f64> {
    params.check_dim(k)?;
    let n = params.failure_target();
    let k_plus = params.total_draws(k);
    // ln Gamma(k_+) - ln Gamma(n) - sum ln k_i! + sum k_i ln p_i + n ln q
    let mut acc = KahanSum::new();
    acc.add(log_factorial(k_plus - 1));
    acc.add(-log_factorial(n - 1));
    for (i, &ki) in k.iter().enumerate() {
        acc.add(-log_factorial(ki));
        if ki > 0 {
            acc.add(ki as f64 * ln(params.weight_f64(i)));
        }
    }
    acc.add(n as f64 * ln(params.failure_weight_f64()));
    Ok(acc.value())
}

/// Truncates the infinite support to a box `{k : k_i <= cap_i}` whose tail
/// mass is at most `epsilon` (up to a relative boundary slack of 1e-3 that
/// resolves exact ties, such as `q^n = 1 - epsilon`, toward the smaller
/// box).
///
/// Caps grow geometrically until the captured mass reaches the bound, then
/// shrink coordinate by coordinate to the smallest box that still meets
/// it. The reported tail is `1 - sum(masses)` from the compensated sum of
/// the captured entries.
pub fn truncate_nm_support(
    params: &ModelParams,
    epsilon: f64,
    max_points: usize,
) -> Result<DiscreteLaw> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let d = params.dim();
    // Accept captured mass down to a sliver below 1 - epsilon so that ties
    // like q^n = 1 - epsilon resolve to the smaller box despite rounding.
    let slack = epsilon * 1e-3;
    let target = 1.0 - epsilon - slack;

    let mut caps: Vec<u64> = params
        .nm_mean()
        .iter()
        .map(|&m| crate::math::ceil(2.0 * m) as u64 + 4)
        .collect();
    loop {
        let cardinality = caps
            .iter()
            .fold(1u128, |a, &c| a.saturating_mul(c as u128 + 1));
        if cardinality > max_points as u128 {
            return Err(Error::TruncationOverflow {
                epsilon,
                cap: max_points,
            });
        }
        let entries = enumerate_nm_box(params, &caps)?;
        let captured = mass_sum(&entries);
        if captured >= target {
            let entries = trim_box(params, entries, &mut caps, captured, target);
            let captured = mass_sum(&entries);
            let tail = (1.0 - captured).max(0.0);
            return DiscreteLaw::from_log_masses(d, entries, tail.min(1.0));
        }
        for c in caps.iter_mut() {
            *c = *c * 2 + 1;
        }
    }
}

/// Log-masses over the box `{k : k_i <= cap_i}` by the mass-ratio recurrence
/// `Q(k + e_i)/Q(k) = p_i k_+ / (k_i + 1)` anchored at `Q(0) = q^n`.
fn enumerate_nm_box(params: &ModelParams, caps: &[u64]) -> Result<BTreeMap<CountVector, f64>> {
    let mut entries = BTreeMap::new();
    let anchor = params.failure_target() as f64 * ln(params.failure_weight_f64());
    let mut acc = KahanSum::new();
    acc.add(anchor);
    let mut k = alloc::vec![0u64; params.dim()];
    fill_nm(params, caps, 0, &mut k, acc, &mut entries);
    Ok(entries)
}

fn fill_nm(
    params: &ModelParams,
    caps: &[u64],
    axis: usize,
    k: &mut Vec<u64>,
    log_mass: KahanSum,
    entries: &mut BTreeMap<CountVector, f64>,
) {
    if axis == caps.len() {
        entries.insert(CountVector::new(k.clone()), log_mass.value());
        return;
    }
    let ln_p = ln(params.weight_f64(axis));
    let prefix: u64 = k[..axis].iter().sum();
    let mut acc = log_mass;
    for v in 0..=caps[axis] {
        if v > 0 {
            let k_plus_before = params.failure_target() + prefix + (v - 1);
            acc.add(ln_p);
            acc.add(ln(k_plus_before as f64));
            acc.add(-ln(v as f64));
        }
        k[axis] = v;
        fill_nm(params, caps, axis + 1, k, acc, entries);
    }
    k[axis] = 0;
}

fn mass_sum(entries: &BTreeMap<CountVector, f64>) -> f64 {
    let mut acc = KahanSum::new();
    for &logp in entries.values() {
        acc.add(exp(logp));
    }
    acc.value()
}

/// Shrinks each cap while the captured mass stays above the target.
fn trim_box(
    params: &ModelParams,
    mut entries: BTreeMap<CountVector, f64>,
    caps: &mut [u64],
    mut captured: f64,
    target: f64,
) -> BTreeMap<CountVector, f64> {
    for (axis, cap) in caps.iter_mut().enumerate().take(params.dim()) {
        while *cap > 0 {
            let mut slice = KahanSum::new();
            for (k, &logp) in &entries {
                if k.get(axis) == *cap {
                    slice.add(exp(logp));
                }
            }
            if captured - slice.value() < target {
                break;
            }
            captured -= slice.value();
            entries.retain(|k, _| k.get(axis) != *cap);
            *cap -= 1;
        }
    }
    entries
}

/// One draw: categorical trials with replacement until the `n`-th failure.
pub fn sample_nm(params: &ModelParams, rng: &mut CounterRng) -> Result<CountVector> {
    let d = params.dim();
    let mut thresholds = Vec::with_capacity(d);
    let mut cum = 0.0;
    for i in 0..d {
        cum += params.weight_f64(i);
        thresholds.push(cum);
    }
    let mut counts = alloc::vec![0u64; d];
    let mut failures = 0u64;
    while failures < params.failure_target() {
        let u = rng.next_f64();
        match thresholds.iter().position(|&t| u < t) {
            Some(i) => counts[i] += 1,
            None => failures += 1,
        }
    }
    Ok(CountVector::new(counts))
}
