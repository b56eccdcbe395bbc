//! Comparison-of-experiments layer: the jitter and rounding Markov kernels,
//! the normal comparison families, the concentration check and constructive
//! deficiency upper bounds.
//!
//! Deficiencies are reported only as the total variation attained by the
//! explicit kernels (jitter one way, nearest-integer rounding back); the
//! infimum over all kernels is out of computational reach and out of scope.
//! Reports carry the `d/sqrt(n)` shape so sweeps can fit the constant.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::law::DiscreteLaw;
use crate::math::{exp, sqrt, KahanSum};
use crate::metrics::{
    hellinger_jittered_vs_normal, rounded_normal_law, tv_discrete, tv_jittered_vs_normal,
    tv_sqrt_jittered_vs_normal, DistanceReport, JitteredLaw, Method, Metric,
};
use crate::mih::enumerate_mih_support;
use crate::normal::NormalSpec;
use crate::params::ModelParams;
use crate::quadrature::QuadratureSpec;

/// The experiments compared by the deficiency bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Mih,
    Nm,
    NormalQ,
    NormalQbar,
    NormalQstar,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Mih => "mih",
            FamilyKind::Nm => "nm",
            FamilyKind::NormalQ => "normal-q",
            FamilyKind::NormalQbar => "normal-qbar",
            FamilyKind::NormalQstar => "normal-qstar",
        }
    }

    fn is_normal(&self) -> bool {
        matches!(
            self,
            FamilyKind::NormalQ | FamilyKind::NormalQbar | FamilyKind::NormalQstar
        )
    }
}

/// A parameterized experiment over the non-degenerate set
/// `{p : |p|_1 < 1, min(p_1..p_d, q) >= b}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentFamily {
    pub kind: FamilyKind,
    pub b: f64,
}

impl ExperimentFamily {
    pub fn new(kind: FamilyKind, b: f64) -> Result<Self> {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::InvalidGamma(b));
        }
        Ok(ExperimentFamily { kind, b })
    }

    /// Gate for the parameter set, plus the standing assumption
    /// `n <= (1/2) N b` when the population is finite.
    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        let slack = 1e-12;
        for w in params.weights() {
            if w.to_f64() < self.b - slack {
                return Err(Error::OutsideThetaB {
                    b: self.b,
                    reason: "a category weight is below b",
                });
            }
        }
        if params.failure_weight_f64() < self.b - slack {
            return Err(Error::OutsideThetaB {
                b: self.b,
                reason: "the failure weight q is below b",
            });
        }
        if let Ok(population) = params.finite_population() {
            if 2.0 * params.failure_target() as f64 > population as f64 * self.b + slack {
                return Err(Error::OutsideThetaB {
                    b: self.b,
                    reason: "n exceeds (1/2) N b",
                });
            }
        }
        Ok(())
    }
}

/// The two explicit Markov kernels of the transport argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// Adds a uniform draw on `(-1/2, 1/2)^d`.
    JitterUniformHalf,
    /// Rounds every coordinate to the nearest integer (half-integer ties go
    /// to the even integer; the tie set has measure zero under every normal
    /// law and never meets a jittered lattice).
    RoundNearestInteger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelDirection {
    DiscreteToContinuous,
    ContinuousToDiscrete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub direction: KernelDirection,
}

impl KernelSpec {
    /// The jitter kernel (discrete to continuous).
    pub fn jitter() -> Self {
        KernelSpec {
            kind: KernelKind::JitterUniformHalf,
            direction: KernelDirection::DiscreteToContinuous,
        }
    }

    /// The rounding kernel inverting the jitter.
    pub fn round() -> Self {
        KernelSpec {
            kind: KernelKind::RoundNearestInteger,
            direction: KernelDirection::ContinuousToDiscrete,
        }
    }
}

/// Direction of a one-sided deficiency bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundDirection {
    /// Finite-population experiment transported onto the normal one.
    PToQ,
    /// Normal experiment transported onto the finite-population one.
    QToP,
}

/// A constructive one-sided deficiency upper bound.
#[derive(Clone, Debug, PartialEq)]
pub struct DeficiencyBoundReport {
    pub direction: BoundDirection,
    /// Total variation achieved by the explicit kernel; an upper bound on
    /// the one-sided deficiency.
    pub upper_bound: f64,
    pub via: KernelSpec,
    /// Component distances: the defining total variation first, then the
    /// Hellinger reference value where available, then (for the Q-to-P
    /// direction) the paired P-to-Q total variation used by the
    /// data-processing check.
    pub components: Vec<DistanceReport>,
    /// The `d / sqrt(n)` shape with unit constant; sweeps fit the constant.
    pub theoretical_rhs: f64,
}

/// Smooths a lattice law with the uniform kernel on unit cells.
pub fn apply_jitter(law: &DiscreteLaw) -> JitteredLaw {
    JitteredLaw::new(law.clone())
}

/// Nearest-integer rounding applied to a jittered lattice law recovers the
/// base law exactly: the kernels invert each other by construction.
pub fn invert_jitter(j: &JitteredLaw) -> DiscreteLaw {
    j.base().clone()
}

/// Discrete law of `round(Z)`, `Z ~ g`, over the window `{0..hi_i}` per
/// coordinate, with certified cell masses.
pub fn round_pushforward(
    g: &NormalSpec,
    window_hi: &[u64],
    quad: &QuadratureSpec,
) -> Result<DiscreteLaw> {
    rounded_normal_law(g, window_hi, quad)
}

/// Discrete law of `round(Z^2)` (coordinate-wise), `Z ~ g`, for diagonal
/// covariances; the kernel inverting jitter-then-square-root.
pub fn round_squared_pushforward(g: &NormalSpec, window_hi: &[u64]) -> Result<DiscreteLaw> {
    if !g.is_diagonal() {
        return Err(Error::RequiresDiagonalCovariance);
    }
    let d = g.dim();
    if window_hi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: window_hi.len(),
        });
    }
    // Per-coordinate mass of round(Z_i^2) = k: both branches of the square
    // root.
    let per_axis: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..=window_hi[i])
                .map(|k| {
                    let hi = sqrt(k as f64 + 0.5);
                    let lo = sqrt((k as f64 - 0.5).max(0.0));
                    let pos = g.marginal_cdf(i, hi) - g.marginal_cdf(i, lo);
                    let neg = g.marginal_cdf(i, -lo) - g.marginal_cdf(i, -hi);
                    pos + neg
                })
                .collect()
        })
        .collect();
    let mut entries = alloc::collections::BTreeMap::new();
    let mut captured = KahanSum::new();
    let mut k = alloc::vec![0u64; d];
    loop {
        let mass: f64 = k
            .iter()
            .enumerate()
            .map(|(i, &ki)| per_axis[i][ki as usize])
            .product();
        if mass > 0.0 {
            captured.add(mass);
            entries.insert(
                crate::count::CountVector::new(k.clone()),
                crate::math::ln(mass),
            );
        }
        if !advance(&mut k, window_hi) {
            break;
        }
    }
    let tail = (1.0 - captured.value()).max(0.0);
    DiscreteLaw::from_log_masses(d, entries, tail.min(1.0))
}

fn advance(k: &mut [u64], hi: &[u64]) -> bool {
    for i in (0..k.len()).rev() {
        if k[i] < hi[i] {
            k[i] += 1;
            for v in k.iter_mut().skip(i + 1) {
                *v = 0;
            }
            return true;
        }
    }
    false
}

/// Exact probability that some observed count exceeds `gamma * N * p_i`,
/// from the enumerated law.
pub fn concentration_tail(params: &ModelParams, gamma: f64, max_points: usize) -> Result<f64> {
    params.finite_population()?;
    if gamma >= 1.0 {
        // The support is bounded by N p_i coordinate-wise.
        return Ok(0.0);
    }
    let law = enumerate_mih_support(params, max_points)?;
    let thresholds: Vec<f64> = (0..params.dim())
        .map(|i| gamma * params.category_count(i).unwrap() as f64)
        .collect();
    let mut acc = KahanSum::new();
    for (k, logp) in law.iter() {
        if k.iter().zip(&thresholds).any(|(&ki, &t)| ki as f64 > t) {
            acc.add(exp(logp));
        }
    }
    Ok(acc.value())
}

/// The closed-form concentration bound `100 d exp(-q min(p) N^2 / (100 n))`
/// the exact tail is compared against.
pub fn concentration_bound_rhs(params: &ModelParams) -> Result<f64> {
    let population = params.finite_population()? as f64;
    let min_p = params
        .weights()
        .iter()
        .map(|w| w.to_f64())
        .fold(f64::INFINITY, f64::min);
    let q = params.failure_weight_f64();
    let n = params.failure_target() as f64;
    Ok(100.0 * params.dim() as f64 * exp(-q * min_p * population * population / (100.0 * n)))
}

/// Mean and covariance of the requested normal comparison family.
///
/// * `NormalQ`: mean `n p/q`, covariance `n (diag(p/q) + (p/q)(p/q)^T)` --
///   the moment structure of the infinite-population count law itself.
/// * `NormalQbar`: same mean, covariance `n diag(p/q)` (independent
///   components).
/// * `NormalQstar`: mean `sqrt(n p/q)`, covariance `diag(1/4)` (the
///   variance-stabilized scale).
pub fn normal_family_spec(params: &ModelParams, kind: FamilyKind) -> Result<NormalSpec> {
    let d = params.dim();
    let q = params.failure_weight_f64();
    let n = params.failure_target() as f64;
    let ratios: Vec<f64> = (0..d).map(|i| params.weight_f64(i) / q).collect();
    match kind {
        FamilyKind::NormalQ => {
            let mean: Vec<f64> = ratios.iter().map(|r| n * r).collect();
            let mut cov = alloc::vec![0.0; d * d];
            for i in 0..d {
                for j in 0..d {
                    cov[i * d + j] = n * ratios[i] * ratios[j];
                }
                cov[i * d + i] += n * ratios[i];
            }
            NormalSpec::new(mean, cov)
        }
        FamilyKind::NormalQbar => {
            let mean: Vec<f64> = ratios.iter().map(|r| n * r).collect();
            let mut cov = alloc::vec![0.0; d * d];
            for i in 0..d {
                cov[i * d + i] = n * ratios[i];
            }
            NormalSpec::new(mean, cov)
        }
        FamilyKind::NormalQstar => {
            let mean: Vec<f64> = ratios.iter().map(|r| sqrt(n * r)).collect();
            let mut cov = alloc::vec![0.0; d * d];
            for i in 0..d {
                cov[i * d + i] = 0.25;
            }
            NormalSpec::new(mean, cov)
        }
        FamilyKind::Mih | FamilyKind::Nm => Err(Error::OutsideThetaB {
            b: 0.0,
            reason: "normal_family_spec needs a normal family kind",
        }),
    }
}

/// Upper bound on the deficiency of the finite-population experiment with
/// respect to the normal one, via the jitter kernel.
///
/// For the variance-stabilized family the jittered law is first pushed
/// through the coordinate-wise square-root map, matching the transport that
/// defines that comparison.
pub fn deficiency_upper_bound_pq(
    params: &ModelParams,
    family: &ExperimentFamily,
    quad: &QuadratureSpec,
    max_points: usize,
) -> Result<DeficiencyBoundReport> {
    if !family.kind.is_normal() {
        return Err(Error::OutsideThetaB {
            b: family.b,
            reason: "target must be a normal family",
        });
    }
    family.validate(params)?;
    let law = enumerate_mih_support(params, max_points)?;
    let jittered = apply_jitter(&law);
    let g = normal_family_spec(params, family.kind)?;
    let mut components = Vec::new();
    let tv = match family.kind {
        FamilyKind::NormalQstar => tv_sqrt_jittered_vs_normal(&jittered, &g, quad)?,
        _ => tv_jittered_vs_normal(&jittered, &g, quad)?,
    };
    components.push(tv);
    if family.kind != FamilyKind::NormalQstar {
        components.push(hellinger_jittered_vs_normal(&jittered, &g, quad)?);
    }
    Ok(DeficiencyBoundReport {
        direction: BoundDirection::PToQ,
        upper_bound: tv.value,
        via: KernelSpec::jitter(),
        components,
        theoretical_rhs: params.dim() as f64 / sqrt(params.failure_target() as f64),
    })
}

/// Upper bound on the deficiency of the normal experiment with respect to
/// the finite-population one, via the rounding kernel.
///
/// The report also carries the paired jitter-direction bound: rounding is a
/// function of the jittered variable, so data processing forces this bound
/// below that one.
pub fn deficiency_upper_bound_qp(
    params: &ModelParams,
    family: &ExperimentFamily,
    quad: &QuadratureSpec,
    max_points: usize,
) -> Result<DeficiencyBoundReport> {
    if !family.kind.is_normal() {
        return Err(Error::OutsideThetaB {
            b: family.b,
            reason: "source must be a normal family",
        });
    }
    family.validate(params)?;
    let law = enumerate_mih_support(params, max_points)?;
    let g = normal_family_spec(params, family.kind)?;
    let tv = match family.kind {
        FamilyKind::NormalQstar => {
            let window: Vec<u64> = (0..params.dim())
                .map(|i| {
                    let reach = g.mean()[i] + 10.0 * g.marginal_sd(i);
                    crate::math::ceil(reach * reach).max(1.0) as u64
                })
                .collect();
            let rounded = round_squared_pushforward(&g, &window)?;
            let base = tv_discrete(&law, &rounded)?;
            DistanceReport {
                value: base.value + 0.5 * (law.tail_mass() + rounded.tail_mass()),
                metric: Metric::TotalVariation,
                method: Method::Quadrature,
                truncation_tail: law.tail_mass() + rounded.tail_mass(),
                quadrature_nodes: 0,
                error_estimate: 1e-12,
            }
        }
        _ => crate::metrics::tv_discrete_vs_rounded_normal(&law, &g, quad)?,
    };
    let paired = deficiency_upper_bound_pq(params, family, quad, max_points)?;
    let mut components = alloc::vec![tv];
    components.extend(paired.components);
    Ok(DeficiencyBoundReport {
        direction: BoundDirection::QToP,
        upper_bound: tv.value,
        via: KernelSpec::round(),
        components,
        theoretical_rhs: params.dim() as f64 / sqrt(params.failure_target() as f64),
    })
}
