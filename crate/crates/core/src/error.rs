//! Crate-wide error type.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors produced by parameter validation and by the distance machinery.
///
/// Validation variants name the violated invariant so the caller (and the
/// CLI exit path) can report it verbatim.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A probability weight is zero, negative or not a valid fraction.
    InvalidWeight(String),
    /// The weights sum to one or more, leaving no mass for the failure category.
    NoFailureMass { weight_sum: Ratio2 },
    /// `N * p_i` is not a positive integer for the given population size.
    LatticeViolation {
        index: usize,
        num: u64,
        den: u64,
        population: u64,
    },
    /// `N * q` is not a positive integer for the given population size.
    FailureLatticeViolation { population: u64 },
    /// The failure target is zero.
    ZeroFailureTarget,
    /// The failure target exceeds the number of failure objects `N * q`.
    FailureTargetTooLarge { n: u64, failure_count: u64 },
    /// An operation that needs a finite population received the infinite sentinel.
    InfinitePopulation,
    /// The stricter precondition `n <= (1/2) N q` required by the expansion
    /// and the distance bounds does not hold.
    HalfFailureBoundViolated { n: u64, failure_count: u64 },
    /// A count vector has the wrong dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// Enumerating the support would exceed the configured cap.
    SupportTooLarge { cardinality: u128, cap: usize },
    /// The requested tail bound cannot be met within the enumeration cap.
    TruncationOverflow { epsilon: f64, cap: usize },
    /// A law's tail mass exceeds the tolerance required by the operation.
    TailTooLarge { tail: f64, tolerance: f64 },
    /// The count lies outside the expansion's region of validity.
    OutOfRegion { gamma: f64 },
    /// The count lies outside the distribution's support.
    OutOfSupport,
    /// `gamma` must lie strictly between zero and one.
    InvalidGamma(f64),
    /// Expansion order must be 0, 1 or 2.
    InvalidOrder(usize),
    /// Absolute continuity fails at the named support point.
    AbsoluteContinuity { point: Vec<u64> },
    /// A covariance matrix is not symmetric positive-definite.
    NotPositiveDefinite,
    /// A covariance matrix is not symmetric.
    NotSymmetric,
    /// The metric is only implemented up to the stated dimension.
    UnsupportedDimension { dim: usize, max: usize },
    /// The operation needs a diagonal covariance (independent components).
    RequiresDiagonalCovariance,
    /// Quadrature at the requested resolution cannot certify the tolerance.
    ResolutionTooCoarse { achieved: f64, requested: f64 },
    /// The parameters fall outside the experiment's parameter set.
    OutsideThetaB { b: f64, reason: &'static str },
    /// An invalid truncation level was requested.
    InvalidEpsilon(f64),
}

/// Exact weight-sum snapshot carried by [`Error::NoFailureMass`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio2 {
    pub num: u64,
    pub den: u64,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidWeight(s) => write!(f, "invalid probability weight: {s}"),
            Error::NoFailureMass { weight_sum } => write!(
                f,
                "weights sum to {}/{} >= 1; the failure weight q = 1 - sum(p) must be positive",
                weight_sum.num, weight_sum.den
            ),
            Error::LatticeViolation { index, num, den, population } => write!(
                f,
                "lattice violation: N*p[{index}] = {population}*{num}/{den} is not a positive integer"
            ),
            Error::FailureLatticeViolation { population } => {
                write!(f, "lattice violation: N*q is not a positive integer for N = {population}")
            }
            Error::ZeroFailureTarget => write!(f, "failure target n must be at least 1"),
            Error::FailureTargetTooLarge { n, failure_count } => write!(
                f,
                "failure target n = {n} exceeds the number of failure objects N*q = {failure_count}"
            ),
            Error::InfinitePopulation => {
                write!(f, "operation requires a finite population size N")
            }
            Error::HalfFailureBoundViolated { n, failure_count } => write!(
                f,
                "precondition n <= (1/2) N q violated: n = {n}, N*q = {failure_count}"
            ),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::SupportTooLarge { cardinality, cap } => {
                write!(f, "support too large: {cardinality} points exceed the cap of {cap}")
            }
            Error::TruncationOverflow { epsilon, cap } => write!(
                f,
                "cannot reach tail mass <= {epsilon} within the enumeration cap of {cap} points"
            ),
            Error::TailTooLarge { tail, tolerance } => {
                write!(f, "tail mass {tail} exceeds the tolerance {tolerance}")
            }
            Error::OutOfRegion { gamma } => {
                write!(f, "count outside the region max(k_i/p_i) <= {gamma}*N")
            }
            Error::OutOfSupport => write!(f, "count outside the support"),
            Error::InvalidGamma(g) => write!(f, "gamma must lie in (0, 1), got {g}"),
            Error::InvalidOrder(o) => write!(f, "expansion order must be 0, 1 or 2, got {o}"),
            Error::AbsoluteContinuity { point } => {
                write!(f, "absolute continuity violated at support point {point:?}")
            }
            Error::NotPositiveDefinite => {
                write!(f, "covariance matrix is not positive-definite")
            }
            Error::NotSymmetric => write!(f, "covariance matrix is not symmetric"),
            Error::UnsupportedDimension { dim, max } => {
                write!(f, "dimension {dim} unsupported; this operation handles d <= {max}")
            }
            Error::RequiresDiagonalCovariance => {
                write!(f, "operation requires a diagonal covariance matrix")
            }
            Error::ResolutionTooCoarse { achieved, requested } => write!(
                f,
                "quadrature resolution too coarse: refinement delta {achieved} exceeds requested tolerance {requested}"
            ),
            Error::OutsideThetaB { b, reason } => {
                write!(f, "parameters outside Theta_b for b = {b}: {reason}")
            }
            Error::InvalidEpsilon(e) => write!(f, "epsilon must lie in (0, 1), got {e}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
