//! Statistical distances between count laws, jittered laws and normal
//! comparison measures.
//!
//! Discrete-discrete distances are exact closed sums over support unions.
//! Distances against normal densities integrate over the unit cells of the
//! jittered law with tensor-product Gauss-Legendre rules; every report
//! carries a single conservative `error_estimate` summing the tail,
//! truncation and quadrature-refinement contributions.

mod continuous;
mod discrete;

pub(crate) use continuous::rounded_normal_law;
pub use continuous::{
    hellinger_jittered_pair, hellinger_jittered_vs_normal, kolmogorov_discrete_vs_normal,
    tv_discrete_vs_rounded_normal, tv_jittered_vs_normal, tv_sqrt_jittered_vs_normal,
};
pub use discrete::{hellinger_discrete, kl_discrete, tv_discrete};

use crate::law::DiscreteLaw;

/// Which distance a report carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Hellinger,
    TotalVariation,
    KullbackLeibler,
    Kolmogorov,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Hellinger => "hellinger",
            Metric::TotalVariation => "tv",
            Metric::KullbackLeibler => "kl",
            Metric::Kolmogorov => "kolmogorov",
        }
    }
}

/// How the distance was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ClosedSum,
    Quadrature,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ClosedSum => "closed-sum",
            Method::Quadrature => "quadrature",
        }
    }
}

/// A computed distance plus the metadata needed to trust it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceReport {
    pub value: f64,
    pub metric: Metric,
    pub method: Method,
    /// Mass outside the enumerated/integrated region (law tails plus any
    /// Gaussian window truncation).
    pub truncation_tail: f64,
    /// Nodes per axis per cell; zero for closed sums.
    pub quadrature_nodes: usize,
    /// Conservative bound on the distance error: tails + truncation +
    /// quadrature refinement, summed.
    pub error_estimate: f64,
}

/// A lattice law smoothed by the uniform kernel on the unit cell
/// `k + (-1/2, 1/2)^d`.
///
/// The density equals the base mass on each cell (cell volume is one), so
/// it integrates to `1 - tail_mass`. The cell half-width is fixed at `1/2`;
/// nearest-integer rounding inverts the kernel exactly on lattice laws.
#[derive(Clone, Debug, PartialEq)]
pub struct JitteredLaw {
    base: DiscreteLaw,
}

impl JitteredLaw {
    pub fn new(base: DiscreteLaw) -> Self {
        JitteredLaw { base }
    }

    pub fn base(&self) -> &DiscreteLaw {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn tail_mass(&self) -> f64 {
        self.base.tail_mass()
    }
}
