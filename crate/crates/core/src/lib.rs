//! Exact and asymptotic machinery for inverse sampling from finite populations.
//!
//! The crate evaluates two families of count distributions and the statistical
//! distances between them:
//!
//! * the law of the category counts observed when drawing *without*
//!   replacement from a finite population until a fixed number of objects
//!   from a designated "failure" category has appeared
//!   ([`mih_log_pmf`](mih::mih_log_pmf)), and
//! * its infinite-population limit, the negative multinomial law
//!   ([`nm_log_pmf`](nm::nm_log_pmf)).
//!
//! On top of the exact laws the crate provides the local expansion of the
//! log-ratio between the two models ([`expansion`]), discrete and
//! quadrature-based Hellinger / total-variation / Kullback-Leibler /
//! Kolmogorov distances ([`metrics`]), and the jitter / rounding Markov
//! kernels used to turn those distances into constructive upper bounds on
//! experiment deficiencies ([`kernels`]).
//!
//! Every operation is a pure function of its explicit inputs (including
//! RNG state), and law tables are immutable once built, so values can be
//! shared freely across threads. The crate is `no_std` (it allocates but
//! performs no IO); the companion `mih-cli` crate carries serialization and
//! the command-line front end.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod count;
pub mod error;
pub mod expansion;
pub mod fitting;
pub mod gof;
pub mod kernels;
pub mod law;
pub mod logfact;
mod math;
pub mod metrics;
pub mod mih;
pub mod moments;
pub mod nm;
pub mod normal;
pub mod params;
pub mod quadrature;
pub mod rng;

pub use count::CountVector;
pub use error::Error;
pub use law::{DiscreteLaw, LogMass};
pub use params::{ModelParams, Population, Ratio};
pub use rng::CounterRng;
