//! Enumerated discrete laws with certified tail mass.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::count::CountVector;
use crate::error::{Error, Result};
use crate::math::{exp, KahanSum};

/// Log-probability of a support point, or an explicit zero-mass marker.
///
/// Out-of-support points are reported as [`LogMass::Zero`] rather than a
/// numeric negative infinity, so downstream aggregation never mixes real
/// log-masses with sentinels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogMass {
    Finite(f64),
    Zero,
}

impl LogMass {
    /// The probability mass itself (`exp` of the log-mass, or `0`).
    pub fn mass(&self) -> f64 {
        match self {
            LogMass::Finite(l) => exp(*l),
            LogMass::Zero => 0.0,
        }
    }

    /// The finite log-mass, if the point carries mass.
    pub fn finite(&self) -> Option<f64> {
        match self {
            LogMass::Finite(l) => Some(*l),
            LogMass::Zero => None,
        }
    }
}

/// A finite (or truncated) discrete law stored as a log-mass table.
///
/// Zero-mass points are omitted, every stored log-mass is finite, and
/// `tail_mass` accounts for whatever lies outside the enumerated set, so
/// `sum(exp(log_mass)) + tail_mass = 1` up to rounding. Entries are keyed in
/// lexicographic order, which makes every iteration (and therefore every
/// serialization and compensated sum) deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteLaw {
    dim: usize,
    entries: BTreeMap<CountVector, f64>,
    tail_mass: f64,
}

impl DiscreteLaw {
    /// Builds a law from raw log-mass entries.
    ///
    /// Rejects non-finite log-masses and dimension mismatches; the
    /// normalization itself is checked by [`DiscreteLaw::total_mass`] where
    /// an operation needs it.
    pub fn from_log_masses(
        dim: usize,
        entries: BTreeMap<CountVector, f64>,
        tail_mass: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&tail_mass) {
            return Err(Error::TailTooLarge {
                tail: tail_mass,
                tolerance: 1.0,
            });
        }
        for (k, &logp) in &entries {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.dim(),
                });
            }
            if !logp.is_finite() {
                return Err(Error::OutOfSupport);
            }
        }
        Ok(DiscreteLaw {
            dim,
            entries,
            tail_mass,
        })
    }

    /// Point mass at `k`.
    pub fn point_mass(k: CountVector) -> Self {
        let dim = k.dim();
        let mut entries = BTreeMap::new();
        entries.insert(k, 0.0);
        DiscreteLaw {
            dim,
            entries,
            tail_mass: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Mass not captured by the enumerated entries; zero for exactly finite
    /// supports.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn log_mass(&self, k: &CountVector) -> LogMass {
        match self.entries.get(k) {
            Some(&l) => LogMass::Finite(l),
            None => LogMass::Zero,
        }
    }

    pub fn mass(&self, k: &CountVector) -> f64 {
        self.log_mass(k).mass()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CountVector, f64)> {
        self.entries.iter().map(|(k, &l)| (k, l))
    }

    pub fn keys(&self) -> impl Iterator<Item = &CountVector> {
        self.entries.keys()
    }

    /// Compensated sum of the enumerated masses (excludes the tail).
    pub fn total_mass(&self) -> f64 {
        let mut acc = KahanSum::new();
        for (_, logp) in self.iter() {
            acc.add(exp(logp));
        }
        acc.value()
    }

    /// Per-coordinate maxima of the enumerated support.
    pub fn support_max(&self) -> Vec<u64> {
        let mut maxima = alloc::vec![0u64; self.dim];
        for k in self.entries.keys() {
            for (m, &v) in maxima.iter_mut().zip(k.iter()) {
                *m = (*m).max(v);
            }
        }
        maxima
    }
}
