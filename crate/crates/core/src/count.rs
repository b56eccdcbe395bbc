//! Support points of the count laws.

use alloc::vec::Vec;

/// A point of the count support: `d` non-negative category counts.
///
/// The derived total-draw count `k_+ = n + |k|_1` depends on the failure
/// target and is exposed through [`crate::ModelParams::total_draws`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountVector(Vec<u64>);

impl CountVector {
    pub fn new(counts: Vec<u64>) -> Self {
        CountVector(counts)
    }

    pub fn zeros(dim: usize) -> Self {
        CountVector(alloc::vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn iter(&self) -> core::slice::Iter<'_, u64> {
        self.0.iter()
    }

    /// `|k|_1`, the total count over the observed categories.
    pub fn norm1(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Coordinates as `f64`, the embedding used by jittering.
    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&v| v as f64).collect()
    }
}

impl From<Vec<u64>> for CountVector {
    fn from(v: Vec<u64>) -> Self {
        CountVector(v)
    }
}

impl AsRef<[u64]> for CountVector {
    fn as_ref(&self) -> &[u64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn norm_and_accessors() {
        let k = CountVector::new(vec![1, 2, 3]);
        assert_eq!(k.dim(), 3);
        assert_eq!(k.norm1(), 6);
        assert_eq!(k.get(1), 2);
        assert_eq!(CountVector::zeros(2).norm1(), 0);
    }
}
