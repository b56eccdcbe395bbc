//! Brute-force moments of enumerated laws.

use alloc::vec::Vec;

use crate::count::CountVector;
use crate::error::{Error, Result};
use crate::law::DiscreteLaw;
use crate::math::KahanSum;

/// How a moment summary was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentMethod {
    ExactEnumeration,
    MonteCarlo,
}

/// Mean vector and covariance matrix of a count law.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSummary {
    pub mean: Vec<f64>,
    /// Row-major `d x d` covariance; symmetric with non-negative diagonal.
    pub covariance: Vec<f64>,
    pub method: MomentMethod,
}

impl MomentSummary {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn covariance_at(&self, i: usize, j: usize) -> f64 {
        self.covariance[i * self.mean.len() + j]
    }
}

/// Mean and covariance by direct summation over the enumerated entries.
///
/// The law's tail must sit below `tail_tolerance`; the summation is not
/// renormalized, so the tail bounds the bias of every reported moment.
pub fn exact_moments(law: &DiscreteLaw, tail_tolerance: f64) -> Result<MomentSummary> {
    if law.tail_mass() > tail_tolerance {
        return Err(Error::TailTooLarge {
            tail: law.tail_mass(),
            tolerance: tail_tolerance,
        });
    }
    let d = law.dim();
    let mut mean_acc: Vec<KahanSum> = alloc::vec![KahanSum::new(); d];
    for (k, logp) in law.iter() {
        let m = crate::math::exp(logp);
        for (acc, &ki) in mean_acc.iter_mut().zip(k.iter()) {
            acc.add(m * ki as f64);
        }
    }
    let mean: Vec<f64> = mean_acc.iter().map(|a| a.value()).collect();
    let mut cov_acc: Vec<KahanSum> = alloc::vec![KahanSum::new(); d * d];
    for (k, logp) in law.iter() {
        let m = crate::math::exp(logp);
        for i in 0..d {
            let di = k.get(i) as f64 - mean[i];
            for j in i..d {
                let dj = k.get(j) as f64 - mean[j];
                cov_acc[i * d + j].add(m * di * dj);
            }
        }
    }
    let mut covariance = alloc::vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let v = cov_acc[i * d + j].value();
            covariance[i * d + j] = v;
            covariance[j * d + i] = v;
        }
    }
    Ok(MomentSummary {
        mean,
        covariance,
        method: MomentMethod::ExactEnumeration,
    })
}

/// Empirical mean and covariance of a sample batch.
pub fn moments_from_samples(samples: &[CountVector]) -> Option<MomentSummary> {
    let first = samples.first()?;
    let d = first.dim();
    let count = samples.len() as f64;
    let mut mean = alloc::vec![0.0f64; d];
    for s in samples {
        for (m, &v) in mean.iter_mut().zip(s.iter()) {
            *m += v as f64;
        }
    }
    for m in mean.iter_mut() {
        *m /= count;
    }
    let mut covariance = alloc::vec![0.0f64; d * d];
    for s in samples {
        for i in 0..d {
            let di = s.get(i) as f64 - mean[i];
            for j in 0..d {
                covariance[i * d + j] += di * (s.get(j) as f64 - mean[j]);
            }
        }
    }
    for c in covariance.iter_mut() {
        *c /= count;
    }
    Some(MomentSummary {
        mean,
        covariance,
        method: MomentMethod::MonteCarlo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mih::enumerate_mih_support;
    use crate::nm::truncate_nm_support;
    use crate::params::{ModelParams, Ratio};
    use alloc::vec;

    fn r(n: u64, d: u64) -> Ratio {
        Ratio::new(n, d).unwrap()
    }

    #[test]
    fn point_mass_has_zero_moments() {
        let law = DiscreteLaw::point_mass(CountVector::new(vec![0, 0]));
        let m = exact_moments(&law, 0.0).unwrap();
        assert_eq!(m.mean, vec![0.0, 0.0]);
        assert_eq!(m.covariance, vec![0.0; 4]);
    }

    #[test]
    fn four_object_urn_mean() {
        // 0 * 1/2 + 1 * 1/3 + 2 * 1/6 = 2/3.
        let params = ModelParams::finite(4, 1, &[r(1, 2)]).unwrap();
        let law = enumerate_mih_support(&params, 1024).unwrap();
        let m = exact_moments(&law, 0.0).unwrap();
        assert!((m.mean[0] - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn truncated_geometric_mean_matches_n_p_over_q() {
        let params = ModelParams::infinite(1, &[r(1, 2)]).unwrap();
        let law = truncate_nm_support(&params, 1e-12, 1 << 20).unwrap();
        let m = exact_moments(&law, 1e-10).unwrap();
        assert!((m.mean[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn tail_gate_rejects_coarse_truncations() {
        let params = ModelParams::infinite(1, &[r(1, 2)]).unwrap();
        let law = truncate_nm_support(&params, 0.25, 1 << 20).unwrap();
        assert!(matches!(
            exact_moments(&law, 1e-6),
            Err(Error::TailTooLarge { .. })
        ));
    }

    #[test]
    fn covariance_is_symmetric_with_nonnegative_diagonal() {
        let params = ModelParams::finite(12, 2, &[r(1, 3), r(1, 4)]).unwrap();
        let law = enumerate_mih_support(&params, 1 << 20).unwrap();
        let m = exact_moments(&law, 0.0).unwrap();
        for i in 0..2 {
            assert!(m.covariance_at(i, i) >= 0.0);
            for j in 0..2 {
                assert_eq!(m.covariance_at(i, j), m.covariance_at(j, i));
            }
        }
    }
}
