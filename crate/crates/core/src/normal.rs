//! Multivariate normal comparison measures.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, ln, sqrt, std_normal_cdf, LN_2PI};

/// Mean and covariance of a multivariate normal comparison law.
///
/// Construction factorizes the covariance, so strict positive-definiteness
/// (and symmetry) is certified up front; density evaluation reuses the
/// factor.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalSpec {
    mean: Vec<f64>,
    cov: Vec<f64>,
    /// Lower-triangular Cholesky factor, row-major.
    chol: Vec<f64>,
    log_norm: f64,
}

impl NormalSpec {
    /// Validates a mean vector and a row-major `d x d` covariance.
    pub fn new(mean: Vec<f64>, cov: Vec<f64>) -> Result<Self> {
        let d = mean.len();
        if cov.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: cov.len(),
            });
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let a = cov[i * d + j];
                let b = cov[j * d + i];
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let chol = cholesky(&cov, d).ok_or(Error::NotPositiveDefinite)?;
        let mut log_det = 0.0;
        for i in 0..d {
            log_det += 2.0 * ln(chol[i * d + i]);
        }
        let log_norm = -0.5 * (d as f64 * LN_2PI + log_det);
        Ok(NormalSpec {
            mean,
            cov,
            chol,
            log_norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &[f64] {
        &self.cov
    }

    pub fn covariance_at(&self, i: usize, j: usize) -> f64 {
        self.cov[i * self.dim() + j]
    }

    /// Marginal standard deviation of coordinate `i`.
    pub fn marginal_sd(&self, i: usize) -> f64 {
        sqrt(self.covariance_at(i, i))
    }

    /// Largest principal standard deviation, bounded by `sqrt(trace)`.
    pub fn principal_sd_bound(&self) -> f64 {
        let d = self.dim();
        let trace: f64 = (0..d).map(|i| self.covariance_at(i, i)).sum();
        sqrt(trace)
    }

    pub fn log_pdf(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        let d = self.dim();
        // Solve L z = x - mean by forward substitution; the quadratic form
        // is then |z|^2.
        let mut z = alloc::vec![0.0f64; d];
        for i in 0..d {
            let mut acc = x[i] - self.mean[i];
            for (j, zj) in z.iter().enumerate().take(i) {
                acc -= self.chol[i * d + j] * zj;
            }
            z[i] = acc / self.chol[i * d + i];
        }
        let quad: f64 = z.iter().map(|v| v * v).sum();
        self.log_norm - 0.5 * quad
    }

    pub fn pdf(&self, x: &[f64]) -> f64 {
        exp(self.log_pdf(x))
    }

    /// `sqrt(pdf)`, the Hellinger integrand.
    pub fn sqrt_pdf(&self, x: &[f64]) -> f64 {
        exp(0.5 * self.log_pdf(x))
    }

    /// Cumulative distribution function; univariate specs only.
    pub fn cdf_1d(&self, x: f64) -> Result<f64> {
        if self.dim() != 1 {
            return Err(Error::UnsupportedDimension {
                dim: self.dim(),
                max: 1,
            });
        }
        Ok(std_normal_cdf((x - self.mean[0]) / self.marginal_sd(0)))
    }

    /// Whether the covariance is diagonal, enabling per-coordinate CDFs.
    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.cov[i * d + j] == 0.0))
    }

    /// Marginal CDF along coordinate `i` (exact for diagonal covariances).
    pub fn marginal_cdf(&self, i: usize, x: f64) -> f64 {
        std_normal_cdf((x - self.mean[i]) / self.marginal_sd(i))
    }
}

fn cholesky(cov: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut l = alloc::vec![0.0f64; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut acc = cov[i * d + j];
            for k in 0..j {
                acc -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if acc <= 0.0 {
                    return None;
                }
                l[i * d + i] = sqrt(acc);
            } else {
                l[i * d + j] = acc / l[j * d + j];
            }
        }
    }
    Some(l)
}
