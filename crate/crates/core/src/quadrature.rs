//! Tensor-product Gauss-Legendre quadrature over unit cells.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{cos, KahanSum};

/// Quadrature resolution (nodes per axis per cell) plus an optional
/// certification tolerance checked against the refinement delta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub nodes_per_axis: usize,
    pub certify_tolerance: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes_per_axis: 16,
            certify_tolerance: None,
        }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(nodes_per_axis: usize) -> Self {
        QuadratureSpec {
            nodes_per_axis,
            certify_tolerance: None,
        }
    }

    /// Coarser companion resolution used for the refinement error estimate.
    pub fn coarse_nodes(&self) -> usize {
        (self.nodes_per_axis / 2).max(2)
    }

    /// Checks a refinement delta against the requested tolerance.
    pub fn certify(&self, delta: f64) -> Result<()> {
        if let Some(tol) = self.certify_tolerance {
            if delta > tol {
                return Err(Error::ResolutionTooCoarse {
                    achieved: delta,
                    requested: tol,
                });
            }
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = alloc::vec![0.0f64; n];
        let mut weights = alloc::vec![0.0f64; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrates `f` over `[lo, hi]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut acc = KahanSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (p0 - x * p1) / (1.0 - x * x);
    (p1, d)
}

/// Integrates `f` over the axis-aligned box `[lo, hi]` with a tensor
/// product of the 1-d rule, for dimensions up to 3.
pub fn integrate_box<F: FnMut(&[f64]) -> f64>(
    rule: &GaussLegendre,
    lo: &[f64],
    hi: &[f64],
    mut f: F,
) -> f64 {
    debug_assert_eq!(lo.len(), hi.len());
    let d = lo.len();
    debug_assert!((1..=3).contains(&d));
    let n = rule.nodes.len();
    let mut mids = alloc::vec![0.0f64; d];
    let mut halves = alloc::vec![0.0f64; d];
    for i in 0..d {
        mids[i] = 0.5 * (lo[i] + hi[i]);
        halves[i] = 0.5 * (hi[i] - lo[i]);
    }
    let volume_scale: f64 = halves.iter().product();
    let mut acc = KahanSum::new();
    let mut x = alloc::vec![0.0f64; d];
    match d {
        1 => {
            for a in 0..n {
                x[0] = mids[0] + halves[0] * rule.nodes[a];
                acc.add(rule.weights[a] * f(&x));
            }
        }
        2 => {
            for a in 0..n {
                x[0] = mids[0] + halves[0] * rule.nodes[a];
                for b in 0..n {
                    x[1] = mids[1] + halves[1] * rule.nodes[b];
                    acc.add(rule.weights[a] * rule.weights[b] * f(&x));
                }
            }
        }
        _ => {
            for a in 0..n {
                x[0] = mids[0] + halves[0] * rule.nodes[a];
                for b in 0..n {
                    x[1] = mids[1] + halves[1] * rule.nodes[b];
                    for c in 0..n {
                        x[2] = mids[2] + halves[2] * rule.nodes[c];
                        acc.add(rule.weights[a] * rule.weights[b] * rule.weights[c] * f(&x));
                    }
                }
            }
        }
    }
    volume_scale * acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_match_published_values() {
        // 4-point rule from standard tables.
        let rule = GaussLegendre::new(4);
        let expect_nodes = [
            -0.8611363115940526,
            -0.3399810435848563,
            0.3399810435848563,
            0.8611363115940526,
        ];
        let expect_weights = [
            0.3478548451374538,
            0.6521451548625461,
            0.6521451548625461,
            0.3478548451374538,
        ];
        for (got, want) in rule.nodes.iter().zip(expect_nodes) {
            assert!((got - want).abs() < 1e-14);
        }
        for (got, want) in rule.weights.iter().zip(expect_weights) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [2usize, 5, 16, 32] {
            let rule = GaussLegendre::new(n);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // Degree 2n-1 polynomials are exact: x^7 over [0, 2].
        let rule = GaussLegendre::new(4);
        let got = rule.integrate(0.0, 2.0, |x| x.powi(7));
        assert!((got - 32.0).abs() < 1e-12);
    }

    #[test]
    fn box_integration_matches_product() {
        let rule = GaussLegendre::new(8);
        // ∫∫ x y^2 over [0,1]x[0,2] = (1/2)(8/3).
        let got = integrate_box(&rule, &[0.0, 0.0], &[1.0, 2.0], |x| x[0] * x[1] * x[1]);
        assert!((got - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral_over_wide_interval() {
        let rule = GaussLegendre::new(32);
        let mut acc = 0.0;
        // Piece the integral into unit cells like the metric quadrature does.
        for k in -8..8 {
            acc += rule.integrate(k as f64, k as f64 + 1.0, |x| {
                (-0.5 * x * x).exp() / (2.0 * core::f64::consts::PI).sqrt()
            });
        }
        assert!((acc - 1.0).abs() < 1e-12);
    }
}
