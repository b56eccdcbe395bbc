//! Least-squares rate fitting for residual sweeps.

use alloc::vec::Vec;

use crate::math::ln;

/// Result of a least-squares line fit in log-log coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Fits `ln y = slope * ln x + intercept` by least squares.
///
/// Returns `None` when fewer than two points remain after dropping
/// non-positive coordinates (which have no logarithm).
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<SlopeFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|&(x, y)| (ln(x), ln(y)))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|(x, _)| x).sum();
    let sy: f64 = logs.iter().map(|(_, y)| y).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Some(SlopeFit { slope, intercept })
}

/// `max/min` over strictly positive values: the stability measure used for
/// fitted constants. `None` if no positive values are present.
pub fn stability_ratio(values: &[f64]) -> Option<f64> {
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    for &v in values {
        if v > 0.0 && v.is_finite() {
            min = min.min(v);
            max = max.max(v);
        }
    }
    if max > 0.0 && min.is_finite() {
        Some(max / min)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn recovers_exact_power_law() {
        // y = 3 x^{-2}
        let pts: Vec<(f64, f64)> = [64.0, 128.0, 256.0, 512.0]
            .iter()
            .map(|&x: &f64| (x, 3.0 * x.powi(-2)))
            .collect();
        let fit = log_log_slope(&pts).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn drops_nonpositive_points() {
        let pts = vec![(1.0, 0.0), (2.0, 4.0), (4.0, 16.0)];
        let fit = log_log_slope(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(log_log_slope(&[(1.0, 0.0), (2.0, -1.0)]).is_none());
    }

    #[test]
    fn stability_ratio_ignores_zeros() {
        assert_eq!(stability_ratio(&[2.0, 4.0, 0.0]), Some(2.0));
        assert_eq!(stability_ratio(&[0.0, 0.0]), None);
    }
}
