//! Least-squares rate extraction for sweep data.
//!
//! Algebraic rates (`value ~ C * N^slope`) come from an ordinary
//! least-squares line through `(log N, log value)`; geometric rates
//! (`value ~ C * r^N`) fit `(N, log value)` instead, so `slope` is `log r`
//! and `exp(slope)` is the per-unit-`N` decay ratio.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("rate fit requires at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("rate fit requires positive values, got {value} at abscissa {abscissa}")]
    NonpositiveValue { abscissa: f64, value: f64 },
    #[error("abscissae must be positive and finite, got {0}")]
    BadAbscissa(f64),
    #[error("abscissae are all equal ({0}); slope is undefined")]
    DegenerateAbscissae(f64),
}

/// Result of a least-squares rate fit.
///
/// `degenerate` is set when the values carry no variation (constant data):
/// the slope is then reported as the fitted 0 and `r_squared` as 0 rather
/// than the 0/0 it formally is.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
    pub degenerate: bool,
}

/// Power-law fit `value ~ exp(intercept) * N^slope` by OLS on
/// `(log N, log value)`.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<RateFit, FitError> {
    let transformed = points
        .iter()
        .map(|&(n, v)| {
            if !(n > 0.0 && n.is_finite()) {
                return Err(FitError::BadAbscissa(n));
            }
            if !(v > 0.0 && v.is_finite()) {
                return Err(FitError::NonpositiveValue {
                    abscissa: n,
                    value: v,
                });
            }
            Ok((n.ln(), v.ln()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ols(&transformed)
}

/// Geometric fit `value ~ exp(intercept) * exp(slope * N)` by OLS on
/// `(N, log value)`; `exp(slope)` is the per-unit-`N` ratio.
pub fn geometric_fit(points: &[(f64, f64)]) -> Result<RateFit, FitError> {
    let transformed = points
        .iter()
        .map(|&(n, v)| {
            if !n.is_finite() {
                return Err(FitError::BadAbscissa(n));
            }
            if !(v > 0.0 && v.is_finite()) {
                return Err(FitError::NonpositiveValue {
                    abscissa: n,
                    value: v,
                });
            }
            Ok((n, v.ln()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ols(&transformed)
}

fn ols(pts: &[(f64, f64)]) -> Result<RateFit, FitError> {
    if pts.len() < 3 {
        return Err(FitError::TooFewPoints(pts.len()));
    }
    let m = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();

    if sxx <= f64::EPSILON * m * (1.0 + mean_x * mean_x) {
        return Err(FitError::DegenerateAbscissae(mean_x));
    }

    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;

    // Constant data: the line y = mean_y fits exactly but r^2 is 0/0;
    // report slope 0, r^2 = 0, and flag it.
    let var_floor = f64::EPSILON * m * (1.0 + mean_y * mean_y);
    if syy <= var_floor {
        return Ok(RateFit {
            slope: 0.0,
            intercept: mean_y,
            r_squared: 0.0,
            points_used: pts.len(),
            degenerate: true,
        });
    }

    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let r_squared = (1.0 - ss_res / syy).clamp(0.0, 1.0);

    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        points_used: pts.len(),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_law_is_recovered() {
        let pts = [(10.0, 100.0), (20.0, 400.0), (40.0, 1600.0)];
        let fit = rate_fit(&pts).unwrap();
        assert_relative_eq!(fit.slope, 2.0, max_relative = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, max_relative = 1e-12);
        assert_eq!(fit.points_used, 3);
        assert!(!fit.degenerate);
    }

    #[test]
    fn inverse_square_decay() {
        let pts: Vec<(f64, f64)> = [8.0f64, 16.0, 32.0, 64.0, 128.0]
            .iter()
            .map(|&n| (n, n.powi(-2)))
            .collect();
        let fit = rate_fit(&pts).unwrap();
        assert_relative_eq!(fit.slope, -2.0, max_relative = 1e-12);
    }

    #[test]
    fn constant_data_flags_degenerate() {
        let pts = [(8.0, 3.0), (16.0, 3.0), (32.0, 3.0)];
        let fit = rate_fit(&pts).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.r_squared, 0.0);
    }

    #[test]
    fn geometric_fit_recovers_ratio() {
        // value = 7 * (1/2)^N.
        let pts: Vec<(f64, f64)> = (5..12).map(|n| (n as f64, 7.0 * 0.5f64.powi(n))).collect();
        let fit = geometric_fit(&pts).unwrap();
        assert_relative_eq!(fit.slope.exp(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(fit.intercept.exp(), 7.0, max_relative = 1e-10);
    }

    #[test]
    fn noisy_power_law_r_squared_below_one() {
        let pts = [
            (8.0, 64.5),
            (16.0, 250.0),
            (32.0, 1030.0),
            (64.0, 4000.0),
        ];
        let fit = rate_fit(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 0.05);
        assert!(fit.r_squared > 0.99 && fit.r_squared < 1.0);
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            rate_fit(&[(8.0, 1.0), (16.0, 2.0)]),
            Err(FitError::TooFewPoints(2))
        ));
        assert!(matches!(
            rate_fit(&[(8.0, 1.0), (16.0, -2.0), (32.0, 4.0)]),
            Err(FitError::NonpositiveValue { .. })
        ));
        assert!(matches!(
            rate_fit(&[(-8.0, 1.0), (16.0, 2.0), (32.0, 4.0)]),
            Err(FitError::BadAbscissa(_))
        ));
        assert!(matches!(
            rate_fit(&[(8.0, 1.0), (8.0, 2.0), (8.0, 4.0)]),
            Err(FitError::DegenerateAbscissae(_))
        ));
    }
}
