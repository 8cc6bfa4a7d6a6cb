//! Periodic quadrature: the trapezoidal rule on equispaced grids and its
//! interpolatory generalization to perturbed grids.
//!
//! On the equispaced grid the trapezoidal rule `h * sum_k f(x_k)` integrates
//! every trig polynomial of degree `<= N` exactly and equals `2*pi*c_0` of
//! the interpolant. Perturbing the nodes breaks the equal weighting: the
//! interpolatory weights are recovered from the moment conditions
//!
//! ```text
//! sum_k w_k e^{i j x~_k} = 2*pi*delta_{j0},   |j| <= N,
//! ```
//!
//! one dense transposed-Vandermonde solve. The Polya sum `sum_k |w_k|`
//! measures how far the rule strays from positivity — bounded Polya sums are
//! exactly what keeps perturbed quadrature convergent for merely continuous
//! integrands.

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::PerturbedGrid;
use crate::interp::{self, TrigPoly};
use crate::numerics::{self, ComplexMatrix};

/// Largest admissible imaginary part of a solved weight; anything bigger
/// indicates the moment system was not solved to working precision.
pub const WEIGHT_IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("sample array has length {got}, expected K = {expected}")]
    SampleCount { expected: usize, got: usize },
    #[error("samples must be finite")]
    NonFinite,
    #[error("moment system solve failed: {0}")]
    Solve(#[from] numerics::NumericsError),
    #[error(
        "solved weights are not real: max imaginary part {max_imag:.3e} exceeds {WEIGHT_IMAG_TOL:.0e}"
    )]
    ComplexWeights { max_imag: f64 },
    #[error("weight normalization drifted: sum w = {sum:.17e}, expected 2*pi")]
    BadNormalization { sum: f64 },
}

/// Trapezoidal rule `h * sum_k samples[k]` for a periodic integrand sampled
/// on an equispaced grid with spacing `h`.
pub fn trapezoid(samples: &[Complex64], h: f64) -> Complex64 {
    let s: Complex64 = samples.iter().sum();
    s * h
}

/// Interpolatory quadrature weights on a perturbed grid.
///
/// Weights are stored in node index order `k = -N..=N` alongside the grid
/// they belong to; construction validates that they are real up to
/// [`WEIGHT_IMAG_TOL`] and normalized to `sum w_k = 2*pi`.
#[derive(Clone, Debug)]
pub struct QuadRule {
    grid: PerturbedGrid,
    weights: Vec<f64>,
}

impl QuadRule {
    pub fn grid(&self) -> &PerturbedGrid {
        &self.grid
    }

    /// Weights in node index order `k = -N..=N`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, k: i64) -> f64 {
        let n = self.grid.degree() as i64;
        assert!((-n..=n).contains(&k), "weight index {k} out of range");
        self.weights[(k + n) as usize]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Residual `|sum_k w_k e^{i j x~_k} - 2*pi*delta_{j0}|` of one moment
    /// condition.
    pub fn moment_residual(&self, j: i64) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&w, &x) in self.weights.iter().zip(self.grid.nodes()) {
            acc += Complex64::from_polar(w, j as f64 * x);
        }
        if j == 0 {
            acc -= Complex64::new(2.0 * std::f64::consts::PI, 0.0);
        }
        acc.norm()
    }

    /// Largest moment residual over `|j| <= N` (an `O(K^2)` certification).
    pub fn max_moment_residual(&self) -> f64 {
        let n = self.grid.degree() as i64;
        (-n..=n)
            .map(|j| self.moment_residual(j))
            .fold(0.0, f64::max)
    }
}

/// Solve the moment conditions for the interpolatory weights on `pg`.
///
/// The system is the transpose of the interpolation Vandermonde matrix:
/// `M_{j,k} = e^{i j x~_k}`, right-hand side `2*pi*e_0`. Nonsingular for all
/// admissible grids, so failures indicate inadmissible input.
pub fn quad_weights(pg: &PerturbedGrid) -> Result<QuadRule, QuadratureError> {
    let k_len = pg.len();
    let n = pg.degree() as i64;
    let nodes = pg.nodes();
    let m = ComplexMatrix::from_fn(k_len, k_len, |r, c| {
        let j = (r as i64 - n) as f64;
        Complex64::from_polar(1.0, j * nodes[c])
    });
    let mut rhs = vec![Complex64::new(0.0, 0.0); k_len];
    rhs[n as usize] = Complex64::new(2.0 * std::f64::consts::PI, 0.0);

    let w_complex = numerics::solve_dense(&m, &rhs)?;
    let max_imag = w_complex.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_imag > WEIGHT_IMAG_TOL {
        return Err(QuadratureError::ComplexWeights { max_imag });
    }
    let weights: Vec<f64> = w_complex.iter().map(|z| z.re).collect();

    let sum: f64 = weights.iter().sum();
    if (sum - 2.0 * std::f64::consts::PI).abs() > 1e-9 * k_len as f64 {
        return Err(QuadratureError::BadNormalization { sum });
    }

    Ok(QuadRule {
        grid: pg.clone(),
        weights,
    })
}

/// Quadrature estimate `I~_N = sum_k w_k * samples[k]`.
///
/// Agrees with `2*pi*c_0` of the interpolant through the same samples to
/// solver precision; both paths are exercised against each other in tests.
pub fn quad_estimate(rule: &QuadRule, samples: &[Complex64]) -> Result<Complex64, QuadratureError> {
    if samples.len() != rule.len() {
        return Err(QuadratureError::SampleCount {
            expected: rule.len(),
            got: samples.len(),
        });
    }
    if !samples.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        return Err(QuadratureError::NonFinite);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (&w, s) in rule.weights.iter().zip(samples) {
        acc += s * w;
    }
    Ok(acc)
}

/// Polya sum `sum_k |w_k|`; equals `2*pi` exactly when all weights are
/// positive.
pub fn polya_sum(rule: &QuadRule) -> f64 {
    rule.weights.iter().map(|w| w.abs()).sum()
}

/// `2*pi*c_0` of a trig polynomial: the exact integral of `p` over a period.
pub fn integral_of_poly(p: &TrigPoly) -> Complex64 {
    p.coeff(0) * 2.0 * std::f64::consts::PI
}

/// Convenience: interpolate the samples and integrate the interpolant
/// (the `2*pi*c_0` path). Used as the cross-check partner of
/// [`quad_estimate`].
pub fn integral_via_interpolant(
    pg: &PerturbedGrid,
    samples: &[Complex64],
) -> Result<Complex64, interp::InterpError> {
    let p = interp::interpolate(pg, samples)?;
    Ok(integral_of_poly(&p))
}
