//! Trigonometric interpolation on perturbed grids.
//!
//! The degree-`N` interpolant through `K = 2N + 1` samples is represented by
//! its coefficients, `t(x) = sum_{j=-N}^{N} c_j e^{ijx}`, recovered by one
//! dense solve of the Vandermonde-type system `A c = f`,
//! `A_{k,j} = e^{i j x~_k}`. Coefficients are the canonical representation;
//! the Lagrange cardinal products
//!
//! ```text
//! l~_k(x) = prod_{j != k} sin((x - x~_j)/2) / sin((x~_k - x~_j)/2)
//! ```
//!
//! are evaluated only for Lebesgue-type quantities, always in the log domain
//! ([`crate::numerics::SignedLogValue`]) because the raw products underflow
//! `f64` once `K` reaches a few hundred.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::grid::PerturbedGrid;
use crate::numerics::{self, signed_log_product, ComplexMatrix, SignedLogValue};

#[derive(Debug, Error)]
pub enum InterpError {
    #[error("coefficient array length {0} is not odd")]
    EvenLength(usize),
    #[error("sample array has length {got}, expected K = {expected}")]
    SampleCount { expected: usize, got: usize },
    #[error("coefficients and samples must be finite")]
    NonFinite,
    #[error("interpolation system solve failed: {0}")]
    Solve(#[from] numerics::NumericsError),
}

// ---------------------------------------------------------------------------
// Trigonometric polynomials
// ---------------------------------------------------------------------------

/// A trigonometric polynomial `t(x) = sum_{j=-N}^{N} c_j e^{ijx}`.
///
/// Coefficients are stored in index order `j = -N..=N` (slice position
/// `j + N`); the length is always odd.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, InterpError> {
        if coeffs.len() % 2 == 0 {
            return Err(InterpError::EvenLength(coeffs.len()));
        }
        if !coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(InterpError::NonFinite);
        }
        let n = (coeffs.len() - 1) / 2;
        Ok(TrigPoly { n, coeffs })
    }

    /// Build from a coefficient function `f(j)` for `j = -N..=N`.
    pub fn from_coeff_fn(n: usize, f: impl FnMut(i64) -> Complex64) -> Result<Self, InterpError> {
        let ni = n as i64;
        let coeffs: Vec<Complex64> = (-ni..=ni).map(f).collect();
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Coefficient `c_j`; zero outside `-N..=N`.
    pub fn coeff(&self, j: i64) -> Complex64 {
        let ni = self.n as i64;
        if (-ni..=ni).contains(&j) {
            self.coeffs[(j + ni) as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Coefficients in index order `j = -N..=N`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Sum of coefficient magnitudes (used for exactness tolerances).
    pub fn coeff_norm_one(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        eval_poly(self, x)
    }
}

/// Range-reduce `x` to `[-pi, pi)` with a two-term representation of `2*pi`
/// so that evaluation is 2*pi-periodic to roundoff even for large arguments.
pub(crate) fn reduce_period(x: f64) -> f64 {
    const TWO_PI_HI: f64 = 6.283185307179586;
    const TWO_PI_LO: f64 = 2.4492935982947064e-16;
    let n = (x / (2.0 * PI)).round();
    let mut r = x - n * TWO_PI_HI;
    r -= n * TWO_PI_LO;
    r
}

/// Evaluate `p` at `x` by Horner recurrence in `z = e^{ix}`:
/// `t(x) = e^{-iNx} * sum_{m=0}^{2N} c_{m-N} z^m`.
pub fn eval_poly(p: &TrigPoly, x: f64) -> Complex64 {
    let xr = reduce_period(x);
    let z = Complex64::from_polar(1.0, xr);
    let mut acc = Complex64::new(0.0, 0.0);
    for c in p.coeffs.iter().rev() {
        acc = acc * z + c;
    }
    let swing = Complex64::from_polar(1.0, -(p.n as f64) * xr);
    acc * swing
}

// ---------------------------------------------------------------------------
// Cardinal functions
// ---------------------------------------------------------------------------

/// Evaluate the cardinal function `l~_k(x)` directly.
///
/// Numerator and denominator products are each accumulated with
/// [`signed_log_product`], so the quotient is formed from two log-domain
/// values and never underflows for supported grid sizes. When `x` is exactly
/// node `k` the result is exactly 1.
pub fn cardinal(pg: &PerturbedGrid, k: i64, x: f64) -> f64 {
    let xk = pg.node(k);
    if x == xk {
        return 1.0;
    }
    let nodes = pg.nodes();
    let n = pg.degree() as i64;
    let kpos = (k + n) as usize;

    let mut num_factors = Vec::with_capacity(nodes.len() - 1);
    let mut den_factors = Vec::with_capacity(nodes.len() - 1);
    for (j, &xj) in nodes.iter().enumerate() {
        if j == kpos {
            continue;
        }
        num_factors.push(((x - xj) / 2.0).sin());
        den_factors.push(((xk - xj) / 2.0).sin());
    }
    let num = signed_log_product(&num_factors);
    let den = signed_log_product(&den_factors);
    num.div(den).value()
}

/// Precomputed cardinal denominators for one grid.
///
/// The denominators `D_k = prod_{j != k} sin((x~_k - x~_j)/2)` cost `O(K^2)`
/// once; afterwards every cardinal value — and the full Lebesgue function
/// `L~(x) = sum_k |l~_k(x)|` — needs only the `O(K)` shared numerator
/// factors at `x`. Methods take `&mut self` for an internal scratch buffer;
/// clone the table to evaluate from several threads.
#[derive(Clone, Debug)]
pub struct CardinalTable {
    nodes: Vec<f64>,
    log_den: Vec<SignedLogValue>,
    scratch: Vec<f64>,
}

impl CardinalTable {
    pub fn new(pg: &PerturbedGrid) -> Self {
        let nodes = pg.nodes().to_vec();
        let k_len = nodes.len();
        let mut log_den = Vec::with_capacity(k_len);
        let mut factors = Vec::with_capacity(k_len - 1);
        for k in 0..k_len {
            factors.clear();
            for j in 0..k_len {
                if j != k {
                    factors.push(((nodes[k] - nodes[j]) / 2.0).sin());
                }
            }
            let d = signed_log_product(&factors);
            debug_assert!(!d.is_zero(), "coincident nodes in cardinal denominator");
            log_den.push(d);
        }
        CardinalTable {
            nodes,
            log_den,
            scratch: vec![0.0; k_len],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn degree(&self) -> i64 {
        (self.nodes.len() as i64 - 1) / 2
    }

    /// `l~_k(x)` in `O(K)` using the precomputed denominator.
    pub fn cardinal(&mut self, k: i64, x: f64) -> f64 {
        let kpos = (k + self.degree()) as usize;
        let xk = self.nodes[kpos];
        if x == xk {
            return 1.0;
        }
        let mut log_num = 0.0f64;
        let mut sign: i8 = 1;
        for (j, &xj) in self.nodes.iter().enumerate() {
            if j == kpos {
                continue;
            }
            let t = ((x - xj) / 2.0).sin();
            if t == 0.0 {
                return 0.0;
            }
            if t < 0.0 {
                sign = -sign;
            }
            log_num += t.abs().ln();
        }
        let den = self.log_den[kpos];
        let q = SignedLogValue {
            log_magnitude: log_num,
            sign,
        };
        q.div(den).value()
    }

    /// Lebesgue function `L~(x) = sum_k |l~_k(x)|` in `O(K)`.
    ///
    /// The shared numerator `S(x) = prod_j sin((x - x~_j)/2)` is accumulated
    /// once in the log domain; term `k` is `exp(S - s_k - D_k)` with `s_k`
    /// the `k`-th log-factor. An `x` colliding with a node contributes its
    /// own cardinal value 1 and zeros elsewhere, which the zero-count branch
    /// reproduces exactly.
    pub fn lebesgue_function(&mut self, x: f64) -> f64 {
        let k_len = self.nodes.len();
        let mut total_log = 0.0f64;
        let mut zero_at: Option<usize> = None;
        for j in 0..k_len {
            let t = ((x - self.nodes[j]) / 2.0).sin();
            if t == 0.0 {
                // Nodes are distinct mod 2*pi, so at most one factor
                // vanishes for a given x.
                debug_assert!(zero_at.is_none(), "two vanishing cardinal factors");
                zero_at = Some(j);
                self.scratch[j] = f64::NEG_INFINITY;
            } else {
                let lt = t.abs().ln();
                self.scratch[j] = lt;
                total_log += lt;
            }
        }
        match zero_at {
            Some(j0) => {
                // Only term j0 survives; total_log already excludes factor j0.
                (total_log - self.log_den[j0].log_magnitude).exp()
            }
            None => {
                let mut sum = 0.0;
                for k in 0..k_len {
                    sum +=
                        (total_log - self.scratch[k] - self.log_den[k].log_magnitude).exp();
                }
                sum
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Interpolation and error measurement
// ---------------------------------------------------------------------------

/// Interpolate `samples[k] = f(x~_k)` (index order `k = -N..=N`) by the
/// unique degree-`N` trigonometric polynomial through the grid.
///
/// Solves `A c = f` with `A_{k,j} = e^{i j x~_k}`. The system is nonsingular
/// for every admissible grid (`alpha < 1/2` keeps nodes distinct mod 2*pi),
/// so a singular-solve error here indicates inadmissible input.
pub fn interpolate(pg: &PerturbedGrid, samples: &[Complex64]) -> Result<TrigPoly, InterpError> {
    let k_len = pg.len();
    if samples.len() != k_len {
        return Err(InterpError::SampleCount {
            expected: k_len,
            got: samples.len(),
        });
    }
    if !samples.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        return Err(InterpError::NonFinite);
    }
    let n = pg.degree() as i64;
    let nodes = pg.nodes();
    let a = ComplexMatrix::from_fn(k_len, k_len, |r, c| {
        let j = (c as i64 - n) as f64;
        Complex64::from_polar(1.0, j * nodes[r])
    });
    let coeffs = numerics::solve_dense(&a, samples)?;
    Ok(TrigPoly {
        n: pg.degree(),
        coeffs,
    })
}

/// Maximum of `|f(x) - p(x)|` over `[-pi, pi)`.
///
/// Samples `resolution` equispaced points plus every midpoint of circularly
/// adjacent grid nodes, then sharpens the discrete argmax with one
/// golden-section pass (window one equispaced step wide, terminated at
/// `1e-10` in `x`). `resolution` must be at least `10 * K` so the sample set
/// resolves every oscillation of the degree-`N` error.
pub fn sup_error(
    f: impl Fn(f64) -> f64,
    p: &TrigPoly,
    pg: &PerturbedGrid,
    resolution: usize,
) -> f64 {
    assert!(
        resolution >= 10 * pg.len(),
        "resolution {} is below 10*K = {}",
        resolution,
        10 * pg.len()
    );
    let err_at = |x: f64| {
        let fx = Complex64::new(f(x), 0.0);
        (fx - eval_poly(p, x)).norm()
    };

    let step = 2.0 * PI / resolution as f64;
    let mut best_x = -PI;
    let mut best = err_at(-PI);
    for i in 1..resolution {
        let x = -PI + step * i as f64;
        let e = err_at(x);
        if e > best {
            best = e;
            best_x = x;
        }
    }
    let nodes = pg.nodes();
    for i in 0..nodes.len() {
        let next = if i + 1 < nodes.len() {
            nodes[i + 1]
        } else {
            nodes[0] + 2.0 * PI
        };
        let mid = reduce_period((nodes[i] + next) / 2.0);
        let e = err_at(mid);
        if e > best {
            best = e;
            best_x = mid;
        }
    }

    // Golden-section sharpening around the discrete argmax.
    let refined = golden_max(&mut |x| err_at(x), best_x - step, best_x + step, 1e-10);
    best.max(refined.1)
}

/// Golden-section search for the maximum of `g` on `[a, b]`; returns
/// `(argmax, max)`. Assumes `g` is unimodal on the window, which holds for
/// the one-sample-step windows this module feeds it.
pub(crate) fn golden_max(g: &mut impl FnMut(f64) -> f64, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618033988749894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    while hi - lo > xtol {
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        }
    }
    let xm = 0.5 * (lo + hi);
    let gm = g(xm);
    if gm >= g1 && gm >= g2 {
        (xm, gm)
    } else if g1 >= g2 {
        (x1, g1)
    } else {
        (x2, g2)
    }
}
