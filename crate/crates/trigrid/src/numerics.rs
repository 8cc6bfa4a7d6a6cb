//! Shared numerical kernels: dense complex solves, smallest singular values,
//! log-domain signed products, and adaptive quadrature.
//!
//! The interpolation and quadrature modules reduce to moderately sized dense
//! complex systems (a few thousand unknowns at most), so the solver here is a
//! straightforward partial-pivot LU kept in-crate for full control over the
//! singularity contract. Singular values go through `faer`, pinned to
//! sequential mode so results are bitwise reproducible regardless of how many
//! worker threads a sweep uses.

use std::collections::BinaryHeap;
use std::sync::Once;

use num_complex::Complex64;
use thiserror::Error;

/// Largest square system [`solve_dense`] accepts (matches the `K = 4097`
/// grid-size cap).
pub const MAX_SOLVE_SIZE: usize = 4097;

/// Largest matrix [`min_singular_value`] accepts. SVD cost grows like `n^3`;
/// 2-norm studies cap out well below this.
pub const MAX_SVD_SIZE: usize = 1025;

/// Tightest tolerance [`adaptive_integrate`] will chase.
pub const MIN_INTEGRATE_TOL: f64 = 1e-12;

/// Function-evaluation budget for one adaptive integration call.
const INTEGRATE_EVAL_BUDGET: usize = 2_000_000;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: matrix is {n}x{n} but right-hand side has length {len}")]
    RhsLength { n: usize, len: usize },
    #[error("matrix size {0} exceeds supported maximum {1}")]
    TooLarge(usize, usize),
    #[error("matrix is singular to working precision (pivot {pivot:.3e} at column {col})")]
    Singular { pivot: f64, col: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("singular value decomposition failed to converge")]
    SvdFailed,
    #[error("integration tolerance {0:.3e} is below the supported minimum {MIN_INTEGRATE_TOL:.0e}")]
    ToleranceTooTight(f64),
    #[error("integration interval [{a}, {b}] is invalid")]
    BadInterval { a: f64, b: f64 },
    #[error(
        "adaptive integration did not converge: best estimate {best:.12e}, \
         error estimate {err_estimate:.3e}"
    )]
    NoConvergence { best: f64, err_estimate: f64 },
}

// ---------------------------------------------------------------------------
// Dense complex matrices
// ---------------------------------------------------------------------------

/// Dense row-major complex matrix.
///
/// Just enough linear algebra for Vandermonde-type systems: construction,
/// element access, matrix-vector products. Factorizations live in the free
/// functions below.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix. Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Build from an entry function `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `A * x`. Panics on dimension mismatch (programming error, not data).
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "mul_vec dimension mismatch");
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y[i] = acc;
        }
        y
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Solve `A x = b` by LU with partial pivoting.
///
/// A pivot is declared singular when its magnitude falls below
/// `n * eps * max|A_ij|`, i.e. when the factorization would amplify roundoff
/// past any useful accuracy. The perturbed-grid Vandermonde systems this
/// serves are provably nonsingular for `alpha < 1/2`, so a singular return
/// signals bad input rather than an expected branch.
pub fn solve_dense(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, NumericsError> {
    if a.rows != a.cols {
        return Err(NumericsError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    if n > MAX_SOLVE_SIZE {
        return Err(NumericsError::TooLarge(n, MAX_SOLVE_SIZE));
    }
    if b.len() != n {
        return Err(NumericsError::RhsLength { n, len: b.len() });
    }
    if !a.is_finite() || !b.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(NumericsError::NonFinite);
    }

    let scale = a.max_abs();
    let pivot_floor = (n as f64) * f64::EPSILON * scale;

    let mut lu = a.data.clone();
    let mut x: Vec<Complex64> = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for col in 0..n {
        // Pivot search on |.| down the column.
        let mut best = col;
        let mut best_mag = lu[perm[col] * n + col].norm();
        for row in col + 1..n {
            let mag = lu[perm[row] * n + col].norm();
            if mag > best_mag {
                best_mag = mag;
                best = row;
            }
        }
        if best_mag <= pivot_floor {
            return Err(NumericsError::Singular {
                pivot: best_mag,
                col,
            });
        }
        perm.swap(col, best);

        let prow = perm[col];
        let pivot = lu[prow * n + col];
        for row in col + 1..n {
            let r = perm[row];
            let factor = lu[r * n + col] / pivot;
            lu[r * n + col] = factor;
            for j in col + 1..n {
                let sub = factor * lu[prow * n + j];
                lu[r * n + j] -= sub;
            }
        }
    }

    // Forward substitution (L has unit diagonal, stored below it).
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let r = perm[i];
        let mut acc = x[r];
        for j in 0..i {
            acc -= lu[r * n + j] * y[j];
        }
        y[i] = acc;
    }

    // Back substitution.
    for i in (0..n).rev() {
        let r = perm[i];
        let mut acc = y[i];
        for j in i + 1..n {
            acc -= lu[r * n + j] * x[j];
        }
        x[i] = acc / lu[r * n + i];
    }

    Ok(x)
}

/// Smallest singular value of a square complex matrix.
///
/// Delegates to `faer`'s SVD, forced into sequential mode once per process so
/// that the value is identical no matter how many sweep workers are running.
pub fn min_singular_value(a: &ComplexMatrix) -> Result<f64, NumericsError> {
    if a.rows != a.cols {
        return Err(NumericsError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    if n > MAX_SVD_SIZE {
        return Err(NumericsError::TooLarge(n, MAX_SVD_SIZE));
    }
    if !a.is_finite() {
        return Err(NumericsError::NonFinite);
    }

    static FAER_SEQ: Once = Once::new();
    FAER_SEQ.call_once(|| {
        faer::set_global_parallelism(faer::Par::Seq);
    });

    let m = faer::Mat::from_fn(n, n, |i, j| {
        let z = a.get(i, j);
        faer::c64::new(z.re, z.im)
    });
    let svd = m.svd().map_err(|_| NumericsError::SvdFailed)?;
    // Singular values are returned in descending order.
    let smin = svd.S()[n - 1].re;
    Ok(smin)
}

// ---------------------------------------------------------------------------
// Log-domain signed products
// ---------------------------------------------------------------------------

/// A real number stored as `sign * exp(log_magnitude)`.
///
/// Products of thousands of half-angle sines underflow `f64` long before the
/// quotients of interest do; carrying the log of the magnitude and the sign
/// separately keeps every intermediate exactly representable. Invariant:
/// `sign == 0` if and only if `log_magnitude == -inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedLogValue {
    pub log_magnitude: f64,
    pub sign: i8,
}

impl SignedLogValue {
    pub const ONE: SignedLogValue = SignedLogValue {
        log_magnitude: 0.0,
        sign: 1,
    };

    pub const ZERO: SignedLogValue = SignedLogValue {
        log_magnitude: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn from_value(v: f64) -> Self {
        assert!(!v.is_nan(), "SignedLogValue::from_value(NaN)");
        if v == 0.0 {
            Self::ZERO
        } else {
            SignedLogValue {
                log_magnitude: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Back to an ordinary `f64`; may overflow to `+-inf` or underflow to 0.
    pub fn value(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            (self.sign as f64) * self.log_magnitude.exp()
        }
    }

    pub fn mul(self, other: SignedLogValue) -> SignedLogValue {
        if self.sign == 0 || other.sign == 0 {
            return Self::ZERO;
        }
        SignedLogValue {
            log_magnitude: self.log_magnitude + other.log_magnitude,
            sign: self.sign * other.sign,
        }
    }

    /// Division; the divisor must be nonzero (callers divide by node-gap
    /// products that are nonzero by construction).
    pub fn div(self, other: SignedLogValue) -> SignedLogValue {
        assert!(other.sign != 0, "SignedLogValue division by zero");
        if self.sign == 0 {
            return Self::ZERO;
        }
        SignedLogValue {
            log_magnitude: self.log_magnitude - other.log_magnitude,
            sign: self.sign * other.sign,
        }
    }
}

/// Product of the factors, accumulated in the log domain.
pub fn signed_log_product(factors: &[f64]) -> SignedLogValue {
    let mut sign: i8 = 1;
    let mut log_mag = 0.0f64;
    for &f in factors {
        assert!(!f.is_nan(), "signed_log_product factor is NaN");
        if f == 0.0 {
            return SignedLogValue::ZERO;
        }
        if f < 0.0 {
            sign = -sign;
        }
        log_mag += f.abs().ln();
    }
    SignedLogValue {
        log_magnitude: log_mag,
        sign,
    }
}

// ---------------------------------------------------------------------------
// Adaptive quadrature (Gauss-Kronrod 7/15 with global refinement)
// ---------------------------------------------------------------------------

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss rule on the odd-indexed abscissae.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod 7/15 pass over `[lo, hi]`: returns the Kronrod value
/// and `|K15 - G7|` as the error estimate.
fn gk15(f: &mut impl FnMut(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let fsum = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

#[derive(Debug)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.lo == other.lo
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Max-heap on error estimate; tie-break on position for determinism.
        self.err
            .total_cmp(&other.err)
            .then(self.lo.total_cmp(&other.lo))
    }
}

/// Adaptive integration of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Globally adaptive Gauss-Kronrod 7/15: the panel with the largest error
/// estimate is bisected until the summed estimate meets `tol`. Integrable
/// endpoint or interior singularities are handled by the subdivision itself;
/// if the singularity location is known, pass it through
/// [`adaptive_integrate_with_hints`] to seed the partition there.
pub fn adaptive_integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, NumericsError> {
    adaptive_integrate_with_hints(f, a, b, tol, &[])
}

/// [`adaptive_integrate`] with interior break points (singularities, kinks).
///
/// Hints outside `(a, b)` are ignored. Each hinted point becomes a panel
/// boundary, so the rule never straddles the rough spot and convergence of
/// the refinement loop is restored to the smooth-panel rate.
pub fn adaptive_integrate_with_hints(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    hints: &[f64],
) -> Result<f64, NumericsError> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(NumericsError::BadInterval { a, b });
    }
    if !(tol.is_finite()) || tol < MIN_INTEGRATE_TOL {
        return Err(NumericsError::ToleranceTooTight(tol));
    }

    let evals = std::cell::Cell::new(0usize);
    let mut eval = |x: f64| {
        evals.set(evals.get() + 1);
        f(x)
    };

    // Seed panels: [a, h1], [h1, h2], ..., [hn, b] with hints sorted and
    // restricted to the open interval.
    let mut cuts: Vec<f64> = hints.iter().copied().filter(|&h| h > a && h < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    // Panels too narrow to bisect are accumulated here and no longer refined;
    // their contribution to both value and error is kept.
    let mut frozen_value = 0.0f64;
    let mut frozen_err = 0.0f64;

    for w in edges.windows(2) {
        let (value, err) = gk15(&mut eval, w[0], w[1]);
        heap.push(Panel {
            lo: w[0],
            hi: w[1],
            value,
            err,
        });
    }

    loop {
        let heap_err: f64 = heap.iter().map(|p| p.err).sum();
        let total_err = heap_err + frozen_err;
        if total_err <= tol {
            let sum: f64 = frozen_value + heap.iter().map(|p| p.value).sum::<f64>();
            return Ok(sum);
        }
        if evals.get() >= INTEGRATE_EVAL_BUDGET {
            let best = frozen_value + heap.iter().map(|p| p.value).sum::<f64>();
            return Err(NumericsError::NoConvergence {
                best,
                err_estimate: total_err,
            });
        }

        let worst = heap.pop().expect("heap cannot be empty while err > 0");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Width at the resolution limit of f64; accept as-is.
            frozen_value += worst.value;
            frozen_err += worst.err;
            continue;
        }
        let (v1, e1) = gk15(&mut eval, worst.lo, mid);
        let (v2, e2) = gk15(&mut eval, mid, worst.hi);
        heap.push(Panel {
            lo: worst.lo,
            hi: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            lo: mid,
            hi: worst.hi,
            value: v2,
            err: e2,
        });
    }
}
