//! Periodic test integrands with certified regularity and exact integrals.
//!
//! Two families drive every convergence experiment:
//!
//! * `smooth:<sigma>` — `f_sigma(x) = |sin(x/2)|^sigma`, whose single
//!   singularity at `x = 0` has Holder index exactly `sigma`. The function
//!   "has sigma derivatives" in the Jackson sense, so best trig approximation
//!   decays like `N^{-sigma}`.
//! * `analytic:<b>` — `f_b(x) = 1/(b - cos x)` with `b > 1`, which continues
//!   analytically to the strip `|Im x| < a`, `a = log(b + sqrt(b^2 - 1))`,
//!   giving geometric decay `e^{-aN}`.
//!
//! Exact integrals come from closed forms where available and are always
//! cross-checked against the adaptive integrator. The singularity of the
//! smooth family sits at `x = 0` — a node of the unperturbed grid — which is
//! deliberately adversarial for interpolation; [`TestFunction::shifted`]
//! moves it off-node to probe sensitivity.

use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

use num_complex::Complex64;

use crate::numerics::{self, adaptive_integrate_with_hints};

/// Upper cap on the Holder exponent of the smooth family; beyond this the
/// singular part drowns in roundoff and "certified smoothness" stops meaning
/// anything.
pub const MAX_SIGMA: f64 = 8.0;

#[derive(Debug, Error)]
pub enum TestFnError {
    #[error("sigma must lie in (0, {MAX_SIGMA}], got {0}")]
    SigmaOutOfRange(f64),
    #[error("b must exceed 1 (pole on the real line at b = {0})")]
    PoleOnRealLine(f64),
    #[error("unknown test function label '{0}' (expected smooth:<sigma> or analytic:<b>)")]
    UnknownLabel(String),
    #[error("fine grid size {got} is below the required 64*K = {required}")]
    FineGridTooSmall { required: usize, got: usize },
    #[error("reference integration failed: {0}")]
    Integration(#[from] numerics::NumericsError),
}

/// Smoothness descriptor attached to each test function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Smoothness {
    /// "Has sigma derivatives": floor(sigma) classical derivatives plus
    /// Holder continuity of the top one.
    Holder { sigma: f64 },
    /// Analytic in the strip `|Im x| < strip`.
    Analytic { strip: f64 },
}

/// A 2*pi-periodic real test integrand with a certified exact integral.
#[derive(Clone)]
pub struct TestFunction {
    label: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    exact_integral: f64,
    smoothness: Smoothness,
    /// Singular abscissae within `[-pi, pi]`, handed to the adaptive
    /// integrator as panel boundaries.
    singularities: Vec<f64>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("exact_integral", &self.exact_integral)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl TestFunction {
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Exact integral over `[-pi, pi]`.
    pub fn exact_integral(&self) -> f64 {
        self.exact_integral
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Sample the function on a node set as complex values (imaginary part
    /// zero), the input format of the interpolation and quadrature kernels.
    pub fn sample_complex(&self, nodes: &[f64]) -> Vec<Complex64> {
        nodes
            .iter()
            .map(|&x| Complex64::new(self.eval(x), 0.0))
            .collect()
    }

    /// The same function translated by `dx`: `g(x) = f(x - dx)`. Integral and
    /// smoothness class are translation invariant; the singularity moves to
    /// `dx`, e.g. off the `x = 0` grid node.
    pub fn shifted(&self, dx: f64) -> TestFunction {
        let inner = Arc::clone(&self.eval);
        let singularities = self
            .singularities
            .iter()
            .map(|&s| {
                let mut t = s + dx;
                while t > PI {
                    t -= 2.0 * PI;
                }
                while t < -PI {
                    t += 2.0 * PI;
                }
                t
            })
            .collect();
        TestFunction {
            label: format!("{}@{:+.3}", self.label, dx),
            eval: Arc::new(move |x| inner(x - dx)),
            exact_integral: self.exact_integral,
            smoothness: self.smoothness,
            singularities,
        }
    }
}

/// `f_sigma(x) = |sin(x/2)|^sigma` for `0 < sigma <= 8`.
///
/// The exact integral has no elementary closed form for general `sigma`, so
/// it is computed once by adaptive integration at tolerance `1e-12` with the
/// singularity hinted at `x = 0`, and cached on the returned value.
pub fn make_smooth(sigma: f64) -> Result<TestFunction, TestFnError> {
    if !(sigma > 0.0 && sigma <= MAX_SIGMA) {
        return Err(TestFnError::SigmaOutOfRange(sigma));
    }
    let eval = move |x: f64| (x / 2.0).sin().abs().powf(sigma);
    let exact_integral = adaptive_integrate_with_hints(eval, -PI, PI, 1e-12, &[0.0])?;
    Ok(TestFunction {
        label: format!("smooth:{}", trim_float(sigma)),
        eval: Arc::new(eval),
        exact_integral,
        smoothness: Smoothness::Holder { sigma },
        singularities: vec![0.0],
    })
}

/// `f_b(x) = 1/(b - cos x)` for `b > 1`.
///
/// Analytic in the strip of half-width `a = log(b + sqrt(b^2 - 1))` (the pole
/// of the continuation sits at `x = i*a`); exact integral
/// `2*pi/sqrt(b^2 - 1)` in closed form.
pub fn make_analytic(b: f64) -> Result<TestFunction, TestFnError> {
    if !(b > 1.0) {
        return Err(TestFnError::PoleOnRealLine(b));
    }
    let eval = move |x: f64| 1.0 / (b - x.cos());
    let strip = (b + (b * b - 1.0).sqrt()).ln();
    Ok(TestFunction {
        label: format!("analytic:{}", trim_float(b)),
        eval: Arc::new(eval),
        exact_integral: 2.0 * PI / (b * b - 1.0).sqrt(),
        smoothness: Smoothness::Analytic { strip },
        singularities: Vec::new(),
    })
}

/// Parse a registry label: `smooth:<sigma>` or `analytic:<b>`.
pub fn from_label(label: &str) -> Result<TestFunction, TestFnError> {
    let mk_err = || TestFnError::UnknownLabel(label.to_string());
    let (family, param) = label.split_once(':').ok_or_else(mk_err)?;
    let value: f64 = param.parse().map_err(|_| mk_err())?;
    match family {
        "smooth" => make_smooth(value),
        "analytic" => make_analytic(value),
        _ => Err(mk_err()),
    }
}

fn trim_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Sup-norm proxy for the best degree-`N` trig approximation error.
///
/// Computes the Fourier coefficients of `f` by a discrete transform on a fine
/// equispaced grid of `fine_k` points (`fine_k >= 64*(2N+1)`), truncates to
/// degree `N`, and returns the maximum reconstruction error over the fine
/// grid. This is the truncated-Fourier-series error, which overestimates the
/// true best approximation by at most a slowly varying factor and carries the
/// same rate exponent — all the sweeps ever consume.
pub fn best_approx_proxy(f: &TestFunction, n: usize, fine_k: usize) -> Result<f64, TestFnError> {
    let required = 64 * (2 * n + 1);
    if fine_k < required {
        return Err(TestFnError::FineGridTooSmall {
            required,
            got: fine_k,
        });
    }

    let hf = 2.0 * PI / fine_k as f64;
    let samples: Vec<f64> = (0..fine_k).map(|m| f.eval(-PI + m as f64 * hf)).collect();

    // c_j = (1/fine_k) * sum_m f(y_m) e^{-i j y_m}, accumulated by phase
    // recurrence per j (O(fine_k) each, O(fine_k * N) total).
    let ni = n as i64;
    let mut coeffs = Vec::with_capacity(2 * n + 1);
    for j in -ni..=ni {
        let mut acc = Complex64::new(0.0, 0.0);
        let rot = Complex64::from_polar(1.0, -(j as f64) * hf);
        let mut phase = Complex64::from_polar(1.0, -(j as f64) * (-PI));
        for &s in &samples {
            acc += phase * s;
            phase *= rot;
        }
        coeffs.push(acc / fine_k as f64);
    }

    // Residual max |f(y_m) - sum_j c_j e^{i j y_m}| over the fine grid.
    let mut worst = 0.0f64;
    for (m, &s) in samples.iter().enumerate() {
        let y = -PI + m as f64 * hf;
        let mut recon = Complex64::new(0.0, 0.0);
        let rot = Complex64::from_polar(1.0, y);
        let mut phase = Complex64::from_polar(1.0, -(ni as f64) * y);
        for c in &coeffs {
            recon += c * phase;
            phase *= rot;
        }
        let err = (Complex64::new(s, 0.0) - recon).norm();
        worst = worst.max(err);
    }
    Ok(worst)
}

/// [`best_approx_proxy`] at the default 64x oversampling with doubling
/// self-certification: the result is accepted once doubling the fine grid
/// changes it by less than 1% (capped at 512x).
pub fn best_approx_proxy_certified(f: &TestFunction, n: usize) -> Result<f64, TestFnError> {
    let base = 64 * (2 * n + 1);
    let mut fine_k = base;
    let mut prev = best_approx_proxy(f, n, fine_k)?;
    while fine_k < 512 * (2 * n + 1) {
        fine_k *= 2;
        let next = best_approx_proxy(f, n, fine_k)?;
        if (next - prev).abs() <= 0.01 * prev.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}
