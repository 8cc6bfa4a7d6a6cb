//! Trigonometric interpolation and interpolatory quadrature on perturbed
//! equispaced periodic grids.
//!
//! A periodic grid of `K = 2N + 1` points on `[-pi, pi)` is perturbed by
//! moving node `k` from `k*h` to `(k + s_k)*h` with `|s_k| <= alpha < 1/2`
//! and `h = 2*pi/K`. This crate measures how interpolation and quadrature
//! degrade as `alpha` grows:
//!
//! * [`interp`] builds the degree-`N` trigonometric interpolant through the
//!   perturbed nodes and evaluates its cardinal basis stably in the log
//!   domain.
//! * [`lebesgue`] computes infinity-norm and 2-norm Lebesgue constants,
//!   together with the explicit crossover/majorant machinery that certifies
//!   an `O(N^{4*alpha})` growth envelope.
//! * [`quadrature`] derives interpolatory quadrature weights on a perturbed
//!   grid and tracks their Polya (absolute) sums.
//! * [`testfns`] provides periodic test integrands of prescribed Holder or
//!   analytic regularity with exact integrals, and [`fit`] extracts
//!   algebraic/geometric convergence rates from sweep data.
//!
//! Everything downstream of a seed is deterministic: grids are generated by
//! counter-style derived streams (see [`grid::derive_stream_seed`]) and all
//! kernels are pure, so sweeps can be replayed and parallelized freely.

pub mod fit;
pub mod grid;
pub mod interp;
pub mod lebesgue;
pub mod numerics;
pub mod quadrature;
pub mod testfns;

pub use fit::{geometric_fit, rate_fit, RateFit};
pub use grid::{derive_stream_seed, perturb_grid, EquispacedGrid, PerturbStrategy, PerturbedGrid};
pub use interp::{cardinal, eval_poly, interpolate, sup_error, CardinalTable, TrigPoly};
pub use lebesgue::{
    bound_shape, crossover_points, lebesgue_constant, lebesgue_function, nine_sum_bound,
    two_norm_lebesgue, BoundTable, CrossoverPoints, LebesgueReport, MkBounds, SearchOpts,
    TwoNormReport,
};
pub use numerics::{
    adaptive_integrate, adaptive_integrate_with_hints, min_singular_value, signed_log_product,
    solve_dense, ComplexMatrix, SignedLogValue,
};
pub use quadrature::{polya_sum, quad_estimate, quad_weights, trapezoid, QuadRule};
pub use testfns::{best_approx_proxy, make_analytic, make_smooth, Smoothness, TestFunction};
