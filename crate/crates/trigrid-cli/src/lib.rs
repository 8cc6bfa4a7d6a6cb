//! Sweep engine behind the `trigrid` binary.
//!
//! Each subcommand expands an `(alpha, N, trial)` lattice into independent
//! tasks, runs them on a rayon pool, and emits a CSV artifact: one header
//! line, one data row per task in `(alpha, N, trial)` order, then a `#`
//! commented summary block with rate fits and pass/fail verdicts.
//!
//! Determinism contract: every row is a pure function of
//! `(alpha, N, trial, seed, strategy)`, where `seed` is the per-task stream
//! seed derived from the master seed. Rows are computed in parallel but
//! sorted before emission, and the singular-value backend is pinned to
//! sequential mode inside the core crate, so the data rows are byte-identical
//! regardless of `--threads`. Summary lines may carry timings and are
//! excluded from that guarantee.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trigrid::lebesgue::check_regions;
use trigrid::testfns::from_label;
use trigrid::{
    crossover_points, derive_stream_seed, lebesgue_constant, nine_sum_bound, perturb_grid,
    quad_estimate, quad_weights, rate_fit, sup_error, two_norm_lebesgue, BoundTable,
    EquispacedGrid, MkBounds, PerturbStrategy, SearchOpts, TestFunction, TrigPoly,
};
use trigrid::{best_approx_proxy, bound_shape, geometric_fit, interpolate, solve_dense};
use trigrid::{ComplexMatrix, Smoothness};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TRIGRID_OUT_DIR";

/// Two-norm sweeps cap the system size; larger SVDs are too slow for sweeps.
pub const TWO_NORM_SWEEP_MAX_N: usize = 256;

/// Errors that map to exit code 2 (usage / IO); assertion failures are not
/// errors — they are reported through [`RunOutput::passed`] and exit code 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal: {0}")]
    Internal(String),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Which sweep to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepCommand {
    Lebesgue,
    TwoNorm,
    Quad,
    Converge,
    VerifyBounds,
}

impl SweepCommand {
    fn name(self) -> &'static str {
        match self {
            SweepCommand::Lebesgue => "lebesgue-sweep",
            SweepCommand::TwoNorm => "two-norm-sweep",
            SweepCommand::Quad => "quad-sweep",
            SweepCommand::Converge => "converge",
            SweepCommand::VerifyBounds => "verify-bounds",
        }
    }
}

/// Full configuration for one sweep run.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub command: SweepCommand,
    pub alphas: Vec<f64>,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub strategy: PerturbStrategy,
    pub seed: u64,
    pub out_path: Option<PathBuf>,
    /// 0 means the rayon default (one worker per logical CPU).
    pub threads: usize,
    /// Certified Lebesgue search (doubling sample density until stable).
    pub certify: bool,
    /// `converge` only: test-function label, e.g. `smooth:3` or `analytic:1.25`.
    pub function: Option<String>,
    /// `converge` only: draw nodes i.i.d. uniform instead of a perturbed grid.
    pub runge_demo: bool,
    /// `converge` only: shift the test function by half the grid spacing.
    pub shift_half: bool,
}

impl SweepConfig {
    /// A minimal config for `command`; callers override fields as needed.
    pub fn new(command: SweepCommand) -> Self {
        SweepConfig {
            command,
            alphas: vec![0.2],
            n_list: vec![8, 16, 32, 64, 128, 256],
            trials: 20,
            strategy: PerturbStrategy::UniformRandom,
            seed: 42,
            out_path: None,
            threads: 0,
            certify: false,
            function: None,
            runge_demo: false,
            shift_half: false,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.alphas.is_empty() {
            return Err(CliError::Usage("--alpha list is empty".into()));
        }
        for &a in &self.alphas {
            if !a.is_finite() || !(0.0..0.5).contains(&a) {
                return Err(CliError::Usage(format!(
                    "alpha {a} out of range [0, 0.5)"
                )));
            }
        }
        if self.n_list.is_empty() {
            return Err(CliError::Usage("--n list is empty".into()));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage("--n list must be strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if self.command == SweepCommand::TwoNorm {
            if let Some(&n) = self.n_list.iter().find(|&&n| n > TWO_NORM_SWEEP_MAX_N) {
                return Err(CliError::Usage(format!(
                    "two-norm-sweep caps N at {TWO_NORM_SWEEP_MAX_N} (got {n})"
                )));
            }
        }
        if self.command == SweepCommand::Converge && self.function.is_none() {
            return Err(CliError::Usage("converge requires --function".into()));
        }
        if (self.runge_demo || self.shift_half) && self.command != SweepCommand::Converge {
            return Err(CliError::Usage(
                "--runge-demo / --shift-half apply to converge only".into(),
            ));
        }
        Ok(())
    }
}

/// Result of a sweep: the CSV artifact, the summary block, and the verdict.
#[derive(Debug)]
pub struct RunOutput {
    /// Header + data rows + `#` summary block, newline terminated.
    pub csv: String,
    /// The summary lines (each already `#`-prefixed), for terminal echo.
    pub summary_lines: Vec<String>,
    /// True when every asserted check passed.
    pub passed: bool,
    /// Where the CSV was written, when a path was configured.
    pub out_path: Option<PathBuf>,
}

/// Default output directory: `$TRIGRID_OUT_DIR` or the working directory.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Resolve the artifact path for a run: explicit `--out`, else
/// `<default dir>/<command>.csv`.
pub fn resolve_out_path(cfg: &SweepConfig) -> PathBuf {
    cfg.out_path
        .clone()
        .unwrap_or_else(|| default_out_dir().join(format!("{}.csv", cfg.command.name())))
}

// ---------------------------------------------------------------------------
// Formatting and small-sample statistics
// ---------------------------------------------------------------------------

/// Full-precision float field: 17 significant digits, `nan` for missing.
fn fmt_f(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn median(values: &mut Vec<f64>) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// Per-`N` max and median of `value` over trials, for one alpha index.
/// Returns `(n, max, median)` triples in ascending `n`.
fn aggregate<R>(
    rows: &[R],
    ai: usize,
    n_list: &[usize],
    key: impl Fn(&R) -> (usize, usize),
    value: impl Fn(&R) -> f64,
) -> Vec<(usize, f64, f64)> {
    let mut out = Vec::new();
    for (ni, &n) in n_list.iter().enumerate() {
        let mut vals: Vec<f64> = rows
            .iter()
            .filter(|r| key(r) == (ai, ni))
            .map(&value)
            .collect();
        if vals.is_empty() {
            continue;
        }
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        out.push((n, max, median(&mut vals)));
    }
    out
}

/// Log-log slope of the per-`N` ensemble max, ignoring values at or below
/// `floor` (noise floor). Returns `None` when fewer than 3 points survive.
fn max_slope(agg: &[(usize, f64, f64)], floor: f64) -> Option<trigrid::RateFit> {
    let pts: Vec<(f64, f64)> = agg
        .iter()
        .filter(|&&(_, max, _)| max > floor)
        .map(|&(n, max, _)| (n as f64, max))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    rate_fit(&pts).ok()
}

struct Verdicts {
    lines: Vec<String>,
    passed: bool,
}

impl Verdicts {
    fn new() -> Self {
        Verdicts { lines: Vec::new(), passed: true }
    }

    fn note(&mut self, line: impl Into<String>) {
        self.lines.push(format!("# {}", line.into()));
    }

    /// An asserted check: records PASS/FAIL and drives the exit code.
    fn check(&mut self, ok: bool, line: impl Into<String>) {
        let tag = if ok { "PASS" } else { "FAIL" };
        self.lines.push(format!("# {} -> {tag}", line.into()));
        self.passed &= ok;
    }

    fn finish(mut self) -> (Vec<String>, bool) {
        self.lines.push(format!(
            "# RESULT: {}",
            if self.passed { "PASS" } else { "FAIL" }
        ));
        (self.lines, self.passed)
    }
}

// ---------------------------------------------------------------------------
// Task lattice and parallel execution
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct TaskInput {
    ai: usize,
    ni: usize,
    trial: usize,
    alpha: f64,
    n: usize,
    seed: u64,
}

fn build_tasks(cfg: &SweepConfig) -> Vec<TaskInput> {
    let mut tasks = Vec::with_capacity(cfg.alphas.len() * cfg.n_list.len() * cfg.trials);
    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        for (ni, &n) in cfg.n_list.iter().enumerate() {
            for trial in 0..cfg.trials {
                let seed = derive_stream_seed(cfg.seed, n, trial as u64);
                tasks.push(TaskInput { ai, ni, trial, alpha, n, seed });
            }
        }
    }
    tasks
}

/// Run `work` over all tasks on a dedicated pool and return results sorted by
/// `(alpha, N, trial)`. The sort (not the schedule) fixes row order.
fn parallel_rows<T, F>(cfg: &SweepConfig, work: F) -> Result<Vec<(TaskInput, T)>, CliError>
where
    T: Send,
    F: Fn(&TaskInput) -> Result<T, CliError> + Sync,
{
    use rayon::prelude::*;
    let tasks = build_tasks(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    let mut rows: Vec<(TaskInput, T)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| work(t).map(|r| (*t, r)))
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    rows.sort_by_key(|(t, _)| (t.ai, t.ni, t.trial));
    Ok(rows)
}

fn make_grid(t: &TaskInput, strategy: &PerturbStrategy) -> Result<trigrid::PerturbedGrid, CliError> {
    let base = EquispacedGrid::new(t.n)
        .map_err(|e| CliError::Usage(format!("N={}: {e}", t.n)))?;
    perturb_grid(&base, strategy, t.alpha, t.seed)
        .map_err(|e| CliError::Internal(format!("grid (alpha={}, N={}): {e}", t.alpha, t.n)))
}

// ---------------------------------------------------------------------------
// lebesgue-sweep
// ---------------------------------------------------------------------------

struct LebRow {
    lambda_inf: f64,
    argmax_x: f64,
    bound_shape: f64,
    nine_sum: f64,
}

fn run_lebesgue(cfg: &SweepConfig) -> Result<(String, Verdicts), CliError> {
    // The nine-term chain bound depends only on (alpha, N); computing it once
    // per combination keeps the sweep O(trials) instead of O(trials * N^2).
    let mut nine_cache: HashMap<(usize, usize), f64> = HashMap::new();
    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        for (ni, &n) in cfg.n_list.iter().enumerate() {
            let v = if alpha == 0.0 {
                f64::NAN
            } else {
                nine_sum_bound(n, alpha)
                    .map_err(|e| CliError::Internal(format!("nine_sum({n}, {alpha}): {e}")))?
            };
            nine_cache.insert((ai, ni), v);
        }
    }

    let opts = SearchOpts { certify: cfg.certify, ..SearchOpts::default() };
    let rows = parallel_rows(cfg, |t| {
        let pg = make_grid(t, &cfg.strategy)?;
        let (lambda_inf, argmax_x) = lebesgue_constant(&pg, &opts);
        Ok(LebRow {
            lambda_inf,
            argmax_x,
            bound_shape: bound_shape(t.n.max(1), t.alpha),
            nine_sum: nine_cache[&(t.ai, t.ni)],
        })
    })?;

    let mut csv = String::from(
        "alpha,N,trial,seed,strategy,lambda_inf,argmax_x,bound_shape,nine_sum\n",
    );
    for (t, r) in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            fmt_f(t.alpha),
            t.n,
            t.trial,
            t.seed,
            cfg.strategy.tag(),
            fmt_f(r.lambda_inf),
            fmt_f(r.argmax_x),
            fmt_f(r.bound_shape),
            fmt_f(r.nine_sum),
        );
    }

    let mut v = Verdicts::new();
    let below_one = rows.iter().filter(|(_, r)| r.lambda_inf < 1.0 - 1e-12).count();
    v.check(below_one == 0, format!("rows with lambda_inf < 1: {below_one}"));
    let chain_bad = rows
        .iter()
        .filter(|(_, r)| r.nine_sum.is_finite() && r.lambda_inf > r.nine_sum)
        .count();
    v.check(
        chain_bad == 0,
        format!("rows violating lambda_inf <= nine_sum: {chain_bad}"),
    );

    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        let agg = aggregate(&rows, ai, &cfg.n_list, |(t, _)| (t.ai, t.ni), |(_, r)| r.lambda_inf);
        for &(n, max, med) in &agg {
            v.note(format!(
                "alpha={alpha} N={n}: max lambda={max:.6} median lambda={med:.6}"
            ));
        }
        if alpha == 0.0 {
            // Unperturbed growth is logarithmic; a raw power-law fit over a
            // short N range reads the log as a small positive exponent, so the
            // sub-polynomial verdict divides the log out first.
            let pts: Vec<(f64, f64)> = agg
                .iter()
                .filter(|&&(n, _, _)| n >= 2)
                .map(|&(n, max, _)| (n as f64, max / (n as f64).ln()))
                .collect();
            if pts.len() >= 3 {
                let fit = rate_fit(&pts)
                    .map_err(|e| CliError::Internal(format!("alpha=0 fit: {e}")))?;
                v.check(
                    fit.slope < 0.05,
                    format!(
                        "alpha=0 log-compensated exponent {:.4} < 0.05 (r2={:.3})",
                        fit.slope, fit.r_squared
                    ),
                );
            } else {
                v.note("alpha=0: fewer than 3 N values, growth fit skipped");
            }
        } else if let Some(fit) = max_slope(&agg, 0.0) {
            let thresh = 4.0 * alpha + 0.1;
            v.check(
                fit.slope <= thresh,
                format!(
                    "alpha={alpha} ensemble-max exponent {:.4} <= {thresh:.3} (r2={:.3})",
                    fit.slope, fit.r_squared
                ),
            );
            v.note(format!(
                "alpha={alpha} gap to conjectured 2*alpha: {:+.4}",
                fit.slope - 2.0 * alpha
            ));
            let med_pts: Vec<(f64, f64)> =
                agg.iter().map(|&(n, _, med)| (n as f64, med)).collect();
            if let Ok(mfit) = rate_fit(&med_pts) {
                v.note(format!("alpha={alpha} median exponent {:.4}", mfit.slope));
            }
        } else {
            v.note(format!("alpha={alpha}: fewer than 3 N values, growth fit skipped"));
        }
    }
    Ok((csv, v))
}

// ---------------------------------------------------------------------------
// two-norm-sweep
// ---------------------------------------------------------------------------

fn run_two_norm(cfg: &SweepConfig) -> Result<(String, Verdicts), CliError> {
    let rows = parallel_rows(cfg, |t| {
        let pg = make_grid(t, &cfg.strategy)?;
        two_norm_lebesgue(&pg)
            .map_err(|e| CliError::Internal(format!("two_norm (alpha={}, N={}): {e}", t.alpha, t.n)))
    })?;

    let mut csv = String::from("alpha,N,trial,seed,strategy,lambda_two,sigma_min\n");
    for (t, r) in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            fmt_f(t.alpha),
            t.n,
            t.trial,
            t.seed,
            cfg.strategy.tag(),
            fmt_f(r.lambda_two),
            fmt_f(r.sigma_min),
        );
    }

    let mut v = Verdicts::new();
    let ill = rows.iter().filter(|(_, r)| r.ill_conditioned).count();
    v.note(format!("ill-conditioned rows (sigma_min < 1e-14): {ill}"));

    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        let agg = aggregate(&rows, ai, &cfg.n_list, |(t, _)| (t.ai, t.ni), |(_, r)| r.lambda_two);
        if alpha == 0.0 {
            let worst = rows
                .iter()
                .filter(|(t, _)| t.ai == ai)
                .map(|(_, r)| (r.lambda_two - 1.0).abs())
                .fold(0.0, f64::max);
            v.check(
                worst <= 1e-10,
                format!("alpha=0 max |lambda_two - 1| = {worst:.3e} <= 1e-10"),
            );
            continue;
        }
        match max_slope(&agg, 0.0) {
            Some(fit) => {
                if alpha <= 0.15 + 1e-12 {
                    // Comfortably inside the bounded regime (alpha < 1/4):
                    // growth must be flat at these scales.
                    v.check(
                        fit.slope <= 0.1,
                        format!(
                            "alpha={alpha} bounded-regime exponent {:.4} <= 0.1 (r2={:.3})",
                            fit.slope, fit.r_squared
                        ),
                    );
                } else if alpha < 0.25 {
                    v.note(format!(
                        "alpha={alpha} (bounded regime) exponent {:.4} (r2={:.3})",
                        fit.slope, fit.r_squared
                    ));
                } else {
                    v.note(format!(
                        "alpha={alpha} exponent {:.4} vs conjectured {:.4} (r2={:.3})",
                        fit.slope,
                        4.0 * alpha - 1.0,
                        fit.r_squared
                    ));
                }
            }
            None => v.note(format!("alpha={alpha}: fewer than 3 N values, fit skipped")),
        }
    }
    Ok((csv, v))
}

// ---------------------------------------------------------------------------
// quad-sweep
// ---------------------------------------------------------------------------

struct QuadRow {
    polya_sum: f64,
    max_weight: f64,
    min_weight: f64,
}

fn run_quad(cfg: &SweepConfig) -> Result<(String, Verdicts), CliError> {
    let rows = parallel_rows(cfg, |t| {
        let pg = make_grid(t, &cfg.strategy)?;
        let rule = quad_weights(&pg)
            .map_err(|e| CliError::Internal(format!("weights (alpha={}, N={}): {e}", t.alpha, t.n)))?;
        let polya = trigrid::polya_sum(&rule);
        let max_w = rule.weights().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min_w = rule.weights().iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(QuadRow { polya_sum: polya, max_weight: max_w, min_weight: min_w })
    })?;

    let mut csv =
        String::from("alpha,N,trial,seed,strategy,polya_sum,max_weight,min_weight\n");
    for (t, r) in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            fmt_f(t.alpha),
            t.n,
            t.trial,
            t.seed,
            cfg.strategy.tag(),
            fmt_f(r.polya_sum),
            fmt_f(r.max_weight),
            fmt_f(r.min_weight),
        );
    }

    let mut v = Verdicts::new();
    // Weight normalization (sum = 2*pi) is validated inside quad_weights for
    // every grid; reaching this point certifies it for all rows.
    v.note(format!(
        "weight normalization sum w = 2*pi validated in-kernel for all {} rows",
        rows.len()
    ));
    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        if alpha == 0.0 {
            // Unperturbed weights must collapse to the trapezoid weight h.
            let worst = rows
                .iter()
                .filter(|(t, _)| t.ai == ai)
                .map(|(t, r)| {
                    let h = 2.0 * PI / (2 * t.n + 1) as f64;
                    (r.max_weight - h).abs().max((r.min_weight - h).abs())
                })
                .fold(0.0, f64::max);
            v.check(
                worst <= 1e-12,
                format!("alpha=0 max |w_k - h| = {worst:.3e} <= 1e-12"),
            );
            continue;
        }
        let agg = aggregate(&rows, ai, &cfg.n_list, |(t, _)| (t.ai, t.ni), |(_, r)| r.polya_sum);
        if agg.len() >= 2 {
            let (n_lo, _, med_lo) = agg[0];
            let (n_hi, _, med_hi) = agg[agg.len() - 1];
            v.note(format!(
                "alpha={alpha} median polya sum: N={n_lo} -> {med_lo:.6}, N={n_hi} -> {med_hi:.6}, ratio {:.4}",
                med_hi / med_lo
            ));
        }
        let neg = rows
            .iter()
            .filter(|(t, r)| t.ai == ai && r.min_weight < 0.0)
            .count();
        v.note(format!("alpha={alpha} rows with a negative weight: {neg}"));
    }
    Ok((csv, v))
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------

struct ConvRow {
    function: String,
    sup_err: f64,
    quad_err: f64,
    best_proxy: f64,
}

/// Noise floor for rate fits: errors at or below this are rounding artifacts.
const ERR_FLOOR: f64 = 1e-13;

fn run_converge(cfg: &SweepConfig) -> Result<(String, Verdicts), CliError> {
    let label = cfg.function.as_deref().expect("validated");
    let base = from_label(label)
        .map_err(|e| CliError::Usage(format!("--function {label}: {e}")))?;
    let base = Arc::new(base);

    // The best-approximation proxy depends only on (function, N); translation
    // by --shift-half does not change it.
    let mut proxy_cache: HashMap<usize, f64> = HashMap::new();
    for (ni, &n) in cfg.n_list.iter().enumerate() {
        let fine = 64 * (2 * n + 1);
        let p = best_approx_proxy(&base, n, fine)
            .map_err(|e| CliError::Internal(format!("proxy (N={n}): {e}")))?;
        proxy_cache.insert(ni, p);
    }

    let rows = parallel_rows(cfg, |t| {
        let h = 2.0 * PI / (2 * t.n + 1) as f64;
        let f = if cfg.shift_half { base.shifted(0.5 * h) } else { (*base).clone() };
        let proxy = proxy_cache[&t.ni];
        if cfg.runge_demo {
            let (sup, qerr) = runge_demo_trial(&f, t.n, t.seed);
            return Ok(ConvRow {
                function: f.label().to_string(),
                sup_err: sup,
                quad_err: qerr,
                best_proxy: proxy,
            });
        }
        let pg = make_grid(t, &cfg.strategy)?;
        let samples: Vec<Complex64> = pg
            .nodes()
            .iter()
            .map(|&x| Complex64::new(f.eval(x), 0.0))
            .collect();
        let poly = interpolate(&pg, &samples)
            .map_err(|e| CliError::Internal(format!("interpolate (N={}): {e}", t.n)))?;
        let sup = sup_error(|x| f.eval(x), &poly, &pg, 10 * pg.len());
        let rule = quad_weights(&pg)
            .map_err(|e| CliError::Internal(format!("weights (N={}): {e}", t.n)))?;
        let est = quad_estimate(&rule, &samples)
            .map_err(|e| CliError::Internal(format!("quad (N={}): {e}", t.n)))?;
        let qerr = (est.re - f.exact_integral()).abs();
        Ok(ConvRow {
            function: f.label().to_string(),
            sup_err: sup,
            quad_err: qerr,
            best_proxy: proxy,
        })
    })?;

    let mut csv = String::from("alpha,N,trial,seed,function,sup_err,quad_err,best_proxy\n");
    for (t, r) in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            fmt_f(t.alpha),
            t.n,
            t.trial,
            t.seed,
            r.function,
            fmt_f(r.sup_err),
            fmt_f(r.quad_err),
            fmt_f(r.best_proxy),
        );
    }

    let mut v = Verdicts::new();
    if cfg.runge_demo {
        v.note("OUT-OF-MODEL: nodes drawn i.i.d. uniform, no spacing guarantee; no rate assertions");
    }
    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        let sup_agg =
            aggregate(&rows, ai, &cfg.n_list, |(t, _)| (t.ai, t.ni), |(_, r)| r.sup_err);
        let quad_agg =
            aggregate(&rows, ai, &cfg.n_list, |(t, _)| (t.ai, t.ni), |(_, r)| r.quad_err);
        for &(n, max, med) in &sup_agg {
            v.note(format!("alpha={alpha} N={n}: max sup_err={max:.6e} median={med:.6e}"));
        }
        if cfg.runge_demo {
            continue;
        }
        match base.smoothness() {
            Smoothness::Holder { sigma } => {
                summarize_holder(&mut v, alpha, sigma, &sup_agg, &quad_agg, &proxy_fit(cfg, &rows, ai));
            }
            Smoothness::Analytic { strip } => {
                summarize_analytic(&mut v, alpha, strip, &sup_agg, &quad_agg);
            }
        }
    }
    Ok((csv, v))
}

fn proxy_fit(cfg: &SweepConfig, rows: &[(TaskInput, ConvRow)], ai: usize) -> Option<trigrid::RateFit> {
    let agg = aggregate(rows, ai, &cfg.n_list, |(t, _)| (t.ai, t.ni), |(_, r)| r.best_proxy);
    max_slope(&agg, ERR_FLOOR)
}

fn summarize_holder(
    v: &mut Verdicts,
    alpha: f64,
    sigma: f64,
    sup_agg: &[(usize, f64, f64)],
    quad_agg: &[(usize, f64, f64)],
    proxy: &Option<trigrid::RateFit>,
) {
    if let Some(fit) = proxy {
        v.note(format!(
            "alpha={alpha} best-approx proxy exponent {:.4} (expected near {:.1})",
            fit.slope, -sigma
        ));
    }
    let guaranteed = sigma - 4.0 * alpha;
    for (name, agg) in [("sup_err", sup_agg), ("quad_err", quad_agg)] {
        match max_slope(agg, ERR_FLOOR) {
            Some(fit) => {
                if guaranteed >= 0.5 {
                    // Rate guarantee with 0.3 slack for finite-N wobble.
                    let thresh = -guaranteed + 0.3;
                    v.check(
                        fit.slope <= thresh,
                        format!(
                            "alpha={alpha} {name} exponent {:.4} <= {thresh:.3} (r2={:.3})",
                            fit.slope, fit.r_squared
                        ),
                    );
                } else {
                    v.note(format!(
                        "alpha={alpha} {name} exponent {:.4} (guaranteed rate degenerate, informational)",
                        fit.slope
                    ));
                }
            }
            None => v.note(format!(
                "alpha={alpha} {name}: too few points above noise floor, fit skipped"
            )),
        }
    }
}

fn summarize_analytic(
    v: &mut Verdicts,
    alpha: f64,
    strip: f64,
    sup_agg: &[(usize, f64, f64)],
    quad_agg: &[(usize, f64, f64)],
) {
    let expected = (-strip).exp();
    for (name, agg) in [("sup_err", sup_agg), ("quad_err", quad_agg)] {
        let pts: Vec<(f64, f64)> = agg
            .iter()
            .filter(|&&(_, max, _)| max > ERR_FLOOR)
            .map(|&(n, max, _)| (n as f64, max))
            .collect();
        if pts.len() < 3 {
            v.note(format!(
                "alpha={alpha} {name}: too few points above noise floor, geometric fit skipped"
            ));
            continue;
        }
        match geometric_fit(&pts) {
            Ok(fit) => {
                let ratio = fit.slope.exp();
                let line = format!(
                    "alpha={alpha} {name} per-N ratio {ratio:.4} vs exp(-strip)={expected:.4} (r2={:.3})",
                    fit.r_squared
                );
                if alpha <= 0.3 + 1e-12 {
                    // Observed geometric rate tracks the strip width in this
                    // regime; beyond it only some positive rate is guaranteed.
                    v.check((ratio - expected).abs() <= 0.15 * expected, line);
                } else {
                    v.note(line);
                }
            }
            Err(e) => v.note(format!("alpha={alpha} {name}: geometric fit failed ({e})")),
        }
    }
}

/// One out-of-model trial: K = 2N+1 nodes i.i.d. uniform on the period,
/// interpolation through them, sup and quadrature error. Near-coincident
/// nodes can make the system numerically singular; that blow-up is the point
/// of the demo, so failures are recorded as infinite error, not raised.
fn runge_demo_trial(f: &TestFunction, n: usize, seed: u64) -> (f64, f64) {
    let k = 2 * n + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes: Vec<f64> = (0..k).map(|_| rng.gen_range(-PI..PI)).collect();
    nodes.sort_by(f64::total_cmp);

    let a = ComplexMatrix::from_fn(k, k, |r, c| {
        let j = c as i64 - n as i64;
        Complex64::from_polar(1.0, j as f64 * nodes[r])
    });
    let rhs: Vec<Complex64> = nodes.iter().map(|&x| Complex64::new(f.eval(x), 0.0)).collect();
    let coeffs = match solve_dense(&a, &rhs) {
        Ok(c) => c,
        Err(_) => return (f64::INFINITY, f64::INFINITY),
    };
    let poly = match TrigPoly::new(coeffs) {
        Ok(p) => p,
        Err(_) => return (f64::INFINITY, f64::INFINITY),
    };
    let m = 10 * k;
    let mut sup: f64 = 0.0;
    for i in 0..m {
        let x = -PI + 2.0 * PI * i as f64 / m as f64;
        sup = sup.max((f.eval(x) - poly.eval(x).re).abs());
    }
    let qerr = (2.0 * PI * poly.coeff(0).re - f.exact_integral()).abs();
    (sup, qerr)
}

// ---------------------------------------------------------------------------
// verify-bounds
// ---------------------------------------------------------------------------

struct VerifyRow {
    lambda_inf: f64,
    nine_sum: f64,
    bracket_excess: f64,
    region_violations: usize,
    max_region_ratio: f64,
}

fn run_verify_bounds(cfg: &SweepConfig) -> Result<(String, Verdicts), CliError> {
    for &a in &cfg.alphas {
        if a == 0.0 {
            return Err(CliError::Usage(
                "verify-bounds needs alpha > 0 (the bound chain is trivial at alpha = 0)".into(),
            ));
        }
    }
    let mut mk_cache: HashMap<(usize, usize), Arc<MkBounds>> = HashMap::new();
    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        for (ni, &n) in cfg.n_list.iter().enumerate() {
            let mk = MkBounds::new(n, alpha)
                .map_err(|e| CliError::Internal(format!("mk table ({n}, {alpha}): {e}")))?;
            mk_cache.insert((ai, ni), Arc::new(mk));
        }
    }

    let opts = SearchOpts { certify: cfg.certify, ..SearchOpts::default() };
    let rows = parallel_rows(cfg, |t| {
        let pg = make_grid(t, &cfg.strategy)?;
        let crossovers = crossover_points(&pg);
        let bracket_excess = crossovers.max_bracket_violation();
        let mk = (*mk_cache[&(t.ai, t.ni)]).clone();
        let table = BoundTable { crossovers, mk };
        let check = check_regions(&pg, &table, 64);
        let (lambda_inf, _) = lebesgue_constant(&pg, &opts);
        Ok(VerifyRow {
            lambda_inf,
            nine_sum: table.mk.nine_sum(),
            bracket_excess,
            region_violations: check.violations,
            max_region_ratio: check.max_ratio,
        })
    })?;

    let mut csv = String::from(
        "alpha,N,trial,seed,strategy,lambda_inf,nine_sum,bracket_excess,region_violations,max_region_ratio\n",
    );
    for (t, r) in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f(t.alpha),
            t.n,
            t.trial,
            t.seed,
            cfg.strategy.tag(),
            fmt_f(r.lambda_inf),
            fmt_f(r.nine_sum),
            fmt_f(r.bracket_excess),
            r.region_violations,
            fmt_f(r.max_region_ratio),
        );
    }

    let mut v = Verdicts::new();
    let worst_bracket = rows.iter().map(|(_, r)| r.bracket_excess).fold(0.0, f64::max);
    v.check(
        worst_bracket <= 1e-12,
        format!("max crossover bracketing excess {worst_bracket:.3e} <= 1e-12"),
    );
    let region_bad: usize = rows.iter().map(|(_, r)| r.region_violations).sum();
    v.check(region_bad == 0, format!("cardinal-bound region violations: {region_bad}"));
    let worst_ratio = rows.iter().map(|(_, r)| r.max_region_ratio).fold(0.0, f64::max);
    v.note(format!("max |l_0| / M_k ratio observed: {worst_ratio:.6}"));
    let chain_bad = rows.iter().filter(|(_, r)| r.lambda_inf > r.nine_sum).count();
    v.check(
        chain_bad == 0,
        format!("rows violating lambda_inf <= nine_sum: {chain_bad}"),
    );

    for (ai, &alpha) in cfg.alphas.iter().enumerate() {
        for (ni, &n) in cfg.n_list.iter().enumerate() {
            let mk = &mk_cache[&(ai, ni)];
            let excess = mk
                .numeric()
                .iter()
                .zip(mk.analytic().iter())
                .map(|(&num, &ana)| num - ana * (1.0 + 1e-9))
                .fold(f64::NEG_INFINITY, f64::max);
            if n >= 32 {
                v.check(
                    excess <= 0.0,
                    format!("alpha={alpha} N={n}: numeric M_k <= analytic M_k (max excess {excess:.3e})"),
                );
            } else {
                let over = mk
                    .numeric()
                    .iter()
                    .zip(mk.analytic().iter())
                    .filter(|(&num, &ana)| num > ana * (1.0 + 1e-9))
                    .count();
                v.note(format!(
                    "alpha={alpha} N={n}: analytic comparison informational below N=32 ({over} of {} k above)",
                    mk.numeric().len()
                ));
            }
        }
    }
    Ok((csv, v))
}

// ---------------------------------------------------------------------------
// grids (single dump) and the dispatcher
// ---------------------------------------------------------------------------

/// Produce the CSV for one perturbed grid. When `raw_seed` is set, `seed` is
/// used directly as the draw stream (so a sweep row's seed column replays its
/// exact grid); otherwise the per-task seed is derived as sweeps do.
pub fn dump_grid(
    alpha: f64,
    n: usize,
    strategy: &PerturbStrategy,
    seed: u64,
    trial: u64,
    raw_seed: bool,
) -> Result<String, CliError> {
    if !alpha.is_finite() || !(0.0..0.5).contains(&alpha) {
        return Err(CliError::Usage(format!("alpha {alpha} out of range [0, 0.5)")));
    }
    let base = EquispacedGrid::new(n).map_err(|e| CliError::Usage(format!("N={n}: {e}")))?;
    let stream = if raw_seed { seed } else { derive_stream_seed(seed, n, trial) };
    let pg = perturb_grid(&base, strategy, alpha, stream)
        .map_err(|e| CliError::Internal(format!("grid: {e}")))?;
    Ok(pg.to_csv())
}

/// Run one sweep end to end: validate, compute rows, append the summary
/// block, and write the artifact when a path is configured.
pub fn run_sweep(cfg: &SweepConfig) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    let started = std::time::Instant::now();
    let (mut csv, verdicts) = match cfg.command {
        SweepCommand::Lebesgue => run_lebesgue(cfg)?,
        SweepCommand::TwoNorm => run_two_norm(cfg)?,
        SweepCommand::Quad => run_quad(cfg)?,
        SweepCommand::Converge => run_converge(cfg)?,
        SweepCommand::VerifyBounds => run_verify_bounds(cfg)?,
    };

    let mut header = vec![format!(
        "# command={} seed={} strategy={} trials={} alphas={:?} n={:?}",
        cfg.command.name(),
        cfg.seed,
        cfg.strategy.tag(),
        cfg.trials,
        cfg.alphas,
        cfg.n_list,
    )];
    let (mut lines, passed) = verdicts.finish();
    // Timing is deliberately last and clearly marked: data rows must be
    // byte-identical across thread counts, summary timing need not be.
    lines.push(format!("# wall_seconds={:.3}", started.elapsed().as_secs_f64()));
    header.append(&mut lines);
    for line in &header {
        csv.push_str(line);
        csv.push('\n');
    }

    let out_path = cfg.out_path.clone();
    if let Some(path) = &out_path {
        write_artifact(path, &csv)?;
    }
    Ok(RunOutput { csv, summary_lines: header, passed, out_path })
}

fn write_artifact(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// Data rows of a CSV artifact: everything except the header line and the
/// `#` summary block. This is the byte-stable portion.
pub fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().skip(1).filter(|l| !l.starts_with('#')).collect()
}

/// Parse an `--n` spec: either a comma list (`8,12,16`) or a doubling range
/// (`8..256`, meaning 8, 16, ..., 256).
pub fn parse_n_list(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = |s: &str| CliError::Usage(format!("bad --n value '{s}'"));
    let mut out = Vec::new();
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad(spec))?;
        let hi: usize = hi.trim().parse().map_err(|_| bad(spec))?;
        if lo == 0 || hi < lo {
            return Err(bad(spec));
        }
        let mut n = lo;
        while n <= hi {
            out.push(n);
            n *= 2;
        }
    } else {
        for part in spec.split(',') {
            out.push(part.trim().parse().map_err(|_| bad(part))?);
        }
        out.sort_unstable();
        out.dedup();
    }
    if out.is_empty() {
        return Err(bad(spec));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_list_doubling_range() {
        assert_eq!(parse_n_list("8..256").unwrap(), vec![8, 16, 32, 64, 128, 256]);
        assert_eq!(parse_n_list("8..9").unwrap(), vec![8]);
    }

    #[test]
    fn n_list_comma_sorted_deduped() {
        assert_eq!(parse_n_list("16, 8,16").unwrap(), vec![8, 16]);
        assert_eq!(parse_n_list("32").unwrap(), vec![32]);
    }

    #[test]
    fn n_list_rejects_garbage() {
        assert!(parse_n_list("").is_err());
        assert!(parse_n_list("8..4").is_err());
        assert!(parse_n_list("0..8").is_err());
        assert!(parse_n_list("a,b").is_err());
    }

    #[test]
    fn float_field_format() {
        assert_eq!(fmt_f(f64::NAN), "nan");
        assert_eq!(fmt_f(0.25), "2.5000000000000000e-1");
        let round_trip: f64 = fmt_f(std::f64::consts::PI).parse().unwrap();
        assert_eq!(round_trip, std::f64::consts::PI);
    }

    #[test]
    fn median_odd_even() {
        assert_eq!(median(&mut vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        let mut cfg = SweepConfig::new(SweepCommand::Lebesgue);
        cfg.alphas = vec![0.6];
        assert!(matches!(run_sweep(&cfg), Err(CliError::Usage(_))));

        let mut cfg = SweepConfig::new(SweepCommand::TwoNorm);
        cfg.n_list = vec![512];
        assert!(matches!(run_sweep(&cfg), Err(CliError::Usage(_))));

        let mut cfg = SweepConfig::new(SweepCommand::Converge);
        cfg.function = None;
        assert!(matches!(run_sweep(&cfg), Err(CliError::Usage(_))));

        let mut cfg = SweepConfig::new(SweepCommand::VerifyBounds);
        cfg.alphas = vec![0.0];
        assert!(matches!(run_sweep(&cfg), Err(CliError::Usage(_))));
    }

    #[test]
    fn small_lebesgue_sweep_runs_and_passes() {
        let mut cfg = SweepConfig::new(SweepCommand::Lebesgue);
        cfg.alphas = vec![0.0, 0.2];
        cfg.n_list = vec![4, 8, 16];
        cfg.trials = 3;
        cfg.threads = 2;
        let out = run_sweep(&cfg).unwrap();
        assert!(out.passed, "summary: {:?}", out.summary_lines);
        // 2 alphas * 3 Ns * 3 trials data rows.
        assert_eq!(data_rows(&out.csv).len(), 18);
        let first = data_rows(&out.csv)[0].to_string();
        assert!(first.starts_with("0.0000000000000000e0,4,0,"));
        // alpha = 0 rows carry no chain bound.
        assert!(first.ends_with(",nan"));
    }

    #[test]
    fn grid_dump_replays_sweep_seed() {
        // The seed column of a sweep row, replayed with --raw-seed, must
        // reproduce the exact grid the row used.
        let derived = derive_stream_seed(42, 8, 3);
        let direct = dump_grid(0.3, 8, &PerturbStrategy::UniformRandom, derived, 0, true).unwrap();
        let via_derivation =
            dump_grid(0.3, 8, &PerturbStrategy::UniformRandom, 42, 3, false).unwrap();
        assert_eq!(direct, via_derivation);
    }
}
