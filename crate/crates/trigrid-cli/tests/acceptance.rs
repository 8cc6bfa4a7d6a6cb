//! Acceptance suite: one test per criterion, each printing a single
//! `ACCEPTANCE <k> <name>: PASS|FAIL` line (run with `-- --nocapture` to see
//! the lines for passing tests as well).
//!
//! These are end-to-end checks against frozen thresholds; the unit and
//! property tests carry the fine-grained oracles.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trigrid::{
    adaptive_integrate_with_hints, cardinal, derive_stream_seed, interpolate, lebesgue_constant,
    perturb_grid, quad_weights, rate_fit, sup_error, two_norm_lebesgue, EquispacedGrid,
    PerturbStrategy, SearchOpts, TrigPoly,
};
use trigrid_cli::{data_rows, run_sweep, SweepCommand, SweepConfig};

fn verdict(k: u32, name: &str, ok: bool, detail: &str) {
    println!("ACCEPTANCE {k} {name}: {}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {k} ({name}) failed: {detail}");
}

fn grid(n: usize, strategy: &PerturbStrategy, alpha: f64, seed: u64) -> trigrid::PerturbedGrid {
    let base = EquispacedGrid::new(n).unwrap();
    perturb_grid(&base, strategy, alpha, seed).unwrap()
}

/// A real-valued random trig polynomial (conjugate-symmetric coefficients).
fn random_real_poly(n: usize, rng: &mut ChaCha8Rng) -> TrigPoly {
    let ni = n as i64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for j in 0..=ni {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let c = if j == 0 { Complex64::new(c.re, 0.0) } else { c };
        coeffs[(j + ni) as usize] = c;
        coeffs[(-j + ni) as usize] = c.conj();
    }
    TrigPoly::new(coeffs).unwrap()
}

// ---------------------------------------------------------------------------
// 1. Exactness on trigonometric polynomials
// ---------------------------------------------------------------------------

#[test]
fn c1_exactness() {
    let mut detail = String::new();
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(0xacc1);
    let strategies = [
        PerturbStrategy::None,
        PerturbStrategy::UniformRandom,
        PerturbStrategy::AlternatingMax,
        PerturbStrategy::AllPlusMax,
        PerturbStrategy::RandomSignsMax,
    ];
    for &n in &[4usize, 16, 64] {
        for &alpha in &[0.0, 0.2, 0.45] {
            for strategy in &strategies {
                for trial in 0..2u64 {
                    let pg = grid(n, strategy, alpha, 0x51ee * (trial + 1));
                    let p = random_real_poly(n, &mut rng);
                    let samples: Vec<Complex64> =
                        pg.nodes().iter().map(|&x| p.eval(x)).collect();
                    let q = interpolate(&pg, &samples).unwrap();
                    let sup = sup_error(|x| p.eval(x).re, &q, &pg, 10 * pg.len());
                    let tol = 1e-8 * p.coeff_norm_one();
                    if sup > tol {
                        ok = false;
                        detail = format!(
                            "sup_error {sup:.3e} > {tol:.3e} at N={n} alpha={alpha} {strategy}"
                        );
                    }
                    let rule = quad_weights(&pg).unwrap();
                    let res = rule.max_moment_residual();
                    let rtol = 1e-8 * pg.len() as f64;
                    if res > rtol {
                        ok = false;
                        detail = format!(
                            "moment residual {res:.3e} > {rtol:.3e} at N={n} alpha={alpha} {strategy}"
                        );
                    }
                }
            }
        }
    }
    verdict(1, "exactness", ok, &detail);
}

// ---------------------------------------------------------------------------
// 2. Unperturbed Lebesgue constants: the 5/3 value and logarithmic growth
// ---------------------------------------------------------------------------

#[test]
fn c2_unperturbed_growth() {
    let opts = SearchOpts::default();
    let (lambda_1, _) = lebesgue_constant(&grid(1, &PerturbStrategy::None, 0.0, 0), &opts);
    let value_ok = (lambda_1 - 5.0 / 3.0).abs() <= 1e-6;

    let mut pts = Vec::new();
    for &n in &[8usize, 16, 32, 64, 128, 256] {
        let (lam, _) = lebesgue_constant(&grid(n, &PerturbStrategy::None, 0.0, 0), &opts);
        // Divide out the expected log to expose any residual power.
        pts.push((n as f64, lam / (n as f64).ln()));
    }
    let fit = rate_fit(&pts).unwrap();
    let growth_ok = fit.slope < 0.05;

    verdict(
        2,
        "unperturbed-growth",
        value_ok && growth_ok,
        &format!(
            "lambda_1 = {lambda_1:.8} (want 5/3), log-compensated slope = {:.4}",
            fit.slope
        ),
    );
}

// ---------------------------------------------------------------------------
// 3. Perturbed growth rate: ensemble max exponent <= 4 alpha + 0.1
// ---------------------------------------------------------------------------

#[test]
fn c3_perturbed_growth() {
    let mut cfg = SweepConfig::new(SweepCommand::Lebesgue);
    cfg.alphas = vec![0.1, 0.2, 0.3, 0.4];
    cfg.n_list = vec![16, 32, 64, 128, 256];
    cfg.trials = 200;
    cfg.seed = 42;
    cfg.out_path = None;
    let out = run_sweep(&cfg).unwrap();
    let detail = out.summary_lines.join("\n");
    verdict(3, "perturbed-growth", out.passed, &detail);
}

// ---------------------------------------------------------------------------
// 4. Bound chain: crossovers, per-region cardinal bounds, nine-term sum
// ---------------------------------------------------------------------------

#[test]
fn c4_bound_chain() {
    let mut cfg = SweepConfig::new(SweepCommand::VerifyBounds);
    cfg.alphas = vec![0.1, 0.2, 0.3, 0.4];
    cfg.n_list = vec![8, 16, 32, 64];
    cfg.trials = 200;
    cfg.seed = 42;
    cfg.out_path = None;
    let out = run_sweep(&cfg).unwrap();
    let detail = out.summary_lines.join("\n");
    verdict(4, "bound-chain", out.passed, &detail);
}

// ---------------------------------------------------------------------------
// 5. Convergence rates for rough and analytic test functions
// ---------------------------------------------------------------------------

#[test]
fn c5_convergence_rates() {
    let started = Instant::now();

    let mut smooth = SweepConfig::new(SweepCommand::Converge);
    smooth.function = Some("smooth:3".into());
    smooth.alphas = vec![0.4];
    smooth.n_list = vec![16, 32, 64, 128, 256];
    smooth.trials = 10;
    smooth.seed = 42;
    smooth.out_path = None;
    let smooth_out = run_sweep(&smooth).unwrap();

    let mut analytic = SweepConfig::new(SweepCommand::Converge);
    analytic.function = Some("analytic:1.25".into());
    analytic.alphas = vec![0.3];
    analytic.n_list = vec![8, 12, 16, 20, 24, 28, 32, 36, 40];
    analytic.trials = 10;
    analytic.seed = 42;
    analytic.out_path = None;
    let analytic_out = run_sweep(&analytic).unwrap();

    let elapsed = started.elapsed().as_secs_f64();
    let ok = smooth_out.passed && analytic_out.passed && elapsed < 300.0;
    let detail = format!(
        "elapsed {elapsed:.1}s\n{}\n{}",
        smooth_out.summary_lines.join("\n"),
        analytic_out.summary_lines.join("\n")
    );
    verdict(5, "convergence-rates", ok, &detail);
}

// ---------------------------------------------------------------------------
// 6. Two-norm Lebesgue constants: unitarity at alpha = 0, flatness below
//    the 1/4 threshold, reported exponent near it
// ---------------------------------------------------------------------------

#[test]
fn c6_two_norm() {
    let mut unitary_worst: f64 = 0.0;
    for &n in &[8usize, 16, 32, 64, 128, 256] {
        let r = two_norm_lebesgue(&grid(n, &PerturbStrategy::None, 0.0, 0)).unwrap();
        unitary_worst = unitary_worst.max((r.lambda_two - 1.0).abs());
    }
    let unitary_ok = unitary_worst <= 1e-10;

    let mut cfg = SweepConfig::new(SweepCommand::TwoNorm);
    cfg.alphas = vec![0.15, 0.4];
    cfg.n_list = vec![8, 16, 32, 64, 128, 256];
    cfg.trials = 20;
    cfg.seed = 42;
    cfg.out_path = None;
    let out = run_sweep(&cfg).unwrap();

    let ok = unitary_ok && out.passed;
    let detail = format!(
        "max |lambda_two - 1| at alpha=0: {unitary_worst:.3e}\n{}",
        out.summary_lines.join("\n")
    );
    verdict(6, "two-norm", ok, &detail);
}

// ---------------------------------------------------------------------------
// 7. Quadrature weights: normalization, collapse to trapezoid, Polya growth
// ---------------------------------------------------------------------------

#[test]
fn c7_polya_sums() {
    let mut detail = String::new();
    let mut ok = true;

    // Unperturbed weights are exactly the trapezoid weight h.
    for &n in &[8usize, 16, 32] {
        let pg = grid(n, &PerturbStrategy::None, 0.0, 0);
        let rule = quad_weights(&pg).unwrap();
        let h = pg.base().spacing();
        let worst = rule
            .weights()
            .iter()
            .map(|&w| (w - h).abs())
            .fold(0.0, f64::max);
        if worst > 1e-12 {
            ok = false;
            detail = format!("alpha=0 N={n}: max |w - h| = {worst:.3e}");
        }
    }

    // Strong perturbation, many grids: weight sums stay pinned at 2*pi and
    // the median absolute sum grows only tamely with N.
    let alpha = 0.45;
    let n_list = [32usize, 64, 128];
    let mut medians = Vec::new();
    for &n in &n_list {
        let mut polya: Vec<f64> = Vec::new();
        for trial in 0..100u64 {
            let seed = derive_stream_seed(42, n, trial);
            let pg = grid(n, &PerturbStrategy::UniformRandom, alpha, seed);
            let rule = quad_weights(&pg).unwrap();
            let k = pg.len() as f64;
            let sum: f64 = rule.weights().iter().sum();
            if (sum - 2.0 * PI).abs() > 1e-9 * k {
                ok = false;
                detail = format!("N={n} trial {trial}: sum w = {sum:.12} off 2*pi");
            }
            polya.push(rule.weights().iter().map(|w| w.abs()).sum());
        }
        polya.sort_by(f64::total_cmp);
        medians.push(0.5 * (polya[49] + polya[50]));
    }
    let ratio = medians[medians.len() - 1] / medians[0];
    if ratio > 1.5 {
        ok = false;
        detail = format!("median Polya sum ratio {ratio:.4} > 1.5 (medians {medians:?})");
    }

    verdict(
        7,
        "polya-sums",
        ok,
        &format!("{detail}\nmedians: {medians:?}, ratio {ratio:.4}"),
    );
}

// ---------------------------------------------------------------------------
// 8. Infrastructure: the log-sine integral, log-domain products, and
//    byte-identical CSV data rows across thread counts
// ---------------------------------------------------------------------------

#[test]
fn c8_infrastructure() {
    let mut ok = true;
    let mut detail = String::new();

    // Integral of log|sin((x+t)/2)| over a period is -pi log 4, any t.
    for &t in &[0.0, 1.1] {
        let f = move |x: f64| (0.5 * (x + t)).sin().abs().ln();
        let hints = [-t, -t - 2.0 * PI, -t + 2.0 * PI];
        let got = adaptive_integrate_with_hints(&f, -PI, PI, 1e-10, &hints).unwrap();
        let want = -PI * 4.0f64.ln();
        if (got - want).abs() > 1e-8 {
            ok = false;
            detail = format!("log-sine integral (t={t}): {got:.12} vs {want:.12}");
        }
    }

    // Log-domain cardinal evaluation agrees with the naive product wherever
    // the naive product is representable.
    for &n in &[16usize, 64, 256] {
        let pg = grid(n, &PerturbStrategy::UniformRandom, 0.3, 7);
        let nodes = pg.nodes();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let x: f64 = rng.gen_range(-PI..PI);
            let k = rng.gen_range(0..pg.len());
            let mut naive = 1.0f64;
            for (j, &xj) in nodes.iter().enumerate() {
                if j != k {
                    naive *= (0.5 * (x - xj)).sin() / (0.5 * (nodes[k] - xj)).sin();
                }
            }
            if naive == 0.0 || !naive.is_finite() || naive.abs() < 1e-290 {
                continue; // outside the naively representable range
            }
            let logged = cardinal(&pg, k as i64 - n as i64, x);
            let rel = (logged - naive).abs() / naive.abs();
            if rel > 1e-12 {
                ok = false;
                detail = format!("cardinal mismatch at N={n}: rel err {rel:.3e}");
            }
        }
    }

    // Data rows must not depend on the worker thread count.
    for command in [SweepCommand::Lebesgue, SweepCommand::TwoNorm, SweepCommand::Quad] {
        let mut cfg = SweepConfig::new(command);
        cfg.alphas = vec![0.0, 0.3];
        cfg.n_list = vec![4, 8, 16];
        cfg.trials = 5;
        cfg.seed = 7;
        cfg.out_path = None;
        cfg.threads = 1;
        let serial = run_sweep(&cfg).unwrap();
        cfg.threads = 8;
        let parallel = run_sweep(&cfg).unwrap();
        if data_rows(&serial.csv) != data_rows(&parallel.csv) {
            ok = false;
            detail = format!("thread-count-dependent rows in {:?}", command);
        }
    }

    verdict(8, "infrastructure", ok, &detail);
}
