//! Periodic grids: the equispaced reference grid and its perturbations.
//!
//! A grid of size `K = 2N + 1` lives on `[-pi, pi)` with spacing
//! `h = 2*pi/K` and nodes indexed `k = -N..=N`. A perturbed grid moves node
//! `k` to `x~_k = k*h + s_k*h` with `|s_k| <= alpha < 1/2`; the `alpha < 1/2`
//! cap is what keeps nodes separated (minimum gap `(1 - 2*alpha)*h`) and the
//! interpolation problem uniquely solvable.
//!
//! Randomized strategies draw from a counter-style ChaCha stream so that a
//! `(seed, N, trial)` triple always reproduces the same grid regardless of
//! evaluation order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use thiserror::Error;

/// Largest supported grid size `K = 2N + 1` (so `N <= 2048`).
pub const MAX_POINTS: usize = 4097;

/// Largest supported degree `N`.
pub const MAX_DEGREE: usize = (MAX_POINTS - 1) / 2;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("degree {0} exceeds maximum {MAX_DEGREE} (grid size cap {MAX_POINTS})")]
    DegreeTooLarge(usize),
    #[error("alpha must satisfy 0 <= alpha < 1/2, got {0}")]
    AlphaOutOfRange(f64),
    #[error("explicit shifts have length {got}, expected {expected}")]
    ShiftCount { expected: usize, got: usize },
    #[error("shift s_{k} = {value} violates |s| <= alpha = {alpha}")]
    ShiftTooLarge { k: i64, value: f64, alpha: f64 },
    #[error("unknown perturbation strategy '{0}'")]
    UnknownStrategy(String),
}

// ---------------------------------------------------------------------------
// Equispaced reference grid
// ---------------------------------------------------------------------------

/// The equispaced periodic grid `x_k = k*h`, `k = -N..=N`, `h = 2*pi/(2N+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquispacedGrid {
    n: usize,
}

impl EquispacedGrid {
    pub fn new(n: usize) -> Result<Self, GridError> {
        if n > MAX_DEGREE {
            return Err(GridError::DegreeTooLarge(n));
        }
        Ok(EquispacedGrid { n })
    }

    /// Degree `N`.
    pub fn degree(&self) -> usize {
        self.n
    }

    /// Number of nodes `K = 2N + 1` (always odd).
    pub fn len(&self) -> usize {
        2 * self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing `h = 2*pi/K`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.len() as f64
    }

    /// Node `x_k = k*h` for `k` in `-N..=N`. Panics outside that range.
    pub fn node(&self, k: i64) -> f64 {
        assert!(k.unsigned_abs() as usize <= self.n, "node index {k} out of range");
        k as f64 * self.spacing()
    }

    /// All nodes in ascending index order `k = -N..=N`.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.n as i64;
        (-n..=n).map(|k| self.node(k)).collect()
    }
}

// ---------------------------------------------------------------------------
// Perturbation strategies
// ---------------------------------------------------------------------------

/// How the relative shifts `s_k` are chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum PerturbStrategy {
    /// `s_k = 0`: the grid stays equispaced.
    None,
    /// `s_k` i.i.d. uniform on `[-alpha, alpha]`.
    UniformRandom,
    /// `s_k = alpha * (-1)^k`: worst-case-style alternating compression.
    AlternatingMax,
    /// `s_k = alpha`: a rigid rotation of the whole grid.
    AllPlusMax,
    /// `s_k = +-alpha` with random independent signs.
    RandomSignsMax,
    /// Caller-supplied shifts in index order `k = -N..=N`.
    Explicit(Vec<f64>),
}

impl PerturbStrategy {
    /// Stable machine-readable tag (used in CSV output and CLI flags).
    pub fn tag(&self) -> &'static str {
        match self {
            PerturbStrategy::None => "none",
            PerturbStrategy::UniformRandom => "uniform_random",
            PerturbStrategy::AlternatingMax => "alternating_max",
            PerturbStrategy::AllPlusMax => "all_plus_max",
            PerturbStrategy::RandomSignsMax => "random_signs_max",
            PerturbStrategy::Explicit(_) => "explicit",
        }
    }

    /// Whether the strategy consumes random draws (and therefore varies
    /// across trials).
    pub fn is_random(&self) -> bool {
        matches!(
            self,
            PerturbStrategy::UniformRandom | PerturbStrategy::RandomSignsMax
        )
    }
}

impl fmt::Display for PerturbStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PerturbStrategy {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(PerturbStrategy::None),
            "uniform_random" => Ok(PerturbStrategy::UniformRandom),
            "alternating_max" => Ok(PerturbStrategy::AlternatingMax),
            "all_plus_max" => Ok(PerturbStrategy::AllPlusMax),
            "random_signs_max" => Ok(PerturbStrategy::RandomSignsMax),
            other => Err(GridError::UnknownStrategy(other.to_string())),
        }
    }
}

// ---------------------------------------------------------------------------
// Perturbed grid
// ---------------------------------------------------------------------------

/// A perturbed periodic grid `x~_k = (k + s_k) * h` with `|s_k| <= alpha`.
///
/// Nodes are stored in index order `k = -N..=N` (slice position `k + N`).
/// Because `alpha < 1/2`, node order is preserved and the minimum gap —
/// including the wraparound gap between `x~_N` and `x~_{-N} + 2*pi` — is at
/// least `(1 - 2*alpha) * h > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedGrid {
    base: EquispacedGrid,
    alpha: f64,
    shifts: Vec<f64>,
    nodes: Vec<f64>,
}

impl PerturbedGrid {
    pub fn base(&self) -> &EquispacedGrid {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.base.degree()
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.base.spacing()
    }

    /// The perturbation amplitude bound `alpha` the grid was built with.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    fn idx(&self, k: i64) -> usize {
        let n = self.base.degree() as i64;
        assert!((-n..=n).contains(&k), "node index {k} out of range");
        (k + n) as usize
    }

    /// Relative shift `s_k`.
    pub fn shift(&self, k: i64) -> f64 {
        self.shifts[self.idx(k)]
    }

    /// All shifts in index order `k = -N..=N`.
    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    /// Node `x~_k = (k + s_k) * h`.
    pub fn node(&self, k: i64) -> f64 {
        self.nodes[self.idx(k)]
    }

    /// All nodes in index order `k = -N..=N` (strictly increasing).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Smallest gap between circularly adjacent nodes, including the
    /// wraparound gap `2*pi - (x~_N - x~_{-N})`.
    pub fn min_gap(&self) -> f64 {
        let mut gap = 2.0 * PI - (self.nodes[self.len() - 1] - self.nodes[0]);
        for w in self.nodes.windows(2) {
            gap = gap.min(w[1] - w[0]);
        }
        gap
    }

    /// CSV dump of the grid: header `k,x_k,s_k,x_tilde_k`, one row per node
    /// in index order, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let n = self.degree() as i64;
        let mut out = String::from("k,x_k,s_k,x_tilde_k\n");
        for k in -n..=n {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e}",
                k,
                self.base.node(k),
                self.shift(k),
                self.node(k)
            )
            .expect("string write cannot fail");
        }
        out
    }
}

/// Build a perturbed grid from a strategy.
///
/// `seed` feeds a dedicated ChaCha8 stream and is only consumed by the random
/// strategies; deterministic strategies ignore it. `alpha` must lie in
/// `[0, 1/2)`; explicit shifts are validated against it entrywise.
pub fn perturb_grid(
    base: &EquispacedGrid,
    strategy: &PerturbStrategy,
    alpha: f64,
    seed: u64,
) -> Result<PerturbedGrid, GridError> {
    if !(0.0..0.5).contains(&alpha) {
        return Err(GridError::AlphaOutOfRange(alpha));
    }
    let k_len = base.len();
    let n = base.degree() as i64;

    let shifts: Vec<f64> = match strategy {
        PerturbStrategy::None => vec![0.0; k_len],
        PerturbStrategy::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..k_len)
                .map(|_| {
                    if alpha == 0.0 {
                        0.0
                    } else {
                        rng.gen_range(-alpha..=alpha)
                    }
                })
                .collect()
        }
        PerturbStrategy::AlternatingMax => (-n..=n)
            .map(|k| if k.rem_euclid(2) == 0 { alpha } else { -alpha })
            .collect(),
        PerturbStrategy::AllPlusMax => vec![alpha; k_len],
        PerturbStrategy::RandomSignsMax => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..k_len)
                .map(|_| if rng.gen::<bool>() { alpha } else { -alpha })
                .collect()
        }
        PerturbStrategy::Explicit(s) => {
            if s.len() != k_len {
                return Err(GridError::ShiftCount {
                    expected: k_len,
                    got: s.len(),
                });
            }
            for (i, &v) in s.iter().enumerate() {
                if !(v.is_finite() && v.abs() <= alpha) {
                    return Err(GridError::ShiftTooLarge {
                        k: i as i64 - n,
                        value: v,
                        alpha,
                    });
                }
            }
            s.clone()
        }
    };

    let h = base.spacing();
    let nodes: Vec<f64> = (-n..=n)
        .zip(&shifts)
        .map(|(k, &s)| (k as f64 + s) * h)
        .collect();

    Ok(PerturbedGrid {
        base: base.clone(),
        alpha,
        shifts,
        nodes,
    })
}

/// Derive a per-task RNG seed from a master seed and the `(N, trial)` pair.
///
/// SplitMix64-style mixing: statistically independent streams for distinct
/// inputs, stable across releases so archived sweep outputs stay
/// reproducible.
pub fn derive_stream_seed(master: u64, n: usize, trial: u64) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let a = splitmix64(master ^ 0xa076_1d64_78bd_642f);
    let b = splitmix64(a ^ (n as u64));
    splitmix64(b ^ trial.wrapping_mul(0xe703_7ed1_a0b4_28db))
}
