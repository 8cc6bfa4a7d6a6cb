//! Shared fixtures for the kernel benchmarks.

use num_complex::Complex64;
use trigrid::{perturb_grid, EquispacedGrid, PerturbStrategy, PerturbedGrid};

/// A deterministic perturbed grid for benchmarking.
pub fn bench_grid(n: usize, alpha: f64) -> PerturbedGrid {
    let base = EquispacedGrid::new(n).expect("bench degree in range");
    perturb_grid(&base, &PerturbStrategy::UniformRandom, alpha, 0xbe9c).expect("bench grid")
}

/// Complex samples of a smooth function on the grid nodes.
pub fn bench_samples(pg: &PerturbedGrid) -> Vec<Complex64> {
    pg.nodes()
        .iter()
        .map(|&x| Complex64::new(1.0 / (1.25 - x.cos()), 0.0))
        .collect()
}
