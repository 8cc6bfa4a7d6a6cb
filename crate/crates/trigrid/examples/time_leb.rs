//! Quick wall-clock check of the Lebesgue-constant search at sweep sizes.

use std::time::Instant;
use trigrid::{lebesgue_constant, perturb_grid, EquispacedGrid, PerturbStrategy, SearchOpts};

fn main() {
    for &n in &[64usize, 128, 256] {
        let base = EquispacedGrid::new(n).unwrap();
        let pg = perturb_grid(&base, &PerturbStrategy::UniformRandom, 0.3, 1).unwrap();
        let t = Instant::now();
        let (lam, _) = lebesgue_constant(&pg, &SearchOpts::default());
        println!("N={n}: lambda={lam:.4} in {:.3}s", t.elapsed().as_secs_f64());
    }
}
