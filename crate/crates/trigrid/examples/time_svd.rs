//! Quick wall-clock check of the two-norm constant at sweep sizes.

use std::time::Instant;
use trigrid::{perturb_grid, two_norm_lebesgue, EquispacedGrid, PerturbStrategy};

fn main() {
    for &n in &[64usize, 128, 256] {
        let base = EquispacedGrid::new(n).unwrap();
        let pg = perturb_grid(&base, &PerturbStrategy::UniformRandom, 0.3, 1).unwrap();
        let t = Instant::now();
        let r = two_norm_lebesgue(&pg).unwrap();
        println!(
            "N={n}: lambda_two={:.4} in {:.3}s",
            r.lambda_two,
            t.elapsed().as_secs_f64()
        );
    }
}
