//! Seeded generators for randomized property trials. Everything is driven by
//! an explicit ChaCha stream so runs are reproducible byte-for-byte.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::ext_real::ExtReal;
use crate::grid::Grid;
use crate::sampled::SampledFunction;

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random piecewise-linear grid function built as a slope-bounded walk:
/// every adjacent increment is at most `max_slope * spacing`, so the grid
/// Lipschitz modulus never exceeds `max_slope` (up to coordinate rounding).
pub fn random_piecewise_linear(
    grid: &Grid,
    rng: &mut ChaCha8Rng,
    max_slope: f64,
    value_range: (f64, f64),
) -> Result<SampledFunction> {
    assert_eq!(grid.dim(), 1, "random walks are 1-D");
    let n = grid.node_count();
    let h = grid.spacing(0);
    let mut vals = Vec::with_capacity(n);
    let mut v = rng.gen_range(value_range.0..=value_range.1);
    vals.push(v);
    for _ in 1..n {
        v += rng.gen_range(-max_slope * h..=max_slope * h);
        vals.push(v);
    }
    SampledFunction::from_finite(grid.clone(), vals, None)
}

/// Same walk with a fraction of nodes knocked out to +inf; the result is
/// always proper.
pub fn random_with_infinities(
    grid: &Grid,
    rng: &mut ChaCha8Rng,
    max_slope: f64,
    value_range: (f64, f64),
    inf_probability: f64,
) -> Result<SampledFunction> {
    let base = random_piecewise_linear(grid, rng, max_slope, value_range)?;
    let n = grid.node_count();
    let keep = rng.gen_range(0..n);
    let values = base
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if i != keep && rng.gen_bool(inf_probability) {
                ExtReal::PosInf
            } else {
                *v
            }
        })
        .collect();
    SampledFunction::new(grid.clone(), values, None)
}
