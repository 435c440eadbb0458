//! Shared fixtures for the criterion benches.

use gausslocal::{GaussianSpace, GridFunction};

pub fn space(dim: usize, n: usize) -> GaussianSpace {
    GaussianSpace::with_default_domain(dim, 1.0, n).expect("valid bench space")
}

/// A smooth bump off the origin, so no symmetry shortcuts apply.
pub fn bump(space: GaussianSpace) -> GridFunction {
    GridFunction::from_fn(space, |x| {
        (-x.iter().map(|v| (v - 0.3) * (v - 0.3)).sum::<f64>() / 0.5).exp()
    })
    .expect("finite bump")
}

/// Evenly spread sites away from the boundary.
pub fn sites(dim: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let t = -2.5 + 5.0 * (i as f64 + 0.5) / count as f64;
            (0..dim)
                .map(|k| if k == 0 { t } else { 0.4 - 0.2 * t })
                .collect()
        })
        .collect()
}
