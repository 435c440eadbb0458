//! Local maximal operators and local fractional integrals on grid functions.
//!
//! Maximal operators share one finite ball family per site (see [`family`]);
//! integrals are evaluated exactly on the pieces where every argument is
//! constant (see [`integral`]).

pub mod family;
pub mod integral;
mod kernel;

pub use family::{
    fractional_maximal, local_maximal, measure_maximal, multilinear_maximal, order_s_maximal,
    rough_fractional_maximal, FAMILY_RADII,
};
pub use integral::{
    fractional_integral_gaussian, fractional_integral_gaussian_with, fractional_integral_radial,
    multilinear_fractional_integral, rough_fractional_integral, rough_fractional_integral_with,
    two_form_band, PIECE_FAR_FACTOR,
};
pub use kernel::{sphere_norm, ShiftVector, SphereKernel, DEFAULT_ANGULAR_NODES};

use rayon::prelude::*;

use crate::error::{ensure_param, Error, Result};
use crate::grid::GridFunction;
use crate::measure::GaussianSpace;

pub(crate) fn check_site(space: &GaussianSpace, x: &[f64]) -> Result<()> {
    space.check_point(x)?;
    ensure_param(x.iter().all(|c| c.abs() < space.half_width()), "x", || {
        format!("{x:?} lies outside the open domain")
    })
}

pub(crate) fn check_beta(beta: f64, closed: bool) -> Result<()> {
    let ok = if closed {
        (0.0..=1.0).contains(&beta)
    } else {
        beta > 0.0 && beta < 1.0
    };
    ensure_param(ok, "beta", || format!("{beta} is out of range"))
}

pub(crate) fn check_scale(k: f64) -> Result<()> {
    ensure_param(k > 0.0 && k.is_finite(), "k", || {
        format!("{k} must be positive")
    })
}

pub(crate) fn check_same_grids(fs: &[GridFunction]) -> Result<()> {
    let first = fs.first().ok_or_else(|| Error::InvalidParameter {
        name: "fs",
        reason: "need at least one function".into(),
    })?;
    for f in &fs[1..] {
        first.check_same_grid(f)?;
    }
    Ok(())
}

/// Evaluates `op` at every node of `space`, in parallel, and takes `|·|`.
pub fn evaluate_on_grid<F>(space: &GaussianSpace, op: F) -> Result<GridFunction>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let values = (0..space.num_cells())
        .into_par_iter()
        .map(|i| op(&space.node(i)).map(f64::abs))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(*space, values)
}
