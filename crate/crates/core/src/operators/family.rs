//! The finite ball family behind every maximal operator.
//!
//! In one dimension the family at `x` is every admissible interval whose
//! endpoints are grid edges and which contains `x`; sums run left to right so
//! each interval is accumulated in index order. In two dimensions centers are
//! grid nodes and radii run over [`FAMILY_RADII`] log-spaced values below the
//! admissibility cap; boundary cells enter with their subsampled fraction.
//!
//! Each operator is a choice of per-cell channels (already multiplied by the
//! cell mass) and an objective on the channel sums of one ball.

use crate::error::Result;
use crate::grid::{ball_cell_fractions, pow_nonneg, GridFunction};
use crate::measure::{admissibility_m, dist, GaussianSpace};
use crate::weights::Weight;

use super::kernel::SphereKernel;
use super::{check_beta, check_same_grids, check_scale, check_site};

pub const FAMILY_RADII: usize = 32;

/// Sums and minima of the channels over one ball of the family.
pub(crate) struct BallStats<'a> {
    pub mass: f64,
    pub sums: &'a [f64],
    pub mins: &'a [f64],
}

/// Maximum of `objective` over the family of `x` at scale `k`; zero when the
/// family is empty.
pub(crate) fn family_max<F>(
    space: &GaussianSpace,
    x: &[f64],
    k: f64,
    masses: &[f64],
    sums: &[Vec<f64>],
    mins: &[Vec<f64>],
    objective: F,
) -> f64
where
    F: Fn(&BallStats<'_>) -> f64,
{
    match space.dim() {
        1 => family_max_1d(space, x[0], k, masses, sums, mins, objective),
        _ => family_max_nd(space, x, k, masses, sums, mins, objective),
    }
}

fn family_max_1d<F>(
    space: &GaussianSpace,
    x: f64,
    k: f64,
    masses: &[f64],
    sums: &[Vec<f64>],
    mins: &[Vec<f64>],
    objective: F,
) -> f64
where
    F: Fn(&BallStats<'_>) -> f64,
{
    let n = space.n();
    let reach = k * space.a();
    let mut acc = vec![0.0; sums.len()];
    let mut low = vec![0.0; mins.len()];
    let mut best = 0.0f64;
    for i in 0..n {
        let lo = space.edge(i);
        if lo >= x {
            break;
        }
        if x - lo >= 2.0 * reach {
            continue;
        }
        acc.iter_mut().for_each(|s| *s = 0.0);
        low.iter_mut().for_each(|m| *m = f64::INFINITY);
        let mut mass = 0.0;
        for j in i..n {
            mass += masses[j];
            for (s, ch) in acc.iter_mut().zip(sums) {
                *s += ch[j];
            }
            for (m, ch) in low.iter_mut().zip(mins) {
                *m = m.min(ch[j]);
            }
            let hi = space.edge(j + 1);
            if hi <= x {
                continue;
            }
            let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            if r >= reach {
                break;
            }
            if r < reach * admissibility_m(&[c]) {
                best = best.max(objective(&BallStats {
                    mass,
                    sums: &acc,
                    mins: &low,
                }));
            }
        }
    }
    best
}

fn family_max_nd<F>(
    space: &GaussianSpace,
    x: &[f64],
    k: f64,
    masses: &[f64],
    sums: &[Vec<f64>],
    mins: &[Vec<f64>],
    objective: F,
) -> f64
where
    F: Fn(&BallStats<'_>) -> f64,
{
    let reach = k * space.a();
    let h = space.h();
    let n = space.n();
    let ranges: Vec<(usize, usize)> = x
        .iter()
        .map(|&xc| {
            let lo = ((xc - reach - space.edge(0)) / h).floor().max(0.0) as usize;
            let hi = (((xc + reach - space.edge(0)) / h).ceil().max(0.0) as usize).min(n);
            (lo.min(n), hi)
        })
        .collect();
    let mut acc = vec![0.0; sums.len()];
    let mut low = vec![0.0; mins.len()];
    let mut best = 0.0f64;
    let mut multi = ranges.iter().map(|r| r.0).collect::<Vec<_>>();
    if ranges.iter().any(|r| r.0 >= r.1) {
        return 0.0;
    }
    loop {
        let c: Vec<f64> = multi.iter().map(|&i| space.node_coord(i)).collect();
        let dc = dist(x, &c);
        let r_max = reach * admissibility_m(&c);
        if dc < r_max {
            let r_lo = (0.5 * h).min(0.5 * r_max);
            let r_hi = r_max * (1.0 - 1e-9);
            for t in 0..FAMILY_RADII {
                let r = r_lo * (r_hi / r_lo).powf(t as f64 / (FAMILY_RADII - 1) as f64);
                if r <= dc || !space.ball_inside(&c, r) {
                    continue;
                }
                let cells = ball_cell_fractions(space, &c, r);
                let mut mass = 0.0;
                acc.iter_mut().for_each(|s| *s = 0.0);
                low.iter_mut().for_each(|m| *m = f64::INFINITY);
                for &(i, frac) in &cells {
                    mass += masses[i] * frac;
                    for (s, ch) in acc.iter_mut().zip(sums) {
                        *s += ch[i] * frac;
                    }
                    for (m, ch) in low.iter_mut().zip(mins) {
                        *m = m.min(ch[i]);
                    }
                }
                best = best.max(objective(&BallStats {
                    mass,
                    sums: &acc,
                    mins: &low,
                }));
            }
        }
        // odometer over the index box, axis 0 fastest
        let mut axis = 0;
        loop {
            if axis == multi.len() {
                return best;
            }
            multi[axis] += 1;
            if multi[axis] < ranges[axis].1 {
                break;
            }
            multi[axis] = ranges[axis].0;
            axis += 1;
        }
    }
}

// `(factor_i · v_i) · μ_i`.
fn channel(values: &[f64], factor: impl Fn(usize) -> f64, masses: &[f64]) -> Vec<f64> {
    values
        .iter()
        .zip(masses)
        .enumerate()
        .map(|(i, (v, m))| (factor(i) * v) * m)
        .collect()
}

// β = 0 is the plain average, computed as such so the collapse is exact.
fn fractional_objective(beta: f64) -> impl Fn(&BallStats<'_>) -> f64 {
    move |b: &BallStats<'_>| {
        if beta == 0.0 {
            b.sums[0] / b.mass
        } else {
            b.mass.powf(beta - 1.0) * b.sums[0]
        }
    }
}

/// `M_a f(x)` at scale `k` (the family `𝓑_{ka}`).
pub fn local_maximal(f: &GridFunction, x: &[f64], k: f64) -> Result<f64> {
    let space = f.space();
    check_site(space, x)?;
    check_scale(k)?;
    let mu = space.cell_masses();
    let ch = channel(f.values(), |_| 1.0, &mu);
    Ok(family_max(space, x, k, &mu, &[ch], &[], |b| {
        b.sums[0] / b.mass
    }))
}

/// `M_β^a f(x)`: objective `γ(B)^{β-1} ∫_B f dγ`.
pub fn fractional_maximal(f: &GridFunction, x: &[f64], beta: f64, k: f64) -> Result<f64> {
    let space = f.space();
    check_site(space, x)?;
    check_scale(k)?;
    check_beta(beta, true)?;
    let mu = space.cell_masses();
    let ch = channel(f.values(), |_| 1.0, &mu);
    Ok(family_max(
        space,
        x,
        k,
        &mu,
        &[ch],
        &[],
        fractional_objective(beta),
    ))
}

/// `M_{ν,a} f(x)`: `ν dγ`-averages over the same family.
pub fn measure_maximal(f: &GridFunction, nu: &Weight, x: &[f64], k: f64) -> Result<f64> {
    let space = f.space();
    check_site(space, x)?;
    check_scale(k)?;
    f.check_same_grid(nu.values())?;
    let mu = space.cell_masses();
    let nv = nu.values().values();
    let fnu = channel(f.values(), |i| nv[i], &mu);
    let nch = channel(nv, |_| 1.0, &mu);
    Ok(family_max(space, x, k, &mu, &[fnu, nch], &[], |b| {
        b.sums[0] / b.sums[1]
    }))
}

/// `𝓜_a(f_1, …, f_m)(x)`: product of `γ`-averages on a shared ball.
pub fn multilinear_maximal(fs: &[GridFunction], x: &[f64], k: f64) -> Result<f64> {
    check_same_grids(fs)?;
    let space = fs[0].space();
    check_site(space, x)?;
    check_scale(k)?;
    let mu = space.cell_masses();
    let chs: Vec<Vec<f64>> = fs
        .iter()
        .map(|f| channel(f.values(), |_| 1.0, &mu))
        .collect();
    Ok(family_max(space, x, k, &mu, &chs, &[], |b| {
        let mut prod = 1.0;
        for s in b.sums {
            prod *= s / b.mass;
        }
        prod
    }))
}

/// `|Ω(x-y)|` per cell. The cell containing `x` mixes both sides in one
/// dimension and takes the circle mean in two.
pub(crate) fn kernel_channel_factor(
    space: &GaussianSpace,
    kernel: &SphereKernel,
    x: &[f64],
) -> Vec<f64> {
    let home = space.cell_of(x);
    let abs = kernel.abs();
    (0..space.num_cells())
        .map(|i| {
            if Some(i) == home {
                if let Some(u) = abs.uniform_value() {
                    return u;
                }
                return match abs.plus_minus() {
                    Some((plus, minus)) => {
                        let lam = (x[0] - space.edge(i)) / space.h();
                        lam * plus + (1.0 - lam) * minus
                    }
                    None => abs.mean_abs(),
                };
            }
            let node = space.node(i);
            let v: Vec<f64> = x.iter().zip(&node).map(|(a, b)| a - b).collect();
            abs.value(&v)
        })
        .collect()
}

/// `M_{Ω,β}^a f(x)`: objective `γ(B)^{β-1} ∫_B |Ω(x-y)| f(y) dγ(y)`.
pub fn rough_fractional_maximal(
    f: &GridFunction,
    kernel: &SphereKernel,
    x: &[f64],
    beta: f64,
    k: f64,
) -> Result<f64> {
    let space = f.space();
    check_site(space, x)?;
    check_scale(k)?;
    check_beta(beta, true)?;
    if kernel.dim() != space.dim() {
        return Err(crate::Error::DimensionMismatch {
            expected: space.dim(),
            got: kernel.dim(),
        });
    }
    let mu = space.cell_masses();
    let omega = kernel_channel_factor(space, kernel, x);
    let ch = channel(f.values(), |i| omega[i], &mu);
    Ok(family_max(
        space,
        x,
        k,
        &mu,
        &[ch],
        &[],
        fractional_objective(beta),
    ))
}

/// `N_{β,s'}^a f(x) = [M_β^a(f^{s'})(x)]^{1/s'}`.
pub fn order_s_maximal(
    f: &GridFunction,
    x: &[f64],
    beta: f64,
    s_prime: f64,
    k: f64,
) -> Result<f64> {
    crate::error::ensure_param(s_prime >= 1.0 && s_prime.is_finite(), "s'", || {
        format!("{s_prime} must lie in [1, ∞)")
    })?;
    let fs = f.map(|v| pow_nonneg(v, s_prime))?;
    let m = fractional_maximal(&fs, x, beta, k)?;
    Ok(if s_prime == 1.0 {
        m
    } else {
        m.powf(1.0 / s_prime)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::Weight;

    fn space1(n: usize) -> GaussianSpace {
        GaussianSpace::with_default_domain(1, 1.0, n).unwrap()
    }

    #[test]
    fn constant_function() {
        for s in [
            space1(64),
            GaussianSpace::with_default_domain(2, 1.0, 32).unwrap(),
        ] {
            let f = GridFunction::constant(s, 2.5).unwrap();
            let x = vec![0.3; s.dim()];
            let v = local_maximal(&f, &x, 1.0).unwrap();
            assert!((v - 2.5).abs() < 1e-14, "{v}");
        }
    }

    #[test]
    fn indicator_at_origin_attains_one() {
        let s = space1(64);
        let f = GridFunction::indicator_ball(s, &[0.0], 0.2).unwrap();
        assert_eq!(local_maximal(&f, &[0.0], 1.0).unwrap(), 1.0);
        assert_eq!(local_maximal(&f, &[0.01], 1.0).unwrap(), 1.0);
    }

    #[test]
    fn collapses() {
        let s = space1(64);
        let f = GridFunction::from_fn(s, |x| (x[0] * 3.0).sin().abs() + 0.1).unwrap();
        let one = Weight::constant(s, 1.0).unwrap();
        let k1 = SphereKernel::two_valued(1.0, 1.0, 2.0).unwrap();
        for x in [-2.1, 0.0, 0.37, 3.3] {
            let x = [x];
            let m = local_maximal(&f, &x, 1.0).unwrap();
            assert_eq!(measure_maximal(&f, &one, &x, 1.0).unwrap(), m);
            assert_eq!(
                multilinear_maximal(std::slice::from_ref(&f), &x, 1.0).unwrap(),
                m
            );
            let mb = fractional_maximal(&f, &x, 0.3, 1.0).unwrap();
            assert_eq!(rough_fractional_maximal(&f, &k1, &x, 0.3, 1.0).unwrap(), mb);
            assert_eq!(order_s_maximal(&f, &x, 0.3, 1.0, 1.0).unwrap(), mb);
            let n2 = order_s_maximal(&f, &x, 0.3, 2.0, 1.0).unwrap();
            let m2 = fractional_maximal(&f.map(|v| v * v).unwrap(), &x, 0.3, 1.0).unwrap();
            assert_eq!(n2, m2.powf(0.5));
        }
    }

    #[test]
    fn collapses_two_dimensions() {
        let s = GaussianSpace::with_default_domain(2, 1.0, 32).unwrap();
        let f = GridFunction::from_fn(s, |x| (-(x[0] - 0.2).powi(2) - x[1] * x[1]).exp()).unwrap();
        let one = Weight::constant(s, 1.0).unwrap();
        let k1 = SphereKernel::constant(2, 1.0, 2.0).unwrap();
        let x = [0.1, -0.3];
        let m = local_maximal(&f, &x, 1.0).unwrap();
        assert_eq!(measure_maximal(&f, &one, &x, 1.0).unwrap(), m);
        let mb = fractional_maximal(&f, &x, 0.4, 1.0).unwrap();
        assert_eq!(rough_fractional_maximal(&f, &k1, &x, 0.4, 1.0).unwrap(), mb);
    }

    #[test]
    fn zero_kernel_and_zero_function() {
        let s = space1(64);
        let f = GridFunction::constant(s, 1.0).unwrap();
        let k0 = SphereKernel::two_valued(0.0, 0.0, 2.0).unwrap();
        assert_eq!(
            rough_fractional_maximal(&f, &k0, &[0.2], 0.5, 1.0).unwrap(),
            0.0
        );
        let z = GridFunction::zero(s);
        assert_eq!(local_maximal(&z, &[0.2], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_sites_outside() {
        let f = GridFunction::constant(space1(16), 1.0).unwrap();
        assert!(local_maximal(&f, &[4.0], 1.0).is_err());
        assert!(local_maximal(&f, &[0.0, 0.0], 1.0).is_err());
        assert!(fractional_maximal(&f, &[0.0], 1.5, 1.0).is_err());
    }
}
