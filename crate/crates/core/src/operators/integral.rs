//! Local fractional integrals over the window `B(x, k·a·m(x))`.
//!
//! The integration variable is the displacement `y`, so every argument
//! `f_j(x - θ_j y)` is constant between the breakpoints `(x - edge)/θ_j`.
//! On each such piece the power kernel `|y|^{dβ-d}` is integrated exactly
//! (closed form in one dimension, polar form near the origin in two). The
//! Gaussian form factors its integrand as a smooth part times the same power
//! kernel and freezes the smooth part at the piece midpoint.

use std::f64::consts::PI;

use crate::error::{ensure_param, Error, Result};
use crate::grid::GridFunction;
use crate::measure::{
    admissibility_m, halo_band, norm_sq, radial_profile, unit_ball_volume, GaussianSpace,
    RadialMeasureProfile,
};
use crate::quadrature::{gl6, integrate, Tolerance};

use super::kernel::{ShiftVector, SphereKernel};
use super::{check_beta, check_same_grids, check_scale, check_site};

/// Rectangles at least this many half-widths from the origin use a fixed
/// 6×6 Gauss rule instead of polar integration.
pub const PIECE_FAR_FACTOR: f64 = 6.0;

const PROFILE_STEPS: usize = 64;
const POLAR_TOL: f64 = 1e-11;

fn breakpoints(space: &GaussianSpace, xc: f64, thetas: &[f64], r: f64) -> Vec<f64> {
    let mut b = vec![-r, 0.0, r];
    for e in 0..=space.n() {
        let edge = space.edge(e);
        for &th in thetas {
            let y = (xc - edge) / th;
            if y.abs() < r {
                b.push(y);
            }
        }
    }
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

fn piece_value(fs: &[&GridFunction], thetas: &[f64], x: &[f64], mid: &[f64]) -> f64 {
    let mut v = 1.0;
    let mut arg = vec![0.0; x.len()];
    for (f, &th) in fs.iter().zip(thetas) {
        for ((a, xi), yi) in arg.iter_mut().zip(x).zip(mid) {
            *a = xi - th * yi;
        }
        v *= f.value_at(&arg);
    }
    v
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    lo: [f64; 2],
    hi: [f64; 2],
}

impl Rect {
    fn mid(&self) -> [f64; 2] {
        [
            0.5 * (self.lo[0] + self.hi[0]),
            0.5 * (self.lo[1] + self.hi[1]),
        ]
    }

    fn min_norm(&self) -> f64 {
        let c = |lo: f64, hi: f64| {
            if lo > 0.0 {
                lo
            } else if hi < 0.0 {
                -hi
            } else {
                0.0
            }
        };
        c(self.lo[0], self.hi[0]).hypot(c(self.lo[1], self.hi[1]))
    }

    fn max_norm(&self) -> f64 {
        let c = |lo: f64, hi: f64| lo.abs().max(hi.abs());
        c(self.lo[0], self.hi[0]).hypot(c(self.lo[1], self.hi[1]))
    }

    fn touches_origin(&self) -> bool {
        self.min_norm() == 0.0
    }

    fn is_far(&self, r: f64) -> bool {
        let half = 0.5 * (self.hi[0] - self.lo[0]).max(self.hi[1] - self.lo[1]);
        self.max_norm() < r && self.min_norm() >= PIECE_FAR_FACTOR * half
    }

    /// Sum of `w·g(y)` over the tensor 6-point rule.
    fn gauss6(&self, g: impl Fn(&[f64; 2]) -> f64) -> f64 {
        let (t, w) = gl6();
        let m = self.mid();
        let h = [
            0.5 * (self.hi[0] - self.lo[0]),
            0.5 * (self.hi[1] - self.lo[1]),
        ];
        let mut s = 0.0;
        for (tj, wj) in t.iter().zip(w) {
            for (ti, wi) in t.iter().zip(w) {
                s += wi * wj * g(&[m[0] + h[0] * ti, m[1] + h[1] * tj]);
            }
        }
        s * h[0] * h[1]
    }
}

/// `∫ |y|^{β-1} dy` over `[lo, hi]`, which does not straddle the origin.
fn power_weight_1d(lo: f64, hi: f64, beta: f64) -> f64 {
    if lo >= 0.0 {
        (hi.powf(beta) - lo.powf(beta)) / beta
    } else {
        ((-lo).powf(beta) - (-hi).powf(beta)) / beta
    }
}

fn wrap(d: f64) -> f64 {
    (d + PI).rem_euclid(2.0 * PI) - PI
}

/// `∫_0^∞ 1_{rect ∩ B(0,r)}(ρ u) ρ^{2β-1} dρ` along the unit direction at `phi`.
fn ray_part(rect: &Rect, phi: f64, r: f64, beta: f64) -> f64 {
    let dir = [phi.cos(), phi.sin()];
    let (mut t_in, mut t_out) = (0.0f64, f64::INFINITY);
    for ax in 0..2 {
        if dir[ax].abs() < 1e-300 {
            if rect.lo[ax] > 0.0 || rect.hi[ax] < 0.0 {
                return 0.0;
            }
            continue;
        }
        let (t1, t2) = (rect.lo[ax] / dir[ax], rect.hi[ax] / dir[ax]);
        t_in = t_in.max(t1.min(t2));
        t_out = t_out.min(t1.max(t2));
    }
    let t_out = t_out.min(r);
    if t_out <= t_in {
        return 0.0;
    }
    let e = 2.0 * beta;
    (t_out.powf(e) - t_in.powf(e)) / e
}

/// `∫_{rect ∩ B(0,r)} Ω(y/|y|) |y|^{2β-2} dy` in polar coordinates. The origin
/// is never interior to a rect because it is a breakpoint on both axes.
fn polar_power(rect: &Rect, r: f64, beta: f64, omega: Option<&SphereKernel>) -> f64 {
    let m = rect.mid();
    let phic = m[1].atan2(m[0]);
    let corners = [
        [rect.lo[0], rect.lo[1]],
        [rect.hi[0], rect.lo[1]],
        [rect.lo[0], rect.hi[1]],
        [rect.hi[0], rect.hi[1]],
    ];
    let mut cuts: Vec<f64> = corners
        .iter()
        .filter(|c| c[0] != 0.0 || c[1] != 0.0)
        .map(|c| wrap(c[1].atan2(c[0]) - phic))
        .collect();
    let lo = cuts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = cuts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let push = |phi: f64, cuts: &mut Vec<f64>| {
        let d = wrap(phi - phic);
        if d > lo && d < hi {
            cuts.push(d);
        }
    };
    for ax in 0..2 {
        for c in [rect.lo[ax], rect.hi[ax]] {
            if c.abs() < r {
                let s = (r * r - c * c).sqrt();
                for other in [s, -s] {
                    let p = if ax == 0 { [c, other] } else { [other, c] };
                    push(p[1].atan2(p[0]), &mut cuts);
                }
            }
        }
    }
    if let Some(nodes) = omega.and_then(|k| k.angular_nodes()) {
        let step = 2.0 * PI / nodes as f64;
        let first = ((phic + lo) / step - 0.5).floor() as i64;
        let last = ((phic + hi) / step - 0.5).ceil() as i64;
        for i in first..=last {
            push((i as f64 + 0.5) * step, &mut cuts);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let tol = Tolerance::relative(POLAR_TOL);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (u, v) = (w[0], w[1]);
        if v - u < 1e-15 {
            continue;
        }
        let om = omega.map_or(1.0, |k| k.value_at_angle(phic + 0.5 * (u + v)));
        if om == 0.0 {
            continue;
        }
        total += om * integrate(|d| ray_part(rect, phic + d, r, beta), u, v, tol);
    }
    total
}

fn window_radius(space: &GaussianSpace, x: &[f64], k: f64) -> f64 {
    k * space.a() * admissibility_m(x)
}

/// Sum over pieces of `∏ f_j(x - θ_j y_mid) · kernel(piece)`.
fn sum_pieces_1d(
    fs: &[&GridFunction],
    thetas: &[f64],
    x: &[f64],
    r: f64,
    kernel: impl Fn(f64, f64) -> f64,
) -> f64 {
    let space = fs[0].space();
    let b = breakpoints(space, x[0], thetas, r);
    let mut total = 0.0;
    for w in b.windows(2) {
        let v = piece_value(fs, thetas, x, &[0.5 * (w[0] + w[1])]);
        if v != 0.0 {
            total += v * kernel(w[0], w[1]);
        }
    }
    total
}

fn sum_pieces_2d(
    fs: &[&GridFunction],
    thetas: &[f64],
    x: &[f64],
    r: f64,
    kernel: impl Fn(&Rect) -> f64,
) -> f64 {
    let space = fs[0].space();
    let bx = breakpoints(space, x[0], thetas, r);
    let by = breakpoints(space, x[1], thetas, r);
    let mut total = 0.0;
    for wy in by.windows(2) {
        for wx in bx.windows(2) {
            let rect = Rect {
                lo: [wx[0], wy[0]],
                hi: [wx[1], wy[1]],
            };
            if rect.min_norm() >= r {
                continue;
            }
            let v = piece_value(fs, thetas, x, &rect.mid());
            if v != 0.0 {
                total += v * kernel(&rect);
            }
        }
    }
    total
}

fn check_dim(space: &GaussianSpace) -> Result<()> {
    match space.dim() {
        1 | 2 => Ok(()),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

fn radial_sum(fs: &[&GridFunction], thetas: &[f64], x: &[f64], beta: f64, r: f64) -> f64 {
    let d = x.len();
    let pre = PI.powf(-0.5 * d as f64) * (-beta * norm_sq(x)).exp();
    let sum = if d == 1 {
        sum_pieces_1d(fs, thetas, x, r, |lo, hi| power_weight_1d(lo, hi, beta))
    } else {
        let p = 2.0 * beta - 2.0;
        sum_pieces_2d(fs, thetas, x, r, |rect| {
            if rect.is_far(r) {
                rect.gauss6(|y| (y[0] * y[0] + y[1] * y[1]).powf(0.5 * p))
            } else {
                polar_power(rect, r, beta, None)
            }
        })
    };
    pre * sum
}

/// Radial form `π^{-d/2} e^{-β|x|²} ∫_{B(0, k·a·m(x))} f(x-y) |y|^{dβ-d} dy`.
pub fn fractional_integral_radial(f: &GridFunction, x: &[f64], beta: f64, k: f64) -> Result<f64> {
    let space = f.space();
    check_dim(space)?;
    check_site(space, x)?;
    check_beta(beta, false)?;
    check_scale(k)?;
    Ok(radial_sum(
        &[f],
        &[1.0],
        x,
        beta,
        window_radius(space, x, k),
    ))
}

/// `π^{-d/2} e^{-β|x|²} ∫_{B(0, a·m(x))} ∏ f_j(x - θ_j y) |y|^{dβ-d} dy`.
pub fn multilinear_fractional_integral(
    fs: &[GridFunction],
    thetas: &ShiftVector,
    x: &[f64],
    beta: f64,
) -> Result<f64> {
    check_same_grids(fs)?;
    ensure_param(fs.len() == thetas.len(), "theta", || {
        format!("{} shifts for {} functions", thetas.len(), fs.len())
    })?;
    let space = fs[0].space();
    check_dim(space)?;
    check_site(space, x)?;
    check_beta(beta, false)?;
    let refs: Vec<&GridFunction> = fs.iter().collect();
    Ok(radial_sum(
        &refs,
        thetas.thetas(),
        x,
        beta,
        window_radius(space, x, 1.0),
    ))
}

fn check_profile(profile: &RadialMeasureProfile, x: &[f64], r: f64) -> Result<()> {
    ensure_param(profile.anchor() == x, "profile", || {
        format!("anchored at {:?}, evaluation at {x:?}", profile.anchor())
    })?;
    ensure_param(
        profile.outer_radius() >= r * (1.0 - 1e-12),
        "profile",
        || {
            format!(
                "reaches {} but the window radius is {r}",
                profile.outer_radius()
            )
        },
    )
}

/// Shared Gaussian-form evaluation, optionally with a kernel factor `Ω(y/|y|)`.
fn gaussian_sum(
    f: &GridFunction,
    x: &[f64],
    beta: f64,
    r: f64,
    profile: &RadialMeasureProfile,
    omega: Option<&SphereKernel>,
) -> f64 {
    let d = x.len();
    let norm = PI.powf(-0.5 * d as f64);
    let smooth = |y: &[f64]| {
        let t = norm_sq(y).sqrt();
        let dx: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        norm * (-dx).exp() * profile.scaled_value(t).powf(beta - 1.0)
    };
    let local = {
        let g = norm * (-norm_sq(x)).exp();
        g * (g * unit_ball_volume(d)).powf(beta - 1.0)
    };
    if d == 1 {
        return sum_pieces_1d(&[f], &[1.0], x, r, |lo, hi| {
            let s = if lo == 0.0 || hi == 0.0 {
                local
            } else {
                smooth(&[0.5 * (lo + hi)])
            };
            let term = s * power_weight_1d(lo, hi, beta);
            match omega {
                Some(k) => term * k.value(&[0.5 * (lo + hi)]),
                None => term,
            }
        });
    }
    let p = 2.0 * beta - 2.0;
    let (angular, uniform) = match omega {
        None => (None, 1.0),
        Some(k) => match k.uniform_value() {
            Some(u) => (None, u),
            None => (Some(k), 1.0),
        },
    };
    sum_pieces_2d(&[f], &[1.0], x, r, |rect| {
        if rect.is_far(r) {
            rect.gauss6(|y| {
                let g = smooth(y) * (y[0] * y[0] + y[1] * y[1]).powf(0.5 * p);
                match omega {
                    Some(k) => g * k.value(y),
                    None => g,
                }
            })
        } else {
            let s = if rect.touches_origin() {
                local
            } else {
                smooth(&rect.mid())
            };
            let term = s * polar_power(rect, r, beta, angular);
            match omega {
                Some(_) => term * uniform,
                None => term,
            }
        }
    })
}

/// Gaussian form `∫_{B(x, k·a·m(x))} f(y) γ(B(x,|x-y|))^{β-1} dγ(y)`.
pub fn fractional_integral_gaussian(f: &GridFunction, x: &[f64], beta: f64, k: f64) -> Result<f64> {
    let space = f.space();
    check_dim(space)?;
    check_site(space, x)?;
    check_scale(k)?;
    let profile = radial_profile(space, x, k, PROFILE_STEPS)?;
    fractional_integral_gaussian_with(f, x, beta, k, &profile)
}

/// [`fractional_integral_gaussian`] with a prebuilt measure profile at `x`.
pub fn fractional_integral_gaussian_with(
    f: &GridFunction,
    x: &[f64],
    beta: f64,
    k: f64,
    profile: &RadialMeasureProfile,
) -> Result<f64> {
    let space = f.space();
    check_dim(space)?;
    check_site(space, x)?;
    check_beta(beta, false)?;
    check_scale(k)?;
    let r = window_radius(space, x, k);
    check_profile(profile, x, r)?;
    Ok(gaussian_sum(f, x, beta, r, profile, None))
}

/// `∫_{B(x, k·a·m(x))} Ω(x-y) f(y) γ(B(x,|x-y|))^{β-1} dγ(y)`; signed `Ω` allowed.
pub fn rough_fractional_integral(
    f: &GridFunction,
    kernel: &SphereKernel,
    x: &[f64],
    beta: f64,
    k: f64,
) -> Result<f64> {
    let space = f.space();
    check_dim(space)?;
    check_site(space, x)?;
    check_scale(k)?;
    let profile = radial_profile(space, x, k, PROFILE_STEPS)?;
    rough_fractional_integral_with(f, kernel, x, beta, k, &profile)
}

pub fn rough_fractional_integral_with(
    f: &GridFunction,
    kernel: &SphereKernel,
    x: &[f64],
    beta: f64,
    k: f64,
    profile: &RadialMeasureProfile,
) -> Result<f64> {
    let space = f.space();
    check_dim(space)?;
    check_site(space, x)?;
    check_beta(beta, false)?;
    check_scale(k)?;
    if kernel.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: kernel.dim(),
        });
    }
    let r = window_radius(space, x, k);
    check_profile(profile, x, r)?;
    Ok(gaussian_sum(f, x, beta, r, profile, Some(kernel)))
}

/// Band `[c_lo, c_hi]` containing the ratio of the Gaussian to the radial form
/// for nonnegative `f` at window scale `k`.
///
/// On the window, `e^{-|z|²}/e^{-|x|²}` lies in the halo band `[lo, hi]` at
/// `k·a`, so `γ(B(x,t)) ∈ π^{-d/2} v_d t^d e^{-|x|²}·[lo, hi]`. Raising to
/// `β - 1 < 0` swaps the ends; multiplying by the density factor gives
/// `c_lo = c·lo·hi^{β-1}`, `c_hi = c·hi·lo^{β-1}` with `c = (π^{-d/2} v_d)^{β-1}`.
pub fn two_form_band(dim: usize, a: f64, beta: f64, k: f64) -> Result<(f64, f64)> {
    ensure_param(dim >= 1, "dim", || "must be positive".into())?;
    ensure_param(a > 0.0 && a.is_finite(), "a", || {
        format!("{a} must be positive")
    })?;
    check_beta(beta, false)?;
    check_scale(k)?;
    let (lo, hi) = halo_band(k * a);
    let c = (PI.powf(-0.5 * dim as f64) * unit_ball_volume(dim)).powf(beta - 1.0);
    Ok((c * lo * hi.powf(beta - 1.0), c * hi * lo.powf(beta - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::ball_measure_unchecked;

    fn space(d: usize, n: usize) -> GaussianSpace {
        GaussianSpace::with_default_domain(d, 1.0, n).unwrap()
    }

    #[test]
    fn radial_constant_closed_form() {
        let s = space(1, 64);
        let one = GridFunction::constant(s, 1.0).unwrap();
        let v = fractional_integral_radial(&one, &[0.0], 0.5, 1.0).unwrap();
        assert!((v - 4.0 / PI.sqrt()).abs() < 1e-13, "{v}");
        // off-center site in the curved region: window a/|x|
        let x: f64 = 1.7;
        let r = 1.0 / x;
        let want = PI.powf(-0.5) * (-0.3 * x * x).exp() * 2.0 * r.powf(0.3) / 0.3;
        let v = fractional_integral_radial(&one, &[x], 0.3, 1.0).unwrap();
        assert!((v / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn radial_constant_two_dimensions() {
        let s = space(2, 32);
        let one = GridFunction::constant(s, 1.0).unwrap();
        for (x, beta) in [([0.0, 0.0], 0.5), ([0.3, -0.2], 0.25), ([1.2, 0.9], 0.75)] {
            let r = admissibility_m(&x);
            let want =
                (-beta * norm_sq(&x)).exp() / PI * 2.0 * PI * r.powf(2.0 * beta) / (2.0 * beta);
            let v = fractional_integral_radial(&one, &x, beta, 1.0).unwrap();
            assert!((v / want - 1.0).abs() < 1e-9, "{x:?} {v} {want}");
        }
    }

    // For f ≡ 1 the substitution u = γ(B(x,|x-y|)) gives γ(B(x,R))^β / β.
    #[test]
    fn gaussian_constant_closed_form() {
        let cases: [(usize, usize, &[f64], f64); 4] = [
            (1, 256, &[0.0], 0.5),
            (1, 256, &[1.3], 0.25),
            (2, 64, &[0.0, 0.0], 0.5),
            (2, 64, &[0.8, -0.6], 0.75),
        ];
        for (d, n, x, beta) in cases {
            let one = GridFunction::constant(space(d, n), 1.0).unwrap();
            let r = admissibility_m(x);
            let want = ball_measure_unchecked(x, r).powf(beta) / beta;
            let v = fractional_integral_gaussian(&one, x, beta, 1.0).unwrap();
            assert!((v / want - 1.0).abs() < 2e-3, "{x:?} {v} {want}");
        }
        let erf1 = statrs::function::erf::erf(1.0);
        let one = GridFunction::constant(space(1, 256), 1.0).unwrap();
        let v = fractional_integral_gaussian(&one, &[0.0], 0.5, 1.0).unwrap();
        assert!((v - 2.0 * erf1.sqrt()).abs() < 2e-3);
    }

    #[test]
    fn zero_and_far_support() {
        let s = space(1, 64);
        let z = GridFunction::zero(s);
        assert_eq!(
            fractional_integral_radial(&z, &[0.1], 0.5, 1.0).unwrap(),
            0.0
        );
        assert_eq!(
            fractional_integral_gaussian(&z, &[0.1], 0.5, 1.0).unwrap(),
            0.0
        );
        let far = GridFunction::indicator_ball(s, &[3.0], 0.5).unwrap();
        assert_eq!(
            fractional_integral_gaussian(&far, &[0.0], 0.5, 1.0).unwrap(),
            0.0
        );
        assert_eq!(
            fractional_integral_radial(&far, &[0.0], 0.5, 1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn collapses() {
        let s = space(1, 64);
        let f = GridFunction::from_fn(s, |x| 1.0 + (2.0 * x[0]).cos()).unwrap();
        let one = SphereKernel::two_valued(1.0, 1.0, 2.0).unwrap();
        let th = ShiftVector::new(vec![1.0]).unwrap();
        for x in [-1.9, 0.0, 0.45] {
            let g = fractional_integral_gaussian(&f, &[x], 0.4, 1.0).unwrap();
            assert_eq!(
                rough_fractional_integral(&f, &one, &[x], 0.4, 1.0).unwrap(),
                g
            );
            let r = fractional_integral_radial(&f, &[x], 0.4, 1.0).unwrap();
            let m =
                multilinear_fractional_integral(std::slice::from_ref(&f), &th, &[x], 0.4).unwrap();
            assert_eq!(m, r);
        }
        let s2 = space(2, 24);
        let f2 = GridFunction::from_fn(s2, |x| (-x[0] * x[0] - 2.0 * x[1] * x[1]).exp()).unwrap();
        let one2 = SphereKernel::constant(2, 1.0, 2.0).unwrap();
        let g = fractional_integral_gaussian(&f2, &[0.2, 0.1], 0.5, 1.0).unwrap();
        assert_eq!(
            rough_fractional_integral(&f2, &one2, &[0.2, 0.1], 0.5, 1.0).unwrap(),
            g
        );
    }

    #[test]
    fn odd_kernel_cancels_on_even_data() {
        let s = space(1, 64);
        let f = GridFunction::from_fn(s, |x| (-x[0] * x[0]).exp()).unwrap();
        let odd = SphereKernel::two_valued(1.0, -1.0, 2.0).unwrap();
        // even data, symmetric window and an even measure about the origin
        let v = rough_fractional_integral(&f, &odd, &[0.0], 0.5, 1.0).unwrap();
        let g = fractional_integral_gaussian(&f, &[0.0], 0.5, 1.0).unwrap();
        assert!(v.abs() < 1e-12 * g, "{v} vs {g}");
    }

    #[test]
    fn one_sided_kernel_sees_left_half() {
        let s = space(1, 128);
        let f = GridFunction::indicator_ball(s, &[-0.5], 0.4).unwrap();
        let right = SphereKernel::two_valued(0.0, 1.0, 2.0).unwrap();
        let left = SphereKernel::two_valued(1.0, 0.0, 2.0).unwrap();
        let x = [0.03125];
        assert_eq!(
            rough_fractional_integral(&f, &right, &x, 0.5, 1.0).unwrap(),
            0.0
        );
        let l = rough_fractional_integral(&f, &left, &x, 0.5, 1.0).unwrap();
        assert_eq!(l, fractional_integral_gaussian(&f, &x, 0.5, 1.0).unwrap());
    }

    #[test]
    fn polar_pieces_tile_the_disk() {
        // a window of rects: polar masses add up to the closed-form disk integral
        let r = 0.9;
        let beta = 0.3;
        let cuts = [-0.9, -0.5, -0.05, 0.0, 0.1, 0.45, 0.9];
        let mut total = 0.0;
        for wy in cuts.windows(2) {
            for wx in cuts.windows(2) {
                let rect = Rect {
                    lo: [wx[0], wy[0]],
                    hi: [wx[1], wy[1]],
                };
                total += polar_power(&rect, r, beta, None);
            }
        }
        let want = 2.0 * PI * r.powf(2.0 * beta) / (2.0 * beta);
        assert!((total / want - 1.0).abs() < 1e-10, "{total} {want}");
        let half = SphereKernel::from_angle_fn(720, 2.0, |p| if p.sin() > 0.0 { 1.0 } else { 0.0 })
            .unwrap();
        let mut upper = 0.0;
        for wy in cuts.windows(2) {
            for wx in cuts.windows(2) {
                let rect = Rect {
                    lo: [wx[0], wy[0]],
                    hi: [wx[1], wy[1]],
                };
                upper += polar_power(&rect, r, beta, Some(&half));
            }
        }
        assert!((upper / (0.5 * want) - 1.0).abs() < 1e-3, "{upper}");
    }

    #[test]
    fn band_brackets_constant_ratio() {
        for (d, n, x) in [(1, 256, vec![0.4]), (2, 48, vec![0.5, 0.2])] {
            let one = GridFunction::constant(space(d, n), 1.0).unwrap();
            for beta in [0.25, 0.5, 0.75] {
                let (lo, hi) = two_form_band(d, 1.0, beta, 1.0).unwrap();
                let g = fractional_integral_gaussian(&one, &x, beta, 1.0).unwrap();
                let r = fractional_integral_radial(&one, &x, beta, 1.0).unwrap();
                assert!(lo <= g / r && g / r <= hi, "{lo} {} {hi}", g / r);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let s = space(1, 32);
        let one = GridFunction::constant(s, 1.0).unwrap();
        assert!(fractional_integral_radial(&one, &[0.0], 1.0, 1.0).is_err());
        assert!(fractional_integral_radial(&one, &[0.0], 0.0, 1.0).is_err());
        let k2 = SphereKernel::constant(2, 1.0, 2.0).unwrap();
        assert!(rough_fractional_integral(&one, &k2, &[0.0], 0.5, 1.0).is_err());
        let profile = radial_profile(&s, &[0.5], 1.0, 64).unwrap();
        assert!(fractional_integral_gaussian_with(&one, &[0.0], 0.5, 1.0, &profile).is_err());
        let s3 = GaussianSpace::with_default_domain(3, 1.0, 8).unwrap();
        let one3 = GridFunction::constant(s3, 1.0).unwrap();
        assert!(matches!(
            fractional_integral_radial(&one3, &[0.0; 3], 0.5, 1.0),
            Err(Error::UnsupportedDimension(3))
        ));
    }
}
