//! Geometry and measure of the Gaussian space.
//!
//! `dγ(x) = π^{-d/2} e^{-|x|²} dx` on `ℝ^d`, restricted in practice to the
//! truncated domain `[-L, L]^d`. Balls are admissible at scale `k` when
//! `r < k·a·m(c)` with `m(x) = min(1, 1/|x|)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::error::{ensure_param, Error, Result};
use crate::quadrature::{self, Tolerance};

pub const DEFAULT_HALF_WIDTH: f64 = 4.0;

/// Samples used by the Monte-Carlo path in dimension three and above.
const MC_SAMPLES: usize = 400_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpace {
    dim: usize,
    a: f64,
    half_width: f64,
    n: usize,
}

impl GaussianSpace {
    pub fn new(dim: usize, a: f64, half_width: f64, n: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidSpace(format!(
                "admissibility parameter a = {a} must be positive"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidSpace(format!(
                "half width L = {half_width} must be positive"
            )));
        }
        if n < 8 {
            return Err(Error::InvalidSpace(format!(
                "n = {n} grid points per axis, need at least 8"
            )));
        }
        Ok(GaussianSpace {
            dim,
            a,
            half_width,
            n,
        })
    }

    /// Space on the default domain `[-4, 4]^d`.
    pub fn with_default_domain(dim: usize, a: f64, n: usize) -> Result<Self> {
        Self::new(dim, a, DEFAULT_HALF_WIDTH, n)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Same domain and parameter, different resolution.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.dim, self.a, self.half_width, n)
    }

    pub fn with_a(&self, a: f64) -> Result<Self> {
        Self::new(self.dim, a, self.half_width, self.n)
    }

    /// Cell width.
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn num_cells(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dim as i32)
    }

    /// Coordinate of the `i`-th cell edge along an axis, `0 ≤ i ≤ n`.
    pub fn edge(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h()
    }

    /// Coordinate of the `i`-th node (cell midpoint) along an axis.
    pub fn node_coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.h()
    }

    /// Per-axis indices of a flat node index (axis 0 varies fastest).
    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.dim);
        for _ in 0..self.dim {
            out.push(idx % self.n);
            idx /= self.n;
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().rev().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn node(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .into_iter()
            .map(|i| self.node_coord(i))
            .collect()
    }

    /// All nodes, flattened in index order.
    pub fn nodes(&self) -> Vec<Vec<f64>> {
        (0..self.num_cells()).map(|i| self.node(i)).collect()
    }

    pub fn axis_cell(&self, coord: f64) -> Option<usize> {
        let t = (coord + self.half_width) / self.h();
        if t >= 0.0 && t < self.n as f64 {
            Some((t.floor() as usize).min(self.n - 1))
        } else {
            None
        }
    }

    /// Flat index of the cell containing `point`, if inside the domain.
    pub fn cell_of(&self, point: &[f64]) -> Option<usize> {
        let mut idx = 0;
        for &c in point.iter().rev() {
            idx = idx * self.n + self.axis_cell(c)?;
        }
        Some(idx)
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.iter().all(|c| c.abs() <= self.half_width)
    }

    pub fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        Ok(())
    }

    /// `π^{-d/2} e^{-|x|²}`.
    pub fn density(&self, point: &[f64]) -> f64 {
        gaussian_density(point)
    }

    /// Midpoint-rule Gaussian mass of one cell.
    pub fn cell_mass(&self, idx: usize) -> f64 {
        self.density(&self.node(idx)) * self.cell_volume()
    }

    /// Midpoint-rule Gaussian mass of every cell, in index order.
    pub fn cell_masses(&self) -> Vec<f64> {
        (0..self.num_cells()).map(|i| self.cell_mass(i)).collect()
    }

    pub fn ball_inside(&self, center: &[f64], radius: f64) -> bool {
        center.iter().all(|c| c.abs() + radius <= self.half_width)
    }
}

pub fn gaussian_density(point: &[f64]) -> f64 {
    let d = point.len() as f64;
    PI.powf(-0.5 * d) * (-norm_sq(point)).exp()
}

pub(crate) fn norm_sq(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum()
}

pub(crate) fn dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// `m(x) = min(1, 1/|x|)`, equal to 1 at the origin.
pub fn admissibility_m(x: &[f64]) -> f64 {
    let r = norm_sq(x).sqrt();
    if r <= 1.0 {
        1.0
    } else {
        1.0 / r
    }
}

/// Lebesgue volume of the unit ball in `ℝ^d`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        d => 2.0 * PI / d as f64 * unit_ball_volume(d - 2),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleBall {
    center: Vec<f64>,
    radius: f64,
    scale: f64,
}

impl AdmissibleBall {
    /// Ball `B(center, radius)` claimed to belong to the family at scale `k`.
    pub fn new(space: &GaussianSpace, center: Vec<f64>, radius: f64, scale: f64) -> Result<Self> {
        space.check_point(&center)?;
        ensure_param(radius > 0.0 && radius.is_finite(), "radius", || {
            format!("{radius} must be positive")
        })?;
        ensure_param(scale >= 1.0 && scale.is_finite(), "scale", || {
            format!("{scale} must be at least 1")
        })?;
        let cap = scale * space.a() * admissibility_m(&center);
        if radius >= cap {
            return Err(Error::NotAdmissible {
                center,
                radius,
                scale,
                cap,
            });
        }
        Ok(AdmissibleBall {
            center,
            radius,
            scale,
        })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        dist(&self.center, x) < self.radius
    }

    /// `factor·B`, recorded at scale `factor·k`, which keeps it admissible.
    pub fn dilate(&self, factor: f64) -> AdmissibleBall {
        AdmissibleBall {
            center: self.center.clone(),
            radius: self.radius * factor,
            scale: self.scale * factor,
        }
    }

    pub fn lebesgue_volume(&self) -> f64 {
        unit_ball_volume(self.center.len()) * self.radius.powi(self.center.len() as i32)
    }

    fn check_inside(&self, space: &GaussianSpace) -> Result<()> {
        if space.ball_inside(&self.center, self.radius) {
            Ok(())
        } else {
            Err(Error::BallOutsideDomain {
                center: self.center.clone(),
                radius: self.radius,
                half_width: space.half_width(),
            })
        }
    }
}

/// `γ([lo, hi])` in one dimension, evaluated without cancellation in the tails.
pub fn interval_measure(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    if is_short(mid, half) {
        return short_interval_measure(mid, half);
    }
    if lo >= 0.0 {
        0.5 * (erfc(lo) - erfc(hi))
    } else if hi <= 0.0 {
        0.5 * (erfc(-hi) - erfc(-lo))
    } else {
        0.5 * (erf(hi) + erf(-lo))
    }
}

/// `γ([mid - half, mid + half])`; keeps full relative accuracy when `half` is tiny next to `mid`.
fn centered_interval_measure(mid: f64, half: f64) -> f64 {
    if half <= 0.0 {
        0.0
    } else if is_short(mid, half) {
        short_interval_measure(mid, half)
    } else {
        interval_measure(mid - half, mid + half)
    }
}

// erf differences lose digits here, while the integrand barely varies
fn is_short(mid: f64, half: f64) -> bool {
    2.0 * half * mid.abs().max(1.0) < 1.0
}

fn short_interval_measure(mid: f64, half: f64) -> f64 {
    let (t, w) = quadrature::gl16();
    let s: f64 = t
        .iter()
        .zip(w)
        .map(|(t, w)| w * (-(mid + half * t).powi(2)).exp())
        .sum();
    s * half / PI.sqrt()
}

/// `γ(B(center, radius))` on all of `ℝ^d`, without a domain check.
pub(crate) fn ball_measure_unchecked(center: &[f64], radius: f64) -> f64 {
    match center.len() {
        1 => interval_measure(center[0] - radius, center[0] + radius),
        2 => disc_measure(center[0], center[1], radius),
        _ => ball_measure_mc(center, radius, MC_SAMPLES, 0).value,
    }
}

// Outer variable x = c1 + r sin φ, inner chord integrated in closed form.
fn disc_measure(c1: f64, c2: f64, r: f64) -> f64 {
    let integrand = |phi: f64| {
        let half_chord = r * phi.cos();
        let x = c1 + r * phi.sin();
        half_chord * (-x * x).exp() * centered_interval_measure(c2, half_chord)
    };
    let v = quadrature::integrate(integrand, -0.5 * PI, 0.5 * PI, Tolerance::relative(1e-13));
    v / PI.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

fn ball_measure_mc(center: &[f64], radius: f64, samples: usize, seed: u64) -> McEstimate {
    let d = center.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = vec![0.0; d];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        loop {
            let mut r2 = 0.0;
            for yi in y.iter_mut() {
                *yi = rng.gen_range(-1.0..1.0);
                r2 += *yi * *yi;
            }
            if r2 < 1.0 {
                break;
            }
        }
        for (yi, ci) in y.iter_mut().zip(center) {
            *yi = ci + radius * *yi;
        }
        let g = gaussian_density(&y);
        sum += g;
        sum_sq += g * g;
    }
    let nf = samples as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
    let vol = unit_ball_volume(d) * radius.powi(d as i32);
    McEstimate {
        value: vol * mean,
        std_error: vol * (var / nf).sqrt(),
        samples,
    }
}

/// Gaussian measure of an admissible ball inside the domain.
///
/// Closed form through the error function in one dimension, an iterated
/// integral with exact inner chords in two, and seeded Monte-Carlo beyond.
pub fn gaussian_ball_measure(space: &GaussianSpace, ball: &AdmissibleBall) -> Result<f64> {
    space.check_point(ball.center())?;
    ball.check_inside(space)?;
    Ok(ball_measure_unchecked(ball.center(), ball.radius()))
}

/// Monte-Carlo estimate of `γ(B)` with its standard error, for any dimension.
pub fn gaussian_ball_measure_mc(
    space: &GaussianSpace,
    ball: &AdmissibleBall,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    space.check_point(ball.center())?;
    ball.check_inside(space)?;
    ensure_param(samples >= 2, "samples", || {
        format!("{samples} must be at least 2")
    })?;
    Ok(ball_measure_mc(ball.center(), ball.radius(), samples, seed))
}

/// Bounds on `e^{|c_B|² - |x|²}` valid for every ball of the family at
/// parameter `ka` and every `x` in it.
pub fn halo_band(ka: f64) -> (f64, f64) {
    ((-2.0 * ka - ka * ka).exp(), (2.0 * ka).exp())
}

pub fn halo_bounds(space: &GaussianSpace, k: f64) -> (f64, f64) {
    halo_band(k * space.a())
}

/// `e^{|c_B|² - |x|²}` for `x ∈ B`.
pub fn check_halo(space: &GaussianSpace, ball: &AdmissibleBall, x: &[f64]) -> Result<f64> {
    space.check_point(x)?;
    if dist(ball.center(), x) > ball.radius() {
        return Err(Error::PointOutsideBall {
            point: x.to_vec(),
            center: ball.center().to_vec(),
            radius: ball.radius(),
        });
    }
    // |c|² - |c+u|² = -(2 c·u + |u|²), no cancellation between large squares.
    let exponent: f64 = ball
        .center()
        .iter()
        .zip(x)
        .map(|(c, xi)| {
            let u = xi - c;
            -(2.0 * c * u + u * u)
        })
        .sum();
    Ok(exponent.exp())
}

/// `γ(B) / (π^{-d/2} e^{-|c_B|²} |B|)`, which the halo band brackets.
pub fn measure_equivalence_ratio(space: &GaussianSpace, ball: &AdmissibleBall) -> Result<f64> {
    let g = gaussian_ball_measure(space, ball)?;
    let model = gaussian_density(ball.center()) * ball.lebesgue_volume();
    Ok(g / model)
}

/// `γ(2B) / γ(B)`.
pub fn doubling_ratio(space: &GaussianSpace, ball: &AdmissibleBall) -> Result<f64> {
    space.check_point(ball.center())?;
    let doubled = ball.dilate(2.0);
    doubled.check_inside(space)?;
    Ok(ball_measure_unchecked(ball.center(), 2.0 * ball.radius())
        / ball_measure_unchecked(ball.center(), ball.radius()))
}

/// Upper bound on the doubling ratio over the family at parameter `a`:
/// the upper halo band at scale 2 over the lower band at scale 1, times `2^d`.
pub fn doubling_bound(space: &GaussianSpace) -> f64 {
    let a = space.a();
    let (_, hi2) = halo_band(2.0 * a);
    let (lo1, _) = halo_band(a);
    2f64.powi(space.dim() as i32) * hi2 / lo1
}

/// Cached `t ↦ γ(B(x, t))` on a geometric radius grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialMeasureProfile {
    anchor: Vec<f64>,
    radii: Vec<f64>,
    values: Vec<f64>,
}

/// Octaves covered below the outer radius.
const PROFILE_OCTAVES: usize = 14;
/// Target bound on consecutive measure ratios.
const PROFILE_STEP: f64 = 1.04;

impl RadialMeasureProfile {
    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn outer_radius(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    /// Monotone interpolation: log-log linear between nodes, `t^d` below the
    /// first node, constant past the last one.
    pub fn value_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.scaled_value(t) * t.powi(self.anchor.len() as i32)
    }

    /// `γ(B(x, t)) / t^d` under the same interpolation.
    pub fn scaled_value(&self, t: f64) -> f64 {
        let d = self.anchor.len() as i32;
        let r = &self.radii;
        let v = &self.values;
        if t <= r[0] {
            return v[0] / r[0].powi(d);
        }
        let last = r.len() - 1;
        if t >= r[last] {
            return v[last] / t.powi(d);
        }
        let hi = r.partition_point(|&ri| ri < t).min(last);
        let lo = hi - 1;
        let w = (t / r[lo]).ln() / (r[hi] / r[lo]).ln();
        let s_lo = v[lo] / r[lo].powi(d);
        let s_hi = v[hi] / r[hi].powi(d);
        s_lo * (s_hi / s_lo).powf(w)
    }
}

/// Profile of `γ(B(x, t))` for `t` up to `k·a·m(x)`.
///
/// The grid halves the radius every `q` steps, with `q` chosen so consecutive
/// values differ by less than 5%; `steps` is a lower bound on the node count.
pub fn radial_profile(
    space: &GaussianSpace,
    x: &[f64],
    k: f64,
    steps: usize,
) -> Result<RadialMeasureProfile> {
    space.check_point(x)?;
    ensure_param(steps >= 16, "steps", || {
        format!("{steps} must be at least 16")
    })?;
    ensure_param(k > 0.0, "k", || format!("{k} must be positive"))?;
    let d = space.dim();
    if d > 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let t_max = k * space.a() * admissibility_m(x);
    let per_octave_min = (2f64.ln() / (PROFILE_STEP.ln() / d as f64)).ceil() as usize;
    let mut per_octave = per_octave_min.max((steps - 1).div_ceil(PROFILE_OCTAVES));
    loop {
        let count = PROFILE_OCTAVES * per_octave + 1;
        let radii: Vec<f64> = (0..count)
            .map(|i| {
                let e = (count - 1 - i) as f64 / per_octave as f64;
                t_max * 2f64.powf(-e)
            })
            .collect();
        let values: Vec<f64> = radii
            .iter()
            .map(|&t| ball_measure_unchecked(x, t))
            .collect();
        let ok = values.windows(2).all(|w| w[1] > w[0] && w[1] / w[0] < 1.05);
        if ok || per_octave > 64 * per_octave_min {
            return Ok(RadialMeasureProfile {
                anchor: x.to_vec(),
                radii,
                values,
            });
        }
        per_octave *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space1() -> GaussianSpace {
        GaussianSpace::with_default_domain(1, 1.0, 64).unwrap()
    }

    #[test]
    fn m_examples() {
        assert_eq!(admissibility_m(&[0.0]), 1.0);
        assert_eq!(admissibility_m(&[0.0, 0.0]), 1.0);
        assert_eq!(admissibility_m(&[2.0, 0.0]), 0.5);
        assert_eq!(admissibility_m(&[0.3]), 1.0);
    }

    #[test]
    fn space_validation() {
        assert!(GaussianSpace::new(0, 1.0, 4.0, 64).is_err());
        assert!(GaussianSpace::new(1, 0.0, 4.0, 64).is_err());
        assert!(GaussianSpace::new(1, 1.0, -1.0, 64).is_err());
        assert!(GaussianSpace::new(1, 1.0, 4.0, 7).is_err());
    }

    #[test]
    fn grid_indexing_round_trips() {
        let s = GaussianSpace::with_default_domain(2, 1.0, 16).unwrap();
        for idx in [0, 5, 17, 255] {
            let mi = s.multi_index(idx);
            assert_eq!(s.flat_index(&mi), idx);
            assert_eq!(s.cell_of(&s.node(idx)), Some(idx));
        }
        assert_eq!(s.cell_of(&[4.5, 0.0]), None);
    }

    #[test]
    fn ball_rejects_inadmissible_radius() {
        let s = space1();
        assert!(AdmissibleBall::new(&s, vec![2.0], 0.49, 1.0).is_ok());
        assert!(matches!(
            AdmissibleBall::new(&s, vec![2.0], 0.5, 1.0),
            Err(Error::NotAdmissible { .. })
        ));
        assert!(AdmissibleBall::new(&s, vec![2.0], 0.9, 2.0).is_ok());
    }

    #[test]
    fn ball_outside_domain_is_an_error() {
        let s = space1();
        let b = AdmissibleBall::new(&s, vec![3.9], 0.2, 1.0).unwrap();
        assert!(matches!(
            gaussian_ball_measure(&s, &b),
            Err(Error::BallOutsideDomain { .. })
        ));
    }

    #[test]
    fn halo_examples() {
        let s = space1();
        let (lo, hi) = halo_bounds(&s, 1.0);
        assert_eq!((lo, hi), ((-3f64).exp(), 2f64.exp()));
        let s2 = s.with_a(0.5).unwrap();
        let (lo, hi) = halo_bounds(&s2, 2.0);
        assert_eq!((lo, hi), ((-3f64).exp(), 2f64.exp()));
        let (lo, hi) = halo_band(0.0);
        assert_eq!((lo, hi), (1.0, 1.0));
    }

    #[test]
    fn check_halo_examples() {
        let s = space1();
        let b = AdmissibleBall::new(&s, vec![2.0], 0.4, 1.0).unwrap();
        assert_eq!(check_halo(&s, &b, &[2.0]).unwrap(), 1.0);
        let v = check_halo(&s, &b, &[2.3]).unwrap();
        assert!((v - (-1.29f64).exp()).abs() < 1e-14);
        let (lo, hi) = halo_bounds(&s, 1.0);
        assert!(lo <= v && v <= hi);
        let b0 = AdmissibleBall::new(&s, vec![0.0], 0.9, 1.0).unwrap();
        let v = check_halo(&s, &b0, &[0.9]).unwrap();
        assert!((v - (-0.81f64).exp()).abs() < 1e-14);
        assert!(matches!(
            check_halo(&s, &b, &[1.5]),
            Err(Error::PointOutsideBall { .. })
        ));
    }

    #[test]
    fn doubling_limits() {
        let s = space1();
        let b = AdmissibleBall::new(&s, vec![0.0], 0.25, 1.0).unwrap();
        let r = doubling_ratio(&s, &b).unwrap();
        assert!(r > 1.0 && r <= doubling_bound(&s));
        assert!(doubling_bound(&s) <= 2.0 * (4.0f64 + 2.0 + 1.0).exp() + 1e-9);
        let tiny = AdmissibleBall::new(&s, vec![0.7], 1e-6, 1.0).unwrap();
        assert!((doubling_ratio(&s, &tiny).unwrap() - 2.0).abs() < 1e-5);
        let s2 = GaussianSpace::with_default_domain(2, 1.0, 64).unwrap();
        let tiny2 = AdmissibleBall::new(&s2, vec![0.3, -0.2], 1e-4, 1.0).unwrap();
        assert!((doubling_ratio(&s2, &tiny2).unwrap() - 4.0).abs() < 1e-3);
    }

    #[test]
    fn profile_is_monotone_with_bounded_steps() {
        for (s, x) in [
            (space1(), vec![0.0]),
            (space1(), vec![2.5]),
            (
                GaussianSpace::with_default_domain(2, 1.0, 64).unwrap(),
                vec![0.5, 1.5],
            ),
        ] {
            let p = radial_profile(&s, &x, 1.0, 16).unwrap();
            assert!(p
                .values()
                .windows(2)
                .all(|w| w[1] > w[0] && w[1] / w[0] < 1.05));
            assert!(p.value_at(1e-9) < 1e-8);
            assert_eq!(p.value_at(0.0), 0.0);
            // interpolation stays monotone between nodes
            let mut prev = 0.0;
            for i in 1..2000 {
                let t = p.outer_radius() * i as f64 / 2000.0;
                let v = p.value_at(t);
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn profile_hits_half_radius_node() {
        let s = space1();
        let p = radial_profile(&s, &[0.0], 1.0, 16).unwrap();
        let i = p
            .radii()
            .iter()
            .position(|&t| (t - 0.5).abs() < 1e-15)
            .expect("0.5 is a node");
        let b = AdmissibleBall::new(&s, vec![0.0], 0.5, 1.0).unwrap();
        let g = gaussian_ball_measure(&s, &b).unwrap();
        assert!((p.values()[i] - g).abs() <= 1e-7 * g);
    }

    #[test]
    fn unsupported_profile_dimension() {
        let s = GaussianSpace::with_default_domain(3, 1.0, 8).unwrap();
        assert!(matches!(
            radial_profile(&s, &[0.0, 0.0, 0.0], 1.0, 16),
            Err(Error::UnsupportedDimension(3))
        ));
    }

    #[test]
    fn mc_path_in_three_dimensions() {
        let s = GaussianSpace::with_default_domain(3, 1.0, 8).unwrap();
        let b = AdmissibleBall::new(&s, vec![0.0, 0.0, 0.0], 0.5, 1.0).unwrap();
        let est = gaussian_ball_measure_mc(&s, &b, 200_000, 3).unwrap();
        // product of three one-dimensional intervals brackets the ball
        let cube_inner = interval_measure(-0.5 / 3f64.sqrt(), 0.5 / 3f64.sqrt()).powi(3);
        let cube_outer = interval_measure(-0.5, 0.5).powi(3);
        assert!(est.value > cube_inner && est.value < cube_outer);
        assert!(est.std_error > 0.0 && est.std_error < 1e-3);
        let again = gaussian_ball_measure_mc(&s, &b, 200_000, 3).unwrap();
        assert_eq!(est, again);
    }
}
