//! Weights and sampled local Muckenhoupt constants.
//!
//! Every supremum over the admissible family is replaced by a maximum over an
//! explicit list of balls, so each constant is a lower bound of the true one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{ensure_param, Error, Result};
use crate::grid::{ball_cell_fractions, pow_nonneg, GridFunction};
use crate::measure::{admissibility_m, AdmissibleBall, GaussianSpace};

#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    values: GridFunction,
    label: String,
    alpha: Option<f64>,
}

impl Weight {
    pub fn new(values: GridFunction, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if let Some(node) = values.values().iter().position(|&v| v <= 0.0) {
            return Err(Error::NonPositiveWeight { label, node });
        }
        Ok(Weight {
            values,
            label,
            alpha: None,
        })
    }

    pub fn from_fn(
        space: GaussianSpace,
        label: impl Into<String>,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        let label = label.into();
        let values = (0..space.num_cells())
            .map(|i| f(&space.node(i)))
            .collect::<Vec<_>>();
        if let Some(node) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::NonPositiveWeight { label, node });
        }
        Self::new(GridFunction::new(space, values)?, label)
    }

    pub fn constant(space: GaussianSpace, c: f64) -> Result<Self> {
        Self::from_fn(space, format!("const({c})"), |_| c)
    }

    /// `(|x| + δ)^α`.
    pub fn power(space: GaussianSpace, alpha: f64, delta: f64) -> Result<Self> {
        ensure_param(delta > 0.0, "delta", || format!("{delta} must be positive"))?;
        let mut w = Self::from_fn(space, format!("power(alpha={alpha}, delta={delta})"), |x| {
            (x.iter().map(|c| c * c).sum::<f64>().sqrt() + delta).powf(alpha)
        })?;
        w.alpha = Some(alpha);
        Ok(w)
    }

    /// `e^{|x|²}`, for which `ν dγ` is a multiple of Lebesgue measure.
    pub fn gaussian_flattening(space: GaussianSpace) -> Result<Self> {
        Self::from_fn(space, "exp(|x|^2)", |x| {
            x.iter().map(|c| c * c).sum::<f64>().exp()
        })
    }

    pub fn values(&self) -> &GridFunction {
        &self.values
    }

    pub fn space(&self) -> &GaussianSpace {
        self.values.space()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn powf(&self, e: f64) -> Result<Self> {
        let values = self.values.map(|v| pow_pos(v, e))?;
        Self::new(values, format!("({})^{e}", self.label))
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(self.values.scale(c)?, format!("{c}*{}", self.label))
    }

    pub fn product(&self, other: &Weight) -> Result<Self> {
        Self::new(
            self.values.mul(&other.values)?,
            format!("{}*{}", self.label, other.label),
        )
    }
}

// `v^e` for positive `v` with the exponent-one case left untouched.
fn pow_pos(v: f64, e: f64) -> f64 {
    if e == 1.0 {
        v
    } else {
        v.powf(e)
    }
}

/// Hölder conjugate `p/(p-1)`, infinite at `p = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    components: Vec<Weight>,
    exponents: Vec<f64>,
}

impl WeightVector {
    pub fn new(components: Vec<Weight>, exponents: Vec<f64>) -> Result<Self> {
        ensure_param(!components.is_empty(), "components", || {
            "need at least one weight".into()
        })?;
        if components.len() != exponents.len() {
            return Err(Error::ExponentMismatch(format!(
                "{} weights but {} exponents",
                components.len(),
                exponents.len()
            )));
        }
        ensure_param(
            exponents.iter().all(|&p| p >= 1.0 && p.is_finite()),
            "exponents",
            || format!("{exponents:?}: every p_j must lie in [1, ∞)"),
        )?;
        for w in &components[1..] {
            components[0].values.check_same_grid(&w.values)?;
        }
        Ok(WeightVector {
            components,
            exponents,
        })
    }

    pub fn components(&self) -> &[Weight] {
        &self.components
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    /// `1/p = Σ 1/p_j`; equals `p_1` exactly when `m = 1`.
    pub fn p(&self) -> f64 {
        if self.exponents.len() == 1 {
            self.exponents[0]
        } else {
            1.0 / self.exponents.iter().map(|p| 1.0 / p).sum::<f64>()
        }
    }

    /// `ν = ∏ ω_j^{p/p_j}`.
    pub fn nu(&self) -> Result<Weight> {
        let space = *self.components[0].space();
        let p = self.p();
        let mut values = vec![1.0; space.num_cells()];
        for (w, &pj) in self.components.iter().zip(&self.exponents) {
            for (acc, &v) in values.iter_mut().zip(w.values.values()) {
                *acc *= pow_pos(v, p / pj);
            }
        }
        let label = format!(
            "nu[{}]",
            self.components
                .iter()
                .map(|w| w.label.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        );
        Weight::new(GridFunction::new(space, values)?, label)
    }
}

/// Cells of one ball with their fractions and the ball's discrete measure.
#[derive(Debug, Clone)]
pub(crate) struct BallCells {
    cells: Vec<(usize, f64)>,
    weights: Vec<f64>,
    mass: f64,
}

impl BallCells {
    pub(crate) fn new(space: &GaussianSpace, center: &[f64], radius: f64) -> Result<Self> {
        space.check_point(center)?;
        if !space.ball_inside(center, radius) {
            return Err(Error::BallOutsideDomain {
                center: center.to_vec(),
                radius,
                half_width: space.half_width(),
            });
        }
        let cells = ball_cell_fractions(space, center, radius);
        let weights: Vec<f64> = cells
            .iter()
            .map(|&(i, frac)| space.cell_mass(i) * frac)
            .collect();
        let mass = weights.iter().sum();
        Ok(BallCells {
            cells,
            weights,
            mass,
        })
    }

    pub(crate) fn of(space: &GaussianSpace, ball: &AdmissibleBall) -> Result<Self> {
        Self::new(space, ball.center(), ball.radius())
    }

    pub(crate) fn mass(&self) -> f64 {
        self.mass
    }

    /// `∫_B v dγ`.
    pub(crate) fn integral(&self, v: &[f64]) -> f64 {
        self.cells
            .iter()
            .zip(&self.weights)
            .map(|(&(i, _), w)| v[i] * w)
            .sum()
    }

    pub(crate) fn integral_with(&self, v: &[f64], g: impl Fn(f64) -> f64) -> f64 {
        self.cells
            .iter()
            .zip(&self.weights)
            .map(|(&(i, _), w)| g(v[i]) * w)
            .sum()
    }

    /// `γ`-average of `g(v)` over the ball.
    pub(crate) fn average_with(&self, v: &[f64], g: impl Fn(f64) -> f64) -> f64 {
        self.integral_with(v, g) / self.mass
    }

    pub(crate) fn min(&self, v: &[f64]) -> f64 {
        self.cells
            .iter()
            .map(|&(i, _)| v[i])
            .fold(f64::INFINITY, f64::min)
    }
}

fn cells_for(space: &GaussianSpace, balls: &[AdmissibleBall]) -> Result<Vec<BallCells>> {
    balls.iter().map(|b| BallCells::of(space, b)).collect()
}

/// Deterministic sample of admissible balls at scale `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallSampler {
    pub k: f64,
    pub count: usize,
    pub seed: u64,
    /// Factor `c` such that `c·B` must stay inside the domain.
    pub containment: f64,
    pub r_min: f64,
}

impl BallSampler {
    pub fn new(k: f64, count: usize, seed: u64) -> Self {
        BallSampler {
            k,
            count,
            seed,
            containment: 1.0,
            r_min: 1e-3,
        }
    }

    pub fn with_containment(mut self, c: f64) -> Self {
        self.containment = c;
        self
    }

    /// The fixed stratum of extreme balls followed by random ones: centers
    /// uniform on the domain, radii log-uniform below the cap.
    pub fn sample(&self, space: &GaussianSpace) -> Result<Vec<AdmissibleBall>> {
        ensure_param(self.count >= 1, "count", || "need at least one ball".into())?;
        ensure_param(self.k >= 1.0, "k", || {
            format!("{} must be at least 1", self.k)
        })?;
        ensure_param(self.containment >= 1.0, "containment", || {
            format!("{} must be at least 1", self.containment)
        })?;
        let l = space.half_width();
        let d = space.dim();
        let mut out = Vec::with_capacity(self.count);
        for c in stratum_centers(d, l) {
            if out.len() == self.count {
                break;
            }
            if let Some(r_hi) = self.radius_cap(space, &c) {
                let r = (0.95 * self.k * space.a() * admissibility_m(&c)).min(r_hi);
                out.push(AdmissibleBall::new(space, c, r, self.k)?);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut tries = 0usize;
        while out.len() < self.count {
            tries += 1;
            if tries > 1000 * self.count {
                return Err(Error::InvalidParameter {
                    name: "r_min",
                    reason: format!(
                        "no admissible ball above r_min = {} fits the domain",
                        self.r_min
                    ),
                });
            }
            let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-l..l)).collect();
            let Some(r_hi) = self.radius_cap(space, &c) else {
                continue;
            };
            let u: f64 = rng.gen();
            let r = self.r_min * (r_hi / self.r_min).powf(u);
            out.push(AdmissibleBall::new(space, c, r.min(r_hi), self.k)?);
        }
        Ok(out)
    }

    // Largest usable radius at `c`, if it clears `1.5·r_min`.
    fn radius_cap(&self, space: &GaussianSpace, c: &[f64]) -> Option<f64> {
        let cap = self.k * space.a() * admissibility_m(c) * (1.0 - 1e-12);
        let max_abs = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let room = (space.half_width() - max_abs) / self.containment * (1.0 - 1e-12);
        let r_hi = cap.min(room);
        (r_hi > 1.5 * self.r_min).then_some(r_hi)
    }
}

fn stratum_centers(d: usize, l: f64) -> Vec<Vec<f64>> {
    let far = 0.9 * l;
    match d {
        1 => vec![vec![0.0], vec![far], vec![-far], vec![0.45 * l]],
        2 => {
            let diag = far / 2f64.sqrt();
            vec![
                vec![0.0, 0.0],
                vec![far, 0.0],
                vec![0.0, -far],
                vec![diag, diag],
                vec![0.45 * l, 0.0],
            ]
        }
        _ => {
            let mut e = vec![0.0; d];
            let origin = e.clone();
            e[0] = far;
            vec![origin, e]
        }
    }
}

pub fn ball_sampler(
    space: &GaussianSpace,
    k: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<AdmissibleBall>> {
    BallSampler::new(k, count, seed).sample(space)
}

/// Every admissible interval whose endpoints are grid edges, in one dimension.
pub fn grid_aligned_intervals(space: &GaussianSpace, k: f64) -> Result<Vec<AdmissibleBall>> {
    if space.dim() != 1 {
        return Err(Error::UnsupportedDimension(space.dim()));
    }
    let n = space.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let (lo, hi) = (space.edge(i), space.edge(j + 1));
            let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            if r >= k * space.a() {
                break;
            }
            if r < k * space.a() * admissibility_m(&[c]) {
                out.push(AdmissibleBall::new(space, vec![c], r, k)?);
            }
        }
    }
    Ok(out)
}

fn check_exponent(name: &'static str, p: f64) -> Result<()> {
    ensure_param(p >= 1.0 && p.is_finite(), name, || {
        format!("{p} must lie in [1, ∞)")
    })
}

fn max_over<F: Fn(&BallCells) -> f64>(cells: &[BallCells], f: F) -> f64 {
    cells.iter().map(f).fold(0.0, f64::max)
}

// `(avg w)·(avg w^{1-p'})^{p-1}` on one ball, `(avg w)·(ess inf w)^{-1}` at `p = 1`.
fn apa_on_ball(c: &BallCells, w: &[f64], p: f64) -> f64 {
    let avg = c.average_with(w, |v| v);
    if p == 1.0 {
        avg * (1.0 / c.min(w))
    } else {
        let e = 1.0 - conjugate(p);
        avg * c.average_with(w, |v| v.powf(e)).powf(p - 1.0)
    }
}

/// Sampled `A_{p,a}` constant.
pub fn apa_constant(w: &Weight, p: f64, balls: &[AdmissibleBall]) -> Result<f64> {
    check_exponent("p", p)?;
    let cells = cells_for(w.space(), balls)?;
    let v = w.values.values();
    Ok(max_over(&cells, |c| apa_on_ball(c, v, p)))
}

/// Sampled `A_{p,q,a}` constant.
pub fn apqa_constant(w: &Weight, p: f64, q: f64, balls: &[AdmissibleBall]) -> Result<f64> {
    check_exponent("p", p)?;
    ensure_param(q > 1.0 && q.is_finite(), "q", || {
        format!("{q} must lie in (1, ∞)")
    })?;
    let cells = cells_for(w.space(), balls)?;
    let v = w.values.values();
    Ok(max_over(&cells, |c| {
        let first = c.average_with(v, |x| x.powf(q)).powf(1.0 / q);
        let second = if p == 1.0 {
            1.0 / c.min(v)
        } else {
            let pp = conjugate(p);
            c.average_with(v, |x| x.powf(-pp)).powf(1.0 / pp)
        };
        first * second
    }))
}

/// Sampled `A_{P,a}` constant, reported as the `p`-th power of the defining
/// quantity so that `m = 1` reproduces [`apa_constant`] exactly.
pub fn multi_apa_constant(wv: &WeightVector, balls: &[AdmissibleBall]) -> Result<f64> {
    let space = *wv.components[0].space();
    let cells = cells_for(&space, balls)?;
    let nu = wv.nu()?;
    let p = wv.p();
    Ok(max_over(&cells, |c| {
        let mut acc = c.average_with(nu.values.values(), |v| v);
        for (w, &pj) in wv.components.iter().zip(&wv.exponents) {
            let v = w.values.values();
            let factor = if pj == 1.0 {
                1.0 / c.min(v)
            } else {
                let e = 1.0 - conjugate(pj);
                c.average_with(v, |x| x.powf(e)).powf(pj - 1.0)
            };
            acc *= pow_pos(factor, p / pj);
        }
        acc
    }))
}

/// Sampled `max ν(5B)/ν(B)`.
pub fn five_condition_ratio(nu: &Weight, balls: &[AdmissibleBall]) -> Result<f64> {
    let space = nu.space();
    let v = nu.values.values();
    let mut best = 0.0f64;
    for b in balls {
        let big = BallCells::new(space, b.center(), 5.0 * b.radius())?;
        let small = BallCells::of(space, b)?;
        best = best.max(big.integral(v) / small.integral(v));
    }
    Ok(best)
}

/// Sampled `max (avg σ^r)^{1/r} / avg σ` with `σ = w^{-1/(p_j-1)}`.
pub fn reverse_holder_check(w: &Weight, pj: f64, r: f64, balls: &[AdmissibleBall]) -> Result<f64> {
    ensure_param(pj > 1.0 && pj.is_finite(), "p_j", || {
        format!("{pj} must lie in (1, ∞)")
    })?;
    check_exponent("r", r)?;
    let cells = cells_for(w.space(), balls)?;
    let e = -1.0 / (pj - 1.0);
    let sigma: Vec<f64> = w.values.values().iter().map(|v| v.powf(e)).collect();
    Ok(max_over(&cells, |c| {
        c.average_with(&sigma, |s| pow_nonneg(s, r)).powf(1.0 / r) / c.average_with(&sigma, |s| s)
    }))
}

/// Exponents of the fractional theorems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FractionalParams {
    beta: f64,
    p: f64,
    q: f64,
    s_prime: f64,
    epsilon: Option<f64>,
}

impl FractionalParams {
    /// `1/q = 1/p - β`, with `s' = 1` until set.
    pub fn new(beta: f64, p: f64) -> Result<Self> {
        ensure_param(beta > 0.0 && beta < 1.0, "beta", || {
            format!("{beta} must lie in (0, 1)")
        })?;
        ensure_param(p >= 1.0 && p.is_finite(), "p", || {
            format!("{p} must lie in [1, ∞)")
        })?;
        ensure_param(1.0 / p > beta, "p", || {
            format!("1/p = {} must exceed beta = {beta}", 1.0 / p)
        })?;
        Ok(FractionalParams {
            beta,
            p,
            q: 1.0 / (1.0 / p - beta),
            s_prime: 1.0,
            epsilon: None,
        })
    }

    /// Sets `s'` directly; `s = s'/(s'-1)` follows.
    pub fn with_s_prime(mut self, s_prime: f64) -> Result<Self> {
        ensure_param(s_prime >= 1.0 && s_prime.is_finite(), "s'", || {
            format!("{s_prime} must lie in [1, ∞)")
        })?;
        ensure_param(s_prime <= self.p, "s'", || {
            format!("{s_prime} must not exceed p = {}", self.p)
        })?;
        self.s_prime = s_prime;
        Ok(self)
    }

    pub fn with_s(self, s: f64) -> Result<Self> {
        ensure_param(s > 1.0, "s", || format!("{s} must exceed 1"))?;
        self.with_s_prime(conjugate(s))
    }

    pub fn with_epsilon(mut self, eps: f64) -> Result<Self> {
        let b = self.beta;
        ensure_param(eps > 0.0 && eps < b && b + eps < 1.0, "epsilon", || {
            format!("{eps} violates 0 < eps < beta < beta + eps < 1")
        })?;
        ensure_param(
            1.0 / self.p > b + eps && 1.0 / self.q < 1.0 - eps,
            "epsilon",
            || format!("{eps} violates 1/p > beta + eps or 1/q < 1 - eps"),
        )?;
        self.epsilon = Some(eps);
        Ok(self)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn s_prime(&self) -> f64 {
        self.s_prime
    }

    pub fn s(&self) -> f64 {
        conjugate(self.s_prime)
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    /// `1/q_ε = 1/p - β - ε`.
    pub fn q_eps(&self) -> Option<f64> {
        self.epsilon.map(|e| 1.0 / (1.0 / self.p - self.beta - e))
    }

    /// `1/q̃_ε = 1/p - β + ε`.
    pub fn q_tilde_eps(&self) -> Option<f64> {
        self.epsilon.map(|e| 1.0 / (1.0 / self.p - self.beta + e))
    }
}

pub const EPSILON_GRID_DEPTH: i32 = 10;
pub const DEFAULT_EPSILON_CAP_FACTOR: f64 = 10.0;

/// Largest `ε ∈ {β/2, …, β/2^10}` meeting the exponent conditions and keeping
/// both perturbed `A(p/s', ·/s', a)` constants of `w^{s'}` under
/// `cap_factor ×` the unperturbed one.
pub fn epsilon_finder(
    params: FractionalParams,
    w: &Weight,
    balls: &[AdmissibleBall],
    cap_factor: f64,
) -> Result<FractionalParams> {
    let sp = params.s_prime;
    let no_eps = Error::NoEpsilonFound { beta: params.beta };
    let ws = w.powf(sp)?;
    let ps = params.p / sp;
    if params.q / sp <= 1.0 {
        return Err(no_eps);
    }
    let base = apqa_constant(&ws, ps, params.q / sp, balls)?;
    if !base.is_finite() {
        return Err(no_eps);
    }
    let cap = cap_factor * base;
    for i in 1..=EPSILON_GRID_DEPTH {
        let eps = params.beta / 2f64.powi(i);
        let Ok(cand) = params.with_epsilon(eps) else {
            continue;
        };
        let (qe, qt) = (cand.q_eps().unwrap(), cand.q_tilde_eps().unwrap());
        if qe / sp <= 1.0 || qt / sp <= 1.0 {
            continue;
        }
        let ke = apqa_constant(&ws, ps, qe / sp, balls)?;
        let kt = apqa_constant(&ws, ps, qt / sp, balls)?;
        if ke <= cap && kt <= cap {
            return Ok(cand);
        }
    }
    Err(no_eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Finiteness {
    Finite,
    Large,
}

impl Finiteness {
    fn of(value: f64, cap: f64) -> Self {
        if value.is_finite() && value <= cap {
            Finiteness::Finite
        } else {
            Finiteness::Large
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledConstant {
    pub label: String,
    pub value: f64,
    pub flag: Finiteness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem36Report {
    pub multilinear: SampledConstant,
    pub linear: Vec<SampledConstant>,
    pub cap: f64,
    pub balls: usize,
}

impl Theorem36Report {
    /// Whether the multilinear flag agrees with "all linear constants finite".
    pub fn consistent(&self) -> bool {
        let all_linear = self.linear.iter().all(|c| c.flag == Finiteness::Finite);
        (self.multilinear.flag == Finiteness::Finite) == all_linear
    }
}

/// The multilinear constant next to the linear constants of
/// `ω_j^{1-p'_j}` in `A_{m p'_j}` and `ν` in `A_{m p}`.
pub fn theorem36_crosscheck(
    wv: &WeightVector,
    balls: &[AdmissibleBall],
    cap: f64,
) -> Result<Theorem36Report> {
    let m = wv.m() as f64;
    let multi = multi_apa_constant(wv, balls)?;
    let mut linear = Vec::with_capacity(wv.m() + 1);
    for (j, (w, &pj)) in wv.components.iter().zip(&wv.exponents).enumerate() {
        let (label, value) = if pj == 1.0 {
            (
                format!("omega_{}^(1/m) in A_1", j + 1),
                apa_constant(&w.powf(1.0 / m)?, 1.0, balls)?,
            )
        } else {
            let pp = conjugate(pj);
            (
                format!("omega_{}^(1-p'_{}) in A_{}", j + 1, j + 1, m * pp),
                apa_constant(&w.powf(1.0 - pp)?, m * pp, balls)?,
            )
        };
        linear.push(SampledConstant {
            label,
            value,
            flag: Finiteness::of(value, cap),
        });
    }
    let nu_const = apa_constant(&wv.nu()?, m * wv.p(), balls)?;
    linear.push(SampledConstant {
        label: format!("nu in A_{}", m * wv.p()),
        value: nu_const,
        flag: Finiteness::of(nu_const, cap),
    });
    Ok(Theorem36Report {
        multilinear: SampledConstant {
            label: "A_P".into(),
            value: multi,
            flag: Finiteness::of(multi, cap),
        },
        linear,
        cap,
        balls: balls.len(),
    })
}
