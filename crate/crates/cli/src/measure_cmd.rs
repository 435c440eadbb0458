//! `measure`: halo, measure-equivalence, doubling and profile checks on sampled balls.

use gausslocal::measure::{
    check_halo, doubling_bound, doubling_ratio, gaussian_ball_measure, halo_band,
    measure_equivalence_ratio, radial_profile,
};
use gausslocal::weights::BallSampler;
use gausslocal::{admissibility_m, AdmissibleBall, GaussianSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::Record;

/// Where a batch of sampled values fell relative to a band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandOutcome {
    pub dim: usize,
    pub a: f64,
    pub k: f64,
    pub samples: usize,
    pub violations: usize,
    pub lo: f64,
    pub hi: f64,
    pub min: f64,
    pub max: f64,
}

impl BandOutcome {
    fn collect(
        space: &GaussianSpace,
        k: f64,
        (lo, hi): (f64, f64),
        values: &[f64],
        strict_lo: bool,
    ) -> Self {
        let inside = |v: f64| (if strict_lo { v > lo } else { v >= lo }) && v <= hi;
        BandOutcome {
            dim: space.dim(),
            a: space.a(),
            k,
            samples: values.len(),
            violations: values.iter().filter(|v| !inside(**v)).count(),
            lo,
            hi,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn pass(&self) -> bool {
        self.samples > 0 && self.violations == 0
    }

    /// Largest excursion outside the band, as a factor; at most 1 when inside.
    pub fn excursion(&self) -> f64 {
        (self.lo / self.min).max(self.max / self.hi)
    }

    fn record(&self, kind: &str) -> Record {
        let name = format!("d={} a={} k={}", self.dim, self.a, self.k);
        Record::judged(kind, name, self.excursion(), self.pass())
            .bound(1.0)
            .detail(self)
    }
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, ball: &AdmissibleBall) -> Vec<f64> {
    let d = ball.center().len();
    loop {
        let u: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if u.iter().map(|v| v * v).sum::<f64>() < 1.0 {
            return ball
                .center()
                .iter()
                .zip(&u)
                .map(|(c, ui)| c + ball.radius() * ui)
                .collect();
        }
    }
}

/// `e^{|c_B|² - |x|²}` for `points` uniform points in each of `balls` sampled balls at scale `k`.
pub fn halo_suite(
    space: &GaussianSpace,
    k: f64,
    balls: usize,
    points: usize,
    seed: u64,
) -> anyhow::Result<BandOutcome> {
    let family = BallSampler::new(k, balls, seed).sample(space)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut values = Vec::with_capacity(balls * points);
    for b in &family {
        for _ in 0..points {
            let x = uniform_in_ball(&mut rng, b);
            values.push(check_halo(space, b, &x)?);
        }
    }
    Ok(BandOutcome::collect(
        space,
        k,
        halo_band(k * space.a()),
        &values,
        false,
    ))
}

/// `γ(B) / (π^{-d/2} e^{-|c_B|²} |B|)` against the halo band.
pub fn equivalence_suite(
    space: &GaussianSpace,
    k: f64,
    balls: usize,
    seed: u64,
) -> anyhow::Result<BandOutcome> {
    let family = BallSampler::new(k, balls, seed).sample(space)?;
    let values = family
        .par_iter()
        .map(|b| measure_equivalence_ratio(space, b))
        .collect::<gausslocal::Result<Vec<_>>>()?;
    Ok(BandOutcome::collect(
        space,
        k,
        halo_band(k * space.a()),
        &values,
        false,
    ))
}

/// `γ(2B)/γ(B)` against `(1, bound]`, with the bound taken at parameter `k·a`.
pub fn doubling_suite(
    space: &GaussianSpace,
    k: f64,
    balls: usize,
    seed: u64,
) -> anyhow::Result<BandOutcome> {
    let family = BallSampler::new(k, balls, seed)
        .with_containment(2.0)
        .sample(space)?;
    let values = family
        .par_iter()
        .map(|b| doubling_ratio(space, b))
        .collect::<gausslocal::Result<Vec<_>>>()?;
    let bound = doubling_bound(&space.with_a(k * space.a())?);
    Ok(BandOutcome::collect(space, k, (1.0, bound), &values, true))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileOutcome {
    pub dim: usize,
    pub k: f64,
    pub anchors: usize,
    /// Geometric midpoints between profile nodes that were checked.
    pub midpoints: usize,
    pub max_rel_err: f64,
    /// Midpoints where the interpolant left the bracket of its two nodes.
    pub non_monotone: usize,
    pub tol: f64,
}

impl ProfileOutcome {
    pub fn pass(&self) -> bool {
        self.midpoints > 0 && self.non_monotone == 0 && self.max_rel_err <= self.tol
    }
}

/// Relative error allowed between the interpolated profile and a direct ball measure.
pub const PROFILE_TOL: f64 = 1e-3;

/// Interpolated profile values halfway (in log radius) between nodes, against
/// direct ball measures, for radii that fit the domain.
pub fn profile_suite(
    space: &GaussianSpace,
    k: f64,
    anchors: usize,
    seed: u64,
) -> anyhow::Result<ProfileOutcome> {
    let family = BallSampler::new(k, anchors, seed).sample(space)?;
    let per_anchor = family
        .par_iter()
        .map(|b| -> anyhow::Result<(usize, f64, usize)> {
            let prof = radial_profile(space, b.center(), k, 64)?;
            let cap = k * space.a() * admissibility_m(b.center());
            let (mut count, mut worst, mut bad) = (0, 0.0f64, 0);
            for (t, v) in prof.radii().windows(2).zip(prof.values().windows(2)) {
                let mid = (t[0] * t[1]).sqrt();
                if mid >= cap || !space.ball_inside(b.center(), mid) {
                    continue;
                }
                let got = prof.value_at(mid);
                let direct = gaussian_ball_measure(
                    space,
                    &AdmissibleBall::new(space, b.center().to_vec(), mid, k)?,
                )?;
                worst = worst.max((got / direct - 1.0).abs());
                if !(v[0] <= got && got <= v[1]) {
                    bad += 1;
                }
                count += 1;
            }
            Ok((count, worst, bad))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(ProfileOutcome {
        dim: space.dim(),
        k,
        anchors,
        midpoints: per_anchor.iter().map(|e| e.0).sum(),
        max_rel_err: per_anchor.iter().map(|e| e.1).fold(0.0, f64::max),
        non_monotone: per_anchor.iter().map(|e| e.2).sum(),
        tol: PROFILE_TOL,
    })
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<Vec<Record>> {
    let space = cfg.space.build()?;
    let m = &cfg.measure;
    let mut out = Vec::new();
    for (i, &k) in m.scales.iter().enumerate() {
        let seed = cfg.seed.wrapping_add(i as u64);
        out.push(halo_suite(&space, k, m.balls, m.points_per_ball, seed)?.record("halo"));
        out.push(equivalence_suite(&space, k, m.balls, seed)?.record("measure_equivalence"));
        out.push(doubling_suite(&space, k, m.balls, seed)?.record("doubling"));
        if m.profile_balls > 0 {
            let p = profile_suite(&space, k, m.profile_balls, seed)?;
            out.push(
                Record::judged(
                    "profile",
                    format!("d={} k={k}", p.dim),
                    p.max_rel_err,
                    p.pass(),
                )
                .bound(p.tol)
                .detail(&p),
            );
        }
    }
    Ok(out)
}
