//! Acceptance suite. Runs without the libtest harness so each criterion
//! prints exactly one line whether or not it passes; the process exits 1 if
//! any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use anyhow::{ensure, Context};
use gausslocal::measure::GaussianSpace;
use gausslocal::operators::{
    fractional_integral_gaussian, fractional_integral_radial, fractional_maximal, local_maximal,
    measure_maximal, multilinear_fractional_integral, multilinear_maximal, order_s_maximal,
    rough_fractional_integral, rough_fractional_maximal,
};
use gausslocal::verify::{refinement_gate, sample_sites, verify_lemma_iks, verify_lemma_lm34};
use gausslocal::weights::{apa_constant, ball_sampler, multi_apa_constant};
use gausslocal::{
    admissibility_m, GridFunction, NormExperiment, ShiftVector, SphereKernel, Weight, WeightVector,
};
use gausslocal_cli::config::{Lm34Request, RunConfig};
use gausslocal_cli::measure_cmd::{doubling_suite, equivalence_suite, halo_suite};
use gausslocal_cli::resolve::Fixtures;
use gausslocal_cli::verify_cmd::{experiment_once, lm34_refinement, two_form_check};
use gausslocal_cli::{execute, Command};

const SEED: u64 = 0x5eed_0001;

const HALO_BUDGET: Duration = Duration::from_secs(10);
const EQUIVALENCE_BUDGET: Duration = Duration::from_secs(60);
const SUITE_BUDGET: Duration = Duration::from_secs(15 * 60);

const HALO_SAMPLES: usize = 10_000;
const ORACLE_SITES: usize = 200;
const TWO_FORM_SITES: usize = 500;
const IKS_TOL: f64 = 1e-6;
const COLLAPSE_TOL: f64 = 1e-10;
const LM34_SPREAD: f64 = 1.10;
const GATE_SPREAD: f64 = 1.5;

const DIMS: [usize; 2] = [1, 2];
const AS: [f64; 3] = [0.5, 1.0, 2.0];
const KS: [f64; 3] = [1.0, 2.0, 5.0];

type Outcome = anyhow::Result<(bool, String)>;

fn default_fixtures(cfg: &RunConfig) -> anyhow::Result<Fixtures<'_>> {
    Ok(Fixtures::new(cfg, cfg.space.build()?))
}

// The grid is unused by the measure checks; keep it coarse.
fn measure_space(d: usize, a: f64) -> anyhow::Result<GaussianSpace> {
    Ok(GaussianSpace::with_default_domain(d, a, 8)?)
}

fn halo() -> Outcome {
    let start = Instant::now();
    let combos = DIMS.len() * AS.len() * KS.len();
    let balls = HALO_SAMPLES.div_ceil(combos * 5);
    let (mut samples, mut violations, mut worst) = (0, 0, 0.0f64);
    for (i, (d, a, k)) in combos_iter().enumerate() {
        let o = halo_suite(&measure_space(d, a)?, k, balls, 5, SEED + i as u64)?;
        samples += o.samples;
        violations += o.violations;
        worst = worst.max(o.excursion());
    }
    let t = start.elapsed();
    Ok((
        samples >= HALO_SAMPLES && violations == 0 && t < HALO_BUDGET,
        format!(
            "{samples} samples, {violations} violations, worst excursion {worst:.6}, {:.2}s",
            t.as_secs_f64()
        ),
    ))
}

fn combos_iter() -> impl Iterator<Item = (usize, f64, f64)> {
    DIMS.into_iter().flat_map(|d| {
        AS.into_iter()
            .flat_map(move |a| KS.into_iter().map(move |k| (d, a, k)))
    })
}

fn equivalence() -> Outcome {
    let start = Instant::now();
    let (mut balls, mut violations, mut worst) = (0, 0, 0.0f64);
    for (i, (d, a, k)) in combos_iter().enumerate() {
        let space = measure_space(d, a)?;
        let count = if d == 1 { 200 } else { 60 };
        for o in [
            equivalence_suite(&space, k, count, SEED + i as u64)?,
            doubling_suite(&space, k, count, SEED + i as u64)?,
        ] {
            balls += o.samples;
            violations += o.violations;
            worst = worst.max(o.excursion());
        }
    }
    let t = start.elapsed();
    Ok((
        violations == 0 && t < EQUIVALENCE_BUDGET,
        format!(
            "{balls} balls, {violations} violations, worst excursion {worst:.6}, {:.2}s",
            t.as_secs_f64()
        ),
    ))
}

/// Exhaustive grid-aligned intervals around `x`, accumulated cell by cell.
struct IntervalOracle {
    space: GaussianSpace,
    masses: Vec<f64>,
}

impl IntervalOracle {
    fn new(space: GaussianSpace) -> Self {
        let masses = (0..space.n()).map(|i| space.cell_mass(i)).collect();
        IntervalOracle { space, masses }
    }

    /// Max of `obj(mass, sums)` over admissible intervals containing `x`.
    fn max(&self, x: f64, fs: &[&GridFunction], obj: impl Fn(f64, &[f64]) -> f64) -> f64 {
        let s = &self.space;
        let mut best = 0.0f64;
        for i in 0..s.n() {
            for j in i..s.n() {
                let (lo, hi) = (s.edge(i), s.edge(j + 1));
                let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                if !(lo < x && x < hi) || r >= s.a() * admissibility_m(&[c]) {
                    continue;
                }
                let mut mass = 0.0;
                let mut sums = vec![0.0; fs.len()];
                for cell in i..=j {
                    mass += self.masses[cell];
                    for (acc, f) in sums.iter_mut().zip(fs) {
                        *acc += f.values()[cell] * self.masses[cell];
                    }
                }
                best = best.max(obj(mass, &sums));
            }
        }
        best
    }
}

fn oracle() -> Outcome {
    let cfg = RunConfig::default_battery();
    let fx = default_fixtures(&cfg)?;
    let space = fx.space().with_n(64)?;
    let fx = fx.refined(64)?;
    let names = ["ind", "ind_off", "bump", "plateaus", "spike"];
    let fs: Vec<GridFunction> = names
        .iter()
        .map(|n| fx.function(n))
        .collect::<anyhow::Result<_>>()?;
    let oracle = IntervalOracle::new(space);
    let sites = sample_sites(&space, ORACLE_SITES, SEED, 0.05)?;
    let beta = 0.5;
    let (mut checked, mut mismatches) = (0, 0);
    for (i, f) in fs.iter().enumerate() {
        let g = &fs[(i + 1) % fs.len()];
        let pair = [f.clone(), g.clone()];
        for x in &sites {
            let want_local = oracle.max(x[0], &[f], |m, s| s[0] / m);
            let want_frac = oracle.max(x[0], &[f], |m, s| m.powf(beta - 1.0) * s[0]);
            let want_multi = oracle.max(x[0], &[f, g], |m, s| {
                let mut p = 1.0;
                for v in s {
                    p *= v / m;
                }
                p
            });
            for (got, want) in [
                (local_maximal(f, x, 1.0)?, want_local),
                (fractional_maximal(f, x, beta, 1.0)?, want_frac),
                (multilinear_maximal(&pair, x, 1.0)?, want_multi),
            ] {
                checked += 1;
                if got.to_bits() != want.to_bits() {
                    mismatches += 1;
                }
            }
        }
    }
    Ok((
        mismatches == 0,
        format!("{checked} values at n=64, {mismatches} bit mismatches"),
    ))
}

fn two_form() -> Outcome {
    let mut cfg = RunConfig::default_battery();
    cfg.verify.sites = TWO_FORM_SITES;
    let fx = default_fixtures(&cfg)?;
    let req = cfg
        .verify
        .two_form
        .first()
        .context("default battery has a two_form request")?;
    ensure!(
        req.functions.len() == 4 && req.betas == [0.25, 0.5, 0.75],
        "unexpected two_form request"
    );
    let sites = sample_sites(fx.space(), TWO_FORM_SITES, SEED, cfg.verify.site_margin)?;
    let out = two_form_check(&fx, req, &sites)?;
    let violations: usize = out.iter().map(|o| o.violations).sum();
    let lo = out
        .iter()
        .map(|o| o.min / o.lo)
        .fold(f64::INFINITY, f64::min);
    let hi = out.iter().map(|o| o.max / o.hi).fold(0.0, f64::max);
    Ok((
        out.iter().all(|o| o.pass()),
        format!(
            "{} fixtures x {} betas x {TWO_FORM_SITES} sites, {violations} violations, min/lo {lo:.4}, max/hi {hi:.4}",
            req.functions.len(),
            req.betas.len()
        ),
    ))
}

fn iks() -> Outcome {
    let cfg = RunConfig::default_battery();
    let fx = default_fixtures(&cfg)?;
    let sites = sample_sites(fx.space(), 100, SEED, cfg.verify.site_margin)?;
    let f = |n: &str| fx.function(n);
    let singles = ["bump", "ind", "plateaus", "bump_off"];
    let pairs = [
        ("ind", "bump_off"),
        ("bump", "plateaus"),
        ("ind_off", "one"),
    ];
    let mut worst = 0.0f64;
    let mut cases = 0;
    let mut all_pass = true;
    for beta in [0.3, 0.6] {
        let mut record = |r: gausslocal::InequalityReport| {
            cases += 1;
            worst = if r.max_ratio.is_nan() {
                f64::NAN
            } else {
                worst.max(r.max_ratio)
            };
            all_pass &= r.pass && r.max_ratio <= 1.0 + IKS_TOL;
        };
        for name in singles {
            for p in [2.0, 3.0] {
                record(verify_lemma_iks(
                    &[f(name)?],
                    &ShiftVector::new(vec![1.0])?,
                    beta,
                    &[p],
                    p,
                    &sites,
                )?);
            }
        }
        for (a, b) in pairs {
            for th in [[1.0, 2.0], [0.5, 2.0]] {
                for (ps, s) in [([4.0, 4.0], 2.0), ([3.0, 6.0], 2.0), ([2.0, 2.0], 1.0)] {
                    record(verify_lemma_iks(
                        &[f(a)?, f(b)?],
                        &ShiftVector::new(th.to_vec())?,
                        beta,
                        &ps,
                        s,
                        &sites,
                    )?);
                }
            }
        }
    }
    // m = 1, θ = 1, s = p: both sides coincide
    let mut collapse = 0.0f64;
    let one = ShiftVector::new(vec![1.0])?;
    for name in singles {
        let g = f(name)?;
        for x in &sites {
            let lhs = multilinear_fractional_integral(std::slice::from_ref(&g), &one, x, 0.4)?;
            let rhs = fractional_integral_radial(&g, x, 0.4, 1.0)?;
            if rhs != 0.0 {
                collapse = collapse.max((lhs / rhs - 1.0).abs());
            }
        }
    }
    Ok((
        all_pass && worst <= 1.0 + IKS_TOL && collapse <= COLLAPSE_TOL,
        format!("{cases} batteries, max ratio {worst:.12}, collapse deviation {collapse:.2e}"),
    ))
}

fn lm34() -> Outcome {
    let cfg = RunConfig::default_battery();
    let fx = default_fixtures(&cfg)?;
    let sites = sample_sites(
        fx.space(),
        cfg.verify.sites,
        cfg.seed,
        cfg.verify.site_margin,
    )?;
    let mut requests = cfg.verify.lm34.clone();
    // indicators give the largest ratios for the signed kernel, so they calibrate
    requests.push(Lm34Request {
        calibration: vec!["ind".into(), "ind_off".into()],
        held_out: vec![
            "bump".into(),
            "bump_off".into(),
            "plateaus".into(),
            "spike".into(),
        ],
        kernel: "signed".into(),
        beta: 0.4,
        beta1: 0.2,
        beta2: 0.7,
    });
    let mut ok = true;
    let mut notes = Vec::new();
    for req in &requests {
        let kernel = fx.kernel(&req.kernel)?;
        let r = verify_lemma_lm34(
            &fx.functions(&req.calibration)?,
            &fx.functions(&req.held_out)?,
            &kernel,
            req.beta,
            req.beta1,
            req.beta2,
            &sites,
        )?;
        let refine = lm34_refinement(&fx, req, &cfg.verify.ns, &sites)?;
        ok &= r.pass && r.margin >= 0.0 && refine.spread <= LM34_SPREAD;
        notes.push(format!(
            "{} margin {:.4} spread {:.4}",
            req.kernel, r.margin, refine.spread
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn gates() -> Outcome {
    let cfg = RunConfig::default_battery();
    let fx = default_fixtures(&cfg)?;
    let ns = [64, 128, 256];
    let mut ok = true;
    let mut notes = Vec::new();
    let mut out_of_class = 0;
    for req in &cfg.verify.experiment {
        let per_n: Vec<Vec<NormExperiment>> = ns
            .iter()
            .map(|&n| experiment_once(&fx.refined(n)?, req))
            .collect::<anyhow::Result<_>>()?;
        for j in 0..per_n[0].len() {
            let runs: Vec<NormExperiment> = per_n.iter().map(|v| v[j].clone()).collect();
            let finite = runs.iter().all(|r| r.ratio.is_some_and(f64::is_finite));
            let g = refinement_gate(&runs)?;
            if g.in_class {
                ok &= finite && g.ns == ns && g.spread < GATE_SPREAD;
                notes.push(format!("{} {:.3}", g.theorem, g.spread));
            } else {
                out_of_class += 1;
                ok &= g.monotone_growth;
                notes.push(format!(
                    "{} out-of-class ratios {:.1?}",
                    g.theorem, g.ratios
                ));
            }
        }
    }
    ok &= out_of_class > 0;
    Ok((ok, format!("spreads: {}", notes.join(", "))))
}

fn collapses() -> Outcome {
    let mut checked = 0;
    let mut broken = Vec::new();
    for (d, n) in [(1, 64), (2, 16)] {
        let space = GaussianSpace::with_default_domain(d, 1.0, n)?;
        let f = GridFunction::from_fn(space, |x| {
            (-(x.iter().map(|v| (v - 0.3) * (v - 0.3)).sum::<f64>())).exp()
        })?;
        let nu = Weight::constant(space, 1.0)?;
        let omega = SphereKernel::constant(d, 1.0, 2.0)?;
        let one = ShiftVector::new(vec![1.0])?;
        let fs = std::slice::from_ref(&f);
        let sites = sample_sites(&space, if d == 1 { 100 } else { 12 }, SEED, 0.6)?;
        let mut same = |what: &str, a: f64, b: f64| {
            checked += 1;
            if a.to_bits() != b.to_bits() {
                broken.push(format!("{what} d={d}: {a} vs {b}"));
            }
        };
        for x in &sites {
            let lm = local_maximal(&f, x, 1.0)?;
            same(
                "measure_maximal nu=1",
                measure_maximal(&f, &nu, x, 1.0)?,
                lm,
            );
            same(
                "multilinear_maximal m=1",
                multilinear_maximal(fs, x, 1.0)?,
                lm,
            );
            same(
                "fractional_maximal beta=0",
                fractional_maximal(&f, x, 0.0, 1.0)?,
                lm,
            );
            for beta in [0.25, 0.5] {
                let fm = fractional_maximal(&f, x, beta, 1.0)?;
                same(
                    "rough_fractional_maximal omega=1",
                    rough_fractional_maximal(&f, &omega, x, beta, 1.0)?,
                    fm,
                );
                same(
                    "order_s_maximal s'=1",
                    order_s_maximal(&f, x, beta, 1.0, 1.0)?,
                    fm,
                );
                if d == 1 {
                    same(
                        "multilinear_fractional_integral m=1",
                        multilinear_fractional_integral(fs, &one, x, beta)?,
                        fractional_integral_radial(&f, x, beta, 1.0)?,
                    );
                    same(
                        "rough_fractional_integral omega=1",
                        rough_fractional_integral(&f, &omega, x, beta, 1.0)?,
                        fractional_integral_gaussian(&f, x, beta, 1.0)?,
                    );
                }
            }
        }
        let w = Weight::power(space, 0.5, 0.01)?;
        let balls = ball_sampler(&space, 1.0, 100, SEED)?;
        let wv = WeightVector::new(vec![w.clone()], vec![2.0])?;
        same(
            "multi_apa m=1",
            multi_apa_constant(&wv, &balls)?,
            apa_constant(&w, 2.0, &balls)?,
        );
    }
    let detail = if broken.is_empty() {
        format!("{checked} identities bit-for-bit")
    } else {
        format!("{} of {checked} broken, first: {}", broken.len(), broken[0])
    };
    Ok((broken.is_empty(), detail))
}

fn determinism(suite_start: Instant) -> Outcome {
    let cfg = RunConfig::default_battery();
    let mut differing = Vec::new();
    for cmd in [
        Command::Measure,
        Command::Weights,
        Command::Op,
        Command::Verify,
    ] {
        let render = || -> anyhow::Result<String> {
            let mut b = execute(cmd, &cfg)?;
            b.timestamp = 0;
            b.to_json()
        };
        if render()? != render()? {
            differing.push(cmd.name());
        }
    }
    let t = suite_start.elapsed();
    Ok((
        differing.is_empty() && t < SUITE_BUDGET,
        format!(
            "4 commands run twice, {} differ {differing:?}, suite so far {:.1}s",
            differing.len(),
            t.as_secs_f64()
        ),
    ))
}

fn report(id: usize, title: &str, run: impl FnOnce() -> Outcome) -> bool {
    let (ok, detail) = match catch_unwind(AssertUnwindSafe(run)) {
        Ok(Ok(v)) => v,
        Ok(Err(e)) => (false, format!("error: {e:#}")),
        Err(_) => (false, "panicked".into()),
    };
    println!(
        "criterion {id} [{}] {title}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn main() {
    let start = Instant::now();
    let results = [
        report(1, "halo band", halo),
        report(2, "measure equivalence and doubling", equivalence),
        report(3, "interval oracle", oracle),
        report(4, "two-form band", two_form),
        report(5, "IKS explicit constant", iks),
        report(6, "frozen-constant interpolation", lm34),
        report(7, "norm-ratio gates", gates),
        report(8, "collapse identities", collapses),
        report(9, "determinism and runtime", || determinism(start)),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
