//! `weights`: sampled local Muckenhoupt constants and class conditions.

use gausslocal::weights::{
    apa_constant, apqa_constant, ball_sampler, epsilon_finder, five_condition_ratio,
    grid_aligned_intervals, multi_apa_constant, reverse_holder_check, theorem36_crosscheck,
    BallSampler,
};
use gausslocal::{Error, FractionalParams, WeightVector};
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{Record, Status};
use crate::resolve::Fixtures;

/// Sampled and exhaustive constants may differ by this relative amount.
pub const EXHAUSTIVE_AGREEMENT: f64 = 0.05;

pub fn run(cfg: &RunConfig) -> anyhow::Result<Vec<Record>> {
    let fx = Fixtures::new(cfg, cfg.space.build()?);
    let space = *fx.space();
    let wc = &cfg.weight_checks;
    let balls = ball_sampler(&space, 1.0, wc.balls, cfg.seed)?;
    let sample = json!({ "balls": balls.len(), "seed": cfg.seed, "k": 1.0 });
    let mut out = Vec::new();
    for r in &wc.apa {
        let w = fx.weight(&r.weight)?;
        let c = apa_constant(&w, r.p, &balls)?;
        let name = format!("{} p={}", r.weight, r.p);
        out.push(
            Record::new("apa", &name, Status::Info)
                .value(c)
                .detail(&sample),
        );
        if r.exhaustive {
            let all = grid_aligned_intervals(&space, 1.0)?;
            let e = apa_constant(&w, r.p, &all)?;
            let rel = (c / e - 1.0).abs();
            out.push(
                Record::judged("apa_exhaustive", &name, rel, rel <= EXHAUSTIVE_AGREEMENT)
                    .bound(EXHAUSTIVE_AGREEMENT)
                    .detail(json!({ "sampled": c, "exhaustive": e, "intervals": all.len() })),
            );
        }
    }
    for r in &wc.apqa {
        let c = apqa_constant(&fx.weight(&r.weight)?, r.p, r.q, &balls)?;
        out.push(
            Record::new(
                "apqa",
                format!("{} p={} q={}", r.weight, r.p, r.q),
                Status::Info,
            )
            .value(c)
            .detail(&sample),
        );
    }
    for r in &wc.multi {
        let wv = WeightVector::new(fx.weights(&r.weights)?, r.exponents.clone())?;
        let name = format!("{:?} p={:?}", r.weights, r.exponents);
        let c = multi_apa_constant(&wv, &balls)?;
        out.push(
            Record::new("multi_apa", &name, Status::Info)
                .value(c)
                .detail(&sample),
        );
        let x = theorem36_crosscheck(&wv, &balls, r.cap)?;
        out.push(
            Record::new("theorem36_crosscheck", &name, Status::Evidence)
                .value(x.multilinear.value)
                .bound(r.cap)
                .detail(json!({ "consistent": x.consistent(), "report": x })),
        );
    }
    if !wc.five_condition.is_empty() {
        // 5B has to fit the domain too
        let small = BallSampler::new(1.0, wc.balls, cfg.seed)
            .with_containment(5.0)
            .sample(&space)?;
        let meta = json!({ "balls": small.len(), "seed": cfg.seed, "k": 1.0, "containment": 5.0 });
        for name in &wc.five_condition {
            let c = five_condition_ratio(&fx.weight(name)?, &small)?;
            out.push(
                Record::new("five_condition", name, Status::Info)
                    .value(c)
                    .detail(&meta),
            );
        }
    }
    for r in &wc.reverse_holder {
        let c = reverse_holder_check(&fx.weight(&r.weight)?, r.p, r.r, &balls)?;
        out.push(
            Record::new(
                "reverse_holder",
                format!("{} p={} r={}", r.weight, r.p, r.r),
                Status::Info,
            )
            .value(c)
            .detail(&sample),
        );
    }
    for r in &wc.epsilon {
        let params = FractionalParams::new(r.beta, r.p)?.with_s_prime(r.s_prime)?;
        let name = format!("{} beta={} p={} s'={}", r.weight, r.beta, r.p, r.s_prime);
        match epsilon_finder(params, &fx.weight(&r.weight)?, &balls, r.cap_factor) {
            Ok(found) => {
                let eps = found.epsilon().expect("finder sets epsilon");
                out.push(
                    Record::new("epsilon", name, Status::Info)
                        .value(eps)
                        .detail(found),
                );
            }
            Err(e @ Error::NoEpsilonFound { .. }) => {
                out.push(
                    Record::new("epsilon", name, Status::Skipped)
                        .detail(json!({ "reason": e.to_string() })),
                );
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}
