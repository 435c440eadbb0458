//! `op`: operator values at chosen or seeded sites.

use anyhow::{anyhow, bail};
use gausslocal::operators::{
    fractional_integral_gaussian, fractional_integral_radial, fractional_maximal, local_maximal,
    measure_maximal, multilinear_fractional_integral, multilinear_maximal, order_s_maximal,
    rough_fractional_integral, rough_fractional_maximal,
};
use gausslocal::verify::sample_sites;
use gausslocal::ShiftVector;
use rayon::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::{OpRequest, Operator, RunConfig};
use crate::report::{Record, Status};
use crate::resolve::Fixtures;

fn params_hash(req: &OpRequest) -> String {
    let bytes = serde_json::to_vec(req).expect("request serializes");
    Sha256::digest(&bytes)[..8]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn op_name(op: Operator) -> String {
    serde_json::to_value(op)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

/// Values of one request at its sites, in site order.
pub fn evaluate(fx: &Fixtures, req: &OpRequest, sites: &[Vec<f64>]) -> anyhow::Result<Vec<f64>> {
    let fs = fx.functions(&req.functions)?;
    let f = fs
        .first()
        .ok_or_else(|| anyhow!("op: no functions given"))?;
    let single = || -> anyhow::Result<()> {
        if fs.len() != 1 {
            bail!("{} takes exactly one function", op_name(req.operator));
        }
        Ok(())
    };
    let beta = || {
        req.beta
            .ok_or_else(|| anyhow!("{} needs `beta`", op_name(req.operator)))
    };
    let kernel = || -> anyhow::Result<_> {
        let name = req
            .kernel
            .as_deref()
            .ok_or_else(|| anyhow!("{} needs `kernel`", op_name(req.operator)))?;
        fx.kernel(name)
    };
    use Operator::*;
    let eval: Box<dyn Fn(&[f64]) -> gausslocal::Result<f64> + Sync> = match req.operator {
        LocalMaximal => {
            single()?;
            Box::new(|x| local_maximal(f, x, req.k))
        }
        FractionalMaximal => {
            single()?;
            let b = beta()?;
            Box::new(move |x| fractional_maximal(f, x, b, req.k))
        }
        MeasureMaximal => {
            single()?;
            let name = req
                .weight
                .as_deref()
                .ok_or_else(|| anyhow!("measure_maximal needs `weight`"))?;
            let nu = fx.weight(name)?;
            Box::new(move |x| measure_maximal(f, &nu, x, req.k))
        }
        MultilinearMaximal => Box::new(|x| multilinear_maximal(&fs, x, req.k)),
        RoughFractionalMaximal => {
            single()?;
            let (b, kern) = (beta()?, kernel()?);
            Box::new(move |x| rough_fractional_maximal(f, &kern, x, b, req.k))
        }
        OrderSMaximal => {
            single()?;
            let b = beta()?;
            let sp = req
                .s_prime
                .ok_or_else(|| anyhow!("order_s_maximal needs `s_prime`"))?;
            Box::new(move |x| order_s_maximal(f, x, b, sp, req.k))
        }
        FractionalIntegralRadial => {
            single()?;
            let b = beta()?;
            Box::new(move |x| fractional_integral_radial(f, x, b, req.k))
        }
        FractionalIntegralGaussian => {
            single()?;
            let b = beta()?;
            Box::new(move |x| fractional_integral_gaussian(f, x, b, req.k))
        }
        MultilinearFractionalIntegral => {
            let b = beta()?;
            let th = ShiftVector::new(req.thetas.clone().unwrap_or_else(|| vec![1.0; fs.len()]))?;
            if req.k != 1.0 {
                bail!("multilinear_fractional_integral works at k = 1 only");
            }
            Box::new(move |x| multilinear_fractional_integral(&fs, &th, x, b))
        }
        RoughFractionalIntegral => {
            single()?;
            let (b, kern) = (beta()?, kernel()?);
            Box::new(move |x| rough_fractional_integral(f, &kern, x, b, req.k))
        }
    };
    Ok(sites
        .par_iter()
        .map(|x| eval(x))
        .collect::<gausslocal::Result<Vec<_>>>()?)
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<Vec<Record>> {
    let fx = Fixtures::new(cfg, cfg.space.build()?);
    let mut out = Vec::new();
    for (i, req) in cfg.op.iter().enumerate() {
        let sites = if req.sites.is_empty() {
            sample_sites(
                fx.space(),
                req.site_count,
                cfg.seed.wrapping_add(i as u64),
                cfg.verify.site_margin,
            )?
        } else {
            req.sites.clone()
        };
        let values = evaluate(&fx, req, &sites)?;
        let hash = params_hash(req);
        let op = op_name(req.operator);
        for (x, v) in sites.iter().zip(values) {
            out.push(
                Record::new(
                    "operator_value",
                    format!("{op}({})@{x:?}", req.functions.join(",")),
                    Status::Info,
                )
                .value(v)
                .n(fx.space().n())
                .detail(json!({ "operator": op, "x": x, "params_hash": hash, "request": req })),
            );
        }
    }
    Ok(out)
}
