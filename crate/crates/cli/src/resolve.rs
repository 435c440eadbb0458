//! Name lookup from config fixtures to sampled objects on a given space.

use anyhow::{anyhow, Context};
use gausslocal::{GaussianSpace, GridFunction, SphereKernel, Weight};

use crate::config::RunConfig;

pub struct Fixtures<'a> {
    cfg: &'a RunConfig,
    space: GaussianSpace,
}

impl<'a> Fixtures<'a> {
    pub fn new(cfg: &'a RunConfig, space: GaussianSpace) -> Self {
        Fixtures { cfg, space }
    }

    pub fn space(&self) -> &GaussianSpace {
        &self.space
    }

    /// Same fixtures sampled on a grid of size `n`.
    pub fn refined(&self, n: usize) -> anyhow::Result<Fixtures<'a>> {
        Ok(Fixtures {
            cfg: self.cfg,
            space: self.space.with_n(n)?,
        })
    }

    pub fn function(&self, name: &str) -> anyhow::Result<GridFunction> {
        let spec = self
            .cfg
            .functions
            .get(name)
            .ok_or_else(|| anyhow!("unknown function `{name}`"))?;
        spec.sample(&self.space)
            .with_context(|| format!("functions.{name}"))
    }

    pub fn functions(&self, names: &[String]) -> anyhow::Result<Vec<GridFunction>> {
        names.iter().map(|n| self.function(n)).collect()
    }

    pub fn weight(&self, name: &str) -> anyhow::Result<Weight> {
        let spec = self
            .cfg
            .weights
            .get(name)
            .ok_or_else(|| anyhow!("unknown weight `{name}`"))?;
        Ok(spec
            .build(&self.space)
            .with_context(|| format!("weights.{name}"))?
            .with_label(name))
    }

    pub fn weights(&self, names: &[String]) -> anyhow::Result<Vec<Weight>> {
        names.iter().map(|n| self.weight(n)).collect()
    }

    pub fn kernel(&self, name: &str) -> anyhow::Result<SphereKernel> {
        let spec = self
            .cfg
            .kernels
            .get(name)
            .ok_or_else(|| anyhow!("unknown kernel `{name}`"))?;
        spec.build(self.space.dim())
            .with_context(|| format!("kernels.{name}"))
    }
}
