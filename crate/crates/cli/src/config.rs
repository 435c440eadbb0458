//! Run configuration: one TOML file, unknown keys rejected, then flag overrides.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context};
use gausslocal::fixtures::{FunctionSpec, KernelSpec, WeightSpec};
use gausslocal::measure::DEFAULT_HALF_WIDTH;
use gausslocal::GaussianSpace;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// The battery run when no `--config` is given.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub space: SpaceConfig,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionSpec>,
    #[serde(default)]
    pub weights: BTreeMap<String, WeightSpec>,
    #[serde(default)]
    pub kernels: BTreeMap<String, KernelSpec>,
    #[serde(default)]
    pub measure: MeasureConfig,
    #[serde(default)]
    pub weight_checks: WeightChecks,
    #[serde(default)]
    pub op: Vec<OpRequest>,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub dim: usize,
    pub a: f64,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    pub n: usize,
}

fn default_half_width() -> f64 {
    DEFAULT_HALF_WIDTH
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig {
            dim: 1,
            a: 1.0,
            half_width: DEFAULT_HALF_WIDTH,
            n: 64,
        }
    }
}

impl SpaceConfig {
    pub fn build(&self) -> anyhow::Result<GaussianSpace> {
        Ok(GaussianSpace::new(
            self.dim,
            self.a,
            self.half_width,
            self.n,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureConfig {
    /// Family scales `k`; balls live in the family at parameter `k·a`.
    pub scales: Vec<f64>,
    pub balls: usize,
    pub points_per_ball: usize,
    /// Balls whose radial profile is compared with direct measures.
    pub profile_balls: usize,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            scales: vec![1.0, 2.0, 5.0],
            balls: 200,
            points_per_ball: 5,
            profile_balls: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightChecks {
    #[serde(default = "default_weight_balls")]
    pub balls: usize,
    #[serde(default)]
    pub apa: Vec<ApaRequest>,
    #[serde(default)]
    pub apqa: Vec<ApqaRequest>,
    #[serde(default)]
    pub multi: Vec<MultiRequest>,
    #[serde(default)]
    pub five_condition: Vec<String>,
    #[serde(default)]
    pub reverse_holder: Vec<ReverseHolderRequest>,
    #[serde(default)]
    pub epsilon: Vec<EpsilonRequest>,
}

fn default_weight_balls() -> usize {
    400
}

impl Default for WeightChecks {
    fn default() -> Self {
        WeightChecks {
            balls: default_weight_balls(),
            apa: Vec::new(),
            apqa: Vec::new(),
            multi: Vec::new(),
            five_condition: Vec::new(),
            reverse_holder: Vec::new(),
            epsilon: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApaRequest {
    pub weight: String,
    pub p: f64,
    /// Also compare with every grid-aligned interval (one dimension only).
    #[serde(default)]
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApqaRequest {
    pub weight: String,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiRequest {
    pub weights: Vec<String>,
    pub exponents: Vec<f64>,
    /// Finiteness cap for the cross-check flags.
    #[serde(default = "default_cap")]
    pub cap: f64,
}

fn default_cap() -> f64 {
    1e3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReverseHolderRequest {
    pub weight: String,
    pub p: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonRequest {
    pub weight: String,
    pub beta: f64,
    pub p: f64,
    #[serde(default = "one")]
    pub s_prime: f64,
    #[serde(default = "default_eps_cap")]
    pub cap_factor: f64,
}

fn one() -> f64 {
    1.0
}

fn default_eps_cap() -> f64 {
    gausslocal::weights::DEFAULT_EPSILON_CAP_FACTOR
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    LocalMaximal,
    FractionalMaximal,
    MeasureMaximal,
    MultilinearMaximal,
    RoughFractionalMaximal,
    OrderSMaximal,
    FractionalIntegralRadial,
    FractionalIntegralGaussian,
    MultilinearFractionalIntegral,
    RoughFractionalIntegral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpRequest {
    pub operator: Operator,
    pub functions: Vec<String>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default = "one")]
    pub k: f64,
    #[serde(default)]
    pub kernel: Option<String>,
    #[serde(default)]
    pub weight: Option<String>,
    #[serde(default)]
    pub thetas: Option<Vec<f64>>,
    #[serde(default)]
    pub s_prime: Option<f64>,
    /// Explicit sites; when empty, `site_count` seeded sites are drawn.
    #[serde(default)]
    pub sites: Vec<Vec<f64>>,
    #[serde(default = "default_op_sites")]
    pub site_count: usize,
}

fn default_op_sites() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Sites per pointwise check.
    pub sites: usize,
    /// Sites keep this distance from the domain boundary.
    pub site_margin: f64,
    /// Grid sizes of the refinement gates.
    pub ns: Vec<usize>,
    pub iks: Vec<IksRequest>,
    pub lm34: Vec<Lm34Request>,
    pub thm33: Vec<Thm33Request>,
    pub testing: Vec<TestingRequest>,
    pub rough_domination: Vec<RoughDominationRequest>,
    pub two_form: Vec<TwoFormRequest>,
    pub experiment: Vec<ExperimentRequest>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            sites: 100,
            site_margin: 0.6,
            ns: vec![64, 128, 256],
            iks: Vec::new(),
            lm34: Vec::new(),
            thm33: Vec::new(),
            testing: Vec::new(),
            rough_domination: Vec::new(),
            two_form: Vec::new(),
            experiment: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IksRequest {
    pub functions: Vec<String>,
    pub thetas: Vec<f64>,
    pub beta: f64,
    pub p: Vec<f64>,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lm34Request {
    pub calibration: Vec<String>,
    pub held_out: Vec<String>,
    pub kernel: String,
    pub beta: f64,
    pub beta1: f64,
    pub beta2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thm33Request {
    pub functions: Vec<String>,
    pub weights: Vec<String>,
    pub exponents: Vec<f64>,
    pub nu: String,
    #[serde(default = "default_cap")]
    pub cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestingRequest {
    pub functions: Vec<String>,
    pub weights: Vec<String>,
    pub exponents: Vec<f64>,
    pub nu: String,
    #[serde(default = "default_weight_balls")]
    pub balls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoughDominationRequest {
    pub function: String,
    pub kernel: String,
    pub beta: f64,
    #[serde(default = "one")]
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoFormRequest {
    pub functions: Vec<String>,
    pub betas: Vec<f64>,
    #[serde(default = "one")]
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Thm33Weak,
    Thm37Strong,
    Iks,
    Dl1,
}

/// One norm-ratio experiment, rerun on every grid in `verify.ns`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentRequest {
    pub theorem: Theorem,
    pub functions: Vec<String>,
    #[serde(default)]
    pub weights: Vec<String>,
    #[serde(default)]
    pub exponents: Vec<f64>,
    #[serde(default)]
    pub nu: Option<String>,
    #[serde(default)]
    pub thetas: Vec<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub kernel: Option<String>,
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// Out-of-class batteries are evidence only.
    #[serde(default = "yes")]
    pub in_class: bool,
}

fn default_levels() -> usize {
    gausslocal::grid::DEFAULT_LEVELS
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<std::path::PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn default_battery() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("bundled default config is valid")
    }

    /// Checks everything that can be checked without running: the space,
    /// fixture references, and that every fixture samples onto the space.
    pub fn validate(&self) -> anyhow::Result<()> {
        let space = self.space.build().context("[space]")?;
        for (name, f) in &self.functions {
            f.sample(&space)
                .with_context(|| format!("functions.{name}"))?;
        }
        for (name, w) in &self.weights {
            w.build(&space).with_context(|| format!("weights.{name}"))?;
        }
        for (name, k) in &self.kernels {
            k.build(space.dim())
                .with_context(|| format!("kernels.{name}"))?;
        }
        if self
            .measure
            .scales
            .iter()
            .any(|k| !(*k >= 1.0 && k.is_finite()))
        {
            bail!("measure.scales: every scale must be a finite number ≥ 1");
        }
        for (what, count) in [
            ("measure.balls", self.measure.balls),
            ("measure.points_per_ball", self.measure.points_per_ball),
            ("weight_checks.balls", self.weight_checks.balls),
            ("verify.sites", self.verify.sites),
        ] {
            if count == 0 {
                bail!("{what}: must be at least 1");
            }
        }
        if self.verify.ns.iter().any(|&n| n < 8 || n % 2 != 0) {
            bail!("verify.ns: grid sizes must be even and at least 8");
        }
        let wc = &self.weight_checks;
        let mut weight_refs: Vec<(&str, &str)> = Vec::new();
        let mut fn_refs: Vec<(&str, &str)> = Vec::new();
        let mut kernel_refs: Vec<(&str, &str)> = Vec::new();
        weight_refs.extend(
            wc.apa
                .iter()
                .map(|r| ("weight_checks.apa", r.weight.as_str())),
        );
        weight_refs.extend(
            wc.apqa
                .iter()
                .map(|r| ("weight_checks.apqa", r.weight.as_str())),
        );
        for r in &wc.multi {
            weight_refs.extend(
                r.weights
                    .iter()
                    .map(|w| ("weight_checks.multi", w.as_str())),
            );
        }
        weight_refs.extend(
            wc.five_condition
                .iter()
                .map(|w| ("weight_checks.five_condition", w.as_str())),
        );
        weight_refs.extend(
            wc.reverse_holder
                .iter()
                .map(|r| ("weight_checks.reverse_holder", r.weight.as_str())),
        );
        weight_refs.extend(
            wc.epsilon
                .iter()
                .map(|r| ("weight_checks.epsilon", r.weight.as_str())),
        );
        for r in &self.op {
            fn_refs.extend(r.functions.iter().map(|f| ("op", f.as_str())));
            weight_refs.extend(r.weight.iter().map(|w| ("op", w.as_str())));
            kernel_refs.extend(r.kernel.iter().map(|k| ("op", k.as_str())));
            for x in &r.sites {
                if x.len() != space.dim() {
                    bail!("op: site {x:?} does not have dimension {}", space.dim());
                }
            }
        }
        let v = &self.verify;
        for r in &v.iks {
            fn_refs.extend(r.functions.iter().map(|f| ("verify.iks", f.as_str())));
        }
        for r in &v.lm34 {
            fn_refs.extend(
                r.calibration
                    .iter()
                    .chain(&r.held_out)
                    .map(|f| ("verify.lm34", f.as_str())),
            );
            kernel_refs.push(("verify.lm34", &r.kernel));
        }
        for r in &v.thm33 {
            fn_refs.extend(r.functions.iter().map(|f| ("verify.thm33", f.as_str())));
            weight_refs.extend(
                r.weights
                    .iter()
                    .chain([&r.nu])
                    .map(|w| ("verify.thm33", w.as_str())),
            );
        }
        for r in &v.testing {
            fn_refs.extend(r.functions.iter().map(|f| ("verify.testing", f.as_str())));
            weight_refs.extend(
                r.weights
                    .iter()
                    .chain([&r.nu])
                    .map(|w| ("verify.testing", w.as_str())),
            );
        }
        for r in &v.rough_domination {
            fn_refs.push(("verify.rough_domination", &r.function));
            kernel_refs.push(("verify.rough_domination", &r.kernel));
        }
        for r in &v.two_form {
            fn_refs.extend(r.functions.iter().map(|f| ("verify.two_form", f.as_str())));
        }
        for r in &v.experiment {
            fn_refs.extend(
                r.functions
                    .iter()
                    .map(|f| ("verify.experiment", f.as_str())),
            );
            weight_refs.extend(
                r.weights
                    .iter()
                    .chain(&r.nu)
                    .map(|w| ("verify.experiment", w.as_str())),
            );
            kernel_refs.extend(r.kernel.iter().map(|k| ("verify.experiment", k.as_str())));
        }
        for (at, name) in fn_refs {
            if !self.functions.contains_key(name) {
                bail!("{at}: unknown function `{name}`");
            }
        }
        for (at, name) in weight_refs {
            if !self.weights.contains_key(name) {
                bail!("{at}: unknown weight `{name}`");
            }
        }
        for (at, name) in kernel_refs {
            if !self.kernels.contains_key(name) {
                bail!("{at}: unknown kernel `{name}`");
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex encoded. Output settings are
    /// left out: they do not change any number in a report.
    pub fn hash(&self) -> String {
        let mut tree = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = tree.as_object_mut() {
            map.remove("output");
        }
        let canonical = serde_json::to_vec(&tree).expect("config serializes");
        Sha256::digest(&canonical)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
