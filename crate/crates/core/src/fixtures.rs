//! Declarative fixture specs that sample onto any space.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_param, Error, Result};
use crate::grid::GridFunction;
use crate::measure::{norm_sq, GaussianSpace};
use crate::operators::{SphereKernel, DEFAULT_ANGULAR_NODES};
use crate::weights::Weight;

fn center_or_origin(center: &[f64], dim: usize) -> Result<Vec<f64>> {
    if center.is_empty() {
        return Ok(vec![0.0; dim]);
    }
    if center.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: center.len(),
        });
    }
    Ok(center.to_vec())
}

/// A nonnegative test function. Omitted centers mean the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Constant {
        value: f64,
    },
    /// Nodes strictly inside `B(center, radius)`.
    Indicator {
        #[serde(default)]
        center: Vec<f64>,
        radius: f64,
    },
    /// `height·exp(-|x - center|²/width²)`.
    Bump {
        #[serde(default)]
        center: Vec<f64>,
        width: f64,
        #[serde(default = "one")]
        height: f64,
    },
    /// Radial steps: `levels[i]` on `breaks[i-1] ≤ |x - center| < breaks[i]`
    /// (with `breaks[-1] = 0`), zero outside the last break.
    Plateaus {
        #[serde(default)]
        center: Vec<f64>,
        levels: Vec<f64>,
        breaks: Vec<f64>,
    },
    /// `(|x| + delta)^alpha` on `|x| < cutoff`, zero outside.
    Power {
        alpha: f64,
        #[serde(default = "default_delta")]
        delta: f64,
        cutoff: f64,
    },
    /// Grid function read from CSV and resampled onto the target space.
    File {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    0.01
}

impl FunctionSpec {
    pub fn sample(&self, space: &GaussianSpace) -> Result<GridFunction> {
        let d = space.dim();
        match self {
            FunctionSpec::Constant { value } => GridFunction::constant(*space, *value),
            FunctionSpec::Indicator { center, radius } => {
                GridFunction::indicator_ball(*space, &center_or_origin(center, d)?, *radius)
            }
            FunctionSpec::Bump {
                center,
                width,
                height,
            } => {
                ensure_param(*width > 0.0, "width", || {
                    format!("{width} must be positive")
                })?;
                let c = center_or_origin(center, d)?;
                GridFunction::from_fn(*space, |x| {
                    let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                    height * (-r2 / (width * width)).exp()
                })
            }
            FunctionSpec::Plateaus {
                center,
                levels,
                breaks,
            } => {
                ensure_param(
                    levels.len() == breaks.len() && !levels.is_empty(),
                    "plateaus",
                    || format!("{} levels for {} breaks", levels.len(), breaks.len()),
                )?;
                ensure_param(
                    breaks.windows(2).all(|w| w[0] < w[1]) && breaks[0] > 0.0,
                    "breaks",
                    || "breaks must be positive and increasing".into(),
                )?;
                let c = center_or_origin(center, d)?;
                GridFunction::from_fn(*space, |x| {
                    let r = x
                        .iter()
                        .zip(&c)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    breaks
                        .iter()
                        .position(|&b| r < b)
                        .map_or(0.0, |i| levels[i])
                })
            }
            FunctionSpec::Power {
                alpha,
                delta,
                cutoff,
            } => {
                ensure_param(*delta > 0.0, "delta", || {
                    format!("{delta} must be positive")
                })?;
                GridFunction::from_fn(*space, |x| {
                    let r = norm_sq(x).sqrt();
                    if r < *cutoff {
                        (r + delta).powf(*alpha)
                    } else {
                        0.0
                    }
                })
            }
            FunctionSpec::File { path } => {
                let g = GridFunction::read_csv(path)?;
                if g.space() == space {
                    Ok(g)
                } else {
                    g.resample(*space)
                }
            }
        }
    }

    /// Short human-readable name for reports.
    pub fn label(&self) -> String {
        match self {
            FunctionSpec::Constant { value } => format!("const({value})"),
            FunctionSpec::Indicator { center, radius } => format!("ind({center:?},{radius})"),
            FunctionSpec::Bump {
                center,
                width,
                height,
            } => format!("bump({center:?},{width},{height})"),
            FunctionSpec::Plateaus { levels, .. } => format!("plateaus({})", levels.len()),
            FunctionSpec::Power {
                alpha,
                delta,
                cutoff,
            } => format!("pow({alpha},{delta},{cutoff})"),
            FunctionSpec::File { path } => format!("file({})", path.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant {
        value: f64,
    },
    /// `(|x| + delta)^alpha`.
    Power {
        alpha: f64,
        #[serde(default = "default_delta")]
        delta: f64,
    },
    /// `e^{|x|²}`.
    GaussFlatten,
}

impl WeightSpec {
    pub fn build(&self, space: &GaussianSpace) -> Result<Weight> {
        match self {
            WeightSpec::Constant { value } => Weight::constant(*space, *value),
            WeightSpec::Power { alpha, delta } => Weight::power(*space, *alpha, *delta),
            WeightSpec::GaussFlatten => Weight::gaussian_flattening(*space),
        }
    }

    pub fn label(&self) -> String {
        match self {
            WeightSpec::Constant { value } => format!("const({value})"),
            WeightSpec::Power { alpha, delta } => format!("pow({alpha},{delta})"),
            WeightSpec::GaussFlatten => "gauss_flatten".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Constant {
        value: f64,
        s: f64,
    },
    /// One dimension only.
    TwoValued {
        plus: f64,
        minus: f64,
        s: f64,
    },
    /// `base + amplitude·cos(frequency·φ)`; two dimensions only.
    Cosine {
        base: f64,
        amplitude: f64,
        frequency: u32,
        s: f64,
    },
}

impl KernelSpec {
    pub fn build(&self, dim: usize) -> Result<SphereKernel> {
        match self {
            KernelSpec::Constant { value, s } => SphereKernel::constant(dim, *value, *s),
            KernelSpec::TwoValued { plus, minus, s } => {
                if dim != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: 1,
                    });
                }
                SphereKernel::two_valued(*plus, *minus, *s)
            }
            KernelSpec::Cosine {
                base,
                amplitude,
                frequency,
                s,
            } => {
                if dim != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: 2,
                    });
                }
                let k = *frequency as f64;
                SphereKernel::from_angle_fn(DEFAULT_ANGULAR_NODES, *s, |phi| {
                    base + amplitude * (k * phi).cos()
                })
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            KernelSpec::Constant { value, .. } => format!("const({value})"),
            KernelSpec::TwoValued { plus, minus, .. } => format!("two({plus},{minus})"),
            KernelSpec::Cosine {
                base,
                amplitude,
                frequency,
                ..
            } => format!("cos({base},{amplitude},{frequency})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_sample() {
        let s = GaussianSpace::with_default_domain(1, 1.0, 64).unwrap();
        let ind = FunctionSpec::Indicator {
            center: vec![],
            radius: 0.2,
        }
        .sample(&s)
        .unwrap();
        assert_eq!(ind, GridFunction::indicator_ball(s, &[0.0], 0.2).unwrap());
        let pl = FunctionSpec::Plateaus {
            center: vec![],
            levels: vec![2.0, 1.0],
            breaks: vec![0.5, 1.0],
        }
        .sample(&s)
        .unwrap();
        assert_eq!(pl.value_at(&[0.1]), 2.0);
        assert_eq!(pl.value_at(&[-0.7]), 1.0);
        assert_eq!(pl.value_at(&[1.5]), 0.0);
        let bad = FunctionSpec::Bump {
            center: vec![0.0, 0.0],
            width: 1.0,
            height: 1.0,
        };
        assert!(matches!(
            bad.sample(&s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn specs_deserialize_strictly() {
        let f: FunctionSpec = toml::from_str("kind = \"bump\"\nwidth = 0.5\n").unwrap();
        assert_eq!(
            f,
            FunctionSpec::Bump {
                center: vec![],
                width: 0.5,
                height: 1.0
            }
        );
        assert!(
            toml::from_str::<FunctionSpec>("kind = \"bump\"\nwidth = 0.5\nwdith = 1\n").is_err()
        );
        let w: WeightSpec = toml::from_str("kind = \"power\"\nalpha = 0.5\n").unwrap();
        assert_eq!(
            w,
            WeightSpec::Power {
                alpha: 0.5,
                delta: 0.01
            }
        );
        let k: KernelSpec =
            toml::from_str("kind = \"two_valued\"\nplus = 2.0\nminus = 0.0\ns = 2.0\n").unwrap();
        assert!(k.build(1).is_ok() && k.build(2).is_err());
    }
}
