use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{ensure_param, Error, Result};

pub const DEFAULT_ANGULAR_NODES: usize = 720;

#[derive(Debug, Clone, PartialEq, Serialize)]
enum Values {
    /// `Ω(+1)`, `Ω(-1)`.
    Line { plus: f64, minus: f64 },
    /// `Ω(φ_i)` at `φ_i = 2πi/N`.
    Circle(Vec<f64>),
}

/// Degree-zero kernel `Ω` on the unit sphere with its integrability exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereKernel {
    values: Values,
    s: f64,
}

impl SphereKernel {
    pub fn two_valued(plus: f64, minus: f64, s: f64) -> Result<Self> {
        ensure_param(plus.is_finite() && minus.is_finite(), "kernel", || {
            "values must be finite".into()
        })?;
        Self::checked(Values::Line { plus, minus }, s)
    }

    pub fn from_angle_fn(nodes: usize, s: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        ensure_param(nodes >= 8, "nodes", || {
            format!("{nodes} angular nodes, need at least 8")
        })?;
        let table: Vec<f64> = (0..nodes)
            .map(|i| f(2.0 * PI * i as f64 / nodes as f64))
            .collect();
        ensure_param(table.iter().all(|v| v.is_finite()), "kernel", || {
            "values must be finite".into()
        })?;
        Self::checked(Values::Circle(table), s)
    }

    pub fn constant(dim: usize, c: f64, s: f64) -> Result<Self> {
        match dim {
            1 => Self::two_valued(c, c, s),
            2 => Self::from_angle_fn(DEFAULT_ANGULAR_NODES, s, |_| c),
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    fn checked(values: Values, s: f64) -> Result<Self> {
        ensure_param(s >= 1.0, "s", || format!("{s} must be at least 1"))?;
        Ok(SphereKernel { values, s })
    }

    pub fn dim(&self) -> usize {
        match self.values {
            Values::Line { .. } => 1,
            Values::Circle(_) => 2,
        }
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `Ω(v/|v|)` for a nonzero direction `v`; nearest angular node in two dimensions.
    pub fn value(&self, v: &[f64]) -> f64 {
        match &self.values {
            Values::Line { plus, minus } => {
                if v[0] > 0.0 {
                    *plus
                } else {
                    *minus
                }
            }
            Values::Circle(_) => self.value_at_angle(v[1].atan2(v[0])),
        }
    }

    pub(crate) fn value_at_angle(&self, phi: f64) -> f64 {
        match &self.values {
            Values::Line { plus, minus } => {
                if phi.cos() > 0.0 {
                    *plus
                } else {
                    *minus
                }
            }
            Values::Circle(t) => {
                let n = t.len();
                let pos = (phi / (2.0 * PI) * n as f64).round().rem_euclid(n as f64);
                t[(pos as usize) % n]
            }
        }
    }

    /// The common value when `Ω` is constant.
    pub fn uniform_value(&self) -> Option<f64> {
        match &self.values {
            Values::Line { plus, minus } => (plus == minus).then_some(*plus),
            Values::Circle(t) => t.iter().all(|v| *v == t[0]).then_some(t[0]),
        }
    }

    pub fn abs(&self) -> SphereKernel {
        let values = match &self.values {
            Values::Line { plus, minus } => Values::Line {
                plus: plus.abs(),
                minus: minus.abs(),
            },
            Values::Circle(t) => Values::Circle(t.iter().map(|v| v.abs()).collect()),
        };
        SphereKernel { values, s: self.s }
    }

    pub(crate) fn plus_minus(&self) -> Option<(f64, f64)> {
        match self.values {
            Values::Line { plus, minus } => Some((plus, minus)),
            Values::Circle(_) => None,
        }
    }

    pub(crate) fn angular_nodes(&self) -> Option<usize> {
        match &self.values {
            Values::Line { .. } => None,
            Values::Circle(t) => Some(t.len()),
        }
    }

    /// Mean of `|Ω|` over the circle.
    pub(crate) fn mean_abs(&self) -> f64 {
        match &self.values {
            Values::Line { plus, minus } => 0.5 * (plus.abs() + minus.abs()),
            Values::Circle(t) => t.iter().map(|v| v.abs()).sum::<f64>() / t.len() as f64,
        }
    }
}

/// `‖Ω‖_{L^s}`: counting measure on the two points of the 0-sphere, periodic
/// trapezoid rule on the circle.
pub fn sphere_norm(kernel: &SphereKernel) -> f64 {
    let s = kernel.s;
    match &kernel.values {
        Values::Line { plus, minus } => (plus.abs().powf(s) + minus.abs().powf(s)).powf(1.0 / s),
        Values::Circle(t) => {
            let h = 2.0 * PI / t.len() as f64;
            (t.iter().map(|v| v.abs().powf(s)).sum::<f64>() * h).powf(1.0 / s)
        }
    }
}

/// Nonzero, pairwise distinct dilation factors `θ_1, …, θ_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftVector(Vec<f64>);

impl ShiftVector {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        ensure_param(!thetas.is_empty(), "theta", || {
            "need at least one shift".into()
        })?;
        ensure_param(
            thetas.iter().all(|t| t.is_finite() && *t != 0.0),
            "theta",
            || format!("{thetas:?}: every theta_j must be finite and nonzero"),
        )?;
        for (i, a) in thetas.iter().enumerate() {
            ensure_param(thetas[i + 1..].iter().all(|b| b != a), "theta", || {
                format!("{thetas:?}: shifts must be distinct")
            })?;
        }
        Ok(ShiftVector(thetas))
    }

    pub fn thetas(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        let one = SphereKernel::two_valued(1.0, 1.0, 2.0).unwrap();
        assert!((sphere_norm(&one) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(
            sphere_norm(&SphereKernel::two_valued(0.0, 0.0, 3.0).unwrap()),
            0.0
        );
        assert_eq!(
            sphere_norm(&SphereKernel::constant(2, 0.0, 2.0).unwrap()),
            0.0
        );
        let cos2 =
            SphereKernel::from_angle_fn(DEFAULT_ANGULAR_NODES, 2.0, |p| p.cos().powi(2)).unwrap();
        assert!((sphere_norm(&cos2) - (0.75 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lookup() {
        let k = SphereKernel::two_valued(2.0, -1.0, 1.5).unwrap();
        assert_eq!(k.value(&[0.3]), 2.0);
        assert_eq!(k.value(&[-0.3]), -1.0);
        assert_eq!(k.uniform_value(), None);
        let c = SphereKernel::from_angle_fn(8, 2.0, |p| p).unwrap();
        assert_eq!(c.value(&[1.0, 0.0]), 0.0);
        assert_eq!(c.value(&[0.0, 1.0]), c.value_at_angle(0.5 * PI));
        assert_eq!(c.value(&[1.0, -1e-9]), 0.0);
        assert_eq!(c.value(&[1.0, -0.9]), 7.0 * PI / 4.0);
        assert_eq!(
            SphereKernel::constant(2, 3.0, 2.0).unwrap().uniform_value(),
            Some(3.0)
        );
    }

    #[test]
    fn shift_vector_validation() {
        assert!(ShiftVector::new(vec![1.0, 2.0]).is_ok());
        assert!(ShiftVector::new(vec![1.0, 0.0]).is_err());
        assert!(ShiftVector::new(vec![2.0, 2.0]).is_err());
        assert!(ShiftVector::new(vec![]).is_err());
    }
}
