//! One-dimensional quadrature rules shared by the measure and operator code.
//!
//! The adaptive rule is a 7/15-point Gauss-Kronrod pair with global bisection.

// published node tables are kept at full printed precision
#![allow(clippy::excessive_precision)]

use std::sync::OnceLock;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-300,
            rel: 1e-12,
            max_panels: 4000,
        }
    }
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance {
            rel,
            ..Tolerance::default()
        }
    }
}

/// Single Gauss-Kronrod panel: returns (kronrod estimate, |kronrod - gauss|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// Adaptive Gauss-Kronrod integral of `f` over `[a, b]`.
///
/// Globally adaptive: the panel with the largest error estimate is bisected
/// until the summed estimate meets the tolerance. Ties and ordering are fixed,
/// so the result is bit-stable.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> f64 {
    if a == b {
        return 0.0;
    }
    let (value, err) = gk15(&f, a, b);
    let mut panels = vec![Panel { a, b, value, err }];
    let mut total = value;
    let mut total_err = err;
    while panels.len() < tol.max_panels {
        let target = tol.abs.max(tol.rel * total.abs());
        if total_err <= target || total_err <= 50.0 * f64::EPSILON * total.abs() {
            break;
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold(
                (0, -1.0),
                |(bi, be), (i, p)| if p.err > be { (i, p.err) } else { (bi, be) },
            );
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            break;
        }
        let (lv, le) = gk15(&f, p.a, mid);
        let (rv, re) = gk15(&f, mid, p.b);
        total += lv + rv - p.value;
        total_err += le + re - p.err;
        panels[worst] = Panel {
            a: p.a,
            b: mid,
            value: lv,
            err: le,
        };
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: rv,
            err: re,
        });
    }
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels.iter().map(|p| p.value).sum()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Cached 6-point rule used for far-field cells.
pub(crate) fn gl6() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(6))
}

/// Cached 16-point rule for short smooth integrals.
pub(crate) fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}
