//! Grid functions stored under `fixtures/`.

use std::path::PathBuf;

use gausslocal::fixtures::FunctionSpec;
use gausslocal::operators::{fractional_maximal, local_maximal};
use gausslocal::{GaussianSpace, GridFunction};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

#[test]
fn wave_round_trips_exactly() {
    let f = GridFunction::read_csv(&fixture("wave_d1_n64.csv")).unwrap();
    let space = GaussianSpace::with_default_domain(1, 1.0, 64).unwrap();
    assert_eq!(f.space(), &space);
    let want = GridFunction::from_fn(space, |x| 1.0 + 0.5 * (3.0 * x[0]).sin()).unwrap();
    assert_eq!(f.values(), want.values());
}

#[test]
fn ridge_round_trips_exactly() {
    let f = GridFunction::read_csv(&fixture("ridge_d2_n16.csv")).unwrap();
    assert_eq!(f.space().dim(), 2);
    assert_eq!(f.values().len(), 256);
    let want = GridFunction::from_fn(*f.space(), |x| (-(x[0] - x[1]).powi(2)).exp()).unwrap();
    assert_eq!(f.values(), want.values());
}

// The single cell around x is in the family, so M f(x) is at least its value
// up to the rounding of (v·μ)/μ.
#[test]
fn maximal_dominates_cell_value_on_wave() {
    let f = GridFunction::read_csv(&fixture("wave_d1_n64.csv")).unwrap();
    let s = *f.space();
    for i in 8..56 {
        let x = [s.node_coord(i) + 0.01];
        let m = local_maximal(&f, &x, 1.0).unwrap();
        assert!(
            m >= f.values()[i] * (1.0 - 4.0 * f64::EPSILON),
            "x = {x:?}: {m} < {}",
            f.values()[i]
        );
        assert!(m <= 1.5 + 1e-12);
        assert!(fractional_maximal(&f, &x, 0.3, 1.0).unwrap() > 0.0);
    }
}

#[test]
fn file_spec_resamples_onto_a_finer_grid() {
    let spec = FunctionSpec::File {
        path: fixture("wave_d1_n64.csv"),
    };
    let fine = GaussianSpace::with_default_domain(1, 1.0, 128).unwrap();
    let g = spec.sample(&fine).unwrap();
    assert_eq!(g.values().len(), 128);
    assert!(g.values().iter().all(|v| (0.5..=1.5).contains(v)));
    let bad = FunctionSpec::File {
        path: fixture("ridge_d2_n16.csv"),
    };
    assert!(bad.sample(&fine).is_err());
}
