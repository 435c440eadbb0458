pub mod error;
pub mod fixtures;
pub mod grid;
pub mod measure;
pub mod operators;
pub mod quadrature;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use grid::{GridFunction, LambdaGrid, Region};
pub use measure::{admissibility_m, AdmissibleBall, GaussianSpace, RadialMeasureProfile};
pub use operators::{ShiftVector, SphereKernel};
pub use verify::{InequalityReport, NormExperiment, RefinementGate};
pub use weights::{FractionalParams, Weight, WeightVector};
