//! Simulation and spectral quadrature for linear and multiplicative SPDEs
//! driven by time-independent Lévy colored noise.
//!
//! The crate is organized bottom-up: [`quad`], [`rng`] and [`stats`] are the
//! numerical substrate; [`measure`], [`kernels`] and [`operators`] describe the
//! noise and the equation; [`prm`], [`linear`] and [`chaos`] compute the
//! quantities that are checked against exact values and bounds.

pub mod chaos;
pub mod error;
pub mod fourier;
pub mod functions;
pub mod kernels;
pub mod linear;
pub mod measure;
pub mod operators;
pub mod prm;
pub mod quad;
pub mod rng;
pub mod stats;

pub use chaos::{ChaosTermEstimate, JnBound, SeriesCertificate};
pub use error::{Error, Result};
pub use functions::{GaussianBump, GridFunction, Indicator, OscillatingBump, SmoothBump, SpatialFunction};
pub use kernels::{ColorationKernel, KernelFamily, SpectralMeasure};
pub use linear::{FieldEstimate, MomentEnvelope, WeightTable};
pub use measure::{JumpDensity, LevyMeasure};
pub use operators::{GreenOperator, NormValue, OperatorFamily, PRange};
pub use prm::{PrmSample, SpatialBox};
pub use rng::{RandomStream, TrialRunner};
