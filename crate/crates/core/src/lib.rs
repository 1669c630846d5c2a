//! Certified boundary uniqueness, sampling design, and noisy identification
//! for bounded analytic functions on the unit disk.

pub mod disk;
pub mod error;
pub mod identify;
pub mod measure;
pub mod models;
pub mod noise;
pub mod numerics;
pub mod sampling;
pub mod serialize;

pub use disk::{Arc, BoundaryPoint, DiskPoint, ZeroSequence};
pub use error::{Error, Result};
pub use identify::{ExperimentReport, FitConfig, FitResult, ObservationSeries};
pub use measure::{BoundarySet, CertificateReport, ContentMode, GaugeFunction, KernelMode};
pub use models::{AnalyticModel, BoundaryFunction, QuadratureSpec};
pub use noise::{KakutaniClassification, KakutaniConfig, KakutaniReport, NoiseModel};
pub use sampling::{CoverageReport, SamplingPlan, SamplingScheme, TrendVerdict};
