//! Modularization-quality metrics over class-level dependency facts.
//!
//! Load per-version fact files ([`facts`]), compute Bunch cohesion/coupling
//! and afferent/efferent coupling per module ([`metrics`]), cyclic-dependency
//! statistics on the lifted module graph ([`modgraph`]), and classify how
//! each module's metrics moved between two versions ([`evolution`]).
//! [`synth`] generates seeded synthetic systems and evolution steps;
//! [`report`] renders the result tables.
//!
//! Metric code is generic over [`Scalar`]; [`Exact`] keeps values as exact
//! rationals, `f64` trades exactness for speed.

pub mod cli;
pub mod error;
pub mod evolution;
pub mod facts;
pub mod metrics;
pub mod modgraph;
pub mod report;
pub mod scalar;
pub mod synth;

pub use error::{Error, Result};
pub use facts::{ClassDependencyGraph, ClassId, ModuleId, ModuleScheme, SystemSnapshot};
pub use metrics::Metric;
pub use scalar::Scalar;

/// Exact rational metric values.
pub type Exact = num_rational::BigRational;

pub type ExactMetricsRow = metrics::ModuleMetricsRow<Exact>;
pub type MetricsRow = metrics::ModuleMetricsRow<f64>;
pub type ExactSummary = metrics::SystemMetricsSummary<Exact>;
pub type Summary = metrics::SystemMetricsSummary<f64>;
