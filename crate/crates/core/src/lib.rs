//! Exterior-calculus engine for certifying that contact forms induce
//! time-harmonic Maxwell solutions.
//!
//! The pipeline is symbolic end to end: scalar fields are closed-form
//! expressions on a 3-dimensional coordinate chart ([`expr`]), assembled
//! into exterior forms with exact derivatives ([`forms`]), paired with
//! symbolic Riemannian metrics and their Hodge stars ([`metric`]). On top
//! sit the verification drivers: contact/Beltrami/adapted checks and
//! conformal rescaling ([`contact`]), and the Maxwell residual
//! measurements with the constructive field-building pipeline
//! ([`maxwell`]). "Nowhere zero" and "everywhere equal" claims are audited
//! on deterministic seeded sample clouds ([`chart`]) and reported as
//! worst-case residuals with witness points.
//!
//! The core is generic over the floating-point scalar through
//! [`Scalar`]; the `*64` aliases below fix `f64`, the precision used by
//! the command-line front end and the acceptance suite.

pub mod chart;
pub mod contact;
pub mod expr;
pub mod forms;
pub mod maxwell;
pub mod metric;
mod numeric;
pub mod scalar;

pub use chart::{BoxDomain, Point, SampleSet, Var, SAMPLER_ID};
pub use contact::{
    beltrami_factor, check_adapted, contact_defect, rescale_to_factor, AdaptedReport,
    BeltramiEstimate, ContactError, ContactReport, DefectSign,
};
pub use expr::{parse, EvalCache, EvalError, Expression, ParseError};
pub use forms::{FormError, KForm, PhaseRole, TimeHarmonicField};
pub use maxwell::{
    build_beta, curl, fields_at, maxwell_residuals, verify_theorem1, FieldSnapshot, MaxwellError,
    Media, ResidualReport, ResidualStat, Theorem1Outcome,
};
pub use metric::{MetricError, MetricField, SpdAudit, VectorField, CONDITION_WARN_THRESHOLD};
pub use scalar::Scalar;

/// Default relative tolerance for the verification drivers.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default number of sample points.
pub const DEFAULT_SAMPLES: usize = 2000;

// Concrete aliases for the working precision.
pub type Expr64 = Expression<f64>;
pub type Point64 = Point<f64>;
pub type Box64 = BoxDomain<f64>;
pub type Samples64 = SampleSet<f64>;
pub type KForm64 = KForm<f64>;
pub type Metric64 = MetricField<f64>;
pub type VectorField64 = VectorField<f64>;
pub type Media64 = Media<f64>;

// Single-precision variants, mostly useful for experiments.
pub type Expr32 = Expression<f32>;
pub type Point32 = Point<f32>;
pub type KForm32 = KForm<f32>;
pub type Metric32 = MetricField<f32>;
