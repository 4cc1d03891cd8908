//! Floating-point scalar abstraction.
//!
//! Everything in this crate is generic over the scalar type so the same
//! symbolic pipeline runs in `f32` or `f64`. The bounds collect what the
//! expression evaluator and the verification drivers actually need:
//! transcendental functions, the constant pi, and conversions for parsing
//! numeric literals and seeding samplers.

use std::fmt;

/// Scalar type the symbolic and numeric layers operate on: `f32` or `f64`.
pub trait Scalar:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from `f64` used by the parser and sampler.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to every supported scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
