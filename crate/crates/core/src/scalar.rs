//! Scalar types the tropical algebra can be instantiated over.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// A totally ordered (NaN-free) number type with exact `+`/`-` for the
/// finite part of an extended real.
///
/// Implemented for `f32`, `f64` and the exact rational `Ratio<i64>`.
/// The algebra only ever adds, subtracts, negates and compares, so an exact
/// type gives bit-exact results for all lattice identities.
pub trait Scalar:
    Num + Signed + Copy + PartialOrd + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `false` for NaN and IEEE infinities; always `true` for exact types.
    fn is_regular(&self) -> bool;

    /// Default absolute tolerance for approximate comparisons.
    fn default_tolerance() -> Self;

    /// Conversion used by the random generators and the JSON layer.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 is representable")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn is_regular(&self) -> bool {
        self.is_finite()
    }

    fn default_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn is_regular(&self) -> bool {
        self.is_finite()
    }

    // f32 carries ~7 significant digits; 1e-9 would be below one ulp at 1.0.
    fn default_tolerance() -> Self {
        1e-5
    }
}

impl Scalar for Ratio<i64> {
    fn is_regular(&self) -> bool {
        true
    }

    fn default_tolerance() -> Self {
        Ratio::from_integer(0)
    }

    fn from_f64_lossy(x: f64) -> Self {
        Ratio::approximate_float(x).expect("finite f64 is approximable by Ratio<i64>")
    }
}
