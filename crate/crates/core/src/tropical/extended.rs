use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An element of ℝ ∪ {−∞, +∞}.
///
/// Ordering is total: `NegInf < Finite(_) < PosInf`. Addition is
/// context-dependent: in max-plus arithmetic (`max_plus`) `NegInf` absorbs
/// everything, in min-plus arithmetic (`min_plus`) `PosInf` does.
///
/// `Finite` must hold a regular value (no NaN or IEEE infinity); use
/// [`ExtendedReal::from_scalar`] when the input is untrusted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal<T> {
    NegInf,
    Finite(T),
    PosInf,
}

use ExtendedReal::{Finite, NegInf, PosInf};

impl<T: Scalar> ExtendedReal<T> {
    /// Maps IEEE infinities onto the extended symbols, rejects NaN.
    pub fn from_scalar(x: T) -> Result<Self> {
        if x.is_regular() {
            Ok(Finite(x))
        } else if x.to_f64_lossy() == f64::INFINITY {
            Ok(PosInf)
        } else if x.to_f64_lossy() == f64::NEG_INFINITY {
            Ok(NegInf)
        } else {
            Err(Error::NonFiniteScalar(format!("{x:?}")))
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            PosInf
        } else if x == f64::NEG_INFINITY {
            NegInf
        } else {
            assert!(!x.is_nan(), "NaN is not an extended real");
            Finite(T::from_f64_lossy(x))
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            NegInf => f64::NEG_INFINITY,
            Finite(x) => x.to_f64_lossy(),
            PosInf => f64::INFINITY,
        }
    }

    pub fn zero() -> Self {
        Finite(T::zero())
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, NegInf)
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, PosInf)
    }

    /// Applies `f` to a finite value, keeping infinities.
    pub fn map_scalar<U: Scalar>(self, f: impl FnOnce(T) -> U) -> ExtendedReal<U> {
        match self {
            NegInf => NegInf,
            Finite(x) => Finite(f(x)),
            PosInf => PosInf,
        }
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Finite(x) => Some(x),
            _ => None,
        }
    }

    /// `+` of the max-plus semiring; `NegInf` is absorbing.
    #[inline]
    pub fn max_plus(self, rhs: Self) -> Self {
        match (self, rhs) {
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }

    /// `+'` of the min-plus semiring; `PosInf` is absorbing.
    #[inline]
    pub fn min_plus(self, rhs: Self) -> Self {
        match (self, rhs) {
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }

    #[inline]
    pub fn join(self, rhs: Self) -> Self {
        if rhs > self {
            rhs
        } else {
            self
        }
    }

    #[inline]
    pub fn meet(self, rhs: Self) -> Self {
        if rhs < self {
            rhs
        } else {
            self
        }
    }

    /// `|self − rhs|` where equal infinities are at distance zero and any
    /// other pairing with an infinity is at distance `PosInf`.
    pub fn abs_diff(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite((a - b).abs()),
            (NegInf, NegInf) | (PosInf, PosInf) => Finite(T::zero()),
            _ => PosInf,
        }
    }

    /// `self ≤ rhs + tol` for finite values, exact for infinities.
    pub fn le_tol(self, rhs: Self, tol: T) -> bool {
        match (self, rhs) {
            (Finite(a), Finite(b)) => a <= b + tol,
            _ => self <= rhs,
        }
    }

    /// Equality up to `tol` on finite values; infinities must match exactly.
    pub fn approx_eq(self, rhs: Self, tol: T) -> bool {
        match (self, rhs) {
            (Finite(a), Finite(b)) => (a - b).abs() <= tol,
            _ => self == rhs,
        }
    }
}

impl<T: Scalar> Eq for ExtendedReal<T> {}

impl<T: Scalar> Ord for ExtendedReal<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        let rank = |x: &Self| match x {
            NegInf => 0,
            Finite(_) => 1,
            PosInf => 2,
        };
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b).expect("ExtendedReal::Finite holds a NaN"),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl<T: Scalar> PartialOrd for ExtendedReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Neg for ExtendedReal<T> {
    type Output = Self;

    fn neg(self) -> Self {
        match self {
            NegInf => PosInf,
            Finite(x) => Finite(-x),
            PosInf => NegInf,
        }
    }
}

impl<T: Scalar> From<T> for ExtendedReal<T> {
    fn from(x: T) -> Self {
        ExtendedReal::from_scalar(x).expect("NaN is not an extended real")
    }
}

impl<T: Scalar> fmt::Display for ExtendedReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => f.write_str("-inf"),
            Finite(x) => write!(f, "{x}"),
            PosInf => f.write_str("inf"),
        }
    }
}

// On the wire: finite values are JSON numbers, infinities the strings
// "inf" / "-inf".
impl<T: Scalar> Serialize for ExtendedReal<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NegInf => s.serialize_str("-inf"),
            PosInf => s.serialize_str("inf"),
            Finite(x) => s.serialize_f64(x.to_f64_lossy()),
        }
    }
}

impl<'de, T: Scalar> Deserialize<'de> for ExtendedReal<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ExtVisitor<T>(std::marker::PhantomData<T>);

        impl<T: Scalar> Visitor<'_> for ExtVisitor<T> {
            type Value = ExtendedReal<T>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                match v {
                    "inf" | "+inf" => Ok(PosInf),
                    "-inf" => Ok(NegInf),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Self::Value, E> {
                if v.is_finite() {
                    Ok(Finite(T::from_f64_lossy(v)))
                } else {
                    Err(E::invalid_value(de::Unexpected::Float(v), &self))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }
        }

        d.deserialize_any(ExtVisitor(std::marker::PhantomData))
    }
}
