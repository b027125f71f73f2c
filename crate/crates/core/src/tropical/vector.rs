use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tropical::ExtendedReal;

/// A column vector over the extended reals, ordered by the product order.
///
/// Value vectors (an agent's reservation values) never hold `+inf`; the
/// vector type itself does not forbid it because residuation and the
/// empty meet legitimately produce `+inf` entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Scalar")]
pub struct Vector<T>(Vec<ExtendedReal<T>>);

impl<T: Scalar> Eq for Vector<T> {}

impl<T: Scalar> Vector<T> {
    pub fn new(entries: Vec<ExtendedReal<T>>) -> Self {
        Vector(entries)
    }

    pub fn from_finite(values: &[T]) -> Self {
        Vector(values.iter().map(|&x| ExtendedReal::from(x)).collect())
    }

    /// Builds from `f64`s, mapping IEEE infinities to the extended symbols.
    pub fn from_f64s(values: &[f64]) -> Self {
        Vector(values.iter().map(|&x| ExtendedReal::from_f64(x)).collect())
    }

    /// The bottom element: all `-inf`.
    pub fn bottom(dim: usize) -> Self {
        Vector(vec![ExtendedReal::NegInf; dim])
    }

    /// The top element: all `+inf`.
    pub fn top(dim: usize) -> Self {
        Vector(vec![ExtendedReal::PosInf; dim])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[ExtendedReal<T>] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<ExtendedReal<T>> {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &ExtendedReal<T>> {
        self.0.iter()
    }

    /// No entry equals `-inf`.
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|e| !e.is_neg_inf())
    }

    pub fn has_pos_inf(&self) -> bool {
        self.0.iter().any(|e| e.is_pos_inf())
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.0.iter().map(|e| e.to_f64()).collect()
    }

    fn check_dims(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                op,
                left: (self.len(), 1),
                right: (other.len(), 1),
            });
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(ExtendedReal<T>, ExtendedReal<T>) -> ExtendedReal<T>,
    ) -> Result<Self> {
        self.check_dims(other, op)?;
        Ok(Vector(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect()))
    }

    /// Entrywise max.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "join", ExtendedReal::join)
    }

    /// Entrywise min.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "meet", ExtendedReal::meet)
    }

    /// Adds a finite scalar to every entry; infinite entries are unchanged.
    pub fn shift(&self, alpha: ExtendedReal<T>) -> Result<Self> {
        let a = alpha
            .finite()
            .ok_or_else(|| Error::NonFiniteScalar(alpha.to_string()))?;
        Ok(self.shift_by(a))
    }

    pub fn shift_by(&self, alpha: T) -> Self {
        let a = ExtendedReal::Finite(alpha);
        Vector(self.0.iter().map(|&e| e.max_plus(a)).collect())
    }

    /// Product order. Vectors of different length are incomparable.
    pub fn leq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Product order up to an absolute tolerance on finite entries.
    pub fn leq_tol(&self, other: &Self, tol: T) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(&a, &b)| a.le_tol(b, tol))
    }

    /// ℓ∞ distance with `|−inf − −inf| = 0` and `|finite − −inf| = +inf`.
    pub fn linf_distance(&self, other: &Self) -> Result<ExtendedReal<T>> {
        self.check_dims(other, "linf_distance")?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.abs_diff(b))
            .fold(ExtendedReal::zero(), ExtendedReal::join))
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(&a, &b)| a.approx_eq(b, tol))
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = ExtendedReal<T>;

    fn index(&self, i: usize) -> &ExtendedReal<T> {
        &self.0[i]
    }
}

impl<T: Scalar> FromIterator<ExtendedReal<T>> for Vector<T> {
    fn from_iter<I: IntoIterator<Item = ExtendedReal<T>>>(iter: I) -> Self {
        Vector(iter.into_iter().collect())
    }
}
