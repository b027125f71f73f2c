//! Extended-real arithmetic and max-plus / min-plus linear algebra.

mod extended;
mod matrix;
mod vector;

pub use extended::ExtendedReal;
pub(crate) use matrix::{mp_dot, residuate_into};
pub use matrix::{principal_solution, MatrixDoc, Semiring, TropicalMatrix};
pub use vector::Vector;
