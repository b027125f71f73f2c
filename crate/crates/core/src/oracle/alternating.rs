use crate::error::{Error, Result};
use crate::oracle::{dense, linf, mp_apply, residuate};
use crate::tropical::{TropicalMatrix, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct AlternatingOutcome {
    pub x: Vector<f64>,
    pub y: Vector<f64>,
    /// Sweeps performed, including the final one that confirmed convergence.
    pub sweeps: usize,
    /// `false` when `max_iters` ran out first; `x`, `y` are then partial.
    pub converged: bool,
}

/// The alternating method for the two-sided system `A ⊞ x = B ⊞ y`:
/// `x ← x ∧ A⁻ ⊞' (B ⊞ y)`, then `y ← y ∧ B⁻ ⊞' (A ⊞ x)`, until neither
/// moves by more than `tol`. At a fixed point `A ⊞ x = B ⊞ y` exactly.
pub fn alternating_method_reference(
    a: &TropicalMatrix<f64>,
    b: &TropicalMatrix<f64>,
    x0: &Vector<f64>,
    y0: &Vector<f64>,
    max_iters: usize,
    tol: f64,
) -> Result<AlternatingOutcome> {
    if a.rows() != b.rows() || a.cols() != x0.len() || b.cols() != y0.len() {
        return Err(Error::DimensionMismatch {
            op: "alternating_method_reference",
            left: a.shape(),
            right: b.shape(),
        });
    }
    let (da, db) = (dense(a), dense(b));
    let mut x = x0.to_f64s();
    let mut y = y0.to_f64s();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_iters {
        sweeps += 1;
        let nx: Vec<f64> = residuate(&da, &mp_apply(&db, &y))
            .into_iter()
            .zip(&x)
            .map(|(r, &x)| r.min(x))
            .collect();
        let ny: Vec<f64> = residuate(&db, &mp_apply(&da, &nx))
            .into_iter()
            .zip(&y)
            .map(|(r, &y)| r.min(y))
            .collect();
        let change = linf(&nx, &x).max(linf(&ny, &y));
        x = nx;
        y = ny;
        if change <= tol {
            converged = true;
            break;
        }
    }
    Ok(AlternatingOutcome {
        x: Vector::from_f64s(&x),
        y: Vector::from_f64s(&y),
        sweeps,
        converged,
    })
}
