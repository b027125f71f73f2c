//! Brute-force and property oracles.
//!
//! The oracles deliberately avoid the library's own tropical kernels: they
//! work on plain `f64` with IEEE infinities and spell out the absorbing
//! conventions locally, so a bug in the main code path cannot hide itself.

mod alternating;
mod grid;
mod properties;
mod report;

pub use alternating::{alternating_method_reference, AlternatingOutcome};
pub use grid::{brute_force_greatest_subsolution, GridBox};
pub use properties::{
    check_equilibrium_bound, check_nonexpansive, check_principal_solution, check_product_laws, check_residuation,
    check_semimodule_closure, check_solution_membership,
};
pub use report::{replay, Failure, PropertyReport};

use crate::tropical::TropicalMatrix;

/// Max-plus `+`: `-inf` absorbs.
pub(crate) fn mp_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        a + b
    }
}

/// Min-plus `+'`: `+inf` absorbs.
pub(crate) fn minp_add(a: f64, b: f64) -> f64 {
    if a == f64::INFINITY || b == f64::INFINITY {
        f64::INFINITY
    } else {
        a + b
    }
}

pub(crate) fn dense(a: &TropicalMatrix<f64>) -> Vec<Vec<f64>> {
    (0..a.rows())
        .map(|i| a.row(i).iter().map(|e| e.to_f64()).collect())
        .collect()
}

/// `A ⊞ x`.
pub(crate) fn mp_apply(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .map(|(&a, &x)| mp_add(a, x))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// `A⁻ ⊞' y`, entry `j` is `min_i (−A_{ij} +' y_i)`.
pub(crate) fn residuate(a: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| {
            a.iter()
                .zip(y)
                .map(|(row, &y)| minp_add(-row[j], y))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// `|a − b|` with equal infinities at distance 0.
pub(crate) fn dist(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

pub(crate) fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&a, &b)| dist(a, b)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NI: f64 = f64::NEG_INFINITY;
    const PI: f64 = f64::INFINITY;

    #[test]
    fn absorbing_conventions() {
        assert_eq!(mp_add(NI, 3.0), NI);
        assert_eq!(minp_add(PI, NI), PI);
        assert_eq!(mp_add(NI, PI), NI);
        assert_eq!(dist(NI, NI), 0.0);
        assert_eq!(dist(NI, 0.0), PI);
    }

    #[test]
    fn residuation_of_the_two_by_two_example() {
        let a = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert_eq!(residuate(&a, &[5.0, 6.0]), vec![3.0, 2.0]);
        assert_eq!(mp_apply(&a, &[3.0, 2.0]), vec![4.0, 6.0]);
        let holes = vec![vec![0.0, NI], vec![NI, NI]];
        assert_eq!(residuate(&holes, &[1.0, NI]), vec![1.0, PI]);
    }
}
