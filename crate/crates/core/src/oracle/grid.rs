use crate::error::{Error, Result};
use crate::oracle::{dense, mp_apply};
use crate::tropical::{Semiring, TropicalMatrix, Vector};

/// Axis-aligned box `∏ [lo_j, hi_j]` scanned by the grid oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct GridBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl GridBox {
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        GridBox {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
        }
    }

    /// `[min(center) − range, max(center) + range]` in every coordinate.
    pub fn around(center: &[f64], range: f64) -> Self {
        let lo = center.iter().copied().fold(f64::INFINITY, f64::min) - range;
        let hi = center.iter().copied().fold(f64::NEG_INFINITY, f64::max) + range;
        Self::cube(center.len(), lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

const MAX_DIM: usize = 4;

/// Exhaustive scan of the grid `lo + k · step` inside `bounds` for the
/// coordinate-wise greatest `x` with `A ⊞ x ⪯ b`.
///
/// Subsolutions are closed under joins, so the answer is the join of all
/// feasible grid points. Fails when nothing in the box is feasible, or when
/// stepping past the upper face of the box would still be feasible (the box
/// cut the maximiser off).
pub fn brute_force_greatest_subsolution(
    a: &TropicalMatrix<f64>,
    b: &Vector<f64>,
    grid_step: f64,
    bounds: &GridBox,
) -> Result<Vector<f64>> {
    let n = a.cols();
    if a.semiring() != Semiring::MaxPlus {
        return Err(Error::SemiringMismatch {
            op: "brute_force_greatest_subsolution",
            expected: Semiring::MaxPlus,
            found: a.semiring(),
        });
    }
    if n > MAX_DIM || bounds.dim() != n || bounds.hi.len() != n || b.len() != a.rows() {
        return Err(Error::Oracle(format!(
            "grid oracle needs at most {MAX_DIM} unknowns and matching box/rhs sizes"
        )));
    }
    if !b.is_finite() || b.has_pos_inf() {
        return Err(Error::Oracle("right-hand side must be finite".into()));
    }
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::Oracle(format!("grid step must be positive, got {grid_step}")));
    }
    let a = dense(a);
    let b = b.to_f64s();
    let feasible = |x: &[f64]| mp_apply(&a, x).iter().zip(&b).all(|(l, r)| l <= r);

    let axes: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let (lo, hi) = (bounds.lo[j], bounds.hi[j]);
            let k = ((hi - lo) / grid_step + 1e-9).floor() as usize;
            (0..=k).map(|i| lo + i as f64 * grid_step).collect()
        })
        .collect();

    let mut best: Option<Vec<f64>> = None;
    let mut idx = vec![0usize; n];
    let mut point: Vec<f64> = axes.iter().map(|ax| ax[0]).collect();
    loop {
        if feasible(&point) {
            best = Some(match best {
                None => point.clone(),
                Some(b) => b.iter().zip(&point).map(|(&p, &q)| p.max(q)).collect(),
            });
        }
        // Odometer over the grid, last coordinate fastest.
        let mut j = n;
        loop {
            if j == 0 {
                let best = best.ok_or_else(|| Error::Oracle("no feasible grid point in the box".into()))?;
                return finish(best, &axes, grid_step, &feasible);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < axes[j].len() {
                point[j] = axes[j][idx[j]];
                break;
            }
            idx[j] = 0;
            point[j] = axes[j][0];
        }
    }
}

fn finish(best: Vec<f64>, axes: &[Vec<f64>], step: f64, feasible: &dyn Fn(&[f64]) -> bool) -> Result<Vector<f64>> {
    for (j, ax) in axes.iter().enumerate() {
        if best[j] == *ax.last().expect("non-empty axis") {
            let mut beyond = best.clone();
            beyond[j] += step;
            if feasible(&beyond) {
                return Err(Error::Oracle(format!(
                    "box truncates coordinate {j}: the greatest subsolution lies above {}",
                    best[j]
                )));
            }
        }
    }
    Ok(Vector::from_f64s(&best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tropical::principal_solution;

    fn mp(rows: &[&[f64]]) -> TropicalMatrix<f64> {
        TropicalMatrix::from_f64_rows(Semiring::MaxPlus, rows).unwrap()
    }

    #[test]
    fn two_by_two_example() {
        let a = mp(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = Vector::from_f64s(&[5.0, 6.0]);
        let x = brute_force_greatest_subsolution(&a, &b, 0.25, &GridBox::cube(2, -2.0, 6.0)).unwrap();
        assert_eq!(x, Vector::from_f64s(&[3.0, 2.0]));
        assert!(x.approx_eq(&principal_solution(&a, &b).unwrap(), 0.25));
    }

    #[test]
    fn identity_returns_rhs() {
        let a = TropicalMatrix::identity(3, Semiring::MaxPlus);
        let b = Vector::from_f64s(&[0.5, -1.0, 2.0]);
        let x = brute_force_greatest_subsolution(&a, &b, 0.25, &GridBox::around(&[0.5, -1.0, 2.0], 2.0)).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn scalar_residuation() {
        let x = brute_force_greatest_subsolution(
            &mp(&[&[1.5]]),
            &Vector::from_f64s(&[4.0]),
            0.25,
            &GridBox::cube(1, 0.0, 5.0),
        )
        .unwrap();
        assert_eq!(x, Vector::from_f64s(&[2.5]));
    }

    #[test]
    fn misconfigured_boxes() {
        let a = mp(&[&[0.0]]);
        let b = Vector::from_f64s(&[10.0]);
        // Maximiser above the box.
        assert!(brute_force_greatest_subsolution(&a, &b, 0.25, &GridBox::cube(1, 0.0, 5.0)).is_err());
        // Nothing feasible.
        assert!(brute_force_greatest_subsolution(&a, &b, 0.25, &GridBox::cube(1, 11.0, 12.0)).is_err());
        // Upper face exactly at the maximiser is fine.
        let x = brute_force_greatest_subsolution(&a, &b, 0.25, &GridBox::cube(1, 9.0, 10.0)).unwrap();
        assert_eq!(x, b);
        let big = TropicalMatrix::identity(5, Semiring::MaxPlus);
        assert!(brute_force_greatest_subsolution(
            &big,
            &Vector::from_f64s(&[0.0; 5]),
            1.0,
            &GridBox::cube(5, 0.0, 1.0)
        )
        .is_err());
    }
}
