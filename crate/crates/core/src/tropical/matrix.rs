use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tropical::{ExtendedReal, Vector};

/// Which semiring a matrix is meant to be multiplied in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semiring {
    /// (ℝ ∪ {−∞}, max, +); `+inf` entries are rejected.
    MaxPlus,
    /// (ℝ ∪ {+∞}, min, +'); `-inf` entries are rejected.
    MinPlus,
}

impl Semiring {
    pub fn dual(self) -> Self {
        match self {
            Semiring::MaxPlus => Semiring::MinPlus,
            Semiring::MinPlus => Semiring::MaxPlus,
        }
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Semiring::MaxPlus => f.write_str("max-plus"),
            Semiring::MinPlus => f.write_str("min-plus"),
        }
    }
}

/// Dense row-major matrix over the extended reals, tagged with the semiring
/// it belongs to. The tag is checked at construction and by every product.
#[derive(Clone, Debug, PartialEq)]
pub struct TropicalMatrix<T> {
    rows: usize,
    cols: usize,
    semiring: Semiring,
    data: Vec<ExtendedReal<T>>,
}

impl<T: Scalar> Eq for TropicalMatrix<T> {}

/// JSON shape of a matrix: `{"rows": m, "cols": n, "data": [...]}` with
/// `data` row-major.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MatrixDoc<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<ExtendedReal<T>>,
}

impl<T: Scalar> TropicalMatrix<T> {
    pub fn new(rows: usize, cols: usize, semiring: Semiring, data: Vec<ExtendedReal<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyShape);
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeData {
                rows,
                cols,
                len: data.len(),
            });
        }
        let (forbidden, name) = match semiring {
            Semiring::MaxPlus => (ExtendedReal::PosInf, "+inf"),
            Semiring::MinPlus => (ExtendedReal::NegInf, "-inf"),
        };
        if let Some(k) = data.iter().position(|&e| e == forbidden) {
            return Err(Error::ForbiddenInfinity {
                semiring,
                entry: name,
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(TropicalMatrix {
            rows,
            cols,
            semiring,
            data,
        })
    }

    pub fn from_rows(semiring: Semiring, rows: Vec<Vec<ExtendedReal<T>>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::ShapeData {
                rows: m,
                cols: n,
                len: (m - 1) * n + bad.len(),
            });
        }
        Self::new(m, n, semiring, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor from `f64` rows (IEEE infinities allowed).
    pub fn from_f64_rows(semiring: Semiring, rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            semiring,
            rows.iter()
                .map(|r| r.iter().map(|&x| ExtendedReal::from_f64(x)).collect())
                .collect(),
        )
    }

    /// The multiplicative identity: `0` on the diagonal, the semiring's
    /// additive unit elsewhere.
    pub fn identity(n: usize, semiring: Semiring) -> Self {
        let off = match semiring {
            Semiring::MaxPlus => ExtendedReal::NegInf,
            Semiring::MinPlus => ExtendedReal::PosInf,
        };
        let data = (0..n * n)
            .map(|k| if k / n == k % n { ExtendedReal::zero() } else { off })
            .collect();
        Self::new(n, n, semiring, data).expect("identity is well-formed")
    }

    pub fn filled(rows: usize, cols: usize, semiring: Semiring, value: ExtendedReal<T>) -> Result<Self> {
        Self::new(rows, cols, semiring, vec![value; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn data(&self) -> &[ExtendedReal<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> ExtendedReal<T> {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[ExtendedReal<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn expect_semiring(&self, op: &'static str, expected: Semiring) -> Result<()> {
        if self.semiring != expected {
            return Err(Error::SemiringMismatch {
                op,
                expected,
                found: self.semiring,
            });
        }
        Ok(())
    }

    fn product(&self, rhs: &Self, op: &'static str, semiring: Semiring) -> Result<Self> {
        self.expect_semiring(op, semiring)?;
        rhs.expect_semiring(op, semiring)?;
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            let a = self.row(i);
            for j in 0..rhs.cols {
                let col = (0..rhs.rows).map(|k| (a[k], rhs.get(k, j)));
                data.push(match semiring {
                    Semiring::MaxPlus => col
                        .map(|(x, y)| x.max_plus(y))
                        .fold(ExtendedReal::NegInf, ExtendedReal::join),
                    Semiring::MinPlus => col
                        .map(|(x, y)| x.min_plus(y))
                        .fold(ExtendedReal::PosInf, ExtendedReal::meet),
                });
            }
        }
        Self::new(self.rows, rhs.cols, semiring, data)
    }

    /// Max-plus product `[A ⊞ B]_{ij} = max_k (A_{ik} + B_{kj})`.
    pub fn mp_matmul(&self, rhs: &Self) -> Result<Self> {
        self.product(rhs, "mp_matmul", Semiring::MaxPlus)
    }

    /// Min-plus product `[A ⊞' B]_{ij} = min_k (A_{ik} +' B_{kj})`.
    pub fn minp_matmul(&self, rhs: &Self) -> Result<Self> {
        self.product(rhs, "minp_matmul", Semiring::MinPlus)
    }

    fn check_vec(&self, x: &Vector<T>, op: &'static str) -> Result<()> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: (x.len(), 1),
            });
        }
        Ok(())
    }

    /// Max-plus matrix-vector product `A ⊞ x`.
    pub fn mp_matvec(&self, x: &Vector<T>) -> Result<Vector<T>> {
        self.expect_semiring("mp_matvec", Semiring::MaxPlus)?;
        self.check_vec(x, "mp_matvec")?;
        Ok((0..self.rows).map(|i| mp_dot(self.row(i), x.entries())).collect())
    }

    /// Min-plus matrix-vector product `A ⊞' y`.
    pub fn minp_matvec(&self, y: &Vector<T>) -> Result<Vector<T>> {
        self.expect_semiring("minp_matvec", Semiring::MinPlus)?;
        self.check_vec(y, "minp_matvec")?;
        Ok((0..self.rows).map(|i| minp_dot(self.row(i), y.entries())).collect())
    }

    /// Negated transpose with the semiring tag flipped. Applied to a
    /// max-plus matrix this is the residuation adjoint `A⁻`; applying it
    /// twice gives back the original matrix.
    pub fn pseudoinverse(&self) -> Self {
        let data = (0..self.cols)
            .flat_map(|i| (0..self.rows).map(move |j| (i, j)))
            .map(|(i, j)| -self.get(j, i))
            .collect();
        TropicalMatrix {
            rows: self.cols,
            cols: self.rows,
            semiring: self.semiring.dual(),
            data,
        }
    }

    /// Every row and every column holds at least one finite entry.
    pub fn is_doubly_g_astic(&self) -> bool {
        self.empty_rows().is_empty() && self.empty_cols().is_empty()
    }

    /// Rows without a finite entry.
    pub fn empty_rows(&self) -> Vec<usize> {
        (0..self.rows)
            .filter(|&i| !self.row(i).iter().any(|e| e.is_finite()))
            .collect()
    }

    /// Columns without a finite entry.
    pub fn empty_cols(&self) -> Vec<usize> {
        (0..self.cols)
            .filter(|&j| !(0..self.rows).any(|i| self.get(i, j).is_finite()))
            .collect()
    }

    pub fn to_doc(&self) -> MatrixDoc<T> {
        MatrixDoc {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        }
    }

    pub fn from_doc(doc: MatrixDoc<T>, semiring: Semiring) -> Result<Self> {
        Self::new(doc.rows, doc.cols, semiring, doc.data)
    }
}

/// `max_j (a_j + x_j)` in max-plus arithmetic.
#[inline]
pub(crate) fn mp_dot<T: Scalar>(a: &[ExtendedReal<T>], x: &[ExtendedReal<T>]) -> ExtendedReal<T> {
    a.iter()
        .zip(x)
        .map(|(&a, &x)| a.max_plus(x))
        .fold(ExtendedReal::NegInf, ExtendedReal::join)
}

/// `min_j (a_j +' y_j)` in min-plus arithmetic.
#[inline]
pub(crate) fn minp_dot<T: Scalar>(a: &[ExtendedReal<T>], y: &[ExtendedReal<T>]) -> ExtendedReal<T> {
    a.iter()
        .zip(y)
        .map(|(&a, &y)| a.min_plus(y))
        .fold(ExtendedReal::PosInf, ExtendedReal::meet)
}

/// The greatest `x` with `A ⊞ x ⪯ b`, i.e. `A⁻ ⊞' b`. An exact solution of
/// `A ⊞ x = b` whenever one exists.
pub fn principal_solution<T: Scalar>(a: &TropicalMatrix<T>, b: &Vector<T>) -> Result<Vector<T>> {
    a.expect_semiring("principal_solution", Semiring::MaxPlus)?;
    if a.rows != b.len() {
        return Err(Error::DimensionMismatch {
            op: "principal_solution",
            left: a.shape(),
            right: (b.len(), 1),
        });
    }
    a.pseudoinverse().minp_matvec(b)
}

/// `A⁻ ⊞' y` computed straight from `A` without materialising the
/// pseudoinverse: entry `i` is `min_j (−A_{ji} +' y_j)`.
#[inline]
pub(crate) fn residuate_into<T: Scalar>(a: &TropicalMatrix<T>, y: &[ExtendedReal<T>], out: &mut [ExtendedReal<T>]) {
    out.fill(ExtendedReal::PosInf);
    for (j, &yj) in y.iter().enumerate() {
        for (i, o) in out.iter_mut().enumerate() {
            *o = o.meet((-a.get(j, i)).min_plus(yj));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = TropicalMatrix<f64>;
    type V = Vector<f64>;
    const NI: f64 = f64::NEG_INFINITY;
    const PI: f64 = f64::INFINITY;

    fn mp(rows: &[&[f64]]) -> M {
        M::from_f64_rows(Semiring::MaxPlus, rows).unwrap()
    }

    fn minp(rows: &[&[f64]]) -> M {
        M::from_f64_rows(Semiring::MinPlus, rows).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(
            M::new(2, 2, Semiring::MaxPlus, vec![ExtendedReal::zero(); 3]),
            Err(Error::ShapeData { .. })
        ));
        assert!(matches!(
            M::from_f64_rows(Semiring::MaxPlus, &[&[0.0, PI]]),
            Err(Error::ForbiddenInfinity { row: 0, col: 1, .. })
        ));
        assert!(M::from_f64_rows(Semiring::MinPlus, &[&[NI]]).is_err());
        assert!(M::from_f64_rows(Semiring::MaxPlus, &[&[0.0, 1.0], &[2.0]]).is_err());
        assert!(matches!(
            M::new(0, 2, Semiring::MaxPlus, vec![]),
            Err(Error::EmptyShape)
        ));
    }

    #[test]
    fn max_plus_products() {
        let b = mp(&[&[1.0, NI], &[-3.0, 2.5]]);
        assert_eq!(M::identity(2, Semiring::MaxPlus).mp_matmul(&b).unwrap(), b);

        let a = mp(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let col = mp(&[&[0.0], &[0.0]]);
        assert_eq!(a.mp_matmul(&col).unwrap(), mp(&[&[2.0], &[4.0]]));

        let dead = mp(&[&[NI, NI], &[3.0, 4.0]]);
        let prod = dead.mp_matmul(&a).unwrap();
        assert!(prod.row(0).iter().all(|e| e.is_neg_inf()));
    }

    #[test]
    fn min_plus_products() {
        let b = minp(&[&[1.0, PI], &[-3.0, 2.5]]);
        assert_eq!(M::identity(2, Semiring::MinPlus).minp_matmul(&b).unwrap(), b);

        let a = minp(&[&[-1.0, -3.0], &[-2.0, -4.0]]);
        let col = minp(&[&[5.0], &[6.0]]);
        assert_eq!(a.minp_matmul(&col).unwrap(), minp(&[&[3.0], &[2.0]]));

        let dead = minp(&[&[PI, PI], &[1.0, 1.0]]);
        let prod = dead.minp_matmul(&a).unwrap();
        assert!(prod.row(0).iter().all(|e| e.is_pos_inf()));
    }

    #[test]
    fn product_errors() {
        let a = mp(&[&[1.0, 2.0]]);
        match a.mp_matmul(&a) {
            Err(Error::DimensionMismatch { left, right, .. }) => {
                assert_eq!(left, (1, 2));
                assert_eq!(right, (1, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
        let m = minp(&[&[1.0]]);
        assert!(matches!(m.mp_matmul(&m), Err(Error::SemiringMismatch { .. })));
        assert!(a.minp_matvec(&V::from_f64s(&[0.0, 0.0])).is_err());
        assert!(a.mp_matvec(&V::from_f64s(&[0.0])).is_err());
    }

    #[test]
    fn matvec() {
        let x = V::from_f64s(&[1.0, NI, 3.0]);
        assert_eq!(M::identity(3, Semiring::MaxPlus).mp_matvec(&x).unwrap(), x);
        let a = mp(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(
            a.mp_matvec(&V::from_f64s(&[0.0, 0.0])).unwrap(),
            V::from_f64s(&[2.0, 4.0])
        );
        assert_eq!(a.mp_matvec(&V::bottom(2)).unwrap(), V::bottom(2));
        let y = V::from_f64s(&[5.0, PI]);
        assert_eq!(M::identity(2, Semiring::MinPlus).minp_matvec(&y).unwrap(), y);
    }

    #[test]
    fn pseudoinverse_is_negated_transpose() {
        let a = mp(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let inv = a.pseudoinverse();
        assert_eq!(inv, minp(&[&[-1.0, -3.0], &[-2.0, -4.0]]));
        assert_eq!(
            M::identity(3, Semiring::MaxPlus).pseudoinverse(),
            M::identity(3, Semiring::MinPlus)
        );
        assert_eq!(inv.pseudoinverse(), a);
        let rect = mp(&[&[1.0, NI, 0.5]]);
        assert_eq!(rect.pseudoinverse(), minp(&[&[-1.0], &[PI], &[-0.5]]));
    }

    #[test]
    fn principal_solution_examples() {
        let a = mp(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = V::from_f64s(&[5.0, 6.0]);
        let x = principal_solution(&a, &b).unwrap();
        assert_eq!(x, V::from_f64s(&[3.0, 2.0]));
        let ax = a.mp_matvec(&x).unwrap();
        assert_eq!(ax, V::from_f64s(&[4.0, 6.0]));
        assert!(ax.leq(&b));

        let id = M::identity(2, Semiring::MaxPlus);
        assert_eq!(principal_solution(&id, &b).unwrap(), b);
        assert!(principal_solution(&a, &V::from_f64s(&[1.0])).is_err());
    }

    #[test]
    fn residuate_matches_pseudoinverse_product() {
        let a = mp(&[&[1.0, NI, 2.0], &[0.0, -1.0, NI]]);
        let y = V::from_f64s(&[0.5, PI]);
        let mut out = vec![ExtendedReal::zero(); 3];
        residuate_into(&a, y.entries(), &mut out);
        assert_eq!(V::new(out), a.pseudoinverse().minp_matvec(&y).unwrap());
    }

    #[test]
    fn doubly_g_astic() {
        assert!(mp(&[&[1.0, 2.0], &[3.0, 4.0]]).is_doubly_g_astic());
        assert!(!mp(&[&[NI, NI], &[3.0, 4.0]]).is_doubly_g_astic());
        assert!(!mp(&[&[NI, 1.0], &[NI, 4.0]]).is_doubly_g_astic());
        assert!(M::identity(4, Semiring::MaxPlus).is_doubly_g_astic());
        assert_eq!(mp(&[&[NI, 1.0], &[NI, 4.0]]).empty_cols(), vec![0]);
    }

    #[test]
    fn doc_round_trip() {
        let a = mp(&[&[1.0, NI], &[0.25, 4.0]]);
        let json = serde_json::to_string(&a.to_doc()).unwrap();
        assert_eq!(json, r#"{"rows":2,"cols":2,"data":[1.0,"-inf",0.25,4.0]}"#);
        let doc: MatrixDoc<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(M::from_doc(doc, Semiring::MaxPlus).unwrap(), a);
    }
}
