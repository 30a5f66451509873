//! Dense exact linear algebra over a finite field.
//!
//! Row-major matrices of field elements with reduced row echelon form as the
//! canonical representative. RREF here always means: pivot entries are 1,
//! pivot columns are cleared above and below, pivots move strictly right.

use crate::error::{Error, Result};
use crate::gf::{same_field, Field, FieldElement};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Mat {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Mat {
            field: field.clone(),
            rows,
            cols,
            data: vec![FieldElement::zero(field); rows * cols],
        }
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        for r in &rows {
            if r.len() != n {
                return Err(Error::ArityMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            for x in r {
                if !same_field(x.field(), field) {
                    return Err(Error::FieldMismatch);
                }
            }
        }
        Ok(Mat {
            field: field.clone(),
            rows: rows.len(),
            cols: n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldElement {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = vec![];
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(src) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, src);
            let inv = self.get(row, col).inv().expect("pivot is nonzero");
            for c in col..self.cols {
                let v = self.get(row, c).mul_ref(&inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !self.get(r, col).is_zero() {
                    let f = self.get(r, col).clone();
                    for c in col..self.cols {
                        let v = self.get(r, c).sub_ref(&f.mul_ref(self.get(row, c)));
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel {v : M v = 0}, one vector per free column,
    /// in ascending free-column order.
    pub fn kernel_basis(&self) -> Vec<Vec<FieldElement>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let zero = FieldElement::zero(&self.field);
        let one = FieldElement::one(&self.field);
        let mut basis = vec![];
        let pivot_set: std::collections::BTreeMap<usize, usize> =
            pivots.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        for free in 0..self.cols {
            if pivot_set.contains_key(&free) {
                continue;
            }
            let mut v = vec![zero.clone(); self.cols];
            v[free] = one.clone();
            for (&pc, &pr) in &pivot_set {
                v[pc] = m.get(pr, free).neg_ref();
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of M x = b with free variables set to zero, if any.
    pub fn solve(&self, b: &[FieldElement]) -> Option<Vec<FieldElement>> {
        assert_eq!(b.len(), self.rows, "rhs length mismatch");
        let mut aug = Mat::zeros(&self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None; // pivot in the rhs column: inconsistent
        }
        let mut x = vec![FieldElement::zero(&self.field); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    /// Determinant of a square matrix by Gaussian elimination.
    pub fn det(&self) -> FieldElement {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut acc = FieldElement::one(&self.field);
        for col in 0..n {
            let Some(src) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return FieldElement::zero(&self.field);
            };
            if src != col {
                m.swap_rows(col, src);
                acc = acc.neg_ref();
            }
            let pivot = m.get(col, col).clone();
            acc = acc.mul_ref(&pivot);
            let inv = pivot.inv().expect("pivot is nonzero");
            for r in col + 1..n {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col).mul_ref(&inv);
                for c in col..n {
                    let v = m.get(r, c).sub_ref(&f.mul_ref(m.get(col, c)));
                    m.set(r, c, v);
                }
            }
        }
        acc
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = FieldElement::zero(&self.field);
                for c in 0..self.cols {
                    acc = acc + self.get(r, c).mul_ref(&v[c]);
                }
                acc
            })
            .collect()
    }
}

pub fn dot(a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
    assert!(!a.is_empty(), "dot product of empty vectors");
    let mut acc = FieldElement::zero(a[0].field());
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.mul_ref(y);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FiniteField;
    use proptest::prelude::*;

    fn mat_from_ints(field: &Field, rows: &[&[i64]]) -> Mat {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| FieldElement::from_int(field, x)).collect())
            .collect();
        Mat::from_rows(field, rows).unwrap()
    }

    #[test]
    fn rref_and_rank() {
        let f = FiniteField::prime(3).unwrap();
        let mut m = mat_from_ints(&f, &[&[2, 2, 0], &[0, 1, 2], &[0, 0, 1]]);
        let pivots = m.rref();
        assert_eq!(pivots, vec![0, 1, 2]);
        assert_eq!(m.rank(), 3);
        // (2,1,0) = 2 * (1,2,0) over GF(3)
        let m2 = mat_from_ints(&f, &[&[1, 2, 0], &[2, 1, 0]]);
        assert_eq!(m2.rank(), 1);
    }

    #[test]
    fn kernel_is_orthogonal_to_rows() {
        let f = FiniteField::new(2, 2).unwrap();
        let m = mat_from_ints(&f, &[&[1, 0, 1, 1], &[0, 1, 1, 0]]);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            for out in m.apply(v) {
                assert!(out.is_zero());
            }
        }
    }

    #[test]
    fn det_matches_cofactor_formula() {
        let f = FiniteField::prime(5).unwrap();
        // det [[1,2],[3,4]] = 4 - 6 = -2 = 3 mod 5
        let m = mat_from_ints(&f, &[&[1, 2], &[3, 4]]);
        assert_eq!(m.det(), FieldElement::from_int(&f, 3));
        let singular = mat_from_ints(&f, &[&[1, 2], &[2, 4]]);
        assert!(singular.det().is_zero());
        // row swap flips the sign
        let swapped = mat_from_ints(&f, &[&[3, 4], &[1, 2]]);
        assert_eq!(swapped.det(), FieldElement::from_int(&f, 2));
    }

    #[test]
    fn solve_finds_particular_solution() {
        let f = FiniteField::prime(5).unwrap();
        let m = mat_from_ints(&f, &[&[1, 1], &[1, 2]]);
        let b = vec![FieldElement::from_int(&f, 3), FieldElement::from_int(&f, 4)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.apply(&x), b);
        // inconsistent system
        let m2 = mat_from_ints(&f, &[&[1, 1], &[2, 2]]);
        let b2 = vec![FieldElement::from_int(&f, 1), FieldElement::from_int(&f, 3)];
        assert!(m2.solve(&b2).is_none());
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let f = FiniteField::new(2, 2).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let rows = (0..3)
                .map(|_| {
                    (0..5)
                        .map(|_| FieldElement::from_index(&f, rng.gen_range(0..4)))
                        .collect::<Vec<_>>()
                })
                .collect();
            let mut m = Mat::from_rows(&f, rows).unwrap();
            m.rref();
            let once = m.clone();
            m.rref();
            prop_assert_eq!(once, m);
        }
    }
}
