//! Matrices and vectors over a semiring.
//!
//! No subtraction, determinants or inverses: only ⊕/⊗ linear algebra.
//! Products fold the inner index left to right so runs are reproducible
//! bit for bit, even though ⊕-commutativity makes the order unobservable.

use std::collections::HashMap;
use std::ops::Index;
use std::sync::Mutex;

use thiserror::Error;

use crate::semiring::Semiring;
use crate::seq::Seq;

/// Dimensions are capped so exhaustive path enumeration stays tractable.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("{op}: dimension mismatch, {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {dim} out of range (must be 1..={MAX_DIM})")]
    DimensionOutOfRange { dim: usize },
    #[error("entry count {got} does not match {rows}x{cols}")]
    EntryCount { rows: usize, cols: usize, got: usize },
    #[error("falling product needs {count} factors at time {time}, but only {} are available", time + 1)]
    FallingRange { time: usize, count: usize },
}

fn check_dim(dim: usize) -> Result<(), LinalgError> {
    if dim == 0 || dim > MAX_DIM {
        Err(LinalgError::DimensionOutOfRange { dim })
    } else {
        Ok(())
    }
}

/// A dense row-major matrix with entries in a semiring carrier.
///
/// Matrices are immutable values and safe to share read-only.
#[derive(Debug, Clone)]
pub struct Matrix<S: Semiring> {
    rows: usize,
    cols: usize,
    entries: Vec<S::Elem>,
    semiring: S,
}

impl<S: Semiring> PartialEq for Matrix<S> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl<S: Semiring> Eq for Matrix<S> {}

impl<S: Semiring> Matrix<S> {
    pub fn new(
        semiring: S,
        rows: usize,
        cols: usize,
        entries: Vec<S::Elem>,
    ) -> Result<Self, LinalgError> {
        check_dim(rows)?;
        check_dim(cols)?;
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount { rows, cols, got: entries.len() });
        }
        Ok(Self { rows, cols, entries, semiring })
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(
        semiring: S,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> S::Elem,
    ) -> Result<Self, LinalgError> {
        check_dim(rows)?;
        check_dim(cols)?;
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Ok(Self { rows, cols, entries, semiring })
    }

    /// k×k matrix with 1̄ on the diagonal and 0̄ elsewhere.
    pub fn identity(semiring: S, k: usize) -> Result<Self, LinalgError> {
        let one = semiring.one();
        let zero = semiring.zero();
        Self::from_fn(semiring.clone(), k, k, |i, j| {
            if i == j { one.clone() } else { zero.clone() }
        })
    }

    /// All-0̄ matrix.
    pub fn zeros(semiring: S, rows: usize, cols: usize) -> Result<Self, LinalgError> {
        let zero = semiring.zero();
        Self::from_fn(semiring.clone(), rows, cols, |_, _| zero.clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn semiring(&self) -> &S {
        &self.semiring
    }

    pub fn get(&self, row: usize, col: usize) -> &S::Elem {
        &self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[S::Elem] {
        &self.entries
    }

    pub fn is_all_zero(&self) -> bool {
        self.entries.iter().all(|e| self.semiring.is_zero(e))
    }

    /// Entrywise ⊕.
    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(self.mismatch("matrix add", other.rows, other.cols));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| self.semiring.add(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
            semiring: self.semiring.clone(),
        })
    }

    /// Matrix product: (X·Y)_ij = ⊕_l X_il ⊗ Y_lj, l ascending.
    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(self.mismatch("matrix mul", other.rows, other.cols));
        }
        let s = &self.semiring;
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = s.zero();
                for l in 0..self.cols {
                    acc = s.add(&acc, &s.mul(self.get(i, l), other.get(l, j)));
                }
                entries.push(acc);
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            entries,
            semiring: s.clone(),
        })
    }

    /// Matrix-vector product.
    pub fn mul_vector(&self, v: &Vector<S>) -> Result<Vector<S>, LinalgError> {
        if self.cols != v.dim() {
            return Err(self.mismatch("matrix-vector mul", v.dim(), 1));
        }
        let s = &self.semiring;
        let mut entries = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = s.zero();
            for l in 0..self.cols {
                acc = s.add(&acc, &s.mul(self.get(i, l), v.get(l)));
            }
            entries.push(acc);
        }
        Ok(Vector { entries, semiring: s.clone() })
    }

    /// Iterated power: X⁰ = I, Xᵐ = X ⊗ Xᵐ⁻¹.
    ///
    /// Plain repeated multiplication on purpose; binary exponentiation is
    /// an optimization this crate does not need at desk scale.
    pub fn pow(&self, m: usize) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut acc = Matrix::identity(self.semiring.clone(), self.rows)?;
        for _ in 0..m {
            acc = self.mul(&acc)?;
        }
        Ok(acc)
    }

    fn mismatch(&self, op: &'static str, right_rows: usize, right_cols: usize) -> LinalgError {
        LinalgError::DimensionMismatch {
            op,
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows,
            right_cols,
        }
    }
}

impl<S: Semiring> Index<(usize, usize)> for Matrix<S> {
    type Output = S::Elem;

    fn index(&self, (row, col): (usize, usize)) -> &S::Elem {
        self.get(row, col)
    }
}

/// A column vector with entries in a semiring carrier.
#[derive(Debug, Clone)]
pub struct Vector<S: Semiring> {
    entries: Vec<S::Elem>,
    semiring: S,
}

impl<S: Semiring> PartialEq for Vector<S> {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl<S: Semiring> Eq for Vector<S> {}

impl<S: Semiring> Vector<S> {
    pub fn new(semiring: S, entries: Vec<S::Elem>) -> Result<Self, LinalgError> {
        check_dim(entries.len())?;
        Ok(Self { entries, semiring })
    }

    /// All-0̄ vector.
    pub fn zeros(semiring: S, dim: usize) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        let entries = vec![semiring.zero(); dim];
        Ok(Self { entries, semiring })
    }

    /// All-1̄ vector.
    pub fn ones(semiring: S, dim: usize) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        let entries = vec![semiring.one(); dim];
        Ok(Self { entries, semiring })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> &S::Elem {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[S::Elem] {
        &self.entries
    }

    pub fn semiring(&self) -> &S {
        &self.semiring
    }

    pub fn is_all_zero(&self) -> bool {
        self.entries.iter().all(|e| self.semiring.is_zero(e))
    }

    /// Entrywise ⊕.
    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimensionMismatch {
                op: "vector add",
                left_rows: self.dim(),
                left_cols: 1,
                right_rows: other.dim(),
                right_cols: 1,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| self.semiring.add(a, b))
            .collect();
        Ok(Self { entries, semiring: self.semiring.clone() })
    }

    /// View as a k×1 matrix.
    pub fn as_column(&self) -> Matrix<S> {
        Matrix {
            rows: self.dim(),
            cols: 1,
            entries: self.entries.clone(),
            semiring: self.semiring.clone(),
        }
    }
}

impl<S: Semiring> Index<usize> for Vector<S> {
    type Output = S::Elem;

    fn index(&self, i: usize) -> &S::Elem {
        self.get(i)
    }
}

/// Convert a k×1 matrix back into a vector.
pub fn column_to_vector<S: Semiring>(m: &Matrix<S>) -> Result<Vector<S>, LinalgError> {
    if m.cols() != 1 {
        return Err(LinalgError::DimensionMismatch {
            op: "column view",
            left_rows: m.rows(),
            left_cols: m.cols(),
            right_rows: m.rows(),
            right_cols: 1,
        });
    }
    Vector::new(m.semiring().clone(), m.entries().to_vec())
}

/// The falling matrix product A⁽ᵐ⁾(t) = A(t)·A(t−1)⋯A(t−m+1), A⁽⁰⁾(t) = I.
///
/// `count` is the number of matrices being multiplied; it may be at most
/// `time + 1` because the sequence is only defined down to index 0. The
/// factors are multiplied in exactly the descending-time order above.
pub fn falling_product<S: Semiring>(
    a: &Seq<Matrix<S>>,
    time: usize,
    count: usize,
) -> Result<Matrix<S>, LinalgError> {
    if count > time + 1 {
        return Err(LinalgError::FallingRange { time, count });
    }
    let probe = a.eval(time);
    if !probe.is_square() {
        return Err(LinalgError::NotSquare { rows: probe.rows(), cols: probe.cols() });
    }
    let mut acc = Matrix::identity(probe.semiring().clone(), probe.rows())?;
    for step in 0..count {
        acc = acc.mul(&a.eval(time - step))?;
    }
    Ok(acc)
}

/// Memoized falling products for one coefficient sequence.
///
/// Uses A⁽ᵐ⁾(t) = A(t) ⊗ A⁽ᵐ⁻¹⁾(t−1), so each (t, m) pair costs one
/// matrix multiplication. Solvers and series builders that sweep a whole
/// truncation order share one of these.
pub struct FallingProducts<S: Semiring> {
    seq: Seq<Matrix<S>>,
    dim: usize,
    semiring: S,
    cache: Mutex<HashMap<(usize, usize), Matrix<S>>>,
}

impl<S: Semiring> FallingProducts<S> {
    pub fn new(seq: Seq<Matrix<S>>) -> Result<Self, LinalgError> {
        let probe = seq.eval(0);
        if !probe.is_square() {
            return Err(LinalgError::NotSquare { rows: probe.rows(), cols: probe.cols() });
        }
        Ok(Self {
            dim: probe.rows(),
            semiring: probe.semiring().clone(),
            seq,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, time: usize, count: usize) -> Result<Matrix<S>, LinalgError> {
        if count > time + 1 {
            return Err(LinalgError::FallingRange { time, count });
        }
        if count == 0 {
            return Matrix::identity(self.semiring.clone(), self.dim);
        }
        if let Some(hit) = self.cache.lock().unwrap().get(&(time, count)) {
            return Ok(hit.clone());
        }
        let tail = if count == 1 {
            Matrix::identity(self.semiring.clone(), self.dim)?
        } else {
            self.get(time - 1, count - 1)?
        };
        let product = self.seq.eval(time).mul(&tail)?;
        self.cache
            .lock()
            .unwrap()
            .insert((time, count), product.clone());
        Ok(product)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Boolean, Builtin, MinPlus, MinPlusElem, Natural};
    use crate::with_semiring;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn nat(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn nat_matrix(rows: usize, cols: usize, entries: &[u64]) -> Matrix<Natural> {
        Matrix::new(Natural, rows, cols, entries.iter().map(|&e| nat(e)).collect()).unwrap()
    }

    #[test]
    fn one_by_one_product() {
        let x = nat_matrix(1, 1, &[4]);
        let y = nat_matrix(1, 1, &[3]);
        assert_eq!(x.mul(&y).unwrap(), nat_matrix(1, 1, &[12]));
    }

    #[test]
    fn identity_is_neutral() {
        let x = nat_matrix(2, 2, &[3, 1, 4, 1]);
        let id = Matrix::identity(Natural, 2).unwrap();
        assert_eq!(id.mul(&x).unwrap(), x);
        assert_eq!(x.mul(&id).unwrap(), x);
        let v = Vector::new(Natural, vec![nat(5), nat(9)]).unwrap();
        assert_eq!(id.mul_vector(&v).unwrap(), v);
    }

    #[test]
    fn zero_matrix_annihilates() {
        let x = nat_matrix(2, 2, &[3, 1, 4, 1]);
        let z = Matrix::zeros(Natural, 2, 2).unwrap();
        assert_eq!(x.mul(&z).unwrap(), z);
        assert_eq!(z.mul(&x).unwrap(), z);
    }

    /// Brute-force 2×2 min-plus product, written directly in terms of
    /// min and + over Option<i64> (None = +∞), independent of Matrix::mul.
    fn min_plus_oracle(x: [[Option<i64>; 2]; 2]) -> [[Option<i64>; 2]; 2] {
        let mut out = [[None; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut best: Option<i64> = None;
                for l in 0..2 {
                    if let (Some(a), Some(b)) = (x[i][l], x[l][j]) {
                        best = Some(best.map_or(a + b, |c| c.min(a + b)));
                    }
                }
                out[i][j] = best;
            }
        }
        out
    }

    fn mp(v: Option<i64>) -> MinPlusElem {
        match v {
            Some(n) => MinPlusElem::Finite(n.into()),
            None => MinPlusElem::Infinity,
        }
    }

    #[test]
    fn min_plus_square_matches_expansion() {
        let raw = [[Some(0), Some(1)], [None, Some(0)]];
        let expected = min_plus_oracle(raw);
        let x = Matrix::from_fn(MinPlus, 2, 2, |i, j| mp(raw[i][j])).unwrap();
        let got = x.mul(&x).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(*got.get(i, j), mp(expected[i][j]));
            }
        }
        // frozen from the oracle: X·X = [[0,1],[inf,0]]
        assert_eq!(got, x);
    }

    #[test]
    fn pow_zero_is_identity() {
        let x = nat_matrix(2, 2, &[1, 2, 3, 4]);
        assert_eq!(x.pow(0).unwrap(), Matrix::identity(Natural, 2).unwrap());
    }

    #[test]
    fn pow_scalar() {
        // 2*2*2 = 8, frozen from plain integer arithmetic
        let x = nat_matrix(1, 1, &[2]);
        assert_eq!(x.pow(3).unwrap(), nat_matrix(1, 1, &[8]));
    }

    #[test]
    fn boolean_adjacency_square() {
        // swapping both states twice returns to the start: paths of length 2
        // exist exactly on the diagonal
        let x = Matrix::new(Boolean, 2, 2, vec![false, true, true, false]).unwrap();
        let got = x.pow(2).unwrap();
        let expected = Matrix::new(Boolean, 2, 2, vec![true, false, false, true]).unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn pow_rejects_non_square() {
        let x = nat_matrix(1, 2, &[1, 2]);
        assert!(matches!(x.pow(2), Err(LinalgError::NotSquare { .. })));
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            Matrix::zeros(Natural, MAX_DIM + 1, 1),
            Err(LinalgError::DimensionOutOfRange { .. })
        ));
        assert!(matches!(
            Matrix::zeros(Natural, 0, 1),
            Err(LinalgError::DimensionOutOfRange { .. })
        ));
    }

    fn index_seq(f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Seq<Matrix<Natural>> {
        Seq::new("coefficients", move |n| {
            nat_matrix(1, 1, &[f(n as u64)])
        })
    }

    #[test]
    fn falling_product_empty_is_identity() {
        let a = index_seq(|n| n + 1);
        assert_eq!(
            falling_product(&a, 5, 0).unwrap(),
            Matrix::identity(Natural, 1).unwrap()
        );
    }

    #[test]
    fn falling_product_example_terms() {
        // A(n) = n+1: A(3)·A(2) = 4·3 = 12
        let a = index_seq(|n| n + 1);
        assert_eq!(falling_product(&a, 3, 2).unwrap(), nat_matrix(1, 1, &[12]));
        // B(n) = n: B(2)·B(1) = 2·1 = 2
        let b = index_seq(|n| n);
        assert_eq!(falling_product(&b, 2, 2).unwrap(), nat_matrix(1, 1, &[2]));
    }

    #[test]
    fn falling_product_range_error() {
        let a = index_seq(|n| n);
        assert!(matches!(
            falling_product(&a, 2, 4),
            Err(LinalgError::FallingRange { .. })
        ));
    }

    #[test]
    fn falling_product_never_commutes() {
        let x = nat_matrix(2, 2, &[1, 1, 0, 1]);
        let y = nat_matrix(2, 2, &[1, 0, 1, 1]);
        let xy = x.mul(&y).unwrap();
        let yx = y.mul(&x).unwrap();
        assert_ne!(xy, yx, "witness pair must not commute");
        let x2 = x.clone();
        let y2 = y.clone();
        let a = Seq::new("witness", move |n| if n == 1 { x2.clone() } else { y2.clone() });
        // A(1)·A(0) = X·Y, in that order
        assert_eq!(falling_product(&a, 1, 2).unwrap(), xy);
    }

    #[test]
    fn constant_sequence_collapses_to_power() {
        for b in Builtin::ALL {
            with_semiring!(b, s => {
                let one = s.one();
                let zero = s.zero();
                let m = Matrix::new(
                    s.clone(),
                    2,
                    2,
                    vec![one.clone(), zero.clone(), one.clone(), one.clone()],
                )
                .unwrap();
                let mm = m.clone();
                let a = Seq::new("constant", move |_| mm.clone());
                for count in 0..=8usize {
                    for time in count.saturating_sub(1)..count + 4 {
                        if count > time + 1 {
                            continue;
                        }
                        assert_eq!(
                            falling_product(&a, time, count).unwrap(),
                            m.pow(count).unwrap()
                        );
                    }
                }
            });
        }
    }

    #[test]
    fn cached_falling_products_match_plain() {
        let a = index_seq(|n| n + 2);
        let cache = FallingProducts::new(a.clone()).unwrap();
        for time in 0..10 {
            for count in 0..=time + 1 {
                assert_eq!(
                    cache.get(time, count).unwrap(),
                    falling_product(&a, time, count).unwrap()
                );
            }
        }
        assert!(matches!(
            cache.get(3, 5),
            Err(LinalgError::FallingRange { .. })
        ));
    }

    proptest! {
        #[test]
        fn matrix_mul_associative(
            k in 1usize..=3,
            raw in proptest::collection::vec(0u8..4, 27),
        ) {
            for b in Builtin::ALL {
                with_semiring!(b, s => {
                    let pool = crate::laws::canonical_samples(s.name());
                    let elem = |idx: u8| s.parse_literal(pool[idx as usize % 4]).unwrap();
                    let grab = |offset: usize| {
                        Matrix::from_fn(s.clone(), k, k, |i, j| elem(raw[offset + i * k + j])).unwrap()
                    };
                    let (x, y, z) = (grab(0), grab(9), grab(18));
                    let lhs = x.mul(&y).unwrap().mul(&z).unwrap();
                    let rhs = x.mul(&y.mul(&z).unwrap()).unwrap();
                    prop_assert_eq!(lhs, rhs);
                });
            }
        }
    }
}
