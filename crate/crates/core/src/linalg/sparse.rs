use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, Real};

/// Largest dimension any single matrix may take, independent of the
/// per-context caps. Guards index arithmetic and memory.
pub const MAX_TOTAL_DIM: usize = 1 << 24;

/// Square complex matrix in compressed-row coordinate form.
///
/// Entries are kept sorted by `(row, col)` with unique coordinates, and
/// nothing with magnitude below [`Real::drop_threshold`] is ever stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T: Real> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex<T>>,
}

#[inline]
fn keep<T: Real>(v: Complex<T>) -> bool {
    v.norm() >= T::drop_threshold()
}

impl<T: Real> SparseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, Complex::one())
    }

    pub fn scalar(dim: usize, value: Complex<T>) -> Self {
        Self::diagonal(&vec![value; dim])
    }

    pub fn diagonal(diag: &[Complex<T>]) -> Self {
        let mut builder = RowBuilder::new(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            builder.push(i, v);
            builder.finish_row();
        }
        builder.build()
    }

    /// Builds a matrix from unordered triplets; duplicates are summed.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex<T>)>,
    {
        let mut items: Vec<(usize, usize, Complex<T>)> = triplets.into_iter().collect();
        for &(r, c, v) in &items {
            if r >= dim || c >= dim {
                return Err(Error::IndexOutOfRange {
                    what: "matrix coordinate",
                    index: r.max(c),
                    valid: format!("0..{dim}"),
                });
            }
            if !is_finite(v) {
                return Err(Error::InvalidArgument(format!(
                    "non-finite entry at ({r}, {c})"
                )));
            }
        }
        items.sort_by_key(|&(r, c, _)| (r, c));
        let mut builder = RowBuilder::new(dim);
        let mut current_row = 0;
        let mut iter = items.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if (r2, c2) == (r, c) {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            while current_row < r {
                builder.finish_row();
                current_row += 1;
            }
            builder.push(c, v);
        }
        while current_row < dim {
            builder.finish_row();
            current_row += 1;
        }
        Ok(builder.build())
    }

    /// Row-major dense input; must be square.
    pub fn from_dense(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let dim = rows.len();
        let mut builder = RowBuilder::new(dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                builder.push(c, v);
            }
            builder.finish_row();
        }
        Ok(builder.build())
    }

    /// Dense real-valued input, convenient for fixtures.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex<T>>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| Complex::new(T::lit(x), T::zero()))
                    .collect()
            })
            .collect();
        Self::from_dense(&rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// All stored entries in `(row, col)` order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        if r >= self.dim {
            return Complex::zero();
        }
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(pos) => self.vals[span.start + pos],
            Err(_) => Complex::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex<T>>> {
        let mut out = vec![vec![Complex::zero(); self.dim]; self.dim];
        for (r, c, v) in self.entries() {
            out[r][c] = v;
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim)
            .map(|i| self.get(i, i))
            .fold(Complex::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.vals
            .iter()
            .fold(T::zero(), |acc, v| acc + v.norm_sqr())
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.vals.iter().fold(T::zero(), |acc, v| acc.max(v.norm()))
    }

    /// Frobenius inner product `Σ conj(self_ij) · other_ij`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let mut acc = Complex::zero();
        for r in 0..self.dim.min(other.dim) {
            let mut b = other.row(r).peekable();
            for (c, v) in self.row(r) {
                while let Some(&(cb, _)) = b.peek() {
                    if cb < c {
                        b.next();
                    } else {
                        break;
                    }
                }
                if let Some(&(cb, w)) = b.peek() {
                    if cb == c {
                        acc += v.conj() * w;
                    }
                }
            }
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.dim + 1];
        for &c in &self.cols {
            counts[c + 1] += 1;
        }
        for i in 0..self.dim {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut cols = vec![0; self.nnz()];
        let mut vals = vec![Complex::zero(); self.nnz()];
        for (r, c, v) in self.entries() {
            let slot = next[c];
            cols[slot] = r;
            vals[slot] = v;
            next[c] += 1;
        }
        Self {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        self.map_values(|v| v * factor)
    }

    pub fn map_values(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let mut builder = RowBuilder::new(self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                builder.push(c, f(v));
            }
            builder.finish_row();
        }
        builder.build()
    }

    /// `self + factor · other`, the workhorse behind `+` and `-`.
    pub fn axpy(&self, factor: Complex<T>, other: &Self) -> Result<Self> {
        check_same_dim(self, other)?;
        let mut builder = RowBuilder::new(self.dim);
        for r in 0..self.dim {
            let mut a = self.row(r).peekable();
            let mut b = other.row(r).peekable();
            loop {
                match (a.peek().copied(), b.peek().copied()) {
                    (Some((ca, va)), Some((cb, vb))) => {
                        if ca == cb {
                            builder.push(ca, va + factor * vb);
                            a.next();
                            b.next();
                        } else if ca < cb {
                            builder.push(ca, va);
                            a.next();
                        } else {
                            builder.push(cb, factor * vb);
                            b.next();
                        }
                    }
                    (Some((ca, va)), None) => {
                        builder.push(ca, va);
                        a.next();
                    }
                    (None, Some((cb, vb))) => {
                        builder.push(cb, factor * vb);
                        b.next();
                    }
                    (None, None) => break,
                }
            }
            builder.finish_row();
        }
        Ok(builder.build())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex::one(), other)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-Complex::<T>::one(), other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_same_dim(self, other)?;
        let n = self.dim;
        let mut acc = vec![Complex::<T>::zero(); n];
        let mut marker = vec![usize::MAX; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut builder = RowBuilder::new(n);
        for r in 0..n {
            touched.clear();
            for (k, av) in self.row(r) {
                for (c, bv) in other.row(k) {
                    if marker[c] != r {
                        marker[c] = r;
                        acc[c] = Complex::zero();
                        touched.push(c);
                    }
                    acc[c] += av * bv;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                builder.push(c, acc[c]);
            }
            builder.finish_row();
        }
        Ok(builder.build())
    }

    /// `self · v` for a dense vector.
    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|r| {
                self.row(r)
                    .fold(Complex::zero(), |acc, (c, x)| acc + x * v[c])
            })
            .collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.dim);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub(crate) fn from_parts(
        dim: usize,
        row_ptr: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<Complex<T>>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), dim + 1);
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }
}

pub(crate) fn check_same_dim<T: Real>(a: &SparseMatrix<T>, b: &SparseMatrix<T>) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

/// Appends rows in order; callers push columns in increasing order.
pub(crate) struct RowBuilder<T: Real> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex<T>>,
}

impl<T: Real> RowBuilder<T> {
    pub(crate) fn new(dim: usize) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        Self {
            dim,
            row_ptr,
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, col: usize, value: Complex<T>) {
        if keep(value) {
            debug_assert!(
                self.cols.len() == *self.row_ptr.last().unwrap()
                    || *self.cols.last().unwrap() < col
            );
            self.cols.push(col);
            self.vals.push(value);
        }
    }

    #[inline]
    pub(crate) fn finish_row(&mut self) {
        self.row_ptr.push(self.cols.len());
    }

    pub(crate) fn build(self) -> SparseMatrix<T> {
        debug_assert_eq!(self.row_ptr.len(), self.dim + 1);
        SparseMatrix::from_parts(self.dim, self.row_ptr, self.cols, self.vals)
    }
}

// Operator forms panic on dimension mismatch; the `try_*` methods report it.

impl<'a, T: Real> Add<&'a SparseMatrix<T>> for &'a SparseMatrix<T> {
    type Output = SparseMatrix<T>;

    fn add(self, rhs: &'a SparseMatrix<T>) -> SparseMatrix<T> {
        self.try_add(rhs)
            .expect("matrix addition dimension mismatch")
    }
}

impl<'a, T: Real> Sub<&'a SparseMatrix<T>> for &'a SparseMatrix<T> {
    type Output = SparseMatrix<T>;

    fn sub(self, rhs: &'a SparseMatrix<T>) -> SparseMatrix<T> {
        self.try_sub(rhs)
            .expect("matrix subtraction dimension mismatch")
    }
}

impl<'a, T: Real> Mul<&'a SparseMatrix<T>> for &'a SparseMatrix<T> {
    type Output = SparseMatrix<T>;

    fn mul(self, rhs: &'a SparseMatrix<T>) -> SparseMatrix<T> {
        self.try_mul(rhs)
            .expect("matrix product dimension mismatch")
    }
}

impl<T: Real> Mul<Complex<T>> for &SparseMatrix<T> {
    type Output = SparseMatrix<T>;

    fn mul(self, rhs: Complex<T>) -> SparseMatrix<T> {
        self.scale(rhs)
    }
}

impl<T: Real> Neg for &SparseMatrix<T> {
    type Output = SparseMatrix<T>;

    fn neg(self) -> SparseMatrix<T> {
        self.map_values(|v| -v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type M = SparseMatrix<f64>;

    #[test]
    fn triplets_are_sorted_and_merged() {
        let m = M::from_triplets(
            3,
            vec![
                (2, 0, cplx(1.0, 0.0)),
                (0, 1, cplx(2.0, 0.0)),
                (0, 1, cplx(0.5, 1.0)),
                (1, 1, cplx(1e-16, 0.0)),
            ],
        )
        .unwrap();
        let entries: Vec<_> = m.entries().collect();
        assert_eq!(entries.len(), 2);
        assert_eq!((entries[0].0, entries[0].1), (0, 1));
        assert_eq!(entries[0].2, cplx(2.5, 1.0));
        assert_eq!((entries[1].0, entries[1].1), (2, 0));
    }

    #[test]
    fn out_of_range_triplet_is_rejected() {
        let err = M::from_triplets(2, vec![(2, 0, cplx(1.0, 0.0))]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { .. }));
    }

    #[test]
    fn cancellation_prunes_entries() {
        let a = M::from_real(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        let d = &a - &a;
        assert!(d.is_zero());
    }

    #[test]
    fn product_matches_dense() {
        let a = M::from_real(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let b = M::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let p = &a * &b;
        assert_eq!(p, M::from_real(&[&[2.0, 1.0], &[4.0, 3.0]]).unwrap());
    }

    #[test]
    fn transpose_moves_entries() {
        let a = M::from_real(&[&[1.0, 2.0, 0.0], &[0.0, 0.0, 3.0], &[4.0, 0.0, 0.0]]).unwrap();
        let t = a.transpose();
        assert_eq!(t.get(1, 0), cplx(2.0, 0.0));
        assert_eq!(t.get(2, 1), cplx(3.0, 0.0));
        assert_eq!(t.get(0, 2), cplx(4.0, 0.0));
        assert_eq!(t.transpose(), a);
    }

    #[test]
    fn mismatched_dims_error() {
        let a = M::identity(2);
        let b = M::identity(3);
        assert_eq!(
            a.try_mul(&b).unwrap_err(),
            Error::DimensionMismatch { left: 2, right: 3 }
        );
    }
}
