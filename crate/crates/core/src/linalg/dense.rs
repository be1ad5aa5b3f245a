//! Dense LU with partial pivoting, used only for matrix inversion.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::sparse::{RowBuilder, SparseMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest dimension accepted by dense inversion.
pub const DENSE_LIMIT: usize = 4096;

pub struct DenseLu<T: Real> {
    dim: usize,
    /// Row-major packed L (unit diagonal, below) and U (on and above).
    lu: Vec<Complex<T>>,
    perm: Vec<usize>,
    norm1: T,
}

impl<T: Real> DenseLu<T> {
    pub fn factor(m: &SparseMatrix<T>) -> Result<Self> {
        let n = m.dim();
        if n > DENSE_LIMIT {
            return Err(Error::TooLargeForDense {
                dim: n,
                limit: DENSE_LIMIT,
            });
        }
        let mut lu = vec![Complex::<T>::zero(); n * n];
        let mut col_sums = vec![T::zero(); n];
        for (r, c, v) in m.entries() {
            lu[r * n + c] = v;
            col_sums[c] += v.norm();
        }
        let norm1 = col_sums.into_iter().fold(T::zero(), T::max);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pivot_row, pivot_abs) = (k..n).map(|r| (r, lu[r * n + k].norm())).fold(
                (k, T::neg_infinity()),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
            if pivot_abs <= T::zero() {
                return Err(Error::Singular {
                    condition: f64::INFINITY,
                });
            }
            if pivot_row != k {
                for c in 0..n {
                    lu.swap(k * n + c, pivot_row * n + c);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu[k * n + k];
            let (upper, lower) = lu.split_at_mut((k + 1) * n);
            let pivot_row_vals = &upper[k * n..];
            for r in 0..(n - k - 1) {
                let row = &mut lower[r * n..(r + 1) * n];
                let factor = row[k] / pivot;
                row[k] = factor;
                if factor.is_zero() {
                    continue;
                }
                for c in (k + 1)..n {
                    row[c] -= factor * pivot_row_vals[c];
                }
            }
        }
        Ok(Self {
            dim: n,
            lu,
            perm,
            norm1,
        })
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let n = self.dim;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: b.len(),
            });
        }
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let row = &self.lu[r * n..r * n + r];
            let s = row
                .iter()
                .zip(&x[..r])
                .fold(Complex::zero(), |acc, (&l, &v)| acc + l * v);
            x[r] -= s;
        }
        for r in (0..n).rev() {
            let row = &self.lu[r * n + r + 1..(r + 1) * n];
            let s = row
                .iter()
                .zip(&x[r + 1..])
                .fold(Complex::zero(), |acc, (&l, &v)| acc + l * v);
            x[r] = (x[r] - s) / self.lu[r * n + r];
        }
        Ok(x)
    }

    /// Inverse together with the condition estimate `‖A‖₁ · ‖A⁻¹‖₁`.
    pub fn inverse_with_condition(&self) -> Result<(SparseMatrix<T>, T)> {
        let n = self.dim;
        let mut columns = Vec::with_capacity(n);
        let mut e = vec![Complex::<T>::zero(); n];
        let mut inv_norm1 = T::zero();
        for c in 0..n {
            e[c] = Complex::one();
            let col = self.solve(&e)?;
            e[c] = Complex::zero();
            inv_norm1 = inv_norm1.max(col.iter().fold(T::zero(), |acc, v| acc + v.norm()));
            columns.push(col);
        }
        let mut builder = RowBuilder::new(n);
        for r in 0..n {
            for (c, col) in columns.iter().enumerate() {
                builder.push(c, col[r]);
            }
            builder.finish_row();
        }
        Ok((builder.build(), self.norm1 * inv_norm1))
    }
}

/// Dense inverse; refuses matrices whose condition estimate exceeds
/// [`Real::max_condition`].
pub fn inverse<T: Real>(m: &SparseMatrix<T>) -> Result<SparseMatrix<T>> {
    let (inv, condition) = DenseLu::factor(m)?.inverse_with_condition()?;
    if !condition.is_finite() || condition > T::max_condition() {
        return Err(Error::Singular {
            condition: condition.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type M = SparseMatrix<f64>;

    #[test]
    fn identity_inverse() {
        assert_eq!(inverse(&M::identity(5)).unwrap(), M::identity(5));
    }

    #[test]
    fn diagonal_inverse() {
        let d = M::diagonal(&[cplx(2.0, 0.0), cplx(0.0, 1.0)]);
        let inv = inverse(&d).unwrap();
        assert_eq!(inv, M::diagonal(&[cplx(0.5, 0.0), cplx(0.0, -1.0)]));
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = M::from_real(&[&[0.0, 1.0, 2.0], &[3.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]).unwrap();
        let inv = inverse(&a).unwrap();
        let residual = (&(&a * &inv) - &M::identity(3)).frobenius_norm();
        assert!(residual < 1e-14);
    }

    #[test]
    fn singular_is_reported() {
        let a = M::from_real(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(inverse(&a), Err(Error::Singular { .. })));
        let nearly = M::from_real(&[&[1.0, 1.0], &[1.0, 1.0 + 1e-15]]).unwrap();
        assert!(matches!(inverse(&nearly), Err(Error::Singular { .. })));
    }

    #[test]
    fn too_large_is_refused() {
        let big = M::identity(DENSE_LIMIT + 1);
        assert!(matches!(inverse(&big), Err(Error::TooLargeForDense { .. })));
    }
}
