//! Tensor-product machinery on [`SparseMatrix`].
//!
//! Basis convention: slot 0 of a tensor product is the most significant
//! digit, so `row = Σ_k i_k · d^(slots-1-k)`.

use num_complex::Complex;
use num_traits::One;

use super::sparse::{check_same_dim, RowBuilder, SparseMatrix, MAX_TOTAL_DIM};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) fn checked_dim(parts: &[usize], max: usize) -> Result<usize> {
    let total = parts
        .iter()
        .fold(1u128, |acc, &d| acc.saturating_mul(d as u128));
    if total > max as u128 {
        return Err(Error::DimensionOverflow { dim: total, max });
    }
    Ok(total as usize)
}

pub(crate) fn checked_pow(base: usize, exp: usize, max: usize) -> Result<usize> {
    let mut total = 1u128;
    for _ in 0..exp {
        total = total.saturating_mul(base as u128);
        if total > max as u128 {
            return Err(Error::DimensionOverflow { dim: total, max });
        }
    }
    Ok(total as usize)
}

pub fn kron<T: Real>(a: &SparseMatrix<T>, b: &SparseMatrix<T>) -> Result<SparseMatrix<T>> {
    let db = b.dim();
    let dim = checked_dim(&[a.dim(), db], MAX_TOTAL_DIM)?;
    let mut builder = RowBuilder::new(dim);
    for i in 0..a.dim() {
        for k in 0..db {
            for (j, av) in a.row(i) {
                for (l, bv) in b.row(k) {
                    builder.push(j * db + l, av * bv);
                }
            }
            builder.finish_row();
        }
    }
    Ok(builder.build())
}

/// Left fold of [`kron`] over a list of factors.
pub fn kron_all<T: Real>(factors: &[SparseMatrix<T>]) -> Result<SparseMatrix<T>> {
    let mut iter = factors.iter();
    let first = match iter.next() {
        Some(f) => f.clone(),
        None => return Ok(SparseMatrix::identity(1)),
    };
    iter.try_fold(first, |acc, f| kron(&acc, f))
}

/// `I^{⊗slot} ⊗ factor ⊗ I^{⊗rest}` where the factor may span several
/// consecutive slots (its dimension must be a power of `slot_dim`).
pub fn embed<T: Real>(
    factor: &SparseMatrix<T>,
    slot: usize,
    total_slots: usize,
    slot_dim: usize,
) -> Result<SparseMatrix<T>> {
    let width = span_of(factor.dim(), slot_dim)?;
    if slot + width > total_slots {
        return Err(Error::IndexOutOfRange {
            what: "slot",
            index: slot,
            valid: format!("0..={}", total_slots.saturating_sub(width)),
        });
    }
    let before = checked_pow(slot_dim, slot, MAX_TOTAL_DIM)?;
    let after = checked_pow(slot_dim, total_slots - slot - width, MAX_TOTAL_DIM)?;
    let left = kron(&SparseMatrix::identity(before), factor)?;
    kron(&left, &SparseMatrix::identity(after))
}

/// Places a two-slot operator on slots `(slot, slot + 1)`.
pub fn embed2<T: Real>(
    factor: &SparseMatrix<T>,
    slot: usize,
    total_slots: usize,
    slot_dim: usize,
) -> Result<SparseMatrix<T>> {
    if factor.dim() != slot_dim * slot_dim {
        return Err(Error::DimensionMismatch {
            left: factor.dim(),
            right: slot_dim * slot_dim,
        });
    }
    embed(factor, slot, total_slots, slot_dim)
}

/// Places an operator acting on `slots.len()` slots onto arbitrary,
/// possibly non-adjacent and reordered slots. The operator's first tensor
/// factor lands on `slots[0]`, and so on.
pub fn embed_on<T: Real>(
    op: &SparseMatrix<T>,
    slots: &[usize],
    total_slots: usize,
    slot_dim: usize,
) -> Result<SparseMatrix<T>> {
    let k = slots.len();
    let expected = checked_pow(slot_dim, k, MAX_TOTAL_DIM)?;
    if op.dim() != expected {
        return Err(Error::DimensionMismatch {
            left: op.dim(),
            right: expected,
        });
    }
    for (i, &s) in slots.iter().enumerate() {
        if s >= total_slots {
            return Err(Error::IndexOutOfRange {
                what: "slot",
                index: s,
                valid: format!("0..{total_slots}"),
            });
        }
        if slots[..i].contains(&s) {
            return Err(Error::InvalidArgument(format!("slot {s} listed twice")));
        }
    }
    let dim = checked_pow(slot_dim, total_slots, MAX_TOTAL_DIM)?;
    let weight = |s: usize| slot_dim.pow((total_slots - 1 - s) as u32);
    let weights: Vec<usize> = slots.iter().map(|&s| weight(s)).collect();

    let mut builder = RowBuilder::new(dim);
    let mut row_entries: Vec<(usize, Complex<T>)> = Vec::new();
    for r in 0..dim {
        let mut sub_r = 0;
        let mut base = r;
        for &w in &weights {
            let digit = (r / w) % slot_dim;
            sub_r = sub_r * slot_dim + digit;
            base -= digit * w;
        }
        row_entries.clear();
        for (sub_c, v) in op.row(sub_r) {
            let mut c = base;
            let mut rem = sub_c;
            for &w in weights.iter().rev() {
                c += (rem % slot_dim) * w;
                rem /= slot_dim;
            }
            row_entries.push((c, v));
        }
        row_entries.sort_unstable_by_key(|&(c, _)| c);
        for &(c, v) in &row_entries {
            builder.push(c, v);
        }
        builder.finish_row();
    }
    Ok(builder.build())
}

fn span_of(dim: usize, slot_dim: usize) -> Result<usize> {
    if slot_dim < 2 {
        return if dim == 1 {
            Ok(1)
        } else {
            Err(Error::InvalidArgument(
                "slot dimension must be at least 2".into(),
            ))
        };
    }
    let mut width = 0;
    let mut d = 1;
    while d < dim {
        d *= slot_dim;
        width += 1;
    }
    if d != dim || width == 0 {
        return Err(Error::NotDivisible {
            dim,
            factor: slot_dim,
        });
    }
    Ok(width)
}

pub fn commutator<T: Real>(a: &SparseMatrix<T>, b: &SparseMatrix<T>) -> Result<SparseMatrix<T>> {
    check_same_dim(a, b)?;
    (a * b).try_sub(&(b * a))
}

/// Least-squares scalar `c` minimising `‖a − c·b‖_F`, returned only when the
/// relative misfit is within `tol`.
pub fn proportionality<T: Real>(
    a: &SparseMatrix<T>,
    b: &SparseMatrix<T>,
    tol: T,
) -> Result<Option<Complex<T>>> {
    let (c, misfit) = proportionality_fit(a, b)?;
    Ok(c.filter(|_| misfit <= tol))
}

/// The fitted ratio and its relative misfit `‖a − c·b‖_F / ‖a‖_F`.
pub fn proportionality_fit<T: Real>(
    a: &SparseMatrix<T>,
    b: &SparseMatrix<T>,
) -> Result<(Option<Complex<T>>, T)> {
    check_same_dim(a, b)?;
    let bb = b.inner(b).re;
    if bb <= T::zero() {
        return Ok((None, T::infinity()));
    }
    let c = b.inner(a) / bb;
    let misfit = a.axpy(-c, b)?.frobenius_norm();
    let scale = a.frobenius_norm();
    let rel = if scale > T::zero() {
        misfit / scale
    } else {
        misfit
    };
    Ok((Some(c), rel))
}

/// `tr_1` over the leading factor of dimension `d_first`.
pub fn partial_trace_first<T: Real>(
    m: &SparseMatrix<T>,
    d_first: usize,
) -> Result<SparseMatrix<T>> {
    let rest = split_dim(m.dim(), d_first)?;
    SparseMatrix::from_triplets(
        rest,
        m.entries().filter_map(|(r, c, v)| {
            let (i, j) = (r / rest, r % rest);
            let (k, l) = (c / rest, c % rest);
            (i == k).then_some((j, l, v))
        }),
    )
}

/// Transposes the indices of the trailing factor only.
pub fn partial_transpose_second<T: Real>(
    m: &SparseMatrix<T>,
    d_first: usize,
) -> Result<SparseMatrix<T>> {
    let rest = split_dim(m.dim(), d_first)?;
    SparseMatrix::from_triplets(
        m.dim(),
        m.entries().map(|(r, c, v)| {
            let (i, j) = (r / rest, r % rest);
            let (k, l) = (c / rest, c % rest);
            (i * rest + l, k * rest + j, v)
        }),
    )
}

fn split_dim(dim: usize, d_first: usize) -> Result<usize> {
    if d_first == 0 || !dim.is_multiple_of(d_first) {
        return Err(Error::NotDivisible {
            dim,
            factor: d_first,
        });
    }
    Ok(dim / d_first)
}

/// The permutation `|i, j⟩ ↦ |j, i⟩` on `C^d ⊗ C^d`.
pub fn swap_blocks<T: Real>(d: usize) -> Result<SparseMatrix<T>> {
    let dim = checked_dim(&[d, d], MAX_TOTAL_DIM)?;
    SparseMatrix::from_triplets(
        dim,
        (0..d).flat_map(|i| (0..d).map(move |j| (j * d + i, i * d + j, Complex::one()))),
    )
}

/// `‖x‖_F / max(1, ‖reference‖_F)`.
pub fn relative_residual<T: Real>(x: &SparseMatrix<T>, reference: &SparseMatrix<T>) -> f64 {
    let scale = reference.frobenius_norm().max(T::one());
    (x.frobenius_norm() / scale)
        .to_f64()
        .unwrap_or(f64::INFINITY)
}

pub fn is_diagonal<T: Real>(m: &SparseMatrix<T>) -> bool {
    m.entries().all(|(r, c, _)| r == c)
}

pub fn diagonal_of<T: Real>(m: &SparseMatrix<T>) -> Vec<Complex<T>> {
    (0..m.dim()).map(|i| m.get(i, i)).collect()
}

pub fn zero_like<T: Real>(m: &SparseMatrix<T>) -> SparseMatrix<T> {
    SparseMatrix::zeros(m.dim())
}
