//! Sparse complex linear algebra.

mod dense;
pub mod io;
mod ops;
mod report;
mod sparse;

pub use dense::{inverse, DenseLu, DENSE_LIMIT};
pub(crate) use ops::checked_pow;
pub use ops::{
    commutator, diagonal_of, embed, embed2, embed_on, is_diagonal, kron, kron_all,
    partial_trace_first, partial_transpose_second, proportionality, proportionality_fit,
    relative_residual, swap_blocks, zero_like,
};
pub use report::{all_passed, max_residual, CheckReport};
pub use sparse::{SparseMatrix, MAX_TOTAL_DIM};

/// Elementary matrix `e_ab` on `C²`, 1-based as in the usual notation.
pub fn elementary<T: crate::scalar::Real>(a: usize, b: usize) -> SparseMatrix<T> {
    assert!(
        (1..=2).contains(&a) && (1..=2).contains(&b),
        "e_ab needs a, b in 1..=2"
    );
    SparseMatrix::from_triplets(
        2,
        [(a - 1, b - 1, num_complex::Complex::new(T::one(), T::zero()))],
    )
    .expect("in-range elementary matrix")
}
