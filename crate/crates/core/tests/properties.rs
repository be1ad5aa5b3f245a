use junction::linalg::io::{from_coordinate, from_json, to_coordinate, to_json};
use junction::linalg::{
    embed, kron, partial_trace_first, partial_transpose_second, swap_blocks, SparseMatrix,
};
use num_complex::Complex64;
use proptest::prelude::*;

type M = SparseMatrix<f64>;

fn close(a: &M, b: &M, tol: f64) -> bool {
    let scale = a.frobenius_norm().max(b.frobenius_norm()).max(1.0);
    (a - b).frobenius_norm() <= tol * scale
}

/// Square matrices of the given size with roughly half the entries zero.
fn matrix(dim: usize) -> impl Strategy<Value = M> {
    prop::collection::vec((any::<bool>(), -2.0..2.0f64, -2.0..2.0f64), dim * dim).prop_map(
        move |cells| {
            let triplets = cells
                .into_iter()
                .enumerate()
                .filter(|&(_, (keep, _, _))| keep)
                .map(|(k, (_, re, im))| (k / dim, k % dim, Complex64::new(re, im)));
            M::from_triplets(dim, triplets).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_is_associative(a in matrix(2), b in matrix(3), c in matrix(2)) {
        let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-14));
    }

    #[test]
    fn kron_mixed_product(a in matrix(2), b in matrix(3), c in matrix(2), d in matrix(3)) {
        let left = &kron(&a, &b).unwrap() * &kron(&c, &d).unwrap();
        let right = kron(&(&a * &c), &(&b * &d)).unwrap();
        prop_assert!(close(&left, &right, 1e-13));
    }

    #[test]
    fn swap_conjugation_exchanges_factors(a in matrix(2), b in matrix(2)) {
        let p = swap_blocks::<f64>(2).unwrap();
        let swapped = &(&p * &kron(&a, &b).unwrap()) * &p;
        prop_assert!(close(&swapped, &kron(&b, &a).unwrap(), 1e-14));
    }

    #[test]
    fn partial_trace_keeps_the_trace(a in matrix(2), b in matrix(3)) {
        let ab = kron(&a, &b).unwrap();
        let reduced = partial_trace_first(&ab, 2).unwrap();
        prop_assert!((reduced.trace() - ab.trace()).norm() < 1e-12);
        prop_assert!(close(&reduced, &b.scale(a.trace()), 1e-13));
    }

    #[test]
    fn partial_transpose_is_an_involution(m in matrix(4)) {
        let once = partial_transpose_second(&m, 2).unwrap();
        prop_assert!(close(&partial_transpose_second(&once, 2).unwrap(), &m, 0.0));
    }

    #[test]
    fn json_round_trip_is_exact(m in matrix(4)) {
        prop_assert_eq!(from_json::<f64>(&to_json(&m)).unwrap(), m);
    }

    #[test]
    fn coordinate_round_trip_is_exact(m in matrix(3)) {
        prop_assert_eq!(from_coordinate::<f64>(&to_coordinate(&m)).unwrap(), m);
    }

    #[test]
    fn embeddings_on_distinct_slots_commute(a in matrix(2), b in matrix(2), i in 0usize..3, j in 0usize..3) {
        prop_assume!(i != j);
        let x = embed(&a, i, 3, 2).unwrap();
        let y = embed(&b, j, 3, 2).unwrap();
        prop_assert!(close(&(&x * &y), &(&y * &x), 1e-14));
    }

    #[test]
    fn stored_entries_are_sorted_and_nonzero(m in matrix(5)) {
        let coords: Vec<(usize, usize)> = m.entries().map(|(r, c, _)| (r, c)).collect();
        prop_assert!(coords.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(m.entries().all(|(_, _, v)| v.norm() > 0.0));
    }
}
