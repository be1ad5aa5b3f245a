//! Hand-expanded reference data for n = 3 and n = 4.

use junction::hecke::{solve_hecke, JunctionParams};
use junction::linalg::{elementary, kron_all, SparseMatrix};
use junction::qsym::{
    coproduct_rep, enumerate_index_sets, q_value, AlgebraElement, FRep, IndexSet,
};
use junction::tl_rep::RepContext;
use num_complex::Complex64;

type M = SparseMatrix<f64>;

/// Six-slot elementary tensor from a string like "12 12 22 22 22 12".
fn tensor(word: &str) -> M {
    let factors: Vec<M> = word
        .split_whitespace()
        .map(|p| {
            let b = p.as_bytes();
            elementary((b[0] - b'0') as usize, (b[1] - b'0') as usize)
        })
        .collect();
    kron_all(&factors).unwrap()
}

fn monomial(a: &[Complex64], exps: [i32; 3]) -> Complex64 {
    a.iter().zip(exps).map(|(&x, e)| x.powi(e)).product()
}

/// One term `sign · a^exps · q0^{±½} · tensor`.
struct Term {
    sign: f64,
    exps: [i32; 3],
    half: bool,
    word: &'static str,
}

const fn t(sign: f64, exps: [i32; 3], half: bool, word: &'static str) -> Term {
    Term {
        sign,
        exps,
        half,
        word,
    }
}

/// `Θ(𝕌_1) · f_0^{⊗2}(Δ(e))` for n = 3 with `q0` left free; `half` marks the
/// `q0^{½}` terms. Entries 4 and 12 carry corrected factor patterns.
const EXPANSION: [Term; 16] = [
    t(1.0, [0, 0, 0], true, "12 12 12 22 22 22"),
    t(1.0, [0, 0, 0], false, "22 22 22 12 12 12"),
    t(-1.0, [0, 0, -1], true, "12 12 22 22 22 12"),
    t(-1.0, [0, 0, 1], false, "22 22 12 12 12 22"),
    t(-1.0, [0, -1, 0], true, "12 22 12 22 12 22"),
    t(-1.0, [0, 1, 0], false, "22 12 22 12 22 12"),
    t(1.0, [0, -1, -1], true, "12 22 22 22 12 12"),
    t(1.0, [0, 1, 1], false, "22 12 12 12 22 22"),
    t(-1.0, [-1, 0, 0], true, "22 12 12 12 22 22"),
    t(-1.0, [1, 0, 0], false, "12 22 22 22 12 12"),
    t(1.0, [-1, 0, -1], true, "22 12 22 12 22 12"),
    t(1.0, [1, 0, 1], false, "12 22 12 22 12 22"),
    t(1.0, [-1, -1, 0], true, "22 22 12 12 12 22"),
    t(1.0, [1, 1, 0], false, "12 12 22 22 22 12"),
    t(-1.0, [-1, -1, -1], true, "22 22 22 12 12 12"),
    t(-1.0, [1, 1, 1], false, "12 12 12 22 22 22"),
];

fn theta_times_delta_e(params: &JunctionParams<f64>, q0: Complex64) -> M {
    let ctx = RepContext::new(params.clone(), 2).unwrap();
    let rep = FRep::with_deformation(IndexSet::empty(3), q0);
    let delta_e = coproduct_rep(&rep, 2, AlgebraElement::E).unwrap();
    &ctx.junction_u(1).unwrap() * &delta_e
}

fn expected(params: &JunctionParams<f64>, q0: Complex64) -> M {
    let root = q0.sqrt();
    EXPANSION.iter().fold(M::zeros(64), |acc, term| {
        let q_part = if term.half { root } else { root.inv() };
        let c = monomial(&params.a, term.exps) * q_part * term.sign;
        acc.axpy(c, &tensor(term.word)).unwrap()
    })
}

#[test]
fn theta_delta_e_matches_sixteen_term_expansion_for_free_q0() {
    let params = solve_hecke::<f64>(3, 0.7).unwrap();
    for q0 in [
        Complex64::new(4.0, 0.0),
        Complex64::from_polar(1.0, 1.3),
        Complex64::new(0.3, -2.0),
    ] {
        let got = theta_times_delta_e(&params, q0);
        let want = expected(&params, q0);
        let diff = (&got - &want).frobenius_norm();
        assert!(
            diff < 1e-13 * want.frobenius_norm(),
            "q0 = {q0}: diff {diff:e}"
        );
        assert_eq!(got.nnz(), 8, "terms pair up on eight positions");
    }
}

#[test]
fn expansion_vanishes_at_the_product_of_weights() {
    let params = solve_hecke::<f64>(3, 0.7).unwrap();
    let q0 = params.a.iter().product::<Complex64>();
    let got = theta_times_delta_e(&params, q0);
    assert!(got.frobenius_norm() < 1e-13, "{:e}", got.frobenius_norm());
    let derived = q_value(&IndexSet::empty(3), &params).unwrap();
    assert!((derived - q0).norm() < 1e-15);
}

fn n4_table(a: &[Complex64]) -> Vec<(Vec<usize>, Complex64)> {
    let [a1, a2, a3, a4] = [a[0], a[1], a[2], a[3]];
    vec![
        (vec![], -a1 * a2 * a3 * a4),
        (vec![1], -a2 * a3 * a4 / a1),
        (vec![2], -a1 * a3 * a4 / a2),
        (vec![3], -a1 * a2 * a4 / a3),
        (vec![4], -a1 * a2 * a3 / a4),
        (vec![3, 4], -a1 * a2 / (a3 * a4)),
        (vec![2, 4], -a1 * a3 / (a2 * a4)),
        (vec![2, 3], -a1 * a4 / (a2 * a3)),
    ]
}

#[test]
fn n4_deformation_table() {
    let params = solve_hecke::<f64>(4, 0.5).unwrap();
    let table = n4_table(&params.a);
    let sets = enumerate_index_sets(4);
    assert_eq!(sets.len(), table.len());
    for (idx, want) in table {
        let s = IndexSet::new(4, idx).unwrap();
        assert!(sets.contains(&s));
        let got = q_value(&s, &params).unwrap();
        assert!((got - want).norm() < 1e-12, "{s}: {got} vs {want}");
    }
}

#[test]
fn n4_generator_patterns() {
    let params = solve_hecke::<f64>(4, 0.5).unwrap();
    // Raising pattern per set: positions in the set carry e_21.
    let cases: [(&[usize], &str); 8] = [
        (&[], "12 12 12 12"),
        (&[1], "21 12 12 12"),
        (&[2], "12 21 12 12"),
        (&[3], "12 12 21 12"),
        (&[4], "12 12 12 21"),
        (&[3, 4], "12 12 21 21"),
        (&[2, 4], "12 21 12 21"),
        (&[2, 3], "12 21 21 12"),
    ];
    for (idx, word) in cases {
        let rep = FRep::new(IndexSet::new(4, idx.to_vec()).unwrap(), &params).unwrap();
        let e = tensor(word);
        let lowered: String = word
            .split_whitespace()
            .map(|p| p.chars().rev().collect::<String>())
            .collect::<Vec<_>>()
            .join(" ");
        let f = tensor(&lowered);
        assert_eq!(rep.e(), e, "{idx:?}");
        assert_eq!(rep.f(), f, "{idx:?}");
        let h = &(&e * &f) - &(&f * &e);
        assert_eq!(&rep.h1() - &rep.h2(), h, "{idx:?}");
    }
}

#[test]
fn index_set_counts() {
    assert_eq!(enumerate_index_sets(3).len(), 4);
    assert_eq!(enumerate_index_sets(4).len(), 8);
    assert_eq!(enumerate_index_sets(5).len(), 16);
}
