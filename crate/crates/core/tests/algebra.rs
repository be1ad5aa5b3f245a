use junction::hecke::solve_hecke;
use junction::hecke::JunctionParams;
use junction::integrable::{
    check_crossing, check_reflection, check_transfer_commutativity, k_matrix, r_matrix,
    spectral_pairs, spectral_samples, CrossingVariant, TransferContext,
};
use junction::linalg::{all_passed, kron, SparseMatrix};
use junction::qsym::{
    check_symmetry, check_uqsl2_coproduct, coproduct_rep, enumerate_index_sets, q_value,
    AlgebraElement, FRep, GeneratorRep, IndexSet, QPower, SymmetryRep,
};
use junction::tl_rep::{boundary_m, check_tl, u0_xxz, xxz_u, BoundaryParams, RepContext};
use num_complex::{Complex, Complex64};

fn all_subsets(n: usize) -> Vec<IndexSet> {
    (0u32..1 << n)
        .map(|bits| {
            let idx = (1..=n).filter(|i| bits >> (i - 1) & 1 == 1).collect();
            IndexSet::unrestricted(n, idx).unwrap()
        })
        .collect()
}

#[test]
fn complement_inverts_the_deformation() {
    for n in 1..=5 {
        let p = solve_hecke::<f64>(n, 0.6).unwrap();
        for s in all_subsets(n) {
            let prod = q_value(&s, &p).unwrap() * q_value(&s.complement(), &p).unwrap();
            assert!((prod - 1.0).norm() < 1e-12, "n={n} {s}");
        }
    }
}

#[test]
fn conjugate_set_inverts_when_it_is_the_complement() {
    let p = solve_hecke::<f64>(4, 0.6).unwrap();
    let mut checked = 0;
    for s in all_subsets(4) {
        if s.bar() == s.complement() {
            let prod = q_value(&s, &p).unwrap() * q_value(&s.bar(), &p).unwrap();
            assert!((prod - 1.0).norm() < 1e-12, "{s}");
            checked += 1;
        }
    }
    assert_eq!(checked, 4);
}

#[test]
fn iterated_coproduct_is_coassociative() {
    let p = solve_hecke::<f64>(3, 0.7).unwrap();
    for s in enumerate_index_sets(3) {
        let rep = FRep::new(s.clone(), &p).unwrap();
        let k = rep.image(AlgebraElement::QH(QPower::Half));
        let k_inv = rep.image(AlgebraElement::QH(QPower::MinusHalf));
        for x in [AlgebraElement::E, AlgebraElement::F] {
            let three = coproduct_rep(&rep, 3, x).unwrap();
            let two = coproduct_rep(&rep, 2, x).unwrap();
            let k2 = coproduct_rep(&rep, 2, AlgebraElement::QH(QPower::Half)).unwrap();
            let k2_inv = coproduct_rep(&rep, 2, AlgebraElement::QH(QPower::MinusHalf)).unwrap();
            let x1 = rep.image(x);
            let left = &kron(&two, &k).unwrap() + &kron(&k2_inv, &x1).unwrap();
            let right = &kron(&x1, &k2).unwrap() + &kron(&k_inv, &two).unwrap();
            assert!(
                (&three - &left).frobenius_norm() < 1e-13,
                "{s} {}",
                x.name()
            );
            assert!(
                (&three - &right).frobenius_norm() < 1e-13,
                "{s} {}",
                x.name()
            );
        }
    }
}

#[test]
fn coproduct_images_satisfy_the_quantum_algebra() {
    let p = solve_hecke::<f64>(3, 0.7).unwrap();
    for s in enumerate_index_sets(3) {
        let rep = FRep::new(s, &p).unwrap();
        let reports = check_uqsl2_coproduct(&rep, 3, 1e-12).unwrap();
        assert!(all_passed(&reports), "{reports:#?}");
    }
}

#[test]
fn single_precision_pipeline() {
    let p = solve_hecke::<f32>(3, 0.7).unwrap();
    assert!(p.max_residual() < 1e-5);
    let ctx = RepContext::new(p.clone(), 3).unwrap();
    assert!(all_passed(&check_tl(&ctx, 1e-5).unwrap()));
    let ctx2 = RepContext::new(p.clone(), 2).unwrap();
    let reps: Vec<SymmetryRep<f32>> = enumerate_index_sets(3)
        .into_iter()
        .map(|s| SymmetryRep::F(FRep::new(s, &p).unwrap()))
        .collect();
    assert!(all_passed(&check_symmetry(&ctx2, &reps, 1e-5).unwrap()));
}

#[test]
fn xxz_chain_crossing_and_commuting_transfer() {
    let mu = 0.7;
    let a = Complex64::from_polar(1.0, mu);
    let p = JunctionParams::from_a(mu, vec![a]).unwrap();
    let u = xxz_u(a).unwrap();
    let samples = spectral_samples(5, 7, mu);
    let eta = Complex::new(0.0, mu);
    let crossing =
        check_crossing(&u, &p, mu, eta, CrossingVariant::Twisted, &samples, 1e-10).unwrap();
    assert!(crossing.passed, "{crossing:?}");

    let ctx = RepContext::new(p.clone(), 4).unwrap();
    let q = Complex64::from_polar(1.0, 0.9);
    let zeta = Complex64::new(0.0, 0.3);
    let bp = BoundaryParams::new(q, zeta, p.q).unwrap();
    let tc = TransferContext::new(ctx, bp, Some(IndexSet::empty(1))).unwrap();
    let report = check_transfer_commutativity(&tc, &spectral_pairs(3, 7, mu), 1e-8).unwrap();
    assert!(report.passed, "{report:?}");
    // The single-copy boundary element is the usual XXZ blob generator.
    assert_eq!(
        boundary_m(&IndexSet::empty(1), q, &p).unwrap(),
        u0_xxz(q).unwrap()
    );
}

#[test]
fn reflection_fails_with_the_wrong_sandwich_scalar() {
    let mu = 0.7;
    let p = solve_hecke::<f64>(3, mu).unwrap();
    let u = junction::tl_rep::two_site_u(&p).unwrap();
    let q = Complex64::from_polar(1.0, 0.9);
    let zeta = Complex64::new(0.0, 0.3);
    let s = IndexSet::new(3, vec![2]).unwrap();
    let m = boundary_m(&s, q, &p).unwrap();
    let pairs = spectral_pairs(5, 42, mu);
    let run = |bp: BoundaryParams<f64>| {
        check_reflection(
            |l| r_matrix(l, &u, mu),
            |l| Ok(k_matrix(l, &m, &bp, mu)),
            &pairs,
            1e-9,
        )
        .unwrap()
    };
    let good = BoundaryParams::for_index_set(q, zeta, &s, &p).unwrap();
    assert!(run(good).passed);
    let wrong = good.with_kappa(good.kappa * 1.05);
    let report = run(wrong);
    assert!(!report.passed && report.residual > 1e-4, "{report:?}");
}

#[test]
fn trivial_boundary_k_is_scalar() {
    let mu = 0.7;
    let p = solve_hecke::<f64>(3, mu).unwrap();
    let bp = BoundaryParams::new(
        Complex64::from_polar(1.0, 0.9),
        Complex64::new(0.0, 0.3),
        p.q,
    )
    .unwrap();
    let id = SparseMatrix::<f64>::identity(8);
    for l in spectral_samples(4, 3, mu) {
        let k = k_matrix(l, &id, &bp, mu);
        let d = k.get(0, 0);
        assert_eq!(k, SparseMatrix::scalar(8, d));
    }
}
