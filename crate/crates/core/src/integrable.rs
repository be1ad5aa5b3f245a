//! Baxterized R matrices, crossing data, K matrices and the open-chain
//! transfer matrix built from a junction representation.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hecke::JunctionParams;
use crate::linalg::{
    checked_pow, commutator, embed_on, inverse, kron, kron_all, partial_trace_first,
    partial_transpose_second, proportionality_fit, swap_blocks, CheckReport, SparseMatrix,
};
use crate::qsym::{
    charge_coproduct, coproduct_rep, enumerate_index_sets, scaled_residual, AlgebraElement, FRep,
    IndexSet,
};
use crate::scalar::{principal_pow, Real};
use crate::tl_rep::{boundary_m, BoundaryParams, RepContext};

/// Samples closer than this to a zero of `sinh(x ± iμ)` are rejected.
const POLE_MARGIN: f64 = 0.1;

fn i_times<T: Real>(x: T) -> Complex<T> {
    Complex::new(T::zero(), x)
}

fn fmt_complex<T: Real>(z: Complex<T>) -> String {
    let re = z.re.to_f64().unwrap_or(f64::NAN);
    let im = z.im.to_f64().unwrap_or(f64::NAN);
    format!("{re:e}{:+e}i", im)
}

fn site_dim_of<T: Real>(u: &SparseMatrix<T>) -> Result<usize> {
    let d = (u.dim() as f64).sqrt().round() as usize;
    if d * d != u.dim() {
        return Err(Error::NotDivisible {
            dim: u.dim(),
            factor: d.max(1),
        });
    }
    Ok(d)
}

/// `sinh(iμ + λ) sinh(iμ − λ)`.
pub fn unitarity_scalar<T: Real>(lambda: Complex<T>, mu: T) -> Complex<T> {
    let imu = i_times(mu);
    (imu + lambda).sinh() * (imu - lambda).sinh()
}

fn near_pole<T: Real>(x: Complex<T>, mu: T) -> bool {
    let imu = i_times(mu);
    let margin = T::lit(POLE_MARGIN);
    (x + imu).sinh().norm() < margin || (x - imu).sinh().norm() < margin
}

/// Seeded spectral parameters in `[−1, 1] × i[−1, 1]`, away from poles.
pub fn spectral_samples<T: Real>(count: usize, seed: u64, mu: T) -> Vec<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = Complex::new(
            T::lit(rng.gen_range(-1.0..1.0)),
            T::lit(rng.gen_range(-1.0..1.0)),
        );
        if !near_pole(z, mu) && !near_pole(z + z, mu) {
            out.push(z);
        }
    }
    out
}

/// Seeded pairs `(λ_1, λ_2)` with `λ_1 ± λ_2` also away from poles.
pub fn spectral_pairs<T: Real>(count: usize, seed: u64, mu: T) -> Vec<(Complex<T>, Complex<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        Complex::new(
            T::lit(rng.gen_range(-1.0..1.0)),
            T::lit(rng.gen_range(-1.0..1.0)),
        )
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (a, b) = (draw(), draw());
        let probes = [a, b, a + b, a - b, a + a, b + b];
        if probes.iter().all(|&p| !near_pole(p, mu)) {
            out.push((a, b));
        }
    }
    out
}

/// `Ř(λ) = sinh(λ + iμ) I + sinh(λ) u`.
pub fn r_check<T: Real>(lambda: Complex<T>, u: &SparseMatrix<T>, mu: T) -> SparseMatrix<T> {
    SparseMatrix::scalar(u.dim(), (lambda + i_times(mu)).sinh())
        .axpy(lambda.sinh(), u)
        .expect("same dimension")
}

/// `R(λ) = 𝒫 Ř(λ)`.
pub fn r_matrix<T: Real>(
    lambda: Complex<T>,
    u: &SparseMatrix<T>,
    mu: T,
) -> Result<SparseMatrix<T>> {
    let p = swap_blocks(site_dim_of(u)?)?;
    p.try_mul(&r_check(lambda, u, mu))
}

/// `Ř_12(λ_1−λ_2) Ř_23(λ_1) Ř_12(λ_2) = Ř_23(λ_2) Ř_12(λ_1) Ř_23(λ_1−λ_2)`
/// on three sites; the residual is the worst `‖L − R‖/‖L‖`.
pub fn check_ybe<T: Real>(
    u: &SparseMatrix<T>,
    mu: T,
    samples: &[(Complex<T>, Complex<T>)],
    tol: f64,
) -> Result<CheckReport> {
    let d = site_dim_of(u)?;
    checked_pow(d, 3, crate::linalg::MAX_TOTAL_DIM)?;
    let id = SparseMatrix::identity(d);
    let r12 = |l: Complex<T>| kron(&r_check(l, u, mu), &id);
    let r23 = |l: Complex<T>| kron(&id, &r_check(l, u, mu));
    let residuals: Vec<f64> = samples
        .par_iter()
        .map(|&(l1, l2)| -> Result<f64> {
            let lhs = &(&r12(l1 - l2)? * &r23(l1)?) * &r12(l2)?;
            let rhs = &(&r23(l2)? * &r12(l1)?) * &r23(l1 - l2)?;
            Ok(relative_to(&lhs.try_sub(&rhs)?, &lhs))
        })
        .collect::<Result<_>>()?;
    Ok(CheckReport::new("ybe", worst(&residuals), tol).with("samples", samples.len().to_string()))
}

fn relative_to<T: Real>(x: &SparseMatrix<T>, reference: &SparseMatrix<T>) -> f64 {
    let scale = reference.frobenius_norm();
    let num = x.frobenius_norm();
    let r = if scale > T::zero() { num / scale } else { num };
    r.to_f64().unwrap_or(f64::INFINITY)
}

fn worst(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc: f64, &v| {
        if v.is_nan() {
            f64::INFINITY
        } else {
            acc.max(v)
        }
    })
}

/// `R_12(λ) R_21(−λ) = sinh(iμ+λ) sinh(iμ−λ) I`. The residual combines the
/// proportionality misfit and the deviation of the fitted scalar.
pub fn check_unitarity<T: Real>(
    u: &SparseMatrix<T>,
    mu: T,
    samples: &[Complex<T>],
    tol: f64,
) -> Result<CheckReport> {
    let d = site_dim_of(u)?;
    let p = swap_blocks(d)?;
    let id = SparseMatrix::identity(u.dim());
    let mut residuals = Vec::with_capacity(samples.len());
    let mut report_meta = Vec::new();
    for (k, &l) in samples.iter().enumerate() {
        let r12 = r_matrix(l, u, mu)?;
        let r21_neg = &(&p * &r_matrix(-l, u, mu)?) * &p;
        let prod = &r12 * &r21_neg;
        let (scalar, misfit) = proportionality_fit(&prod, &id)?;
        let expected = unitarity_scalar(l, mu);
        let scalar = scalar.unwrap_or_else(Complex::zero);
        let dev = (scalar - expected).norm() / expected.norm().max(T::one());
        residuals.push(misfit.max(dev).to_f64().unwrap_or(f64::INFINITY));
        report_meta.push((format!("scalar_{k}"), fmt_complex(scalar)));
    }
    Ok(CheckReport::new("unitarity", worst(&residuals), tol)
        .with_all(report_meta)
        .with("samples", samples.len().to_string()))
}

/// The crossing matrix variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CrossingVariant {
    /// `⊗ antidiag(a_i^{−½}, a_i^{½})`.
    Plain,
    /// `⊗ [[0, a_i^{−½}], [−a_i^{½}, 0]]`, the plain matrix times `σ^z`.
    Twisted,
}

impl CrossingVariant {
    pub fn name(self) -> &'static str {
        match self {
            CrossingVariant::Plain => "plain",
            CrossingVariant::Twisted => "twisted",
        }
    }
}

fn crossing_factor<T: Real>(a: Complex<T>, variant: CrossingVariant) -> Result<SparseMatrix<T>> {
    let half = principal_pow(a, T::lit(0.5));
    let lower = match variant {
        CrossingVariant::Plain => half,
        CrossingVariant::Twisted => -half,
    };
    SparseMatrix::from_triplets(2, [(0, 1, half.inv()), (1, 0, lower)])
}

pub fn v_matrix_variant<T: Real>(
    params: &JunctionParams<T>,
    variant: CrossingVariant,
) -> Result<SparseMatrix<T>> {
    let factors: Vec<SparseMatrix<T>> = params
        .a
        .iter()
        .map(|&a| crossing_factor(a, variant))
        .collect::<Result<_>>()?;
    kron_all(&factors)
}

pub fn v_matrix<T: Real>(params: &JunctionParams<T>) -> Result<SparseMatrix<T>> {
    v_matrix_variant(params, CrossingVariant::Plain)
}

/// `M = Vᵗ V`; identical for both variants.
pub fn m_matrix<T: Real>(params: &JunctionParams<T>) -> Result<SparseMatrix<T>> {
    let v = v_matrix(params)?;
    v.transpose().try_mul(&v)
}

/// `R_12(λ) ∝ V_1 R_12^{t_2}(−λ−η) V_1`, worst proportionality misfit.
pub fn check_crossing<T: Real>(
    u: &SparseMatrix<T>,
    params: &JunctionParams<T>,
    mu: T,
    eta: Complex<T>,
    variant: CrossingVariant,
    samples: &[Complex<T>],
    tol: f64,
) -> Result<CheckReport> {
    let d = site_dim_of(u)?;
    let v1 = kron(
        &v_matrix_variant(params, variant)?,
        &SparseMatrix::identity(d),
    )?;
    let mut residuals = Vec::with_capacity(samples.len());
    let mut meta = Vec::new();
    for (k, &l) in samples.iter().enumerate() {
        let lhs = r_matrix(l, u, mu)?;
        let crossed = partial_transpose_second(&r_matrix(-l - eta, u, mu)?, d)?;
        let rhs = &(&v1 * &crossed) * &v1;
        let (scalar, misfit) = proportionality_fit(&lhs, &rhs)?;
        residuals.push(misfit.to_f64().unwrap_or(f64::INFINITY));
        if let Some(c) = scalar {
            meta.push((format!("scalar_{k}"), fmt_complex(c)));
        }
    }
    Ok(CheckReport::new("crossing", worst(&residuals), tol)
        .with("eta", fmt_complex(eta))
        .with("variant", variant.name())
        .with_all(meta))
}

/// Candidate crossing shifts `iμ`, `i`, `iπ − iμ`.
pub fn crossing_shifts<T: Real>(mu: T) -> Vec<(String, Complex<T>)> {
    vec![
        ("i*mu".to_string(), i_times(mu)),
        ("i".to_string(), i_times(T::one())),
        ("i*pi-i*mu".to_string(), i_times(T::PI() - mu)),
    ]
}

/// Every shift against both variants. Each report names its shift; the
/// passing combinations identify the crossing convention.
pub fn crossing_scan<T: Real>(
    u: &SparseMatrix<T>,
    params: &JunctionParams<T>,
    mu: T,
    samples: &[Complex<T>],
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (label, eta) in crossing_shifts(mu) {
        for variant in [CrossingVariant::Plain, CrossingVariant::Twisted] {
            out.push(
                check_crossing(u, params, mu, eta, variant, samples, tol)?
                    .with("eta_label", label.clone()),
            );
        }
    }
    Ok(out)
}

/// `x(λ) = −δ_0 cosh(2λ + iμ) − κ cosh(2λ) − cosh(2iζ)`.
pub fn k_x<T: Real>(lambda: Complex<T>, bp: &BoundaryParams<T>, mu: T) -> Complex<T> {
    let two = T::lit(2.0);
    let two_l = lambda.scale(two);
    -bp.delta0 * (two_l + i_times(mu)).cosh()
        - bp.kappa * two_l.cosh()
        - (Complex::new(T::zero(), two) * bp.zeta).cosh()
}

/// `y(λ) = 2 sinh(2λ) sinh(iμ)`.
pub fn k_y<T: Real>(lambda: Complex<T>, mu: T) -> Complex<T> {
    let two = T::lit(2.0);
    lambda.scale(two).sinh() * i_times(mu).sinh() * two
}

/// `K(λ) = x(λ) I + y(λ) u0`.
pub fn k_matrix<T: Real>(
    lambda: Complex<T>,
    u0: &SparseMatrix<T>,
    bp: &BoundaryParams<T>,
    mu: T,
) -> SparseMatrix<T> {
    SparseMatrix::scalar(u0.dim(), k_x(lambda, bp, mu))
        .axpy(k_y(lambda, mu), u0)
        .expect("same dimension")
}

/// `R_12(λ_1−λ_2) K_1(λ_1) R_21(λ_1+λ_2) K_2(λ_2)
///   = K_2(λ_2) R_12(λ_1+λ_2) K_1(λ_1) R_21(λ_1−λ_2)`
/// with `R_21 = 𝒫 R_12 𝒫`.
pub fn check_reflection<T: Real>(
    r_builder: impl Fn(Complex<T>) -> Result<SparseMatrix<T>> + Sync,
    k_builder: impl Fn(Complex<T>) -> Result<SparseMatrix<T>> + Sync,
    samples: &[(Complex<T>, Complex<T>)],
    tol: f64,
) -> Result<CheckReport> {
    let residuals: Vec<f64> = samples
        .par_iter()
        .map(|&(l1, l2)| -> Result<f64> {
            let k1 = k_builder(l1)?;
            let k2 = k_builder(l2)?;
            let d = k1.dim();
            let p = swap_blocks(d)?;
            let id = SparseMatrix::identity(d);
            let r12 = |l| r_builder(l);
            let r21 = |l| -> Result<SparseMatrix<T>> { Ok(&(&p * &r_builder(l)?) * &p) };
            let k1 = kron(&k1, &id)?;
            let k2 = kron(&id, &k2)?;
            let lhs = &(&(&r12(l1 - l2)? * &k1) * &r21(l1 + l2)?) * &k2;
            let rhs = &(&(&k2 * &r12(l1 + l2)?) * &k1) * &r21(l1 - l2)?;
            Ok(relative_to(&lhs.try_sub(&rhs)?, &lhs))
        })
        .collect::<Result<_>>()?;
    Ok(CheckReport::new("reflection", worst(&residuals), tol)
        .with("samples", samples.len().to_string()))
}

/// How `T(−λ)⁻¹` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseStrategy {
    /// Dense LU of the assembled `T(−λ)`.
    DenseLu,
    /// Factor-wise: `R_{0j}(−λ)⁻¹ = R_{j0}(λ) / (sinh(iμ+λ) sinh(iμ−λ))`.
    Unitarity,
}

/// Open chain with `K⁺ = I`, right boundary `K(λ) = x(λ) + y(λ) u0` on
/// the auxiliary space, and trace weight `M = VᵗV`.
#[derive(Clone, Debug)]
pub struct TransferContext<T: Real> {
    ctx: RepContext<T>,
    bp: BoundaryParams<T>,
    boundary_set: Option<IndexSet>,
    u0: SparseMatrix<T>,
    aux_weight: SparseMatrix<T>,
    strategy: InverseStrategy,
}

impl<T: Real> TransferContext<T> {
    /// `boundary_set = None` gives `u0 = I`, so `K ∝ I`.
    pub fn new(
        ctx: RepContext<T>,
        bp: BoundaryParams<T>,
        boundary_set: Option<IndexSet>,
    ) -> Result<Self> {
        checked_pow(ctx.site_dim(), ctx.sites() + 1, ctx.max_dim())?;
        let u0 = match &boundary_set {
            Some(s) => boundary_m(s, bp.boundary_q, ctx.params())?,
            None => SparseMatrix::identity(ctx.site_dim()),
        };
        let aux_weight = m_matrix(ctx.params())?;
        Ok(Self {
            ctx,
            bp,
            boundary_set,
            u0,
            aux_weight,
            strategy: InverseStrategy::DenseLu,
        })
    }

    /// Boundary constants chosen to match the boundary element: `κ` uses
    /// `q_s` for `ℳ_s` and `q` for the trivial boundary.
    pub fn with_matched_boundary(
        ctx: RepContext<T>,
        boundary_q: Complex<T>,
        zeta: Complex<T>,
        boundary_set: Option<IndexSet>,
    ) -> Result<Self> {
        let bp = match &boundary_set {
            Some(s) => BoundaryParams::for_index_set(boundary_q, zeta, s, ctx.params())?,
            None => BoundaryParams::new(boundary_q, zeta, ctx.params().q)?,
        };
        Self::new(ctx, bp, boundary_set)
    }

    pub fn with_strategy(mut self, strategy: InverseStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn rep(&self) -> &RepContext<T> {
        &self.ctx
    }

    pub fn boundary(&self) -> &BoundaryParams<T> {
        &self.bp
    }

    pub fn boundary_set(&self) -> Option<&IndexSet> {
        self.boundary_set.as_ref()
    }

    pub fn aux_dim(&self) -> usize {
        self.ctx.site_dim()
    }

    pub fn full_dim(&self) -> usize {
        self.ctx.site_dim().pow((self.ctx.sites() + 1) as u32)
    }

    fn mu(&self) -> T {
        self.ctx.params().mu
    }

    /// `R_{0j}` with the auxiliary space first; `reversed` gives `R_{j0}`.
    fn r_aux(&self, lambda: Complex<T>, j: usize, reversed: bool) -> Result<SparseMatrix<T>> {
        let r = r_matrix(lambda, self.ctx.two_site(), self.mu())?;
        let slots = if reversed { [j, 0] } else { [0, j] };
        embed_on(&r, &slots, self.ctx.sites() + 1, self.ctx.site_dim())
    }

    /// `T(λ) = R_{0N}(λ) ⋯ R_{01}(λ)`.
    pub fn monodromy(&self, lambda: Complex<T>) -> Result<SparseMatrix<T>> {
        let mut t = SparseMatrix::identity(self.full_dim());
        for j in (1..=self.ctx.sites()).rev() {
            t = t.try_mul(&self.r_aux(lambda, j, false)?)?;
        }
        Ok(t)
    }

    fn monodromy_inverse_at_minus(&self, lambda: Complex<T>) -> Result<SparseMatrix<T>> {
        match self.strategy {
            InverseStrategy::DenseLu => inverse(&self.monodromy(-lambda)?),
            InverseStrategy::Unitarity => {
                let z = unitarity_scalar(lambda, self.mu());
                if z.norm() < T::lit(POLE_MARGIN * POLE_MARGIN) {
                    return Err(Error::Singular {
                        condition: f64::INFINITY,
                    });
                }
                let mut t = SparseMatrix::identity(self.full_dim());
                for j in 1..=self.ctx.sites() {
                    t = t.try_mul(&self.r_aux(lambda, j, true)?.scale(z.inv()))?;
                }
                Ok(t)
            }
        }
    }

    pub fn k_site(&self, lambda: Complex<T>) -> SparseMatrix<T> {
        k_matrix(lambda, &self.u0, &self.bp, self.mu())
    }

    /// `t(λ) = tr_0{ M_0 T(λ) K_0(λ) T(−λ)⁻¹ }`.
    pub fn transfer(&self, lambda: Complex<T>) -> Result<SparseMatrix<T>> {
        let rest = SparseMatrix::identity(self.ctx.total_dim());
        let k0 = kron(&self.k_site(lambda), &rest)?;
        let m0 = kron(&self.aux_weight, &rest)?;
        let double_row =
            &(&self.monodromy(lambda)? * &k0) * &self.monodromy_inverse_at_minus(lambda)?;
        partial_trace_first(&m0.try_mul(&double_row)?, self.aux_dim())
    }
}

pub fn transfer<T: Real>(tc: &TransferContext<T>, lambda: Complex<T>) -> Result<SparseMatrix<T>> {
    tc.transfer(lambda)
}

fn boundary_label<T: Real>(tc: &TransferContext<T>) -> String {
    tc.boundary_set()
        .map(|s| s.label())
        .unwrap_or_else(|| "trivial".to_string())
}

/// `[t(λ_1), t(λ_2)] = 0`, residual scaled by `‖t(λ_1)‖·‖t(λ_2)‖`.
pub fn check_transfer_commutativity<T: Real>(
    tc: &TransferContext<T>,
    samples: &[(Complex<T>, Complex<T>)],
    tol: f64,
) -> Result<CheckReport> {
    let residuals: Vec<f64> = samples
        .par_iter()
        .map(|&(l1, l2)| -> Result<f64> {
            let t1 = tc.transfer(l1)?;
            let t2 = tc.transfer(l2)?;
            let c = commutator(&t1, &t2)?;
            Ok(scaled_residual(
                &c,
                t1.frobenius_norm() * t2.frobenius_norm(),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(CheckReport::new("transfer.commute", worst(&residuals), tol)
        .with("boundary", boundary_label(tc))
        .with("samples", samples.len().to_string()))
}

/// Trivial boundary: every `f_s(e|f|h)` commutes with `t(λ)`. Boundary
/// `ℳ_s`: the coproduct charge of `s` commutes, raw `f_s(e|f|h)` does not,
/// and every other set keeps `e`, `f`, `h`.
pub fn check_transfer_symmetry<T: Real>(
    tc: &TransferContext<T>,
    samples: &[Complex<T>],
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let params = tc.rep().params();
    let sites = tc.rep().sites();
    let ts: Vec<SparseMatrix<T>> = samples
        .par_iter()
        .map(|&l| tc.transfer(l))
        .collect::<Result<_>>()?;
    let worst_commutator = |x: &SparseMatrix<T>| -> Result<f64> {
        let mut r: f64 = 0.0;
        for t in &ts {
            let c = commutator(t, x)?;
            r = r.max(scaled_residual(&c, t.frobenius_norm() * x.frobenius_norm()));
        }
        Ok(r)
    };
    let generators = [AlgebraElement::E, AlgebraElement::F, AlgebraElement::H];
    let mut out = Vec::new();
    for s in enumerate_index_sets(params.n) {
        let rep = FRep::new(s.clone(), params)?;
        let is_boundary = tc.boundary_set() == Some(&s);
        if is_boundary {
            let charge = charge_coproduct(&rep, sites, tc.boundary().boundary_q)?;
            out.push(
                CheckReport::new("transfer.charge", worst_commutator(&charge)?, tol)
                    .with("set", s.label()),
            );
        }
        for x in generators {
            let img = coproduct_rep(&rep, sites, x)?;
            let r = worst_commutator(&img)?;
            let report = if is_boundary {
                CheckReport::expect_violation("transfer.broken", r, 1e-4)
            } else {
                CheckReport::new("transfer.symmetry", r, tol)
            };
            out.push(report.with("set", s.label()).with("element", x.name()));
        }
    }
    let label = boundary_label(tc);
    Ok(out
        .into_iter()
        .map(|r| r.with("boundary", label.clone()))
        .collect())
}
