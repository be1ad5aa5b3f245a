//! XXZ and junction representations of the Temperley–Lieb and blob algebras.
//!
//! Layout: the chain has `N` junction sites of `n` qubits each, site `l`
//! owning the contiguous slots `(l−1)n+1 … ln`. Copy `i` of the XXZ
//! generator `𝕌_l` acts on slots `(l−1)n+i` and `ln+i`.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hecke::JunctionParams;
use crate::linalg::{
    checked_pow, commutator, embed_on, kron, kron_all, proportionality_fit, relative_residual,
    CheckReport, SparseMatrix, MAX_TOTAL_DIM,
};
use crate::qsym::{FRep, IndexSet};
use crate::scalar::Real;

/// Default cap on any chain dimension built through a context.
pub const DEFAULT_MAX_DIM: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct RepContext<T: Real> {
    params: JunctionParams<T>,
    sites: usize,
    max_dim: usize,
    two_site: SparseMatrix<T>,
}

impl<T: Real> RepContext<T> {
    pub fn new(params: JunctionParams<T>, sites: usize) -> Result<Self> {
        Self::with_max_dim(params, sites, DEFAULT_MAX_DIM)
    }

    pub fn with_max_dim(params: JunctionParams<T>, sites: usize, max_dim: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::InvalidArgument(
                "need at least one junction site".into(),
            ));
        }
        let max_dim = max_dim.min(MAX_TOTAL_DIM);
        checked_pow(2, params.n * sites, max_dim)?;
        let two_site = two_site_u(&params)?;
        Ok(Self {
            params,
            sites,
            max_dim,
            two_site,
        })
    }

    pub fn params(&self) -> &JunctionParams<T> {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn site_dim(&self) -> usize {
        1 << self.params.n
    }

    pub fn total_dim(&self) -> usize {
        1 << (self.params.n * self.sites)
    }

    /// The generator `W` on two adjacent junction sites.
    pub fn two_site(&self) -> &SparseMatrix<T> {
        &self.two_site
    }

    /// `Θ(𝕌_l)`, `1 ≤ l ≤ N−1`.
    pub fn junction_u(&self, l: usize) -> Result<SparseMatrix<T>> {
        if l == 0 || l >= self.sites {
            return Err(Error::IndexOutOfRange {
                what: "bond",
                index: l,
                valid: format!("1..={}", self.sites.saturating_sub(1)),
            });
        }
        let d = self.site_dim();
        kron_all(&[
            SparseMatrix::identity(d.pow((l - 1) as u32)),
            self.two_site.clone(),
            SparseMatrix::identity(d.pow((self.sites - l - 1) as u32)),
        ])
    }

    /// A single-site operator placed on site 1.
    pub fn on_first_site(&self, op: &SparseMatrix<T>) -> Result<SparseMatrix<T>> {
        if op.dim() != self.site_dim() {
            return Err(Error::DimensionMismatch {
                left: op.dim(),
                right: self.site_dim(),
            });
        }
        kron(
            op,
            &SparseMatrix::identity(self.total_dim() / self.site_dim()),
        )
    }
}

/// `Σ_{a≠b} e_ab⊗e_ba − Σ_{a≠b} a^{−sgn(a−b)} e_aa⊗e_bb`.
pub fn xxz_u<T: Real>(a: Complex<T>) -> Result<SparseMatrix<T>> {
    if a.is_zero() {
        return Err(Error::ZeroParameter("a"));
    }
    let one = Complex::<T>::one();
    SparseMatrix::from_triplets(4, [(1, 1, -a), (1, 2, one), (2, 1, one), (2, 2, -a.inv())])
}

/// `∏_i ρ_{a_i}` on two junction sites (dimension `4^n`).
pub fn two_site_u<T: Real>(params: &JunctionParams<T>) -> Result<SparseMatrix<T>> {
    let n = params.n;
    let mut out = SparseMatrix::identity(checked_pow(4, n, MAX_TOTAL_DIM)?);
    for (i, &a) in params.a.iter().enumerate() {
        let factor = embed_on(&xxz_u(a)?, &[i, n + i], 2 * n, 2)?;
        out = out.try_mul(&factor)?;
    }
    Ok(out)
}

pub fn junction_u<T: Real>(l: usize, ctx: &RepContext<T>) -> Result<SparseMatrix<T>> {
    ctx.junction_u(l)
}

/// `−Q⁻¹ e_11 − Q e_22 + e_12 + e_21`.
pub fn u0_xxz<T: Real>(boundary_q: Complex<T>) -> Result<SparseMatrix<T>> {
    if boundary_q.is_zero() {
        return Err(Error::ZeroParameter("Q"));
    }
    let one = Complex::<T>::one();
    SparseMatrix::from_triplets(
        2,
        [
            (0, 0, -boundary_q.inv()),
            (0, 1, one),
            (1, 0, one),
            (1, 1, -boundary_q),
        ],
    )
}

/// `∏_i ρ_{a_i,Q_i}(𝕌_0)` on the first junction site, embedded in the chain.
pub fn junction_u0_product<T: Real>(
    ctx: &RepContext<T>,
    qs: &[Complex<T>],
) -> Result<SparseMatrix<T>> {
    if qs.len() != ctx.n() {
        return Err(Error::LengthMismatch {
            what: "boundary constants",
            expected: ctx.n(),
            got: qs.len(),
        });
    }
    let factors: Vec<SparseMatrix<T>> = qs.iter().map(|&q| u0_xxz(q)).collect::<Result<_>>()?;
    ctx.on_first_site(&kron_all(&factors)?)
}

/// `M_s = −Q⁻¹ h_1 − Q h_2 + f_s(e) + f_s(f)` on one junction site.
pub fn boundary_m<T: Real>(
    s: &IndexSet,
    boundary_q: Complex<T>,
    params: &JunctionParams<T>,
) -> Result<SparseMatrix<T>> {
    if boundary_q.is_zero() {
        return Err(Error::ZeroParameter("Q"));
    }
    let rep = FRep::new(s.clone(), params)?;
    let diag = rep
        .h1()
        .scale(-boundary_q.inv())
        .axpy(-boundary_q, &rep.h2())?;
    Ok(&(&diag + &rep.e()) + &rep.f())
}

/// Boundary constants of the blob algebra.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryParams<T: Real> {
    pub boundary_q: Complex<T>,
    pub zeta: Complex<T>,
    pub delta0: Complex<T>,
    pub kappa: Complex<T>,
}

impl<T: Real> BoundaryParams<T> {
    /// `δ_0 = −(Q + Q⁻¹)`, `κ = q Q⁻¹ + q⁻¹ Q`.
    pub fn new(boundary_q: Complex<T>, zeta: Complex<T>, q: Complex<T>) -> Result<Self> {
        if boundary_q.is_zero() {
            return Err(Error::ZeroParameter("Q"));
        }
        if q.is_zero() {
            return Err(Error::ZeroParameter("q"));
        }
        Ok(Self {
            boundary_q,
            zeta,
            delta0: -(boundary_q + boundary_q.inv()),
            kappa: q / boundary_q + boundary_q / q,
        })
    }

    /// Constants for `ℳ_s`: the sandwich scalar uses `q_s` in place of `q`.
    pub fn for_index_set(
        boundary_q: Complex<T>,
        zeta: Complex<T>,
        s: &IndexSet,
        params: &JunctionParams<T>,
    ) -> Result<Self> {
        let qs = crate::qsym::q_value(s, params)?;
        Self::new(boundary_q, zeta, qs)
    }

    pub fn with_kappa(mut self, kappa: Complex<T>) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_delta0(mut self, delta0: Complex<T>) -> Self {
        self.delta0 = delta0;
        self
    }
}

fn fmt_complex<T: Real>(z: Complex<T>) -> String {
    let re = z.re.to_f64().unwrap_or(f64::NAN);
    let im = z.im.to_f64().unwrap_or(f64::NAN);
    format!("{re:e}{:+e}i", im)
}

/// The three families of TL relations over all bonds.
pub fn check_tl<T: Real>(ctx: &RepContext<T>, tol: f64) -> Result<Vec<CheckReport>> {
    let q = ctx.params().q;
    let loop_weight = q + q.inv();
    let us: Vec<SparseMatrix<T>> = (1..ctx.sites())
        .map(|l| ctx.junction_u(l))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (i, u) in us.iter().enumerate() {
        let x = (u * u).axpy(loop_weight, u)?;
        out.push(
            CheckReport::new("tl.quadratic", relative_residual(&x, u), tol)
                .with("l", (i + 1).to_string()),
        );
    }
    for i in 0..us.len() {
        for j in [i.wrapping_sub(1), i + 1] {
            if j >= us.len() {
                continue;
            }
            let x = (&(&us[i] * &us[j]) * &us[i]).try_sub(&us[i])?;
            out.push(
                CheckReport::new("tl.braid", relative_residual(&x, &us[i]), tol)
                    .with("l", (i + 1).to_string())
                    .with("m", (j + 1).to_string()),
            );
        }
    }
    for i in 0..us.len() {
        for j in (i + 2)..us.len() {
            let x = commutator(&us[i], &us[j])?;
            out.push(
                CheckReport::new("tl.commute", relative_residual(&x, &us[i]), tol)
                    .with("l", (i + 1).to_string())
                    .with("m", (j + 1).to_string()),
            );
        }
    }
    Ok(out)
}

/// Least-squares `κ` in `Θ(𝕌_1) u0 Θ(𝕌_1) ≈ κ Θ(𝕌_1)` and its relative misfit.
pub fn measure_kappa<T: Real>(
    ctx: &RepContext<T>,
    u0: &SparseMatrix<T>,
) -> Result<(Option<Complex<T>>, T)> {
    let u1 = ctx.junction_u(1)?;
    let sandwich = &(&u1 * u0) * &u1;
    proportionality_fit(&sandwich, &u1)
}

/// Blob relations for a boundary element already placed on the chain:
/// `u0² = δ_0 u0`, `Θ(𝕌_1) u0 Θ(𝕌_1) = κ Θ(𝕌_1)`, `[u0, Θ(𝕌_i)] = 0` for
/// `i > 1`. The sandwich report also records the measured ratio.
pub fn check_blob<T: Real>(
    ctx: &RepContext<T>,
    u0: &SparseMatrix<T>,
    bp: &BoundaryParams<T>,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    if u0.dim() != ctx.total_dim() {
        return Err(Error::DimensionMismatch {
            left: u0.dim(),
            right: ctx.total_dim(),
        });
    }
    let mut out = Vec::new();
    let quad = (u0 * u0).axpy(-bp.delta0, u0)?;
    out.push(
        CheckReport::new("blob.quadratic", relative_residual(&quad, u0), tol)
            .with("delta0", fmt_complex(bp.delta0)),
    );
    if ctx.sites() >= 2 {
        let u1 = ctx.junction_u(1)?;
        let sandwich = &(&u1 * u0) * &u1;
        let x = sandwich.axpy(-bp.kappa, &u1)?;
        let (measured, misfit) = proportionality_fit(&sandwich, &u1)?;
        let mut report = CheckReport::new("blob.sandwich", relative_residual(&x, &u1), tol)
            .with("kappa", fmt_complex(bp.kappa))
            .with(
                "proportional_misfit",
                format!("{:e}", misfit.to_f64().unwrap_or(f64::NAN)),
            );
        if let Some(k) = measured {
            report = report.with("kappa_measured", fmt_complex(k));
        }
        out.push(report);
        for l in 2..ctx.sites() {
            let ul = ctx.junction_u(l)?;
            let c = commutator(u0, &ul)?;
            out.push(
                CheckReport::new("blob.commute", relative_residual(&c, &ul), tol)
                    .with("l", l.to_string()),
            );
        }
    }
    Ok(out)
}

/// Blob relations for the product boundary element with per-copy `Q_i`.
/// `δ_0 = ∏(−(Q_i + Q_i⁻¹))`; `κ` is measured, and the sandwich report's
/// residual is the relative misfit of that proportionality.
pub fn check_product_blob<T: Real>(
    ctx: &RepContext<T>,
    qs: &[Complex<T>],
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let u0 = junction_u0_product(ctx, qs)?;
    let delta0 = qs
        .iter()
        .fold(Complex::<T>::one(), |acc, &q| acc * -(q + q.inv()));
    let mut out = Vec::new();
    let quad = (&u0 * &u0).axpy(-delta0, &u0)?;
    out.push(
        CheckReport::new("blob.product.quadratic", relative_residual(&quad, &u0), tol)
            .with("delta0", fmt_complex(delta0)),
    );
    if ctx.sites() >= 2 {
        let (kappa, misfit) = measure_kappa(ctx, &u0)?;
        let mut report = CheckReport::new(
            "blob.product.sandwich",
            misfit.to_f64().unwrap_or(f64::INFINITY),
            tol,
        );
        if let Some(k) = kappa {
            report = report.with("kappa_measured", fmt_complex(k));
        }
        out.push(report);
        for l in 2..ctx.sites() {
            let ul = ctx.junction_u(l)?;
            let c = commutator(&u0, &ul)?;
            out.push(
                CheckReport::new("blob.product.commute", relative_residual(&c, &ul), tol)
                    .with("l", l.to_string()),
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::solve_hecke;
    use crate::linalg::{all_passed, diagonal_of, elementary, proportionality};
    use crate::qsym::enumerate_index_sets;
    use crate::scalar::cplx;

    type M = SparseMatrix<f64>;

    #[test]
    fn xxz_entries_and_quadratic() {
        let a = Complex::from_polar(1.3, 0.4);
        let u = xxz_u(a).unwrap();
        assert_eq!(u.nnz(), 4);
        assert_eq!(u.get(1, 1), -a);
        assert_eq!(u.get(2, 2), -a.inv());
        assert_eq!(u.get(1, 2), cplx(1.0, 0.0));
        let x = (&u * &u).axpy(a + a.inv(), &u).unwrap();
        assert!(x.frobenius_norm() < 1e-13);
        assert!((u.trace() + a + a.inv()).norm() < 1e-15);
        assert!(xxz_u::<f64>(Complex::zero()).is_err());
    }

    #[test]
    fn u0_examples() {
        let q = Complex::from_polar(1.0, 0.9);
        let u0 = u0_xxz(q).unwrap();
        let x = (&u0 * &u0).axpy(q + q.inv(), &u0).unwrap();
        assert!(x.frobenius_norm() < 1e-14);
        let det = u0.get(0, 0) * u0.get(1, 1) - u0.get(0, 1) * u0.get(1, 0);
        assert!(det.norm() < 1e-15);
    }

    #[test]
    fn junction_u_sparsity_and_support() {
        let p = solve_hecke::<f64>(3, 0.7).unwrap();
        let ctx = RepContext::new(p, 3).unwrap();
        for l in 1..3 {
            assert_eq!(ctx.junction_u(l).unwrap().nnz(), 64 * 8);
        }
        assert!(ctx.junction_u(0).is_err());
        assert!(ctx.junction_u(3).is_err());
        let far = kron(&M::identity(64), &elementary::<f64>(1, 2)).unwrap();
        let far = kron(&far, &M::identity(4)).unwrap();
        assert!(commutator(&ctx.junction_u(1).unwrap(), &far)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn single_copy_is_plain_xxz() {
        let p = JunctionParams::from_a(0.7, vec![Complex::from_polar(1.0, 0.7)]).unwrap();
        let ctx = RepContext::new(p.clone(), 3).unwrap();
        let expected = kron(&xxz_u(p.q).unwrap(), &M::identity(2)).unwrap();
        assert_eq!(ctx.junction_u(1).unwrap(), expected);
        assert!(all_passed(&check_tl(&ctx, 1e-12).unwrap()));
    }

    #[test]
    fn boundary_m_display_n3() {
        let p = solve_hecke::<f64>(3, 0.7).unwrap();
        let q = Complex::from_polar(1.0, 0.9);
        let m0 = boundary_m(&IndexSet::empty(3), q, &p).unwrap();
        assert_eq!(m0.nnz(), 4);
        assert_eq!(m0.get(0, 0), -q.inv());
        assert_eq!(m0.get(7, 7), -q);
        assert_eq!(m0.get(0, 7), cplx(1.0, 0.0));
        let m1 = boundary_m(&IndexSet::new(3, vec![1]).unwrap(), q, &p).unwrap();
        // e22⊗e11⊗e11 is basis index 4; e11⊗e22⊗e22 is 3.
        assert_eq!(m1.get(4, 4), -q.inv());
        assert_eq!(m1.get(3, 3), -q);
        assert_eq!(m1.get(4, 3), cplx(1.0, 0.0));
        assert_eq!(m1.get(3, 4), cplx(1.0, 0.0));
        for s in enumerate_index_sets(3) {
            let m = boundary_m(&s, q, &p).unwrap();
            let x = (&m * &m).axpy(q + q.inv(), &m).unwrap();
            assert!(x.frobenius_norm() < 1e-14);
            assert_eq!(diagonal_of(&m.transpose()), diagonal_of(&m));
        }
    }

    #[test]
    fn product_boundary_kappa_is_product_of_copies() {
        let p = solve_hecke::<f64>(2, 0.7).unwrap();
        let ctx = RepContext::new(p.clone(), 3).unwrap();
        let qs = [
            Complex::from_polar(1.0, 0.9),
            Complex::from_polar(1.2, -0.3),
        ];
        let u0 = junction_u0_product(&ctx, &qs).unwrap();
        let sq = &u0 * &u0;
        let delta: Complex<f64> = qs.iter().map(|&q| -(q + q.inv())).product();
        assert!(proportionality(&sq, &u0, 1e-12)
            .unwrap()
            .is_some_and(|c| (c - delta).norm() < 1e-12));
        // Per-copy sandwich scalar a_i/Q_i + Q_i/a_i multiplies across copies.
        let expected: Complex<f64> = p.a.iter().zip(&qs).map(|(&a, &q)| a / q + q / a).product();
        let (kappa, misfit) = measure_kappa(&ctx, &u0).unwrap();
        assert!(misfit < 1e-12);
        assert!((kappa.unwrap() - expected).norm() < 1e-12);
        assert!(all_passed(&check_product_blob(&ctx, &qs, 1e-9).unwrap()));
    }

    #[test]
    fn single_copy_blob_passes() {
        let p = JunctionParams::from_a(0.7, vec![Complex::from_polar(1.0, 0.7)]).unwrap();
        let ctx = RepContext::new(p.clone(), 3).unwrap();
        let q = Complex::from_polar(1.0, 0.9);
        let u0 = ctx.on_first_site(&u0_xxz(q).unwrap()).unwrap();
        let bp = BoundaryParams::new(q, cplx(0.0, 0.3), p.q).unwrap();
        assert!(all_passed(&check_blob(&ctx, &u0, &bp, 1e-12).unwrap()));
    }

    #[test]
    fn context_respects_cap() {
        let p = solve_hecke::<f64>(3, 0.7).unwrap();
        assert!(RepContext::with_max_dim(p.clone(), 3, 256).is_err());
        assert!(RepContext::with_max_dim(p, 3, 512).is_ok());
    }
}
