//! The Hecke condition `(−1)^n ∏(a_j + a_j⁻¹) = −(q + q⁻¹)` and its solver.
//!
//! With `a_j = z_j q^{1/n}` the product expands into powers `q^{m/n}`,
//! `m = −n, −n+2, …, n`. The extreme powers reproduce `−(q + q⁻¹)` once
//! `∏ z_j = (−1)^{n−1}`; every intermediate power class must vanish. The
//! resulting system does not involve `q`, so `z` is independent of `μ`.

use std::f64::consts::PI;

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{principal_pow, to_pair, unimodular, Real};

/// Seed used by [`solve_hecke`] for restarts.
pub const DEFAULT_SEED: u64 = 42;

const MAX_ITERATIONS: usize = 400;
const MAX_RESTARTS: usize = 64;
const TARGET: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct JunctionParams<T: Real> {
    pub n: usize,
    pub mu: T,
    pub q: Complex<T>,
    pub a: Vec<Complex<T>>,
    pub z: Vec<Complex<T>>,
}

impl<T: Real> JunctionParams<T> {
    /// `q = e^{iμ}`, `a_j = z_j q^{1/n}` on the principal branch.
    pub fn from_z(mu: T, z: Vec<Complex<T>>) -> Result<Self> {
        let n = z.len();
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one copy".into()));
        }
        if z.iter().any(|v| v.is_zero()) {
            return Err(Error::ZeroParameter("z"));
        }
        let q = unimodular(mu);
        let root = principal_pow(q, T::one() / T::lit(n as f64));
        let a = z.iter().map(|&zj| zj * root).collect();
        Ok(Self { n, mu, q, a, z })
    }

    /// Parameters with explicit `a_j`, bypassing the Hecke parametrization.
    /// `z` is back-computed as `a_j q^{−1/n}`.
    pub fn from_a(mu: T, a: Vec<Complex<T>>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one copy".into()));
        }
        if a.iter().any(|v| v.is_zero()) {
            return Err(Error::ZeroParameter("a"));
        }
        let q = unimodular(mu);
        let root = principal_pow(q, T::one() / T::lit(n as f64));
        let z = a.iter().map(|&aj| aj / root).collect();
        Ok(Self { n, mu, q, a, z })
    }

    /// Same `q` and `z`, with every `a_j` multiplied by `factor`.
    pub fn with_scaled_a(&self, factor: T) -> Self {
        let mut out = self.clone();
        for a in &mut out.a {
            *a = a.scale(factor);
        }
        out
    }

    pub fn hecke_residual(&self) -> Complex<T> {
        hecke_residual(&self.a, self.q).expect("parameters hold nonzero a")
    }

    /// Largest magnitude among the Hecke residual and all group residuals.
    pub fn max_residual(&self) -> T {
        let groups = group_residuals(&self.z).expect("parameters hold nonzero z");
        groups
            .iter()
            .map(|r| r.norm())
            .fold(self.hecke_residual().norm(), T::max)
    }

    pub fn summary(&self) -> HeckeSummary {
        HeckeSummary {
            n: self.n,
            mu: self.mu.to_f64().unwrap_or(f64::NAN),
            z: self.z.iter().map(|&v| to_pair(v)).collect(),
            a: self.a.iter().map(|&v| to_pair(v)).collect(),
            max_residual: self.max_residual().to_f64().unwrap_or(f64::NAN),
        }
    }
}

/// Serializable solver output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeckeSummary {
    pub n: usize,
    pub mu: f64,
    pub z: Vec<[f64; 2]>,
    pub a: Vec<[f64; 2]>,
    pub max_residual: f64,
}

/// `(−1)^n ∏(a_j + a_j⁻¹) + (q + q⁻¹)`.
pub fn hecke_residual<T: Real>(a: &[Complex<T>], q: Complex<T>) -> Result<Complex<T>> {
    if a.iter().any(|v| v.is_zero()) {
        return Err(Error::ZeroParameter("a"));
    }
    if q.is_zero() {
        return Err(Error::ZeroParameter("q"));
    }
    let prod = a
        .iter()
        .fold(Complex::<T>::one(), |acc, &aj| acc * (aj + aj.inv()));
    let signed = if a.len().is_multiple_of(2) {
        prod
    } else {
        -prod
    };
    Ok(signed + q + q.inv())
}

/// Coefficients of `∏_j (z_j t + z_j⁻¹ t⁻¹)`; entry `k` multiplies
/// `t^{2k−n}`, i.e. the sum over sign vectors with `k` plus signs.
pub fn power_class_sums<T: Real>(z: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut coeffs = vec![Complex::<T>::one()];
    for &zj in z {
        let inv = zj.inv();
        let mut next = vec![Complex::<T>::zero(); coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k] += c * inv;
            next[k + 1] += c * zj;
        }
        coeffs = next;
    }
    coeffs
}

/// Intermediate power-class sums `m = −n+2, …, n−2` followed by the
/// normalization residual `∏ z_j − (−1)^{n−1}`.
pub fn group_residuals<T: Real>(z: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if z.iter().any(|v| v.is_zero()) {
        return Err(Error::ZeroParameter("z"));
    }
    let n = z.len();
    let sums = power_class_sums(z);
    let mut out: Vec<Complex<T>> = if n >= 2 {
        sums[1..n].to_vec()
    } else {
        Vec::new()
    };
    let prod = z.iter().fold(Complex::<T>::one(), |acc, &v| acc * v);
    let sign = if n % 2 == 1 { T::one() } else { -T::one() };
    out.push(prod - Complex::new(sign, T::zero()));
    Ok(out)
}

pub fn solve_hecke<T: Real>(n: usize, mu: T) -> Result<JunctionParams<T>> {
    solve_hecke_seeded(n, mu, DEFAULT_SEED)
}

/// Closed forms for `n ≤ 3`; otherwise a damped Gauss–Newton search over
/// unimodular `z_j = e^{iθ_j}` seeded at `θ_j = jπ/n`, with seeded random
/// restarts on stagnation. The returned `z` is sorted by argument in
/// `[0, 2π)`.
pub fn solve_hecke_seeded<T: Real>(n: usize, mu: T, seed: u64) -> Result<JunctionParams<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let thetas = match n {
        1 => vec![0.0],
        2 => vec![PI / 4.0, 3.0 * PI / 4.0],
        3 => vec![PI / 3.0, 2.0 * PI / 3.0, PI],
        _ => search(n, seed)?,
    };
    let mut thetas: Vec<f64> = thetas.into_iter().map(|t| t.rem_euclid(2.0 * PI)).collect();
    thetas.sort_by(|x, y| x.total_cmp(y));
    let z: Vec<Complex<T>> = thetas.iter().map(|&t| unimodular(T::lit(t))).collect();
    let params = JunctionParams::from_z(mu, z)?;
    let tolerance = T::solver_tolerance() * T::lit((1u64 << n.min(60)) as f64);
    let worst = params.max_residual();
    if worst.is_nan() || worst > tolerance {
        return Err(Error::NoConvergence {
            n,
            best_residual: worst.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(params)
}

fn search(n: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32));
    let mut start: Vec<f64> = (1..=n).map(|j| j as f64 * PI / n as f64).collect();
    let mut best = (f64::INFINITY, start.clone());
    for _ in 0..=MAX_RESTARTS {
        let (theta, cost) = levenberg_marquardt(start);
        if cost < best.0 {
            best = (cost, theta.clone());
        }
        if cost <= TARGET {
            return Ok(theta);
        }
        start = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    }
    Err(Error::NoConvergence {
        n,
        best_residual: best.0,
    })
}

/// Real residual vector and Jacobian with respect to the angles.
fn residual_and_jacobian(theta: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = theta.len();
    let z: Vec<Complex<f64>> = theta.iter().map(|&t| Complex::from_polar(1.0, t)).collect();
    let groups = group_residuals(&z).expect("unimodular z");
    let mut r = Vec::with_capacity(2 * groups.len());
    for g in &groups {
        r.push(g.re);
        r.push(g.im);
    }
    let prod = z
        .iter()
        .fold(Complex::one(), |acc: Complex<f64>, &v| acc * v);
    let i = Complex::new(0.0, 1.0);
    let mut jac = vec![vec![0.0; n]; r.len()];
    for k in 0..n {
        let rest: Vec<Complex<f64>> = z
            .iter()
            .enumerate()
            .filter_map(|(j, &v)| (j != k).then_some(v))
            .collect();
        let others = power_class_sums(&rest);
        // ∂/∂θ_k of the k-th factor is i(z_k t − z_k⁻¹ t⁻¹).
        for p in 1..n {
            let d = i * (z[k] * others[p - 1] - z[k].inv() * others[p]);
            jac[2 * (p - 1)][k] = d.re;
            jac[2 * (p - 1) + 1][k] = d.im;
        }
        let dp = i * prod;
        let last = r.len() - 2;
        jac[last][k] = dp.re;
        jac[last + 1][k] = dp.im;
    }
    (r, jac)
}

fn cost_of(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

fn levenberg_marquardt(mut theta: Vec<f64>) -> (Vec<f64>, f64) {
    let n = theta.len();
    let (mut r, mut jac) = residual_and_jacobian(&theta);
    let mut cost = cost_of(&r);
    let mut damping = 1e-3;
    for _ in 0..MAX_ITERATIONS {
        if cost <= TARGET {
            break;
        }
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for (row, &rv) in jac.iter().zip(&r) {
            for a in 0..n {
                jtr[a] += row[a] * rv;
                for b in 0..n {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..20 {
            let mut lhs = jtj.clone();
            for (a, row) in lhs.iter_mut().enumerate() {
                row[a] += damping * (1.0 + jtj[a][a]);
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let Some(step) = solve_small(lhs, rhs) else {
                damping *= 10.0;
                continue;
            };
            let trial: Vec<f64> = theta.iter().zip(&step).map(|(t, s)| t + s).collect();
            let (tr, tj) = residual_and_jacobian(&trial);
            let trial_cost = cost_of(&tr);
            if trial_cost < cost {
                theta = trial;
                r = tr;
                jac = tj;
                cost = trial_cost;
                damping = (damping / 3.0).max(1e-15);
                improved = true;
                break;
            }
            damping *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (theta, cost)
}

/// Gaussian elimination with partial pivoting on a small real system.
fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))?;
        if a[p][k].abs() < 1e-300 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for r in (k + 1)..n {
            let f = a[r][k] / a[k][k];
            let pivot = a[k].clone();
            for (dst, src) in a[r][k..].iter_mut().zip(&pivot[k..]) {
                *dst -= f * src;
            }
            b[r] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn e(theta: f64) -> Complex<f64> {
        Complex::from_polar(1.0, theta)
    }

    #[test]
    fn single_copy_residual_vanishes_at_q() {
        let q = e(0.7);
        assert!(hecke_residual(&[q], q).unwrap().norm() < 1e-15);
    }

    #[test]
    fn direct_arithmetic_example() {
        let r = hecke_residual(&[cplx(1.0, 0.0), cplx(1.0, 0.0)], e(PI / 3.0)).unwrap();
        assert!((r - cplx(5.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_parameter_is_rejected() {
        assert_eq!(
            hecke_residual(&[Complex::zero()], e(0.1)),
            Err(Error::ZeroParameter("a"))
        );
        assert!(group_residuals::<f64>(&[Complex::zero()]).is_err());
    }

    #[test]
    fn power_class_sums_by_enumeration() {
        let z = [e(0.3), e(1.1), cplx(0.5, 0.2)];
        let sums = power_class_sums(&z);
        let mut brute = [Complex::<f64>::zero(); 4];
        for mask in 0u32..8 {
            let k = mask.count_ones() as usize;
            let term = (0..3).fold(Complex::one(), |acc, j| {
                acc * if mask >> j & 1 == 1 { z[j] } else { z[j].inv() }
            });
            brute[k] += term;
        }
        for (a, b) in sums.iter().zip(&brute) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn two_copy_closed_form_satisfies_system() {
        let g = group_residuals(&[e(3.0 * PI / 4.0), e(PI / 4.0)]).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.iter().all(|r| r.norm() < 1e-15));
    }

    #[test]
    fn single_copy_has_only_normalization() {
        let g = group_residuals(&[cplx::<f64>(1.0, 0.0)]).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g[0].norm() < 1e-15);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let theta = [0.4, 1.3, 2.9, 4.4, 5.0];
        let (r0, jac) = residual_and_jacobian(&theta);
        let h = 1e-7;
        for k in 0..theta.len() {
            let mut t = theta.to_vec();
            t[k] += h;
            let (r1, _) = residual_and_jacobian(&t);
            for row in 0..r0.len() {
                let fd = (r1[row] - r0[row]) / h;
                assert!((fd - jac[row][k]).abs() < 1e-5, "row {row} col {k}");
            }
        }
    }

    #[test]
    fn seeded_search_is_deterministic() {
        let a = solve_hecke_seeded::<f64>(5, 0.3, 7).unwrap();
        let b = solve_hecke_seeded::<f64>(5, 0.3, 7).unwrap();
        assert_eq!(a.z, b.z);
    }

    #[test]
    fn scaled_a_keeps_q() {
        let p = solve_hecke::<f64>(3, 0.7).unwrap();
        let s = p.with_scaled_a(1.01);
        assert_eq!(s.q, p.q);
        assert!((s.a[0] - p.a[0] * 1.01).norm() < 1e-15);
        assert!(s.hecke_residual().norm() > 1e-3);
    }
}
