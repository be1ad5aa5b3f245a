//! `U_q(sl2)` data: index sets, the `f_s` and `π_i` representations,
//! iterated coproducts, boundary charges and the symmetry sweeps.

use std::fmt;

use num_complex::Complex;
use num_traits::One;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hecke::JunctionParams;
use crate::linalg::{commutator, kron_all, relative_residual, CheckReport, SparseMatrix};
use crate::scalar::{principal_pow, Real};
use crate::tl_rep::{boundary_m, RepContext};

/// A subset `{i_1 < … < i_m}` of `{1, …, n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet {
    n: usize,
    indices: Vec<usize>,
}

impl IndexSet {
    /// Validated canonical set.
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        let set = Self::unrestricted(n, indices)?;
        if let Some(reason) = set.non_canonical_reason() {
            return Err(Error::NonCanonicalSet {
                n,
                indices: set.indices,
                reason,
            });
        }
        Ok(set)
    }

    /// Any strictly increasing subset of `1..=n`, canonical or not.
    pub fn unrestricted(n: usize, indices: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        for (k, &i) in indices.iter().enumerate() {
            if i == 0 || i > n {
                return Err(Error::IndexOutOfRange {
                    what: "set element",
                    index: i,
                    valid: format!("1..={n}"),
                });
            }
            if k > 0 && indices[k - 1] >= i {
                return Err(Error::InvalidArgument(format!(
                    "set elements must be strictly increasing: {indices:?}"
                )));
            }
        }
        Ok(Self { n, indices })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            indices: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_canonical(&self) -> bool {
        self.non_canonical_reason().is_none()
    }

    fn non_canonical_reason(&self) -> Option<&'static str> {
        let m = self.len();
        if 2 * m > self.n {
            Some("more than n/2 elements")
        } else if 2 * m == self.n && self.contains(1) {
            Some("half-size sets must not contain 1")
        } else {
            None
        }
    }

    /// Conjugate set `{n − i + 1}`.
    pub fn bar(&self) -> Self {
        let mut indices: Vec<usize> = self.indices.iter().map(|&i| self.n - i + 1).collect();
        indices.reverse();
        Self { n: self.n, indices }
    }

    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            indices: (1..=self.n).filter(|&i| !self.contains(i)).collect(),
        }
    }

    /// Bit mask over the `n` slots, slot 1 most significant.
    pub fn mask(&self) -> usize {
        self.indices
            .iter()
            .fold(0, |acc, &i| acc | 1 << (self.n - i))
    }

    /// Compact label, `[]` or `[2,3]`.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.indices.iter().map(usize::to_string).collect();
        format!("[{}]", parts.join(","))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.indices.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.indices.iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.indices.serialize(serializer)
    }
}

/// Canonical sets ordered by size, then lexicographically.
pub fn enumerate_index_sets(n: usize) -> Vec<IndexSet> {
    let mut out = Vec::new();
    for m in 0..=n / 2 {
        let mut combo: Vec<usize> = (1..=m).collect();
        loop {
            let set = IndexSet {
                n,
                indices: combo.clone(),
            };
            if set.is_canonical() {
                out.push(set);
            }
            // Advance to the next m-combination of 1..=n.
            let mut k = m;
            while k > 0 && combo[k - 1] == n - m + k {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            combo[k - 1] += 1;
            for j in k..m {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    out
}

/// `(−1)^{n+1} ∏_j a_j^{ε_j}` with `ε_j = −1` exactly on the set.
pub fn q_value<T: Real>(s: &IndexSet, params: &JunctionParams<T>) -> Result<Complex<T>> {
    if s.n != params.n {
        return Err(Error::LengthMismatch {
            what: "index set ambient size",
            expected: params.n,
            got: s.n,
        });
    }
    let prod = params
        .a
        .iter()
        .enumerate()
        .fold(Complex::<T>::one(), |acc, (j, &a)| {
            if s.contains(j + 1) {
                acc / a
            } else {
                acc * a
            }
        });
    Ok(if s.n % 2 == 1 { prod } else { -prod })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QPower {
    MinusOne,
    MinusHalf,
    Half,
    One,
}

impl QPower {
    pub fn value(self) -> f64 {
        match self {
            QPower::MinusOne => -1.0,
            QPower::MinusHalf => -0.5,
            QPower::Half => 0.5,
            QPower::One => 1.0,
        }
    }

    pub fn negate(self) -> Self {
        match self {
            QPower::MinusOne => QPower::One,
            QPower::MinusHalf => QPower::Half,
            QPower::Half => QPower::MinusHalf,
            QPower::One => QPower::MinusOne,
        }
    }
}

/// Generators `e`, `f`, `h` and the group-like elements `q^{c·h}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraElement {
    E,
    F,
    H,
    QH(QPower),
}

impl AlgebraElement {
    /// The elements swept by the symmetry checks.
    pub const SWEEP: [AlgebraElement; 4] = [
        AlgebraElement::E,
        AlgebraElement::F,
        AlgebraElement::H,
        AlgebraElement::QH(QPower::One),
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgebraElement::E => "e",
            AlgebraElement::F => "f",
            AlgebraElement::H => "h",
            AlgebraElement::QH(QPower::One) => "q^h",
            AlgebraElement::QH(QPower::Half) => "q^(h/2)",
            AlgebraElement::QH(QPower::MinusHalf) => "q^(-h/2)",
            AlgebraElement::QH(QPower::MinusOne) => "q^(-h)",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim().to_ascii_lowercase();
        Ok(match t.as_str() {
            "e" => AlgebraElement::E,
            "f" => AlgebraElement::F,
            "h" => AlgebraElement::H,
            "q^h" | "qh" | "qh(1)" => AlgebraElement::QH(QPower::One),
            "q^(h/2)" | "qh(1/2)" => AlgebraElement::QH(QPower::Half),
            "q^(-h/2)" | "qh(-1/2)" => AlgebraElement::QH(QPower::MinusHalf),
            "q^(-h)" | "qh(-1)" => AlgebraElement::QH(QPower::MinusOne),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown algebra element {text:?}"
                )))
            }
        })
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A finite-dimensional representation of `U_q(sl2)`.
pub trait GeneratorRep<T: Real>: Sync {
    fn dim(&self) -> usize;

    fn deformation(&self) -> Complex<T>;

    fn image(&self, x: AlgebraElement) -> SparseMatrix<T>;

    fn label(&self) -> String;

    /// Single-site boundary charge
    /// `q^{−½} K e + q^{½} K f + x (K² − 1)` with `K = q^{h/2}` and
    /// `x = (Q − Q⁻¹)/(q − q⁻¹)`.
    fn charge(&self, boundary_q: Complex<T>) -> Result<SparseMatrix<T>> {
        let q = self.deformation();
        let x = charge_coefficient(q, boundary_q).ok_or_else(|| Error::DegenerateDeformation {
            label: self.label(),
        })?;
        let k = self.image(AlgebraElement::QH(QPower::Half));
        let k2 = self.image(AlgebraElement::QH(QPower::One));
        let half = principal_pow(q, T::lit(0.5));
        let ke = &k * &self.image(AlgebraElement::E);
        let kf = &k * &self.image(AlgebraElement::F);
        let shifted = &k2 - &SparseMatrix::identity(self.dim());
        Ok(&(&ke.scale(half.inv()) + &kf.scale(half)) + &shifted.scale(x))
    }
}

/// `(Q − Q⁻¹)/(q − q⁻¹)`, or `None` when `q² = 1`.
pub fn charge_coefficient<T: Real>(q: Complex<T>, boundary_q: Complex<T>) -> Option<Complex<T>> {
    let denom = q - q.inv();
    if denom.norm() <= T::lit(1e3) * T::epsilon() {
        return None;
    }
    Some((boundary_q - boundary_q.inv()) / denom)
}

/// `f_s`: one-entry raising/lowering patterns flipped on the positions in `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct FRep<T: Real> {
    set: IndexSet,
    q: Complex<T>,
}

impl<T: Real> FRep<T> {
    /// Requires a canonical set; the deformation is [`q_value`].
    pub fn new(set: IndexSet, params: &JunctionParams<T>) -> Result<Self> {
        if let Some(reason) = set.non_canonical_reason() {
            return Err(Error::NonCanonicalSet {
                n: set.n,
                indices: set.indices,
                reason,
            });
        }
        let q = q_value(&set, params)?;
        Ok(Self { set, q })
    }

    /// Any set, any deformation. Used for duality checks and controls.
    pub fn with_deformation(set: IndexSet, q: Complex<T>) -> Self {
        Self { set, q }
    }

    pub fn set(&self) -> &IndexSet {
        &self.set
    }

    fn full_mask(&self) -> usize {
        (1 << self.set.n) - 1
    }

    fn single(&self, row: usize, col: usize, value: Complex<T>) -> SparseMatrix<T> {
        SparseMatrix::from_triplets(1 << self.set.n, [(row, col, value)])
            .expect("pattern coordinates lie inside the site space")
    }

    pub fn e(&self) -> SparseMatrix<T> {
        let s = self.set.mask();
        self.single(s, s ^ self.full_mask(), Complex::one())
    }

    pub fn f(&self) -> SparseMatrix<T> {
        let s = self.set.mask();
        self.single(s ^ self.full_mask(), s, Complex::one())
    }

    pub fn h1(&self) -> SparseMatrix<T> {
        let s = self.set.mask();
        self.single(s, s, Complex::one())
    }

    pub fn h2(&self) -> SparseMatrix<T> {
        let c = self.set.mask() ^ self.full_mask();
        self.single(c, c, Complex::one())
    }

    /// `I + (q^c − 1) h_1 + (q^{−c} − 1) h_2`.
    pub fn qh(&self, power: QPower) -> SparseMatrix<T> {
        let c = T::lit(power.value());
        let up = principal_pow(self.q, c);
        let down = principal_pow(self.q, -c);
        let s = self.set.mask();
        let dim = 1usize << self.set.n;
        let mut diag = vec![Complex::<T>::one(); dim];
        diag[s] = up;
        diag[s ^ self.full_mask()] = down;
        SparseMatrix::diagonal(&diag)
    }
}

impl<T: Real> GeneratorRep<T> for FRep<T> {
    fn dim(&self) -> usize {
        1 << self.set.n
    }

    fn deformation(&self) -> Complex<T> {
        self.q
    }

    fn image(&self, x: AlgebraElement) -> SparseMatrix<T> {
        match x {
            AlgebraElement::E => self.e(),
            AlgebraElement::F => self.f(),
            AlgebraElement::H => &self.h1() - &self.h2(),
            AlgebraElement::QH(p) => self.qh(p),
        }
    }

    fn label(&self) -> String {
        format!("f{}", self.set.label())
    }
}

/// `π_i`: spin-½ generators at slot `i` with deformation `a_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiRep<T: Real> {
    n: usize,
    i: usize,
    a: Complex<T>,
}

impl<T: Real> PiRep<T> {
    pub fn new(i: usize, params: &JunctionParams<T>) -> Result<Self> {
        if i == 0 || i > params.n {
            return Err(Error::IndexOutOfRange {
                what: "copy",
                index: i,
                valid: format!("1..={}", params.n),
            });
        }
        Ok(Self {
            n: params.n,
            i,
            a: params.a[i - 1],
        })
    }

    fn local(&self, x: AlgebraElement) -> SparseMatrix<T> {
        let one = Complex::<T>::one();
        let entries: Vec<(usize, usize, Complex<T>)> = match x {
            AlgebraElement::E => vec![(0, 1, one)],
            AlgebraElement::F => vec![(1, 0, one)],
            AlgebraElement::H => vec![(0, 0, one), (1, 1, -one)],
            AlgebraElement::QH(p) => {
                let c = T::lit(p.value());
                vec![
                    (0, 0, principal_pow(self.a, c)),
                    (1, 1, principal_pow(self.a, -c)),
                ]
            }
        };
        SparseMatrix::from_triplets(2, entries).expect("2x2 generator")
    }
}

impl<T: Real> GeneratorRep<T> for PiRep<T> {
    fn dim(&self) -> usize {
        1 << self.n
    }

    fn deformation(&self) -> Complex<T> {
        self.a
    }

    fn image(&self, x: AlgebraElement) -> SparseMatrix<T> {
        let left = SparseMatrix::identity(1 << (self.i - 1));
        let right = SparseMatrix::identity(1 << (self.n - self.i));
        kron_all(&[left, self.local(x), right]).expect("single-site dimension")
    }

    fn label(&self) -> String {
        format!("pi{}", self.i)
    }
}

/// Either family of symmetry generators.
#[derive(Clone, Debug, PartialEq)]
pub enum SymmetryRep<T: Real> {
    F(FRep<T>),
    Pi(PiRep<T>),
}

impl<T: Real> GeneratorRep<T> for SymmetryRep<T> {
    fn dim(&self) -> usize {
        match self {
            SymmetryRep::F(r) => r.dim(),
            SymmetryRep::Pi(r) => r.dim(),
        }
    }

    fn deformation(&self) -> Complex<T> {
        match self {
            SymmetryRep::F(r) => r.deformation(),
            SymmetryRep::Pi(r) => r.deformation(),
        }
    }

    fn image(&self, x: AlgebraElement) -> SparseMatrix<T> {
        match self {
            SymmetryRep::F(r) => r.image(x),
            SymmetryRep::Pi(r) => r.image(x),
        }
    }

    fn label(&self) -> String {
        match self {
            SymmetryRep::F(r) => r.label(),
            SymmetryRep::Pi(r) => r.label(),
        }
    }
}

/// Every canonical `f_s` followed by every `π_i`.
pub fn all_symmetry_reps<T: Real>(params: &JunctionParams<T>) -> Result<Vec<SymmetryRep<T>>> {
    let mut reps = Vec::new();
    for s in enumerate_index_sets(params.n) {
        reps.push(SymmetryRep::F(FRep::new(s, params)?));
    }
    for i in 1..=params.n {
        reps.push(SymmetryRep::Pi(PiRep::new(i, params)?));
    }
    Ok(reps)
}

pub fn f_rep<T: Real>(
    s: &IndexSet,
    x: AlgebraElement,
    params: &JunctionParams<T>,
) -> Result<SparseMatrix<T>> {
    Ok(FRep::new(s.clone(), params)?.image(x))
}

pub fn pi_rep<T: Real>(
    i: usize,
    x: AlgebraElement,
    params: &JunctionParams<T>,
) -> Result<SparseMatrix<T>> {
    Ok(PiRep::new(i, params)?.image(x))
}

/// `Δ^{(N)}(x)` in the N-fold tensor power of `rep`, site 1 leftmost.
pub fn coproduct_rep<T: Real, R: GeneratorRep<T> + ?Sized>(
    rep: &R,
    sites: usize,
    x: AlgebraElement,
) -> Result<SparseMatrix<T>> {
    if sites == 0 {
        return Err(Error::InvalidArgument("need at least one site".into()));
    }
    let local = rep.image(x);
    match x {
        AlgebraElement::QH(_) => kron_all(&vec![local; sites]),
        AlgebraElement::H => {
            let id = SparseMatrix::identity(rep.dim());
            spread(sites, &local, &id, &id)
        }
        AlgebraElement::E | AlgebraElement::F => {
            let left = rep.image(AlgebraElement::QH(QPower::MinusHalf));
            let right = rep.image(AlgebraElement::QH(QPower::Half));
            spread(sites, &local, &left, &right)
        }
    }
}

/// `Δ^{(N)}(𝒬) = Σ_k I^{⊗(k−1)} ⊗ 𝒬 ⊗ (q^h)^{⊗(N−k)}`.
pub fn charge_coproduct<T: Real, R: GeneratorRep<T> + ?Sized>(
    rep: &R,
    sites: usize,
    boundary_q: Complex<T>,
) -> Result<SparseMatrix<T>> {
    if sites == 0 {
        return Err(Error::InvalidArgument("need at least one site".into()));
    }
    let charge = rep.charge(boundary_q)?;
    let id = SparseMatrix::identity(rep.dim());
    let k2 = rep.image(AlgebraElement::QH(QPower::One));
    spread(sites, &charge, &id, &k2)
}

/// `Σ_k left^{⊗(k−1)} ⊗ local ⊗ right^{⊗(N−k)}`.
fn spread<T: Real>(
    sites: usize,
    local: &SparseMatrix<T>,
    left: &SparseMatrix<T>,
    right: &SparseMatrix<T>,
) -> Result<SparseMatrix<T>> {
    let mut total: Option<SparseMatrix<T>> = None;
    for k in 0..sites {
        let mut factors = Vec::with_capacity(sites);
        factors.extend(std::iter::repeat_n(left.clone(), k));
        factors.push(local.clone());
        factors.extend(std::iter::repeat_n(right.clone(), sites - k - 1));
        let term = kron_all(&factors)?;
        total = Some(match total {
            None => term,
            Some(acc) => acc.try_add(&term)?,
        });
    }
    Ok(total.expect("at least one site"))
}

/// Single-site charge `f_s(𝒬_s)`.
pub fn boundary_charge<T: Real>(
    s: &IndexSet,
    boundary_q: Complex<T>,
    params: &JunctionParams<T>,
) -> Result<SparseMatrix<T>> {
    FRep::new(s.clone(), params)?.charge(boundary_q)
}

/// `‖x‖_F / max(1, scale)`.
pub(crate) fn scaled_residual<T: Real>(x: &SparseMatrix<T>, scale: T) -> f64 {
    let denom = scale.max(T::one());
    (x.frobenius_norm() / denom)
        .to_f64()
        .unwrap_or(f64::INFINITY)
}

fn fmt_complex<T: Real>(z: Complex<T>) -> String {
    let re = z.re.to_f64().unwrap_or(f64::NAN);
    let im = z.im.to_f64().unwrap_or(f64::NAN);
    format!("{re:e}{:+e}i", im)
}

/// Defining relations of `U_q(sl2)` for a family of images:
/// `[h,e] = 2e`, `[h,f] = −2f`, `(q − q⁻¹)[e,f] = q^h − q^{−h}`,
/// `(q^{h/2})² = q^h` and `q^{h/2} e q^{−h/2} = q e`. The third relation
/// is used multiplied through so it stays meaningful when `q² = 1`.
pub fn uqsl2_reports<T: Real>(
    label: &str,
    q: Complex<T>,
    images: impl Fn(AlgebraElement) -> Result<SparseMatrix<T>>,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let e = images(AlgebraElement::E)?;
    let f = images(AlgebraElement::F)?;
    let h = images(AlgebraElement::H)?;
    let k = images(AlgebraElement::QH(QPower::Half))?;
    let k_inv = images(AlgebraElement::QH(QPower::MinusHalf))?;
    let k2 = images(AlgebraElement::QH(QPower::One))?;
    let k2_inv = images(AlgebraElement::QH(QPower::MinusOne))?;
    let two = Complex::new(T::lit(2.0), T::zero());

    let he = commutator(&h, &e)?.axpy(-two, &e)?;
    let hf = commutator(&h, &f)?.axpy(two, &f)?;
    let ef = commutator(&e, &f)?
        .scale(q - q.inv())
        .try_sub(&k2.try_sub(&k2_inv)?)?;
    let kk = (&k * &k).try_sub(&k2)?;
    let conj = (&(&k * &e) * &k_inv).axpy(-q, &e)?;

    let rows = [
        ("uqsl2.h_e", relative_residual(&he, &e)),
        ("uqsl2.h_f", relative_residual(&hf, &f)),
        ("uqsl2.e_f", relative_residual(&ef, &k2)),
        ("uqsl2.k_half", relative_residual(&kk, &k2)),
        ("uqsl2.k_e", relative_residual(&conj, &e)),
    ];
    Ok(rows
        .into_iter()
        .map(|(name, r)| {
            CheckReport::new(name, r, tol)
                .with("rep", label)
                .with("q", fmt_complex(q))
                .with(
                    "q_squared_minus_one",
                    format!(
                        "{:e}",
                        (q * q - Complex::one()).norm().to_f64().unwrap_or(f64::NAN)
                    ),
                )
        })
        .collect())
}

pub fn check_uqsl2<T: Real, R: GeneratorRep<T> + ?Sized>(
    rep: &R,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    uqsl2_reports(&rep.label(), rep.deformation(), |x| Ok(rep.image(x)), tol)
}

/// Relations for the N-site coproduct images.
pub fn check_uqsl2_coproduct<T: Real, R: GeneratorRep<T> + ?Sized>(
    rep: &R,
    sites: usize,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let label = format!("{}^(x{sites})", rep.label());
    let reports = uqsl2_reports(
        &label,
        rep.deformation(),
        |x| coproduct_rep(rep, sites, x),
        tol,
    )?;
    Ok(reports
        .into_iter()
        .map(|r| r.with("sites", sites.to_string()))
        .collect())
}

/// `‖[Θ(𝕌_l), rep^{⊗N}(Δ^{(N)}(x))]‖_F` for every representation, element
/// of [`AlgebraElement::SWEEP`] and bond `l`. Residuals are scaled by
/// `max(1, ‖Θ‖·‖Δ(x)‖)`; reports come back in input order.
pub fn check_symmetry<T: Real>(
    ctx: &RepContext<T>,
    reps: &[SymmetryRep<T>],
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let thetas: Vec<SparseMatrix<T>> = (1..ctx.sites())
        .map(|l| ctx.junction_u(l))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, AlgebraElement)> = (0..reps.len())
        .flat_map(|r| AlgebraElement::SWEEP.into_iter().map(move |x| (r, x)))
        .collect();
    let per_job: Vec<Result<Vec<CheckReport>>> = jobs
        .par_iter()
        .map(|&(r, x)| {
            let rep = &reps[r];
            let image = coproduct_rep(rep, ctx.sites(), x)?;
            thetas
                .iter()
                .enumerate()
                .map(|(idx, theta)| {
                    let c = commutator(theta, &image)?;
                    let scale = theta.frobenius_norm() * image.frobenius_norm();
                    Ok(
                        CheckReport::new("symmetry", scaled_residual(&c, scale), tol)
                            .with("rep", rep.label())
                            .with("element", x.name())
                            .with("l", (idx + 1).to_string())
                            .with("q", fmt_complex(rep.deformation())),
                    )
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for chunk in per_job {
        out.extend(chunk?);
    }
    Ok(out)
}

/// Single-site boundary relations at a common boundary constant `Q`:
/// `[f_s(𝒬_s), M_{s'}] = 0` for every pair, `[f_s(x), M_{s'}] = 0` for
/// `s ≠ s'`, and the expected failure of raw `f_s(e|f|h)` against `M_s`.
/// Sets with `q_s² = 1` have no charge and are left out of the charge rows.
pub fn check_boundary_residual_symmetry<T: Real>(
    params: &JunctionParams<T>,
    boundary_q: Complex<T>,
    tol: f64,
) -> Result<Vec<CheckReport>> {
    let sets = enumerate_index_sets(params.n);
    let reps: Vec<FRep<T>> = sets
        .iter()
        .map(|s| FRep::new(s.clone(), params))
        .collect::<Result<_>>()?;
    let ms: Vec<SparseMatrix<T>> = sets
        .iter()
        .map(|s| boundary_m(s, boundary_q, params))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (i, rep) in reps.iter().enumerate() {
        let charge = match rep.charge(boundary_q) {
            Ok(c) => Some(c),
            Err(Error::DegenerateDeformation { .. }) => None,
            Err(e) => return Err(e),
        };
        for (j, m) in ms.iter().enumerate() {
            let meta = |r: CheckReport| {
                r.with("charge_set", sets[i].label())
                    .with("boundary_set", sets[j].label())
            };
            if let Some(charge) = &charge {
                let c = commutator(charge, m)?;
                let scale = charge.frobenius_norm() * m.frobenius_norm();
                out.push(meta(CheckReport::new(
                    "boundary.charge",
                    scaled_residual(&c, scale),
                    tol,
                )));
            }
            for x in [AlgebraElement::E, AlgebraElement::F, AlgebraElement::H] {
                let img = rep.image(x);
                let c = commutator(&img, m)?;
                let r = scaled_residual(&c, img.frobenius_norm() * m.frobenius_norm());
                let report = if i == j {
                    CheckReport::expect_violation("boundary.broken", r, 1e-4)
                } else {
                    CheckReport::new("boundary.preserved", r, tol)
                };
                out.push(meta(report).with("element", x.name()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::solve_hecke;
    use crate::linalg::elementary;
    use crate::linalg::kron;

    type M = SparseMatrix<f64>;

    fn e(a: usize, b: usize) -> M {
        elementary(a, b)
    }

    fn set(n: usize, idx: &[usize]) -> IndexSet {
        IndexSet::new(n, idx.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let sets: Vec<String> = enumerate_index_sets(4)
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(
            sets,
            ["{}", "{1}", "{2}", "{3}", "{4}", "{2,3}", "{2,4}", "{3,4}"]
        );
        assert_eq!(enumerate_index_sets(3).len(), 4);
        assert_eq!(enumerate_index_sets(5).len(), 16);
        assert_eq!(enumerate_index_sets(1).len(), 1);
        assert_eq!(enumerate_index_sets(2).len(), 2);
    }

    #[test]
    fn canonical_validation() {
        assert!(IndexSet::new(4, vec![1, 2]).is_err());
        assert!(IndexSet::new(3, vec![1, 2]).is_err());
        assert!(IndexSet::new(3, vec![2, 1]).is_err());
        assert!(IndexSet::new(3, vec![4]).is_err());
        assert!(IndexSet::unrestricted(4, vec![1, 2]).is_ok());
        assert_eq!(
            set(4, &[2, 4]).bar(),
            IndexSet::unrestricted(4, vec![1, 3]).unwrap()
        );
        assert_eq!(set(4, &[2, 3]).bar(), set(4, &[2, 3]));
    }

    #[test]
    fn f_rep_pattern_example() {
        let p = solve_hecke::<f64>(3, 0.7).unwrap();
        let got = f_rep(&set(3, &[2]), AlgebraElement::E, &p).unwrap();
        let expected = kron(&kron(&e(1, 2), &e(2, 1)).unwrap(), &e(1, 2)).unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn half_power_squares_to_full_power() {
        let p = solve_hecke::<f64>(3, 0.7).unwrap();
        for s in enumerate_index_sets(3) {
            let r = FRep::new(s, &p).unwrap();
            let half = r.qh(QPower::Half);
            assert!((&(&half * &half) - &r.qh(QPower::One)).frobenius_norm() < 1e-14);
        }
    }

    #[test]
    fn idempotents_are_orthogonal() {
        let p = solve_hecke::<f64>(4, 0.5).unwrap();
        for s in enumerate_index_sets(4) {
            let r = FRep::new(s, &p).unwrap();
            let (h1, h2) = (r.h1(), r.h2());
            assert!((&h1 * &h2).is_zero());
            assert_eq!(&h1 * &h1, h1);
            assert_eq!(&h2 * &h2, h2);
        }
    }

    #[test]
    fn pi_rep_examples() {
        let p = solve_hecke::<f64>(2, 0.7).unwrap();
        let got = pi_rep(1, AlgebraElement::E, &p).unwrap();
        assert_eq!(got, kron(&e(1, 2), &M::identity(2)).unwrap());
        for x in AlgebraElement::SWEEP {
            for y in AlgebraElement::SWEEP {
                let c = commutator(&pi_rep(1, x, &p).unwrap(), &pi_rep(2, y, &p).unwrap()).unwrap();
                assert!(c.is_zero());
            }
        }
        assert!(pi_rep(3, AlgebraElement::E, &p).is_err());
    }

    #[test]
    fn coproduct_single_site_is_identity_map() {
        let p = solve_hecke::<f64>(3, 0.7).unwrap();
        let r = FRep::new(set(3, &[1]), &p).unwrap();
        for x in AlgebraElement::SWEEP {
            assert_eq!(coproduct_rep(&r, 1, x).unwrap(), r.image(x));
        }
    }

    #[test]
    fn charge_matches_single_site_display() {
        let p = solve_hecke::<f64>(3, 0.7).unwrap();
        let big_q = Complex::from_polar(1.0, 0.9);
        let s = IndexSet::empty(3);
        let q0 = q_value(&s, &p).unwrap();
        let x0 = (big_q - big_q.inv()) / (q0 - q0.inv());
        let got = boundary_charge(&s, big_q, &p).unwrap();
        let expected = M::from_triplets(
            8,
            [
                (0, 0, q0 * x0 - x0),
                (0, 7, Complex::one()),
                (7, 0, Complex::one()),
                (7, 7, x0 / q0 - x0),
            ],
        )
        .unwrap();
        assert!((&got - &expected).frobenius_norm() < 1e-14);
    }

    #[test]
    fn element_parsing() {
        assert_eq!(AlgebraElement::parse("E").unwrap(), AlgebraElement::E);
        assert_eq!(
            AlgebraElement::parse("q^h").unwrap(),
            AlgebraElement::QH(QPower::One)
        );
        assert!(AlgebraElement::parse("g").is_err());
    }
}
