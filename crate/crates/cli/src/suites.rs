use junction::hecke::JunctionParams;
use junction::integrable::{
    check_crossing, check_reflection, check_transfer_commutativity, check_transfer_symmetry,
    check_unitarity, check_ybe, crossing_shifts, k_matrix, r_matrix, spectral_pairs,
    spectral_samples, CrossingVariant, InverseStrategy, TransferContext,
};
use junction::qsym::{
    all_symmetry_reps, check_boundary_residual_symmetry, check_symmetry, check_uqsl2,
    check_uqsl2_coproduct, enumerate_index_sets, FRep, IndexSet, PiRep,
};
use junction::tl_rep::{
    boundary_m, check_blob, check_product_blob, check_tl, two_site_u, BoundaryParams, RepContext,
};
use junction::{CheckReport, Complex64};
use rayon::prelude::*;

use crate::config::{complex, InverseMode, RunConfig};
use crate::failure::{CoreContext, Failure};

/// Metadata marking exploratory rows that do not count towards the verdict.
pub const ROLE_KEY: &str = "role";
pub const CANDIDATE: &str = "candidate";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Tl,
    Blob,
    Uqsl2,
    Symmetry,
    BoundarySymmetry,
    Ybe,
    Unitarity,
    Crossing,
    Reflection,
    Transfer,
    All,
}

impl Suite {
    pub const EACH: [Suite; 10] = [
        Suite::Tl,
        Suite::Blob,
        Suite::Uqsl2,
        Suite::Symmetry,
        Suite::BoundarySymmetry,
        Suite::Ybe,
        Suite::Unitarity,
        Suite::Crossing,
        Suite::Reflection,
        Suite::Transfer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Tl => "tl",
            Suite::Blob => "blob",
            Suite::Uqsl2 => "uqsl2",
            Suite::Symmetry => "symmetry",
            Suite::BoundarySymmetry => "boundary-symmetry",
            Suite::Ybe => "ybe",
            Suite::Unitarity => "unitarity",
            Suite::Crossing => "crossing",
            Suite::Reflection => "reflection",
            Suite::Transfer => "transfer",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::EACH.to_vec(),
            s => vec![s],
        }
    }
}

/// Solved parameters plus the perturbed copy used for `Θ`.
pub struct Setup {
    pub config: RunConfig,
    pub params: JunctionParams<f64>,
    pub theta_params: JunctionParams<f64>,
    pub eta_scan: bool,
}

impl Setup {
    fn q(&self) -> Complex64 {
        complex(self.config.boundary_q)
    }

    fn zeta(&self) -> Complex64 {
        complex(self.config.zeta)
    }

    fn tol(&self) -> f64 {
        self.config.tolerance
    }

    fn mu(&self) -> f64 {
        self.config.mu
    }

    fn bulk_context(&self, params: &JunctionParams<f64>) -> Result<RepContext<f64>, Failure> {
        self.config.require_bulk()?;
        RepContext::with_max_dim(params.clone(), self.config.sites, self.config.max_dim)
            .stage("context")
    }

    /// The configured set, or every canonical set.
    fn boundary_sets(&self) -> Result<Vec<IndexSet>, Failure> {
        match &self.config.boundary_set {
            Some(idx) => Ok(vec![
                IndexSet::new(self.config.n, idx.clone()).stage("boundary set")?
            ]),
            None => Ok(enumerate_index_sets(self.config.n)),
        }
    }

    fn pairs(&self) -> Vec<(Complex64, Complex64)> {
        spectral_pairs(self.config.samples, self.config.seed, self.mu())
    }

    fn singles(&self) -> Vec<Complex64> {
        spectral_samples(self.config.samples, self.config.seed, self.mu())
    }
}

pub fn run_suite(setup: &Setup, suite: Suite) -> Result<Vec<CheckReport>, Failure> {
    let stage = suite.name();
    match suite {
        Suite::Tl => check_tl(&setup.bulk_context(&setup.theta_params)?, setup.tol()).stage(stage),
        Suite::Blob => blob(setup),
        Suite::Uqsl2 => uqsl2(setup),
        Suite::Symmetry => {
            let ctx = setup.bulk_context(&setup.theta_params)?;
            let reps = all_symmetry_reps(&setup.params).stage(stage)?;
            check_symmetry(&ctx, &reps, setup.tol()).stage(stage)
        }
        Suite::BoundarySymmetry => {
            check_boundary_residual_symmetry(&setup.params, setup.q(), setup.tol()).stage(stage)
        }
        Suite::Ybe => {
            let u = two_site_u(&setup.theta_params).stage(stage)?;
            Ok(vec![
                check_ybe(&u, setup.mu(), &setup.pairs(), setup.tol()).stage(stage)?
            ])
        }
        Suite::Unitarity => {
            let u = two_site_u(&setup.theta_params).stage(stage)?;
            Ok(vec![check_unitarity(
                &u,
                setup.mu(),
                &setup.singles(),
                setup.tol(),
            )
            .stage(stage)?])
        }
        Suite::Crossing => crossing(setup),
        Suite::Reflection => reflection(setup),
        Suite::Transfer => transfer(setup),
        Suite::All => unreachable!("expanded before dispatch"),
    }
}

fn blob(setup: &Setup) -> Result<Vec<CheckReport>, Failure> {
    let ctx = setup.bulk_context(&setup.theta_params)?;
    let mut out = Vec::new();
    for s in setup.boundary_sets()? {
        let m = ctx
            .on_first_site(&boundary_m(&s, setup.q(), &setup.params).stage("blob")?)
            .stage("blob")?;
        let bp = BoundaryParams::for_index_set(setup.q(), setup.zeta(), &s, &setup.params)
            .stage("blob")?;
        out.extend(
            check_blob(&ctx, &m, &bp, setup.tol())
                .stage("blob")?
                .into_iter()
                .map(|r| r.with("set", s.label())),
        );
    }
    let qs = vec![setup.q(); setup.config.n];
    out.extend(check_product_blob(&ctx, &qs, setup.tol()).stage("blob")?);
    Ok(out)
}

fn uqsl2(setup: &Setup) -> Result<Vec<CheckReport>, Failure> {
    let p = &setup.params;
    let mut out = Vec::new();
    for s in enumerate_index_sets(p.n) {
        let rep = FRep::new(s, p).stage("uqsl2")?;
        out.extend(check_uqsl2(&rep, setup.tol()).stage("uqsl2")?);
        out.extend(check_uqsl2_coproduct(&rep, setup.config.sites, setup.tol()).stage("uqsl2")?);
    }
    for i in 1..=p.n {
        let rep = PiRep::new(i, p).stage("uqsl2")?;
        out.extend(check_uqsl2(&rep, setup.tol()).stage("uqsl2")?);
    }
    Ok(out)
}

fn crossing(setup: &Setup) -> Result<Vec<CheckReport>, Failure> {
    let u = two_site_u(&setup.theta_params).stage("crossing")?;
    let samples = setup.singles();
    let mu = setup.mu();
    let run = |eta: Complex64, variant| {
        check_crossing(&u, &setup.params, mu, eta, variant, &samples, setup.tol()).stage("crossing")
    };
    if !setup.eta_scan {
        let eta = setup
            .config
            .eta
            .map(complex)
            .unwrap_or(Complex64::new(0.0, mu));
        return Ok(vec![run(eta, CrossingVariant::Twisted)?]);
    }
    let shifts: Vec<(String, Complex64)> = if setup.config.eta_scan.is_empty() {
        crossing_shifts(mu)
    } else {
        setup
            .config
            .eta_scan
            .iter()
            .map(|&p| (format!("{},{}", p[0], p[1]), complex(p)))
            .collect()
    };
    let mut out = Vec::new();
    let mut passing = Vec::new();
    for (label, eta) in shifts {
        for variant in [CrossingVariant::Plain, CrossingVariant::Twisted] {
            let r = run(eta, variant)?;
            if r.passed {
                passing.push(format!("{label}/{}", variant.name()));
            }
            out.push(r.with("eta_label", label.clone()).with(ROLE_KEY, CANDIDATE));
        }
    }
    let verdict = if passing.is_empty() {
        f64::INFINITY
    } else {
        0.0
    };
    out.push(
        CheckReport::new("crossing.scan", verdict, setup.tol()).with("passing", passing.join(";")),
    );
    Ok(out)
}

fn reflection(setup: &Setup) -> Result<Vec<CheckReport>, Failure> {
    let u = two_site_u(&setup.theta_params).stage("reflection")?;
    let mu = setup.mu();
    let pairs = setup.pairs();
    let r_builder = |l| r_matrix(l, &u, mu);
    let mut out = Vec::new();
    for s in setup.boundary_sets()? {
        let m = boundary_m(&s, setup.q(), &setup.params).stage("reflection")?;
        let bp = BoundaryParams::for_index_set(setup.q(), setup.zeta(), &s, &setup.params)
            .stage("reflection")?;
        let r = check_reflection(
            r_builder,
            |l| Ok(k_matrix(l, &m, &bp, mu)),
            &pairs,
            setup.tol(),
        )
        .stage("reflection")?;
        out.push(r.with("set", s.label()));
    }
    Ok(out)
}

fn transfer(setup: &Setup) -> Result<Vec<CheckReport>, Failure> {
    let mut boundaries: Vec<Option<IndexSet>> = Vec::new();
    if setup.config.boundary_set.is_none() {
        boundaries.push(None);
    }
    boundaries.extend(setup.boundary_sets()?.into_iter().map(Some));
    let strategy = match setup.config.inverse {
        InverseMode::Lu => InverseStrategy::DenseLu,
        InverseMode::Unitarity => InverseStrategy::Unitarity,
    };
    let pairs = setup.pairs();
    let singles = setup.singles();
    let per_boundary: Vec<Result<Vec<CheckReport>, Failure>> = boundaries
        .into_par_iter()
        .map(|b| {
            let ctx = RepContext::with_max_dim(
                setup.theta_params.clone(),
                setup.config.sites,
                setup.config.max_dim,
            )
            .stage("transfer")?;
            let tc = TransferContext::with_matched_boundary(ctx, setup.q(), setup.zeta(), b)
                .stage("transfer")?
                .with_strategy(strategy);
            let mut rows =
                vec![check_transfer_commutativity(&tc, &pairs, setup.tol()).stage("transfer")?];
            rows.extend(check_transfer_symmetry(&tc, &singles, setup.tol()).stage("transfer")?);
            Ok(rows)
        })
        .collect();
    let mut out = Vec::new();
    for rows in per_boundary {
        out.extend(rows?);
    }
    Ok(out)
}

/// A row counts towards the verdict unless it is a scan candidate.
pub fn counts(report: &CheckReport) -> bool {
    report.metadata.get(ROLE_KEY).map(String::as_str) != Some(CANDIDATE)
}
