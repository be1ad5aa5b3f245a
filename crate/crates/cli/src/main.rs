mod config;
mod failure;
mod suites;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use junction::hecke::solve_hecke_seeded;
use junction::integrable::{k_matrix, m_matrix, r_check, v_matrix_variant, CrossingVariant};
use junction::linalg::io::{to_coordinate, to_json};
use junction::qsym::{f_rep, AlgebraElement, IndexSet};
use junction::tl_rep::{boundary_m, two_site_u, BoundaryParams, RepContext};
use junction::{CheckReport, Matrix, SparseMatrix};
use serde::Serialize;

use config::{complex, parse_pair, parse_set_arg, InverseMode, OutputFormat, RunConfig, SetArg};
use failure::{CoreContext, Failure};
use suites::{counts, run_suite, Setup, Suite};

#[derive(Parser, Debug)]
#[command(
    name = "junction",
    version,
    about = "Junction Temperley-Lieb representations and their checks"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config document; `-` reads standard input.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Number of chain sites.
    #[arg(long = "sites", short = 'N', global = true)]
    sites: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    mu: Option<f64>,
    /// Boundary index set, e.g. `2,3` or `{}`.
    #[arg(long = "set", global = true, value_parser = parse_set_arg, allow_hyphen_values = true)]
    set: Option<SetArg>,
    /// Spectral parameter as `RE,IM`.
    #[arg(long, global = true, value_parser = parse_pair, allow_hyphen_values = true)]
    lambda: Option<[f64; 2]>,
    /// Crossing shift as `RE,IM`.
    #[arg(long, global = true, value_parser = parse_pair, allow_hyphen_values = true)]
    eta: Option<[f64; 2]>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Scale every a_i in Θ by (1 + PCT/100).
    #[arg(long, global = true, value_name = "PCT", allow_hyphen_values = true)]
    perturb: Option<f64>,
    /// Scan crossing shifts and matrix variants.
    #[arg(long, global = true)]
    eta_scan: bool,
    #[arg(long, global = true, value_name = "K")]
    workers: Option<usize>,
    #[arg(long, global = true)]
    max_dim: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long = "tol", global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true, value_enum)]
    inverse: Option<InverseMode>,
    /// Write matrices here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the Hecke condition for the configured n and μ.
    SolveHecke,
    /// Emit a representation matrix.
    Gen {
        #[command(subcommand)]
        object: GenObject,
    },
    /// Run verification suites and print one JSON line per check.
    Check {
        #[arg(value_enum)]
        suite: Suite,
    },
}

#[derive(Subcommand, Debug)]
enum GenObject {
    /// Θ(𝕌_l) on the N-site chain.
    JunctionU { l: usize },
    /// ℳ_s on one junction site.
    BoundaryM {
        #[arg(value_parser = parse_set_arg, allow_hyphen_values = true)]
        set: SetArg,
    },
    /// f_s(x) on one junction site.
    FRep {
        #[arg(value_parser = parse_set_arg, allow_hyphen_values = true)]
        set: SetArg,
        element: String,
    },
    /// Ř(λ) on two junction sites.
    RCheck,
    /// K(λ) on one junction site; `--set` picks ℳ_s, otherwise u0 = I.
    K,
    /// The crossing matrix.
    V {
        #[arg(long)]
        twisted: bool,
    },
    /// M = VᵗV.
    M,
}

impl Common {
    fn apply(&self, c: &mut RunConfig) {
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = self.$field.clone() {
                    c.$field = v;
                }
            };
        }
        set!(n);
        set!(sites);
        set!(mu);
        set!(lambda);
        set!(perturb);
        set!(max_dim);
        set!(seed);
        set!(samples);
        set!(tolerance);
        set!(inverse);
        if let Some(f) = self.format {
            c.output_format = f;
        }
        if let Some(s) = &self.set {
            c.boundary_set = Some(s.0.clone());
        }
        if self.eta.is_some() {
            c.eta = self.eta;
        }
        if self.workers.is_some() {
            c.workers = self.workers;
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !matches!(f, Failure::ChecksFailed { .. }) {
                eprintln!("junction: {f}");
            }
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut config = RunConfig::load(cli.common.config.as_deref())?;
    cli.common.apply(&mut config);
    config.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = config.workers {
        pool = pool.num_threads(k);
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::Config(format!("worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::SolveHecke => solve(&config),
        Command::Gen { object } => generate(&config, object, cli.common.output.as_ref()),
        Command::Check { suite } => check(config.clone(), *suite, cli.common.eta_scan),
    })
}

fn stdout_line(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| Failure::Io(e.to_string()))
}

#[derive(Serialize)]
struct SolveOutput {
    #[serde(flatten)]
    summary: junction::hecke::HeckeSummary,
    tolerance: f64,
    converged: bool,
}

fn solve(config: &RunConfig) -> Result<(), Failure> {
    let params =
        solve_hecke_seeded::<f64>(config.n, config.mu, config.seed).stage("solve-hecke")?;
    let summary = params.summary();
    let converged = summary.max_residual <= config.tolerance;
    let out = SolveOutput {
        summary,
        tolerance: config.tolerance,
        converged,
    };
    stdout_line(&serde_json::to_string(&out).expect("summary serializes"))?;
    if converged {
        Ok(())
    } else {
        Err(Failure::NoConvergence(format!(
            "max residual {:e} above tolerance {:e}",
            out.summary.max_residual, config.tolerance
        )))
    }
}

fn generate(
    config: &RunConfig,
    object: &GenObject,
    output: Option<&PathBuf>,
) -> Result<(), Failure> {
    let params =
        solve_hecke_seeded::<f64>(config.n, config.mu, config.seed).stage("solve-hecke")?;
    let q = complex(config.boundary_q);
    let set = |idx: &[usize]| IndexSet::new(config.n, idx.to_vec()).stage("gen");
    let matrix: Matrix = match object {
        GenObject::JunctionU { l } => {
            let ctx =
                RepContext::with_max_dim(params, config.sites, config.max_dim).stage("gen")?;
            ctx.junction_u(*l).stage("gen")?
        }
        GenObject::BoundaryM { set: idx } => boundary_m(&set(&idx.0)?, q, &params).stage("gen")?,
        GenObject::FRep { set: idx, element } => {
            let x = AlgebraElement::parse(element).stage("gen")?;
            f_rep(&set(&idx.0)?, x, &params).stage("gen")?
        }
        GenObject::RCheck => {
            let u = two_site_u(&params).stage("gen")?;
            r_check(complex(config.lambda), &u, config.mu)
        }
        GenObject::K => {
            let (u0, bp) = match &config.boundary_set {
                Some(idx) => {
                    let s = set(idx)?;
                    let bp = BoundaryParams::for_index_set(q, complex(config.zeta), &s, &params)
                        .stage("gen")?;
                    (boundary_m(&s, q, &params).stage("gen")?, bp)
                }
                None => (
                    SparseMatrix::identity(1 << config.n),
                    BoundaryParams::new(q, complex(config.zeta), params.q).stage("gen")?,
                ),
            };
            k_matrix(complex(config.lambda), &u0, &bp, config.mu)
        }
        GenObject::V { twisted } => {
            let variant = if *twisted {
                CrossingVariant::Twisted
            } else {
                CrossingVariant::Plain
            };
            v_matrix_variant(&params, variant).stage("gen")?
        }
        GenObject::M => m_matrix(&params).stage("gen")?,
    };
    let text = match config.output_format {
        OutputFormat::Json => {
            let mut s = to_json(&matrix);
            s.push('\n');
            s
        }
        OutputFormat::Coord => to_coordinate(&matrix),
    };
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

#[derive(Serialize)]
struct Line<'a> {
    suite: &'a str,
    #[serde(flatten)]
    report: &'a CheckReport,
}

#[derive(Serialize)]
struct Summary {
    total: usize,
    counted: usize,
    passed: usize,
    failed: usize,
    max_residual: f64,
    suites: Vec<&'static str>,
}

fn check(config: RunConfig, suite: Suite, eta_scan: bool) -> Result<(), Failure> {
    let params =
        solve_hecke_seeded::<f64>(config.n, config.mu, config.seed).stage("solve-hecke")?;
    let theta_params = if config.perturb != 0.0 {
        params.with_scaled_a(1.0 + config.perturb / 100.0)
    } else {
        params.clone()
    };
    let eta_scan = eta_scan || !config.eta_scan.is_empty();
    let setup = Setup {
        config,
        params,
        theta_params,
        eta_scan,
    };
    let chosen = suite.expand();
    // Suites run concurrently; results are collected back in suite order.
    let results: Vec<Result<Vec<CheckReport>, Failure>> = {
        use rayon::prelude::*;
        chosen.par_iter().map(|&s| run_suite(&setup, s)).collect()
    };
    let mut rows: Vec<(Suite, CheckReport)> = Vec::new();
    for (s, r) in chosen.iter().zip(results) {
        rows.extend(r?.into_iter().map(|rep| (*s, rep)));
    }
    for (s, report) in &rows {
        let line = Line {
            suite: s.name(),
            report,
        };
        stdout_line(&serde_json::to_string(&line).expect("report serializes"))?;
    }
    let counted: Vec<&CheckReport> = rows.iter().map(|(_, r)| r).filter(|r| counts(r)).collect();
    let failed = counted.iter().filter(|r| !r.passed).count();
    let summary = Summary {
        total: rows.len(),
        counted: counted.len(),
        passed: counted.len() - failed,
        failed,
        max_residual: counted.iter().map(|r| r.residual).fold(0.0, f64::max),
        suites: chosen.iter().map(|s| s.name()).collect(),
    };
    stdout_line(&serde_json::json!({ "summary": summary }).to_string())?;
    if failed > 0 {
        Err(Failure::ChecksFailed { failed })
    } else {
        Ok(())
    }
}
