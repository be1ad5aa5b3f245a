use std::fs;
use std::io::Read;
use std::path::Path;

use junction::tl_rep::DEFAULT_MAX_DIM;
use junction::Complex64;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

pub const MAX_DIM_ENV: &str = "JUNCTION_MAX_DIM";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    #[serde(alias = "coordinate-text")]
    #[value(alias = "coordinate-text")]
    Coord,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InverseMode {
    Lu,
    Unitarity,
}

/// Complex numbers are written as `[re, im]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n: usize,
    #[serde(rename = "N", alias = "sites")]
    pub sites: usize,
    pub mu: f64,
    #[serde(rename = "Q", alias = "boundary_q")]
    pub boundary_q: [f64; 2],
    pub zeta: [f64; 2],
    pub boundary_set: Option<Vec<usize>>,
    pub eta: Option<[f64; 2]>,
    pub eta_scan: Vec<[f64; 2]>,
    pub lambda: [f64; 2],
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_dim: usize,
    pub output_format: OutputFormat,
    pub perturb: f64,
    pub inverse: InverseMode,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 3,
            sites: 2,
            mu: 0.7,
            boundary_q: [0.9f64.cos(), 0.9f64.sin()],
            zeta: [0.0, 0.3],
            boundary_set: None,
            eta: None,
            eta_scan: Vec::new(),
            lambda: [0.3, 0.2],
            samples: 5,
            seed: 42,
            tolerance: 1e-9,
            max_dim: DEFAULT_MAX_DIM,
            output_format: OutputFormat::Json,
            perturb: 0.0,
            inverse: InverseMode::Lu,
            workers: None,
        }
    }
}

pub fn complex(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

/// `RE,IM` or a bare real number.
pub fn parse_pair(text: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| format!("bad number {s:?}: {e}"))
    };
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("expected RE,IM but got {text:?}")),
    }
}

/// Index list as given on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetArg(pub Vec<usize>);

pub fn parse_set_arg(text: &str) -> Result<SetArg, String> {
    parse_set(text).map(SetArg)
}

/// `2,3`, `{2,3}`, `[2,3]`; an empty string or `{}` is the empty set.
pub fn parse_set(text: &str) -> Result<Vec<usize>, String> {
    let inner = text
        .trim()
        .trim_start_matches(['{', '['])
        .trim_end_matches(['}', ']'])
        .trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad set element {p:?}: {e}"))
        })
        .collect()
}

impl RunConfig {
    /// Defaults, then the environment cap, then the document at `path`
    /// (`-` reads standard input).
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let mut base = Self::default();
        if let Ok(raw) = std::env::var(MAX_DIM_ENV) {
            base.max_dim = raw
                .trim()
                .parse()
                .map_err(|e| Failure::Config(format!("{MAX_DIM_ENV}={raw:?}: {e}")))?;
        }
        let Some(path) = path else {
            return Ok(base);
        };
        let text = if path == Path::new("-") {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::Config(format!("reading config from stdin: {e}")))?;
            buf
        } else {
            fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("reading {}: {e}", path.display())))?
        };
        let mut doc: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Config(format!("parsing config: {e}")))?;
        // Fields missing from the document keep the environment-adjusted base.
        let mut merged = serde_json::to_value(&base).expect("config serializes");
        if let (Some(target), Some(source)) = (merged.as_object_mut(), doc.as_object_mut()) {
            for (k, v) in std::mem::take(source) {
                let key = match k.as_str() {
                    "sites" => "N".to_string(),
                    "boundary_q" => "Q".to_string(),
                    _ => k,
                };
                target.insert(key, v);
            }
        } else {
            return Err(Failure::Config("config must be a JSON object".into()));
        }
        serde_json::from_value(merged).map_err(|e| Failure::Config(format!("config: {e}")))
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |msg: String| Err(Failure::Config(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.sites == 0 {
            return bad("N must be at least 1".into());
        }
        if !self.mu.is_finite() {
            return bad("mu must be finite".into());
        }
        if (2.0 * self.mu).sin().abs() < 1e-12 {
            return bad(format!("mu = {} makes q² = 1", self.mu));
        }
        if complex(self.boundary_q).norm() == 0.0 {
            return bad("Q must be nonzero".into());
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad("tolerance must be positive".into());
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.max_dim == 0 {
            return bad("max_dim must be positive".into());
        }
        if !(self.perturb.is_finite() && self.perturb > -100.0) {
            return bad(format!("perturb must exceed -100%, got {}", self.perturb));
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        Ok(())
    }

    /// Bulk checks need at least two interacting copies.
    pub fn require_bulk(&self) -> Result<(), Failure> {
        if self.n * self.sites < 2 {
            return Err(Failure::Config(format!(
                "bulk checks need n·N ≥ 2, got n={} N={}",
                self.n, self.sites
            )));
        }
        Ok(())
    }
}
