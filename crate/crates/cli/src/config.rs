//! TOML run configuration: `[model]`, `[grid]`, `[solver]` and `[initial]`.
//!
//! Only `[model]` is required. Every other key has a default, and unknown
//! keys are rejected so typos do not pass silently.

use std::path::{Path, PathBuf};

use predprey_core::equilibria::coexistence_dimensional;
use predprey_core::pde::{limit_from_fn, noisy_limit};
use predprey_core::{Grid, InitialSplit, LimitState, ModelParams, SolverConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("missing key {0}")]
    Missing(String),
    #[error("{key} must be {expected}, found {found}")]
    WrongType {
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("unknown key {0}")]
    Unknown(String),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
    #[error("epsilon required for microscopic runs")]
    EpsilonRequired,
}

type Result<T> = std::result::Result<T, ConfigError>;

const MODEL_KEYS: [&str; 11] = [
    "r0",
    "eta",
    "alpha",
    "gamma_tilde",
    "Gamma",
    "mu",
    "xi",
    "d1",
    "d2",
    "d3",
    "epsilon",
];

/// Domain size before it becomes a [`Grid`]; `ny` selects a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub ny: Option<usize>,
    pub length: f64,
    pub ly: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: 128,
            ny: None,
            length: 1.0,
            ly: None,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        let grid = match self.ny {
            None => Grid::line(self.n, self.length),
            Some(ny) => Grid::rect(self.n, ny, self.length, self.ly.unwrap_or(self.length)),
        };
        grid.map_err(|e| invalid("grid", e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialShape {
    /// Coexistence state of the limit system.
    Equilibrium,
    Uniform { n: f64, p: f64 },
    /// `N = n (1 + a cos(pi x / L))`, `P = p (1 + a cos(2 pi x / L))`.
    Cosine { n: f64, p: f64, amplitude: f64 },
}

/// Initial `(N, P)` plus seeded uniform noise of amplitude `noise * P0`,
/// and the searching/handling split for microscopic runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSpec {
    pub shape: InitialShape,
    pub noise: f64,
    pub split: InitialSplit,
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec {
            shape: InitialShape::Equilibrium,
            noise: 0.01,
            split: InitialSplit::OnManifold,
        }
    }
}

impl InitialSpec {
    pub fn build(&self, params: &ModelParams, grid: &Grid, seed: u64) -> predprey_core::Result<LimitState> {
        let (n0, p0) = match self.shape {
            InitialShape::Equilibrium => {
                let e = coexistence_dimensional(params)?;
                (e.n, e.p)
            }
            InitialShape::Uniform { n, p } => (n, p),
            InitialShape::Cosine { n, p, amplitude } => {
                let w = std::f64::consts::PI / grid.lx;
                let mut state = limit_from_fn(grid, |x, _| {
                    (n * (1.0 + amplitude * (w * x).cos()), p * (1.0 + amplitude * (2.0 * w * x).cos()))
                });
                if self.noise > 0.0 {
                    let noise = noisy_limit(grid, 0.0, 0.0, self.noise * p, seed);
                    for (v, e) in state.n.iter_mut().zip(&noise.n) {
                        *v += e;
                    }
                    for (v, e) in state.p.iter_mut().zip(&noise.p) {
                        *v += e;
                    }
                }
                return Ok(state);
            }
        };
        Ok(noisy_limit(grid, n0, p0, self.noise * p0, seed))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelParams,
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub initial: InitialSpec,
}

impl RunConfig {
    pub fn epsilon(&self) -> Result<f64> {
        self.model.epsilon.ok_or(ConfigError::EpsilonRequired)
    }

    /// Region comparisons assume searching predators diffuse faster.
    pub fn require_comparison(&self) -> Result<()> {
        if self.model.d2 > self.model.d3 {
            Ok(())
        } else {
            Err(ConfigError::Invalid {
                key: "model.d2".into(),
                message: format!(
                    "must exceed model.d3 for a region comparison (d2 = {}, d3 = {})",
                    self.model.d2, self.model.d3
                ),
            })
        }
    }
}

fn invalid(key: &str, err: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: err.to_string(),
    }
}

fn type_name(v: &Value) -> String {
    match v {
        Value::String(s) => format!("string {s:?}"),
        other => format!("{} {other}", other.type_str()),
    }
}

struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
}

impl<'a> Section<'a> {
    fn new(root: &'a Table, name: &'static str, required: bool) -> Result<Self> {
        let table = match root.get(name) {
            None if required => return Err(ConfigError::Missing(format!("[{name}]"))),
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(other) => {
                return Err(ConfigError::WrongType {
                    key: name.into(),
                    expected: "a table",
                    found: type_name(other),
                })
            }
        };
        Ok(Section { name, table })
    }

    fn key(&self, k: &str) -> String {
        format!("{}.{k}", self.name)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.table.into_iter().flat_map(|t| t.keys()) {
            if !allowed.contains(&k.as_str()) {
                return Err(ConfigError::Unknown(self.key(k)));
            }
        }
        Ok(())
    }

    fn raw(&self, k: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(k))
    }

    fn f64_opt(&self, k: &str) -> Result<Option<f64>> {
        match self.raw(k) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(ConfigError::WrongType {
                key: self.key(k),
                expected: "a number",
                found: type_name(other),
            }),
        }
    }

    fn f64(&self, k: &str) -> Result<f64> {
        self.f64_opt(k)?.ok_or_else(|| ConfigError::Missing(self.key(k)))
    }

    fn usize_opt(&self, k: &str) -> Result<Option<usize>> {
        match self.raw(k) {
            None => Ok(None),
            Some(Value::Integer(v)) if *v >= 0 => Ok(Some(*v as usize)),
            Some(other) => Err(ConfigError::WrongType {
                key: self.key(k),
                expected: "a nonnegative integer",
                found: type_name(other),
            }),
        }
    }

    fn str_opt(&self, k: &str) -> Result<Option<&'a str>> {
        match self.raw(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(ConfigError::WrongType {
                key: self.key(k),
                expected: "a string",
                found: type_name(other),
            }),
        }
    }
}

fn parse_model(root: &Table) -> Result<ModelParams> {
    let s = Section::new(root, "model", true)?;
    s.check_keys(&MODEL_KEYS)?;
    let params = ModelParams {
        r0: s.f64("r0")?,
        eta: s.f64("eta")?,
        alpha: s.f64("alpha")?,
        gamma_tilde: s.f64("gamma_tilde")?,
        big_gamma: s.f64("Gamma")?,
        mu: s.f64("mu")?,
        xi: s.f64("xi")?,
        d1: s.f64("d1")?,
        d2: s.f64("d2")?,
        d3: s.f64("d3")?,
        epsilon: s.f64_opt("epsilon")?,
    };
    params.validate().map_err(|e| match e {
        predprey_core::Error::InvalidParameter { name, value, reason } => ConfigError::Invalid {
            key: s.key(name),
            message: format!("{value} {reason}"),
        },
        other => invalid("model", other),
    })?;
    Ok(params)
}

fn parse_grid(root: &Table) -> Result<GridSpec> {
    let s = Section::new(root, "grid", false)?;
    s.check_keys(&["n", "ny", "length", "ly"])?;
    let d = GridSpec::default();
    let spec = GridSpec {
        n: s.usize_opt("n")?.unwrap_or(d.n),
        ny: s.usize_opt("ny")?,
        length: s.f64_opt("length")?.unwrap_or(d.length),
        ly: s.f64_opt("ly")?,
    };
    spec.build()?;
    Ok(spec)
}

fn parse_solver(root: &Table) -> Result<SolverConfig> {
    let s = Section::new(root, "solver", false)?;
    s.check_keys(&[
        "dt_max",
        "cfl_safety",
        "t_end",
        "newton_tol",
        "newton_max_iters",
        "output_stride",
        "rtol",
        "atol",
        "negativity_tol",
        "snapshot_stride",
    ])?;
    let d = SolverConfig::default();
    let cfg = SolverConfig {
        dt_max: s.f64_opt("dt_max")?.unwrap_or(d.dt_max),
        cfl_safety: s.f64_opt("cfl_safety")?.unwrap_or(d.cfl_safety),
        t_end: s.f64_opt("t_end")?.unwrap_or(d.t_end),
        newton_tol: s.f64_opt("newton_tol")?.unwrap_or(d.newton_tol),
        newton_max_iters: s.usize_opt("newton_max_iters")?.unwrap_or(d.newton_max_iters),
        output_stride: s.usize_opt("output_stride")?.unwrap_or(d.output_stride),
        rtol: s.f64_opt("rtol")?.unwrap_or(d.rtol),
        atol: s.f64_opt("atol")?.unwrap_or(d.atol),
        negativity_tol: s.f64_opt("negativity_tol")?.unwrap_or(d.negativity_tol),
        snapshot_stride: s.usize_opt("snapshot_stride")?,
    };
    cfg.validate().map_err(|e| match e {
        predprey_core::Error::InvalidParameter { name, value, reason } => ConfigError::Invalid {
            key: s.key(name),
            message: format!("{value} {reason}"),
        },
        other => invalid("solver", other),
    })?;
    Ok(cfg)
}

fn parse_initial(root: &Table) -> Result<InitialSpec> {
    let s = Section::new(root, "initial", false)?;
    s.check_keys(&["kind", "n", "p", "amplitude", "noise", "split"])?;
    let d = InitialSpec::default();
    let kind = s.str_opt("kind")?.unwrap_or("equilibrium");
    let shape = match kind {
        "equilibrium" => {
            for k in ["n", "p", "amplitude"] {
                if s.raw(k).is_some() {
                    return Err(invalid(&s.key(k), "not used with kind = \"equilibrium\""));
                }
            }
            InitialShape::Equilibrium
        }
        "uniform" => InitialShape::Uniform {
            n: s.f64("n")?,
            p: s.f64("p")?,
        },
        "cosine" => InitialShape::Cosine {
            n: s.f64("n")?,
            p: s.f64("p")?,
            amplitude: s.f64_opt("amplitude")?.unwrap_or(0.5),
        },
        other => {
            return Err(invalid(
                &s.key("kind"),
                format!("expected \"equilibrium\", \"uniform\" or \"cosine\", found {other:?}"),
            ))
        }
    };
    match shape {
        InitialShape::Uniform { n, p } | InitialShape::Cosine { n, p, .. } => {
            for (k, v) in [("n", n), ("p", p)] {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(invalid(&s.key(k), format!("{v} must be finite and >= 0")));
                }
            }
        }
        InitialShape::Equilibrium => {}
    }
    if let InitialShape::Cosine { amplitude, .. } = shape {
        if !(0.0..1.0).contains(&amplitude) {
            return Err(invalid(&s.key("amplitude"), format!("{amplitude} must lie in [0, 1)")));
        }
    }
    let noise = s.f64_opt("noise")?.unwrap_or(d.noise);
    if !(0.0..1.0).contains(&noise) {
        return Err(invalid(&s.key("noise"), format!("{noise} must lie in [0, 1)")));
    }
    let split = match s.str_opt("split")?.unwrap_or("manifold") {
        "manifold" => InitialSplit::OnManifold,
        "off-manifold" => InitialSplit::OffManifold,
        other => {
            return Err(invalid(
                &s.key("split"),
                format!("expected \"manifold\" or \"off-manifold\", found {other:?}"),
            ))
        }
    };
    Ok(InitialSpec { shape, noise, split })
}

pub fn parse_config(text: &str, path: &Path) -> Result<RunConfig> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax {
        path: path.to_path_buf(),
        message: e.message().to_string(),
    })?;
    for k in root.keys() {
        if !["model", "grid", "solver", "initial"].contains(&k.as_str()) {
            return Err(ConfigError::Unknown(k.clone()));
        }
    }
    Ok(RunConfig {
        model: parse_model(&root)?,
        grid: parse_grid(&root)?,
        solver: parse_solver(&root)?,
        initial: parse_initial(&root)?,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}
