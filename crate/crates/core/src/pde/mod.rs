//! Finite-difference simulation on Neumann grids.

pub mod grid;
pub mod limit;
pub mod micro;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use grid::{field_norms, integral, laplacian_neumann, FieldNorms, Grid};
pub use limit::{LimitState, LimitStepper};
pub use micro::{micro_residual, MicroState, MicroStepper, ResidualNorms};

use crate::error::{Error, Result};
use crate::model::{Exchange, LimitKinetics};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Upper bound on the step; the CFL bound usually decides.
    pub dt_max: f64,
    pub cfl_safety: f64,
    pub t_end: f64,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    /// Steps between recorded samples.
    pub output_stride: usize,
    /// Local error tolerances of the adaptive microscopic integrator.
    pub rtol: f64,
    pub atol: f64,
    /// Values below `-negativity_tol * max(1, max |field|)` abort the run.
    pub negativity_tol: f64,
    /// Keep full fields every this many samples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_stride: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt_max: 1e-2,
            cfl_safety: 0.9,
            t_end: 10.0,
            newton_tol: 1e-12,
            newton_max_iters: 25,
            output_stride: 100,
            rtol: 1e-6,
            atol: 1e-9,
            negativity_tol: 1e-9,
            snapshot_stride: None,
        }
    }
}

fn bad(name: &'static str, value: f64, reason: &str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason: reason.into(),
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt_max", self.dt_max),
            ("newton_tol", self.newton_tol),
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("negativity_tol", self.negativity_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(name, v, "must be finite and > 0"));
            }
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(bad("cfl_safety", self.cfl_safety, "must lie in (0, 1]"));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(bad("t_end", self.t_end, "must be finite and >= 0"));
        }
        if self.newton_max_iters == 0 {
            return Err(bad("newton_max_iters", 0.0, "must be >= 1"));
        }
        if self.output_stride == 0 {
            return Err(bad("output_stride", 0.0, "must be >= 1"));
        }
        if self.snapshot_stride == Some(0) {
            return Err(bad("snapshot_stride", 0.0, "must be >= 1"));
        }
        Ok(())
    }
}

/// Uniform macro steps covering `[0, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
    pub t_end: f64,
}

impl TimeGrid {
    /// Largest step below both `dt_max` and the diffusion bound for rate
    /// `d_max` that divides `t_end` evenly.
    pub fn new(grid: &Grid, d_max: f64, cfg: &SolverConfig) -> Self {
        let bound = grid.cfl_dt(d_max, cfg.cfl_safety).min(cfg.dt_max);
        let steps = (cfg.t_end / bound).ceil() as usize;
        let dt = if steps == 0 { bound } else { cfg.t_end / steps as f64 };
        TimeGrid {
            dt,
            steps,
            stride: cfg.output_stride,
            t_end: cfg.t_end,
        }
    }

    pub fn time(&self, step: usize) -> f64 {
        if step == self.steps {
            return self.t_end;
        }
        step as f64 * self.dt
    }

    pub fn is_sample(&self, step: usize) -> bool {
        step % self.stride == 0 || step == self.steps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum System {
    /// Three-field system with fast exchange; needs `epsilon`.
    Micro(ModelParams),
    Limit(LimitKinetics),
}

impl System {
    pub fn max_diffusivity(&self) -> f64 {
        match self {
            System::Micro(p) => p.d1.max(p.d2).max(p.d3),
            System::Limit(k) => k.max_diffusivity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SimState {
    Micro(MicroState),
    Limit(LimitState),
}

impl SimState {
    pub fn t(&self) -> f64 {
        match self {
            SimState::Micro(s) => s.t,
            SimState::Limit(s) => s.t,
        }
    }

    pub fn field_names(&self) -> &'static [&'static str] {
        match self {
            SimState::Micro(_) => &["N", "p_s", "p_h", "P"],
            SimState::Limit(_) => &["N", "P"],
        }
    }

    /// Fields in the order of [`Self::field_names`].
    pub fn fields(&self) -> Vec<Vec<f64>> {
        match self {
            SimState::Micro(s) => vec![s.n.clone(), s.ps.clone(), s.ph.clone(), s.predators()],
            SimState::Limit(s) => vec![s.n.clone(), s.p.clone()],
        }
    }

    /// Prey and total predators.
    pub fn prey_predators(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            SimState::Micro(s) => (s.n.clone(), s.predators()),
            SimState::Limit(s) => (s.n.clone(), s.p.clone()),
        }
    }
}

pub(crate) fn check_fields(grid: &Grid, fields: &[&Vec<f64>]) -> Result<()> {
    for f in fields {
        grid.check(f)?;
    }
    Ok(())
}

/// Rejects non-finite values and values below the negativity tolerance.
pub fn check_state(state: &SimState, tol: f64) -> Result<()> {
    let names = state.field_names();
    let fields: Vec<(&'static str, &[f64])> = match state {
        SimState::Micro(s) => vec![(names[0], &s.n[..]), (names[1], &s.ps[..]), (names[2], &s.ph[..])],
        SimState::Limit(s) => vec![(names[0], &s.n[..]), (names[1], &s.p[..])],
    };
    let t = state.t();
    for (field, values) in fields {
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (cell, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { field, cell, t });
            }
            if value < -tol * scale {
                return Err(Error::Negativity { field, cell, value, t });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub index: usize,
    pub t: f64,
    pub fields: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub fields: Vec<String>,
    pub times: Vec<f64>,
    /// `norms[k][f]`: norms of field `f` at sample `k`.
    pub norms: Vec<Vec<FieldNorms>>,
    pub snapshots: Vec<Snapshot>,
}

/// Outcome of [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub series: TimeSeries,
    pub final_state: SimState,
    pub time_grid: TimeGrid,
    /// `(integral of R^2, integral of |R|)` for microscopic runs.
    pub residual_integrals: Option<(f64, f64)>,
}

pub fn simulate(initial: &SimState, system: &System, grid: &Grid, cfg: &SolverConfig) -> Result<Simulation> {
    simulate_with(initial, system, grid, cfg, |_| {})
}

/// Runs to `cfg.t_end`, calling `observe` on every sampled state.
pub fn simulate_with(
    initial: &SimState,
    system: &System,
    grid: &Grid,
    cfg: &SolverConfig,
    mut observe: impl FnMut(&SimState),
) -> Result<Simulation> {
    cfg.validate()?;
    let tg = TimeGrid::new(grid, system.max_diffusivity(), cfg);
    let mut series = TimeSeries {
        fields: initial.field_names().iter().map(|s| s.to_string()).collect(),
        times: Vec::new(),
        norms: Vec::new(),
        snapshots: Vec::new(),
    };
    let mut record = |state: &SimState, series: &mut TimeSeries| {
        let fields = state.fields();
        let k = series.times.len();
        series.times.push(state.t());
        series.norms.push(fields.iter().map(|f| field_norms(f, grid)).collect());
        if cfg.snapshot_stride.is_some_and(|s| k % s == 0) {
            series.snapshots.push(Snapshot {
                index: k,
                t: state.t(),
                fields,
            });
        }
        observe(state);
    };
    let mut state = initial.clone();
    check_state(&state, cfg.negativity_tol)?;
    record(&state, &mut series);
    let mut stepper = match (system, &state) {
        (System::Micro(params), SimState::Micro(s)) => {
            Stepper::Micro(Box::new(MicroStepper::new(*grid, *params, *cfg, tg.dt, s)?))
        }
        (System::Limit(kin), SimState::Limit(s)) => Stepper::Limit(LimitStepper::new(*grid, *kin, tg.dt, s)?),
        _ => {
            return Err(Error::Precondition(
                "initial state kind does not match the system".into(),
            ))
        }
    };
    for step in 1..=tg.steps {
        let t = tg.time(step);
        match (&mut stepper, &mut state) {
            (Stepper::Micro(m), SimState::Micro(s)) => m.advance_to(s, t)?,
            (Stepper::Limit(l), SimState::Limit(s)) => {
                l.step(s);
                s.t = t;
            }
            _ => unreachable!("stepper built from the state kind"),
        }
        check_state(&state, cfg.negativity_tol)?;
        if tg.is_sample(step) {
            record(&state, &mut series);
        }
    }
    let residual_integrals = match &stepper {
        Stepper::Micro(m) => Some(m.residual_integrals()),
        Stepper::Limit(_) => None,
    };
    Ok(Simulation {
        series,
        final_state: state,
        time_grid: tg,
        residual_integrals,
    })
}

enum Stepper {
    Micro(Box<MicroStepper>),
    Limit(LimitStepper),
}

/// One macro step of the microscopic solver with the step size that
/// [`simulate`] would use.
pub fn step_micro(state: &MicroState, params: &ModelParams, grid: &Grid, cfg: &SolverConfig) -> Result<MicroState> {
    let tg = TimeGrid::new(grid, System::Micro(*params).max_diffusivity(), cfg);
    let mut next = state.clone();
    let mut stepper = MicroStepper::new(*grid, *params, *cfg, tg.dt, state)?;
    stepper.advance_to(&mut next, state.t + tg.dt)?;
    let next = SimState::Micro(next);
    check_state(&next, cfg.negativity_tol)?;
    match next {
        SimState::Micro(s) => Ok(s),
        SimState::Limit(_) => unreachable!(),
    }
}

/// One SSP-RK3 step of the limit solver with the step size that [`simulate`]
/// would use.
pub fn step_limit(state: &LimitState, kin: &LimitKinetics, grid: &Grid, cfg: &SolverConfig) -> Result<LimitState> {
    let tg = TimeGrid::new(grid, kin.max_diffusivity(), cfg);
    let mut next = state.clone();
    LimitStepper::new(*grid, *kin, tg.dt, state)?.step(&mut next);
    let next = SimState::Limit(next);
    check_state(&next, cfg.negativity_tol)?;
    match next {
        SimState::Limit(s) => Ok(s),
        SimState::Micro(_) => unreachable!(),
    }
}

/// Spatial norms of the exchange residual; only defined for microscopic states.
pub fn residual_constraint(state: &SimState, params: &ModelParams, grid: &Grid) -> Result<ResidualNorms> {
    match state {
        SimState::Micro(s) => micro_residual(s, params, grid),
        SimState::Limit(_) => Err(Error::Precondition(
            "exchange residual needs a three-field state".into(),
        )),
    }
}

/// Evaluates `(N, P)` at cell centers.
pub fn limit_from_fn(grid: &Grid, f: impl Fn(f64, f64) -> (f64, f64)) -> LimitState {
    let (n, p) = grid.centers().into_iter().map(|(x, y)| f(x, y)).unzip();
    LimitState { t: 0.0, n, p }
}

pub fn homogeneous_limit(grid: &Grid, n: f64, p: f64) -> LimitState {
    LimitState {
        t: 0.0,
        n: vec![n; grid.len()],
        p: vec![p; grid.len()],
    }
}

/// `(N, P)` plus independent uniform noise on `[-amplitude, amplitude]` in each
/// field and cell, drawn in storage order from a ChaCha8 stream.
pub fn noisy_limit(grid: &Grid, n: f64, p: f64, amplitude: f64, seed: u64) -> LimitState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise = || amplitude * (2.0 * rng.gen::<f64>() - 1.0);
    let mut state = homogeneous_limit(grid, n, p);
    for v in &mut state.n {
        *v += noise();
    }
    for v in &mut state.p {
        *v += noise();
    }
    state
}

/// How predators are divided between searching and handling initially.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialSplit {
    /// Quasi-steady split, so the exchange residual starts at zero.
    OnManifold,
    /// All predators searching; exhibits the initial layer.
    OffManifold,
}

pub fn micro_from_limit(state: &LimitState, params: &ModelParams, split: InitialSplit) -> MicroState {
    let ex = Exchange::dimensional(params);
    let (ps, ph) = match split {
        InitialSplit::OnManifold => state
            .n
            .iter()
            .zip(&state.p)
            .map(|(&n, &p)| {
                let s = ex.split(n, p);
                (s.searching, s.handling)
            })
            .unzip(),
        InitialSplit::OffManifold => (state.p.clone(), vec![0.0; state.p.len()]),
    };
    MicroState {
        t: state.t,
        n: state.n.clone(),
        ps,
        ph,
    }
}
