//! Epsilon sweeps of the microscopic system against its limit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LimitKinetics;
use crate::params::ModelParams;
use crate::pde::grid::Grid;
use crate::pde::limit::{LimitState, LimitStepper};
use crate::pde::micro::MicroStepper;
use crate::pde::{check_state, micro_from_limit, InitialSplit, SimState, SolverConfig, System, TimeGrid};

/// Everything a sweep member shares except `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSetup {
    pub params: ModelParams,
    pub grid: Grid,
    /// Initial `(N, P)`; the microscopic runs split `P` according to `split`.
    pub initial: LimitState,
    pub split: InitialSplit,
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub half_width: f64,
}

impl RateFit {
    pub fn contains(&self, target: f64, tol: f64) -> bool {
        (self.slope - target).abs() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemberMetrics {
    pub epsilon: f64,
    /// Integral over time and space of the squared exchange residual.
    pub residual_l2_sq: f64,
    /// Integral over time and space of the absolute exchange residual.
    pub residual_l1: f64,
    /// Space-time L2 distance of `(N, p_s + p_h)` to the limit `(N, P)`.
    pub dist_to_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Strictly decreasing.
    pub epsilons: Vec<f64>,
    pub residual_l2_sq: Vec<f64>,
    pub residual_l1: Vec<f64>,
    pub dist_to_limit: Vec<f64>,
    /// Log-log fits against epsilon; `None` with fewer than three members.
    pub slope_l2_sq: Option<RateFit>,
    pub slope_l1: Option<RateFit>,
    pub slope_dist: Option<RateFit>,
    /// Message of the first failed member. Metrics stop before it.
    pub failure: Option<String>,
}

impl ConvergenceReport {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn members(&self) -> Vec<MemberMetrics> {
        (0..self.epsilons.len())
            .map(|i| MemberMetrics {
                epsilon: self.epsilons[i],
                residual_l2_sq: self.residual_l2_sq[i],
                residual_l1: self.residual_l1[i],
                dist_to_limit: self.dist_to_limit[i],
            })
            .collect()
    }

    /// True when distances shrink strictly along the ladder.
    pub fn dist_decreasing(&self) -> bool {
        self.dist_to_limit.windows(2).all(|w| w[1] < w[0])
    }

    fn from_members(members: Vec<MemberMetrics>, failure: Option<String>) -> Self {
        let epsilons: Vec<f64> = members.iter().map(|m| m.epsilon).collect();
        let pick = |f: fn(&MemberMetrics) -> f64| members.iter().map(f).collect::<Vec<_>>();
        let residual_l2_sq = pick(|m| m.residual_l2_sq);
        let residual_l1 = pick(|m| m.residual_l1);
        let dist_to_limit = pick(|m| m.dist_to_limit);
        let fit = |ys: &[f64]| rate_fit(&epsilons, ys).ok().map(|(slope, half_width)| RateFit { slope, half_width });
        ConvergenceReport {
            slope_l2_sq: fit(&residual_l2_sq),
            slope_l1: fit(&residual_l1),
            slope_dist: fit(&dist_to_limit),
            epsilons,
            residual_l2_sq,
            residual_l1,
            dist_to_limit,
            failure,
        }
    }
}

/// Sampled limit trajectory on the sweep's time grid.
struct Reference {
    tg: TimeGrid,
    samples: Vec<(usize, LimitState)>,
}

fn shared_time_grid(setup: &SweepSetup) -> TimeGrid {
    let kin = LimitKinetics::dimensional(&setup.params);
    let d = System::Micro(setup.params).max_diffusivity().max(kin.max_diffusivity());
    TimeGrid::new(&setup.grid, d, &setup.solver)
}

fn limit_reference(setup: &SweepSetup) -> Result<Reference> {
    let tg = shared_time_grid(setup);
    let kin = LimitKinetics::dimensional(&setup.params);
    let mut state = setup.initial.clone();
    state.t = 0.0;
    let mut stepper = LimitStepper::new(setup.grid, kin, tg.dt, &state)?;
    let mut samples = vec![(0, state.clone())];
    for step in 1..=tg.steps {
        stepper.step(&mut state);
        state.t = tg.time(step);
        if tg.is_sample(step) {
            let s = SimState::Limit(state);
            check_state(&s, setup.solver.negativity_tol)?;
            let SimState::Limit(s) = s else { unreachable!() };
            samples.push((step, s.clone()));
            state = s;
        }
    }
    Ok(Reference { tg, samples })
}

fn squared_distance(grid: &Grid, n: &[f64], p: &[f64], limit: &LimitState) -> f64 {
    let s: f64 = (0..n.len())
        .map(|i| (n[i] - limit.n[i]).powi(2) + (p[i] - limit.p[i]).powi(2))
        .sum();
    s * grid.cell_volume()
}

fn run_member(setup: &SweepSetup, reference: &Reference, epsilon: f64) -> Result<MemberMetrics> {
    let params = setup.params.with_epsilon(epsilon);
    params.validate()?;
    let tg = reference.tg;
    let mut limit0 = setup.initial.clone();
    limit0.t = 0.0;
    let mut state = micro_from_limit(&limit0, &params, setup.split);
    let mut stepper = MicroStepper::new(setup.grid, params, setup.solver, tg.dt, &state)?;
    let mut prev: Option<(f64, f64)> = None;
    let mut dist_sq = 0.0;
    let mut samples = reference.samples.iter();
    for step in 0..=tg.steps {
        if step > 0 {
            stepper.advance_to(&mut state, tg.time(step))?;
            let s = SimState::Micro(state);
            check_state(&s, setup.solver.negativity_tol)?;
            let SimState::Micro(s) = s else { unreachable!() };
            state = s;
        }
        if tg.is_sample(step) {
            let (k, limit) = samples.next().expect("reference sampled on the same grid");
            debug_assert_eq!(*k, step);
            let d = squared_distance(&setup.grid, &state.n, &state.predators(), limit);
            let t = tg.time(step);
            if let Some((t0, d0)) = prev {
                dist_sq += 0.5 * (t - t0) * (d + d0);
            }
            prev = Some((t, d));
        }
    }
    let (residual_l2_sq, residual_l1) = stepper.residual_integrals();
    Ok(MemberMetrics {
        epsilon,
        residual_l2_sq,
        residual_l1,
        dist_to_limit: dist_sq.sqrt(),
    })
}

/// Runs the microscopic system once per `epsilon` in `ladder` and measures
/// it against a single limit run from the same initial data.
///
/// A failing member does not abort the call: the report keeps the members
/// before it and records the failure. Use [`ensure_complete`] to turn that
/// into an error.
pub fn epsilon_sweep(setup: &SweepSetup, ladder: &[f64]) -> Result<ConvergenceReport> {
    if ladder.is_empty() {
        return Err(Error::Precondition("empty epsilon ladder".into()));
    }
    if ladder.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::Precondition("epsilons must be positive and finite".into()));
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("epsilon ladder must be strictly decreasing".into()));
    }
    setup.params.validate()?;
    setup.solver.validate()?;
    setup.grid.check(&setup.initial.n)?;
    setup.grid.check(&setup.initial.p)?;
    if setup.initial.n.iter().chain(&setup.initial.p).any(|&v| !(v >= 0.0)) {
        return Err(Error::Precondition("initial densities must be nonnegative".into()));
    }
    let reference = limit_reference(setup)?;
    let results: Vec<Result<MemberMetrics>> = ladder
        .par_iter()
        .map(|&eps| run_member(setup, &reference, eps))
        .collect();
    let mut members = Vec::new();
    let mut failure = None;
    for (r, eps) in results.into_iter().zip(ladder) {
        match r {
            Ok(m) => members.push(m),
            Err(e) => {
                failure = Some(format!("epsilon = {eps:e}: {e}"));
                break;
            }
        }
    }
    Ok(ConvergenceReport::from_members(members, failure))
}

/// Converts an incomplete report into [`Error::IncompleteSweep`].
pub fn ensure_complete(report: &ConvergenceReport) -> Result<()> {
    match &report.failure {
        None => Ok(()),
        Some(msg) => Err(Error::IncompleteSweep {
            completed: report.epsilons.len(),
            source: Box::new(Error::Undefined(msg.clone())),
        }),
    }
}

/// Least-squares slope of `log10 ys` against `log10 xs` and twice its
/// standard error.
pub fn rate_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::Precondition(format!(
            "{} abscissae but {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::Degenerate(format!("{} points, need at least 3", xs.len())));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Degenerate("log fit needs positive finite values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.log10()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.log10()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-24 * (1.0 + mx * mx) {
        return Err(Error::Degenerate("abscissae have no spread".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let se = (ssr / (m - 2.0) / sxx).sqrt();
    Ok((slope, 2.0 * se))
}
