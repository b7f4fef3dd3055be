//! Microscopic three-field solver.
//!
//! Time stepping uses the two-stage IMEX Runge-Kutta pair ARS(2,2,2): the
//! Laplacians are explicit, the full pointwise reaction (fast exchange
//! included) is implicit and solved cell by cell with a damped Newton
//! iteration. The scheme is globally stiffly accurate, so as `epsilon -> 0`
//! each step lands on the exchange manifold and the method degenerates to a
//! consistent second-order scheme for the limit system.
//!
//! Step sizes are adapted from an embedded first-order solution whose error is
//! filtered through `(I - h g J)^-1`, which keeps resolved stiff transients
//! from forcing tiny steps while still resolving initial layers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{laplacian_into, Grid};
use super::{check_fields, SolverConfig};
use crate::error::{Error, Result};
use crate::model::{micro_jacobian, micro_rates, Exchange};
use crate::params::ModelParams;

const GAMMA: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
/// `1 - 1 / (2 gamma)`.
const DELTA: f64 = 1.0 - 1.0 / (2.0 * GAMMA);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroState {
    pub t: f64,
    pub n: Vec<f64>,
    pub ps: Vec<f64>,
    pub ph: Vec<f64>,
}

impl MicroState {
    pub fn predators(&self) -> Vec<f64> {
        self.ps.iter().zip(&self.ph).map(|(a, b)| a + b).collect()
    }
}

type Vec3 = [f64; 3];
type Mat3 = [[f64; 3]; 3];

/// Solves `m x = b` by Gaussian elimination with partial pivoting.
fn solve3(mut m: Mat3, mut b: Vec3) -> Option<Vec3> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col] == 0.0 || !m[piv][col].is_finite() {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn clamp3(y: Vec3) -> Vec3 {
    [y[0].max(0.0), y[1].max(0.0), y[2].max(0.0)]
}

/// `I - hg J(y)` with the Jacobian taken at the clamped state.
fn stage_matrix(y: Vec3, hg: f64, params: &ModelParams, eps: f64) -> Mat3 {
    let c = clamp3(y);
    let j = micro_jacobian(c[0], c[1], params, eps);
    let mut m = [[0.0; 3]; 3];
    for r in 0..3 {
        for k in 0..3 {
            m[r][k] = if r == k { 1.0 } else { 0.0 } - hg * j[r][k];
        }
    }
    m
}

fn stage_residual(y: Vec3, rhs: Vec3, hg: f64, params: &ModelParams, eps: f64) -> Vec3 {
    let c = clamp3(y);
    let f = micro_rates(c[0], c[1], c[2], params, eps);
    [
        y[0] - rhs[0] - hg * f[0],
        y[1] - rhs[1] - hg * f[1],
        y[2] - rhs[2] - hg * f[2],
    ]
}

fn max_abs(v: Vec3) -> f64 {
    v[0].abs().max(v[1].abs()).max(v[2].abs())
}

/// Damped Newton for `y = rhs + hg F(y)`. Returns the solution and the
/// iteration matrix at the last iterate.
fn newton_stage(
    rhs: Vec3,
    guess: Vec3,
    hg: f64,
    params: &ModelParams,
    eps: f64,
    tol: f64,
    max_iters: usize,
) -> Option<(Vec3, Mat3)> {
    let mut y = guess;
    let mut g = stage_residual(y, rhs, hg, params, eps);
    for _ in 0..max_iters {
        let m = stage_matrix(y, hg, params, eps);
        let dy = solve3(m, [-g[0], -g[1], -g[2]])?;
        let g0 = max_abs(g);
        let mut lambda = 1.0;
        let (mut y_try, mut g_try);
        loop {
            y_try = [y[0] + lambda * dy[0], y[1] + lambda * dy[1], y[2] + lambda * dy[2]];
            g_try = stage_residual(y_try, rhs, hg, params, eps);
            if max_abs(g_try) <= g0 || lambda < 1.0 / 32.0 {
                break;
            }
            lambda *= 0.5;
        }
        y = y_try;
        g = g_try;
        let converged = (0..3).all(|k| (lambda * dy[k]).abs() <= tol * (1.0 + y[k].abs()));
        if converged {
            return Some((y, m));
        }
    }
    None
}

/// Explicit right-hand side: the three diffusion terms.
struct Diffusion {
    n: Vec<f64>,
    ps: Vec<f64>,
    ph: Vec<f64>,
}

impl Diffusion {
    fn zeros(len: usize) -> Self {
        Diffusion {
            n: vec![0.0; len],
            ps: vec![0.0; len],
            ph: vec![0.0; len],
        }
    }

    fn eval(&mut self, grid: &Grid, params: &ModelParams, n: &[f64], ps: &[f64], ph: &[f64]) {
        laplacian_into(n, grid, &mut self.n);
        laplacian_into(ps, grid, &mut self.ps);
        laplacian_into(ph, grid, &mut self.ph);
        for v in &mut self.n {
            *v *= params.d1;
        }
        for v in &mut self.ps {
            *v *= params.d2;
        }
        for v in &mut self.ph {
            *v *= params.d3;
        }
    }

    fn at(&self, i: usize) -> Vec3 {
        [self.n[i], self.ps[i], self.ph[i]]
    }
}

/// Per-cell output of one attempted step.
#[derive(Clone, Copy)]
struct CellStep {
    y2: Vec3,
    y3: Vec3,
    err: f64,
}

/// Adaptive IMEX integrator for one microscopic run. Also accumulates the
/// time integrals of the squared and absolute exchange residual per cell.
pub struct MicroStepper {
    grid: Grid,
    params: ModelParams,
    eps: f64,
    exchange: Exchange,
    cfg: SolverConfig,
    h_max: f64,
    h: f64,
    e0: Diffusion,
    e2: Diffusion,
    stage2: Vec<Vec3>,
    residual: Vec<f64>,
    acc_sq: Vec<f64>,
    acc_abs: Vec<f64>,
    accepted: usize,
    rejected: usize,
}

const MIN_PAR_LEN: usize = 64;

impl MicroStepper {
    /// `h_max` caps every substep; pass the CFL-limited step.
    pub fn new(grid: Grid, params: ModelParams, cfg: SolverConfig, h_max: f64, state: &MicroState) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        let eps = params.require_epsilon()?;
        check_fields(&grid, &[&state.n, &state.ps, &state.ph])?;
        let len = grid.len();
        let exchange = Exchange::dimensional(&params);
        let residual = (0..len)
            .map(|i| exchange.residual(state.n[i], state.ps[i], state.ph[i]))
            .collect();
        Ok(MicroStepper {
            grid,
            params,
            eps,
            exchange,
            cfg,
            h_max,
            h: h_max,
            e0: Diffusion::zeros(len),
            e2: Diffusion::zeros(len),
            stage2: vec![[0.0; 3]; len],
            residual,
            acc_sq: vec![0.0; len],
            acc_abs: vec![0.0; len],
            accepted: 0,
            rejected: 0,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `(integral of R^2, integral of |R|)` over space and elapsed time.
    pub fn residual_integrals(&self) -> (f64, f64) {
        let vol = self.grid.cell_volume();
        (
            self.acc_sq.iter().sum::<f64>() * vol,
            self.acc_abs.iter().sum::<f64>() * vol,
        )
    }

    /// Accepted and rejected substeps so far.
    pub fn step_counts(&self) -> (usize, usize) {
        (self.accepted, self.rejected)
    }

    /// Advances to `t_target` with as many adaptive substeps as needed.
    pub fn advance_to(&mut self, state: &mut MicroState, t_target: f64) -> Result<()> {
        let floor = 1e-12 * self.h_max;
        while state.t < t_target {
            let remaining = t_target - state.t;
            let suggested = self.h;
            let last = suggested >= remaining * (1.0 - 1e-12);
            let h = if last {
                remaining
            } else if suggested * 2.0 > remaining {
                0.5 * remaining
            } else {
                suggested
            };
            match self.try_step(state, h)? {
                Some((cells, err)) if err <= 1.0 => {
                    self.commit(state, &cells, h);
                    state.t = if last { t_target } else { state.t + h };
                    self.accepted += 1;
                    let fac = if err > 0.0 { 0.9 * err.powf(-0.5) } else { 5.0 };
                    let grown = h * fac.clamp(0.2, 5.0);
                    // a step clipped to hit the target says nothing against
                    // the previous suggestion
                    self.h = if last { grown.max(suggested) } else { grown }.min(self.h_max);
                }
                Some((_, err)) => {
                    self.rejected += 1;
                    self.h = h * (0.9 * err.powf(-0.5)).clamp(0.1, 0.5);
                    if self.h < floor {
                        return Err(Error::StepUnderflow { t: state.t, h: self.h });
                    }
                }
                None => {
                    self.rejected += 1;
                    self.h = 0.5 * h;
                    if self.h < floor {
                        let cell = self.first_newton_failure(state, self.h).unwrap_or(0);
                        return Err(Error::NewtonFailure {
                            cell,
                            t: state.t,
                            substep: self.h,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn first_newton_failure(&mut self, state: &MicroState, h: f64) -> Option<usize> {
        let hg = h * GAMMA;
        (0..self.grid.len()).find(|&i| {
            let y = [state.n[i], state.ps[i], state.ph[i]];
            let e = self.e0.at(i);
            let rhs = [y[0] + hg * e[0], y[1] + hg * e[1], y[2] + hg * e[2]];
            newton_stage(rhs, y, hg, &self.params, self.eps, self.cfg.newton_tol, self.cfg.newton_max_iters)
                .is_none()
        })
    }

    /// One attempted step; `None` when a Newton solve failed somewhere.
    fn try_step(&mut self, state: &MicroState, h: f64) -> Result<Option<(Vec<CellStep>, f64)>> {
        let (params, eps) = (self.params, self.eps);
        let (tol, iters) = (self.cfg.newton_tol, self.cfg.newton_max_iters);
        let (rtol, atol) = (self.cfg.rtol, self.cfg.atol);
        let hg = h * GAMMA;
        self.e0.eval(&self.grid, &params, &state.n, &state.ps, &state.ph);

        let e0 = &self.e0;
        let stage2: Option<Vec<Vec3>> = (0..self.grid.len())
            .into_par_iter()
            .with_min_len(MIN_PAR_LEN)
            .map(|i| {
                let y = [state.n[i], state.ps[i], state.ph[i]];
                let e = e0.at(i);
                let rhs = [y[0] + hg * e[0], y[1] + hg * e[1], y[2] + hg * e[2]];
                newton_stage(rhs, y, hg, &params, eps, tol, iters).map(|(y2, _)| y2)
            })
            .collect();
        let Some(stage2) = stage2 else {
            return Ok(None);
        };
        self.stage2 = stage2;
        {
            let s2 = &self.stage2;
            let n: Vec<f64> = s2.iter().map(|v| v[0]).collect();
            let ps: Vec<f64> = s2.iter().map(|v| v[1]).collect();
            let ph: Vec<f64> = s2.iter().map(|v| v[2]).collect();
            self.e2.eval(&self.grid, &params, &n, &ps, &ph);
        }

        let (e0, e2, s2) = (&self.e0, &self.e2, &self.stage2);
        let cells: Option<Vec<CellStep>> = (0..self.grid.len())
            .into_par_iter()
            .with_min_len(MIN_PAR_LEN)
            .map(|i| {
                let y = [state.n[i], state.ps[i], state.ph[i]];
                let (ea, eb, y2) = (e0.at(i), e2.at(i), s2[i]);
                let mut rhs = [0.0; 3];
                let mut explicit_diff = [0.0; 3];
                for k in 0..3 {
                    // implicit stage-2 rate from the stage difference
                    let f2 = (y2[k] - y[k] - hg * ea[k]) / hg;
                    rhs[k] = y[k] + h * (DELTA * ea[k] + (1.0 - DELTA) * eb[k]) + h * (1.0 - GAMMA) * f2;
                    explicit_diff[k] = h * (1.0 - DELTA) * (eb[k] - ea[k]) - hg * f2;
                }
                let (y3, m) = newton_stage(rhs, y2, hg, &params, eps, tol, iters)?;
                let raw: Vec3 = std::array::from_fn(|k| explicit_diff[k] + (y3[k] - rhs[k]));
                let filtered = solve3(m, raw).unwrap_or(raw);
                let err = (0..3)
                    .map(|k| filtered[k].abs() / (atol + rtol * y[k].abs().max(y3[k].abs())))
                    .fold(0.0, f64::max);
                Some(CellStep { y2, y3, err })
            })
            .collect();
        let Some(cells) = cells else {
            return Ok(None);
        };
        let err = cells.iter().map(|c| c.err).fold(0.0, f64::max);
        if !err.is_finite() {
            return Ok(Some((cells, f64::INFINITY)));
        }
        Ok(Some((cells, err)))
    }

    fn commit(&mut self, state: &mut MicroState, cells: &[CellStep], h: f64) {
        for (i, c) in cells.iter().enumerate() {
            debug_assert!(c.y2.iter().all(|v| v.is_finite()));
            state.n[i] = c.y3[0];
            state.ps[i] = c.y3[1];
            state.ph[i] = c.y3[2];
            let r = self.exchange.residual(c.y3[0], c.y3[1], c.y3[2]);
            let r0 = self.residual[i];
            self.acc_sq[i] += 0.5 * h * (r0 * r0 + r * r);
            self.acc_abs[i] += 0.5 * h * (r0.abs() + r.abs());
            self.residual[i] = r;
        }
    }
}

/// Spatial `L2` and `L1` norms of the exchange residual of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorms {
    pub l2: f64,
    pub l1: f64,
}

pub fn micro_residual(state: &MicroState, params: &ModelParams, grid: &Grid) -> Result<ResidualNorms> {
    check_fields(grid, &[&state.n, &state.ps, &state.ph])?;
    let ex = Exchange::dimensional(params);
    let vol = grid.cell_volume();
    let (mut s2, mut s1) = (0.0, 0.0);
    for i in 0..grid.len() {
        let r = ex.residual(state.n[i], state.ps[i], state.ph[i]);
        s2 += r * r;
        s1 += r.abs();
    }
    Ok(ResidualNorms {
        l2: (s2 * vol).sqrt(),
        l1: s1 * vol,
    })
}
