//! Two-field limit solver: explicit SSP-RK3 on
//! `N_t = D_N lap N + F(N, P)`, `P_t = lap(w(N, P)) + G(N, P)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{laplacian_into, Grid};
use super::check_fields;
use crate::error::Result;
use crate::model::LimitKinetics;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitState {
    pub t: f64,
    pub n: Vec<f64>,
    pub p: Vec<f64>,
}

const MIN_PAR_LEN: usize = 256;

pub struct LimitStepper {
    grid: Grid,
    kin: LimitKinetics,
    dt: f64,
    w: Vec<f64>,
    lap_n: Vec<f64>,
    lap_w: Vec<f64>,
    k_n: Vec<f64>,
    k_p: Vec<f64>,
    s_n: Vec<f64>,
    s_p: Vec<f64>,
}

impl LimitStepper {
    pub fn new(grid: Grid, kin: LimitKinetics, dt: f64, state: &LimitState) -> Result<Self> {
        check_fields(&grid, &[&state.n, &state.p])?;
        let len = grid.len();
        let z = || vec![0.0; len];
        Ok(LimitStepper {
            grid,
            kin,
            dt,
            w: z(),
            lap_n: z(),
            lap_w: z(),
            k_n: z(),
            k_p: z(),
            s_n: z(),
            s_p: z(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Right-hand side into `k_n`, `k_p`. Kinetics see clamped densities.
    fn rhs(&mut self, n: &[f64], p: &[f64]) {
        let kin = self.kin;
        self.w
            .par_iter_mut()
            .with_min_len(MIN_PAR_LEN)
            .enumerate()
            .for_each(|(i, w)| *w = kin.flux_potential(n[i].max(0.0), p[i].max(0.0)));
        laplacian_into(n, &self.grid, &mut self.lap_n);
        laplacian_into(&self.w, &self.grid, &mut self.lap_w);
        let (lap_n, lap_w) = (&self.lap_n, &self.lap_w);
        self.k_n
            .par_iter_mut()
            .zip(self.k_p.par_iter_mut())
            .with_min_len(MIN_PAR_LEN)
            .enumerate()
            .for_each(|(i, (kn, kp))| {
                let (fr, gr) = kin.reaction(n[i].max(0.0), p[i].max(0.0));
                *kn = kin.d_prey * lap_n[i] + fr;
                *kp = lap_w[i] + gr;
            });
    }

    /// One Shu-Osher SSP-RK3 step of size `dt`.
    pub fn step(&mut self, state: &mut LimitState) {
        let dt = self.dt;
        let (n0, p0) = (state.n.clone(), state.p.clone());

        self.rhs(&n0, &p0);
        let mut s_n = std::mem::take(&mut self.s_n);
        let mut s_p = std::mem::take(&mut self.s_p);
        for i in 0..n0.len() {
            s_n[i] = n0[i] + dt * self.k_n[i];
            s_p[i] = p0[i] + dt * self.k_p[i];
        }
        self.rhs(&s_n, &s_p);
        for i in 0..n0.len() {
            s_n[i] = 0.75 * n0[i] + 0.25 * (s_n[i] + dt * self.k_n[i]);
            s_p[i] = 0.75 * p0[i] + 0.25 * (s_p[i] + dt * self.k_p[i]);
        }
        self.rhs(&s_n, &s_p);
        for i in 0..n0.len() {
            state.n[i] = n0[i] / 3.0 + 2.0 / 3.0 * (s_n[i] + dt * self.k_n[i]);
            state.p[i] = p0[i] / 3.0 + 2.0 / 3.0 * (s_p[i] + dt * self.k_p[i]);
        }
        self.s_n = s_n;
        self.s_p = s_p;
        state.t += dt;
    }
}
