//! Oracles written directly from the model equations, independent of the
//! crate's kinetics code.

#![allow(dead_code)]

use predprey_core::{ModelParams, NondimParams};
use rand::Rng;

/// Dimensionless limit kinetics `(dN, dP)` with `B = gamma + N + P` and
/// `Delta = B^2 - 4 N P`.
pub fn limit_rhs_nd(n: f64, p: f64, r: f64, nu: f64, gamma: f64, big_gamma: f64, mu: f64) -> [f64; 2] {
    let b = gamma + n + p;
    let root = (b * b - 4.0 * n * p).sqrt();
    let trophic = n * p / (b + root);
    [r * (1.0 - n / nu) * n - gamma * trophic, big_gamma * trophic - mu * p]
}

pub fn limit_rhs(nd: &NondimParams, y: [f64; 2]) -> [f64; 2] {
    limit_rhs_nd(y[0], y[1], nd.r(), nd.nu(), nd.gamma(), nd.big_gamma(), nd.mu())
}

/// Dimensional limit kinetics, solving the quadratic for the handling
/// fraction by the quadratic formula in the unrationalized form.
pub fn limit_rhs_dim(p: &ModelParams, y: [f64; 2]) -> [f64; 2] {
    let (n, pp) = (y[0], y[1]);
    let handling = if p.xi == 0.0 {
        p.alpha * n * pp / (p.gamma_tilde + p.alpha * n)
    } else {
        // gamma_tilde xi s^2 + (gamma_tilde + alpha N - gamma_tilde xi P) s - gamma_tilde P = 0
        let a = p.gamma_tilde * p.xi;
        let b = p.gamma_tilde + p.alpha * n - p.gamma_tilde * p.xi * pp;
        let c = -p.gamma_tilde * pp;
        let s = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        pp - s
    };
    let logistic = p.r0 * (1.0 - p.eta * n) * n;
    [
        logistic - p.gamma_tilde * handling,
        p.big_gamma * handling - p.mu * pp,
    ]
}

/// Microscopic kinetics `(dN, dp_s, dp_h)`.
pub fn micro_rhs(p: &ModelParams, y: [f64; 3]) -> [f64; 3] {
    let eps = p.epsilon.expect("epsilon");
    let (n, s, h) = (y[0], y[1], y[2]);
    let capture = p.alpha * n * s / (1.0 + p.xi * s);
    let exchange = (-capture + p.gamma_tilde * h) / eps;
    [
        p.r0 * (1.0 - p.eta * n) * n - capture,
        exchange + p.big_gamma * h - p.mu * s,
        -exchange - p.mu * h,
    ]
}

/// Positive root of `(r / nu) N^2 - (r - gamma / 2) N - mu gamma^2 / (Gamma - 2 mu) = 0`.
pub fn n_star_quadratic(nd: &NondimParams) -> f64 {
    let (r, nu, g, big, mu) = (nd.r(), nd.nu(), nd.gamma(), nd.big_gamma(), nd.mu());
    let a = r / nu;
    let b = -(r - 0.5 * g);
    let c = -mu * g * g / (big - 2.0 * mu);
    // c < 0, so the roots have opposite signs; take the positive one stably
    let disc = (b * b - 4.0 * a * c).sqrt();
    if b <= 0.0 {
        (-b + disc) / (2.0 * a)
    } else {
        2.0 * c / (-b - disc)
    }
}

/// Coexistence state by damped Newton on [`limit_rhs`] with a
/// finite-difference Jacobian, started at `guess`.
pub fn estar_newton(nd: &NondimParams, guess: [f64; 2]) -> Option<[f64; 2]> {
    let mut y = guess;
    for _ in 0..100 {
        let f = limit_rhs(nd, y);
        let j = fd_jacobian(|v| limit_rhs(nd, v), y);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 {
            return None;
        }
        let dx = [
            -(j[1][1] * f[0] - j[0][1] * f[1]) / det,
            -(-j[1][0] * f[0] + j[0][0] * f[1]) / det,
        ];
        let mut lam = 1.0;
        while y[0] + lam * dx[0] <= 0.0 || y[1] + lam * dx[1] <= 0.0 {
            lam *= 0.5;
        }
        y = [y[0] + lam * dx[0], y[1] + lam * dx[1]];
        if dx[0].abs().max(dx[1].abs()) < 1e-15 * (1.0 + y[0].abs().max(y[1].abs())) {
            return Some(y);
        }
    }
    let f = limit_rhs(nd, y);
    (f[0].abs().max(f[1].abs()) < 1e-13).then_some(y)
}

/// Richardson-extrapolated central differences, error `O(h^4)`.
pub fn fd_jacobian(f: impl Fn([f64; 2]) -> [f64; 2], y: [f64; 2]) -> [[f64; 2]; 2] {
    let mut j = [[0.0; 2]; 2];
    for k in 0..2 {
        let h = 1e-3 * y[k].abs().max(1e-3);
        let diff = |h: f64| {
            let (mut a, mut b) = (y, y);
            a[k] += h;
            b[k] -= h;
            let (fa, fb) = (f(a), f(b));
            [(fa[0] - fb[0]) / (2.0 * h), (fa[1] - fb[1]) / (2.0 * h)]
        };
        let (d1, d2) = (diff(h), diff(0.5 * h));
        for i in 0..2 {
            j[i][k] = (4.0 * d2[i] - d1[i]) / 3.0;
        }
    }
    j
}

/// Dormand-Prince 5(4) with error control; returns the state at each of
/// `times` (ascending, starting after 0).
pub fn dopri<const D: usize>(
    f: impl Fn([f64; D]) -> [f64; D],
    y0: [f64; D],
    times: &[f64],
    rtol: f64,
    atol: f64,
) -> Vec<[f64; D]> {
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut out = Vec::with_capacity(times.len());
    let mut y = y0;
    let mut t = 0.0;
    let mut h: f64 = 1e-4;
    for &target in times {
        while t < target {
            let step = h.min(target - t);
            let mut k = [[0.0; D]; 7];
            for s in 0..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    for d in 0..D {
                        ys[d] += step * A[s][j] * kj[d];
                    }
                }
                k[s] = f(ys);
            }
            let mut y5 = y;
            let mut err = 0.0f64;
            for d in 0..D {
                let mut e = 0.0;
                for s in 0..7 {
                    y5[d] += step * B5[s] * k[s][d];
                    e += step * (B5[s] - B4[s]) * k[s][d];
                }
                let sc = atol + rtol * y[d].abs().max(y5[d].abs());
                err = err.max((e / sc).abs());
            }
            if err <= 1.0 {
                t += step;
                y = y5;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = step * fac;
        }
        out.push(y);
    }
    out
}

/// A valid dimensionless parameter set with a coexistence state and
/// `D2 > D3`, drawn log-uniformly.
pub fn random_nondim(rng: &mut impl Rng) -> NondimParams {
    let lu = |rng: &mut dyn rand::RngCore, lo: f64, hi: f64| -> f64 {
        (lo.ln() + (hi.ln() - lo.ln()) * rng.gen::<f64>()).exp()
    };
    loop {
        let r = lu(rng, 0.05, 5.0);
        let nu = lu(rng, 0.2, 100.0);
        let gamma = lu(rng, 0.05, 20.0);
        let mu = lu(rng, 0.05, 5.0);
        // Gamma above the existence threshold by a random factor
        let threshold = 2.0 * mu + 2.0 * gamma * mu / nu;
        let big_gamma = threshold * lu(rng, 1.01, 20.0);
        let d1 = lu(rng, 1e-3, 1.0);
        let d2 = lu(rng, 1e-2, 10.0);
        let d3 = d2 * lu(rng, 1e-3, 0.99);
        if let Ok(nd) = NondimParams::with_diffusion(r, nu, gamma, big_gamma, mu, d1, d2, d3) {
            return nd;
        }
    }
}

/// Draws concentrated where `J11 > 0` and Turing instability is common:
/// large carrying capacity and slow prey diffusion.
pub fn random_nondim_turing_prone(rng: &mut impl Rng) -> NondimParams {
    let u = |rng: &mut dyn rand::RngCore, lo: f64, hi: f64| lo + (hi - lo) * rng.gen::<f64>();
    loop {
        let r = u(rng, 0.5, 2.0);
        let nu = u(rng, 20.0, 100.0);
        let gamma = u(rng, 2.0, 10.0);
        let mu = u(rng, 0.5, 1.5);
        let big_gamma = (2.0 * mu + 2.0 * gamma * mu / nu) * u(rng, 1.2, 3.0);
        let d1 = 10f64.powf(u(rng, -3.0, -1.5));
        let d2 = u(rng, 0.5, 2.0);
        let d3 = d2 * u(rng, 0.05, 0.99);
        if let Ok(nd) = NondimParams::with_diffusion(r, nu, gamma, big_gamma, mu, d1, d2, d3) {
            return nd;
        }
    }
}

/// Reference state `r = nu = gamma = mu = 1`, `Gamma = 5`.
pub fn reference() -> NondimParams {
    NondimParams::with_diffusion(1.0, 1.0, 1.0, 5.0, 1.0, 0.01, 1.0, 0.1).unwrap()
}

/// Large carrying capacity with `J11 > 0`; `d3` selects the Turing case.
pub fn nd_plus(d3: f64) -> NondimParams {
    NondimParams::with_diffusion(1.0, 50.0, 5.0, 4.0, 1.0, 0.01, 1.0, d3).unwrap()
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// Model section of a fixture file.
pub fn load_fixture(name: &str) -> ModelParams {
    #[derive(serde::Deserialize)]
    struct File {
        model: ModelParams,
    }
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    let file: File = toml::from_str(&text).expect("fixture parses");
    file.model
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
