//! Homogeneous equilibria of the limit system and their linear stability.

use serde::{Deserialize, Serialize};

use crate::error::{check_density, Error, Result};
use crate::model::{Exchange, LimitKinetics};
use crate::params::{ModelParams, NondimParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquilibriumKind {
    Extinction,
    NonCoexistence,
    Coexistence,
}

impl EquilibriumKind {
    pub fn label(self) -> &'static str {
        match self {
            EquilibriumKind::Extinction => "E0",
            EquilibriumKind::NonCoexistence => "E1",
            EquilibriumKind::Coexistence => "E*",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub kind: EquilibriumKind,
    pub n: f64,
    pub p: f64,
}

/// A 2x2 Jacobian `[[j11, j12], [j21, j22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian2 {
    pub j11: f64,
    pub j12: f64,
    pub j21: f64,
    pub j22: f64,
}

impl Jacobian2 {
    pub fn trace(&self) -> f64 {
        self.j11 + self.j22
    }

    pub fn det(&self) -> f64 {
        self.j11 * self.j22 - self.j12 * self.j21
    }
}

/// Closed-form Jacobian at the coexistence equilibrium with its auxiliaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianStar {
    pub j11: f64,
    pub j12: f64,
    pub j21: f64,
    pub j22: f64,
    /// `Q* = ((Gamma - 2 mu) / 2 mu) N* + 2 mu gamma / (Gamma - 2 mu)`.
    pub q_star: f64,
    /// Discriminant of the quadratic for `N*`.
    pub delta_n: f64,
    pub equilibrium: Equilibrium,
}

impl JacobianStar {
    pub fn matrix(&self) -> Jacobian2 {
        Jacobian2 {
            j11: self.j11,
            j12: self.j12,
            j21: self.j21,
            j22: self.j22,
        }
    }

    pub fn trace(&self) -> f64 {
        self.matrix().trace()
    }

    pub fn det(&self) -> f64 {
        self.matrix().det()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    StableNode,
    StableFocus,
    Saddle,
    UnstableNode,
    UnstableFocus,
    /// Zero trace with positive determinant, or zero determinant.
    NonHyperbolic,
}

impl Classification {
    /// Classification from the signs of trace and determinant.
    pub fn from_trace_det(trace: f64, det: f64) -> Self {
        if det < 0.0 {
            return Classification::Saddle;
        }
        if det == 0.0 || trace == 0.0 {
            return Classification::NonHyperbolic;
        }
        let real = trace * trace >= 4.0 * det;
        match (trace < 0.0, real) {
            (true, true) => Classification::StableNode,
            (true, false) => Classification::StableFocus,
            (false, true) => Classification::UnstableNode,
            (false, false) => Classification::UnstableFocus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Classification::StableNode => "stable-node",
            Classification::StableFocus => "stable-focus",
            Classification::Saddle => "saddle",
            Classification::UnstableNode => "unstable-node",
            Classification::UnstableFocus => "unstable-focus",
            Classification::NonHyperbolic => "non-hyperbolic",
        }
    }

    pub fn is_stable(self) -> bool {
        matches!(self, Classification::StableNode | Classification::StableFocus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub equilibrium: Equilibrium,
    pub jacobian: Jacobian2,
    pub trace: f64,
    pub det: f64,
    pub classification: Classification,
    pub tr_negative: bool,
}

impl StabilityReport {
    fn new(equilibrium: Equilibrium, jacobian: Jacobian2, classification: Classification) -> Self {
        let trace = jacobian.trace();
        StabilityReport {
            equilibrium,
            jacobian,
            trace,
            det: jacobian.det(),
            classification,
            tr_negative: trace < 0.0,
        }
    }
}

/// The two sides `(Gamma - 2 mu, 2 gamma mu / nu)` of the existence condition.
pub fn coexistence_margin(nd: &NondimParams) -> (f64, f64) {
    (
        nd.big_gamma() - 2.0 * nd.mu(),
        2.0 * nd.gamma() * nd.mu() / nd.nu(),
    )
}

/// `Gamma - 2 mu > 2 gamma mu / nu`, strictly.
pub fn coexistence_exists(nd: &NondimParams) -> bool {
    let (lhs, rhs) = coexistence_margin(nd);
    lhs > rhs
}

fn require_coexistence(nd: &NondimParams) -> Result<()> {
    let (lhs, rhs) = coexistence_margin(nd);
    if lhs > rhs {
        Ok(())
    } else {
        Err(Error::NoCoexistence { lhs, rhs })
    }
}

/// Constant term `mu gamma^2 / (Gamma - 2 mu)` of the quadratic for `N*`.
fn quadratic_constant(nd: &NondimParams) -> f64 {
    nd.mu() * nd.gamma() * nd.gamma() / (nd.big_gamma() - 2.0 * nd.mu())
}

/// `Delta_N = (r - gamma/2)^2 + 4 (r / nu) mu gamma^2 / (Gamma - 2 mu)`.
fn delta_n(nd: &NondimParams) -> f64 {
    let b = nd.r() - 0.5 * nd.gamma();
    b * b + 4.0 * nd.r() / nd.nu() * quadratic_constant(nd)
}

/// Positive root of `(r/nu) N^2 - (r - gamma/2) N - mu gamma^2/(Gamma - 2 mu)`,
/// followed by one Newton step on the quadratic.
fn n_star(nd: &NondimParams) -> f64 {
    let (r, nu) = (nd.r(), nd.nu());
    let b = r - 0.5 * nd.gamma();
    let c = quadratic_constant(nd);
    let root = delta_n(nd).sqrt();
    let n = if b >= 0.0 {
        nu / (2.0 * r) * (b + root)
    } else {
        2.0 * c / (root - b)
    };
    let q = r / nu * n * n - b * n - c;
    let dq = 2.0 * r / nu * n - b;
    if dq > 0.0 {
        n - q / dq
    } else {
        n
    }
}

/// `P* = (Gamma / 2 mu) N* - Gamma gamma / (Gamma - 2 mu)`.
fn p_star(nd: &NondimParams, n: f64) -> f64 {
    let g = nd.big_gamma();
    g / (2.0 * nd.mu()) * n - g * nd.gamma() / (g - 2.0 * nd.mu())
}

/// Second expression `P* = (Gamma / gamma mu) r (1 - N*/nu) N*`, from the prey
/// equation.
pub fn p_star_from_prey_balance(nd: &NondimParams, n: f64) -> f64 {
    nd.big_gamma() / (nd.gamma() * nd.mu()) * nd.r() * (1.0 - n / nd.nu()) * n
}

/// `Q* = gamma + N* + P* - (4 mu / Gamma) P*`, equal to `sqrt(Delta)` at E*.
pub fn q_star_from_sum(nd: &NondimParams, n: f64, p: f64) -> f64 {
    nd.gamma() + n + p - 4.0 * nd.mu() / nd.big_gamma() * p
}

/// Second closed form of `J*11`,
/// `-(r/Q*) (2 mu gamma/(Gamma - 2 mu)) [((Gamma - 2 mu)^2/(4 nu mu^2 gamma)) N*^2 + (2/nu) N* - 1]`.
pub fn j11_from_quadratic(nd: &NondimParams, n: f64, q: f64) -> f64 {
    let (r, nu, gamma, mu) = (nd.r(), nd.nu(), nd.gamma(), nd.mu());
    let s = nd.big_gamma() - 2.0 * mu;
    let bracket = s * s / (4.0 * nu * mu * mu * gamma) * n * n + 2.0 / nu * n - 1.0;
    -(r / q) * (2.0 * mu * gamma / s) * bracket
}

pub fn coexistence_equilibrium(nd: &NondimParams) -> Result<Equilibrium> {
    require_coexistence(nd)?;
    let n = n_star(nd);
    Ok(Equilibrium {
        kind: EquilibriumKind::Coexistence,
        n,
        p: p_star(nd, n),
    })
}

pub fn jacobian_at_estar(nd: &NondimParams) -> Result<JacobianStar> {
    let equilibrium = coexistence_equilibrium(nd)?;
    let (n, p) = (equilibrium.n, equilibrium.p);
    let (gamma, big_gamma, mu) = (nd.gamma(), nd.big_gamma(), nd.mu());
    let s = big_gamma - 2.0 * mu;
    let delta_n = delta_n(nd);
    let q = s / (2.0 * mu) * n + 2.0 * mu * gamma / s;
    Ok(JacobianStar {
        j11: mu * gamma * gamma * big_gamma / (s * s * n + 4.0 * mu * mu * gamma) - delta_n.sqrt(),
        j12: -gamma * gamma * mu / (q * s),
        j21: s * p / (2.0 * q),
        j22: -(mu / (big_gamma * q)) * s * p,
        q_star: q,
        delta_n,
        equilibrium,
    })
}

/// Jacobian of the dimensionless limit reaction at an arbitrary state.
pub fn jacobian_limit(n: f64, p: f64, nd: &NondimParams) -> Result<Jacobian2> {
    check_density("N", n)?;
    check_density("P", p)?;
    let (r, nu, gamma) = (nd.r(), nd.nu(), nd.gamma());
    let aux = Exchange::nondim(nd).aux(n, p);
    let s = aux.delta.sqrt();
    // 1 - A/s and 1 - C/s with C = gamma - N + P, rationalized when the
    // subtraction would cancel
    let one_minus = |c: f64, numerator: f64| {
        if c >= 0.0 {
            numerator / (s * (s + c))
        } else {
            1.0 - c / s
        }
    };
    let dn = one_minus(aux.a, 4.0 * gamma * p);
    let dp = one_minus(gamma - n + p, 4.0 * gamma * n);
    let (qg, qc) = (0.25 * gamma, 0.25 * nd.big_gamma());
    Ok(Jacobian2 {
        j11: r - 2.0 * r * n / nu - qg * dn,
        j12: -qg * dp,
        j21: qc * dn,
        j22: qc * dp - nd.mu(),
    })
}

/// Reports for E0, E1 and, when it exists, E*, in that order.
///
/// E1 is classified directly from the existence condition so that the switch
/// from node to saddle happens exactly at `Gamma - 2 mu = 2 gamma mu / nu`.
pub fn classify_equilibria(nd: &NondimParams) -> Vec<StabilityReport> {
    let (r, nu, gamma, big_gamma, mu) = (nd.r(), nd.nu(), nd.gamma(), nd.big_gamma(), nd.mu());
    let e0 = Equilibrium {
        kind: EquilibriumKind::Extinction,
        n: 0.0,
        p: 0.0,
    };
    let j0 = Jacobian2 {
        j11: r,
        j12: 0.0,
        j21: 0.0,
        j22: -mu,
    };
    let e1 = Equilibrium {
        kind: EquilibriumKind::NonCoexistence,
        n: nu,
        p: 0.0,
    };
    let j1 = Jacobian2 {
        j11: -r,
        j12: -gamma * nu / (2.0 * (gamma + nu)),
        j21: 0.0,
        j22: big_gamma * nu / (2.0 * (gamma + nu)) - mu,
    };
    let (lhs, rhs) = coexistence_margin(nd);
    let c1 = if lhs > rhs {
        Classification::Saddle
    } else if lhs < rhs {
        Classification::StableNode
    } else {
        Classification::NonHyperbolic
    };
    let mut out = vec![
        StabilityReport::new(e0, j0, Classification::Saddle),
        StabilityReport::new(e1, j1, c1),
    ];
    if let Ok(js) = jacobian_at_estar(nd) {
        let m = js.matrix();
        out.push(StabilityReport::new(
            js.equilibrium,
            m,
            Classification::from_trace_det(m.trace(), m.det()),
        ));
    }
    out
}

/// Coexistence state of the dimensional Holling limit (`xi = 0`, `eta > 0`):
/// `N* = mu gamma_tilde / (alpha (Gamma - mu))`,
/// `P* = r0 (1 - eta N*) (alpha N* + gamma_tilde) / (gamma_tilde alpha)`.
pub fn holling_equilibrium(params: &ModelParams) -> Result<Equilibrium> {
    if !params.is_holling() {
        return Err(Error::Precondition("Holling equilibrium requires xi = 0".into()));
    }
    let lhs = params.big_gamma - params.mu;
    if !(lhs > 0.0) || !(params.alpha > 0.0) {
        return Err(Error::NoCoexistence { lhs, rhs: 0.0 });
    }
    let n = params.mu * params.gamma_tilde / (params.alpha * lhs);
    let k = params.carrying_capacity();
    if !(n < k) {
        return Err(Error::NoCoexistence {
            lhs: k - n,
            rhs: 0.0,
        });
    }
    let (a, g) = (params.alpha, params.gamma_tilde);
    Ok(Equilibrium {
        kind: EquilibriumKind::Coexistence,
        n,
        p: params.r0 * (1.0 - params.eta * n) * (a * n + g) / (g * a),
    })
}

/// Jacobian of the dimensional Holling limit reaction at `(N, P)`.
pub fn holling_jacobian(n: f64, p: f64, params: &ModelParams) -> Result<Jacobian2> {
    check_density("N", n)?;
    check_density("P", p)?;
    let (a, g) = (params.alpha, params.gamma_tilde);
    let den = a * n + g;
    let j11 = params.r0 * (1.0 - 2.0 * params.eta * n) - g * g * a * p / (den * den);
    let j12 = -g * a * n / den;
    let j21 = params.big_gamma * a * g * p / (den * den);
    let j22 = params.big_gamma * a * n / den - params.mu;
    Ok(Jacobian2 { j11, j12, j21, j22 })
}

/// Centered finite-difference Jacobian of any limit kinetics.
pub fn jacobian_fd(kin: &LimitKinetics, n: f64, p: f64, h: f64) -> Jacobian2 {
    let (fn_p, gn_p) = kin.reaction(n + h, p);
    let (fn_m, gn_m) = kin.reaction(n - h, p);
    let (fp_p, gp_p) = kin.reaction(n, p + h);
    let (fp_m, gp_m) = kin.reaction(n, p - h);
    let inv = 0.5 / h;
    Jacobian2 {
        j11: (fn_p - fn_m) * inv,
        j12: (fp_p - fp_m) * inv,
        j21: (gn_p - gn_m) * inv,
        j22: (gp_p - gp_m) * inv,
    }
}

/// Reports for the dimensional Holling limit: E0, E1 = (1 / eta, 0) when
/// `eta > 0`, and E* when it exists.
pub fn classify_holling(params: &ModelParams) -> Result<Vec<StabilityReport>> {
    if !params.is_holling() {
        return Err(Error::Precondition("Holling classification requires xi = 0".into()));
    }
    let report = |kind, n, p| -> Result<StabilityReport> {
        let j = holling_jacobian(n, p, params)?;
        Ok(StabilityReport::new(
            Equilibrium { kind, n, p },
            j,
            Classification::from_trace_det(j.trace(), j.det()),
        ))
    };
    let mut out = vec![report(EquilibriumKind::Extinction, 0.0, 0.0)?];
    if params.eta > 0.0 {
        out.push(report(EquilibriumKind::NonCoexistence, 1.0 / params.eta, 0.0)?);
    }
    if let Ok(e) = holling_equilibrium(params) {
        out.push(report(EquilibriumKind::Coexistence, e.n, e.p)?);
    }
    Ok(out)
}

/// Coexistence state in dimensional variables for either variant.
pub fn coexistence_dimensional(params: &ModelParams) -> Result<Equilibrium> {
    if params.is_holling() {
        return holling_equilibrium(params);
    }
    let (nd, map) = crate::params::nondimensionalize(params)?;
    let e = coexistence_equilibrium(&nd)?;
    Ok(Equilibrium {
        kind: e.kind,
        n: e.n * map.sigma,
        p: e.p * map.pi,
    })
}
