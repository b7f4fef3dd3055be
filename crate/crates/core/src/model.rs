//! Pointwise kinetics: reaction right-hand sides, the quasi-steady split of
//! predators into searching and handling classes, and the nonlinear
//! cross-diffusion coefficient of the limit system.

use serde::{Deserialize, Serialize};

use crate::error::{check_density, Result};
use crate::params::{ModelParams, NondimParams};

/// How densities are screened before evaluation.
///
/// `Strict` rejects negative input. `Clamped` maps it to zero and is meant for
/// the inner iterations of implicit solves, where tiny excursions below zero
/// are transient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    #[default]
    Strict,
    Clamped,
}

impl EvalMode {
    fn screen(self, name: &'static str, value: f64) -> Result<f64> {
        match self {
            EvalMode::Strict => {
                check_density(name, value)?;
                Ok(value)
            }
            EvalMode::Clamped => Ok(value.max(0.0)),
        }
    }
}

/// `A`, `B` and the discriminant `Delta` of the quasi-steady quadratic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxQuantities {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
}

/// Searching and handling predators on the constraint manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredatorSplit {
    pub searching: f64,
    pub handling: f64,
}

/// Fast exchange between searching and handling predators.
///
/// Searching predators become handlers at rate `alpha N / (1 + xi p_s)` and
/// return at rate `gamma`. The product `gamma xi` is stored directly so the
/// dimensionless case (where it is exactly one) carries no rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub alpha: f64,
    pub gamma: f64,
    pub gamma_xi: f64,
}

impl Exchange {
    pub fn dimensional(params: &ModelParams) -> Self {
        Exchange {
            alpha: params.alpha,
            gamma: params.gamma_tilde,
            gamma_xi: params.gamma_tilde * params.xi,
        }
    }

    pub fn nondim(nd: &NondimParams) -> Self {
        Exchange {
            alpha: 1.0,
            gamma: nd.gamma(),
            gamma_xi: 1.0,
        }
    }

    /// `Delta` is formed as `A^2 + 4 gamma (gamma xi) P`, a sum of nonnegative
    /// terms, instead of `B^2 - 4 alpha gamma xi N P`.
    pub fn aux(&self, n: f64, p: f64) -> AuxQuantities {
        let an = self.alpha * n;
        let xp = self.gamma_xi * p;
        let a = self.gamma + an - xp;
        let b = self.gamma + an + xp;
        let delta = a * a + 4.0 * self.gamma * xp;
        AuxQuantities { a, b, delta }
    }

    /// Fractions `(p_s / P, p_h / P)`; finite at `P = 0`.
    pub fn weights(&self, n: f64, p: f64) -> (f64, f64) {
        let AuxQuantities { a, b, delta } = self.aux(n, p);
        let root = delta.sqrt();
        let w_s = if a >= 0.0 {
            2.0 * self.gamma / (a + root)
        } else {
            // A + sqrt(Delta) cancels when A < 0 (only possible with xi > 0)
            (root - a) / (2.0 * self.gamma_xi * p)
        };
        let w_h = 2.0 * self.alpha * n / (b + root);
        (w_s, w_h)
    }

    pub fn split(&self, n: f64, p: f64) -> PredatorSplit {
        let (w_s, w_h) = self.weights(n, p);
        PredatorSplit {
            searching: w_s * p,
            handling: w_h * p,
        }
    }

    /// Flux from searching to handling, `alpha N p_s / (1 + xi p_s)`.
    pub fn capture(&self, n: f64, searching: f64) -> f64 {
        // 1 + xi p_s written with gamma_xi to avoid dividing by gamma twice
        self.alpha * n * searching * self.gamma / (self.gamma + self.gamma_xi * searching)
    }

    /// `gamma p_h - alpha N p_s / (1 + xi p_s)`: zero on the constraint manifold.
    pub fn residual(&self, n: f64, searching: f64, handling: f64) -> f64 {
        self.gamma * handling - self.capture(n, searching)
    }
}

/// Reaction and diffusion data of a two-field limit system.
///
/// Both the dimensional limits (Holling for `xi = 0`, Beddington-DeAngelis for
/// `xi > 0`) and the dimensionless system share this form:
///
/// ```text
/// dN/dt = D_N  lap N      + growth (1 - N / capacity) N - predation  p_h
/// dP/dt = lap(D_s p_s + D_h p_h) + conversion p_h     - mortality  P
/// ```
///
/// with `(p_s, p_h)` the quasi-steady split of `P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitKinetics {
    pub exchange: Exchange,
    pub growth: f64,
    pub capacity: f64,
    pub predation: f64,
    pub conversion: f64,
    pub mortality: f64,
    pub d_prey: f64,
    pub d_searching: f64,
    pub d_handling: f64,
}

impl LimitKinetics {
    pub fn dimensional(params: &ModelParams) -> Self {
        LimitKinetics {
            exchange: Exchange::dimensional(params),
            growth: params.r0,
            capacity: params.carrying_capacity(),
            predation: params.gamma_tilde,
            conversion: params.big_gamma,
            mortality: params.mu,
            d_prey: params.d1,
            d_searching: params.d2,
            d_handling: params.d3,
        }
    }

    /// In dimensionless variables `p_h = 2 N P / (B + sqrt(Delta))`, so the
    /// trophic term `gamma N P / (B + sqrt(Delta))` is `(gamma / 2) p_h`.
    pub fn nondim(nd: &NondimParams) -> Self {
        LimitKinetics {
            exchange: Exchange::nondim(nd),
            growth: nd.r(),
            capacity: nd.nu(),
            predation: 0.5 * nd.gamma(),
            conversion: 0.5 * nd.big_gamma(),
            mortality: nd.mu(),
            d_prey: nd.d1(),
            d_searching: nd.d2(),
            d_handling: nd.d3(),
        }
    }

    pub fn logistic(&self, n: f64) -> f64 {
        if self.capacity.is_finite() {
            self.growth * (1.0 - n / self.capacity) * n
        } else {
            self.growth * n
        }
    }

    /// Pointwise reaction rates `(dN, dP)`; inputs are assumed screened.
    pub fn reaction(&self, n: f64, p: f64) -> (f64, f64) {
        let handling = self.exchange.weights(n, p).1 * p;
        (
            self.logistic(n) - self.predation * handling,
            self.conversion * handling - self.mortality * p,
        )
    }

    /// Effective predator diffusivity `f(N, P)`, a convex combination of the
    /// searching and handling rates.
    pub fn coefficient(&self, n: f64, p: f64) -> f64 {
        let (w_s, w_h) = self.exchange.weights(n, p);
        self.d_searching * w_s + self.d_handling * w_h
    }

    /// The diffused quantity `f(N, P) P`.
    pub fn flux_potential(&self, n: f64, p: f64) -> f64 {
        self.coefficient(n, p) * p
    }

    pub fn max_diffusivity(&self) -> f64 {
        self.d_prey.max(self.d_searching).max(self.d_handling)
    }
}

/// Reaction rates `(dN, dp_s, dp_h)` of the microscopic system, including the
/// fast exchange scaled by `1 / epsilon`.
pub fn reaction_micro(state: [f64; 3], params: &ModelParams) -> Result<[f64; 3]> {
    reaction_micro_with(state, params, EvalMode::Strict)
}

pub fn reaction_micro_with(state: [f64; 3], params: &ModelParams, mode: EvalMode) -> Result<[f64; 3]> {
    let eps = params.require_epsilon()?;
    let n = mode.screen("N", state[0])?;
    let ps = mode.screen("p_s", state[1])?;
    let ph = mode.screen("p_h", state[2])?;
    Ok(micro_rates(n, ps, ph, params, eps))
}

#[inline]
pub(crate) fn micro_rates(n: f64, ps: f64, ph: f64, params: &ModelParams, eps: f64) -> [f64; 3] {
    let capture = params.alpha * n * ps / (1.0 + params.xi * ps);
    let exchange = (-capture + params.gamma_tilde * ph) / eps;
    [
        params.r0 * (1.0 - params.eta * n) * n - capture,
        exchange + params.big_gamma * ph - params.mu * ps,
        -exchange - params.mu * ph,
    ]
}

/// Jacobian of [`micro_rates`] with respect to `(N, p_s, p_h)`.
#[inline]
pub(crate) fn micro_jacobian(n: f64, ps: f64, params: &ModelParams, eps: f64) -> [[f64; 3]; 3] {
    let denom = 1.0 + params.xi * ps;
    let g = ps / denom;
    let dg = 1.0 / (denom * denom);
    let (a, gt) = (params.alpha, params.gamma_tilde);
    [
        [params.r0 * (1.0 - 2.0 * params.eta * n) - a * g, -a * n * dg, 0.0],
        [-a * g / eps, -a * n * dg / eps - params.mu, gt / eps + params.big_gamma],
        [a * g / eps, a * n * dg / eps, -gt / eps - params.mu],
    ]
}

/// `gamma N P / (B + sqrt(Delta))`, the dimensionless trophic term.
pub fn trophic_bda(n: f64, p: f64, nd: &NondimParams) -> Result<f64> {
    check_density("N", n)?;
    check_density("P", p)?;
    let AuxQuantities { b, delta, .. } = Exchange::nondim(nd).aux(n, p);
    Ok(nd.gamma() * n * p / (b + delta.sqrt()))
}

pub fn aux_quantities(n: f64, p: f64, nd: &NondimParams) -> Result<AuxQuantities> {
    check_density("N", n)?;
    check_density("P", p)?;
    Ok(Exchange::nondim(nd).aux(n, p))
}

/// `f = D2 2 gamma / (A + sqrt(Delta)) + D3 2 N / (B + sqrt(Delta))`.
pub fn cross_diff_coefficient(n: f64, p: f64, nd: &NondimParams) -> Result<f64> {
    check_density("N", n)?;
    check_density("P", p)?;
    Ok(LimitKinetics::nondim(nd).coefficient(n, p))
}

/// `(d2 gamma_tilde + d3 alpha N) / (alpha N + gamma_tilde)`.
pub fn holling_limit_coefficient(n: f64, params: &ModelParams) -> Result<f64> {
    check_density("N", n)?;
    let an = params.alpha * n;
    Ok((params.d2 * params.gamma_tilde + params.d3 * an) / (an + params.gamma_tilde))
}

pub fn split_predators(n: f64, p: f64, nd: &NondimParams) -> Result<PredatorSplit> {
    check_density("N", n)?;
    check_density("P", p)?;
    Ok(Exchange::nondim(nd).split(n, p))
}

/// Split in dimensional variables; covers the Holling case `xi = 0`.
pub fn split_predators_dimensional(n: f64, p: f64, params: &ModelParams) -> Result<PredatorSplit> {
    check_density("N", n)?;
    check_density("P", p)?;
    Ok(Exchange::dimensional(params).split(n, p))
}

/// Reaction rates `(dN, dP)` of the dimensionless limit system.
pub fn reaction_limit(n: f64, p: f64, nd: &NondimParams) -> Result<(f64, f64)> {
    check_density("N", n)?;
    check_density("P", p)?;
    Ok(LimitKinetics::nondim(nd).reaction(n, p))
}

/// Dimensional exchange residual `gamma_tilde p_h - alpha N p_s / (1 + xi p_s)`.
pub fn exchange_residual(n: f64, ps: f64, ph: f64, params: &ModelParams) -> f64 {
    Exchange::dimensional(params).residual(n, ps, ph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nd_unit() -> NondimParams {
        NondimParams::with_diffusion(1.0, 1.0, 1.0, 5.0, 1.0, 0.01, 1.0, 0.1).unwrap()
    }

    fn micro_unit() -> ModelParams {
        ModelParams {
            r0: 1.0,
            eta: 0.0,
            alpha: 1.0,
            gamma_tilde: 1.0,
            big_gamma: 1.0,
            mu: 1.0,
            xi: 0.0,
            d1: 1.0,
            d2: 1.0,
            d3: 1.0,
            epsilon: Some(1.0),
        }
    }

    #[test]
    fn micro_without_prey_or_handlers() {
        let mut p = micro_unit();
        p.epsilon = Some(1e-3);
        p.xi = 0.7;
        assert_eq!(reaction_micro([0.0, 1.0, 0.0], &p).unwrap(), [0.0, -1.0, 0.0]);
    }

    #[test]
    fn micro_unit_substitution() {
        let rates = reaction_micro([1.0, 1.0, 1.0], &micro_unit()).unwrap();
        assert_eq!(rates, [0.0, 0.0, -1.0]);
    }

    #[test]
    fn micro_on_manifold_is_epsilon_free() {
        let mut p = micro_unit();
        p.xi = 0.5;
        p.alpha = 2.0;
        p.gamma_tilde = 0.5;
        let (n, ps) = (1.5, 0.8);
        let ph = p.alpha * n * ps / (p.gamma_tilde * (1.0 + p.xi * ps));
        let a = reaction_micro([n, ps, ph], &p.with_epsilon(1e-2)).unwrap();
        let b = reaction_micro([n, ps, ph], &p.with_epsilon(1e-7)).unwrap();
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() <= 1e-9 * a[i].abs().max(1.0), "{a:?} {b:?}");
        }
    }

    #[test]
    fn micro_rejects_bad_input() {
        assert!(reaction_micro([-1.0, 1.0, 1.0], &micro_unit()).is_err());
        let mut p = micro_unit();
        p.epsilon = None;
        assert!(reaction_micro([1.0, 1.0, 1.0], &p).is_err());
        let clamped = reaction_micro_with([-1e-14, 1.0, 1.0], &micro_unit(), EvalMode::Clamped).unwrap();
        assert_eq!(clamped, reaction_micro([0.0, 1.0, 1.0], &micro_unit()).unwrap());
    }

    #[test]
    fn trophic_edges_and_value() {
        let nd = nd_unit();
        assert_eq!(trophic_bda(0.0, 3.0, &nd).unwrap(), 0.0);
        assert_eq!(trophic_bda(3.0, 0.0, &nd).unwrap(), 0.0);
        let v = trophic_bda(1.0, 1.0, &nd).unwrap();
        // 1 / (3 + sqrt 5) and (1/4)(3 - sqrt(9 - 4))
        let direct = 1.0 / (3.0 + 5f64.sqrt());
        let difference = 0.25 * (3.0 - 5f64.sqrt());
        assert!((v - 0.190_983_005_625_052_6).abs() < 1e-15);
        assert!((v - direct).abs() < 1e-15 && (v - difference).abs() < 1e-15);
        assert!(trophic_bda(-1.0, 1.0, &nd).is_err());
    }

    #[test]
    fn coefficient_values() {
        let nd = nd_unit();
        assert_eq!(cross_diff_coefficient(0.0, 2.5, &nd).unwrap(), 1.0);
        let f = cross_diff_coefficient(1.0, 1.0, &nd).unwrap();
        assert!((f - 0.656_230_589_874_905_4).abs() < 1e-14);
        let (w_s, w_h) = Exchange::nondim(&nd).weights(1.0, 1.0);
        assert!((w_s + w_h - 1.0).abs() < 1e-15);
        let equal = nd.diffusion(0.01, 0.3, 0.3).unwrap();
        for (n, p) in [(0.0, 1.0), (2.0, 0.1), (50.0, 80.0)] {
            assert!((cross_diff_coefficient(n, p, &equal).unwrap() - 0.3).abs() < 1e-15);
        }
    }

    #[test]
    fn holling_coefficient_values() {
        let mut p = micro_unit();
        p.d2 = 1.0;
        p.d3 = 0.1;
        assert_eq!(holling_limit_coefficient(0.0, &p).unwrap(), 1.0);
        assert!((holling_limit_coefficient(1.0, &p).unwrap() - 0.55).abs() < 1e-15);
        assert!((holling_limit_coefficient(1e9, &p).unwrap() - 0.1).abs() < 1e-8);
        p.d3 = 1.0;
        assert_eq!(holling_limit_coefficient(3.0, &p).unwrap(), 1.0);
    }

    #[test]
    fn split_edges_and_value() {
        let nd = nd_unit();
        let s = split_predators(0.0, 2.0, &nd).unwrap();
        assert_eq!((s.searching, s.handling), (2.0, 0.0));
        let s = split_predators(4.0, 0.0, &nd).unwrap();
        assert_eq!((s.searching, s.handling), (0.0, 0.0));
        let s = split_predators(1.0, 1.0, &nd).unwrap();
        assert!((s.searching - 0.618_033_988_749_894_9).abs() < 1e-15);
        assert!((s.handling - 0.381_966_011_250_105_1).abs() < 1e-15);
    }

    #[test]
    fn limit_reaction_trivial_equilibria() {
        let nd = nd_unit();
        assert_eq!(reaction_limit(0.0, 0.0, &nd).unwrap(), (0.0, 0.0));
        assert_eq!(reaction_limit(nd.nu(), 0.0, &nd).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn dimensional_split_covers_holling() {
        let mut p = micro_unit();
        p.alpha = 2.0;
        p.gamma_tilde = 0.5;
        let (n, pp) = (0.7, 3.0);
        let s = split_predators_dimensional(n, pp, &p).unwrap();
        let expected_h = p.alpha * n * pp / (p.alpha * n + p.gamma_tilde);
        assert!((s.handling - expected_h).abs() < 1e-14);
        assert!((s.handling - p.alpha * n * s.searching / p.gamma_tilde).abs() < 1e-14);
    }

    #[test]
    fn residual_substitution() {
        let p = micro_unit();
        assert_eq!(exchange_residual(1.0, 1.0, 0.0, &p), -1.0);
        assert_eq!(exchange_residual(1.0, 1.0, 1.0, &p), 0.0);
    }
}
