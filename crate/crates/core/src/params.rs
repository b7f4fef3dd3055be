//! Dimensional and dimensionless parameter records.
//!
//! [`ModelParams`] is the single source of truth. [`NondimParams`] is a derived,
//! validated view produced by [`nondimensionalize`] (or built directly for
//! analysis work in dimensionless units) and cannot be mutated field by field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the microscopic three-field system and of its limits.
///
/// `xi = 0` selects the Holling-II variant, `xi > 0` the Beddington-DeAngelis one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Prey growth rate.
    pub r0: f64,
    /// Logistic coefficient; carrying capacity is `1 / eta` when positive.
    pub eta: f64,
    /// Encounter rate of searching predators with prey.
    pub alpha: f64,
    /// Return rate handling -> searching.
    pub gamma_tilde: f64,
    /// Reproduction rate of handling predators.
    #[serde(rename = "Gamma")]
    pub big_gamma: f64,
    /// Predator mortality.
    pub mu: f64,
    /// Predator interference coefficient.
    pub xi: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    /// Time-scale separation, needed only for microscopic runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl ModelParams {
    /// Checks finiteness and signs of every field.
    ///
    /// Reaction rates may be zero (that switches the corresponding process
    /// off); `gamma_tilde` and the diffusion rates must be strictly positive.
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("r0", self.r0),
            ("eta", self.eta),
            ("alpha", self.alpha),
            ("Gamma", self.big_gamma),
            ("mu", self.mu),
            ("xi", self.xi),
        ];
        for (name, value) in nonneg {
            if !value.is_finite() || value < 0.0 {
                return Err(invalid(name, value, "must be finite and >= 0"));
            }
        }
        let pos = [
            ("gamma_tilde", self.gamma_tilde),
            ("d1", self.d1),
            ("d2", self.d2),
            ("d3", self.d3),
        ];
        for (name, value) in pos {
            if !value.is_finite() || value <= 0.0 {
                return Err(invalid(name, value, "must be finite and > 0"));
            }
        }
        if let Some(eps) = self.epsilon {
            if !eps.is_finite() || eps <= 0.0 {
                return Err(invalid("epsilon", eps, "must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// The time-scale separation, or an error for limit-only parameter sets.
    pub fn require_epsilon(&self) -> Result<f64> {
        match self.epsilon {
            Some(eps) if eps > 0.0 && eps.is_finite() => Ok(eps),
            Some(eps) => Err(invalid("epsilon", eps, "must be finite and > 0")),
            None => Err(Error::Precondition(
                "epsilon required for microscopic runs".into(),
            )),
        }
    }

    /// Searching predators must diffuse faster than handling ones for the
    /// region comparisons.
    pub fn require_searching_faster(&self) -> Result<()> {
        if self.d2 > self.d3 {
            Ok(())
        } else {
            Err(invalid(
                "d3",
                self.d3,
                format!("region comparison requires d2 > d3 (d2 = {})", self.d2),
            ))
        }
    }

    pub fn is_holling(&self) -> bool {
        self.xi == 0.0
    }

    /// Carrying capacity `1 / eta`, infinite when `eta = 0`.
    pub fn carrying_capacity(&self) -> f64 {
        if self.eta > 0.0 {
            1.0 / self.eta
        } else {
            f64::INFINITY
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    /// Replaces the named field (`r0`, `eta`, `alpha`, `gamma_tilde`, `Gamma`,
    /// `mu`, `xi`, `d1`, `d2`, `d3`, `epsilon`) and revalidates.
    pub fn with(mut self, name: &str, value: f64) -> Result<Self> {
        let slot = match name {
            "r0" => &mut self.r0,
            "eta" => &mut self.eta,
            "alpha" => &mut self.alpha,
            "gamma_tilde" => &mut self.gamma_tilde,
            "Gamma" => &mut self.big_gamma,
            "mu" => &mut self.mu,
            "xi" => &mut self.xi,
            "d1" => &mut self.d1,
            "d2" => &mut self.d2,
            "d3" => &mut self.d3,
            "epsilon" => {
                self.epsilon = Some(value);
                self.validate()?;
                return Ok(self);
            }
            _ => return Err(Error::Precondition(format!("unknown parameter name {name:?}"))),
        };
        *slot = value;
        self.validate()?;
        Ok(self)
    }
}

/// Dimensionless parameters of the limit system.
///
/// `gamma` is the dimensional `gamma_tilde` under its new name; `big_gamma`
/// and `mu` are the rescaled reproduction and mortality rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNondim", into = "RawNondim")]
pub struct NondimParams {
    r: f64,
    nu: f64,
    gamma: f64,
    big_gamma: f64,
    mu: f64,
    d1: f64,
    d2: f64,
    d3: f64,
}

/// Names accepted by [`NondimParams::with`] and by parameter scans.
pub const NONDIM_NAMES: [&str; 8] = ["r", "nu", "gamma", "Gamma", "mu", "D1", "D2", "D3"];

impl NondimParams {
    /// Reaction part only; diffusion rates default to one.
    pub fn new(r: f64, nu: f64, gamma: f64, big_gamma: f64, mu: f64) -> Result<Self> {
        Self::with_diffusion(r, nu, gamma, big_gamma, mu, 1.0, 1.0, 1.0)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_diffusion(
        r: f64,
        nu: f64,
        gamma: f64,
        big_gamma: f64,
        mu: f64,
        d1: f64,
        d2: f64,
        d3: f64,
    ) -> Result<Self> {
        let nd = NondimParams {
            r,
            nu,
            gamma,
            big_gamma,
            mu,
            d1,
            d2,
            d3,
        };
        for (name, value) in nd.named() {
            if !value.is_finite() || value <= 0.0 {
                return Err(invalid(name, value, "must be finite and > 0"));
            }
        }
        Ok(nd)
    }

    /// Replaces the diffusion rates, keeping the reaction part.
    pub fn diffusion(self, d1: f64, d2: f64, d3: f64) -> Result<Self> {
        Self::with_diffusion(self.r, self.nu, self.gamma, self.big_gamma, self.mu, d1, d2, d3)
    }

    /// Copy with one named parameter replaced (see [`NONDIM_NAMES`]).
    pub fn with(self, name: &str, value: f64) -> Result<Self> {
        let mut v = [
            self.r,
            self.nu,
            self.gamma,
            self.big_gamma,
            self.mu,
            self.d1,
            self.d2,
            self.d3,
        ];
        let idx = NONDIM_NAMES
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| Error::Precondition(format!("unknown dimensionless parameter {name:?}")))?;
        v[idx] = value;
        Self::with_diffusion(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7])
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.named().into_iter().find(|(n, _)| *n == name).map(|(_, v)| v)
    }

    fn named(&self) -> [(&'static str, f64); 8] {
        [
            ("r", self.r),
            ("nu", self.nu),
            ("gamma", self.gamma),
            ("Gamma", self.big_gamma),
            ("mu", self.mu),
            ("D1", self.d1),
            ("D2", self.d2),
            ("D3", self.d3),
        ]
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn big_gamma(&self) -> f64 {
        self.big_gamma
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn d1(&self) -> f64 {
        self.d1
    }
    pub fn d2(&self) -> f64 {
        self.d2
    }
    pub fn d3(&self) -> f64 {
        self.d3
    }
}

#[derive(Serialize, Deserialize)]
struct RawNondim {
    r: f64,
    nu: f64,
    gamma: f64,
    #[serde(rename = "Gamma")]
    big_gamma: f64,
    mu: f64,
    #[serde(rename = "D1")]
    d1: f64,
    #[serde(rename = "D2")]
    d2: f64,
    #[serde(rename = "D3")]
    d3: f64,
}

impl TryFrom<RawNondim> for NondimParams {
    type Error = Error;
    fn try_from(r: RawNondim) -> Result<Self> {
        NondimParams::with_diffusion(r.r, r.nu, r.gamma, r.big_gamma, r.mu, r.d1, r.d2, r.d3)
    }
}

impl From<NondimParams> for RawNondim {
    fn from(p: NondimParams) -> Self {
        RawNondim {
            r: p.r,
            nu: p.nu,
            gamma: p.gamma,
            big_gamma: p.big_gamma,
            mu: p.mu,
            d1: p.d1,
            d2: p.d2,
            d3: p.d3,
        }
    }
}

/// Scalings `t = theta T`, `N = sigma n`, `P = pi p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NondimMap {
    pub theta: f64,
    pub sigma: f64,
    pub pi: f64,
}

/// Maps dimensional parameters to the dimensionless limit system.
///
/// The scalings solve `2 alpha pi theta = 1`, `alpha sigma = 1` and
/// `gamma_tilde xi pi = 1`, so the map only exists for `xi > 0`. The
/// analysis also needs a finite carrying capacity, hence `eta > 0`.
pub fn nondimensionalize(params: &ModelParams) -> Result<(NondimParams, NondimMap)> {
    params.validate()?;
    if params.xi == 0.0 {
        return Err(Error::Undefined(
            "Holling variant is already in reduced form; adimensionalization map undefined".into(),
        ));
    }
    if params.alpha <= 0.0 {
        return Err(invalid("alpha", params.alpha, "must be > 0 to adimensionalize"));
    }
    if params.eta <= 0.0 {
        return Err(invalid(
            "eta",
            params.eta,
            "a finite carrying capacity (eta > 0) is required to adimensionalize",
        ));
    }
    let sigma = 1.0 / params.alpha;
    let pi = 1.0 / (params.gamma_tilde * params.xi);
    let theta = 1.0 / (2.0 * params.alpha * pi);
    let map = NondimMap { theta, sigma, pi };

    let nd = NondimParams::with_diffusion(
        params.r0 * theta,
        params.carrying_capacity() / sigma,
        params.gamma_tilde,
        params.big_gamma * params.gamma_tilde * sigma * params.xi,
        params.mu * theta,
        params.d1 * theta,
        params.d2 * theta,
        params.d3 * theta,
    )?;
    Ok((nd, map))
}

/// Inverse of [`nondimensionalize`]. `epsilon` is not part of the limit
/// system and is passed through.
pub fn dimensionalize(nd: &NondimParams, map: &NondimMap, epsilon: Option<f64>) -> Result<ModelParams> {
    let alpha = 1.0 / map.sigma;
    let gamma_tilde = nd.gamma;
    let xi = 1.0 / (gamma_tilde * map.pi);
    let params = ModelParams {
        r0: nd.r / map.theta,
        eta: 1.0 / (nd.nu * map.sigma),
        alpha,
        gamma_tilde,
        big_gamma: nd.big_gamma / (gamma_tilde * map.sigma * xi),
        mu: nd.mu / map.theta,
        xi,
        d1: nd.d1 / map.theta,
        d2: nd.d2 / map.theta,
        d3: nd.d3 / map.theta,
        epsilon,
    };
    params.validate()?;
    Ok(params)
}

fn invalid(name: &'static str, value: f64, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason: reason.into(),
    }
}
