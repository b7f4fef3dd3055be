//! Linear instability of the coexistence state under three predator diffusion
//! models: constant rate `D2`, constant effective rate `D_P`, and the
//! linearized cross diffusion `lap(f(N, P) P)`.
//!
//! Every model reduces to a diffusion matrix `[[D1, 0], [JD21, JD22]]` and the
//! dispersion polynomial `det(J - lambda D) = a lambda^2 - b lambda + det J`.

pub mod scan;

pub use scan::{parameter_scan, ScanAxis, ScanBase, ScanCell, ScanLabel};

use serde::{Deserialize, Serialize};

use crate::equilibria::{holling_equilibrium, holling_jacobian, jacobian_at_estar, Jacobian2, JacobianStar};
use crate::error::{Error, Result};
use crate::params::{ModelParams, NondimParams};

/// Relative threshold below which a sign decision counts as a tie.
pub const TIE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiffusionVariant {
    LinearD2,
    LinearDP,
    Cross,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionModel {
    pub variant: DiffusionVariant,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl DiffusionModel {
    pub fn from_nondim(variant: DiffusionVariant, nd: &NondimParams) -> Self {
        DiffusionModel {
            variant,
            d1: nd.d1(),
            d2: nd.d2(),
            d3: nd.d3(),
        }
    }

    /// Linearized diffusion matrix for this model.
    pub fn linearization(&self, jacobian: Jacobian2, cl: &CrossLinearization) -> Linearization {
        let (jd21, jd22) = match self.variant {
            DiffusionVariant::LinearD2 => (0.0, self.d2),
            DiffusionVariant::LinearDP => (0.0, cl.dp),
            DiffusionVariant::Cross => (cl.jd21, cl.jd22),
        };
        Linearization {
            jacobian,
            d1: self.d1,
            jd21,
            jd22,
        }
    }
}

/// Linearization of `lap(f(N, P) P)` at E*, plus the effective constant rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossLinearization {
    pub jd21: f64,
    pub jd22: f64,
    pub dp: f64,
}

/// Reaction Jacobian with a lower-triangular diffusion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub jacobian: Jacobian2,
    pub d1: f64,
    pub jd21: f64,
    pub jd22: f64,
}

/// Open interval `(lo, hi)` of Laplacian eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn strictly_inside(&self, outer: &Interval) -> bool {
        outer.lo < self.lo && self.hi < outer.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// `det M(lambda) = a lambda^2 - b lambda + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dispersion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Sum of the magnitudes of the terms forming `b`, for tie decisions.
    pub b_scale: f64,
}

impl Dispersion {
    pub fn eval(&self, lambda: f64) -> f64 {
        (self.a * lambda - self.b) * lambda + self.c
    }

    pub fn discriminant(&self) -> f64 {
        self.b * self.b - 4.0 * self.a * self.c
    }

    /// Open interval where the polynomial is negative, or `None` when the
    /// linear coefficient is not clearly positive, the discriminant is not
    /// clearly positive, or `c <= 0`.
    pub fn negative_interval(&self) -> Option<Interval> {
        if !(self.a > 0.0) || !(self.c > 0.0) {
            return None;
        }
        if self.b <= TIE_RTOL * self.b_scale {
            return None;
        }
        let disc = self.discriminant();
        if disc <= TIE_RTOL * self.b * self.b {
            return None;
        }
        let q = 0.5 * (self.b + disc.sqrt());
        Some(Interval {
            lo: self.c / q,
            hi: q / self.a,
        })
    }
}

impl Linearization {
    pub fn dispersion(&self) -> Dispersion {
        let j = &self.jacobian;
        let terms = [j.j11 * self.jd22, self.d1 * j.j22, -j.j12 * self.jd21];
        Dispersion {
            a: self.d1 * self.jd22,
            b: terms.iter().sum(),
            c: j.det(),
            b_scale: terms.iter().map(|t| t.abs()).sum(),
        }
    }

    pub fn det_m(&self, lambda: f64) -> f64 {
        self.dispersion().eval(lambda)
    }

    pub fn trace_m(&self, lambda: f64) -> f64 {
        self.jacobian.trace() - lambda * (self.d1 + self.jd22)
    }

    /// Largest real part of the eigenvalues of `J - lambda D`.
    pub fn growth_rate(&self, lambda: f64) -> f64 {
        let tr = self.trace_m(lambda);
        let det = self.det_m(lambda);
        let disc = tr * tr - 4.0 * det;
        if disc >= 0.0 {
            0.5 * (tr + disc.sqrt())
        } else {
            0.5 * tr
        }
    }

    /// Maximizer of [`Self::growth_rate`] over `lambda >= 0`, by golden-section
    /// search on `[0, lambda_max]`.
    pub fn fastest_growth(&self, lambda_max: f64) -> (f64, f64) {
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (0.0, lambda_max);
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let (mut f1, mut f2) = (self.growth_rate(x1), self.growth_rate(x2));
        while hi - lo > 1e-12 * lambda_max.max(1.0) {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = self.growth_rate(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = self.growth_rate(x1);
            }
        }
        let x = 0.5 * (lo + hi);
        (x, self.growth_rate(x))
    }

    pub fn turing_interval(&self) -> Option<Interval> {
        self.dispersion().negative_interval()
    }
}

/// `D_P = D2 (1 - 2 mu / Gamma) + D3 (2 mu / Gamma)`.
pub fn dp_effective(d2: f64, d3: f64, nd: &NondimParams) -> Result<f64> {
    let (g, mu) = (nd.big_gamma(), nd.mu());
    if !(g > 2.0 * mu) {
        return Err(Error::Precondition(format!(
            "effective predator diffusion needs Gamma > 2 mu (Gamma = {g}, mu = {mu})"
        )));
    }
    let w = 2.0 * mu / g;
    Ok(d2 * (1.0 - w) + d3 * w)
}

/// Diffusion linearization at E* using the diffusion rates stored in `nd`.
pub fn cross_linearization(nd: &NondimParams) -> Result<CrossLinearization> {
    let js = jacobian_at_estar(nd)?;
    Ok(cross_linearization_at(nd, &js))
}

fn cross_linearization_at(nd: &NondimParams, js: &JacobianStar) -> CrossLinearization {
    let (d2, d3) = (nd.d2(), nd.d3());
    let (gamma, g, mu) = (nd.gamma(), nd.big_gamma(), nd.mu());
    let (q, p) = (js.q_star, js.equilibrium.p);
    let s = g - 2.0 * mu;
    CrossLinearization {
        jd21: -((d2 - d3) / q) * (s / g) * p,
        jd22: d2 / q * (gamma + p * s / g) + d3 / q * (2.0 * mu * gamma / s),
        dp: d2 * (1.0 - 2.0 * mu / g) + d3 * (2.0 * mu / g),
    }
}

/// `det M(lambda)` for the given diffusion model at E*.
pub fn det_m(lambda: f64, model: &DiffusionModel, js: &JacobianStar, cl: &CrossLinearization) -> f64 {
    model.linearization(js.matrix(), cl).det_m(lambda)
}

pub fn turing_interval(model: &DiffusionModel, js: &JacobianStar, cl: &CrossLinearization) -> Option<Interval> {
    model.linearization(js.matrix(), cl).turing_interval()
}

/// Dispersion data sampled at a list of Laplacian eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionCurve {
    pub lambdas: Vec<f64>,
    pub trace_vals: Vec<f64>,
    pub det_vals: Vec<f64>,
    pub turing_interval: Option<Interval>,
}

pub fn dispersion_curve(lin: &Linearization, lambdas: &[f64]) -> DispersionCurve {
    let mut lambdas = lambdas.to_vec();
    lambdas.sort_by(f64::total_cmp);
    DispersionCurve {
        trace_vals: lambdas.iter().map(|&l| lin.trace_m(l)).collect(),
        det_vals: lambdas.iter().map(|&l| lin.det_m(l)).collect(),
        lambdas,
        turing_interval: lin.turing_interval(),
    }
}

/// Roots of the constant-rate dispersion polynomial at predator rate `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub d: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Thresholds in the predator diffusion rate for a constant-rate model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurves {
    /// `-D1 J22 / J11`: the linear coefficient changes sign here.
    pub dhat: f64,
    pub dhat1: f64,
    /// Onset of instability; both roots coincide here.
    pub dhat2: f64,
    /// Samples for the requested `D > dhat2`, in input order.
    pub samples: Vec<BranchSample>,
    pub lower_decreasing: bool,
    pub upper_increasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Boundary {
    /// `J11 <= 0`: no constant rate destabilizes E*.
    NoRegion,
    Region(BoundaryCurves),
}

/// Both roots `[b +- sqrt(b^2 - 4 D1 D det)] / (2 D1 D)` with `b = D1 J22 + D J11`,
/// or `None` when they are complex.
pub fn branch_roots(j: &Jacobian2, d1: f64, d: f64) -> Option<(f64, f64)> {
    let lin = Linearization {
        jacobian: *j,
        d1,
        jd21: 0.0,
        jd22: d,
    };
    let disp = lin.dispersion();
    let mut disc = disp.discriminant();
    if disc < 0.0 {
        // rounding at the double root
        if disc < -TIE_RTOL * disp.b * disp.b {
            return None;
        }
        disc = 0.0;
    }
    let q = 0.5 * (disp.b + disp.b.signum() * disc.sqrt());
    if q == 0.0 {
        return None;
    }
    let (x, y) = (disp.c / q, q / disp.a);
    Some((x.min(y), x.max(y)))
}

pub fn boundary_curves(j: &Jacobian2, d1: f64, d_range: &[f64]) -> Boundary {
    if !(j.j11 > 0.0) {
        return Boundary::NoRegion;
    }
    let det = j.det();
    let cross = (-j.j12 * j.j21).max(0.0).sqrt();
    let scale = d1 / (j.j11 * j.j11);
    let dhat1 = scale * (det.sqrt() - cross).powi(2);
    let dhat2 = scale * (det.sqrt() + cross).powi(2);
    let samples: Vec<BranchSample> = d_range
        .iter()
        .filter(|&&d| d > dhat2)
        .filter_map(|&d| branch_roots(j, d1, d).map(|(lower, upper)| BranchSample { d, lower, upper }))
        .collect();
    let mut sorted = samples.clone();
    sorted.sort_by(|a, b| a.d.total_cmp(&b.d));
    let lower_decreasing = sorted.windows(2).all(|w| w[1].lower < w[0].lower);
    let upper_increasing = sorted.windows(2).all(|w| w[1].upper > w[0].upper);
    Boundary::Region(BoundaryCurves {
        dhat: -d1 * j.j22 / j.j11,
        dhat1,
        dhat2,
        samples,
        lower_decreasing,
        upper_increasing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TuringCase {
    NoTuringBoth,
    LinearOnly,
    BothWithInclusion,
}

impl TuringCase {
    pub fn name(self) -> &'static str {
        match self {
            TuringCase::NoTuringBoth => "NoTuringBoth",
            TuringCase::LinearOnly => "LinearOnly",
            TuringCase::BothWithInclusion => "BothWithInclusion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionComparison {
    pub al: f64,
    pub ac: f64,
    pub bl: f64,
    pub bc: f64,
    pub det: f64,
    pub case: TuringCase,
    pub linear: Option<Interval>,
    pub cross: Option<Interval>,
    pub jacobian: Jacobian2,
    pub cl: CrossLinearization,
}

/// Classifies a pair of constant-rate and cross linearizations sharing the
/// same reaction Jacobian, checking the interval ordering on the way.
pub fn classify_pair(linear: &Linearization, cross: &Linearization, cl: CrossLinearization) -> Result<RegionComparison> {
    let (dl, dc) = (linear.dispersion(), cross.dispersion());
    let (li, ci) = (dl.negative_interval(), dc.negative_interval());
    let case = match (li, ci) {
        (None, None) => TuringCase::NoTuringBoth,
        (Some(_), None) => TuringCase::LinearOnly,
        (Some(l), Some(c)) => {
            if !c.strictly_inside(&l) {
                return Err(Error::InvariantViolation(format!(
                    "cross interval ({}, {}) not strictly inside linear interval ({}, {})",
                    c.lo, c.hi, l.lo, l.hi
                )));
            }
            TuringCase::BothWithInclusion
        }
        (None, Some(c)) => {
            return Err(Error::InvariantViolation(format!(
                "cross interval ({}, {}) nonempty while linear interval is empty",
                c.lo, c.hi
            )))
        }
    };
    Ok(RegionComparison {
        al: dl.a,
        ac: dc.a,
        bl: dl.b,
        bc: dc.b,
        det: dl.c,
        case,
        linear: li,
        cross: ci,
        jacobian: linear.jacobian,
        cl,
    })
}

/// Compares the constant rate `D_P` against cross diffusion, using the
/// diffusion rates stored in `nd`.
pub fn compare_regions(nd: &NondimParams) -> Result<RegionComparison> {
    if !(nd.d2() > nd.d3()) {
        return Err(Error::Precondition(format!(
            "region comparison requires D2 > D3 (D2 = {}, D3 = {})",
            nd.d2(),
            nd.d3()
        )));
    }
    let js = jacobian_at_estar(nd)?;
    let cl = cross_linearization_at(nd, &js);
    let lin = DiffusionModel::from_nondim(DiffusionVariant::LinearDP, nd).linearization(js.matrix(), &cl);
    let cross = DiffusionModel::from_nondim(DiffusionVariant::Cross, nd).linearization(js.matrix(), &cl);
    let cmp = classify_pair(&lin, &cross, cl)?;
    if !(cmp.ac > cmp.al) {
        return Err(Error::InvariantViolation(format!("A_C = {} not > A_L = {}", cmp.ac, cmp.al)));
    }
    if !(cmp.bl > cmp.bc) {
        return Err(Error::InvariantViolation(format!("B_L = {} not > B_C = {}", cmp.bl, cmp.bc)));
    }
    if let (Some(l), Some(c)) = (cmp.linear, cmp.cross) {
        let half_l = 0.5 * l.width();
        let half_c = 0.5 * c.width();
        if !(half_l > half_c) {
            return Err(Error::InvariantViolation(format!(
                "half-width of linear interval {half_l} not > cross {half_c}"
            )));
        }
    }
    Ok(cmp)
}

/// Linearizations of the dimensional Holling limit at its coexistence state:
/// constant rate `f(N*)` and the cross form with `JD21 = f'(N*) P*`.
pub fn holling_linearizations(params: &ModelParams) -> Result<(Linearization, Linearization, CrossLinearization)> {
    let e = holling_equilibrium(params)?;
    let j = holling_jacobian(e.n, e.p, params)?;
    let (a, g) = (params.alpha, params.gamma_tilde);
    let den = a * e.n + g;
    let f = (params.d2 * g + params.d3 * a * e.n) / den;
    let df = a * g * (params.d3 - params.d2) / (den * den);
    let cl = CrossLinearization {
        jd21: df * e.p,
        jd22: f,
        dp: f,
    };
    let lin = Linearization {
        jacobian: j,
        d1: params.d1,
        jd21: 0.0,
        jd22: f,
    };
    let cross = Linearization { jd21: cl.jd21, ..lin };
    Ok((lin, cross, cl))
}

/// Neumann eigenvalues `(k pi / L)^2` on `[0, L]` for `k = 0..=k_max`.
pub fn modes_1d(length: f64, k_max: usize) -> Vec<(usize, f64)> {
    (0..=k_max)
        .map(|k| (k, (k as f64 * std::f64::consts::PI / length).powi(2)))
        .collect()
}

/// Neumann eigenvalues `pi^2 (k^2 / Lx^2 + m^2 / Ly^2)` on a rectangle,
/// ordered by `(k, m)`.
pub fn modes_2d(lx: f64, ly: f64, k_max: usize, m_max: usize) -> Vec<((usize, usize), f64)> {
    let pi2 = std::f64::consts::PI.powi(2);
    let mut out = Vec::with_capacity((k_max + 1) * (m_max + 1));
    for k in 0..=k_max {
        for m in 0..=m_max {
            let lambda = pi2 * ((k * k) as f64 / (lx * lx) + (m * m) as f64 / (ly * ly));
            out.push(((k, m), lambda));
        }
    }
    out
}

/// Mode indices `k` with `(k pi / L)^2` inside the interval.
pub fn unstable_modes_1d(interval: &Interval, length: f64, k_max: usize) -> Vec<usize> {
    modes_1d(length, k_max)
        .into_iter()
        .filter(|&(_, lambda)| interval.contains(lambda))
        .map(|(k, _)| k)
        .collect()
}

/// Eigenvalue of the second-order Neumann Laplacian on `n` cells for mode `k`:
/// `(4 / h^2) sin^2(k pi h / (2 L))`.
pub fn discrete_eigenvalue_1d(k: usize, length: f64, n: usize) -> f64 {
    let h = length / n as f64;
    let s = (k as f64 * std::f64::consts::PI * h / (2.0 * length)).sin();
    4.0 / (h * h) * s * s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    fn reference() -> NondimParams {
        NondimParams::with_diffusion(1.0, 1.0, 1.0, 5.0, 1.0, 0.01, 1.0, 0.1).unwrap()
    }

    fn plus(d3: f64) -> NondimParams {
        NondimParams::with_diffusion(1.0, 50.0, 5.0, 4.0, 1.0, 0.01, 1.0, d3).unwrap()
    }

    #[test]
    fn effective_rate() {
        let nd = reference();
        assert!(close(dp_effective(1.0, 0.1, &nd).unwrap(), 0.64, 1e-15));
        assert_eq!(dp_effective(0.3, 0.3, &nd).unwrap(), 0.3);
        let degenerate = NondimParams::new(1.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        assert!(dp_effective(1.0, 0.1, &degenerate).is_err());
    }

    #[test]
    fn reference_cross_linearization() {
        let cl = cross_linearization(&reference()).unwrap();
        assert!(close(cl.jd21, -0.144_483_205_439_651_49, 1e-12));
        assert!(close(cl.jd22, 0.697_793_282_175_860_6, 1e-12));
        assert!(cl.dp < cl.jd22);
        let equal = cross_linearization(&reference().diffusion(0.01, 0.4, 0.4).unwrap()).unwrap();
        assert_eq!(equal.jd21, 0.0);
        assert!(close(equal.jd22, 0.4, 1e-14));
        let doubled = cross_linearization(&reference().diffusion(0.01, 2.0, 0.2).unwrap()).unwrap();
        let base = cross_linearization(&reference()).unwrap();
        assert!(close(doubled.jd21, 2.0 * base.jd21, 1e-15));
        assert!(close(doubled.jd22, 2.0 * base.jd22, 1e-15));
    }

    #[test]
    fn reference_has_no_turing() {
        let nd = reference();
        let cmp = compare_regions(&nd).unwrap();
        assert_eq!(cmp.case, TuringCase::NoTuringBoth);
        assert!(close(cmp.al, 0.0064, 1e-14));
        assert!(close(cmp.bl, -0.538_292_848_423_418_85, 1e-12));
        assert!(close(cmp.ac, 0.006_977_932_821_758_606, 1e-12));
        assert!(close(cmp.bc, -0.611_014_467_073_190_78, 1e-12));
        let js = jacobian_at_estar(&nd).unwrap();
        let cl = cmp.cl;
        for variant in [DiffusionVariant::LinearD2, DiffusionVariant::LinearDP, DiffusionVariant::Cross] {
            let model = DiffusionModel::from_nondim(variant, &nd);
            assert_eq!(det_m(0.0, &model, &js, &cl), js.det());
            assert!(turing_interval(&model, &js, &cl).is_none());
        }
        assert_eq!(boundary_curves(&js.matrix(), 0.01, &[1.0]), Boundary::NoRegion);
    }

    #[test]
    fn inclusion_fixture() {
        let cmp = compare_regions(&plus(0.9)).unwrap();
        assert_eq!(cmp.case, TuringCase::BothWithInclusion);
        let l = cmp.linear.unwrap();
        let c = cmp.cross.unwrap();
        assert!(close(l.lo, 2.428_269_037_944_384_4, 1e-10));
        assert!(close(l.hi, 15.974_866_135_976_454, 1e-10));
        assert!(close(c.lo, 2.857_478_667_365_262_3, 1e-10));
        assert!(close(c.hi, 13.430_850_586_019_015, 1e-10));
    }

    #[test]
    fn linear_only_fixture() {
        let cmp = compare_regions(&plus(0.1)).unwrap();
        assert_eq!(cmp.case, TuringCase::LinearOnly);
        let l = cmp.linear.unwrap();
        assert!(close(l.lo, 5.094_439_143_216_325_4, 1e-10));
        assert!(close(l.hi, 13.152_204_927_817_897, 1e-10));
        assert!(close(cmp.bc, -0.065_476_148_928_910_17, 1e-10));
    }

    #[test]
    fn thresholds_and_branches() {
        let js = jacobian_at_estar(&plus(0.9)).unwrap();
        let j = js.matrix();
        let Boundary::Region(bc) = boundary_curves(&j, 0.01, &[]) else {
            panic!("expected a region")
        };
        assert!(close(bc.dhat, 0.010_979_326_174_634_414, 1e-11));
        assert!(close(bc.dhat1, 0.000_269_718_083_591_948_86, 1e-9));
        assert!(close(bc.dhat2, 0.446_931_854_340_858_38, 1e-11));
        let d = [1.1 * bc.dhat2, 2.0 * bc.dhat2, 10.0, 1e3];
        let Boundary::Region(bc) = boundary_curves(&j, 0.01, &d) else {
            panic!()
        };
        assert_eq!(bc.samples.len(), 4);
        assert!(bc.lower_decreasing && bc.upper_increasing);
        let (a, b) = (bc.samples[0], bc.samples[1]);
        assert!(b.lower < a.lower && a.upper < b.upper);
        let last = bc.samples[3];
        assert!(close(last.upper, j.j11 / 0.01, 1e-2));
        // roots merge at the onset
        let at = branch_roots(&j, 0.01, bc.dhat2).unwrap();
        let expected = (0.01 * j.j22 + bc.dhat2 * j.j11) / (2.0 * 0.01 * bc.dhat2);
        assert!(close(at.0, expected, 1e-6) && close(at.1, expected, 1e-6));
    }

    #[test]
    fn interval_matches_branch_roots() {
        let nd = plus(0.9);
        let js = jacobian_at_estar(&nd).unwrap();
        let cl = cross_linearization(&nd).unwrap();
        let model = DiffusionModel::from_nondim(DiffusionVariant::LinearDP, &nd);
        let i = turing_interval(&model, &js, &cl).unwrap();
        let (lo, hi) = branch_roots(&js.matrix(), nd.d1(), cl.dp).unwrap();
        assert!(close(i.lo, lo, 1e-12) && close(i.hi, hi, 1e-12));
        assert!(det_m(i.midpoint(), &model, &js, &cl) < 0.0);
    }

    #[test]
    fn tangency_is_empty() {
        let j = Jacobian2 {
            j11: 1.0,
            j12: -1.25,
            j21: 1.25,
            j22: -1.0,
        };
        // a = 4, b = 3, c = 9/16: discriminant exactly zero
        let lin = Linearization {
            jacobian: j,
            d1: 1.0,
            jd21: 0.0,
            jd22: 4.0,
        };
        assert_eq!(lin.dispersion().discriminant(), 0.0);
        assert!(lin.turing_interval().is_none());
    }

    #[test]
    fn growth_peak_inside_interval() {
        let nd = plus(0.9);
        let js = jacobian_at_estar(&nd).unwrap();
        let cl = cross_linearization(&nd).unwrap();
        let lin = DiffusionModel::from_nondim(DiffusionVariant::Cross, &nd).linearization(js.matrix(), &cl);
        let (lambda, sigma) = lin.fastest_growth(50.0);
        assert!(lin.turing_interval().unwrap().contains(lambda));
        assert!(sigma > 0.0);
        assert!(lin.growth_rate(0.0) < 0.0);
    }

    #[test]
    fn mode_sets() {
        let m = modes_1d(2.0, 3);
        assert_eq!(m[0], (0, 0.0));
        assert!(close(m[2].1, std::f64::consts::PI.powi(2), 1e-15));
        let m2 = modes_2d(1.0, 2.0, 1, 1);
        assert_eq!(m2.len(), 4);
        assert!(close(m2[1].1, std::f64::consts::PI.powi(2) / 4.0, 1e-15));
        let i = Interval { lo: 2.0, hi: 10.0 };
        assert_eq!(unstable_modes_1d(&i, 1.0, 5), vec![1]);
        let exact = (std::f64::consts::PI).powi(2);
        assert!(close(discrete_eigenvalue_1d(1, 1.0, 1024), exact, 1e-5));
    }

    #[test]
    fn holling_never_turing_when_stable() {
        let params = ModelParams {
            r0: 1.0,
            eta: 1.0,
            alpha: 1.0,
            gamma_tilde: 1.0,
            big_gamma: 2.0,
            mu: 0.5,
            xi: 0.0,
            d1: 0.01,
            d2: 1.0,
            d3: 0.1,
            epsilon: None,
        };
        let (lin, cross, cl) = holling_linearizations(&params).unwrap();
        assert!(lin.jacobian.trace() < 0.0);
        assert!(cl.jd21 < 0.0);
        let cmp = classify_pair(&lin, &cross, cl).unwrap();
        assert_eq!(cmp.case, TuringCase::NoTuringBoth);
        assert_eq!(cmp.al, cmp.ac);
    }
}
