//! Two-parameter sweeps of the Turing classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify_pair, compare_regions, holling_linearizations, Interval, TuringCase};
use crate::equilibria::{coexistence_exists, jacobian_at_estar};
use crate::error::{Error, Result};
use crate::params::{ModelParams, NondimParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScanLabel {
    NoCoexistence,
    /// E* exists but `tr J* >= 0`.
    HomogeneouslyUnstable,
    NoTuringBoth,
    LinearOnly,
    BothWithInclusion,
    Error,
}

impl ScanLabel {
    pub const ALL: [ScanLabel; 6] = [
        ScanLabel::NoCoexistence,
        ScanLabel::HomogeneouslyUnstable,
        ScanLabel::NoTuringBoth,
        ScanLabel::LinearOnly,
        ScanLabel::BothWithInclusion,
        ScanLabel::Error,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScanLabel::NoCoexistence => "NoCoexistence",
            ScanLabel::HomogeneouslyUnstable => "HomogeneouslyUnstable",
            ScanLabel::NoTuringBoth => "NoTuringBoth",
            ScanLabel::LinearOnly => "LinearOnly",
            ScanLabel::BothWithInclusion => "BothWithInclusion",
            ScanLabel::Error => "Error",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name() == s)
    }

    /// A stable homogeneous state destabilized by at least one diffusion model.
    pub fn is_turing(self) -> bool {
        matches!(self, ScanLabel::LinearOnly | ScanLabel::BothWithInclusion)
    }
}

impl From<TuringCase> for ScanLabel {
    fn from(case: TuringCase) -> Self {
        match case {
            TuringCase::NoTuringBoth => ScanLabel::NoTuringBoth,
            TuringCase::LinearOnly => ScanLabel::LinearOnly,
            TuringCase::BothWithInclusion => ScanLabel::BothWithInclusion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanAxis {
    pub name: String,
    pub values: Vec<f64>,
}

impl ScanAxis {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        ScanAxis {
            name: name.into(),
            values,
        }
    }

    /// `count` evenly spaced values from `lo` to `hi` inclusive.
    pub fn linspace(name: impl Into<String>, lo: f64, hi: f64, count: usize) -> Self {
        let values = match count {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect(),
        };
        ScanAxis::new(name, values)
    }

    /// `count` logarithmically spaced values from `lo` to `hi` inclusive.
    pub fn logspace(name: impl Into<String>, lo: f64, hi: f64, count: usize) -> Self {
        let mut axis = ScanAxis::linspace(name, lo.log10(), hi.log10(), count);
        for v in &mut axis.values {
            *v = 10f64.powf(*v);
        }
        axis
    }
}

/// The fixed parameters of a sweep; axis names refer to this record's fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScanBase {
    /// Dimensionless interference model: `D_P` against cross diffusion.
    Bda(NondimParams),
    /// Dimensional Holling limit: `f(N*)` against its cross linearization.
    Holling(ModelParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub p1: f64,
    pub p2: f64,
    pub coexists: bool,
    /// NaN without a coexistence state.
    pub j11: f64,
    pub label: ScanLabel,
    pub linear: Option<Interval>,
    pub cross: Option<Interval>,
    pub error: Option<String>,
}

impl ScanCell {
    fn failed(p1: f64, p2: f64, err: Error) -> Self {
        ScanCell {
            p1,
            p2,
            coexists: false,
            j11: f64::NAN,
            label: ScanLabel::Error,
            linear: None,
            cross: None,
            error: Some(err.to_string()),
        }
    }

    fn absent(p1: f64, p2: f64) -> Self {
        ScanCell {
            p1,
            p2,
            coexists: false,
            j11: f64::NAN,
            label: ScanLabel::NoCoexistence,
            linear: None,
            cross: None,
            error: None,
        }
    }
}

/// Evaluates every `(axis1[i], axis2[j])` pair; cell `i * axis2.len() + j`
/// of the output holds that pair. Failures are recorded in the cell.
pub fn parameter_scan(base: &ScanBase, axis1: &ScanAxis, axis2: &ScanAxis) -> Vec<ScanCell> {
    let n2 = axis2.values.len();
    (0..axis1.values.len() * n2)
        .into_par_iter()
        .map(|idx| {
            let (p1, p2) = (axis1.values[idx / n2], axis2.values[idx % n2]);
            let cell = match base {
                ScanBase::Bda(nd) => nd
                    .with(&axis1.name, p1)
                    .and_then(|nd| nd.with(&axis2.name, p2))
                    .and_then(|nd| bda_cell(p1, p2, &nd)),
                ScanBase::Holling(params) => params
                    .with(&axis1.name, p1)
                    .and_then(|p| p.with(&axis2.name, p2))
                    .and_then(|p| holling_cell(p1, p2, &p)),
            };
            cell.unwrap_or_else(|e| ScanCell::failed(p1, p2, e))
        })
        .collect()
}

fn bda_cell(p1: f64, p2: f64, nd: &NondimParams) -> Result<ScanCell> {
    if !coexistence_exists(nd) {
        return Ok(ScanCell::absent(p1, p2));
    }
    let js = jacobian_at_estar(nd)?;
    if !(js.trace() < 0.0) {
        return Ok(ScanCell {
            coexists: true,
            j11: js.j11,
            label: ScanLabel::HomogeneouslyUnstable,
            ..ScanCell::absent(p1, p2)
        });
    }
    let cmp = compare_regions(nd)?;
    Ok(ScanCell {
        p1,
        p2,
        coexists: true,
        j11: js.j11,
        label: cmp.case.into(),
        linear: cmp.linear,
        cross: cmp.cross,
        error: None,
    })
}

fn holling_cell(p1: f64, p2: f64, params: &ModelParams) -> Result<ScanCell> {
    if !params.is_holling() {
        return Err(Error::Precondition("Holling scan requires xi = 0".into()));
    }
    params.require_searching_faster()?;
    let (lin, cross, cl) = match holling_linearizations(params) {
        Ok(v) => v,
        Err(Error::NoCoexistence { .. }) => return Ok(ScanCell::absent(p1, p2)),
        Err(e) => return Err(e),
    };
    let j = lin.jacobian;
    if !(j.trace() < 0.0 && j.det() > 0.0) {
        return Ok(ScanCell {
            coexists: true,
            j11: j.j11,
            label: ScanLabel::HomogeneouslyUnstable,
            ..ScanCell::absent(p1, p2)
        });
    }
    let cmp = classify_pair(&lin, &cross, cl)?;
    Ok(ScanCell {
        p1,
        p2,
        coexists: true,
        j11: j.j11,
        label: cmp.case.into(),
        linear: cmp.linear,
        cross: cmp.cross,
        error: None,
    })
}
