//! CSV writers and readers for every table the tool emits.
//!
//! Floats are written with 17 significant digits (`{:.16e}`); empty
//! intervals are written as `NaN` endpoints.

use std::io::{Read, Write};

use predprey_core::turing::ScanCell;
use predprey_core::{ConvergenceReport, Grid, ScanLabel, StabilityReport, TimeSeries};
use serde::Deserialize;

pub type CsvResult<T> = Result<T, csv::Error>;

pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer<W: Write>(out: W, header: &[&str]) -> CsvResult<csv::Writer<W>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

fn reader<R: Read>(input: R, header: &[&str]) -> CsvResult<csv::Reader<R>> {
    let mut r = csv::Reader::from_reader(input);
    let got = r.headers()?.clone();
    if got.iter().ne(header.iter().copied()) {
        let msg = format!("expected header {:?}, found {:?}", header.join(","), got.iter().collect::<Vec<_>>().join(","));
        return Err(csv::Error::from(std::io::Error::new(std::io::ErrorKind::InvalidData, msg)));
    }
    Ok(r)
}

fn read_all<R: Read, T: for<'de> Deserialize<'de>>(input: R, header: &[&str]) -> CsvResult<Vec<T>> {
    reader(input, header)?.deserialize().collect()
}

pub const SERIES_HEADER: [&str; 5] = ["t", "field", "L1", "L2", "Linf"];

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub field: String,
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "L2")]
    pub l2: f64,
    #[serde(rename = "Linf")]
    pub linf: f64,
}

pub fn series_rows(series: &TimeSeries) -> Vec<SeriesRow> {
    let mut rows = Vec::new();
    for (t, norms) in series.times.iter().zip(&series.norms) {
        for (name, n) in series.fields.iter().zip(norms) {
            rows.push(SeriesRow {
                t: *t,
                field: name.clone(),
                l1: n.l1,
                l2: n.l2,
                linf: n.linf,
            });
        }
    }
    rows
}

pub fn write_series<W: Write>(out: W, rows: &[SeriesRow]) -> CsvResult<()> {
    let mut w = writer(out, &SERIES_HEADER)?;
    for r in rows {
        w.write_record([fmt(r.t), r.field.clone(), fmt(r.l1), fmt(r.l2), fmt(r.linf)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_series<R: Read>(input: R) -> CsvResult<Vec<SeriesRow>> {
    read_all(input, &SERIES_HEADER)
}

/// One row per cell in storage order: `x,y,<field names>`.
pub fn write_snapshot<W: Write>(out: W, grid: &Grid, names: &[String], fields: &[Vec<f64>]) -> CsvResult<()> {
    let mut header = vec!["x", "y"];
    header.extend(names.iter().map(String::as_str));
    let mut w = writer(out, &header)?;
    for (cell, (x, y)) in grid.centers().into_iter().enumerate() {
        let mut rec = vec![fmt(x), fmt(y)];
        rec.extend(fields.iter().map(|f| fmt(f[cell])));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Field names and columns of a snapshot file, coordinates included.
pub fn read_snapshot<R: Read>(input: R) -> CsvResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(input);
    let names: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut cols = vec![Vec::new(); names.len()];
    for rec in r.records() {
        let rec = rec?;
        for (col, v) in cols.iter_mut().zip(rec.iter()) {
            col.push(v.parse::<f64>().map_err(|e| {
                csv::Error::from(std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{v:?}: {e}")))
            })?);
        }
    }
    Ok((names, cols))
}

pub const EQUILIBRIUM_HEADER: [&str; 10] = ["kind", "N", "P", "J11", "J12", "J21", "J22", "trace", "det", "classification"];

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct EquilibriumRow {
    pub kind: String,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "J11")]
    pub j11: f64,
    #[serde(rename = "J12")]
    pub j12: f64,
    #[serde(rename = "J21")]
    pub j21: f64,
    #[serde(rename = "J22")]
    pub j22: f64,
    pub trace: f64,
    pub det: f64,
    pub classification: String,
}

impl From<&StabilityReport> for EquilibriumRow {
    fn from(r: &StabilityReport) -> Self {
        EquilibriumRow {
            kind: r.equilibrium.kind.label().to_string(),
            n: r.equilibrium.n,
            p: r.equilibrium.p,
            j11: r.jacobian.j11,
            j12: r.jacobian.j12,
            j21: r.jacobian.j21,
            j22: r.jacobian.j22,
            trace: r.trace,
            det: r.det,
            classification: r.classification.name().to_string(),
        }
    }
}

pub fn write_equilibria<W: Write>(out: W, rows: &[EquilibriumRow]) -> CsvResult<()> {
    let mut w = writer(out, &EQUILIBRIUM_HEADER)?;
    for r in rows {
        w.write_record([
            r.kind.clone(),
            fmt(r.n),
            fmt(r.p),
            fmt(r.j11),
            fmt(r.j12),
            fmt(r.j21),
            fmt(r.j22),
            fmt(r.trace),
            fmt(r.det),
            r.classification.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_equilibria<R: Read>(input: R) -> CsvResult<Vec<EquilibriumRow>> {
    read_all(input, &EQUILIBRIUM_HEADER)
}

pub const SCAN_HEADER: [&str; 9] = ["p1", "p2", "coexists", "J11", "case", "lin_lo", "lin_hi", "cross_lo", "cross_hi"];

#[derive(Debug, Clone, Deserialize)]
pub struct ScanRow {
    pub p1: f64,
    pub p2: f64,
    pub coexists: bool,
    #[serde(rename = "J11")]
    pub j11: f64,
    #[serde(rename = "case", deserialize_with = "de_label")]
    pub label: ScanLabel,
    pub lin_lo: f64,
    pub lin_hi: f64,
    pub cross_lo: f64,
    pub cross_hi: f64,
}

fn same(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

/// Equality with `NaN == NaN`.
impl PartialEq for ScanRow {
    fn eq(&self, o: &Self) -> bool {
        same(self.p1, o.p1)
            && same(self.p2, o.p2)
            && self.coexists == o.coexists
            && same(self.j11, o.j11)
            && self.label == o.label
            && same(self.lin_lo, o.lin_lo)
            && same(self.lin_hi, o.lin_hi)
            && same(self.cross_lo, o.cross_lo)
            && same(self.cross_hi, o.cross_hi)
    }
}

fn de_label<'de, D: serde::Deserializer<'de>>(d: D) -> Result<ScanLabel, D::Error> {
    let s = String::deserialize(d)?;
    ScanLabel::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown case {s:?}")))
}

impl From<&ScanCell> for ScanRow {
    fn from(c: &ScanCell) -> Self {
        let ends = |i: Option<predprey_core::Interval>| i.map_or((f64::NAN, f64::NAN), |i| (i.lo, i.hi));
        let (lin_lo, lin_hi) = ends(c.linear);
        let (cross_lo, cross_hi) = ends(c.cross);
        ScanRow {
            p1: c.p1,
            p2: c.p2,
            coexists: c.coexists,
            j11: c.j11,
            label: c.label,
            lin_lo,
            lin_hi,
            cross_lo,
            cross_hi,
        }
    }
}

pub fn write_scan<W: Write>(out: W, rows: &[ScanRow]) -> CsvResult<()> {
    let mut w = writer(out, &SCAN_HEADER)?;
    for r in rows {
        w.write_record([
            fmt(r.p1),
            fmt(r.p2),
            r.coexists.to_string(),
            fmt(r.j11),
            r.label.name().to_string(),
            fmt(r.lin_lo),
            fmt(r.lin_hi),
            fmt(r.cross_lo),
            fmt(r.cross_hi),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scan<R: Read>(input: R) -> CsvResult<Vec<ScanRow>> {
    read_all(input, &SCAN_HEADER)
}

pub const CONVERGENCE_HEADER: [&str; 4] = ["epsilon", "residual_l2sq", "residual_l1", "dist_l2"];

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    pub residual_l2sq: f64,
    pub residual_l1: f64,
    pub dist_l2: f64,
}

pub fn convergence_rows(report: &ConvergenceReport) -> Vec<ConvergenceRow> {
    report
        .members()
        .into_iter()
        .map(|m| ConvergenceRow {
            epsilon: m.epsilon,
            residual_l2sq: m.residual_l2_sq,
            residual_l1: m.residual_l1,
            dist_l2: m.dist_to_limit,
        })
        .collect()
}

pub fn write_convergence<W: Write>(out: W, rows: &[ConvergenceRow]) -> CsvResult<()> {
    let mut w = writer(out, &CONVERGENCE_HEADER)?;
    for r in rows {
        w.write_record([fmt(r.epsilon), fmt(r.residual_l2sq), fmt(r.residual_l1), fmt(r.dist_l2)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_convergence<R: Read>(input: R) -> CsvResult<Vec<ConvergenceRow>> {
    read_all(input, &CONVERGENCE_HEADER)
}

pub const SLOPE_HEADER: [&str; 3] = ["metric", "slope", "half_width"];

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SlopeRow {
    pub metric: String,
    pub slope: f64,
    pub half_width: f64,
}

/// Fitted slopes of a report; metrics without a fit are omitted.
pub fn slope_rows(report: &ConvergenceReport) -> Vec<SlopeRow> {
    [
        ("residual_l2sq", report.slope_l2_sq),
        ("residual_l1", report.slope_l1),
        ("dist_l2", report.slope_dist),
    ]
    .into_iter()
    .filter_map(|(metric, fit)| {
        fit.map(|f| SlopeRow {
            metric: metric.to_string(),
            slope: f.slope,
            half_width: f.half_width,
        })
    })
    .collect()
}

pub fn write_slopes<W: Write>(out: W, rows: &[SlopeRow]) -> CsvResult<()> {
    let mut w = writer(out, &SLOPE_HEADER)?;
    for r in rows {
        w.write_record([r.metric.clone(), fmt(r.slope), fmt(r.half_width)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_slopes<R: Read>(input: R) -> CsvResult<Vec<SlopeRow>> {
    read_all(input, &SLOPE_HEADER)
}
