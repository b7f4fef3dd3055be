//! SVG heat map of scan labels.

use std::fmt::Write;

use predprey_core::ScanLabel;

use crate::csvio::ScanRow;

const CELL: usize = 8;
const MARGIN: usize = 60;
const LEGEND_W: usize = 190;

fn color(label: ScanLabel) -> &'static str {
    match label {
        ScanLabel::NoCoexistence => "#d9d9d9",
        ScanLabel::HomogeneouslyUnstable => "#7f7f7f",
        ScanLabel::NoTuringBoth => "#4c72b0",
        ScanLabel::LinearOnly => "#dd8452",
        ScanLabel::BothWithInclusion => "#c44e52",
        ScanLabel::Error => "#000000",
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SvgError {
    #[error("empty region map")]
    Empty,
    #[error("scan rows do not form a full grid: {0}")]
    Ragged(String),
}

/// `(n1, n2)` for rows stored with `p1` outer and `p2` inner.
fn shape(rows: &[ScanRow]) -> Result<(usize, usize), SvgError> {
    if rows.is_empty() {
        return Err(SvgError::Empty);
    }
    let n2 = rows.iter().take_while(|r| r.p1 == rows[0].p1).count();
    if rows.len() % n2 != 0 {
        return Err(SvgError::Ragged(format!("{} rows with {n2} per p1 value", rows.len())));
    }
    let n1 = rows.len() / n2;
    for (i, chunk) in rows.chunks(n2).enumerate() {
        if chunk.iter().any(|r| r.p1 != chunk[0].p1) {
            return Err(SvgError::Ragged(format!("p1 changes inside block {i}")));
        }
        if chunk.iter().zip(&rows[..n2]).any(|(a, b)| a.p2 != b.p2) {
            return Err(SvgError::Ragged(format!("p2 values of block {i} differ from block 0")));
        }
    }
    Ok((n1, n2))
}

/// Renders `p1` along x and `p2` along y (increasing upwards). The legend
/// lists only the labels present. Output depends only on the arguments.
pub fn region_map(rows: &[ScanRow], x_name: &str, y_name: &str) -> Result<String, SvgError> {
    let (n1, n2) = shape(rows)?;
    let (w, h) = (n1 * CELL, n2 * CELL);
    let width = MARGIN + w + 20 + LEGEND_W;
    let height = (MARGIN + h + 40).max(MARGIN + 24 * ScanLabel::ALL.len());
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for (idx, r) in rows.iter().enumerate() {
        let (i, j) = (idx / n2, idx % n2);
        let x = MARGIN + i * CELL;
        let y = MARGIN + (n2 - 1 - j) * CELL;
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}"/>"#,
            color(r.label)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
    );
    let (x0, x1) = (rows[0].p1, rows[rows.len() - 1].p1);
    let (y0, y1) = (rows[0].p2, rows[n2 - 1].p2);
    let bottom = MARGIN + h;
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}" text-anchor="start">{x0:.4e}</text>"#, bottom + 16);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{x1:.4e}</text>"#, MARGIN + w, bottom + 16);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        MARGIN + w / 2,
        bottom + 32,
        escape(x_name)
    );
    let _ = writeln!(s, r#"<text x="{}" y="{bottom}" text-anchor="end">{y0:.4e}</text>"#, MARGIN - 4);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y1:.4e}</text>"#, MARGIN - 4, MARGIN + 10);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        MARGIN + h / 2,
        MARGIN + h / 2,
        escape(y_name)
    );
    let lx = MARGIN + w + 20;
    let present = ScanLabel::ALL.into_iter().filter(|l| rows.iter().any(|r| r.label == *l));
    for (k, label) in present.enumerate() {
        let y = MARGIN + 24 * k;
        let _ = writeln!(
            s,
            r#"<g class="legend"><rect x="{lx}" y="{y}" width="14" height="14" fill="{}" stroke="black"/><text x="{}" y="{}">{}</text></g>"#,
            color(label),
            lx + 20,
            y + 12,
            label.name()
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
