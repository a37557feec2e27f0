//! CSV, JSON and SVG emission.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::report::{summarize, CheckReport, Summary};

/// One row per measure; a report without measures still gets one row.
pub fn reports_csv(reports: &[CheckReport]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "anchor", "status", "measure", "value", "tolerance", "note"])?;
    for r in reports {
        let note = r.note.clone().unwrap_or_default();
        if r.values.is_empty() {
            w.write_record([r.id.as_str(), &r.anchor, r.status.label(), "", "", "", &note])?;
        }
        for m in &r.values {
            let tol = m.tolerance.map(fmt_f64).unwrap_or_default();
            w.write_record([r.id.as_str(), &r.anchor, r.status.label(), &m.name, &fmt_f64(m.value), &tol, &note])?;
        }
    }
    Ok(w.into_inner()?)
}

/// Shortest round-trip form; non-finite values spelled out.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Serialize)]
pub struct RunDocument<'a, S: Serialize> {
    pub command: &'a str,
    pub settings: &'a S,
    pub summary: Summary,
    pub reports: &'a [CheckReport],
}

pub fn reports_json<S: Serialize>(command: &str, settings: &S, reports: &[CheckReport]) -> Result<Vec<u8>> {
    let doc = RunDocument { command, settings, summary: summarize(reports), reports };
    let mut out = serde_json::to_vec_pretty(&doc)?;
    out.push(b'\n');
    Ok(out)
}

/// Table with a header row, written through the csv crate.
pub fn table_csv<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner()?)
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Line plot of (x, y) as a single polyline with labelled extremes.
pub fn polyline_svg(title: &str, x_label: &str, y_label: &str, pts: &[(f64, f64)]) -> String {
    let (w, h, pad) = (640.0, 400.0, 56.0);
    let finite: Vec<(f64, f64)> = pts.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let span = |f: fn(&(f64, f64)) -> f64| {
        let lo = finite.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = finite.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            (lo - 0.5, lo + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = span(|p| p.0);
    let (y0, y1) = span(|p| p.1);
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="black" points="{pad},{} {pad},{pad}"/><polyline fill="none" stroke="black" points="{pad},{} {},{}"/>"#,
        h - pad,
        h - pad,
        w - pad,
        h - pad
    );
    let line: Vec<String> = finite.iter().map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();
    let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#, line.join(" "));
    let text = |s: &mut String, x: f64, y: f64, anchor: &str, body: &str| {
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{y:.1}" font-family="monospace" font-size="12" text-anchor="{anchor}">{}</text>"#, escape(body));
    };
    text(&mut s, w / 2.0, 24.0, "middle", title);
    text(&mut s, w / 2.0, h - 12.0, "middle", x_label);
    text(&mut s, 12.0, h / 2.0, "start", y_label);
    text(&mut s, pad, h - pad + 16.0, "middle", &format!("{x0:.4}"));
    text(&mut s, w - pad, h - pad + 16.0, "middle", &format!("{x1:.4}"));
    text(&mut s, pad - 4.0, h - pad, "end", &format!("{y0:.4}"));
    text(&mut s, pad - 4.0, pad, "end", &format!("{y1:.4}"));
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{check, Status};

    #[test]
    fn csv_has_header_and_one_row_per_measure() {
        let r = check("a.b", "gh-two-point", |rec| {
            rec.bounded("x", 0.5, 1.0);
            rec.value("y", f64::INFINITY);
            Ok(Status::Pass)
        });
        let text = String::from_utf8(reports_csv(&[r]).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "id,anchor,status,measure,value,tolerance,note");
        assert_eq!(lines[1], "a.b,gh-two-point,pass,x,5e-1,1e0,");
        assert_eq!(lines[2], "a.b,gh-two-point,pass,y,inf,,");
    }

    #[test]
    fn svg_is_a_single_polyline_document() {
        let s = polyline_svg("mu <tau>", "tau", "mu", &[(0.0, 1.0), (1.0, 0.0), (2.0, f64::NAN)]);
        assert!(s.starts_with("<?xml") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("mu &lt;tau&gt;"));
        assert_eq!(s.matches("stroke=\"steelblue\"").count(), 1);
        assert!(s.contains("56.000,56.000 584.000,344.000\""));
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1e-300, 123456.789, -2.5] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
