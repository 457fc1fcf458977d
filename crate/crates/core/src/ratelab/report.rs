//! Report rendering: the raw sweep table as CSV, fits and verdicts as JSON,
//! and one log-log SVG plot per measured norm. Rendering is deterministic,
//! so re-running from the persisted CSV reproduces the same files.

use std::fmt::Write as _;
use std::path::Path;

use super::{ExperimentSpec, RateReport, RawRow, RawTable};
use crate::error::{Error, Result};

pub const RAW_CSV: &str = "raw.csv";
pub const REPORT_JSON: &str = "report.json";
pub const EXPERIMENT_JSON: &str = "experiment.json";

fn fmt_exp(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

fn parse_exp(s: &str) -> Result<f64> {
    if s == "inf" {
        Ok(f64::INFINITY)
    } else {
        s.parse::<f64>()
            .map_err(|e| Error::Config(format!("bad exponent `{s}`: {e}")))
    }
}

pub fn write_raw_csv(path: &Path, table: &RawTable) -> Result<()> {
    let mut out = String::from("theorem_tag,model,eps,mu,q,r,norm_kind,comparison,value,run_status\n");
    for row in &table.rows {
        let value = row.value.map(|v| format!("{v}")).unwrap_or_default();
        // Commas inside the status would break the flat schema.
        let status = row.run_status.replace(',', ";");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.theorem_tag,
            row.model,
            row.eps,
            row.mu,
            fmt_exp(row.q),
            fmt_exp(row.r),
            row.norm_kind,
            row.comparison,
            value,
            status
        )
        .expect("string write");
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_raw_csv(path: &Path) -> Result<RawTable> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 10 {
            return Err(Error::Config(format!(
                "{}:{}: expected 10 columns, got {}",
                path.display(),
                i + 1,
                parts.len()
            )));
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::Config(format!("{}:{}: bad {what}: {e}", path.display(), i + 1)))
        };
        rows.push(RawRow {
            theorem_tag: parts[0].into(),
            model: parts[1].into(),
            eps: parse(parts[2], "eps")?,
            mu: parse(parts[3], "mu")?,
            q: parse_exp(parts[4])?,
            r: parse_exp(parts[5])?,
            norm_kind: parts[6].into(),
            comparison: parts[7].into(),
            value: if parts[8].is_empty() {
                None
            } else {
                Some(parse(parts[8], "value")?)
            },
            run_status: parts[9].into(),
        });
    }
    Ok(RawTable { rows })
}

pub fn write_report_json(path: &Path, report: &RateReport) -> Result<()> {
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Config(format!("report serialization: {e}")))?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

/// Write raw CSV, the JSON report, and one SVG per norm into `dir`.
pub fn render_report(
    dir: &Path,
    spec: &ExperimentSpec,
    table: &RawTable,
    report: &RateReport,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_raw_csv(&dir.join(RAW_CSV), table)?;
    write_report_json(&dir.join(REPORT_JSON), report)?;
    let spec_json = serde_json::to_string_pretty(spec)
        .map_err(|e| Error::Config(format!("experiment serialization: {e}")))?;
    std::fs::write(dir.join(EXPERIMENT_JSON), spec_json + "\n")?;
    let mut norms: Vec<String> = Vec::new();
    for row in &table.rows {
        if !norms.contains(&row.norm_kind) {
            norms.push(row.norm_kind.clone());
        }
    }
    for norm in norms {
        let svg = plot_norm(spec, table, report, &norm);
        std::fs::write(dir.join(format!("plot_{}_{norm}.svg", spec.tag)), svg)?;
    }
    Ok(())
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Log-log scatter of error vs eps per mu, with the fitted line and the
/// theoretical-slope guide line anchored at the largest eps.
fn plot_norm(spec: &ExperimentSpec, table: &RawTable, report: &RateReport, norm: &str) -> String {
    let mut series: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for row in table.rows.iter().filter(|r| r.norm_kind == norm) {
        if let (Some(v), true) = (row.value, row.run_status == "ok") {
            if v > 0.0 {
                match series.iter_mut().find(|(mu, _)| *mu == row.mu) {
                    Some((_, pts)) => pts.push((row.eps, v)),
                    None => series.push((row.mu, vec![(row.eps, v)])),
                }
            }
        }
    }
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {PLOT_W} {PLOT_H}\" font-family=\"monospace\" font-size=\"12\">\n\
         <rect width=\"{PLOT_W}\" height=\"{PLOT_H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\">{} / {} (log-log)</text>\n",
        PLOT_W / 2.0,
        spec.tag,
        norm
    );
    let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    if all.is_empty() {
        svg.push_str("<text x=\"300\" y=\"240\">no data</text>\n</svg>\n");
        return svg;
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(e, v) in &all {
        x0 = x0.min(e.ln());
        x1 = x1.max(e.ln());
        y0 = y0.min(v.ln());
        y1 = y1.max(v.ln());
    }
    let pad = 0.35;
    x0 -= pad;
    x1 += pad;
    y0 -= pad;
    y1 += pad;
    let mx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (PLOT_W - 2.0 * MARGIN);
    let my = |y: f64| PLOT_H - MARGIN - (y - y0) / (y1 - y0) * (PLOT_H - 2.0 * MARGIN);
    let _ = write!(
        svg,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">eps</text>\n\
         <text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">value</text>\n",
        PLOT_W - 2.0 * MARGIN,
        PLOT_H - 2.0 * MARGIN,
        PLOT_W / 2.0,
        PLOT_H - 18.0,
        PLOT_H / 2.0,
        PLOT_H / 2.0
    );
    // eps tick marks at the measured values.
    let mut ticks: Vec<f64> = all.iter().map(|p| p.0).collect();
    ticks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ticks.dedup();
    for e in ticks {
        let x = mx(e.ln());
        let _ = write!(
            svg,
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#ccc\"/>\n\
             <text x=\"{x}\" y=\"{}\" text-anchor=\"middle\" font-size=\"10\">{e:.4}</text>\n",
            MARGIN,
            PLOT_H - MARGIN,
            PLOT_H - MARGIN + 16.0
        );
    }
    for (si, (mu, pts)) in series.iter().enumerate() {
        let color = COLORS[si % COLORS.len()];
        for &(e, v) in pts {
            let _ = write!(
                svg,
                "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{color}\"/>\n",
                mx(e.ln()),
                my(v.ln())
            );
        }
        let _ = write!(
            svg,
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">mu = {mu}</text>\n",
            PLOT_W - MARGIN - 110.0,
            MARGIN + 16.0 * (si as f64 + 1.0)
        );
        // Fitted line over the eps range (pure-power rendering of the fit).
        if let Some(f) = report
            .fits
            .iter()
            .find(|f| f.norm == norm && f.mu == *mu && f.slope.is_finite())
        {
            let (e_lo, e_hi) = pts
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(e, _)| {
                    (lo.min(e), hi.max(e))
                });
            let model = match f.fit_model.as_str() {
                "power_with_log" => super::FitModel::PowerWithLog { mu: *mu, t_end: spec.t_end },
                _ => super::FitModel::PurePower,
            };
            let y_at = |e: f64| f.intercept + f.slope * model.regressor(e).ln();
            let _ = write!(
                svg,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                mx(e_lo.ln()),
                my(y_at(e_lo)),
                mx(e_hi.ln()),
                my(y_at(e_hi))
            );
            // Theoretical guide line through the largest-eps point.
            if let Some(&(e_ref, v_ref)) = pts
                .iter()
                .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            {
                let guide = |e: f64| v_ref.ln() + f.target * (e.ln() - e_ref.ln());
                let _ = write!(
                    svg,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-dasharray=\"6 4\"/>\n",
                    mx(e_lo.ln()),
                    my(guide(e_lo)),
                    mx(e_hi.ln()),
                    my(guide(e_hi))
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}
