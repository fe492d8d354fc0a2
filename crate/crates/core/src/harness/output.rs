//! Result files: CSV tables, JSON lines and the SVG convergence chart.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fsio::write_atomic;
use crate::harness::compare::{ComparisonReport, RunStatus};
use crate::trainer::EpochRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputFormat {
    Csv,
    Jsonl,
    Svg,
}

impl OutputFormat {
    pub const ALL: [OutputFormat; 3] = [OutputFormat::Csv, OutputFormat::Jsonl, OutputFormat::Svg];
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(Error::InvalidConfig(format!(
                "unknown format `{other}` (expected csv, jsonl or svg)"
            ))),
        }
    }
}

pub fn epochs_jsonl(records: &[EpochRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("epoch records serialise"));
        out.push('\n');
    }
    out
}

pub fn epochs_csv(records: &[EpochRecord]) -> String {
    let mut out = String::from(
        "epoch,loss,train_loss,p_micro,r_micro,f1_micro,p_macro,r_macro,f1_macro,seconds\n",
    );
    for r in records {
        writeln!(
            out,
            "{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            r.epoch,
            r.loss_name,
            r.train_loss,
            r.p_micro,
            r.r_micro,
            r.f1_micro,
            r.p_macro,
            r.r_macro,
            r.f1_macro,
            r.seconds
        )
        .unwrap();
    }
    out
}

/// One row per loss; failed runs carry `failed` and no metrics.
pub fn final_metrics_csv(report: &ComparisonReport) -> String {
    let mut out = String::from(
        "loss,status,p_micro,r_micro,f1_micro,p_macro,r_macro,f1_macro,lowest_decile_f1,epochs_to_target\n",
    );
    for row in &report.rows {
        match &row.status {
            RunStatus::Ok(run) => {
                let m = &run.metrics;
                let reached = run
                    .epochs_to_target
                    .map_or_else(|| "NA".to_string(), |e| e.to_string());
                writeln!(
                    out,
                    "{},ok,{:?},{:?},{:?},{:?},{:?},{:?},{:?},{}",
                    row.loss,
                    m.p_micro,
                    m.r_micro,
                    m.f1_micro,
                    m.p_macro,
                    m.r_macro,
                    m.f1_macro,
                    run.lowest_decile_f1,
                    reached
                )
                .unwrap();
            }
            RunStatus::Failed { .. } => {
                writeln!(out, "{},failed,,,,,,,,", row.loss).unwrap();
            }
        }
    }
    out
}

pub fn f1_curve_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("loss,epoch,f1_micro,f1_macro\n");
    for row in &report.rows {
        if let Some(run) = row.run() {
            for r in &run.records {
                writeln!(
                    out,
                    "{},{},{:?},{:?}",
                    row.loss, r.epoch, r.f1_micro, r.f1_macro
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn imbalance_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("loss,decile,classes,mean_prevalence,mean_f1\n");
    for row in &report.rows {
        if let Some(run) = row.run() {
            for d in &run.deciles {
                let classes: Vec<String> = d.classes.iter().map(usize::to_string).collect();
                writeln!(
                    out,
                    "{},{},{},{:?},{:?}",
                    row.loss,
                    d.decile,
                    classes.join(" "),
                    d.mean_prevalence,
                    d.mean_f1
                )
                .unwrap();
            }
        }
    }
    out
}

const PALETTE: [&str; 7] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
];

/// Validation micro-F1 per epoch for every successful run, one polyline per
/// loss with one point per record.
pub fn convergence_svg(report: &ComparisonReport) -> String {
    let (width, height) = (800.0, 480.0);
    let (left, right, top, bottom) = (60.0, 140.0, 20.0, 50.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let max_epoch = report.epochs.max(2) as f64;
    let x_of = |epoch: usize| left + (epoch as f64 - 1.0) / (max_epoch - 1.0) * plot_w;
    let y_of = |f1: f64| top + (1.0 - f1.clamp(0.0, 1.0)) * plot_h;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<g stroke="black" stroke-width="1"><line x1="{left}" y1="{}" x2="{}" y2="{}"/><line x1="{left}" y1="{top}" x2="{left}" y2="{}"/></g>"#,
        top + plot_h,
        left + plot_w,
        top + plot_h,
        top + plot_h
    )
    .unwrap();
    for i in 0..=5 {
        let v = i as f64 / 5.0;
        writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" font-size="11" text-anchor="end">{v:.1}</text>"#,
            left - 6.0,
            y_of(v) + 4.0
        )
        .unwrap();
    }
    for epoch in [1, report.epochs.max(1)] {
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" font-size="11" text-anchor="middle">{epoch}</text>"#,
            x_of(epoch),
            top + plot_h + 16.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{}" font-size="12" text-anchor="middle">epoch</text>"#,
        left + plot_w / 2.0,
        height - 10.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">validation micro-F1</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    )
    .unwrap();

    for (i, row) in report.rows.iter().enumerate() {
        let Some(run) = row.run() else { continue };
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = run
            .records
            .iter()
            .map(|r| format!("{:.2},{:.2}", x_of(r.epoch), y_of(r.f1_micro)))
            .collect();
        writeln!(
            svg,
            r#"<polyline data-loss="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            row.loss,
            points.join(" ")
        )
        .unwrap();
        let ly = top + 14.0 + 18.0 * i as f64;
        let lx = left + plot_w + 14.0;
        writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/><text x="{}" y="{}" font-size="12">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            row.loss
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes the requested compare artifacts into `dir` and returns their paths.
pub fn write_compare_outputs(
    report: &ComparisonReport,
    dir: &Path,
    formats: &[OutputFormat],
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut emit = |name: &str, body: String| -> Result<()> {
        let path = dir.join(name);
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
        Ok(())
    };
    if formats.contains(&OutputFormat::Csv) {
        emit("final_metrics.csv", final_metrics_csv(report))?;
        emit("f1_curve.csv", f1_curve_csv(report))?;
        emit("imbalance.csv", imbalance_csv(report))?;
    }
    if formats.contains(&OutputFormat::Jsonl) {
        let records: Vec<EpochRecord> = report
            .rows
            .iter()
            .filter_map(|r| r.run())
            .flat_map(|r| r.records.iter().cloned())
            .collect();
        emit("epochs.jsonl", epochs_jsonl(&records))?;
        let mut json = serde_json::to_string_pretty(report).expect("reports serialise");
        json.push('\n');
        emit("report.json", json)?;
    }
    if formats.contains(&OutputFormat::Svg) {
        emit("convergence.svg", convergence_svg(report))?;
    }
    Ok(written)
}
