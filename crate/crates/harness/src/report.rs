//! Report tables and plots over a set of runs.
//!
//! CSV columns, in order:
//!
//! ```text
//! row,target_person,frames,tracking_length_s,reid_delay_s,mot_error_count,reid_count,misid_count,lost_frames,unrecovered_reentries
//! ```
//!
//! One row per run (`row` = `run0`, `run1`, ...) carrying the run's mean
//! tracking length and mean re-ID delay, then `min`, `mean` and `max` rows
//! taken over the per-run values. Empty cells mean "no data".

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::metrics::{mean, RunMetrics};

pub const REPORT_CSV_HEADER: &str = "row,target_person,frames,tracking_length_s,reid_delay_s,\
mot_error_count,reid_count,misid_count,lost_frames,unrecovered_reentries";

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub csv: String,
    pub summary: String,
    /// `(file name, SVG document)` pairs.
    pub plots: Vec<(String, String)>,
}

impl Report {
    /// Writes `report.csv`, `summary.txt` and, when asked, the plots.
    pub fn write_to(&self, dir: &Path, plots: bool) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let mut files = vec![("report.csv", &self.csv), ("summary.txt", &self.summary)];
        if plots {
            files.extend(self.plots.iter().map(|(n, s)| (n.as_str(), s)));
        }
        for (name, body) in files {
            let p = dir.join(name);
            std::fs::write(&p, body).map_err(|e| HarnessError::io(p, e))?;
        }
        Ok(())
    }
}

/// Per-run values in report column order, `None` where a run has no data.
fn row_values(m: &RunMetrics) -> [Option<f64>; 8] {
    [
        Some(m.frames as f64),
        m.mean_tracking_length(),
        m.mean_reid_delay(),
        Some(m.mot_error_count as f64),
        Some(m.reid_count as f64),
        Some(m.misid_count as f64),
        Some(m.lost_frames as f64),
        Some(m.unrecovered_reentries as f64),
    ]
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

fn stat(xs: &[f64]) -> Option<Stat> {
    Some(Stat {
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        mean: mean(xs)?,
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Column-wise min/mean/max over the runs that have a value.
pub fn aggregate(metrics: &[RunMetrics]) -> Vec<Option<Stat>> {
    let rows: Vec<[Option<f64>; 8]> = metrics.iter().map(row_values).collect();
    (0..8)
        .map(|c| {
            let xs: Vec<f64> = rows.iter().filter_map(|r| r[c]).collect();
            stat(&xs)
        })
        .collect()
}

pub fn emit_report(metrics: &[RunMetrics]) -> Result<Report> {
    if metrics.is_empty() {
        return Err(HarnessError::Validation("report needs at least one run".into()));
    }
    let mut csv = String::new();
    writeln!(csv, "{REPORT_CSV_HEADER}").unwrap();
    for (i, m) in metrics.iter().enumerate() {
        let cells: Vec<String> = row_values(m).into_iter().map(cell).collect();
        writeln!(csv, "run{i},{},{}", m.target_person, cells.join(",")).unwrap();
    }
    let agg = aggregate(metrics);
    for (label, pick) in [
        ("min", (|s: &Stat| s.min) as fn(&Stat) -> f64),
        ("mean", |s: &Stat| s.mean),
        ("max", |s: &Stat| s.max),
    ] {
        let cells: Vec<String> = agg.iter().map(|s| cell(s.as_ref().map(pick))).collect();
        writeln!(csv, "{label},,{}", cells.join(",")).unwrap();
    }

    Ok(Report { csv, summary: summary(metrics, &agg), plots: plots(metrics) })
}

fn summary(metrics: &[RunMetrics], agg: &[Option<Stat>]) -> String {
    let mut s = String::new();
    let total_frames: u64 = metrics.iter().map(|m| m.frames).sum();
    let seconds: f64 = metrics.iter().map(|m| m.frames as f64 / m.fps).sum();
    writeln!(s, "runs: {}", metrics.len()).unwrap();
    writeln!(s, "frames: {total_frames} ({seconds} s)").unwrap();
    let line = |name: &str, st: &Option<Stat>| match st {
        Some(st) => format!("{name}: min {} / mean {} / max {}", st.min, st.mean, st.max),
        None => format!("{name}: no data"),
    };
    writeln!(s, "{}", line("tracking length [s]", &agg[1])).unwrap();
    writeln!(s, "{}", line("re-id delay [s]", &agg[2])).unwrap();
    writeln!(s, "{}", line("mot errors", &agg[3])).unwrap();
    writeln!(s, "{}", line("re-identifications", &agg[4])).unwrap();
    let sum = |f: fn(&RunMetrics) -> u64| metrics.iter().map(f).sum::<u64>();
    writeln!(s, "misidentifications: {}", sum(|m| m.misid_count)).unwrap();
    writeln!(s, "unrecovered re-entries: {}", sum(|m| m.unrecovered_reentries)).unwrap();
    writeln!(s, "lost frames: {}", sum(|m| m.lost_frames)).unwrap();
    s
}

fn plots(metrics: &[RunMetrics]) -> Vec<(String, String)> {
    let per_run = |f: fn(&RunMetrics) -> Option<f64>| metrics.iter().map(f).collect::<Vec<_>>();
    vec![
        (
            "tracking_length.svg".into(),
            bar_chart("Mean tracking length per run", "s", &per_run(|m| m.mean_tracking_length())),
        ),
        (
            "reid_delay.svg".into(),
            bar_chart("Mean re-ID delay per run", "s", &per_run(|m| m.mean_reid_delay())),
        ),
        (
            "mot_errors.svg".into(),
            bar_chart("MOT identity errors per run", "count", &per_run(|m| Some(m.mot_error_count as f64))),
        ),
        (
            "reid_count.svg".into(),
            bar_chart("Re-identifications per run", "count", &per_run(|m| Some(m.reid_count as f64))),
        ),
    ]
}

const W: f64 = 640.0;
const H: f64 = 360.0;
const PAD: f64 = 48.0;

fn bar_chart(title: &str, unit: &str, values: &[Option<f64>]) -> String {
    let top = values.iter().flatten().copied().fold(0.0, f64::max);
    let scale = if top > 0.0 { (H - 2.0 * PAD) / top } else { 0.0 };
    let slot = (W - 2.0 * PAD) / values.len().max(1) as f64;
    let bar_w = slot * 0.7;
    let base = H - PAD;

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#)
        .unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        W / 2.0
    )
    .unwrap();
    writeln!(s, r#"<line x1="{PAD}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#, W - PAD).unwrap();
    writeln!(s, r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{base}" stroke="black"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{top:.3} {unit}</text>"#, PAD - 4.0, PAD + 4.0).unwrap();
    for (i, v) in values.iter().enumerate() {
        let x = PAD + slot * i as f64 + (slot - bar_w) / 2.0;
        let cx = x + bar_w / 2.0;
        if let Some(v) = v {
            let h = v * scale;
            writeln!(
                s,
                r##"<rect x="{x:.2}" y="{:.2}" width="{bar_w:.2}" height="{h:.2}" fill="#4a78b0"/>"##,
                base - h
            )
            .unwrap();
        }
        writeln!(s, r#"<text x="{cx:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{i}</text>"#, base + 14.0).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
