//! CSV and JSON emission. Floats in CSV use 17 significant digits, which
//! round-trips every binary64 value.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentKind, ExperimentResult};
use crate::laws::MpLaw;
use crate::tracywidom::Tw2Table;

/// Grid of the companion `s,tw2_pdf` curve written next to edge CSVs.
pub const TW2_CURVE_RANGE: (f64, f64) = (-8.0, 6.0);
pub const TW2_CURVE_POINTS: usize = 701;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Main CSV body for a result.
pub fn render_csv(result: &ExperimentResult) -> Result<String> {
    let kind = result.provenance.config.kind;
    let mut out = String::new();
    let missing = |what: &str| Error::Config(format!("result has no {what}"));
    match kind {
        ExperimentKind::Bulk => {
            let h = result.aggregates.histogram.as_ref().ok_or_else(|| missing("histogram"))?;
            out.push_str("bin_left,bin_right,empirical_density,mp_density\n");
            for i in 0..h.empirical_density.len() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_f64(h.edges[i]),
                    fmt_f64(h.edges[i + 1]),
                    fmt_f64(h.empirical_density[i]),
                    fmt_f64(h.mp_density[i])
                );
            }
        }
        ExperimentKind::LargestEdge | ExperimentKind::SmallestEdge => {
            out.push_str("trial,statistic\n");
            for r in &result.per_trial {
                let v = r.edge_statistic.ok_or_else(|| missing("edge statistic"))?;
                let _ = writeln!(out, "{},{}", r.trial_index, fmt_f64(v));
            }
        }
        ExperimentKind::Entropy => {
            out.push_str("trial,entropy_minus_log_n\n");
            for r in &result.per_trial {
                let _ = writeln!(out, "{},{}", r.trial_index, fmt_f64(r.entropy_minus_log_n));
            }
        }
        ExperimentKind::StieltjesIdentity => {
            out.push_str("trial,max_relative_gap\n");
            for r in &result.per_trial {
                let v = r.stieltjes_max_gap.ok_or_else(|| missing("Stieltjes gap"))?;
                let _ = writeln!(out, "{},{}", r.trial_index, fmt_f64(v));
            }
        }
    }
    Ok(out)
}

/// `s,tw2_pdf` on [`TW2_CURVE_RANGE`].
pub fn render_tw2_curve(table: &Tw2Table) -> String {
    let (lo, hi) = TW2_CURVE_RANGE;
    let mut out = String::from("s,tw2_pdf\n");
    for i in 0..TW2_CURVE_POINTS {
        let s = lo + (hi - lo) * i as f64 / (TW2_CURVE_POINTS - 1) as f64;
        let _ = writeln!(out, "{},{}", fmt_f64(s), fmt_f64(table.pdf(s)));
    }
    out
}

/// `x,mp_density,mp_cdf` on `points` equally spaced abscissae.
pub fn render_mp_curve(law: &MpLaw, x_min: f64, x_max: f64, points: usize) -> Result<String> {
    if points < 2 || !(x_min < x_max) {
        return Err(Error::Config(format!(
            "curve needs at least 2 points on a nonempty range, got {points} on [{x_min}, {x_max}]"
        )));
    }
    let mut out = String::from("x,mp_density,mp_cdf\n");
    for i in 0..points {
        let x = x_min + (x_max - x_min) * i as f64 / (points - 1) as f64;
        let _ = writeln!(out, "{},{},{}", fmt_f64(x), fmt_f64(law.density(x)), fmt_f64(law.cdf(x)?));
    }
    Ok(out)
}

/// `<stem>_tw2_pdf.csv` next to `path`.
pub fn companion_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}_tw2_pdf.csv"))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes the CSV for `result`; edge runs also get the companion curve file.
pub fn emit_csv(result: &ExperimentResult, table: Option<&Tw2Table>, path: &Path) -> Result<()> {
    write_text(path, &render_csv(result)?)?;
    if result.provenance.config.kind.is_edge() {
        let table = table.ok_or(Error::TableNotBuilt)?;
        write_text(&companion_path(path), &render_tw2_curve(table))?;
    }
    Ok(())
}

pub fn render_json(result: &ExperimentResult) -> Result<String> {
    let mut s = serde_json::to_string_pretty(result).map_err(|e| Error::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn emit_json(result: &ExperimentResult, path: &Path) -> Result<()> {
    write_text(path, &render_json(result)?)
}

pub fn read_json(path: &Path) -> Result<ExperimentResult> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}
