//! CSV learning curves and the JSON summary sidecar.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use sparse_afe::metrics::to_db;
use sparse_afe::{AlgorithmSummary, ExperimentResult};

use crate::error::CliError;

const DB_SUFFIX: &str = "_msd_db";
const LINEAR_SUFFIX: &str = "_msd";

/// Fixed 9-significant-digit rendering, so outputs are byte-stable.
pub fn format_sig9(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0.00000000".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

pub fn summary_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("summary.json")
}

/// Writes one row per iteration (dB by default, linear with `linear`) and a
/// `<name>.summary.json` sidecar next to it.
pub fn emit_csv(result: &ExperimentResult, path: &Path, linear: bool) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::io(path, e);
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::io(path, e),
        other => CliError::Csv(format!("{other:?}")),
    };

    let suffix = if linear { LINEAR_SUFFIX } else { DB_SUFFIX };
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(File::create(path).map_err(io)?));

    let mut header = vec!["iteration".to_string()];
    header.extend(result.reports.iter().map(|r| format!("{}{suffix}", r.label)));
    writer.write_record(&header).map_err(csv_err)?;

    let columns: Vec<Option<Vec<f64>>> = result
        .reports
        .iter()
        .map(|r| {
            r.curve.as_ref().map(|c| {
                if linear {
                    c.msd().to_vec()
                } else {
                    c.msd().iter().copied().map(to_db).collect()
                }
            })
        })
        .collect();
    let mut row = Vec::with_capacity(header.len());
    for k in 0..result.config.iterations {
        row.clear();
        row.push(k.to_string());
        row.extend(
            columns
                .iter()
                .map(|c| c.as_ref().map_or_else(|| "nan".to_string(), |c| format_sig9(c[k]))),
        );
        writer.write_record(&row).map_err(csv_err)?;
    }
    writer.flush().map_err(io)?;
    drop(writer);

    emit_summary(&result.summaries(), &summary_path(path))
}

pub fn emit_summary(summaries: &[&AlgorithmSummary], path: &Path) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(summaries)
        .map_err(|e| CliError::Csv(format!("cannot encode summary: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Learning curves read back from a CSV written by [`emit_csv`], in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub labels: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl CurveTable {
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

pub fn read_curves_csv(path: &Path) -> Result<CurveTable, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::io(path, e),
        other => CliError::Csv(format!("{}: {other:?}", path.display())),
    })?;
    let bad = |msg: String| CliError::Csv(format!("{}: {msg}", path.display()));

    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.get(0) != Some("iteration") {
        return Err(bad("first column must be `iteration`".into()));
    }
    let mut labels = Vec::new();
    let mut linear = Vec::new();
    for name in header.iter().skip(1) {
        if let Some(label) = name.strip_suffix(DB_SUFFIX) {
            labels.push(label.to_string());
            linear.push(false);
        } else if let Some(label) = name.strip_suffix(LINEAR_SUFFIX) {
            labels.push(label.to_string());
            linear.push(true);
        } else {
            return Err(bad(format!("unrecognized column `{name}`")));
        }
    }

    let mut columns = vec![Vec::new(); labels.len()];
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        for (j, column) in columns.iter_mut().enumerate() {
            let field = record.get(j + 1).unwrap_or("");
            let v: f64 = field
                .parse()
                .map_err(|_| bad(format!("`{field}` is not a number")))?;
            column.push(if linear[j] { to_db(v) } else { v });
        }
    }
    Ok(CurveTable { labels, columns })
}
