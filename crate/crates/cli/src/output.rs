use std::path::PathBuf;

use boxhunt_core::exact::compare_to_bound;
use boxhunt_core::SpeedupReport;
use serde::{Deserialize, Serialize};

use crate::args::{Format, OutputArgs};
use crate::CliError;

/// Fixed report columns; absent values are written as empty fields.
pub const REPORT_HEADER: [&str; 12] = [
    "strategy",
    "k",
    "m",
    "mode",
    "theta",
    "speedup_inv_theta",
    "speedup_mean",
    "stderr",
    "trials",
    "seed",
    "bound",
    "ratio",
];

/// Column-requirement result attached by `exact --check-columns`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnCheck {
    pub ok: bool,
    pub violation_t: Option<usize>,
    pub column_sum: Option<String>,
}

/// A report plus everything the CLI joins onto it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    #[serde(flatten)]
    pub report: SpeedupReport,
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub found_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<ColumnCheck>,
}

impl ReportRecord {
    pub fn new(report: SpeedupReport) -> Self {
        let cmp = compare_to_bound(&report).ok();
        Self { bound: cmp.map(|c| c.bound), ratio: cmp.map(|c| c.ratio), report, found_fraction: None, columns: None }
    }

    /// Row under [`REPORT_HEADER`]. Rational reports print exact fractions.
    pub fn csv_row(&self) -> Vec<String> {
        let r = &self.report;
        let opt = |v: Option<String>| v.unwrap_or_default();
        let (theta, inv, mean) = match &r.exact {
            Some(e) => (e.theta.clone(), e.speedup_inv_theta.clone(), e.speedup_mean.clone()),
            None => (r.theta.to_string(), r.speedup_inv_theta.to_string(), opt(r.speedup_mean.map(|v| v.to_string()))),
        };
        vec![
            r.strategy.name().to_string(),
            r.k.to_string(),
            r.m.to_string(),
            r.mode.name().to_string(),
            theta,
            inv,
            mean,
            opt(r.stderr.map(|v| v.to_string())),
            opt(r.trials.map(|v| v.to_string())),
            opt(r.seed.map(|v| v.to_string())),
            opt(self.bound.map(|v| v.to_string())),
            opt(self.ratio.map(|v| v.to_string())),
        ]
    }
}

#[derive(Debug, Serialize)]
struct PerBoxRow<'a> {
    strategy: &'a str,
    k: usize,
    m: usize,
    x: usize,
    expected_time: f64,
    theta_x: f64,
}

fn csv_error(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

/// One object for a single row, an array otherwise.
pub fn json<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let s = match rows {
        [one] => serde_json::to_string_pretty(one),
        _ => serde_json::to_string_pretty(rows),
    };
    s.map(|s| s + "\n").map_err(csv_error)
}

/// Serializes rows whose field names form the header.
pub fn table<T: Serialize>(rows: &[T], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(csv_error)?;
            }
            finish(w)
        }
    }
}

/// Report table; per-box detail follows as a second CSV block after a
/// blank line.
pub fn reports(records: &[ReportRecord], format: Format) -> Result<String, CliError> {
    if format == Format::Json {
        return json(records);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_HEADER).map_err(csv_error)?;
    for rec in records {
        w.write_record(rec.csv_row()).map_err(csv_error)?;
    }
    let mut out = finish(w)?;

    let detail: Vec<PerBoxRow> = records
        .iter()
        .flat_map(|rec| {
            let r = &rec.report;
            r.per_x.iter().flatten().map(move |p| PerBoxRow {
                strategy: r.strategy.name(),
                k: r.k,
                m: r.m,
                x: p.x,
                expected_time: p.expected_time,
                theta_x: p.theta_x,
            })
        })
        .collect();
    if !detail.is_empty() {
        out.push('\n');
        out.push_str(&table(&detail, Format::Csv)?);
    }
    Ok(out)
}

/// `--out`, else `$BOXHUNT_OUT/<command>.<ext>`, else standard output.
pub fn destination(out: &OutputArgs, command: &str) -> Option<PathBuf> {
    out.out
        .clone()
        .or_else(|| out.out_dir.as_ref().map(|d| d.join(format!("{command}.{}", out.format.extension()))))
}

pub fn write(out: &OutputArgs, command: &str, body: &str) -> Result<(), CliError> {
    match destination(out, command) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
