//! JSON and CSV serialization of metrics and kernel tables.

use std::io::Write;

use serde_json::{Map, Number, Value};
use surfdenoise_core::bench::MetricsReport;
use surfdenoise_core::kernels::KernelSample;

use crate::error::Result;

/// Column order shared by the JSON object and the CSV rows.
pub const FIELDS: [&str; 13] = [
    "mean_angular_error_deg",
    "max_angular_error_deg",
    "feature_mean_angular_error_deg",
    "mean_vertex_distance",
    "volume_before",
    "volume_after",
    "relative_volume_change",
    "feature_edge_count",
    "truth_feature_edge_count",
    "warnings_zero_weight",
    "warnings_isolated_vertices",
    "warnings_empty_neighborhoods",
    "warnings_total",
];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Field {
    Real(f64),
    Count(usize),
}

fn fields(r: &MetricsReport) -> [Field; 13] {
    use Field::*;
    [
        Real(r.mean_angular_error_deg),
        Real(r.max_angular_error_deg),
        Real(r.feature_mean_angular_error_deg),
        Real(r.mean_vertex_distance),
        Real(r.volume_before),
        Real(r.volume_after),
        Real(r.relative_volume_change),
        Count(r.feature_edge_count),
        Count(r.truth_feature_edge_count),
        Count(r.warnings.zero_weight),
        Count(r.warnings.isolated_vertices),
        Count(r.warnings.empty_neighborhoods),
        Count(r.warnings.total()),
    ]
}

fn json_value(f: Field) -> Value {
    match f {
        Field::Real(x) => Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null),
        Field::Count(n) => Value::from(n),
    }
}

/// A real in CSV form: shortest round-trip decimal, `nan` for NaN.
pub fn csv_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x}")
    }
}

fn csv_value(f: Field) -> String {
    match f {
        Field::Real(x) => csv_real(x),
        Field::Count(n) => n.to_string(),
    }
}

/// Flat JSON object; `extra` entries come first. NaN becomes `null`.
pub fn report_json(report: &MetricsReport, extra: &[(&str, Value)]) -> Value {
    let mut m = Map::new();
    for (k, v) in extra {
        m.insert((*k).to_string(), v.clone());
    }
    for (name, f) in FIELDS.iter().zip(fields(report)) {
        m.insert((*name).to_string(), json_value(f));
    }
    Value::Object(m)
}

pub fn write_report_json<W: Write>(report: &MetricsReport, extra: &[(&str, Value)], w: &mut W) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, &report_json(report, extra)).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

/// CSV header with the given leading columns.
pub fn csv_header(leading: &[&str]) -> String {
    leading
        .iter()
        .chain(FIELDS.iter())
        .copied()
        .collect::<Vec<_>>()
        .join(",")
}

pub fn csv_row(leading: &[&str], report: &MetricsReport) -> String {
    let mut cols: Vec<String> = leading.iter().map(|s| s.to_string()).collect();
    cols.extend(fields(report).into_iter().map(csv_value));
    cols.join(",")
}

/// `x,rho,psi,g` rows.
pub fn write_kernel_table<W: Write>(samples: &[KernelSample], w: &mut W) -> Result<()> {
    writeln!(w, "x,rho,psi,g")?;
    let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), csv_real);
    for s in samples {
        writeln!(w, "{},{},{},{}", csv_real(s.x), csv_real(s.rho), opt(s.psi), opt(s.g))?;
    }
    Ok(())
}
