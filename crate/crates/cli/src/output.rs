//! Report envelope, fixed-precision JSON, CSV flattening and summaries.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u64 = 1;

/// Pretty JSON with every float written as 17 significant digits.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", fmt_f64(value))
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_json_string(v: &Value) -> CliResult<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::with_indent(b"  ")));
    v.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// `{field: {count, min, max, mean}}` over the numeric `fields` of `records`.
pub fn summarize(records: &[Value], fields: &[&str]) -> Value {
    let mut out = Map::new();
    for &f in fields {
        let xs: Vec<f64> = records
            .iter()
            .filter_map(|r| r.get(f).and_then(Value::as_f64))
            .collect();
        if xs.is_empty() {
            continue;
        }
        let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        out.insert(
            f.to_string(),
            json!({"count": xs.len(), "min": min, "max": max, "mean": mean}),
        );
    }
    Value::Object(out)
}

/// Recomputes the summary of a report for the fields it already lists.
pub fn resummarize(report: &Value) -> CliResult<Value> {
    let records = report
        .get("records")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Config("report has no records array".into()))?;
    let fields: Vec<String> = report
        .get("summary")
        .and_then(Value::as_object)
        .map(|m| m.keys().cloned().collect())
        .unwrap_or_default();
    let names: Vec<&str> = fields.iter().map(String::as_str).collect();
    Ok(summarize(records, &names))
}

pub struct Report {
    pub command: &'static str,
    pub model: Option<String>,
    pub metadata: Map<String, Value>,
    pub records: Vec<Value>,
    pub summary_fields: &'static [&'static str],
}

impl Report {
    pub fn new(command: &'static str, model: Option<String>, summary_fields: &'static [&'static str]) -> Self {
        Self {
            command,
            model,
            metadata: Map::new(),
            records: Vec::new(),
            summary_fields,
        }
    }

    pub fn to_value(&self, cfg: &RunConfig) -> Value {
        let config: BTreeMap<&str, &str> = cfg.entries.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let mut top = Map::new();
        top.insert("schema_version".into(), json!(SCHEMA_VERSION));
        top.insert(
            "tool".into(),
            json!({"name": "qgeom", "version": env!("CARGO_PKG_VERSION")}),
        );
        top.insert("command".into(), json!(self.command));
        top.insert("config".into(), json!(config));
        top.insert("engine".into(), json!(cfg.engine.name()));
        top.insert("fd_step".into(), json!(cfg.fd_step));
        top.insert("model".into(), json!(self.model));
        top.insert("metadata".into(), Value::Object(self.metadata.clone()));
        top.insert("record_count".into(), json!(self.records.len()));
        top.insert("summary".into(), summarize(&self.records, self.summary_fields));
        top.insert("records".into(), Value::Array(self.records.clone()));
        Value::Object(top)
    }

    /// Writes JSON or CSV to `--out`, or stdout.
    pub fn emit(&self, cfg: &RunConfig) -> CliResult<()> {
        let text = match cfg.format {
            Format::Json => to_json_string(&self.to_value(cfg))?,
            Format::Csv => records_to_csv(&self.records)?,
        };
        write_text(cfg.out.as_deref(), &text)
    }
}

pub fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?);
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}_{i}"), item, out);
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}_{k}")
                };
                flatten(&key, item, out);
            }
        }
        Value::Number(n) => {
            let s = if n.is_f64() {
                fmt_f64(n.as_f64().unwrap_or(f64::NAN))
            } else {
                n.to_string()
            };
            out.push((prefix.to_string(), s));
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
    }
}

/// One row per record; nested arrays become `name_0, name_1, ...` columns.
/// Columns are the union over records in first-seen order; missing cells
/// are empty.
pub fn records_to_csv(records: &[Value]) -> CliResult<String> {
    let rows: Vec<Vec<(String, String)>> = records
        .iter()
        .map(|r| {
            let mut cells = Vec::new();
            flatten("", r, &mut cells);
            cells
        })
        .collect();
    let mut header: Vec<&str> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !header.contains(&k.as_str()) {
                header.push(k);
            }
        }
    }
    // A null placeholder `x` is redundant once `x_0, ...` columns exist.
    let expanded: Vec<bool> = header
        .iter()
        .map(|h| {
            let prefix = format!("{h}_");
            header.iter().any(|o| o.starts_with(&prefix))
                && rows.iter().all(|r| r.iter().all(|(k, v)| k != h || v.is_empty()))
        })
        .collect();
    let header: Vec<&str> = header
        .into_iter()
        .zip(expanded)
        .filter(|(_, x)| !x)
        .map(|(h, _)| h)
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    if !rows.is_empty() {
        w.write_record(&header)?;
    }
    for row in &rows {
        let cells: BTreeMap<&str, &str> = row.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        w.write_record(header.iter().map(|h| cells.get(h).copied().unwrap_or("")))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 cells"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        let text = to_json_string(&json!({"a": [0.1, 2], "b": null})).unwrap();
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        assert!(text.contains("2\n") || text.contains("2,") || text.contains("2\r"));
    }

    #[test]
    fn csv_flattens_arrays() {
        let rows = vec![
            json!({"coords": [1.0, 2.0], "det": 0.5}),
            json!({"coords": [3.0, 4.0], "det": null}),
        ];
        let csv = records_to_csv(&rows).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "coords_0,coords_1,det");
        assert_eq!(lines.nth(1).unwrap(), "3.0000000000000000e0,4.0000000000000000e0,");
    }

    #[test]
    fn csv_header_is_column_union() {
        let rows = vec![json!({"a": null, "b": 1}), json!({"a": [1, 2], "b": 2})];
        let csv = records_to_csv(&rows).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines, ["b,a_0,a_1", "1,,", "2,1,2"]);
    }

    #[test]
    fn summary_statistics() {
        let rows = vec![json!({"det": 1.0}), json!({"det": 3.0}), json!({"det": null})];
        let s = summarize(&rows, &["det", "missing"]);
        assert_eq!(s["det"]["count"], json!(2));
        assert_eq!(s["det"]["mean"], json!(2.0));
        assert!(s.get("missing").is_none());
    }
}
