//! Report assembly and serialization. Every float is written with 17
//! significant digits; non-finite values become `null` (JSON) or are left
//! empty (CSV).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use riesz_core::suites::{Summary, VerifyReport};

use crate::error::CliError;

pub const COMMANDS: [&str; 8] = [
    "exact",
    "bound",
    "sweep",
    "verify",
    "a2",
    "phase",
    "check-poisson",
    "phi-decay",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A CSV column: header text and the record key it reads.
pub type Column = (&'static str, &'static str);

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub params: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub records: Vec<Value>,
    pub summary: Map<String, Value>,
    pub columns: Vec<Column>,
    /// Written as a `# {...}` first line in CSV output.
    pub csv_header: Option<Value>,
    pub failed: bool,
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

impl Report {
    pub fn new(command: &'static str, columns: Vec<Column>) -> Self {
        Report {
            command,
            params: BTreeMap::new(),
            seed: None,
            records: Vec::new(),
            summary: Map::new(),
            columns,
            csv_header: None,
            failed: false,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), to_value(&value));
        self
    }

    /// Fills `pass_count`, `fail_count` and `min_margin_log` from the
    /// records' `pass` and `margin_log` fields. Leaves `failed` alone: only
    /// verify suites turn failed checks into a nonzero exit.
    pub fn tally(&mut self) {
        let mut pass = 0u64;
        let mut fail = 0u64;
        let mut min: Option<f64> = None;
        for r in &self.records {
            match r.get("pass").and_then(Value::as_bool) {
                Some(true) => pass += 1,
                Some(false) => fail += 1,
                None => {}
            }
            if let Some(m) = r.get("margin_log").and_then(Value::as_f64) {
                min = Some(min.map_or(m, |x: f64| x.min(m)));
            }
        }
        self.summary.insert("pass_count".into(), pass.into());
        self.summary.insert("fail_count".into(), fail.into());
        self.summary.insert(
            "min_margin_log".into(),
            min.map_or(Value::Null, Value::from),
        );
    }

    pub fn from_verify(v: &VerifyReport, columns: Vec<Column>) -> Self {
        let mut r = Report::new("verify", columns);
        r.params
            .insert("suite".into(), Value::from(v.suite.clone()));
        for (k, x) in &v.params {
            r.params.insert(k.clone(), Value::from(*x));
        }
        r.seed = Some(v.seed);
        r.records = v.records.iter().map(to_value).collect();
        let Summary {
            pass_count,
            fail_count,
            min_margin_log,
        } = v.summary;
        r.summary
            .insert("pass_count".into(), (pass_count as u64).into());
        r.summary
            .insert("fail_count".into(), (fail_count as u64).into());
        r.summary.insert(
            "min_margin_log".into(),
            min_margin_log.map_or(Value::Null, Value::from),
        );
        r.failed = fail_count > 0;
        r
    }

    pub fn to_json_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::from(self.command));
        m.insert(
            "params".into(),
            Value::Object(self.params.clone().into_iter().collect()),
        );
        m.insert("seed".into(), self.seed.map_or(Value::Null, Value::from));
        m.insert("records".into(), Value::Array(self.records.clone()));
        m.insert("summary".into(), Value::Object(self.summary.clone()));
        Value::Object(m)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = String::new();
                write_json(&mut s, &self.to_json_value(), 0);
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        if let Some(h) = &self.csv_header {
            out.push_str("# ");
            write_json_compact(&mut out, h);
            out.push('\n');
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::parse(format!("csv output: {e}"));
        w.write_record(self.columns.iter().map(|c| c.0))
            .map_err(io)?;
        for r in &self.records {
            let row: Vec<String> = self.columns.iter().map(|c| scalar(r.get(c.1))).collect();
            w.write_record(&row).map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::parse(format!("csv output: {e}")))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_number(n: &serde_json::Number) -> String {
    if let Some(i) = n.as_i64() {
        i.to_string()
    } else if let Some(u) = n.as_u64() {
        u.to_string()
    } else {
        fmt_f64(n.as_f64().expect("json number"))
    }
}

fn scalar(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::Bool(b)) => b.to_string(),
        Some(Value::Number(n)) => fmt_number(n),
        Some(Value::String(s)) => s.clone(),
        Some(other) => {
            let mut s = String::new();
            write_json_compact(&mut s, other);
            s
        }
    }
}

fn write_json(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(a) if !a.is_empty() => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(out, x, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) if !m.is_empty() => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::from(k.as_str()));
                write_json(out, x, indent + 1);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        other => write_json_compact(out, other),
    }
}

fn write_json_compact(out: &mut String, v: &Value) {
    match v {
        Value::Number(n) => out.push_str(&fmt_number(n)),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json_compact(out, x);
            }
            out.push(']');
        }
        Value::Object(m) => {
            out.push('{');
            for (i, (k, x)) in m.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}:", Value::from(k.as_str()));
                write_json_compact(out, x);
            }
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Checks a parsed JSON report against the report schema.
pub fn validate_report(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("report is not an object")?;
    for key in ["command", "params", "seed", "records", "summary"] {
        if !obj.contains_key(key) {
            return Err(format!("missing field '{key}'"));
        }
    }
    let cmd = obj["command"].as_str().ok_or("'command' is not a string")?;
    if !COMMANDS.contains(&cmd) {
        return Err(format!("unknown command '{cmd}'"));
    }
    if !obj["params"].is_object() {
        return Err("'params' is not an object".into());
    }
    if !(obj["seed"].is_null() || obj["seed"].is_u64()) {
        return Err("'seed' is neither null nor a nonnegative integer".into());
    }
    let records = obj["records"]
        .as_array()
        .ok_or("'records' is not an array")?;
    if let Some(i) = records.iter().position(|r| !r.is_object()) {
        return Err(format!("record {i} is not an object"));
    }
    let summary = obj["summary"]
        .as_object()
        .ok_or("'summary' is not an object")?;
    for key in ["pass_count", "fail_count"] {
        if !summary.get(key).is_some_and(Value::is_u64) {
            return Err(format!("summary.{key} is not a nonnegative integer"));
        }
    }
    match summary.get("min_margin_log") {
        Some(Value::Null) | Some(Value::Number(_)) => Ok(()),
        _ => Err("summary.min_margin_log is neither null nor a number".into()),
    }
}
