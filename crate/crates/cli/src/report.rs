//! Report documents and their JSON, CSV and text renderings.
//!
//! Every float is rounded to 15 significant digits before rendering and then
//! printed in its shortest round-tripping form, so parsing a rendered report
//! and rendering it again reproduces the same bytes.

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const TOOL: &str = "bilocal";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round15(n.as_f64().expect("f64 number"));
            *v = Value::from(x);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputDigest {
    pub source: String,
    pub sha256: String,
}

/// Everything needed to replay a command, plus its results.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: Vec<String>,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub results: Value,
}

impl Report {
    pub fn to_value(&self, timestamp: &str) -> Value {
        let mut doc = Map::new();
        doc.insert("tool".into(), TOOL.into());
        doc.insert("version".into(), VERSION.into());
        doc.insert("command".into(), self.command.clone().into());
        doc.insert("seed".into(), self.seed.map_or(Value::Null, Value::from));
        let inputs = self
            .inputs
            .iter()
            .map(|i| {
                let mut m = Map::new();
                m.insert("source".into(), i.source.clone().into());
                m.insert("sha256".into(), i.sha256.clone().into());
                Value::Object(m)
            })
            .collect();
        doc.insert("inputs".into(), Value::Array(inputs));
        let mut results = self.results.clone();
        round_floats(&mut results);
        doc.insert("results".into(), results);
        doc.insert("timestamp".into(), timestamp.into());
        Value::Object(doc)
    }
}

pub fn now_timestamp() -> String {
    humantime::format_rfc3339_seconds(std::time::SystemTime::now()).to_string()
}

pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => to_json(doc),
        Format::Csv => to_csv(doc),
        Format::Text => flatten(doc)
            .into_iter()
            .map(|(k, v)| format!("{k}: {v}\n"))
            .collect(),
    }
}

pub fn to_json(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("malformed JSON report: {e}")))
}

fn flatten_into(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, child) in m {
                flatten_into(&key(k), child, out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, child) in a.iter().enumerate() {
                flatten_into(&key(&i.to_string()), child, out);
            }
        }
        leaf => out.push((prefix.to_string(), leaf.to_string())),
    }
}

/// `(dotted path, JSON literal)` pairs in document order.
pub fn flatten(doc: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    flatten_into("", doc, &mut out);
    out
}

pub fn to_csv(doc: &Value) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("in-memory write");
    for (k, v) in flatten(doc) {
        w.write_record([k, v]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 output")
}

fn insert_path(node: &mut Value, path: &[&str], leaf: Value) -> CliResult<()> {
    let Some((head, rest)) = path.split_first() else {
        *node = leaf;
        return Ok(());
    };
    if node.is_null() {
        *node = if head.parse::<usize>().is_ok() {
            Value::Array(Vec::new())
        } else {
            Value::Object(Map::new())
        };
    }
    let bad = || CliError::Parse(format!("inconsistent CSV report path at '{head}'"));
    let child = match node {
        Value::Array(a) => {
            let i: usize = head.parse().map_err(|_| bad())?;
            if i == a.len() {
                a.push(Value::Null);
            }
            a.get_mut(i).ok_or_else(bad)?
        }
        Value::Object(m) => m.entry(head.to_string()).or_insert(Value::Null),
        _ => return Err(bad()),
    };
    insert_path(child, rest, leaf)
}

pub fn parse_csv(text: &str) -> CliResult<Value> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut root = Value::Null;
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Parse(format!("malformed CSV report: {e}")))?;
        let (Some(k), Some(v)) = (rec.get(0), rec.get(1)) else {
            return Err(CliError::Parse("CSV report rows need a key and a value".into()));
        };
        let leaf: Value = serde_json::from_str(v)
            .map_err(|e| CliError::Parse(format!("bad CSV value for {k}: {e}")))?;
        let path: Vec<&str> = if k.is_empty() { Vec::new() } else { k.split('.').collect() };
        insert_path(&mut root, &path, leaf)?;
    }
    Ok(root)
}
