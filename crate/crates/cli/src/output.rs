use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;
pub const RESULTS_FILE: &str = "results.json";

/// Rounds to 12 significant digits. Non-finite values pass through.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = fmt12(x).parse().expect("formatted float parses");
    // avoid "-0.0" in payloads
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Fixed 12-significant-digit scientific notation.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Rounds every floating-point number in `v` in place.
pub fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *v = serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Time series written next to the JSON document.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Csv {
    pub fn new(header: Vec<&'static str>) -> Self {
        Csv { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt12(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub results: Value,
    pub csv: Option<Csv>,
}

/// Assembles the result document. Keys are emitted in sorted order.
pub fn document(config: &Value, output: &ScenarioOutput, csv_name: Option<&str>) -> Value {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    if let Value::Object(cfg) = config {
        for (k, v) in cfg {
            doc.insert(k.clone(), v.clone());
        }
    }
    doc.insert("results".into(), output.results.clone());
    doc.insert("csv".into(), csv_name.map_or(Value::Null, Value::from));
    let mut doc = Value::Object(doc);
    round_value(&mut doc);
    doc
}

/// Writes `results.json` and, when present, `<scenario>.csv` into `dir`.
pub fn write_outputs(dir: &Path, scenario: &str, config: &Value, output: &ScenarioOutput) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv_name = output.csv.as_ref().map(|_| format!("{scenario}.csv"));
    let doc = document(config, output, csv_name.as_deref());
    let mut text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
    text.push('\n');
    let json_path = dir.join(RESULTS_FILE);
    fs::write(&json_path, text)?;
    let mut written = vec![json_path];
    if let (Some(csv), Some(name)) = (&output.csv, csv_name) {
        let path = dir.join(name);
        fs::write(&path, csv.render())?;
        written.push(path);
    }
    Ok(written)
}
