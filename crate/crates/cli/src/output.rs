use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Formats `x` with 12 significant digits, fixed notation for moderate
/// magnitudes, trailing zeros removed.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (11 - exp).max(0) as usize;
    let fixed = format!("{:.*}", decimals, x);
    if fixed.contains('.') {
        trim_zeros(&fixed).to_string()
    } else {
        fixed
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Settings that determine a run's outputs. Its hash is stamped on every file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub subcommand: String,
    pub params: retire_core::model::ModelParams,
    pub source: String,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<String>,
}

impl RunManifest {
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&serde_json::to_value(self).expect("manifest serializes"))
            .expect("json")
    }

    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.canonical_json().as_bytes()))
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes
        .iter()
        .fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// A CSV document: manifest line, `name [unit]` header, 12-digit values.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(hash: &str, columns: &[(String, String)]) -> Self {
        let header: Vec<String> = columns.iter().map(|(n, u)| format!("{n} [{u}]")).collect();
        Self {
            text: format!("# manifest: {hash}\n{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn numbers(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| sig12(v)).collect();
        self.row(&cells);
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn columns(spec: &[(&str, &str)]) -> Vec<(String, String)> {
    spec.iter()
        .map(|(n, u)| (n.to_string(), u.to_string()))
        .collect()
}

/// Pretty JSON with sorted keys, the manifest and its hash embedded.
pub fn json_document(manifest: &RunManifest, body: Value) -> String {
    let mut map = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    map.insert(
        "manifest".into(),
        serde_json::to_value(manifest).expect("manifest serializes"),
    );
    map.insert("manifest_hash".into(), Value::String(manifest.hash()));
    let sorted: Value = serde_json::from_str(&Value::Object(map).to_string()).expect("round trip");
    let mut s = serde_json::to_string_pretty(&sorted).expect("json");
    s.push('\n');
    s
}

/// Where documents go: a directory (one file each) or standard output.
pub enum Sink {
    Stdout,
    Dir(PathBuf),
}

impl Sink {
    pub fn new(out: Option<&Path>) -> std::io::Result<Self> {
        match out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                Ok(Sink::Dir(dir.to_path_buf()))
            }
            None => Ok(Sink::Stdout),
        }
    }

    pub fn emit(&self, file_name: &str, contents: &str) -> std::io::Result<()> {
        match self {
            Sink::Stdout => {
                let mut out = std::io::stdout().lock();
                out.write_all(contents.as_bytes())?;
                out.flush()
            }
            Sink::Dir(dir) => std::fs::write(dir.join(file_name), contents),
        }
    }

    pub fn is_stdout(&self) -> bool {
        matches!(self, Sink::Stdout)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(517.7392077107036), "517.739207711");
        assert_eq!(sig12(0.1066128773), "0.1066128773");
        assert_eq!(sig12(-2.5), "-2.5");
        assert_eq!(sig12(40.0), "40");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(1.234e-7), "1.234e-7");
        assert_eq!(sig12(6.02214076e23), "6.02214076e23");
        assert_eq!(sig12(f64::INFINITY), "inf");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new("abc", &columns(&[("t", "years"), ("F", "1")]));
        csv.numbers(&[0.5, 2.0]);
        assert_eq!(
            csv.into_string(),
            "# manifest: abc\nt [years],F [1]\n0.5,2\n"
        );
    }
}
