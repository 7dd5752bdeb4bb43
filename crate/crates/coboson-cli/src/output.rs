//! Deterministic CSV/JSON emission and the sidecar manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::cli::Format;

/// One table: header plus rows of preformatted cells.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut object = Map::new();
            for (key, cell) in self.header.iter().zip(row) {
                // numbers stay numbers where they parse; labels stay strings
                let value = match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => serde_json::json!(v),
                    _ => Value::String(cell.clone()),
                };
                object.insert(key.clone(), value);
            }
            rows.push(Value::Object(object));
        }
        let mut text = serde_json::to_string_pretty(&rows).expect("serializable rows");
        text.push('\n');
        text
    }
}

/// 17 significant digits, `.` decimal separator, byte-stable.
pub fn fmt(value: f64) -> String {
    if value == f64::INFINITY {
        return "inf".into();
    }
    if value == f64::NEG_INFINITY {
        return "-inf".into();
    }
    format!("{value:.16e}")
}

pub fn fmt_usize(value: usize) -> String {
    value.to_string()
}

/// Sidecar manifest carrying the fully resolved configuration.
#[derive(Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub parameters: Value,
    pub outputs: Vec<String>,
    pub tolerances: Value,
    pub tail_bounds: Value,
}

impl Manifest {
    pub fn new(command: &str, parameters: Value) -> Self {
        Self {
            tool: "coboson",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            parameters,
            outputs: Vec::new(),
            tolerances: Value::Object(Map::new()),
            tail_bounds: Value::Object(Map::new()),
        }
    }

    pub fn with_tolerances(mut self, tolerances: Value) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn with_tail_bounds(mut self, tail_bounds: Value) -> Self {
        self.tail_bounds = tail_bounds;
        self
    }
}

fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    output.with_file_name(name)
}

/// Write the table to `output` (or stdout) and, when writing a file, the
/// `<output>.meta.json` sidecar.
pub fn emit(
    table: &Table,
    format: Format,
    output: Option<&Path>,
    mut manifest: Manifest,
) -> std::io::Result<()> {
    let body = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match output {
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
        }
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            fs::write(path, body)?;
            manifest
                .outputs
                .push(path.file_name().unwrap_or_default().to_string_lossy().into_owned());
            write_manifest(&manifest, &manifest_path(path))?;
        }
    }
    Ok(())
}

/// Write several tables under one manifest (figure presets).
pub fn emit_set(
    tables: &[(PathBuf, &Table)],
    mut manifest: Manifest,
    manifest_file: &Path,
) -> std::io::Result<()> {
    for (path, table) in tables {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        fs::write(path, table.to_csv())?;
        manifest
            .outputs
            .push(path.file_name().unwrap_or_default().to_string_lossy().into_owned());
    }
    write_manifest(&manifest, manifest_file)
}

fn write_manifest(manifest: &Manifest, path: &Path) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut text = serde_json::to_string_pretty(manifest).expect("serializable manifest");
    text.push('\n');
    fs::write(path, text)
}
