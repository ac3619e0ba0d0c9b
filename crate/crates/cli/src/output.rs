use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// One emitted series. The first `key_columns` columns are printed as plain
/// decimals, the rest with an `E` exponent.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    #[serde(skip)]
    pub key_columns: usize,
    pub rows: Vec<Vec<f64>>,
    /// Per-series metadata copied into the sidecar.
    #[serde(skip)]
    pub meta: Value,
}

impl Table {
    pub fn series(name: String, rows: Vec<Vec<f64>>, meta: Value) -> Self {
        Self {
            name,
            columns: vec!["control", "value", "residual"],
            key_columns: 0,
            rows,
            meta,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    if i < self.key_columns {
                        format!("{v}")
                    } else {
                        format!("{v:E}")
                    }
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }
}

/// Everything a subcommand produces.
#[derive(Debug, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    /// Command-level results for the sidecar.
    pub results: Map<String, Value>,
    /// Failed validation checks; any entry turns the exit status into 2.
    pub failures: Vec<String>,
}

/// Effective precision of one series: 0 for double.
pub fn precision_meta(requested: u32, effective: u32) -> Value {
    json!({ "requested_digits": requested, "effective_digits": effective })
}

pub fn sidecar(cfg: &RunConfig, report: &Report) -> Result<String, CliError> {
    let series: Vec<Value> = report
        .tables
        .iter()
        .map(|t| {
            json!({
                "name": t.name,
                "file": format!("{}.{}", t.name, cfg.format.extension()),
                "columns": t.columns,
                "meta": t.meta,
            })
        })
        .collect();
    let doc = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "run_config": cfg,
        "series": series,
        "results": report.results,
        "failures": report.failures,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(text)
}

pub fn sidecar_name(cfg: &RunConfig) -> String {
    let command = serde_json::to_value(cfg.command)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_else(|| "run".into());
    format!("{command}.meta.json")
}

/// Stdout rendering: CSV tables separated by `# name` lines, or one JSON
/// document holding the sidecar and every table.
pub fn render_stdout(cfg: &RunConfig, report: &Report) -> Result<String, CliError> {
    match cfg.format {
        Format::Csv => {
            let mut out = String::new();
            for (i, table) in report.tables.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                let _ = writeln!(out, "# {}", table.name);
                out.push_str(&table.to_csv());
            }
            Ok(out)
        }
        Format::Json => {
            let meta: Value = serde_json::from_str(&sidecar(cfg, report)?)?;
            let doc = json!({ "metadata": meta, "tables": report.tables });
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            Ok(text)
        }
    }
}

/// Writes every table and the sidecar into `dir`, each through a temporary
/// file and a rename. On failure the files written so far are removed.
pub fn write_dir(dir: &Path, cfg: &RunConfig, report: &Report) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(report.tables.len() + 1);
    for table in &report.tables {
        files.push((
            format!("{}.{}", table.name, cfg.format.extension()),
            table.render(cfg.format)?,
        ));
    }
    files.push((sidecar_name(cfg), sidecar(cfg, report)?));

    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in &files {
        match write_atomic(&dir.join(name), contents) {
            Ok(path) => written.push(path),
            Err(e) => {
                for path in &written {
                    let _ = fs::remove_file(path);
                }
                return Err(e.into());
            }
        }
    }
    Ok(written)
}

fn write_atomic(path: &Path, contents: &str) -> std::io::Result<PathBuf> {
    let file_name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map(|()| path.to_path_buf())
}
