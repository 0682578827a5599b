//! Artifact writing: JSON envelopes and CSV mirrors, both stamped with the
//! tool version and the resolved configuration.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use crate::CliError;

pub const TOOL: &str = "lsl";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct Artifact<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a C,
    result: &'a R,
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, r: Vec<String>) {
        debug_assert_eq!(r.len(), self.header.len());
        self.rows.push(r);
    }
}

fn json_bytes<C: Serialize, R: Serialize>(command: &'static str, config: &C, result: &R) -> Result<Vec<u8>, CliError> {
    let art = Artifact { tool: TOOL, version: VERSION, command, config, result };
    let mut v = serde_json::to_vec_pretty(&art).map_err(|e| CliError::Io(e.to_string()))?;
    v.push(b'\n');
    Ok(v)
}

fn csv_bytes<C: Serialize>(command: &'static str, config: &C, table: &Table) -> Result<Vec<u8>, CliError> {
    let cfg = serde_json::to_string(config).map_err(|e| CliError::Io(e.to_string()))?;
    let mut buf = format!("# {TOOL} {VERSION} {command} {cfg}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let io_err = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&table.header).map_err(io_err)?;
        for r in &table.rows {
            w.write_record(r).map_err(io_err)?;
        }
        w.flush()?;
    }
    Ok(buf)
}

pub fn write_csv<C: Serialize>(path: &Path, command: &'static str, config: &C, table: &Table) -> Result<(), CliError> {
    let bytes = csv_bytes(command, config, table)?;
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub struct Sink {
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    pub fn emit<C: Serialize, R: Serialize>(&self, command: &'static str, config: &C, result: &R, table: impl FnOnce() -> Table) -> Result<(), CliError> {
        let bytes = match self.format {
            Format::Json => json_bytes(command, config, result)?,
            Format::Csv => csv_bytes(command, config, &table())?,
        };
        match &self.out {
            Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
            None => {
                let mut out = io::stdout().lock();
                out.write_all(&bytes)?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_carries_config_line() {
        let mut t = Table::new(&["a", "b"]);
        t.row(vec!["1".into(), "x,y".into()]);
        let s = String::from_utf8(csv_bytes("spectrum", &serde_json::json!({"seed": 7}), &t).unwrap()).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), format!("# lsl {VERSION} spectrum {{\"seed\":7}}"));
        assert_eq!(lines.next().unwrap(), "a,b");
        assert_eq!(lines.next().unwrap(), "1,\"x,y\"");
    }

    #[test]
    fn json_envelope() {
        let v: serde_json::Value = serde_json::from_slice(&json_bytes("gap", &1, &[2.0]).unwrap()).unwrap();
        assert_eq!(v["tool"], "lsl");
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["config"], 1);
        assert_eq!(v["result"][0], 2.0);
    }
}
