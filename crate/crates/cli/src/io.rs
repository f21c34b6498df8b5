//! File formats: event-log and portfolio CSV input, CSV/JSON output, and
//! atomic writes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use resiliency_core::pointproc::Provenance;
use resiliency_core::{EventHistory, Scenario};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: &str = "1";
pub const EVENT_HEADER: &str = "fail_time,repair_complete_time";
pub const PORTFOLIO_HEADER: [&str; 4] = ["id", "description", "consequence", "probability"];

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Files produced by a command, written together once it has succeeded.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<PathBuf>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn add_json(&mut self, name: impl Into<PathBuf>, value: &serde_json::Value) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("JSON values serialize");
        bytes.push(b'\n');
        self.add(name, bytes);
    }

    /// Writes every file under `dir`, each through a temporary file in its
    /// target directory followed by a rename.
    pub fn commit(self, dir: &Path) -> CliResult<Vec<PathBuf>> {
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in self.files {
            let target = dir.join(&name);
            let parent = target.parent().unwrap_or(dir).to_path_buf();
            std::fs::create_dir_all(&parent).map_err(|e| CliError::io(&parent, e))?;
            let mut tmp = tempfile::NamedTempFile::new_in(&parent).map_err(|e| CliError::io(&parent, e))?;
            tmp.write_all(&bytes).map_err(|e| CliError::io(&target, e))?;
            tmp.as_file().sync_all().map_err(|e| CliError::io(&target, e))?;
            tmp.persist(&target).map_err(|e| CliError::io(&target, e.error))?;
            written.push(target);
        }
        Ok(written)
    }
}

pub fn event_log_csv(history: &EventHistory, model: &str) -> Vec<u8> {
    let mut s = String::new();
    writeln!(s, "# horizon={}", num(history.horizon())).unwrap();
    match history.provenance() {
        Provenance::Simulated { seed, trajectory } => {
            writeln!(s, "# seed={seed}").unwrap();
            writeln!(s, "# trajectory={trajectory}").unwrap();
            writeln!(s, "# provenance=simulated").unwrap();
        }
        Provenance::Observed => writeln!(s, "# provenance=observed").unwrap(),
    }
    writeln!(s, "# model={model}").unwrap();
    writeln!(s, "{EVENT_HEADER}").unwrap();
    for e in history.events() {
        writeln!(s, "{},{}", num(e.fail_time), num(e.repair_complete_time)).unwrap();
    }
    s.into_bytes()
}

/// A parsed event log. `repairs` is present when the file has the
/// `repair_complete_time` column.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub failures: Vec<f64>,
    pub repairs: Option<Vec<f64>>,
    pub horizon: Option<f64>,
    pub metadata: BTreeMap<String, String>,
}

pub fn read_event_log(path: &Path) -> CliResult<EventLog> {
    let text = read_text(path)?;
    let at = |line: usize| format!("{}:{line}", path.display());
    let mut metadata = BTreeMap::new();
    let mut horizon = None;
    for (n, line) in text.lines().enumerate() {
        let Some(meta) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        let Some((k, v)) = meta.split_once('=') else {
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        if k == "horizon" {
            let h: f64 = v
                .parse()
                .ok()
                .filter(|h: &f64| h.is_finite() && *h > 0.0)
                .ok_or_else(|| CliError::Config(format!("{}: invalid horizon `{v}`", at(n + 1))))?;
            horizon = Some(h);
        }
        metadata.insert(k.to_string(), v.to_string());
    }

    let mut reader = csv_reader(&text);
    let header = reader
        .headers()
        .map_err(|e| csv_error(path, &e))?
        .clone();
    let mut failures = Vec::new();
    if header.is_empty() {
        return Ok(EventLog {
            failures,
            repairs: None,
            horizon,
            metadata,
        });
    }
    let cols: Vec<&str> = header.iter().collect();
    let with_repairs = match cols.as_slice() {
        ["fail_time"] => false,
        ["fail_time", "repair_complete_time"] => true,
        _ => {
            let line = reader.position().line();
            return Err(CliError::Config(format!(
                "{}: expected header `{EVENT_HEADER}` (repair column optional), found `{}`",
                at(line as usize),
                cols.join(",")
            )));
        }
    };
    let mut repairs = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, &e))?;
        let line = rec.position().map_or(0, |p| p.line()) as usize;
        let field = |i: usize, name: &str| -> CliResult<f64> {
            let raw = &rec[i];
            raw.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                CliError::Config(format!("{}: row {}: invalid {name} `{raw}`", at(line), row + 1))
            })
        };
        failures.push(field(0, "fail_time")?);
        if with_repairs {
            repairs.push(field(1, "repair_complete_time")?);
        }
    }
    Ok(EventLog {
        failures,
        repairs: with_repairs.then_some(repairs),
        horizon,
        metadata,
    })
}

/// Portfolio rows in file order.
pub fn read_portfolio(path: &Path) -> CliResult<Vec<Scenario>> {
    let text = read_text(path)?;
    let mut reader = csv_reader(&text);
    let header = reader.headers().map_err(|e| csv_error(path, &e))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols != PORTFOLIO_HEADER {
        return Err(CliError::Config(format!(
            "{}:1: expected header `{}`, found `{}`",
            path.display(),
            PORTFOLIO_HEADER.join(","),
            cols.join(",")
        )));
    }
    let mut out = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, &e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |msg: String| CliError::Config(format!("{}:{line}: row {}: {msg}", path.display(), row + 1));
        let number = |i: usize, name: &str| -> CliResult<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|_| bad(format!("invalid {name} `{}`", &rec[i])))
        };
        let c = number(2, "consequence")?;
        let p = number(3, "probability")?;
        let s = Scenario::new(&rec[0], &rec[1], c, p).map_err(|e| bad(e.to_string()))?;
        out.push(s);
    }
    Ok(out)
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: cannot read: {e}", path.display())))
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn csv_error(path: &Path, e: &csv::Error) -> CliError {
    let line = e.position().map_or(0, |p| p.line());
    let msg = match e.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("row has {len} fields, expected {expected_len}")
        }
        _ => e.to_string(),
    };
    CliError::Config(format!("{}:{line}: {msg}", path.display()))
}
