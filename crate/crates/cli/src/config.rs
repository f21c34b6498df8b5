//! Run configuration: a TOML file merged with `--set section.key=value`
//! overrides. Every error names the file line or override it came from.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use resiliency_core::Error as CoreError;
use toml::{Table, Value};

use crate::error::{CliError, CliResult};

/// Sections and the keys each accepts. `event` is an array of tables.
const SCHEMA: &[(&str, &[&str])] = &[
    (
        "model",
        &["kind", "rate", "q", "variant", "rocof", "lambda", "beta", "alpha", "a", "b"],
    ),
    ("dist", &["family", "rate", "shape", "scale", "log_mean", "log_sd"]),
    (
        "repair",
        &["kind", "duration", "family", "rate", "shape", "scale", "log_mean", "log_sd"],
    ),
    ("sim", &["horizon", "trajectories", "seed", "mode", "points", "rocof_window"]),
    ("mission", &["t_mission"]),
    ("event", &["t_fail", "t_res", "q_res"]),
    (
        "fit",
        &[
            "events",
            "candidates",
            "truncation",
            "variant",
            "observation_end",
            "q_min",
            "q_max",
            "grid_points",
            "fixed_q",
        ],
    ),
    ("risk", &["portfolio", "normalized", "proxy"]),
    ("trajectory", &["resolution", "outage_level", "event"]),
];

#[derive(Debug, Clone)]
pub struct Config {
    root: Table,
    file: Option<(PathBuf, String)>,
    overrides: BTreeSet<String>,
}

impl Config {
    /// Reads `path` (if any), applies the overrides in order and checks every
    /// section and key against the schema.
    pub fn load(path: Option<&Path>, sets: &[String]) -> CliResult<Self> {
        let (root, file) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Config(format!("{}: cannot read config: {e}", p.display()))
                })?;
                let root: Table = toml::from_str(&text).map_err(|e| {
                    let line = e
                        .span()
                        .map(|s| text[..s.start].matches('\n').count() + 1)
                        .unwrap_or(1);
                    CliError::Config(format!("{}:{line}: {}", p.display(), e.message().trim()))
                })?;
                (root, Some((p.to_path_buf(), text)))
            }
            None => (Table::new(), None),
        };
        let mut cfg = Config {
            root,
            file,
            overrides: BTreeSet::new(),
        };
        for s in sets {
            cfg.apply_override(s)?;
        }
        cfg.check_schema()?;
        Ok(cfg)
    }

    fn apply_override(&mut self, spec: &str) -> CliResult<()> {
        let (key, raw) = spec.split_once('=').ok_or_else(|| {
            CliError::Config(format!("--set {spec}: expected section.key=value"))
        })?;
        let key = key.trim();
        let parts: Vec<&str> = key.split('.').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(CliError::Config(format!("--set {spec}: malformed key `{key}`")));
        }
        let value = parse_override_value(raw.trim());
        let mut table = &mut self.root;
        for part in &parts[..parts.len() - 1] {
            let entry = table
                .entry(part.to_string())
                .or_insert_with(|| Value::Table(Table::new()));
            table = entry.as_table_mut().ok_or_else(|| {
                CliError::Config(format!("--set {spec}: `{part}` is not a table"))
            })?;
        }
        table.insert(parts[parts.len() - 1].to_string(), value);
        self.overrides.insert(key.to_string());
        Ok(())
    }

    fn check_schema(&self) -> CliResult<()> {
        for (section, value) in &self.root {
            let Some((_, keys)) = SCHEMA.iter().find(|(s, _)| s == section) else {
                return Err(self.invalid(section, "is not a known section"));
            };
            if section == "event" {
                let Some(items) = value.as_array() else {
                    return Err(self.invalid(section, "must be a list of [[event]] blocks"));
                };
                for (i, item) in items.iter().enumerate() {
                    let label = format!("event[{i}]");
                    let t = item
                        .as_table()
                        .ok_or_else(|| self.invalid(&label, "must be a table"))?;
                    for k in t.keys() {
                        if !keys.contains(&k.as_str()) {
                            return Err(self.invalid(&format!("{label}.{k}"), "is not a known key"));
                        }
                    }
                }
                continue;
            }
            let Some(t) = value.as_table() else {
                return Err(self.invalid(section, "must be a table"));
            };
            for k in t.keys() {
                if !keys.contains(&k.as_str()) {
                    return Err(self.invalid(&format!("{section}.{k}"), "is not a known key"));
                }
            }
        }
        Ok(())
    }

    /// Where `key` was set: an override, a line of the config file, or the
    /// built-in defaults.
    pub fn locate(&self, key: &str) -> String {
        let set_by = self.overrides.iter().find(|o| {
            key == o.as_str()
                || key.starts_with(&format!("{o}."))
                || key.starts_with(&format!("{o}["))
        });
        if let Some(o) = set_by {
            return format!("--set {o}");
        }
        match &self.file {
            Some((path, text)) => match find_line(text, key) {
                Some(line) => format!("{}:{line}", path.display()),
                None => path.display().to_string(),
            },
            None => "defaults".to_string(),
        }
    }

    pub fn invalid(&self, key: &str, msg: impl Display) -> CliError {
        CliError::Config(format!("{}: `{key}` {msg}", self.locate(key)))
    }

    /// Turns a parameter error from the core into a config error anchored at
    /// `section.<parameter>`; other errors keep their own exit code.
    pub fn core_error(&self, section: &str, e: CoreError) -> CliError {
        match e {
            CoreError::InvalidParameter { name, value, reason } => {
                self.invalid(&format!("{section}.{name}"), format!("= {value}: {reason}"))
            }
            CoreError::Domain(msg) => CliError::Config(format!("{}: {msg}", self.locate(section))),
            other => CliError::core(section, other),
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.lookup(key).is_some()
    }

    fn lookup(&self, key: &str) -> Option<&Value> {
        let (head, rest) = match key.split_once('.') {
            Some((h, r)) => (h, Some(r)),
            None => (key, None),
        };
        let mut v = match head.split_once('[') {
            Some((name, idx)) => {
                let i: usize = idx.strip_suffix(']')?.parse().ok()?;
                self.root.get(name)?.as_array()?.get(i)?
            }
            None => self.root.get(head)?,
        };
        if let Some(rest) = rest {
            for part in rest.split('.') {
                v = v.as_table()?.get(part)?;
            }
        }
        Some(v)
    }

    pub fn f64(&self, key: &str) -> CliResult<Option<f64>> {
        match self.lookup(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(other) => Err(self.invalid(key, format!("must be a number, got {}", other.type_str()))),
        }
    }

    pub fn require_f64(&self, key: &str) -> CliResult<f64> {
        self.f64(key)?.ok_or_else(|| self.missing(key))
    }

    pub fn positive_or(&self, key: &str, default: f64) -> CliResult<f64> {
        let v = self.f64(key)?.unwrap_or(default);
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(self.invalid(key, format!("must be positive and finite, got {v}")))
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> CliResult<usize> {
        match self.lookup(key) {
            None => Ok(default),
            Some(Value::Integer(i)) if *i >= 0 => Ok(*i as usize),
            Some(Value::Float(x)) if *x >= 0.0 && x.fract() == 0.0 && *x <= 9.007_199_254_740_992e15 => {
                Ok(*x as usize)
            }
            Some(other) => Err(self.invalid(key, format!("must be a non-negative integer, got {other}"))),
        }
    }

    pub fn i64(&self, key: &str) -> CliResult<Option<i64>> {
        match self.lookup(key) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(*i)),
            Some(other) => Err(self.invalid(key, format!("must be an integer, got {other}"))),
        }
    }

    pub fn str(&self, key: &str) -> CliResult<Option<&str>> {
        match self.lookup(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(self.invalid(key, format!("must be a string, got {other}"))),
        }
    }

    pub fn bool(&self, key: &str) -> CliResult<Option<bool>> {
        match self.lookup(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(other) => Err(self.invalid(key, format!("must be true or false, got {other}"))),
        }
    }

    /// A list of strings, given either as an array or comma-separated.
    pub fn str_list(&self, key: &str) -> CliResult<Option<Vec<String>>> {
        match self.lookup(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(
                s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect(),
            )),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s.clone()),
                    other => Err(self.invalid(key, format!("must list strings, got {other}"))),
                })
                .collect::<CliResult<Vec<_>>>()
                .map(Some),
            Some(other) => Err(self.invalid(key, format!("must be a list of strings, got {other}"))),
        }
    }

    /// A path that must exist. Relative paths resolve against the config
    /// file's directory, or the working directory for overrides.
    pub fn existing_path(&self, key: &str) -> CliResult<Option<PathBuf>> {
        let Some(raw) = self.str(key)? else {
            return Ok(None);
        };
        let p = Path::new(raw);
        let resolved = if p.is_absolute() || self.locate(key).starts_with("--set") {
            p.to_path_buf()
        } else {
            match &self.file {
                Some((cfg_path, _)) => cfg_path.parent().unwrap_or(Path::new("")).join(p),
                None => p.to_path_buf(),
            }
        };
        if !resolved.is_file() {
            return Err(self.invalid(key, format!("refers to missing file {}", resolved.display())));
        }
        Ok(Some(resolved))
    }

    pub fn missing(&self, key: &str) -> CliError {
        let section = key.split('.').next().unwrap_or(key);
        let at = if self.has(section) {
            self.locate(section)
        } else {
            match &self.file {
                Some((p, _)) => p.display().to_string(),
                None => "defaults".to_string(),
            }
        };
        CliError::Config(format!("{at}: `{key}` is required"))
    }

    /// Number of `[[event]]` blocks.
    pub fn event_count(&self) -> usize {
        self.root
            .get("event")
            .and_then(Value::as_array)
            .map_or(0, Vec::len)
    }
}

fn parse_override_value(raw: &str) -> Value {
    toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// 1-based line of `key` (`section.leaf` or `section[i].leaf`) in TOML text.
fn find_line(text: &str, key: &str) -> Option<usize> {
    let (head, leaf) = match key.split_once('.') {
        Some((h, l)) => (h, Some(l)),
        None => (key, None),
    };
    let (section, index) = match head.split_once('[') {
        Some((name, idx)) => (name, idx.strip_suffix(']').and_then(|i| i.parse::<usize>().ok())),
        None => (head, None),
    };
    let mut current = String::new();
    let mut seen = 0usize;
    let mut header_line = None;
    for (n, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix("[[").and_then(|r| r.split("]]").next()) {
            current = name.trim().to_string();
            if current == section {
                if index == Some(seen) || (index.is_none() && header_line.is_none()) {
                    header_line = Some(n + 1);
                }
                seen += 1;
            }
            continue;
        }
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.split(']').next()) {
            current = name.trim().to_string();
            if current == section && header_line.is_none() {
                header_line = Some(n + 1);
            }
            continue;
        }
        let Some((lhs, _)) = t.split_once('=') else {
            continue;
        };
        let lhs = lhs.trim();
        let in_block = current == section && index.is_none_or(|i| seen == i + 1);
        match leaf {
            Some(l) if in_block && lhs == l => return Some(n + 1),
            Some(l) if current.is_empty() && lhs == format!("{section}.{l}") => return Some(n + 1),
            None if current.is_empty() && lhs == section => return Some(n + 1),
            _ => {}
        }
    }
    header_line
}
