use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tomokit::validation::CheckReport;
use tomokit::{Error, Result};

/// JSON document written by every command. Contains no timestamps, so
/// identical inputs give byte-identical files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub command: String,
    pub state: String,
    /// Effective settings: grids, seeds, tolerances.
    pub config: BTreeMap<String, Value>,
    pub checks: Vec<CheckReport>,
    pub failing: Vec<String>,
    pub pass: bool,
    /// Command-specific numeric output.
    #[serde(default)]
    pub results: BTreeMap<String, Value>,
    #[serde(default)]
    pub artifacts: Vec<String>,
    pub metadata: BTreeMap<String, String>,
}

impl RunReport {
    pub fn new(command: &str, state: impl Into<String>) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("tool".into(), "tomokit".into());
        metadata.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        Self {
            command: command.into(),
            state: state.into(),
            config: BTreeMap::new(),
            checks: Vec::new(),
            failing: Vec::new(),
            pass: true,
            results: BTreeMap::new(),
            artifacts: Vec::new(),
            metadata,
        }
    }

    pub fn config(&mut self, key: &str, value: impl Serialize) {
        self.config.insert(key.into(), to_value(value));
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.into(), to_value(value));
    }

    pub fn artifact(&mut self, path: &Path) {
        self.artifacts.push(path.display().to_string());
    }

    /// Sets `pass` to "every check passed".
    pub fn finish_all(&mut self) {
        self.failing = self.checks.iter().filter(|c| !c.pass).map(|c| c.check.clone()).collect();
        self.pass = self.failing.is_empty();
    }

    pub fn print_summary(&self) {
        for c in &self.checks {
            println!(
                "{} {} {}: metric={:.6e} threshold={:.3e}",
                if c.pass { "PASS" } else { "FAIL" },
                self.state,
                c.check,
                c.metric,
                c.threshold
            );
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read report {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// `dir/stem-suffix` next to a report path.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("tomokit");
    path.with_file_name(format!("{stem}-{suffix}"))
}
