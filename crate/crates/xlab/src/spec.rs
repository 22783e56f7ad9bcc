//! Experiment descriptions and run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Result, XlabError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Tables,
    Figure1,
    GapBound,
    Scaling,
    AdversaryDemo,
    Decimate,
}

impl ExperimentKind {
    /// Parameters that must be present before the experiment runs.
    pub fn required_keys(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::Tables => &["h", "eta"],
            ExperimentKind::Figure1 => &["h", "eta", "s_max", "samples"],
            ExperimentKind::GapBound => &["l", "trials", "seed"],
            ExperimentKind::Scaling => &["l", "N", "epsilons", "trials", "seed"],
            ExperimentKind::AdversaryDemo => &["l", "h", "seed"],
            ExperimentKind::Decimate => &["signal", "config", "epsilon", "N"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Tables => "tables",
            ExperimentKind::Figure1 => "figure1",
            ExperimentKind::GapBound => "gap_bound",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::AdversaryDemo => "adversary_demo",
            ExperimentKind::Decimate => "decimate",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = XlabError;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.replace('-', "_")))
            .map_err(|_| XlabError::Spec(format!("unknown experiment kind '{s}'")))
    }
}

/// What to run, with which parameters, and where to put the outputs.
///
/// JSON form: `{"kind": "scaling", "parameters": {"l": 2, "N": 10, ...}, "output_dir": "runs/s2"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub parameters: BTreeMap<String, Value>,
    pub output_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            kind,
            parameters: BTreeMap::new(),
            output_dir: output_dir.into(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| XlabError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let missing: Vec<&str> = self
            .kind
            .required_keys()
            .iter()
            .copied()
            .filter(|k| !self.parameters.contains_key(*k))
            .collect();
        if !missing.is_empty() {
            return Err(XlabError::Spec(format!(
                "{} requires parameter(s): {}",
                self.kind.name(),
                missing.join(", ")
            )));
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Result<&Value> {
        self.parameters
            .get(key)
            .ok_or_else(|| XlabError::Spec(format!("missing parameter '{key}'")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.get(key)?
            .as_f64()
            .ok_or_else(|| XlabError::Spec(format!("parameter '{key}' must be a number")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.parameters.contains_key(key) {
            self.f64(key)
        } else {
            Ok(default)
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.get(key)?
            .as_u64()
            .ok_or_else(|| XlabError::Spec(format!("parameter '{key}' must be a non-negative integer")))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        Ok(self.u64(key)? as usize)
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        self.get(key)?
            .as_array()
            .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
            .ok_or_else(|| XlabError::Spec(format!("parameter '{key}' must be a list of numbers")))
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>> {
        match self.get(key)? {
            Value::Array(a) => a
                .iter()
                .map(|v| v.as_u64().map(|x| x as usize))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| XlabError::Spec(format!("parameter '{key}' must be integers"))),
            v => v
                .as_u64()
                .map(|x| vec![x as usize])
                .ok_or_else(|| XlabError::Spec(format!("parameter '{key}' must be integers"))),
        }
    }

    pub fn string(&self, key: &str) -> Result<String> {
        self.get(key)?
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| XlabError::Spec(format!("parameter '{key}' must be a string")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
}

/// Record of one run: what was asked for and every file written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub spec: ExperimentSpec,
    pub toolkit_version: String,
    pub wall_time: f64,
    pub outputs: Vec<OutputDigest>,
    /// Headline numbers of the run (fitted slopes, pass counts, ...).
    pub summary: Value,
}

impl RunManifest {
    pub const FILE_NAME: &'static str = "manifest.json";

    pub fn digest(&self, path: &str) -> Option<&str> {
        self.outputs.iter().find(|o| o.path == path).map(|o| o.sha256.as_str())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(Self::FILE_NAME);
        let text = fs::read_to_string(&path).map_err(|e| XlabError::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// The files of a run. All writes go through here so the manifest is complete.
pub(crate) struct OutputSet {
    dir: PathBuf,
    written: Vec<OutputDigest>,
}

impl OutputSet {
    pub(crate) fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| XlabError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub(crate) fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| XlabError::io(&path, e))?;
        self.written.push(OutputDigest {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(contents)),
        });
        Ok(())
    }

    pub(crate) fn finish(self, spec: ExperimentSpec, wall_time: f64, summary: Value) -> Result<RunManifest> {
        let manifest = RunManifest {
            spec,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time,
            outputs: self.written,
            summary,
        };
        let path = self.dir.join(RunManifest::FILE_NAME);
        let text = serde_json::to_string_pretty(&manifest)?;
        fs::write(&path, text).map_err(|e| XlabError::io(&path, e))?;
        Ok(manifest)
    }
}

/// Minimal CSV builder; every float is written with 17 significant digits.
pub(crate) struct Csv {
    text: String,
}

impl Csv {
    pub(crate) fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub(crate) fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub(crate) fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_parsing() {
        assert_eq!("gap-bound".parse::<ExperimentKind>().unwrap(), ExperimentKind::GapBound);
        assert_eq!("figure1".parse::<ExperimentKind>().unwrap(), ExperimentKind::Figure1);
        assert!("plot".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn missing_keys_are_reported() {
        let spec = ExperimentSpec::new(ExperimentKind::Tables, "out").with("h", 0.1);
        let err = spec.validate().unwrap_err();
        assert!(err.is_usage());
        assert!(err.to_string().contains("eta"));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = ExperimentSpec::new(ExperimentKind::Scaling, "runs/s")
            .with("l", 2)
            .with("epsilons", vec![1e-3, 1e-4]);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"scaling\""));
        let back: ExperimentSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.f64_list("epsilons").unwrap(), vec![1e-3, 1e-4]);
    }
}
