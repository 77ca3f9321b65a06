//! Named, seeded experiments with JSON reports and CSV tables.

mod runs;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::DEFAULT_SEED;

pub use runs::{
    CounterexampleParams, DecayParams, DyadicParams, PartitionParams, ProbeParams, SectorsParams,
    ShiftedParams, SymbolCrossvalParams, SymbolSymmetriesParams, TimeFrequencyParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    SymbolCrossval,
    SymbolSymmetries,
    Sectors,
    Partition,
    Decay,
    TimeFrequency,
    Counterexample,
    DyadicIdentities,
    Shifted,
    Probe,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 10] = [
        Self::SymbolCrossval,
        Self::SymbolSymmetries,
        Self::Sectors,
        Self::Partition,
        Self::Decay,
        Self::TimeFrequency,
        Self::Counterexample,
        Self::DyadicIdentities,
        Self::Shifted,
        Self::Probe,
    ];

    /// Acceptance criterion covered by this experiment.
    pub fn criterion(self) -> Option<u8> {
        match self {
            Self::SymbolCrossval => Some(1),
            Self::SymbolSymmetries => Some(2),
            Self::Sectors => Some(3),
            Self::Partition => Some(4),
            Self::Decay => Some(5),
            Self::TimeFrequency => Some(6),
            Self::Counterexample => Some(7),
            Self::DyadicIdentities => Some(8),
            Self::Shifted => Some(9),
            Self::Probe => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::SymbolCrossval => "symbol-crossval",
            Self::SymbolSymmetries => "symbol-symmetries",
            Self::Sectors => "sectors",
            Self::Partition => "partition",
            Self::Decay => "decay",
            Self::TimeFrequency => "time-frequency",
            Self::Counterexample => "counterexample",
            Self::DyadicIdentities => "dyadic-identities",
            Self::Shifted => "shifted",
            Self::Probe => "probe",
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn empty_object() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentName,
    /// Experiment-specific; missing fields take their defaults.
    #[serde(default = "empty_object")]
    pub params: serde_json::Value,
    /// Not echoed in reports, so reruns into different directories compare equal.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub deterministic: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentName) -> Self {
        Self { experiment, params: empty_object(), output_dir: None, deterministic: true, seed: DEFAULT_SEED }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        Self::from_json(&text)
    }

    /// Parses the parameters without running anything.
    pub fn validate(&self) -> Result<()> {
        match self.experiment {
            ExperimentName::SymbolCrossval => self.params::<SymbolCrossvalParams>().map(drop),
            ExperimentName::SymbolSymmetries => self.params::<SymbolSymmetriesParams>().map(drop),
            ExperimentName::Sectors => self.params::<SectorsParams>().map(drop),
            ExperimentName::Partition => self.params::<PartitionParams>().map(drop),
            ExperimentName::Decay => self.params::<DecayParams>().map(drop),
            ExperimentName::TimeFrequency => self.params::<TimeFrequencyParams>().map(drop),
            ExperimentName::Counterexample => self.params::<CounterexampleParams>().map(drop),
            ExperimentName::DyadicIdentities => self.params::<DyadicParams>().map(drop),
            ExperimentName::Shifted => self.params::<ShiftedParams>().map(drop),
            ExperimentName::Probe => self.params::<ProbeParams>().map(drop),
        }
    }

    fn params<P: DeserializeOwned>(&self) -> Result<P> {
        serde_json::from_value(self.params.clone())
            .map_err(|e| Error::Config(format!("{} params: {e}", self.experiment.as_str())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Exact identity; failure is fatal.
    Identity,
    /// Tolerance band on measured data; failure is reported but not fatal.
    Measured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub status: Status,
    pub value: f64,
    pub bound: String,
}

impl Check {
    fn new(name: impl Into<String>, kind: CheckKind, value: f64, ok: bool, bound: String) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Self { name: name.into(), kind, status, value, bound }
    }

    pub fn at_most(name: impl Into<String>, kind: CheckKind, value: f64, bound: f64) -> Self {
        Self::new(name, kind, value, value <= bound, format!("<= {bound:e}"))
    }

    pub fn at_least(name: impl Into<String>, kind: CheckKind, value: f64, bound: f64) -> Self {
        Self::new(name, kind, value, value >= bound, format!(">= {bound:e}"))
    }

    pub fn within(name: impl Into<String>, kind: CheckKind, value: f64, lo: f64, hi: f64) -> Self {
        Self::new(name, kind, value, (lo..=hi).contains(&value), format!("in [{lo}, {hi}]"))
    }

    pub fn positive(name: impl Into<String>, kind: CheckKind, value: f64) -> Self {
        Self::new(name, kind, value, value > 0.0, "> 0".into())
    }

    pub fn equals(name: impl Into<String>, kind: CheckKind, value: f64, want: f64) -> Self {
        Self::new(name, kind, value, value == want, format!("== {want}"))
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        out.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Everything an experiment reports except timing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentName,
    pub criterion: Option<u8>,
    pub seed: u64,
    pub deterministic: bool,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub data: serde_json::Value,
}

impl ExperimentReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// Some identity check failed.
    pub fn hard_failure(&self) -> bool {
        self.checks.iter().any(|c| c.kind == CheckKind::Identity && !c.passed())
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// `report.json`, one CSV per table, and `timing.json`.
    pub fn write(&self, dir: &Path, wall_seconds: f64) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json()?)?;
        for t in &self.tables {
            t.write_csv(fs::File::create(dir.join(format!("{}.csv", t.name)))?)?;
        }
        let timing = serde_json::json!({ "experiment": self.experiment, "wall_seconds": wall_seconds });
        fs::write(dir.join("timing.json"), serde_json::to_string_pretty(&timing)? + "\n")?;
        Ok(())
    }
}

/// A finished run with its wall-clock time.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: ExperimentReport,
    pub wall_seconds: f64,
}

/// Runs the experiment and, if the config names an output directory, writes the files there.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let start = Instant::now();
    let seed = config.seed;
    let (checks, tables, data) = match config.experiment {
        ExperimentName::SymbolCrossval => runs::symbol_crossval(&config.params()?, seed)?,
        ExperimentName::SymbolSymmetries => runs::symbol_symmetries(&config.params()?, seed)?,
        ExperimentName::Sectors => runs::sectors(&config.params()?)?,
        ExperimentName::Partition => runs::partition(&config.params()?, seed)?,
        ExperimentName::Decay => runs::decay(&config.params()?)?,
        ExperimentName::TimeFrequency => runs::time_frequency(&config.params()?, seed)?,
        ExperimentName::Counterexample => runs::counterexample(&config.params()?)?,
        ExperimentName::DyadicIdentities => runs::dyadic(&config.params()?, seed)?,
        ExperimentName::Shifted => runs::shifted(&config.params()?, seed)?,
        ExperimentName::Probe => runs::probe(&config.params()?, seed)?,
    };
    let report = ExperimentReport {
        experiment: config.experiment,
        criterion: config.experiment.criterion(),
        seed,
        deterministic: config.deterministic,
        config: config.clone(),
        checks,
        tables,
        data,
    };
    let wall_seconds = start.elapsed().as_secs_f64();
    if let Some(dir) = &config.output_dir {
        report.write(dir, wall_seconds)?;
    }
    Ok(RunOutcome { report, wall_seconds })
}

#[cfg(test)]
mod tests;
