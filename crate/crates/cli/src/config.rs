use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bqec_core::channels::{FIRST_ORDER_DEPHASING_LIMIT, FIRST_ORDER_LOSS_LIMIT};
use bqec_core::states::DEFAULT_DIM;
use bqec_core::{RateFamily, ReferenceCode};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_POINTS: usize = 25;
pub const DEFAULT_GAMMA_MIN: f64 = 1e-7;
pub const DEFAULT_OUT: &str = "out";
pub const MIN_DIM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Kl,
    Petz,
    Opt,
}

impl Measure {
    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Kl => "kl",
            Measure::Petz => "petz",
            Measure::Opt => "opt",
        }
    }

    /// Values where smaller means a better code.
    pub fn penalty(self, value: f64) -> f64 {
        match self {
            Measure::Kl => value,
            Measure::Petz | Measure::Opt => 1.0 - value,
        }
    }

    pub fn penalty_label(self) -> &'static str {
        match self {
            Measure::Kl => "KL cost",
            Measure::Petz => "1 - F (Petz)",
            Measure::Opt => "1 - F (optimal)",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "kl" => Ok(Measure::Kl),
            "petz" => Ok(Measure::Petz),
            "opt" => Ok(Measure::Opt),
            other => Err(format!("unknown measure `{other}` (expected kl, petz or opt)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Loss,
    Dephasing,
}

impl ErrorKind {
    pub fn family(self) -> RateFamily {
        match self {
            ErrorKind::Loss => RateFamily::Loss,
            ErrorKind::Dephasing => RateFamily::Dephasing,
        }
    }

    /// Upper end of the rate window where the first-order set is trusted.
    pub fn gamma_limit(self) -> f64 {
        match self {
            ErrorKind::Loss => FIRST_ORDER_LOSS_LIMIT,
            ErrorKind::Dephasing => FIRST_ORDER_DEPHASING_LIMIT,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Loss => "loss",
            ErrorKind::Dephasing => "dephasing",
        }
    }
}

impl FromStr for ErrorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "loss" => Ok(ErrorKind::Loss),
            "dephasing" => Ok(ErrorKind::Dephasing),
            other => Err(format!("unknown error family `{other}` (expected loss or dephasing)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format `{other}` (expected csv, json or svg)")),
        }
    }
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub measure: Option<Vec<Measure>>,
    pub error: Option<ErrorKind>,
    pub gamma_min: Option<f64>,
    pub gamma_max: Option<f64>,
    pub points: Option<usize>,
    pub dim: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Vec<Format>>,
    pub force: Option<bool>,
    pub seed: Option<u64>,
    pub states: Option<Vec<String>>,
    pub gamma_loss: Option<f64>,
    pub gamma_dephasing: Option<f64>,
    pub j: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Keys set in `over` win.
    pub fn overlay(self, over: FileConfig) -> FileConfig {
        FileConfig {
            measure: over.measure.or(self.measure),
            error: over.error.or(self.error),
            gamma_min: over.gamma_min.or(self.gamma_min),
            gamma_max: over.gamma_max.or(self.gamma_max),
            points: over.points.or(self.points),
            dim: over.dim.or(self.dim),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            force: over.force.or(self.force),
            seed: over.seed.or(self.seed),
            states: over.states.or(self.states),
            gamma_loss: over.gamma_loss.or(self.gamma_loss),
            gamma_dephasing: over.gamma_dephasing.or(self.gamma_dephasing),
            j: over.j.or(self.j),
        }
    }
}

/// A validated sweep request.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub states: Vec<ReferenceCode>,
    pub error: ErrorKind,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub points: usize,
    pub dim: usize,
    pub measures: Vec<Measure>,
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
    pub force: bool,
    pub seed: u64,
}

impl SweepConfig {
    pub fn resolve(cfg: FileConfig) -> Result<Self, CliError> {
        let error = cfg.error.unwrap_or(ErrorKind::Loss);
        let force = cfg.force.unwrap_or(false);
        let states = match cfg.states {
            None => ReferenceCode::ALL.to_vec(),
            Some(labels) => labels
                .iter()
                .map(|l| {
                    ReferenceCode::from_label(l).ok_or_else(|| CliError::Validation(format!("unknown state `{l}`")))
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        let mut measures = cfg.measure.unwrap_or_else(|| vec![Measure::Kl]);
        measures.sort();
        measures.dedup();
        let mut formats = cfg.format.unwrap_or_else(|| vec![Format::Csv]);
        formats.dedup();
        let out = SweepConfig {
            states,
            error,
            gamma_min: cfg.gamma_min.unwrap_or(DEFAULT_GAMMA_MIN),
            gamma_max: cfg.gamma_max.unwrap_or(error.gamma_limit()),
            points: cfg.points.unwrap_or(DEFAULT_POINTS),
            dim: cfg.dim.unwrap_or(DEFAULT_DIM),
            measures,
            output_dir: cfg.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            formats,
            force,
            seed: cfg.seed.unwrap_or(0),
        };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Validation(msg));
        if !self.gamma_min.is_finite() || !self.gamma_max.is_finite() {
            return bad("gamma bounds must be finite".into());
        }
        if self.gamma_min < 0.0 || (self.gamma_min == 0.0 && !self.force) {
            return bad(format!("gamma_min must be > 0, got {}", self.gamma_min));
        }
        if self.gamma_max < self.gamma_min {
            return bad(format!(
                "gamma_max {} is below gamma_min {}",
                self.gamma_max, self.gamma_min
            ));
        }
        if self.gamma_max > self.error.gamma_limit() && !self.force {
            return bad(format!(
                "gamma_max {} exceeds the {} window limit {} (use --force)",
                self.gamma_max,
                self.error.as_str(),
                self.error.gamma_limit()
            ));
        }
        if self.points == 0 {
            return bad("points must be at least 1".into());
        }
        if self.points > 1 && self.gamma_min == 0.0 {
            return bad("a log-spaced grid needs gamma_min > 0".into());
        }
        if self.points > 1 && self.gamma_min == self.gamma_max {
            return bad("gamma_min equals gamma_max but more than one point was requested".into());
        }
        if self.dim < MIN_DIM {
            return bad(format!("dim must be at least {MIN_DIM}, got {}", self.dim));
        }
        if self.states.is_empty() || self.measures.is_empty() || self.formats.is_empty() {
            return bad("states, measures and formats must be non-empty".into());
        }
        Ok(())
    }

    /// Log-spaced grid including both end points.
    pub fn grid(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.gamma_min];
        }
        let (a, b) = (self.gamma_min.log10(), self.gamma_max.log10());
        let n = self.points - 1;
        (0..=n)
            .map(|k| match k {
                0 => self.gamma_min,
                k if k == n => self.gamma_max,
                k => 10f64.powf(a + (b - a) * k as f64 / n as f64),
            })
            .collect()
    }
}
