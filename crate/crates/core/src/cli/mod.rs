//! Command layer shared by the binary and the tests: JSON run configs,
//! the exit-code contract, and one function per subcommand.

mod commands;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;
use crate::quadrature::QuadratureSpec;
use crate::weights::WeightProfile;

pub use commands::{
    cmd_check_weight, cmd_dichotomy, cmd_norms, cmd_radial_lemma, cmd_solve, CheckWeightParams, DichotomyParams,
    NormsParams, RadialLemmaParams,
};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exit {
    Pass = 0,
    ConditionFail = 1,
    ConfigInvalid = 2,
    Inconclusive = 3,
    NonConvergence = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// Exit code for an error raised before or during a command.
    pub fn for_error(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Json(_) | Error::SingularAtOrigin | Error::Io(_) | Error::Csv(_) => {
                Exit::ConfigInvalid
            }
            Error::Quadrature { .. } => Exit::Inconclusive,
            Error::LinearAlgebra(_) => Exit::NonConvergence,
            Error::Divergent(_) | Error::Discretization(_) | Error::Construction(_) => Exit::ConditionFail,
        }
    }
}

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Exit::Pass => "pass",
            Exit::ConditionFail => "condition fail",
            Exit::ConfigInvalid => "config invalid",
            Exit::Inconclusive => "inconclusive",
            Exit::NonConvergence => "non-convergence",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    CheckWeight,
    Dichotomy,
    Solve,
    RadialLemma,
    Norms,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckWeight => "check-weight",
            Command::Dichotomy => "dichotomy",
            Command::Solve => "solve",
            Command::RadialLemma => "radial-lemma",
            Command::Norms => "norms",
        }
    }
}

fn default_weight() -> WeightProfile {
    WeightProfile::power(0.5, 3.0).expect("valid default weight")
}

/// One JSON document driving a single command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; when present it must name the subcommand being run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default = "default_weight")]
    pub weight: WeightProfile,
    pub quad: QuadratureSpec,
    pub seed: u64,
    /// Command-specific block; missing keys take their defaults.
    pub params: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            weight: default_weight(),
            quad: QuadratureSpec::default(),
            seed: 0,
            params: Value::Null,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> crate::Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub(crate) fn params<T: serde::de::DeserializeOwned + Default>(&self) -> crate::Result<T> {
        match &self.params {
            Value::Null => Ok(T::default()),
            v => Ok(serde_json::from_value(v.clone())?),
        }
    }

    pub(crate) fn check_command(&self, cmd: Command) -> crate::Result<()> {
        match &self.command {
            Some(c) if c != cmd.name() => {
                Err(Error::InvalidParameter(format!("config is for command '{c}', not '{}'", cmd.name())))
            }
            _ => Ok(()),
        }
    }

    /// The config with `params` replaced by the resolved parameter block. The
    /// output directory is left out so reports do not depend on where they land.
    pub(crate) fn resolved<T: Serialize>(&self, cmd: Command, params: &T) -> crate::Result<Self> {
        Ok(Self { command: Some(cmd.name().into()), params: serde_json::to_value(params)?, out: None, ..self.clone() })
    }
}

/// Result of a command: the exit code, a one-line summary and the files written.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub exit: Exit,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

/// Runs a command, mapping errors onto the exit-code contract.
pub fn run(cmd: Command, config: &RunConfig) -> Outcome {
    let res = match cmd {
        Command::CheckWeight => cmd_check_weight(config),
        Command::Dichotomy => cmd_dichotomy(config),
        Command::Solve => cmd_solve(config),
        Command::RadialLemma => cmd_radial_lemma(config),
        Command::Norms => cmd_norms(config),
    };
    res.unwrap_or_else(|e| Outcome { exit: Exit::for_error(&e), summary: e.to_string(), files: Vec::new() })
}

pub(crate) fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> crate::Result<PathBuf> {
    let path = dir.join(name);
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    crate::io::write_atomic(&path, &bytes)?;
    Ok(path)
}
