use std::collections::BTreeMap;

use cpspectra::Error;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Output of every successful command.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub values: BTreeMap<String, Value>,
    pub residuals: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
    /// Non-zero when the report itself records a failed verdict.
    #[serde(skip)]
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs_digest: String::new(),
            values: BTreeMap::new(),
            residuals: BTreeMap::new(),
            warnings: Vec::new(),
            elapsed: None,
            exit_code: 0,
        }
    }

    pub fn value(&mut self, name: &str, v: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(v).expect("report values serialize");
        self.values.insert(name.to_string(), v);
        self
    }

    pub fn residual(&mut self, name: &str, r: f64) -> &mut Self {
        self.residuals.insert(name.to_string(), r);
        self
    }

    pub fn warn(&mut self, w: impl Into<String>) -> &mut Self {
        self.warnings.push(w.into());
        self
    }
}

/// Machine-readable failure, printed instead of a [`Report`].
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub command: String,
    pub inputs_digest: String,
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input files.
    Input(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 3,
            CliError::Core(Error::BudgetExceeded { .. } | Error::CesaroNoConvergence(_)) => 4,
            CliError::Core(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "malformed_input",
            CliError::Core(e) => match e {
                Error::BudgetExceeded { .. } | Error::CesaroNoConvergence(_) => "budget_exceeded",
                Error::Dimension(_) | Error::NotSquare { .. } => "dimension",
                Error::NoConvergence => "no_convergence",
                Error::Singular(_) => "singular",
                Error::NotPsd(_) | Error::NotStrictlyPositive(_) => "not_positive",
                Error::ZeroSpectralRadius => "zero_spectral_radius",
                Error::UnboundedPowers { .. } => "unbounded_powers",
                Error::RankNotOne(_) => "rank_not_one",
                Error::Invalid(_) | Error::Precondition(_) => "precondition",
            },
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Input(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

/// SHA-256 over the command, its arguments and the bytes of every input file.
#[derive(Default)]
pub struct InputDigest {
    hasher: Sha256,
}

impl InputDigest {
    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        self.hasher.update((label.len() as u64).to_le_bytes());
        self.hasher.update(label.as_bytes());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub fn finish(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}
