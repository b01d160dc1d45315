//! Run configuration shared by the commands, and the error type that maps
//! onto exit codes.

use std::path::PathBuf;

use bos_core::eigen::Boundary;
use bos_core::{Epsilon, ParamError, Precision};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum BoundaryArg {
    /// Plain leading section.
    Truncated,
    /// Last row closed with the decaying-solution ratio.
    Asymptotic,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Truncated => Boundary::Truncated,
            BoundaryArg::Asymptotic => Boundary::Asymptotic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PrecisionArg {
    Double,
    DoubleDouble,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::DoubleDouble => Precision::DoubleDouble,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub epsilons: Vec<f64>,
    /// Truncation size `N`; stability is judged against `2N`.
    pub size: usize,
    /// Galerkin dimension `K`.
    pub galerkin: usize,
    /// Stability filter tolerance (relative to `1 + |λ|`).
    pub tol: f64,
    /// Cross-route discrepancy and `|Im λ|` gate.
    pub gate: f64,
    /// Eigenvalues compared in cross checks.
    pub count: usize,
    pub boundary: Boundary,
    pub precision: Precision,
    pub filter: bool,
    pub allow_resonant: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            epsilons: Vec::new(),
            size: 1000,
            galerkin: 200,
            tol: 1e-8,
            gate: 1e-6,
            count: 10,
            boundary: Boundary::Asymptotic,
            precision: Precision::DoubleDouble,
            filter: true,
            allow_resonant: false,
            format: Format::Csv,
            out: None,
        }
    }
}

impl RunConfig {
    /// Range checks common to every command; `theorem` additionally rejects
    /// `1/ε ∈ Z` unless resonant values were explicitly allowed.
    pub fn validate(&self, theorem: bool) -> Result<(), CliError> {
        if self.epsilons.is_empty() {
            return Err(CliError::Usage("at least one --epsilon is required".into()));
        }
        for &e in &self.epsilons {
            if theorem && !self.allow_resonant {
                Epsilon::theorem(e)?;
            } else {
                Epsilon::new(e)?;
            }
        }
        if self.size == 0 {
            return Err(ParamError::EmptySection.into());
        }
        if self.galerkin == 0 {
            return Err(CliError::Usage("--galerkin must be at least 1".into()));
        }
        if self.count == 0 {
            return Err(CliError::Usage("--count must be at least 1".into()));
        }
        for (name, v) in [("--tol", self.tol), ("--gate", self.gate)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Usage(format!("{name} must be a positive number, got {v}")));
            }
        }
        Ok(())
    }
}

/// Failures, by exit code: 1 for usage and validation, 2 for numerics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{message}")]
    Numerical { message: String, epsilon: Option<f64>, row: Option<usize> },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical { .. } => 2,
        }
    }

    pub fn numerical(message: impl Into<String>, epsilon: f64, row: Option<usize>) -> Self {
        CliError::Numerical { message: message.into(), epsilon: Some(epsilon), row }
    }

    /// One JSON line for standard error.
    pub fn record(&self) -> String {
        let (kind, epsilon, row) = match self {
            CliError::Usage(_) => ("usage", None, None),
            CliError::Numerical { epsilon, row, .. } => ("numerical", *epsilon, *row),
        };
        serde_json::json!({
            "error": {
                "code": self.exit_code(),
                "kind": kind,
                "message": self.to_string(),
                "epsilon": epsilon,
                "row": row,
            }
        })
        .to_string()
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<bos_core::Error> for CliError {
    fn from(e: bos_core::Error) -> Self {
        match e {
            bos_core::Error::Param(p) => p.into(),
            bos_core::Error::Numerical(n) => {
                CliError::Numerical { message: n.to_string(), epsilon: None, row: None }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(eps: &[f64]) -> RunConfig {
        RunConfig { epsilons: eps.to_vec(), ..RunConfig::default() }
    }

    #[test]
    fn range_and_resonance() {
        assert!(cfg(&[0.7]).validate(true).is_ok());
        let err = cfg(&[2.5]).validate(false).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("0 < epsilon < 2"));
        let err = cfg(&[1.0]).validate(true).unwrap_err();
        assert!(err.to_string().contains("1/ε ∈ Z"), "{err}");
        assert!(cfg(&[1.0]).validate(false).is_ok());
        let mut c = cfg(&[0.5]);
        c.allow_resonant = true;
        assert!(c.validate(true).is_ok());
        assert!(cfg(&[]).validate(false).is_err());
    }

    #[test]
    fn error_record_is_json() {
        let e = CliError::numerical("diverged", 0.5, Some(3));
        let v: serde_json::Value = serde_json::from_str(&e.record()).unwrap();
        assert_eq!(v["error"]["code"], 2);
        assert_eq!(v["error"]["row"], 3);
        assert_eq!(v["error"]["epsilon"], 0.5);
    }
}
