//! Error types shared by every module of the scenario engine.
use std::fmt;

use thiserror::Error;

/// A single problem found while validating an input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    /// 1-based line number in the source file (the header is line 1).
    pub line: usize,
    /// Column name, when the problem can be pinned to one field.
    pub column: Option<String>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.column {
            Some(column) => write!(f, "line {}, column `{}`: {}", self.line, column, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

/// Every issue found in one file, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn push(&mut self, line: usize, column: Option<&str>, message: impl Into<String>) {
        self.issues.push(Issue {
            line,
            column: column.map(str::to_owned),
            message: message.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    /// Converts into `Err(Error::Validation)` when any issue was recorded.
    pub fn into_result(self) -> Result<(), Error> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation issue(s)", self.issues.len())?;
        for issue in &self.issues {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent scenario or configuration (e.g. a country without a multiplier).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Validation(ValidationReport),

    #[error("unknown country `{0}`")]
    UnknownCountry(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("pollination-yield multiplier undefined: control group mean dry bean yield is zero")]
    UndefinedMultiplier,

    /// Compensation needs more than full adoption at the given multiplier.
    #[error(
        "compensation infeasible: adoption {required_adoption:.4} needed, \
         shortfall {shortfall_t:.2} t at full adoption"
    )]
    Infeasible {
        required_adoption: f64,
        shortfall_t: f64,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by invalid user input (as opposed to I/O failures).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Column name and message for a row that failed to deserialize.
pub(crate) fn describe_row_error(e: &csv::Error, headers: &csv::StringRecord) -> (Option<String>, String) {
    match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => {
            let column = err.field().and_then(|i| headers.get(i as usize)).map(str::to_owned);
            let message = match err.kind() {
                csv::DeserializeErrorKind::ParseFloat(inner) => format!("not a number ({inner})"),
                csv::DeserializeErrorKind::ParseInt(inner) => format!("not a count ({inner})"),
                _ => err.to_string(),
            };
            (column, message)
        }
        _ => (None, e.to_string()),
    }
}
