//! Error taxonomy shared across the crate.
//!
//! Variants are grouped by how the command-line front end maps them to exit
//! codes: configuration/domain/parse/series problems are caller errors (exit
//! code 3), infeasible or non-monotone calibration is a solver diagnostic
//! (exit code 4), and I/O failures are environmental (exit code 1).

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid simulation configuration (bad parameter ranges or combinations).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Argument outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or invalid tabular input, located by row and column.
    /// Rows are 1-based physical line numbers of the input (leading comment
    /// lines included), so in a comment-free file the header is row 1.
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    /// A cumulative-employment series violating its structural invariants.
    #[error("invalid series: {0}")]
    Series(String),

    /// Calibration target outside the achievable range of the simulator.
    #[error("calibration infeasible: {0}")]
    Infeasible(String),

    /// Monte Carlo estimates contradicted the monotonicity premise beyond
    /// the noise band; the search cannot trust its bracket.
    #[error("calibration diagnostic: {0}")]
    NonMonotone(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV-level read/write failure not attributable to a specific cell.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// JSON serialization/deserialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    ///
    /// 0 is success (never an `Error`), 2 is reserved for usage errors
    /// raised by argument parsing before the library runs.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Domain(_)
            | Error::Parse { .. }
            | Error::Series(_)
            | Error::Csv(_)
            | Error::Json(_) => 3,
            Error::Infeasible(_) | Error::NonMonotone(_) => 4,
            Error::Io(_) => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_group_by_failure_class() {
        assert_eq!(Error::Config("x".into()).exit_code(), 3);
        assert_eq!(Error::Domain("x".into()).exit_code(), 3);
        assert_eq!(
            Error::Parse {
                row: 2,
                column: "alpha0".into(),
                message: "x".into()
            }
            .exit_code(),
            3
        );
        assert_eq!(Error::Series("x".into()).exit_code(), 3);
        assert_eq!(Error::Infeasible("x".into()).exit_code(), 4);
        assert_eq!(Error::NonMonotone("x".into()).exit_code(), 4);
        assert_eq!(
            Error::Io(std::io::Error::other("x")).exit_code(),
            1
        );
    }

    #[test]
    fn parse_error_message_names_row_and_column() {
        let err = Error::Parse {
            row: 3,
            column: "cum_emp_1".into(),
            message: "cumulative rate decreased".into(),
        };
        let text = err.to_string();
        assert!(text.contains("row 3"));
        assert!(text.contains("cum_emp_1"));
    }
}
