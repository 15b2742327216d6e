//! CLI error taxonomy and the mapping onto process exit codes.

use morlicz::ErrorKind;

/// Everything that can go wrong between argument parsing and emission.
#[derive(Debug)]
pub enum CliError {
    /// Flags or command structure make no sense (exit 2).
    Usage(String),
    /// An input file could not be read or parsed (exit 3). The message
    /// carries the path and, for JSON, the line/column position.
    Parse { path: String, message: String },
    /// A config or input value failed validation (exit 3). `field` is the
    /// dotted path of the offending field.
    Validation { field: String, message: String },
    /// A library computation failed (exit 3 for validation/range kinds,
    /// 4 otherwise), tagged with the library's error kind.
    Compute(morlicz::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn validation(field: impl Into<String>, msg: impl Into<String>) -> Self {
        CliError::Validation { field: field.into(), message: msg.into() }
    }

    /// Short machine tag for the structured error object.
    pub fn kind_tag(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } => "validation",
            CliError::Compute(e) => match e.kind() {
                ErrorKind::Domain => "domain",
                ErrorKind::Range => "range",
                ErrorKind::Validation => "validation",
                ErrorKind::Precondition => "precondition",
                ErrorKind::Truncation => "truncation",
                ErrorKind::Divergence => "divergence",
                ErrorKind::Degeneracy => "degeneracy",
                ErrorKind::Postcondition => "postcondition",
            },
        }
    }

    /// Exit code: 2 usage, 3 validation, 4 computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse { .. } | CliError::Validation { .. } => 3,
            CliError::Compute(e) => match e.kind() {
                ErrorKind::Validation | ErrorKind::Range => 3,
                _ => 4,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Parse { path, message } => write!(f, "{path}: {message}"),
            CliError::Validation { field, message } => write!(f, "{field}: {message}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<morlicz::Error> for CliError {
    fn from(e: morlicz::Error) -> Self {
        CliError::Compute(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_documented_mapping() {
        assert_eq!(CliError::usage("x").exit_code(), 2);
        assert_eq!(CliError::validation("family.p", "bad").exit_code(), 3);
        assert_eq!(
            CliError::Parse { path: "a.json".into(), message: "eof".into() }.exit_code(),
            3
        );
        assert_eq!(
            CliError::Compute(morlicz::Error::Validation("v".into())).exit_code(),
            3
        );
        assert_eq!(CliError::Compute(morlicz::Error::Range("r".into())).exit_code(), 3);
        assert_eq!(CliError::Compute(morlicz::Error::Domain("d".into())).exit_code(), 4);
        assert_eq!(
            CliError::Compute(morlicz::Error::Truncation { msg: "t".into(), partial: 0.0 })
                .exit_code(),
            4
        );
        assert_eq!(CliError::Compute(morlicz::Error::Divergence("d".into())).exit_code(), 4);
    }

    #[test]
    fn kind_tags_match_the_underlying_error() {
        assert_eq!(CliError::usage("x").kind_tag(), "usage");
        assert_eq!(CliError::Compute(morlicz::Error::Domain("d".into())).kind_tag(), "domain");
        assert_eq!(
            CliError::Compute(morlicz::Error::Precondition("p".into())).kind_tag(),
            "precondition"
        );
    }

    #[test]
    fn display_includes_the_field_path() {
        let e = CliError::validation("matrix.weights", "must be nonempty");
        assert_eq!(e.to_string(), "matrix.weights: must be nonempty");
    }
}
