use std::fmt;

/// What went wrong, bucketed by process exit code.
///
/// The buckets mirror the documented exit codes: 2 when the request itself is
/// malformed (unknown flags or config keys, contradictory flag combinations,
/// unparseable grid expressions), 3 when an input file is missing or does not
/// parse, and 4 when a parameter lands outside one of the library's numeric
/// contracts (a transmissivity of 1.5, a query past the measured curve, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad request; exit code 2.
    Usage(String),
    /// Broken or missing input data; exit code 3.
    Data(String),
    /// Out-of-domain numerics; exit code 4.
    Numeric(String),
}

impl CliError {
    /// Shorthand constructor for the usage bucket.
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    /// Shorthand constructor for the data bucket.
    pub fn data(message: impl Into<String>) -> Self {
        CliError::Data(message.into())
    }

    /// A value outside its mathematical domain; exit code 4.
    pub fn numeric(message: impl Into<String>) -> Self {
        CliError::Numeric(message.into())
    }

    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) | CliError::Numeric(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<qread_core::error::Error> for CliError {
    fn from(err: qread_core::error::Error) -> Self {
        CliError::Numeric(err.to_string())
    }
}
