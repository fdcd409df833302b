use std::fmt;

/// CLI failure classes, each with a fixed exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Clap(clap::Error),
    Io(String),
    Module(zeta_dqpt::Error),
}

impl CliError {
    /// 1 usage, 2 I/O or malformed input data, 3 module errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Clap(_) => 1,
            CliError::Io(_) => 2,
            CliError::Module(zeta_dqpt::Error::Parse { .. }) => 2,
            CliError::Module(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Clap(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "I/O error: {msg}"),
            CliError::Module(e) => write!(f, "error in stage {}: {e}", e.stage()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<zeta_dqpt::Error> for CliError {
    fn from(e: zeta_dqpt::Error) -> Self {
        CliError::Module(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
