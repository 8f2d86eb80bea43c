use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Convergence(String),

    #[error("{0}")]
    Verification(String),

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] polaritonic::Error),
}

impl CliError {
    /// 0 success, 1 I/O, 2 configuration, 3 convergence, 4 verification.
    pub fn exit_code(&self) -> i32 {
        use polaritonic::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                E::InvalidInput(_) | E::DimensionMismatch { .. } | E::NotHermitian { .. } | E::MissingGauge(_) => 2,
                E::Convergence(_) | E::Diabatization(_) => 3,
                E::Io(_) | E::Json(_) | E::Cache(_) => 1,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            1 => "io",
            2 => "config",
            3 => "convergence",
            _ => "verification",
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() }).to_string()
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
