use std::process::ExitCode;

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or flags: exit 2.
    Config(String),
    /// Unreadable or malformed input data: exit 3.
    Data(String),
    /// Integration or equilibrium failure: exit 4.
    Numerical(String),
    /// Anything else, such as an unwritable output directory: exit 1.
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Other(_) => 1,
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        })
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Other(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<sitsim::Error> for CliError {
    fn from(e: sitsim::Error) -> Self {
        use sitsim::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidInput(_) => CliError::Config(msg),
            E::EmptySeries | E::NonContiguous { .. } | E::Data { .. } | E::MissingColumn(_) | E::Csv(_) => {
                CliError::Data(msg)
            }
            E::Numerical { .. } | E::NoLowerEquilibrium(_) => CliError::Numerical(msg),
            E::Io(_) => CliError::Other(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_classes() {
        let code = |e: sitsim::Error| CliError::from(e).exit_code();
        assert_eq!(code(sitsim::Error::InvalidInput("x".into())), ExitCode::from(2));
        assert_eq!(code(sitsim::Error::MissingColumn("temp_c".into())), ExitCode::from(3));
        assert_eq!(
            code(sitsim::Error::Numerical {
                time: 3.05,
                message: "blow-up".into()
            }),
            ExitCode::from(4)
        );
        let msg = CliError::from(sitsim::Error::Numerical {
            time: 3.05,
            message: "blow-up".into(),
        })
        .to_string();
        assert!(msg.contains("t = 3.0500"));
    }
}
