//! Exit-code classification: 2 for usage/config/input errors, 3 for
//! numerical failures (non-convergence, gap collapse, missing crossing).

use ccinterp_core::interp::InterpError;
use ccinterp_core::scf::ScfError;

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or unreadable/invalid input files -> exit 2.
    Usage(anyhow::Error),
    /// The computation itself failed -> exit 3.
    Numerical(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> String {
        let (prefix, e) = match self {
            CliError::Usage(e) => ("error", e),
            CliError::Numerical(e) => ("numerical failure", e),
        };
        let mut msg = format!("{prefix}: {e}");
        for cause in e.chain().skip(1) {
            msg.push_str(&format!("\n  caused by: {cause}"));
        }
        msg
    }
}

pub fn usage(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Usage(e.into())
}

pub fn numerical(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Numerical(e.into())
}

/// Library pipeline errors split by their nature: parse/shape problems are
/// usage errors, solver failures are numerical.
pub fn classify_interp(e: InterpError) -> CliError {
    match &e {
        InterpError::Geometry(_) | InterpError::Basis(_) => usage(e),
        InterpError::Scf(ScfError::BadElectronCount { .. }) => usage(e),
        _ => numerical(e),
    }
}

pub type CliResult<T> = Result<T, CliError>;
