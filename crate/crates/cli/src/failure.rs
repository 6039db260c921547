use std::fmt;

use squeeze_core::gradedlc::GradedError;
use squeeze_core::{ModuleError, SqueezeError};

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

/// An error carrying the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }

    pub fn failed(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_FAILED,
            message: message.into(),
        }
    }

    pub fn budget(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_BUDGET,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn module_is_budget(e: &ModuleError) -> bool {
    matches!(
        e,
        ModuleError::SplitBudget { .. }
            | ModuleError::CoverBudget { .. }
            | ModuleError::IdempotentBudget
    )
}

impl From<ModuleError> for Failure {
    fn from(e: ModuleError) -> Self {
        if module_is_budget(&e) {
            Failure::budget(e.to_string())
        } else {
            Failure::failed(e.to_string())
        }
    }
}

impl From<SqueezeError> for Failure {
    fn from(e: SqueezeError) -> Self {
        match &e {
            SqueezeError::Module(m) if module_is_budget(m) => Failure::budget(e.to_string()),
            SqueezeError::InsufficientLength { .. } => Failure::budget(e.to_string()),
            SqueezeError::NoSpliceIso(_) => Failure::budget(e.to_string()),
            SqueezeError::BadWindow(_) => Failure::parse(e.to_string()),
            _ => Failure::failed(e.to_string()),
        }
    }
}

impl From<GradedError> for Failure {
    fn from(e: GradedError) -> Self {
        match &e {
            GradedError::NoStabilization { .. } | GradedError::WindowTooSmall { .. } => {
                Failure::budget(e.to_string())
            }
            _ => Failure::failed(e.to_string()),
        }
    }
}
