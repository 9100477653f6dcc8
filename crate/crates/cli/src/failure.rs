use thiserror::Error;

use curveflow::Error;

/// Outcome classes, one per exit code.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Convexity(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Convexity(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::NotConvex | Error::NotConvexAfterGluing { .. } => Failure::Convexity(msg),
            Error::BlowUp { .. }
            | Error::ToleranceNotMet(_)
            | Error::StepTooLarge { .. }
            | Error::CurveCollapsed { .. }
            | Error::TooFewSamples { .. }
            | Error::IsoperimetricViolation { .. } => Failure::Numerical(msg),
            _ => Failure::Input(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Successful runs either confirm or refute what was asked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Holds => 0,
            Verdict::Fails => 3,
        }
    }
}
