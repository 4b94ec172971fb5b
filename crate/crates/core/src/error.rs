//! Error taxonomy shared by the whole crate.
//!
//! Three families matter to callers:
//!
//! * [`Error::Input`] - malformed data: parse failures, mismatched spaces,
//!   inhomogeneous elements, out-of-range parameters.  CLI exit code 3.
//! * [`Error::Hypothesis`] - a solver hit a genuinely unsolvable linear
//!   problem, i.e. one of the cohomological or spectral-page hypotheses fails
//!   on the given instance.  The variant records where.  CLI exit code 2.
//! * [`Error::Audit`] - an internally constructed witness failed its own
//!   re-verification.  This indicates a bug, never bad user data.  CLI exit
//!   code 4.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Identifies the linear problem a solver failed on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveSite {
    /// Short stable name of the calling step, e.g. `"gauge.ladder"`,
    /// `"lifting"`, `"surjectivity.shallow"`.
    pub step: String,
    /// Filtration column or induction stage the step was working at.
    pub p: i64,
    /// Cohomological degree of the unknown.
    pub degree: i64,
    /// Human-readable statement of the vanishing condition that would have
    /// guaranteed solvability, e.g. `"H^0(F_2/F_4) = 0"`.
    pub condition: String,
}

impl std::fmt::Display for SolveSite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} at p={}, degree {}: requires {}",
            self.step, self.p, self.degree, self.condition
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("hypothesis violation: {site}")]
    Hypothesis {
        site: SolveSite,
        /// Partial trace records accumulated before the failure, for
        /// debugging; empty when the failure happened before any step ran.
        partial_trace: Vec<String>,
    },

    #[error("internal audit failure in {step}: {detail}")]
    Audit { step: String, detail: String },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn audit(step: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Audit {
            step: step.into(),
            detail: detail.into(),
        }
    }

    pub fn hypothesis(
        step: impl Into<String>,
        p: i64,
        degree: i64,
        condition: impl Into<String>,
    ) -> Self {
        Error::Hypothesis {
            site: SolveSite {
                step: step.into(),
                p,
                degree,
                condition: condition.into(),
            },
            partial_trace: Vec::new(),
        }
    }

    /// Attach partial trace lines to a hypothesis violation (no-op for the
    /// other variants, which carry their own context).
    pub fn with_partial_trace(mut self, lines: Vec<String>) -> Self {
        if let Error::Hypothesis { partial_trace, .. } = &mut self {
            *partial_trace = lines;
        }
        self
    }

    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 3,
            Error::Hypothesis { .. } => 2,
            Error::Audit { .. } => 4,
        }
    }
}
