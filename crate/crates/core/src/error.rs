use thiserror::Error;

use crate::instance::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error{}: {message}", location(*.line, .field.as_deref()))]
    Parse {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },

    #[error("invalid instance: {}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error("could not generate a mixed-feasibility instance after {attempts} attempts")]
    GenerationFailed { attempts: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative data: {0}")]
    NegativeData(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("repair failed: no feasible scenario exists for this instance")]
    RepairFailed,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("instance has no feasible scenario")]
    NoFeasibleScenario,

    #[error("instance too large for exact enumeration: m+n = {size} exceeds cap {cap}")]
    InstanceTooLarge { size: usize, cap: usize },

    #[error("grid oracle budget exceeded: {points} scenarios > budget {budget}")]
    BudgetExceeded { points: u128, budget: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(message: impl Into<String>) -> Self {
        Error::Parse {
            line: None,
            field: None,
            message: message.into(),
        }
    }

    /// True for errors caused by the input data rather than by a bug or I/O.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

fn location(line: Option<usize>, field: Option<&str>) -> String {
    match (line, field) {
        (Some(l), Some(f)) => format!(" (line {l}, field `{f}`)"),
        (Some(l), None) => format!(" (line {l})"),
        (None, Some(f)) => format!(" (field `{f}`)"),
        (None, None) => String::new(),
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
