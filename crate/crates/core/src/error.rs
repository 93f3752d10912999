use thiserror::Error;

use crate::descriptor::ValidityReport;

/// Errors shared by every module of the crate.
///
/// Validity *violations* of a descriptor are data (see [`ValidityReport`]);
/// an `Error` is raised only when an operation is asked to run on input it
/// cannot accept.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(ValidityReport),

    #[error("m_s = u_s is not computable for `{descriptor}`")]
    NotMsUsComputable { descriptor: String },

    #[error("operation requires the function-field hypothesis, but the base `{base}` does not carry it")]
    HypothesisRequired { base: String },

    #[error("operation requires a semi-global descriptor, got `{got}`")]
    NotSemiGlobal { got: String },

    #[error("{p} is not an odd prime")]
    InvalidPrime { p: u64 },

    #[error("tower has {r} Laurent layers; at most {max} are supported")]
    TowerTooDeep { r: u32, max: u32 },

    #[error("enumeration over {r} Laurent layers exceeds the configured cap of {cap}")]
    EnumerationCapExceeded { r: u32, cap: u32 },

    #[error("search budget exceeded: {what}")]
    BudgetExceeded { what: String },

    #[error("the zero element has no square class")]
    ZeroElement,

    #[error("quadratic form must have at least {needed} entries, got {got}")]
    DimensionTooSmall { needed: usize, got: usize },

    #[error("variable t{index} does not exist in a tower with {r} layers")]
    VariableOutOfRange { index: u32, r: u32 },

    #[error("layer index {j} is out of range 1..={n}")]
    LayerOutOfRange { j: u32, n: u32 },

    #[error("graph is not connected")]
    DisconnectedGraph,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}, column {col}: {message}")]
    Parse { line: u32, col: u32, message: String },

    #[error("oracle contradiction on form {form}: {detail}")]
    Contradiction { form: String, detail: String },
}

impl Error {
    pub(crate) fn parse(line: u32, col: u32, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            message: message.into(),
        }
    }
}
