use thiserror::Error;

use crate::pauli::PauliOperator;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator length mismatch: {0} vs {1} qubits")]
    LengthMismatch(usize, usize),

    #[error("malformed Pauli string: {0}")]
    MalformedPauli(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("generators {0} and {1} anticommute")]
    AnticommutingGenerators(usize, usize),

    #[error("code file validation failed: {0}")]
    Validation(String),

    #[error("operator is not in the stabilizer group{}", if *.up_to_sign { " (in span up to sign)" } else { "" })]
    NotInGroup { up_to_sign: bool },

    #[error("code has no logical operators")]
    NoLogicals,

    #[error("region is not correctable; it supports logical {witness}")]
    NotCorrectable { witness: PauliOperator },

    #[error("no stabilizer deformation avoids the forbidden region")]
    DeformationInfeasible,

    #[error("construction failed at step '{step}': {reason}")]
    Construction { step: String, reason: String },

    #[error("infeasible construction: {0}")]
    Feasibility(String),

    #[error("internal contradiction: {0}")]
    Internal(String),

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("unsupported gate '{0}': only Clifford gates can be conjugated exactly; use the dense oracle")]
    UnsupportedGate(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("certificate failure: {0}")]
    Certificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
