use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GseError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("odd defect set of size {0}; only even sets can be fixed")]
    OddDefectSet(usize),
    #[error("operator {0} is not a stabilizer of this encoding")]
    NotAStabilizer(String),
    #[error("error support outside the data qubits: qubit {0}")]
    OutsideData(usize),
    #[error("unsupported gadget: {0}")]
    Unsupported(String),
    #[error("no fault-detecting evolution plan found for {0}")]
    NoPlan(String),
    #[error("parameter count mismatch: expected {expected}, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("no root in bracket: {0}")]
    NoRoot(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
