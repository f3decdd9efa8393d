use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GspError {
    #[error("matrix is not skew-symmetrizable: {reason}")]
    NotSkewSymmetrizable { reason: String, i: usize, j: usize },
    #[error("index {index} out of range for {size} vertices")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("bimodule endpoints do not match: {0}")]
    VertexMismatch(String),
    #[error("bimodule {from}->{to} is not locally free")]
    NotLocallyFree { from: String, to: String },
    #[error("symmetrizer does not match the matrix at ({i},{j})")]
    SymmetrizerMismatch { i: usize, j: usize },
    #[error("polynomial has a negative coefficient")]
    NotSubtractionFree,
    #[error("mutation produced a non-polynomial F at vertex {vertex}")]
    NonPolynomialResult { vertex: usize },
    #[error("species is not 2-acyclic at {vertex}: path {path:?}")]
    NotTwoAcyclicAtK { vertex: String, path: Vec<String> },
    #[error("mutation undefined after prefix {prefix:?}: {reason}")]
    MutationUndefined { prefix: Vec<String>, reason: String },
    #[error("mutated species is not 2-acyclic: {witness}")]
    MutationNotTwoAcyclic { witness: String },
    #[error("not a GSP: {0}")]
    NotAGsp(String),
    #[error("relation violated: {0}")]
    RelationViolation(String),
    #[error("unsupported Euler characteristic regime: {0}")]
    UnsupportedRegime(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl GspError {
    pub fn code(&self) -> &'static str {
        match self {
            GspError::NotSkewSymmetrizable { .. } => "NotSkewSymmetrizable",
            GspError::IndexOutOfRange { .. } => "IndexOutOfRange",
            GspError::VertexMismatch(_) => "VertexMismatch",
            GspError::NotLocallyFree { .. } => "NotLocallyFree",
            GspError::SymmetrizerMismatch { .. } => "SymmetrizerMismatch",
            GspError::NotSubtractionFree => "NotSubtractionFree",
            GspError::NonPolynomialResult { .. } => "NonPolynomialResult",
            GspError::NotTwoAcyclicAtK { .. } => "NotTwoAcyclicAtK",
            GspError::MutationUndefined { .. } => "MutationUndefined",
            GspError::MutationNotTwoAcyclic { .. } => "MutationNotTwoAcyclic",
            GspError::NotAGsp(_) => "NotAGSP",
            GspError::RelationViolation(_) => "RelationViolation",
            GspError::UnsupportedRegime(_) => "UnsupportedRegime",
            GspError::Invalid(_) => "InvalidInput",
        }
    }

    pub fn witness(&self) -> Value {
        match self {
            GspError::NotSkewSymmetrizable { reason, i, j } => json!({"reason": reason, "i": i, "j": j}),
            GspError::IndexOutOfRange { index, size } => json!({"index": index, "size": size}),
            GspError::NotLocallyFree { from, to } => json!({"from": from, "to": to}),
            GspError::SymmetrizerMismatch { i, j } => json!({"i": i, "j": j}),
            GspError::NonPolynomialResult { vertex } => json!({"vertex": vertex}),
            GspError::NotTwoAcyclicAtK { vertex, path } => json!({"vertex": vertex, "path": path}),
            GspError::MutationUndefined { prefix, reason } => json!({"prefix": prefix, "reason": reason}),
            GspError::MutationNotTwoAcyclic { witness } => json!({"detail": witness}),
            other => json!({"detail": other.to_string()}),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": self.code(), "witness": self.witness()})
    }
}

pub type Result<T> = std::result::Result<T, GspError>;
