use thiserror::Error;

use crate::rootsys::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid family/rank combination: {0}")]
    InvalidFamily(String),

    #[error("multiplicity problem: {0}")]
    Multiplicity(String),

    #[error("root system failed validation:\n{}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("simple roots are linearly dependent (singular Gram matrix)")]
    SingularGram,

    #[error("invalid cell: {0}")]
    InvalidCell(String),

    #[error("coordinate {index} is not strictly positive ({value})")]
    NonPositiveCoordinate { index: usize, value: f64 },

    #[error("point lies outside the closed chamber: <alpha_{}, H> = {pairing:e}", .simple_root + 1)]
    OutsideChamber { simple_root: usize, pairing: f64 },

    #[error("pairing <{what}, H> = {pairing:e} falls between the vanishing and active tolerances")]
    DeadBand { what: String, pairing: f64 },

    #[error("point is not a unit vector in the span of the simple roots: {0}")]
    BadPoint(String),

    #[error("grid oracle supports cells of dimension at most 2 (|cell| <= 3), got |cell| = {0}")]
    OracleTooLarge(usize),

    #[error("invalid product configuration: {0}")]
    Product(String),

    #[error("minimal solve failed on cell {cell}: {reason}")]
    SolveFailed { cell: String, reason: String },

    #[error("unknown catalog entry '{0}'")]
    UnknownEntry(String),

    #[error("invalid parameters for '{name}': {reason}")]
    InvalidParameters { name: String, reason: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("  - {x}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
