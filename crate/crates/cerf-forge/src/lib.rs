//! cerf-forge models one- and two-parameter families of functions on closed
//! oriented surfaces at the homology level: cut systems and handle slides,
//! sliced functions and their Reeb graphs, switch neighborhoods, interval and
//! polygon classification, and the bookkeeping that turns assembled families
//! into four-manifold invariants.
//!
//! The crate is exact end to end: integer lattices, rational heights, and
//! rational pivoting for signatures. Nothing floats.

// Row/column indices carry meaning in the matrix kernels, and most loops
// index several arrays in lockstep; iterator rewrites would obscure them.
#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod doc;
pub mod family_one;
pub mod family_two;
pub mod invariants;
pub mod linalg;
pub mod morse;
pub mod render;
pub mod ribbon;
pub mod surface;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One failed check, with a stable machine-readable code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub code: String,
    pub detail: String,
}

/// Outcome of a report-style validation: invalid inputs are described, not
/// rejected with an error.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub failures: Vec<Failure>,
}

impl ValidationReport {
    pub fn new() -> Self {
        ValidationReport { failures: Vec::new() }
    }

    pub fn push(&mut self, code: &str, detail: impl Into<String>) {
        self.failures.push(Failure { code: code.to_string(), detail: detail.into() });
    }

    pub fn valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        self.failures
            .iter()
            .map(|f| format!("{}: {}", f.code, f.detail))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("class has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("genus {got} does not match expected genus {expected}")]
    GenusMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("slide requires two distinct curve indices")]
    SlideSameIndex,
    #[error("invalid cut system ({context}): {}", report.summary())]
    InvalidCutSystem { context: &'static str, report: ValidationReport },
    #[error("classes span distinct sublattices")]
    SpanMismatch,
    #[error("replaced class does not lie in the span of the cut system")]
    ClassNotInSpan,
    #[error("surgery pairing is {value}, expected +1 or -1")]
    PairingNotUnit { value: i64 },
    #[error("classes do not span a Lagrangian sublattice: {detail}")]
    NotLagrangian { detail: String },
    #[error("invalid sliced function: {detail}")]
    InvalidFunction { detail: String },
    #[error("invalid switch neighborhood: {detail}")]
    InvalidRibbon { code: &'static str, detail: String },
    #[error("invalid elementary interval: {detail}")]
    InvalidInterval { detail: String },
    #[error("invalid family graphic: {detail}")]
    InvalidGraphic { detail: String },
    #[error("operation requires a non-cyclic graphic")]
    CyclicGraphic,
    #[error("invalid polygon: {detail}")]
    InvalidPolygon { detail: String },
    #[error("boundary carries {count} type-1 edges, which no elementary polygon realizes")]
    AnomalousTypeCount { count: usize },
    #[error("invalid gluing: {detail}")]
    InvalidGluing { detail: String },
    #[error("unglued edges do not form a single cycle: {detail}")]
    BoundaryNotSingleCycle { detail: String },
    #[error("invalid trisection diagram: {detail}")]
    InvalidTrisection { detail: String },
    #[error("pair of cut systems is not in standard position: {detail}")]
    NotStandardPair { detail: String },
    #[error("basis map does not cover every cycle and handle exactly once: {detail}")]
    IncompleteBasisMap { detail: String },
    #[error("level-circle selection is invalid: {detail}")]
    InvalidSelection { detail: String },
    #[error("malformed event: {detail}")]
    MalformedEvent { detail: String },
    #[error("{message}")]
    Document { code: String, message: String },
}

impl Error {
    /// Stable machine-readable code for CLI reports.
    pub fn code(&self) -> &str {
        match self {
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::GenusMismatch { .. } => "GENUS_MISMATCH",
            Error::IndexOutOfRange { .. } => "INDEX_OUT_OF_RANGE",
            Error::SlideSameIndex => "SLIDE_SAME_INDEX",
            Error::InvalidCutSystem { .. } => "INVALID_CUT_SYSTEM",
            Error::SpanMismatch => "SPAN_MISMATCH",
            Error::ClassNotInSpan => "CLASS_NOT_IN_SPAN",
            Error::PairingNotUnit { .. } => "PAIRING_NOT_UNIT",
            Error::NotLagrangian { .. } => "NOT_LAGRANGIAN",
            Error::InvalidFunction { .. } => "INVALID_FUNCTION",
            Error::InvalidRibbon { code, .. } => code,
            Error::InvalidInterval { .. } => "INVALID_INTERVAL",
            Error::InvalidGraphic { .. } => "INVALID_GRAPHIC",
            Error::CyclicGraphic => "CYCLIC_GRAPHIC",
            Error::InvalidPolygon { .. } => "INVALID_POLYGON",
            Error::AnomalousTypeCount { .. } => "ANOMALOUS_TYPE1_COUNT",
            Error::InvalidGluing { .. } => "INVALID_GLUING",
            Error::BoundaryNotSingleCycle { .. } => "BOUNDARY_NOT_SINGLE_CYCLE",
            Error::InvalidTrisection { .. } => "INVALID_TRISECTION",
            Error::NotStandardPair { .. } => "NOT_STANDARD_PAIR",
            Error::IncompleteBasisMap { .. } => "INCOMPLETE_BASIS_MAP",
            Error::InvalidSelection { .. } => "INVALID_SELECTION",
            Error::MalformedEvent { .. } => "MALFORMED_EVENT",
            Error::Document { code, .. } => code,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Thread budget for internal parallelism. `CERF_FORGE_THREADS` caps it;
/// 0 or unset selects the machine default.
pub(crate) fn configured_threads() -> usize {
    let requested = std::env::var("CERF_FORGE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    if requested > 0 {
        requested
    } else {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8)
    }
}
