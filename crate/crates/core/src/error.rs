use thiserror::Error;

use crate::complex::VertexId;

/// Errors raised by every stage of the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty simplex in input (maximal simplex #{index})")]
    EmptySimplex { index: usize },

    #[error("vertex {0} is not part of the complex or graph")]
    UnknownVertex(VertexId),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex map is not total: source vertex {0} has no image")]
    PartialVertexMap(VertexId),

    #[error("vertex map sends {from} to {to}, which is not a target vertex")]
    ImageOutsideTarget { from: VertexId, to: VertexId },

    #[error("simplicial maps do not share source and target complexes")]
    MismatchedMaps,

    #[error("map is not simplicial: image of {simplex:?} is {image:?}, not a simplex of the target")]
    NotSimplicial { simplex: Vec<VertexId>, image: Vec<VertexId> },

    #[error("function is undefined at vertex {0}")]
    MissingValue(VertexId),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("unknown point id {0}")]
    UnknownPoint(u32),

    #[error("invalid cover element: {0}")]
    InvalidElement(String),

    #[error("cover does not cover its codomain; uncovered witness {0}")]
    NotACover(String),

    #[error("invalid tower: {0}")]
    InvalidTower(String),

    #[error("sample is not a {nu}-sample of the codomain; offending point {witness}")]
    NotASample { nu: f64, witness: String },

    #[error("net parameter rho must be at least 11, got {0}")]
    RhoTooSmall(f64),

    #[error("scale {0} is not positive; cannot reindex by log")]
    NonPositiveScale(f64),

    #[error("truncation point {eps0} outside the tower range [{res}, {top}]")]
    TruncationOutOfRange { eps0: f64, res: f64, top: f64 },

    #[error("towers have different codomains")]
    CodomainMismatch,

    #[error("towers have different resolutions ({0} vs {1}); truncate first")]
    ResolutionMismatch(f64, f64),

    #[error("probe set is empty")]
    EmptyProbeSet,

    #[error("{0} requires a real-valued function and an interval cover")]
    NeedsRealFunction(&'static str),

    #[error("pullback element {element} has no containing element under the cover map (witness {witness})")]
    NoContainingElement { element: usize, witness: String },

    #[error("tower carries no (c, s) goodness certificate")]
    MissingCertificate,

    #[error("{0}")]
    Precondition(String),

    #[error("{0} is not a supported prime")]
    NotPrime(u32),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
