use thiserror::Error;

use crate::model::{EdgeId, VertexId};

/// Errors raised by instance construction, the solvers and the generators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("CycleDetected: directed cycle through vertex {vertex}")]
    CycleDetected { vertex: VertexId },
    #[error("DimensionMismatch: {what} has {found} entries, expected {expected}")]
    DimensionMismatch { what: String, expected: usize, found: usize },
    #[error("UnreachableTarget: target {target} is not reachable from source {from}")]
    UnreachableTarget { from: VertexId, target: VertexId },
    #[error("DanglingEdge: edge {edge} references vertex {vertex} outside 0..{vertex_count}")]
    DanglingEdge { edge: EdgeId, vertex: VertexId, vertex_count: usize },
    #[error("InvalidEndpoints: {0}")]
    InvalidEndpoints(String),
    #[error("InvalidWeight: edge {edge}: {reason}")]
    InvalidWeight { edge: EdgeId, reason: String },
    #[error("InvalidPath: {0}")]
    InvalidPath(String),
    #[error("NonAffineWeight: edge {edge} does not carry an affine weight")]
    NonAffineWeight { edge: EdgeId },
    #[error("NonPiecewiseWeight: edge {edge} carries a quadratic weight, which envelope operations reject")]
    NonPiecewiseWeight { edge: EdgeId },
    #[error("VectorInstance: operation requires a scalar (k = 1) instance")]
    VectorInstance,
    #[error("ShapeViolation: {0}")]
    ShapeViolation(String),
    #[error("NoFeasiblePath: no source-target path fits the time budget {budget}")]
    NoFeasiblePath { budget: usize },
    #[error("ZeroLiquidation: the liquidation vector is zero, every path is optimal")]
    ZeroLiquidation,
    #[error("TooManyPaths: more than {cap} source-target paths")]
    TooManyPaths { cap: usize },
    #[error("EmptySet: the element list is empty")]
    EmptySet,
    #[error("NonPositiveElement: element {value} is not positive")]
    NonPositiveElement { value: i64 },
    #[error("ZeroElement: element at index {index} is zero")]
    ZeroElement { index: usize },
    #[error("InvalidTable: {0}")]
    InvalidTable(String),
}

impl Error {
    /// The bare variant name, as reported by the command line tool.
    pub fn name(&self) -> &'static str {
        match self {
            Error::CycleDetected { .. } => "CycleDetected",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::UnreachableTarget { .. } => "UnreachableTarget",
            Error::DanglingEdge { .. } => "DanglingEdge",
            Error::InvalidEndpoints(_) => "InvalidEndpoints",
            Error::InvalidWeight { .. } => "InvalidWeight",
            Error::InvalidPath(_) => "InvalidPath",
            Error::NonAffineWeight { .. } => "NonAffineWeight",
            Error::NonPiecewiseWeight { .. } => "NonPiecewiseWeight",
            Error::VectorInstance => "VectorInstance",
            Error::ShapeViolation(_) => "ShapeViolation",
            Error::NoFeasiblePath { .. } => "NoFeasiblePath",
            Error::ZeroLiquidation => "ZeroLiquidation",
            Error::TooManyPaths { .. } => "TooManyPaths",
            Error::EmptySet => "EmptySet",
            Error::NonPositiveElement { .. } => "NonPositiveElement",
            Error::ZeroElement { .. } => "ZeroElement",
            Error::InvalidTable(_) => "InvalidTable",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
