//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network file: {0}")]
    Json(#[from] serde_json::Error),

    #[error("edge {edge} is a self-loop at vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },

    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: usize, dst: usize },

    #[error(
        "edge {edge} references vertex {vertex}, but the network has only {vertex_count} complexes"
    )]
    EdgeOutOfRange {
        edge: usize,
        vertex: usize,
        vertex_count: usize,
    },

    #[error("complex {index} has {found} coordinates, expected {expected} (one per species)")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },

    #[error("complexes {first} and {second} have identical coordinates")]
    DuplicateComplex { first: usize, second: usize },

    #[error("complex {index} has a non-finite coordinate")]
    NonFiniteCoordinate { index: usize },

    #[error("duplicate species name `{name}`")]
    DuplicateSpecies { name: String },

    #[error("rate vector has {found} entries, network has {expected} edges")]
    RateCountMismatch { found: usize, expected: usize },

    #[error("entry {index} of a rate vector is {value}, rates must be strictly positive")]
    NonPositiveRate { index: usize, value: f64 },

    #[error(
        "entry {index} of a state vector is {value}, states must be strictly positive and finite"
    )]
    NonPositiveState { index: usize, value: f64 },

    #[error("entry {index} of a flux vector is {value}, fluxes must be strictly positive")]
    NonPositiveFlux { index: usize, value: f64 },

    #[error(
        "flux vector is not complex balanced: vertex {vertex} has relative imbalance {gap:.3e}"
    )]
    UnbalancedFlux { vertex: usize, gap: f64 },

    #[error("flux vector has {found} entries, network has {expected} edges")]
    FluxCountMismatch { found: usize, expected: usize },

    #[error("affine transform must be a square {expected}x{expected} matrix, got {rows}x{cols}")]
    TransformShape {
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("affine transform matrix is singular or badly conditioned")]
    SingularTransform,

    #[error("affine transform maps complexes {first} and {second} to the same point")]
    ComplexCollision { first: usize, second: usize },

    #[error("network is not weakly reversible")]
    NotWeaklyReversible,

    #[error("linkage class of vertex {vertex} is not strongly connected")]
    NotStronglyConnected { vertex: usize },

    #[error("linkage class of vertex {vertex} has {size} vertices, tree enumeration is limited to {limit}")]
    ClassTooLarge {
        vertex: usize,
        size: usize,
        limit: usize,
    },

    #[error("vertex {vertex} cannot reach root {root} inside its linkage class")]
    UnreachableRoot { vertex: usize, root: usize },

    #[error("rate vector is not in the toric locus (membership residual {residual:.3e})")]
    NotInToricLocus { residual: f64 },

    #[error(
        "projection did not converge after {iterations} iterations (last residual {residual:.3e})"
    )]
    ProjectionDidNotConverge { iterations: usize, residual: f64 },

    #[error(
        "integration step underflow at t = {t}: state would leave the positive orthant, reduce dt"
    )]
    StepUnderflow { t: f64 },

    #[error("invalid simulation parameters: {0}")]
    InvalidSimulation(String),

    #[error("operations require the same network on both sides")]
    NetworkMismatch,

    #[error("path requires at least 2 steps, got {0}")]
    TooFewSteps(usize),

    #[error("flux cone dimension mismatch: formula gives {expected}, numeric kernel has {found}")]
    FluxConeRankMismatch { expected: usize, found: usize },
}
