//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by geometry, mapping, schedule, engine, and oracle
/// operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate in {context}")]
    NonFinite { context: &'static str },

    #[error("a finite point set must contain at least one point")]
    EmptyPointSet,

    #[error("ball radius must be finite and nonnegative, got {radius}")]
    InvalidRadius { radius: f64 },

    #[error("box bounds must satisfy lower <= upper in every coordinate (failed at {coord})")]
    InvalidBox { coord: usize },

    #[error("vertex enumeration refused for dimension {dim} > {max}; use hausdorff_sampled")]
    VertexEnumerationTooLarge { dim: usize, max: usize },

    #[error("weights must sum to 1 (got {sum}, off by more than {tol})")]
    WeightSum { sum: f64, tol: f64 },

    #[error("negative weight {weight} at position {index}")]
    NegativeWeight { weight: f64, index: usize },

    #[error("weights and points must have equal length ({weights} weights, {points} points)")]
    WeightCount { weights: usize, points: usize },

    #[error("point lies outside the domain of map `{label}` (distance {dist:.3e})")]
    OutsideDomain { label: String, dist: f64 },

    #[error("grid must contain at least {min} points, got {got}")]
    GridTooSmall { min: usize, got: usize },

    #[error("the set of known fixed points is empty")]
    EmptyFixedPoints,

    #[error("gauge violates its contract: {what}")]
    InvalidGauge { what: String },

    #[error("unknown catalog label `{label}`")]
    UnknownCatalogLabel { label: String },

    #[error("bad catalog parameters for `{label}`: {what}")]
    BadCatalogParams { label: String, what: String },

    #[error("schedule index must be >= 1")]
    ZeroScheduleIndex,

    #[error("coefficient sequence infeasible at n={n}: {what}")]
    InfeasibleCoefficients { n: u64, what: String },

    #[error("schedule violates a hypothesis at n={n}: {what}")]
    ScheduleViolation { n: u64, what: String },

    #[error("sequence `{name}` fails the summability proxy: tail sum {tail:.3e} > {threshold:.3e}")]
    NotSummable { name: String, tail: f64, threshold: f64 },

    #[error("selection `{which}` lies outside its image set (distance {dist:.3e} > {tol:.1e}) at n={n}")]
    SelectionOutsideImage { which: &'static str, dist: f64, tol: f64, n: u64 },

    #[error("iterate `{which}` left the domain (distance {dist:.3e} > {tol:.1e}) at n={n}")]
    IterateLeftDomain { which: &'static str, dist: f64, tol: f64, n: u64 },

    #[error("non-finite iterate at n={n}")]
    NonFiniteIterate { n: u64 },

    #[error("initial point x1 lies outside the domain (distance {dist:.3e})")]
    InitialPointOutsideDomain { dist: f64 },

    #[error("trace must contain at least {min} records, got {got}")]
    TraceTooShort { min: usize, got: usize },

    #[error("mode A requires T_i(p) = {{p}} on the fixed-point set; problem `{label}` does not guarantee it")]
    NonSingletonFixedPointImages { label: String },

    #[error("horizon must be >= {min}, got {got}")]
    HorizonTooSmall { min: u64, got: u64 },

    #[error("{what}")]
    Invalid { what: String },
}

pub type Result<T> = std::result::Result<T, Error>;
