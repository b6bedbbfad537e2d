//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by closed-form and surface geometry operations.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("points live on different manifolds ({0} vs {1})")]
    ManifoldMismatch(String, String),

    #[error("invalid point on {manifold}: {reason}")]
    InvalidPoint { manifold: String, reason: String },

    #[error("invalid tangent vector on {manifold}: {reason}")]
    InvalidTangent { manifold: String, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("radial quantity undefined at the cut locus (r = {r:.6})")]
    CutLocus { r: f64 },

    #[error("degenerate surface metric at chart point ({0:.6}, {1:.6})")]
    DegenerateMetric(f64, f64),

    #[error("geodesic boundary-value solver did not converge (best residual {residual:.3e})")]
    GeodesicNoConvergence { residual: f64 },

    #[error("conjugate point on geodesic segment (transverse Jacobi value {value:.3e})")]
    ConjugatePoint { value: f64 },

    #[error("unknown manifold id `{0}`")]
    UnknownManifold(String),
}

/// Errors raised when evaluating a driving-semimartingale specification.
#[derive(Debug, Error)]
pub enum DriverError {
    #[error("dispersion matrix is singular or badly conditioned at t={t:.4} (cond > {cond:.3e})")]
    IllConditionedSigma { t: f64, cond: f64 },

    #[error("dispersion evaluation failed at t={t:.4}: {reason}")]
    SigmaEvaluation { t: f64, reason: String },

    #[error("driver dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Errors raised while simulating guided or unconditioned paths.
#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("invalid bridge configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error(transparent)]
    Driver(#[from] DriverError),

    #[error("numerical blow-up at step {step}: {reason}")]
    PathBlowup { step: usize, reason: String },

    #[error("likelihood accumulator produced a non-finite increment at step {step}")]
    LikelihoodBlowup { step: usize },

    #[error("{failed} of {total} paths failed; first failure (path {index}): {first}")]
    Ensemble {
        failed: usize,
        total: usize,
        index: usize,
        first: String,
    },
}

/// Errors raised by Monte Carlo estimators.
#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Simulation(#[from] SimulationError),

    #[error(transparent)]
    Geometry(#[from] GeometryError),

    #[error("all importance weights are zero or non-finite")]
    DegenerateWeights,

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("empty target list")]
    EmptyTargets,

    #[error("diffusion-mean likelihood degenerate at iterate {iter}: {reason}")]
    DegenerateLikelihood { iter: usize, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
