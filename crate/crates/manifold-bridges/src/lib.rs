//! Simulation of guided bridge processes on Riemannian manifolds.
//!
//! The crate provides:
//!
//! - closed-form geometry for a zoo of manifolds (spheres, flat cylinder and
//!   torus, SO(3)) and numeric geometry for parametrized surfaces
//!   (embedded torus, ellipsoid) in [`manifold`] and [`surface`];
//! - stochastic development of Euclidean semimartingales and the guided
//!   radial-bridge modification of their drift in [`sde`];
//! - the Girsanov likelihood machinery that reweights guided paths back to
//!   the conditioned law in [`likelihood`];
//! - importance-sampling estimators for conditional expectations, heat
//!   kernels, and diffusion means in [`estimators`].
//!
//! Everything is deterministic given a master seed: per-path randomness is
//! drawn from counter-based ChaCha streams keyed by path index, so ensembles
//! are reproducible regardless of thread scheduling.

pub mod error;
pub mod estimators;
pub mod likelihood;
pub mod linalg;
pub mod manifold;
pub mod sde;
pub mod surface;

pub use error::{DriverError, EstimatorError, GeometryError, SimulationError};
pub use manifold::{
    CutLocusInfo, FramePoint, Manifold, ManifoldId, ManifoldPoint, RadialGeometry, RadialScratch,
    TangentVector, CUT_EPS,
};
pub use surface::{GeodesicSolution, Surface, SurfaceShape};
