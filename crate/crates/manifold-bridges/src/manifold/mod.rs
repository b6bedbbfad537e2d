//! Closed-form Riemannian geometry for the supported manifolds.
//!
//! The zoo covers the unit sphere S^d (embedding coordinates), the flat
//! cylinder S^1 x R and flat torus (angle coordinates), the rotation group
//! SO(3) (3x3 matrices, bi-invariant metric normalized so geodesic distance
//! equals rotation angle), and parametrized surfaces without closed forms
//! (embedded torus, ellipsoid) backed by the [`crate::surface`] solvers.
//!
//! Conventions: the gradient of the squared distance is the usual one away
//! from the cut locus and is set to zero inside a small band around it
//! (width [`CUT_EPS`] in geodesic distance); radial crossings of that band
//! are counted by the simulation layer instead of contributing drift or
//! likelihood weight.

mod cylinder;
mod flat_torus;
mod rotations;
mod sphere;

pub use cylinder::Cylinder;
pub use flat_torus::FlatTorus;
pub use rotations::Rotations3;
pub use sphere::Sphere;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::linalg;
use crate::surface::Surface;

/// Width of the numerical cut-locus band, in geodesic distance.
pub const CUT_EPS: f64 = 1e-6;

/// Identifies which manifold a point belongs to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ManifoldId {
    Sphere(usize),
    Cylinder,
    FlatTorus(usize),
    Rotations3,
    EmbeddedTorus { major: f64, minor: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
}

impl std::fmt::Display for ManifoldId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ManifoldId::Sphere(d) => write!(f, "sphere{d}"),
            ManifoldId::Cylinder => write!(f, "cylinder"),
            ManifoldId::FlatTorus(_) => write!(f, "flat-torus"),
            ManifoldId::Rotations3 => write!(f, "so3"),
            ManifoldId::EmbeddedTorus { major, minor } => write!(f, "torus:{major},{minor}"),
            ManifoldId::Ellipsoid { a, b, c } => write!(f, "ellipsoid:{a},{b},{c}"),
        }
    }
}

/// A point on a manifold, in a manifold-specific coordinate representation.
///
/// S^d uses embedding coordinates in R^{d+1}; the cylinder uses
/// (angle, height); the flat torus an angle vector; SO(3) a row-major 3x3
/// rotation matrix; surfaces their chart coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldPoint {
    pub manifold: ManifoldId,
    pub coords: Vec<f64>,
}

/// A tangent vector, stored in the same representation as its base point
/// (SO(3) tangents are skew-symmetric matrices in body coordinates).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: ManifoldPoint,
    pub components: Vec<f64>,
}

/// A point together with an ordered orthonormal frame of its tangent space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FramePoint {
    pub base: ManifoldPoint,
    pub frame: Vec<Vec<f64>>,
}

/// Result of querying the cut locus of a reference point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutLocusInfo {
    pub is_near_cut: bool,
    /// Geodesic distance from the queried point to the cut locus. On
    /// surfaces this is a lower-bound proxy derived from the margin between
    /// competing geodesic homotopy classes.
    pub distance_to_cut: f64,
}

/// Logarithm-map result; `at_cut` signals the zero-gradient convention fired.
#[derive(Clone, Debug)]
pub struct LogResult {
    pub vector: TangentVector,
    pub at_cut: bool,
}

/// Radial quantities around a fixed target, evaluated at one point.
///
/// `grad_r` is the gradient of r = d(., v) in point-representation
/// components (zero inside the cut band). `jacobi_transverse` is the
/// transverse Jacobi solution u1(r) (u1(0) = 0, u1'(0) = 1) along the
/// minimizing geodesic from the target, `radial_hessian` its logarithmic
/// derivative u2(r)/u1(r) = the transverse eigenvalue of Hess r, and
/// `d_r_log_theta_negsqrt` the derivative of log Theta^{-1/2} in r.
#[derive(Clone, Debug)]
pub struct RadialGeometry {
    pub r: f64,
    pub grad_r: Vec<f64>,
    pub at_cut: bool,
    pub d_r_log_theta_negsqrt: f64,
    pub radial_hessian: f64,
    pub jacobi_transverse: f64,
}

/// Reusable per-path solver state. Only surfaces make use of it; the
/// closed-form manifolds are stateless.
#[derive(Clone, Debug, Default)]
pub enum RadialScratch {
    #[default]
    None,
    Surface {
        velocity: Option<[f64; 2]>,
        winding: [i32; 2],
    },
}

/// One of the supported geometries.
pub enum Manifold {
    Sphere(Sphere),
    Cylinder(Cylinder),
    FlatTorus(FlatTorus),
    Rotations3(Rotations3),
    Surface(Surface),
}

impl Manifold {
    /// Parse a manifold id string: `sphere2`, `sphere<d>`, `cylinder`,
    /// `flat-torus`, `so3`, `torus:R,rho`, `ellipsoid:a,b,c`.
    pub fn from_id(id: &str) -> Result<Self, GeometryError> {
        let unknown = || GeometryError::UnknownManifold(id.to_string());
        if let Some(d) = id.strip_prefix("sphere") {
            let d: usize = d.parse().map_err(|_| unknown())?;
            if d == 0 {
                return Err(unknown());
            }
            return Ok(Manifold::Sphere(Sphere::new(d)));
        }
        match id {
            "cylinder" => return Ok(Manifold::Cylinder(Cylinder)),
            "flat-torus" => return Ok(Manifold::FlatTorus(FlatTorus::new(2))),
            "so3" => return Ok(Manifold::Rotations3(Rotations3)),
            _ => {}
        }
        if let Some(params) = id.strip_prefix("torus:") {
            let p = parse_params(params, 2).ok_or_else(unknown)?;
            let s = Surface::torus(p[0], p[1]).map_err(|_| unknown())?;
            return Ok(Manifold::Surface(s));
        }
        if let Some(params) = id.strip_prefix("ellipsoid:") {
            let p = parse_params(params, 3).ok_or_else(unknown)?;
            let s = Surface::ellipsoid(p[0], p[1], p[2]).map_err(|_| unknown())?;
            return Ok(Manifold::Surface(s));
        }
        Err(unknown())
    }

    pub fn id(&self) -> ManifoldId {
        match self {
            Manifold::Sphere(s) => ManifoldId::Sphere(s.dim()),
            Manifold::Cylinder(_) => ManifoldId::Cylinder,
            Manifold::FlatTorus(t) => ManifoldId::FlatTorus(t.dim()),
            Manifold::Rotations3(_) => ManifoldId::Rotations3,
            Manifold::Surface(s) => s.id(),
        }
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        match self {
            Manifold::Sphere(s) => s.dim(),
            Manifold::Cylinder(_) => 2,
            Manifold::FlatTorus(t) => t.dim(),
            Manifold::Rotations3(_) => 3,
            Manifold::Surface(_) => 2,
        }
    }

    /// Length of the coordinate vector representing a point.
    pub fn coord_len(&self) -> usize {
        match self {
            Manifold::Sphere(s) => s.dim() + 1,
            Manifold::Cylinder(_) => 2,
            Manifold::FlatTorus(t) => t.dim(),
            Manifold::Rotations3(_) => 9,
            Manifold::Surface(_) => 2,
        }
    }

    /// Validate and canonicalize raw coordinates into a point.
    pub fn point(&self, coords: Vec<f64>) -> Result<ManifoldPoint, GeometryError> {
        if coords.len() != self.coord_len() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.coord_len(),
                got: coords.len(),
            });
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::InvalidPoint {
                manifold: self.id().to_string(),
                reason: "non-finite coordinate".into(),
            });
        }
        let coords = match self {
            Manifold::Sphere(s) => s.canonicalize(coords)?,
            Manifold::Cylinder(c) => c.canonicalize(coords),
            Manifold::FlatTorus(t) => t.canonicalize(coords),
            Manifold::Rotations3(r) => r.canonicalize(coords)?,
            Manifold::Surface(s) => s.canonicalize(coords)?,
        };
        Ok(ManifoldPoint {
            manifold: self.id(),
            coords,
        })
    }

    pub fn check_owns(&self, p: &ManifoldPoint) -> Result<(), GeometryError> {
        if p.manifold != self.id() {
            return Err(GeometryError::ManifoldMismatch(
                self.id().to_string(),
                p.manifold.to_string(),
            ));
        }
        Ok(())
    }

    fn check_pair(&self, x: &ManifoldPoint, v: &ManifoldPoint) -> Result<(), GeometryError> {
        self.check_owns(x)?;
        if x.manifold != v.manifold {
            return Err(GeometryError::ManifoldMismatch(
                x.manifold.to_string(),
                v.manifold.to_string(),
            ));
        }
        Ok(())
    }

    /// Riemannian inner product of two tangent representations at `x`.
    pub fn inner(&self, x: &ManifoldPoint, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Manifold::Sphere(_) | Manifold::Cylinder(_) | Manifold::FlatTorus(_) => {
                linalg::dot(a, b)
            }
            Manifold::Rotations3(_) => 0.5 * linalg::dot(a, b),
            Manifold::Surface(s) => s.inner(&x.coords, a, b),
        }
    }

    pub fn tangent_norm(&self, x: &ManifoldPoint, a: &[f64]) -> f64 {
        self.inner(x, a, a).max(0.0).sqrt()
    }

    /// Geodesic distance.
    pub fn distance(&self, x: &ManifoldPoint, v: &ManifoldPoint) -> Result<f64, GeometryError> {
        self.check_pair(x, v)?;
        match self {
            Manifold::Sphere(s) => Ok(s.distance(&x.coords, &v.coords)),
            Manifold::Cylinder(c) => Ok(c.distance(&x.coords, &v.coords)),
            Manifold::FlatTorus(t) => Ok(t.distance(&x.coords, &v.coords)),
            Manifold::Rotations3(r) => Ok(r.distance(&x.coords, &v.coords)),
            Manifold::Surface(s) => s.distance(&x.coords, &v.coords),
        }
    }

    /// Riemannian logarithm. Returns the zero vector with `at_cut = true`
    /// when `v` lies in (or within [`CUT_EPS`] of) the cut locus of `x`.
    pub fn log_map(&self, x: &ManifoldPoint, v: &ManifoldPoint) -> Result<LogResult, GeometryError> {
        self.check_pair(x, v)?;
        let (components, at_cut) = match self {
            Manifold::Sphere(s) => s.log(&x.coords, &v.coords),
            Manifold::Cylinder(c) => c.log(&x.coords, &v.coords),
            Manifold::FlatTorus(t) => t.log(&x.coords, &v.coords),
            Manifold::Rotations3(r) => r.log(&x.coords, &v.coords),
            Manifold::Surface(s) => s.log(&x.coords, &v.coords)?,
        };
        Ok(LogResult {
            vector: TangentVector {
                base: x.clone(),
                components,
            },
            at_cut,
        })
    }

    /// Riemannian exponential.
    pub fn exp_map(
        &self,
        x: &ManifoldPoint,
        w: &TangentVector,
    ) -> Result<ManifoldPoint, GeometryError> {
        self.check_pair(x, &w.base)?;
        self.exp_components(x, &w.components)
    }

    pub fn exp_components(
        &self,
        x: &ManifoldPoint,
        w: &[f64],
    ) -> Result<ManifoldPoint, GeometryError> {
        self.check_owns(x)?;
        if w.len() != self.coord_len() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.coord_len(),
                got: w.len(),
            });
        }
        let coords = match self {
            Manifold::Sphere(s) => s.exp(&x.coords, w),
            Manifold::Cylinder(c) => c.exp(&x.coords, w),
            Manifold::FlatTorus(t) => t.exp(&x.coords, w),
            Manifold::Rotations3(r) => r.exp(&x.coords, w),
            Manifold::Surface(s) => s.exp(&x.coords, w)?,
        };
        Ok(ManifoldPoint {
            manifold: self.id(),
            coords,
        })
    }

    /// Gradient of d(., v)^2 / 2 at `x`: equals -Log_x(v), and zero at the
    /// cut locus and at x = v.
    pub fn grad_half_sq_dist(
        &self,
        x: &ManifoldPoint,
        v: &ManifoldPoint,
    ) -> Result<TangentVector, GeometryError> {
        let log = self.log_map(x, v)?;
        Ok(TangentVector {
            base: x.clone(),
            components: linalg::scale(&log.vector.components, -1.0),
        })
    }

    /// Jacobian determinant of the exponential map at `v` along the
    /// minimizing geodesic to `x` (normalized so Theta -> 1 as r -> 0).
    pub fn theta_jacobian(
        &self,
        v: &ManifoldPoint,
        x: &ManifoldPoint,
    ) -> Result<f64, GeometryError> {
        let rad = self.radial_geometry(v, x, &mut RadialScratch::default())?;
        if rad.at_cut {
            return Err(GeometryError::CutLocus { r: rad.r });
        }
        if rad.r < 1e-12 {
            return Ok(1.0);
        }
        let ratio = rad.jacobi_transverse / rad.r;
        match self {
            Manifold::Sphere(s) => Ok(ratio.powi(s.dim() as i32 - 1)),
            Manifold::Rotations3(_) => Ok(ratio * ratio),
            _ => Ok(ratio),
        }
    }

    /// d/dr of log Theta_v^{-1/2} at `x`.
    pub fn d_r_log_theta_negsqrt(
        &self,
        v: &ManifoldPoint,
        x: &ManifoldPoint,
    ) -> Result<f64, GeometryError> {
        let rad = self.radial_geometry(v, x, &mut RadialScratch::default())?;
        if rad.at_cut {
            return Err(GeometryError::CutLocus { r: rad.r });
        }
        Ok(rad.d_r_log_theta_negsqrt)
    }

    /// (1/2) Laplacian of d(., v)^2 at `x`, for the Brownian generator.
    pub fn half_laplacian_sq_dist(
        &self,
        x: &ManifoldPoint,
        v: &ManifoldPoint,
    ) -> Result<f64, GeometryError> {
        let rad = self.radial_geometry(v, x, &mut RadialScratch::default())?;
        if rad.at_cut {
            return Err(GeometryError::CutLocus { r: rad.r });
        }
        let d = self.dim() as f64;
        if rad.r < 1e-9 {
            return Ok(d);
        }
        // (1/2) lap r^2 = d + r d/dr log Theta, with
        // d/dr log Theta = -2 d/dr log Theta^{-1/2}.
        Ok(d - 2.0 * rad.r * rad.d_r_log_theta_negsqrt)
    }

    /// Query the cut locus of `v` from `x`.
    pub fn cut_locus_query(
        &self,
        x: &ManifoldPoint,
        v: &ManifoldPoint,
    ) -> Result<CutLocusInfo, GeometryError> {
        self.check_pair(x, v)?;
        let distance_to_cut = match self {
            Manifold::Sphere(s) => s.distance_to_cut(&x.coords, &v.coords),
            Manifold::Cylinder(c) => c.distance_to_cut(&x.coords, &v.coords),
            Manifold::FlatTorus(t) => t.distance_to_cut(&x.coords, &v.coords),
            Manifold::Rotations3(r) => r.distance_to_cut(&x.coords, &v.coords),
            Manifold::Surface(s) => s.distance_to_cut(&x.coords, &v.coords)?,
        };
        Ok(CutLocusInfo {
            is_near_cut: distance_to_cut < CUT_EPS,
            distance_to_cut,
        })
    }

    /// Parallel transport of `vec` (tangent components at `x`) along the
    /// geodesic s -> exp_x(s w), s in [0, 1].
    pub fn parallel_transport(
        &self,
        x: &ManifoldPoint,
        w: &[f64],
        vec: &[f64],
    ) -> Result<Vec<f64>, GeometryError> {
        match self {
            Manifold::Sphere(s) => Ok(s.transport(&x.coords, w, vec)),
            Manifold::Cylinder(_) | Manifold::FlatTorus(_) => Ok(vec.to_vec()),
            Manifold::Rotations3(r) => Ok(r.transport(w, vec)),
            Manifold::Surface(s) => {
                let moved = s.transport(&x.coords, w, std::slice::from_ref(&vec.to_vec()))?;
                Ok(moved.into_iter().next().unwrap_or_default())
            }
        }
    }

    /// Move a frame point by the tangent step `w`: the base moves to
    /// exp(base, w) and the frame is parallel-transported along the geodesic
    /// segment, then re-orthonormalized.
    pub fn parallel_transport_step(
        &self,
        f: &FramePoint,
        w: &TangentVector,
    ) -> Result<FramePoint, GeometryError> {
        self.check_pair(&f.base, &w.base)?;
        self.transport_step_components(f, &w.components)
    }

    pub fn transport_step_components(
        &self,
        f: &FramePoint,
        w: &[f64],
    ) -> Result<FramePoint, GeometryError> {
        let (base, mut frame) = match self {
            Manifold::Surface(s) => {
                // One joint integration moves the base and the frame.
                let (coords, frame) = s.develop(&f.base.coords, w, &f.frame)?;
                let base = ManifoldPoint {
                    manifold: self.id(),
                    coords,
                };
                (base, frame)
            }
            _ => {
                let base = self.exp_components(&f.base, w)?;
                let mut out = Vec::with_capacity(f.frame.len());
                for e in &f.frame {
                    out.push(self.parallel_transport(&f.base, w, e)?);
                }
                (base, out)
            }
        };
        linalg::gram_schmidt(&mut frame, |a, b| self.inner(&base, a, b));
        Ok(FramePoint { base, frame })
    }

    /// A deterministic orthonormal frame at `x`.
    pub fn canonical_frame(&self, x: &ManifoldPoint) -> Result<FramePoint, GeometryError> {
        self.check_owns(x)?;
        let frame = match self {
            Manifold::Sphere(s) => s.frame(&x.coords),
            Manifold::Cylinder(_) => vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            Manifold::FlatTorus(t) => {
                let d = t.dim();
                (0..d)
                    .map(|i| {
                        let mut e = vec![0.0; d];
                        e[i] = 1.0;
                        e
                    })
                    .collect()
            }
            Manifold::Rotations3(r) => r.frame(),
            Manifold::Surface(s) => s.frame(&x.coords)?,
        };
        Ok(FramePoint {
            base: x.clone(),
            frame,
        })
    }

    /// Radial quantities of r = d(., v) at `x`, for the guided drift and the
    /// likelihood accumulators. `scratch` lets surface solvers warm-start
    /// across consecutive calls along one path.
    pub fn radial_geometry(
        &self,
        v: &ManifoldPoint,
        x: &ManifoldPoint,
        scratch: &mut RadialScratch,
    ) -> Result<RadialGeometry, GeometryError> {
        self.check_pair(x, v)?;
        match self {
            Manifold::Sphere(s) => Ok(s.radial(&x.coords, &v.coords)),
            Manifold::Cylinder(c) => Ok(c.radial(&x.coords, &v.coords)),
            Manifold::FlatTorus(t) => Ok(t.radial(&x.coords, &v.coords)),
            Manifold::Rotations3(r) => Ok(r.radial(&x.coords, &v.coords)),
            Manifold::Surface(s) => s.radial(&x.coords, &v.coords, scratch),
        }
    }

    /// Orthonormality defect of a frame: the largest deviation of pairwise
    /// inner products from the identity.
    pub fn frame_defect(&self, f: &FramePoint) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..f.frame.len() {
            for j in 0..=i {
                let g = self.inner(&f.base, &f.frame[i], &f.frame[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

/// Radial data shared by the flat geometries (Theta == 1).
pub(crate) fn flat_radial(r: f64, grad_r: Vec<f64>, at_cut: bool) -> RadialGeometry {
    RadialGeometry {
        r,
        grad_r: if at_cut { vec![0.0; grad_r.len()] } else { grad_r },
        at_cut,
        d_r_log_theta_negsqrt: 0.0,
        radial_hessian: if r > 0.0 { 1.0 / r } else { 0.0 },
        jacobi_transverse: r,
    }
}

fn parse_params(s: &str, n: usize) -> Option<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().ok())
        .collect::<Option<Vec<f64>>>()?;
    (parts.len() == n && parts.iter().all(|x| x.is_finite())).then_some(parts)
}
