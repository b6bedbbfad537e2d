//! Numeric geometry for parametrized surfaces without closed forms.
//!
//! Supports the embedded torus and triaxial ellipsoid. The metric, its
//! derivatives, and the Gaussian curvature come from the analytic embedding;
//! distances and logarithms from a shooting boundary-value solver with
//! winding-class enumeration; exponential-map Jacobians from the scalar
//! Jacobi equation integrated along geodesics.

mod solver;

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::RwLock;

use nalgebra::{Matrix2, Vector2, Vector3};

use crate::error::GeometryError;
use crate::linalg::wrap_angle;
use crate::manifold::{ManifoldId, RadialGeometry, RadialScratch, CUT_EPS};

use solver::{enumerate_classes, polish_class, ClassSolution};

/// Chart nodes used by the standalone boundary-value and Jacobi solvers.
pub const BVP_NODES: usize = 200;

/// Parametrized embedding of a surface in R^3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SurfaceShape {
    /// Torus of revolution; chart (u, w) with u the major and w the minor
    /// angle, embedding ((R + rho cos w) cos u, (R + rho cos w) sin u,
    /// rho sin w).
    Torus { major: f64, minor: f64 },
    /// Ellipsoid (a cos u sin v, b sin u sin v, c cos v); the polar chart
    /// coordinate v lives in (0, pi), excluding the chart-singular poles.
    Ellipsoid { a: f64, b: f64, c: f64 },
}

impl SurfaceShape {
    pub fn embed(&self, q: &[f64; 2]) -> Vector3<f64> {
        match self {
            SurfaceShape::Torus { major, minor } => {
                let (su, cu) = q[0].sin_cos();
                let (sw, cw) = q[1].sin_cos();
                let ring = major + minor * cw;
                Vector3::new(ring * cu, ring * su, minor * sw)
            }
            SurfaceShape::Ellipsoid { a, b, c } => {
                let (su, cu) = q[0].sin_cos();
                let (sv, cv) = q[1].sin_cos();
                Vector3::new(a * cu * sv, b * su * sv, c * cv)
            }
        }
    }

    /// First partials (f_1, f_2) of the embedding.
    pub fn d1(&self, q: &[f64; 2]) -> [Vector3<f64>; 2] {
        match self {
            SurfaceShape::Torus { major, minor } => {
                let (su, cu) = q[0].sin_cos();
                let (sw, cw) = q[1].sin_cos();
                let ring = major + minor * cw;
                [
                    Vector3::new(-ring * su, ring * cu, 0.0),
                    Vector3::new(-minor * sw * cu, -minor * sw * su, minor * cw),
                ]
            }
            SurfaceShape::Ellipsoid { a, b, c } => {
                let (su, cu) = q[0].sin_cos();
                let (sv, cv) = q[1].sin_cos();
                [
                    Vector3::new(-a * su * sv, b * cu * sv, 0.0),
                    Vector3::new(a * cu * cv, b * su * cv, -c * sv),
                ]
            }
        }
    }

    /// Second partials (f_11, f_12, f_22).
    pub fn d2(&self, q: &[f64; 2]) -> [Vector3<f64>; 3] {
        match self {
            SurfaceShape::Torus { major, minor } => {
                let (su, cu) = q[0].sin_cos();
                let (sw, cw) = q[1].sin_cos();
                let ring = major + minor * cw;
                [
                    Vector3::new(-ring * cu, -ring * su, 0.0),
                    Vector3::new(minor * sw * su, -minor * sw * cu, 0.0),
                    Vector3::new(-minor * cw * cu, -minor * cw * su, -minor * sw),
                ]
            }
            SurfaceShape::Ellipsoid { a, b, c } => {
                let (su, cu) = q[0].sin_cos();
                let (sv, cv) = q[1].sin_cos();
                [
                    Vector3::new(-a * cu * sv, -b * su * sv, 0.0),
                    Vector3::new(-a * su * cv, b * cu * cv, 0.0),
                    Vector3::new(-a * cu * sv, -b * su * sv, -c * cv),
                ]
            }
        }
    }

    pub fn periodic(&self) -> [bool; 2] {
        match self {
            SurfaceShape::Torus { .. } => [true, true],
            SurfaceShape::Ellipsoid { .. } => [true, false],
        }
    }

    /// First fundamental form.
    pub fn metric(&self, q: &[f64; 2]) -> Matrix2<f64> {
        let [fu, fv] = self.d1(q);
        Matrix2::new(fu.dot(&fu), fu.dot(&fv), fu.dot(&fv), fv.dot(&fv))
    }

    /// Metric with an immersion check (smallest eigenvalue above 1e-8).
    pub fn metric_checked(&self, q: &[f64; 2]) -> Result<Matrix2<f64>, GeometryError> {
        let g = self.metric(q);
        let tr = g.trace();
        let det = g.determinant();
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let min_eig = tr / 2.0 - disc;
        if !(min_eig > 1e-8) {
            return Err(GeometryError::DegenerateMetric(q[0], q[1]));
        }
        Ok(g)
    }

    /// Partial derivatives of the metric: dg[k] = d G / d q^k.
    pub fn metric_derivatives(&self, q: &[f64; 2]) -> [Matrix2<f64>; 2] {
        let d1 = self.d1(q);
        let d2 = self.d2(q);
        // second[i][k] = f_{ik}
        let second = [[d2[0], d2[1]], [d2[1], d2[2]]];
        let mut out = [Matrix2::zeros(); 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    out[k][(i, j)] = second[i][k].dot(&d1[j]) + d1[i].dot(&second[j][k]);
                }
            }
        }
        out
    }

    /// Christoffel symbols of the Levi-Civita connection, gamma[k][i][j].
    pub fn christoffel(&self, q: &[f64; 2]) -> [[[f64; 2]; 2]; 2] {
        let g = self.metric(q);
        let ginv = g
            .try_inverse()
            .unwrap_or_else(|| Matrix2::identity() * f64::NAN);
        let dg = self.metric_derivatives(q);
        let mut gamma = [[[0.0; 2]; 2]; 2];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for l in 0..2 {
                        s += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    }
                    gamma[k][i][j] = 0.5 * s;
                }
            }
        }
        gamma
    }

    /// Gaussian curvature from the second fundamental form.
    pub fn gauss_curvature(&self, q: &[f64; 2]) -> f64 {
        let [fu, fv] = self.d1(q);
        let [fuu, fuv, fvv] = self.d2(q);
        let normal = fu.cross(&fv);
        let nn = normal.norm();
        let n_hat = normal / nn;
        let l = fuu.dot(&n_hat);
        let m = fuv.dot(&n_hat);
        let n = fvv.dot(&n_hat);
        (l * n - m * m) / (nn * nn)
    }
}

/// Result of the geodesic boundary-value solve between two chart points.
#[derive(Clone, Debug)]
pub struct GeodesicSolution {
    /// Chart path (q, qdot) at the collocation nodes, parametrized over
    /// [0, 1] (so qdot has magnitude `length` in the metric).
    pub nodes: Vec<([f64; 2], [f64; 2])>,
    pub length: f64,
    pub converged: bool,
    /// Endpoint residual in chart coordinates.
    pub residual: f64,
    /// Initial velocity (the logarithm of the endpoint wrt the start).
    pub velocity: [f64; 2],
    /// Winding offsets of the homotopy class of the returned geodesic.
    pub winding: [i32; 2],
    /// Competing homotopy class within 1e-9 of the same length.
    pub near_cut_tie: bool,
}

struct CacheEntry {
    best: ([f64; 2], [i32; 2]),
    runner: Option<([f64; 2], [i32; 2])>,
}

/// A parametrized surface with its boundary-value solver caches.
pub struct Surface {
    shape: SurfaceShape,
    cache: RwLock<HashMap<[i64; 4], CacheEntry>>,
}

impl Surface {
    pub fn torus(major: f64, minor: f64) -> Result<Self, GeometryError> {
        if !(major > minor && minor > 0.0) {
            return Err(GeometryError::InvalidPoint {
                manifold: format!("torus:{major},{minor}"),
                reason: "requires R > rho > 0".into(),
            });
        }
        Ok(Surface::new(SurfaceShape::Torus { major, minor }))
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Result<Self, GeometryError> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(GeometryError::InvalidPoint {
                manifold: format!("ellipsoid:{a},{b},{c}"),
                reason: "semi-axes must be positive".into(),
            });
        }
        Ok(Surface::new(SurfaceShape::Ellipsoid { a, b, c }))
    }

    pub fn new(shape: SurfaceShape) -> Self {
        Surface {
            shape,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn shape(&self) -> &SurfaceShape {
        &self.shape
    }

    pub fn id(&self) -> ManifoldId {
        match self.shape {
            SurfaceShape::Torus { major, minor } => ManifoldId::EmbeddedTorus { major, minor },
            SurfaceShape::Ellipsoid { a, b, c } => ManifoldId::Ellipsoid { a, b, c },
        }
    }

    pub fn canonicalize(&self, coords: Vec<f64>) -> Result<Vec<f64>, GeometryError> {
        let mut q = [coords[0], coords[1]];
        let periodic = self.shape.periodic();
        for (c, p) in q.iter_mut().zip(periodic) {
            if p {
                *c = wrap_angle(*c);
            }
        }
        self.shape.metric_checked(&q)?;
        Ok(q.to_vec())
    }

    pub fn inner(&self, x: &[f64], a: &[f64], b: &[f64]) -> f64 {
        let g = self.shape.metric(&[x[0], x[1]]);
        let av = Vector2::new(a[0], a[1]);
        let bv = Vector2::new(b[0], b[1]);
        (g * av).dot(&bv)
    }

    /// G-orthonormal frame from Gram-Schmidt on the chart basis.
    pub fn frame(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, GeometryError> {
        let g = self.shape.metric_checked(&[x[0], x[1]])?;
        let e1 = Vector2::new(1.0 / g[(0, 0)].sqrt(), 0.0);
        let mut e2 = Vector2::new(0.0, 1.0);
        let proj = (g * e1).dot(&e2);
        e2 -= proj * e1;
        let n2 = (g * e2).dot(&e2).sqrt();
        e2 /= n2;
        Ok(vec![vec![e1.x, e1.y], vec![e2.x, e2.y]])
    }

    /// Exponential map by integrating the geodesic equation.
    pub fn exp(&self, x: &[f64], w: &[f64]) -> Result<Vec<f64>, GeometryError> {
        let q0 = [x[0], x[1]];
        let speed = self.inner(x, w, w).sqrt();
        let n = solver::step_nodes(speed);
        let end = solver::integrate_endpoint(&self.shape, q0, [w[0], w[1]], n);
        if end.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::DegenerateMetric(q0[0], q0[1]));
        }
        self.canonicalize(vec![end[0], end[1]])
    }

    /// Move a point by `w` and parallel-transport `vectors` along the way.
    pub fn develop(
        &self,
        x: &[f64],
        w: &[f64],
        vectors: &[Vec<f64>],
    ) -> Result<(Vec<f64>, Vec<Vec<f64>>), GeometryError> {
        let q0 = [x[0], x[1]];
        let speed = self.inner(x, w, w).sqrt();
        let n = solver::step_nodes(speed);
        let (end, moved) = solver::integrate_with_transport(&self.shape, q0, [w[0], w[1]], vectors, n);
        if end.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::DegenerateMetric(q0[0], q0[1]));
        }
        let point = self.canonicalize(vec![end[0], end[1]])?;
        Ok((point, moved))
    }

    /// Parallel transport of chart-component vectors along exp_x(s w).
    pub fn transport(
        &self,
        x: &[f64],
        w: &[f64],
        vectors: &[Vec<f64>],
    ) -> Result<Vec<Vec<f64>>, GeometryError> {
        Ok(self.develop(x, w, vectors)?.1)
    }

    pub fn distance(&self, x: &[f64], v: &[f64]) -> Result<f64, GeometryError> {
        Ok(self.geodesic_bvp_inner(x, v, BVP_NODES, false)?.0.length)
    }

    pub fn log(&self, x: &[f64], v: &[f64]) -> Result<(Vec<f64>, bool), GeometryError> {
        let (sol, _) = self.geodesic_bvp_inner(x, v, BVP_NODES, false)?;
        let margin_cut = sol.near_cut_tie;
        if margin_cut {
            return Ok((vec![0.0, 0.0], true));
        }
        Ok((sol.velocity.to_vec(), false))
    }

    pub fn distance_to_cut(&self, x: &[f64], v: &[f64]) -> Result<f64, GeometryError> {
        let (_, margin) = self.geodesic_bvp_inner(x, v, BVP_NODES, false)?;
        Ok(margin.map_or(f64::INFINITY, |m| 0.5 * m))
    }

    /// Minimizing geodesic between chart points, over winding-class restarts.
    pub fn geodesic_bvp(&self, x: &[f64], v: &[f64]) -> Result<GeodesicSolution, GeometryError> {
        Ok(self.geodesic_bvp_inner(x, v, BVP_NODES, true)?.0)
    }

    fn geodesic_bvp_inner(
        &self,
        x: &[f64],
        v: &[f64],
        nodes: usize,
        keep_nodes: bool,
    ) -> Result<(GeodesicSolution, Option<f64>), GeometryError> {
        let q0 = [x[0], x[1]];
        let q1 = [v[0], v[1]];
        let classes = enumerate_classes(&self.shape, q0, q1, nodes)?;
        self.store_cache(q0, q1, &classes);
        let best = &classes[0];
        let margin = classes.get(1).map(|c| c.length - best.length);
        let tie = margin.is_some_and(|m| m < 1e-9);
        let sol = solver::finish_solution(&self.shape, q0, best, nodes, keep_nodes, tie);
        Ok((sol, margin))
    }

    /// Normalized Jacobi-field determinant Theta along a converged geodesic.
    pub fn jacobi_theta(&self, g: &GeodesicSolution) -> Result<f64, GeometryError> {
        if !g.converged {
            return Err(GeometryError::GeodesicNoConvergence {
                residual: g.residual,
            });
        }
        let q0 = g.nodes.first().map(|(q, _)| *q).ok_or(
            GeometryError::GeodesicNoConvergence {
                residual: g.residual,
            },
        )?;
        let n = (g.nodes.len() - 1).max(BVP_NODES);
        let jac = solver::integrate_jacobi(&self.shape, q0, g.velocity, n);
        if jac.min_u1 <= 0.0 {
            return Err(GeometryError::ConjugatePoint { value: jac.min_u1 });
        }
        if g.length < 1e-12 {
            return Ok(1.0);
        }
        Ok(jac.u1 / g.length)
    }

    /// Radial quantities for the guided drift and likelihood accumulators,
    /// with warm starts across consecutive calls through `scratch`.
    pub fn radial(
        &self,
        x: &[f64],
        v: &[f64],
        scratch: &mut RadialScratch,
    ) -> Result<RadialGeometry, GeometryError> {
        let q0 = [x[0], x[1]];
        let q1 = [v[0], v[1]];

        // Degenerate start: the two points coincide within solver precision.
        let chart_gap = self.chart_gap(&q0, &q1);
        if chart_gap < 1e-9 {
            return Ok(RadialGeometry {
                r: chart_gap,
                grad_r: vec![0.0, 0.0],
                at_cut: false,
                d_r_log_theta_negsqrt: 0.0,
                radial_hessian: 0.0,
                jacobi_transverse: chart_gap,
            });
        }

        let nodes = solver::engine_nodes(chart_gap);
        let (best, runner) = self.tracked_classes(q0, q1, nodes, scratch)?;

        let margin = runner.as_ref().map(|r| r.length - best.length);
        let at_cut = margin.is_some_and(|m| 0.5 * m < CUT_EPS);
        *scratch = RadialScratch::Surface {
            velocity: Some(best.velocity),
            winding: best.winding,
        };

        let r = best.length;
        let jac = &best.jacobi;
        if jac.min_u1 <= 0.0 {
            // Past the first conjugate point, hence past the cut locus:
            // apply the zero-gradient convention.
            return Ok(RadialGeometry {
                r,
                grad_r: vec![0.0, 0.0],
                at_cut: true,
                d_r_log_theta_negsqrt: 0.0,
                radial_hessian: 0.0,
                jacobi_transverse: jac.u1,
            });
        }
        let grad_r = if at_cut {
            vec![0.0, 0.0]
        } else {
            vec![-best.velocity[0] / r, -best.velocity[1] / r]
        };
        let h = jac.u2 / jac.u1;
        Ok(RadialGeometry {
            r,
            grad_r,
            at_cut,
            d_r_log_theta_negsqrt: if at_cut { 0.0 } else { -0.5 * (h - 1.0 / r) },
            radial_hessian: h,
            jacobi_transverse: jac.u1,
        })
    }

    fn tracked_classes(
        &self,
        q0: [f64; 2],
        q1: [f64; 2],
        nodes: usize,
        scratch: &mut RadialScratch,
    ) -> Result<(ClassSolution, Option<ClassSolution>), GeometryError> {
        if let RadialScratch::Surface {
            velocity: Some(vel),
            winding,
        } = scratch
        {
            if let Some(best) = polish_class(&self.shape, q0, q1, *winding, *vel, nodes) {
                let runner = self.polish_runner(q0, q1, &best, nodes);
                return Ok((best, runner));
            }
        }
        if let Some(entry) = self.load_cache(q0, q1) {
            let warm = polish_class(&self.shape, q0, q1, entry.best.1, entry.best.0, nodes);
            if let Some(best) = warm {
                let runner = entry
                    .runner
                    .and_then(|(vel, wind)| polish_class(&self.shape, q0, q1, wind, vel, nodes))
                    .or_else(|| self.polish_runner(q0, q1, &best, nodes));
                let (best, runner) = order_classes(best, runner);
                return Ok((best, runner));
            }
        }
        let classes = enumerate_classes(&self.shape, q0, q1, nodes)?;
        self.store_cache(q0, q1, &classes);
        let mut it = classes.into_iter();
        let best = it.next().ok_or(GeometryError::GeodesicNoConvergence {
            residual: f64::INFINITY,
        })?;
        Ok((best, it.next()))
    }

    /// Re-solve the runner-up class nearest in length to the tracked best.
    fn polish_runner(
        &self,
        q0: [f64; 2],
        q1: [f64; 2],
        best: &ClassSolution,
        nodes: usize,
    ) -> Option<ClassSolution> {
        let entry = self.load_cache(q0, q1)?;
        let (vel, wind) = entry.runner?;
        if wind == best.winding {
            return None;
        }
        polish_class(&self.shape, q0, q1, wind, vel, nodes)
    }

    fn chart_gap(&self, q0: &[f64; 2], q1: &[f64; 2]) -> f64 {
        let periodic = self.shape.periodic();
        let mut d = [0.0; 2];
        for i in 0..2 {
            d[i] = if periodic[i] {
                crate::linalg::wrap_signed(q1[i] - q0[i])
            } else {
                q1[i] - q0[i]
            };
        }
        self.inner(&q0[..], &d, &d).sqrt()
    }

    fn cache_key(q0: [f64; 2], q1: [f64; 2]) -> [i64; 4] {
        let quant = |x: f64| (x / 1e-3).round() as i64;
        [quant(q0[0]), quant(q0[1]), quant(q1[0]), quant(q1[1])]
    }

    fn load_cache(&self, q0: [f64; 2], q1: [f64; 2]) -> Option<CacheEntry> {
        let cache = self.cache.read().ok()?;
        cache.get(&Self::cache_key(q0, q1)).map(|e| CacheEntry {
            best: e.best,
            runner: e.runner,
        })
    }

    fn store_cache(&self, q0: [f64; 2], q1: [f64; 2], classes: &[ClassSolution]) {
        if classes.is_empty() {
            return;
        }
        if let Ok(mut cache) = self.cache.write() {
            cache.insert(
                Self::cache_key(q0, q1),
                CacheEntry {
                    best: (classes[0].velocity, classes[0].winding),
                    runner: classes.get(1).map(|c| (c.velocity, c.winding)),
                },
            );
        }
    }
}

fn order_classes(
    a: ClassSolution,
    b: Option<ClassSolution>,
) -> (ClassSolution, Option<ClassSolution>) {
    match b {
        Some(b) if b.length < a.length => (b, Some(a)),
        other => (a, other),
    }
}

/// Winding lift of a chart target: `q1 + 2 pi k` on periodic coordinates.
pub(crate) fn lift_target(shape: &SurfaceShape, q1: [f64; 2], winding: [i32; 2]) -> [f64; 2] {
    let periodic = shape.periodic();
    let mut out = q1;
    for i in 0..2 {
        if periodic[i] {
            out[i] += TAU * winding[i] as f64;
        }
    }
    out
}
