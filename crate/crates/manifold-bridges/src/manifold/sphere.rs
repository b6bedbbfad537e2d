//! The unit sphere S^d in embedding coordinates.

use std::f64::consts::PI;

use crate::error::GeometryError;
use crate::linalg::{axpy, clamp_unit, cot_minus_inv, dot, norm, normalize, scale};

use super::{RadialGeometry, CUT_EPS};

pub struct Sphere {
    dim: usize,
}

impl Sphere {
    pub fn new(dim: usize) -> Self {
        Sphere { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn canonicalize(&self, coords: Vec<f64>) -> Result<Vec<f64>, GeometryError> {
        let n = norm(&coords);
        if (n - 1.0).abs() > 1e-10 {
            return Err(GeometryError::InvalidPoint {
                manifold: format!("sphere{}", self.dim),
                reason: format!("norm {n} departs from 1 beyond 1e-10"),
            });
        }
        Ok(scale(&coords, 1.0 / n))
    }

    pub fn distance(&self, x: &[f64], v: &[f64]) -> f64 {
        clamp_unit(dot(x, v)).acos()
    }

    /// Log map; zero vector + flag inside the cut band around the antipode.
    pub fn log(&self, x: &[f64], v: &[f64]) -> (Vec<f64>, bool) {
        let r = self.distance(x, v);
        if r < 1e-14 {
            return (vec![0.0; x.len()], false);
        }
        if r > PI - CUT_EPS {
            return (vec![0.0; x.len()], true);
        }
        // Component of v orthogonal to x, rescaled to length r.
        let c = dot(x, v);
        let mut perp = v.to_vec();
        axpy(&mut perp, -c, x);
        let pn = norm(&perp);
        if pn < 1e-300 {
            return (vec![0.0; x.len()], true);
        }
        (scale(&perp, r / pn), false)
    }

    pub fn exp(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        let theta = norm(w);
        if theta < 1e-300 {
            return x.to_vec();
        }
        let mut out = scale(x, theta.cos());
        axpy(&mut out, theta.sin() / theta, w);
        normalize(&out)
    }

    /// Parallel transport of `vec` along the geodesic exp_x(s w), s in [0,1].
    ///
    /// The component along the initial direction rotates in the (x, w)-plane;
    /// the orthogonal complement is unchanged.
    pub fn transport(&self, x: &[f64], w: &[f64], vec: &[f64]) -> Vec<f64> {
        let theta = norm(w);
        if theta < 1e-300 {
            return vec.to_vec();
        }
        let dir = scale(w, 1.0 / theta);
        let along = dot(vec, &dir);
        let mut out = vec.to_vec();
        axpy(&mut out, along * (theta.cos() - 1.0), &dir);
        axpy(&mut out, -along * theta.sin(), x);
        out
    }

    pub fn distance_to_cut(&self, x: &[f64], v: &[f64]) -> f64 {
        PI - self.distance(x, v)
    }

    pub fn radial(&self, x: &[f64], v: &[f64]) -> RadialGeometry {
        let d = self.dim as f64;
        let r = self.distance(x, v);
        let (log, at_cut) = self.log(x, v);
        let grad_r = if at_cut || r < 1e-14 {
            vec![0.0; x.len()]
        } else {
            scale(&log, -1.0 / r)
        };
        RadialGeometry {
            r,
            grad_r,
            at_cut,
            // Theta = (sin r / r)^{d-1}; log Theta^{-1/2} differentiates to
            // -(d-1)/2 (cot r - 1/r).
            d_r_log_theta_negsqrt: -0.5 * (d - 1.0) * cot_minus_inv(r),
            radial_hessian: if r > 0.0 { 1.0 / r + cot_minus_inv(r) } else { 0.0 },
            jacobi_transverse: r.sin(),
        }
    }

    /// Orthonormal tangent frame built by Gram-Schmidt against the
    /// coordinate axes.
    pub fn frame(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = x.len();
        // Skip the axis most aligned with x to keep the basis well separated.
        let skip = x
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(self.dim);
        for i in (0..n).filter(|&i| i != skip) {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            axpy(&mut e, -x[i], x);
            for f in &frame {
                let p = dot(&e, f);
                axpy(&mut e, -p, f);
            }
            let en = norm(&e);
            if en > 1e-12 {
                frame.push(scale(&e, 1.0 / en));
            }
        }
        debug_assert_eq!(frame.len(), self.dim);
        frame
    }
}
