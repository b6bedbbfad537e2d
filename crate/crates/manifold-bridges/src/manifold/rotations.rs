//! The rotation group SO(3).
//!
//! Points are row-major 3x3 rotation matrices. Tangent vectors at R are
//! skew-symmetric matrices Omega in body coordinates (the tangent curve is
//! t -> R exp(t Omega)), with the bi-invariant metric <A, B> = tr(A^T B)/2
//! normalized so that geodesic distance equals the rotation angle.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::error::GeometryError;
use crate::linalg::{clamp_unit, cot_minus_inv};

use super::{RadialGeometry, CUT_EPS};

pub struct Rotations3;

fn to_mat(c: &[f64]) -> Matrix3<f64> {
    Matrix3::from_row_slice(c)
}

fn to_vec(m: &Matrix3<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

fn unskew(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// Rodrigues formula for exp of a skew matrix with axis-angle vector w.
fn rotation_exp(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta = w.norm();
    if theta < 1e-12 {
        let k = skew(w);
        return Matrix3::identity() + k + 0.5 * k * k;
    }
    let k = skew(&(w / theta));
    Matrix3::identity() + theta.sin() * k + (1.0 - theta.cos()) * (k * k)
}

/// Axis-angle vector of a rotation matrix; `None` within the cut band at
/// angle pi where the axis is not unique.
fn rotation_log(m: &Matrix3<f64>) -> Result<Vector3<f64>, f64> {
    let angle = clamp_unit((m.trace() - 1.0) / 2.0).acos();
    if angle < 1e-12 {
        // First-order: the skew part already is the log.
        return Ok(unskew(&(0.5 * (m - m.transpose()))));
    }
    if angle > PI - CUT_EPS {
        return Err(angle);
    }
    let axis = unskew(&(m - m.transpose())) / (2.0 * angle.sin());
    Ok(axis * angle)
}

impl Rotations3 {
    pub fn canonicalize(&self, coords: Vec<f64>) -> Result<Vec<f64>, GeometryError> {
        let m = to_mat(&coords);
        let defect = (m.transpose() * m - Matrix3::identity()).norm();
        if defect > 1e-9 || (m.determinant() - 1.0).abs() > 1e-9 {
            return Err(GeometryError::InvalidPoint {
                manifold: "so3".into(),
                reason: format!(
                    "orthogonality defect {defect:.2e}, det {}",
                    m.determinant()
                ),
            });
        }
        Ok(to_vec(&reorthonormalize(&m)))
    }

    pub fn distance(&self, x: &[f64], v: &[f64]) -> f64 {
        let m = to_mat(x).transpose() * to_mat(v);
        clamp_unit((m.trace() - 1.0) / 2.0).acos()
    }

    pub fn log(&self, x: &[f64], v: &[f64]) -> (Vec<f64>, bool) {
        let rel = to_mat(x).transpose() * to_mat(v);
        match rotation_log(&rel) {
            Ok(w) => (to_vec(&skew(&w)), false),
            Err(_) => (vec![0.0; 9], true),
        }
    }

    pub fn exp(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        let omega = unskew(&to_mat(w));
        let next = to_mat(x) * rotation_exp(&omega);
        to_vec(&reorthonormalize(&next))
    }

    /// Parallel transport along exp of the step `w`: in body coordinates the
    /// axis vector rotates by half the step angle about the step axis, in
    /// the opposite sense.
    pub fn transport(&self, w: &[f64], vec: &[f64]) -> Vec<f64> {
        let step = unskew(&to_mat(w));
        let u = unskew(&to_mat(vec));
        let rotated = rotation_exp(&(-0.5 * step)) * u;
        to_vec(&skew(&rotated))
    }

    pub fn distance_to_cut(&self, x: &[f64], v: &[f64]) -> f64 {
        PI - self.distance(x, v)
    }

    pub fn radial(&self, x: &[f64], v: &[f64]) -> RadialGeometry {
        let r = self.distance(x, v);
        let (log, at_cut) = self.log(x, v);
        let grad_r = if at_cut || r < 1e-14 {
            vec![0.0; 9]
        } else {
            log.iter().map(|c| -c / r).collect()
        };
        let half = r / 2.0;
        RadialGeometry {
            r,
            grad_r,
            at_cut,
            // Theta = (sin(r/2)/(r/2))^2, so d/dr log Theta = cot(r/2) - 2/r.
            d_r_log_theta_negsqrt: -0.5 * cot_minus_inv(half),
            radial_hessian: if r > 0.0 {
                1.0 / r + 0.5 * cot_minus_inv(half)
            } else {
                0.0
            },
            jacobi_transverse: 2.0 * half.sin(),
        }
    }

    /// The canonical orthonormal frame skew(e_1), skew(e_2), skew(e_3).
    pub fn frame(&self) -> Vec<Vec<f64>> {
        [Vector3::x(), Vector3::y(), Vector3::z()]
            .iter()
            .map(|e| to_vec(&skew(e)))
            .collect()
    }
}

/// Gram-Schmidt on rows, preserving orientation.
fn reorthonormalize(m: &Matrix3<f64>) -> Matrix3<f64> {
    let r0: Vector3<f64> = m.row(0).transpose().normalize();
    let mut r1: Vector3<f64> = m.row(1).transpose();
    r1 -= r0 * r0.dot(&r1);
    let r1 = r1.normalize();
    let r2 = r0.cross(&r1);
    Matrix3::from_rows(&[r0.transpose(), r1.transpose(), r2.transpose()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skew_roundtrip() {
        let w = Vector3::new(0.3, -0.7, 0.2);
        assert!((unskew(&skew(&w)) - w).norm() < 1e-15);
    }

    #[test]
    fn half_angle_transport_preserves_norm() {
        let so3 = Rotations3;
        let w = to_vec(&skew(&Vector3::new(0.1, 0.2, -0.05)));
        let u = to_vec(&skew(&Vector3::new(-0.4, 0.3, 0.9)));
        let t = so3.transport(&w, &u);
        let n0: f64 = u.iter().map(|x| x * x).sum();
        let n1: f64 = t.iter().map(|x| x * x).sum();
        assert!((n0 - n1).abs() < 1e-12);
    }
}
