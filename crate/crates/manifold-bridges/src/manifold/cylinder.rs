//! The flat cylinder S^1 x R with (angle, height) coordinates.

use std::f64::consts::PI;

use crate::linalg::{wrap_angle, wrap_signed};

use super::{flat_radial, RadialGeometry, CUT_EPS};

pub struct Cylinder;

impl Cylinder {
    pub fn canonicalize(&self, mut coords: Vec<f64>) -> Vec<f64> {
        coords[0] = wrap_angle(coords[0]);
        coords
    }

    pub fn distance(&self, x: &[f64], v: &[f64]) -> f64 {
        let dtheta = wrap_signed(v[0] - x[0]);
        let dy = v[1] - x[1];
        (dtheta * dtheta + dy * dy).sqrt()
    }

    /// The cut locus of v is the opposite ruling line; the log wraps the
    /// angle the short way and flags points on (or within the band of) that
    /// line.
    pub fn log(&self, x: &[f64], v: &[f64]) -> (Vec<f64>, bool) {
        let dtheta = wrap_signed(v[0] - x[0]);
        if dtheta.abs() > PI - CUT_EPS {
            return (vec![0.0, 0.0], true);
        }
        (vec![dtheta, v[1] - x[1]], false)
    }

    pub fn exp(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        vec![wrap_angle(x[0] + w[0]), x[1] + w[1]]
    }

    pub fn distance_to_cut(&self, x: &[f64], v: &[f64]) -> f64 {
        PI - wrap_signed(v[0] - x[0]).abs()
    }

    pub fn radial(&self, x: &[f64], v: &[f64]) -> RadialGeometry {
        let (log, at_cut) = self.log(x, v);
        let r = self.distance(x, v);
        let grad = if r > 1e-14 {
            vec![-log[0] / r, -log[1] / r]
        } else {
            vec![0.0, 0.0]
        };
        flat_radial(r, grad, at_cut)
    }
}
