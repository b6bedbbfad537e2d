//! The flat torus (S^1)^d with angle coordinates.

use std::f64::consts::PI;

use crate::linalg::{wrap_angle, wrap_signed};

use super::{flat_radial, RadialGeometry, CUT_EPS};

pub struct FlatTorus {
    dim: usize,
}

impl FlatTorus {
    pub fn new(dim: usize) -> Self {
        FlatTorus { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn canonicalize(&self, coords: Vec<f64>) -> Vec<f64> {
        coords.into_iter().map(wrap_angle).collect()
    }

    pub fn distance(&self, x: &[f64], v: &[f64]) -> f64 {
        x.iter()
            .zip(v)
            .map(|(a, b)| {
                let d = wrap_signed(b - a);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Coordinate-wise shortest wrap; any coordinate near the half-turn
    /// offset puts `v` in the cut locus of `x`.
    pub fn log(&self, x: &[f64], v: &[f64]) -> (Vec<f64>, bool) {
        let mut out = Vec::with_capacity(self.dim);
        let mut at_cut = false;
        for (a, b) in x.iter().zip(v) {
            let d = wrap_signed(b - a);
            if d.abs() > PI - CUT_EPS {
                at_cut = true;
            }
            out.push(d);
        }
        if at_cut {
            (vec![0.0; self.dim], true)
        } else {
            (out, false)
        }
    }

    pub fn exp(&self, x: &[f64], w: &[f64]) -> Vec<f64> {
        x.iter().zip(w).map(|(a, b)| wrap_angle(a + b)).collect()
    }

    pub fn distance_to_cut(&self, x: &[f64], v: &[f64]) -> f64 {
        x.iter()
            .zip(v)
            .map(|(a, b)| PI - wrap_signed(b - a).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn radial(&self, x: &[f64], v: &[f64]) -> RadialGeometry {
        let (log, at_cut) = self.log(x, v);
        let r = self.distance(x, v);
        let grad = if r > 1e-14 {
            log.iter().map(|l| -l / r).collect()
        } else {
            vec![0.0; self.dim]
        };
        flat_radial(r, grad, at_cut)
    }
}
