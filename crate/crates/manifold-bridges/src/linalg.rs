//! Small vector helpers used by the geometry code.
//!
//! Points and tangent components are plain `&[f64]` slices in a
//! manifold-specific representation; these helpers keep that code free of
//! allocation-heavy matrix machinery.

use std::f64::consts::{PI, TAU};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a += s * b`, in place.
pub fn axpy(a: &mut [f64], s: f64, b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += s * y;
    }
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    if n < 1e-300 {
        a.to_vec()
    } else {
        scale(a, 1.0 / n)
    }
}

/// Clamp to [-1, 1] before acos/asin.
pub fn clamp_unit(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Wrap an angle into [0, 2π).
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wrap an angle difference into (-π, π].
pub fn wrap_signed(dtheta: f64) -> f64 {
    let mut d = dtheta.rem_euclid(TAU);
    if d > PI {
        d -= TAU;
    }
    d
}

/// cot(r) - 1/r, evaluated stably near r = 0 where the two poles cancel.
///
/// Series: -r/3 - r^3/45 - 2 r^5/945 - r^7/4725 - ...
pub fn cot_minus_inv(r: f64) -> f64 {
    debug_assert!(r >= 0.0);
    if r < 1e-3 {
        let r2 = r * r;
        -r / 3.0 * (1.0 + r2 * (1.0 / 15.0 + r2 * (2.0 / 315.0 + r2 / 1575.0)))
    } else {
        r.cos() / r.sin() - 1.0 / r
    }
}

/// sin(r)/r with the removable singularity filled in.
pub fn sinc(r: f64) -> f64 {
    if r.abs() < 1e-6 {
        1.0 - r * r / 6.0
    } else {
        r.sin() / r
    }
}

/// Gram-Schmidt re-orthonormalization under a caller-supplied inner product.
///
/// Vectors are modified in place and are expected to be linearly independent;
/// near-degenerate inputs keep their normalized residual direction.
pub fn gram_schmidt<F>(vectors: &mut [Vec<f64>], inner: F)
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    for i in 0..vectors.len() {
        for j in 0..i {
            let proj = inner(&vectors[i], &vectors[j]);
            let vj = vectors[j].clone();
            axpy(&mut vectors[i], -proj, &vj);
        }
        let n = inner(&vectors[i], &vectors[i]).sqrt();
        if n > 1e-300 {
            for x in vectors[i].iter_mut() {
                *x /= n;
            }
        }
    }
}
