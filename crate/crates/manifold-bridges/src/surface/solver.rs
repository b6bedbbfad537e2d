//! Geodesic initial-value, boundary-value, and Jacobi-field integration.
//!
//! All integrations use a classical fixed-step fourth-order Runge-Kutta
//! scheme on the chart parametrized over s in [0, 1]; the transverse Jacobi
//! pair (u1, u2) rides along the same pass, which also yields the radial
//! Hessian u2/u1 and the Jacobian determinant u1/length at the far end.

use nalgebra::Matrix2;

use crate::error::GeometryError;

use super::{lift_target, SurfaceShape};

/// Node count for single development steps (short segments).
pub fn step_nodes(speed: f64) -> usize {
    ((speed / 0.005).ceil() as usize).clamp(4, 64)
}

/// Node count for warm in-path boundary-value solves.
pub fn engine_nodes(gap: f64) -> usize {
    ((gap / 0.03).ceil() as usize).clamp(16, 200)
}

fn geodesic_rhs(shape: &SurfaceShape, y: &[f64; 4]) -> [f64; 4] {
    let gamma = shape.christoffel(&[y[0], y[1]]);
    let p = [y[2], y[3]];
    let mut acc = [0.0; 2];
    for k in 0..2 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += gamma[k][i][j] * p[i] * p[j];
            }
        }
        acc[k] = -s;
    }
    [p[0], p[1], acc[0], acc[1]]
}

fn rk4_step<const N: usize>(f: impl Fn(&[f64; N]) -> [f64; N], y: &[f64; N], h: f64) -> [f64; N] {
    let k1 = f(y);
    let mut y2 = *y;
    for i in 0..N {
        y2[i] += 0.5 * h * k1[i];
    }
    let k2 = f(&y2);
    let mut y3 = *y;
    for i in 0..N {
        y3[i] += 0.5 * h * k2[i];
    }
    let k3 = f(&y3);
    let mut y4 = *y;
    for i in 0..N {
        y4[i] += h * k3[i];
    }
    let k4 = f(&y4);
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Endpoint of the geodesic with initial velocity `v0` after unit parameter.
pub fn integrate_endpoint(shape: &SurfaceShape, q0: [f64; 2], v0: [f64; 2], n: usize) -> [f64; 2] {
    let mut y = [q0[0], q0[1], v0[0], v0[1]];
    let h = 1.0 / n as f64;
    for _ in 0..n {
        y = rk4_step(|s| geodesic_rhs(shape, s), &y, h);
    }
    [y[0], y[1]]
}

/// Geodesic plus parallel transport of chart-component vectors.
pub fn integrate_with_transport(
    shape: &SurfaceShape,
    q0: [f64; 2],
    v0: [f64; 2],
    vectors: &[Vec<f64>],
    n: usize,
) -> ([f64; 2], Vec<Vec<f64>>) {
    // State: q, p, then two components per transported vector.
    let m = vectors.len();
    let mut y = vec![q0[0], q0[1], v0[0], v0[1]];
    for v in vectors {
        y.push(v[0]);
        y.push(v[1]);
    }
    let h = 1.0 / n as f64;
    let rhs = |state: &[f64]| -> Vec<f64> {
        let gamma = shape.christoffel(&[state[0], state[1]]);
        let p = [state[2], state[3]];
        let mut out = vec![0.0; state.len()];
        out[0] = p[0];
        out[1] = p[1];
        for k in 0..2 {
            let mut s = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    s += gamma[k][i][j] * p[i] * p[j];
                }
            }
            out[2 + k] = -s;
        }
        for v in 0..m {
            let xi = [state[4 + 2 * v], state[5 + 2 * v]];
            for k in 0..2 {
                let mut s = 0.0;
                for i in 0..2 {
                    for j in 0..2 {
                        s += gamma[k][i][j] * p[i] * xi[j];
                    }
                }
                out[4 + 2 * v + k] = -s;
            }
        }
        out
    };
    for _ in 0..n {
        // RK4 on the dynamically sized state.
        let k1 = rhs(&y);
        let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, b)| a + 0.5 * h * b).collect();
        let k2 = rhs(&y2);
        let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, b)| a + 0.5 * h * b).collect();
        let k3 = rhs(&y3);
        let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, b)| a + h * b).collect();
        let k4 = rhs(&y4);
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    let end = [y[0], y[1]];
    let moved = (0..m).map(|v| vec![y[4 + 2 * v], y[5 + 2 * v]]).collect();
    (end, moved)
}

/// Transverse Jacobi data carried to the far end of a geodesic.
#[derive(Clone, Copy, Debug)]
pub struct JacobiData {
    /// u1 at the endpoint: the arc-length Jacobi solution with u1(0) = 0,
    /// u1'(0) = 1.
    pub u1: f64,
    /// u2 at the endpoint: the companion solution with u2(0) = 1, u2'(0) = 0.
    pub u2: f64,
    /// Minimum of u1 over the interior nodes; non-positive flags a
    /// conjugate point.
    pub min_u1: f64,
    pub endpoint: [f64; 2],
}

/// Integrate geodesic and scalar Jacobi pair jointly.
pub fn integrate_jacobi(shape: &SurfaceShape, q0: [f64; 2], v0: [f64; 2], n: usize) -> JacobiData {
    let g = shape.metric(&q0);
    let speed2 = g[(0, 0)] * v0[0] * v0[0] + 2.0 * g[(0, 1)] * v0[0] * v0[1] + g[(1, 1)] * v0[1] * v0[1];
    let speed = speed2.max(0.0).sqrt();
    // In the unit-parameter variable s, d^2 u / ds^2 = -K L^2 u; initial
    // slopes are scaled by L so that u is the arc-length solution.
    let mut y = [q0[0], q0[1], v0[0], v0[1], 0.0, speed, 1.0, 0.0];
    let h = 1.0 / n as f64;
    let mut min_u1 = f64::INFINITY;
    for step in 0..n {
        y = rk4_step(
            |s| {
                let base = geodesic_rhs(shape, &[s[0], s[1], s[2], s[3]]);
                let k = shape.gauss_curvature(&[s[0], s[1]]);
                [
                    base[0],
                    base[1],
                    base[2],
                    base[3],
                    s[5],
                    -k * speed2 * s[4],
                    s[7],
                    -k * speed2 * s[6],
                ]
            },
            &y,
            h,
        );
        if step + 1 < n {
            min_u1 = min_u1.min(y[4]);
        }
    }
    JacobiData {
        u1: y[4],
        u2: y[6],
        min_u1: min_u1.min(y[4]),
        endpoint: [y[0], y[1]],
    }
}

/// One converged geodesic class.
#[derive(Clone, Debug)]
pub struct ClassSolution {
    pub velocity: [f64; 2],
    pub winding: [i32; 2],
    pub length: f64,
    pub residual: f64,
    pub jacobi: JacobiData,
}

const NEWTON_TOL: f64 = 1e-11;
const NEWTON_ACCEPT: f64 = 1e-8;

fn res_norm(r: &[f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

/// Damped Newton iteration on the shooting residual. `Ok` carries the
/// converged initial velocity with its residual, `Err` the best residual
/// reached before giving up.
fn newton_shoot(
    shape: &SurfaceShape,
    q0: [f64; 2],
    target: [f64; 2],
    mut vel: [f64; 2],
    n: usize,
    max_iter: usize,
) -> Result<([f64; 2], f64), f64> {
    let residual = |v: &[f64; 2]| -> [f64; 2] {
        let e = integrate_endpoint(shape, q0, *v, n);
        [e[0] - target[0], e[1] - target[1]]
    };
    let mut r = residual(&vel);
    if !r.iter().all(|x| x.is_finite()) {
        return Err(f64::INFINITY);
    }
    for _ in 0..max_iter {
        let rn = res_norm(&r);
        if rn < NEWTON_TOL {
            return Ok((vel, rn));
        }
        // Finite-difference Jacobian of the endpoint wrt initial velocity.
        let scale = 1e-7 * (1.0 + (vel[0].abs() + vel[1].abs()));
        let mut jac = Matrix2::zeros();
        for j in 0..2 {
            let mut vp = vel;
            vp[j] += scale;
            let rp = residual(&vp);
            if !rp.iter().all(|x| x.is_finite()) {
                return Err(rn);
            }
            for i in 0..2 {
                jac[(i, j)] = (rp[i] - r[i]) / scale;
            }
        }
        let inv = jac.try_inverse().ok_or(rn)?;
        let delta = [
            -(inv[(0, 0)] * r[0] + inv[(0, 1)] * r[1]),
            -(inv[(1, 0)] * r[0] + inv[(1, 1)] * r[1]),
        ];
        let mut accepted = false;
        for lambda in [1.0, 0.5, 0.25, 0.1] {
            let trial = [vel[0] + lambda * delta[0], vel[1] + lambda * delta[1]];
            let rt = residual(&trial);
            if rt.iter().all(|x| x.is_finite()) && res_norm(&rt) < rn {
                vel = trial;
                r = rt;
                accepted = true;
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    let rn = res_norm(&r);
    if rn <= NEWTON_ACCEPT {
        Ok((vel, rn))
    } else {
        Err(rn)
    }
}

fn class_from_velocity(
    shape: &SurfaceShape,
    q0: [f64; 2],
    velocity: [f64; 2],
    winding: [i32; 2],
    residual: f64,
    n: usize,
) -> ClassSolution {
    let g = shape.metric(&q0);
    let length = (g[(0, 0)] * velocity[0] * velocity[0]
        + 2.0 * g[(0, 1)] * velocity[0] * velocity[1]
        + g[(1, 1)] * velocity[1] * velocity[1])
        .max(0.0)
        .sqrt();
    let jacobi = integrate_jacobi(shape, q0, velocity, n);
    ClassSolution {
        velocity,
        winding,
        length,
        residual,
        jacobi,
    }
}

/// Warm re-solve of a known winding class from a previous velocity.
pub fn polish_class(
    shape: &SurfaceShape,
    q0: [f64; 2],
    q1: [f64; 2],
    winding: [i32; 2],
    vel_init: [f64; 2],
    n: usize,
) -> Option<ClassSolution> {
    let target = lift_target(shape, q1, winding);
    let (vel, rn) = newton_shoot(shape, q0, target, vel_init, n, 10).ok()?;
    Some(class_from_velocity(shape, q0, vel, winding, rn, n))
}

/// Solve every winding class from cold starts; result sorted by length.
pub fn enumerate_classes(
    shape: &SurfaceShape,
    q0: [f64; 2],
    q1: [f64; 2],
    n: usize,
) -> Result<Vec<ClassSolution>, GeometryError> {
    let periodic = shape.periodic();
    let range = |p: bool| if p { -1..=1 } else { 0..=0 };
    let mut found: Vec<ClassSolution> = Vec::new();
    let mut best_residual = f64::INFINITY;
    for k0 in range(periodic[0]) {
        for k1 in range(periodic[1]) {
            let winding = [k0, k1];
            let target = lift_target(shape, q1, winding);
            let delta = [target[0] - q0[0], target[1] - q0[1]];
            let jitter = 0.1 * (delta[0].abs() + delta[1].abs()).max(0.3);
            let seeds = [
                delta,
                [0.8 * delta[0] + jitter, 0.8 * delta[1] - 0.5 * jitter],
                [1.25 * delta[0] - 0.5 * jitter, 1.25 * delta[1] + jitter],
            ];
            for seed in seeds {
                match newton_shoot(shape, q0, target, seed, n, 30) {
                    Ok((vel, rn)) => {
                        let sol = class_from_velocity(shape, q0, vel, winding, rn, n);
                        // Distinct seeds can converge to the same geodesic.
                        let dup = found.iter().any(|f| {
                            (f.velocity[0] - sol.velocity[0]).abs() < 1e-6
                                && (f.velocity[1] - sol.velocity[1]).abs() < 1e-6
                        });
                        if !dup {
                            found.push(sol);
                        }
                        break;
                    }
                    Err(rn) => best_residual = best_residual.min(rn),
                }
            }
        }
    }
    if found.is_empty() {
        return Err(GeometryError::GeodesicNoConvergence {
            residual: best_residual,
        });
    }
    found.sort_by(|a, b| a.length.total_cmp(&b.length));
    Ok(found)
}

/// Build the public solution record for the winning class.
pub fn finish_solution(
    shape: &SurfaceShape,
    q0: [f64; 2],
    class: &ClassSolution,
    n: usize,
    keep_nodes: bool,
    near_cut_tie: bool,
) -> super::GeodesicSolution {
    let nodes = if keep_nodes {
        let mut y = [q0[0], q0[1], class.velocity[0], class.velocity[1]];
        let h = 1.0 / n as f64;
        let mut nodes = Vec::with_capacity(n + 1);
        nodes.push(([y[0], y[1]], [y[2], y[3]]));
        for _ in 0..n {
            y = rk4_step(|s| geodesic_rhs(shape, s), &y, h);
            nodes.push(([y[0], y[1]], [y[2], y[3]]));
        }
        nodes
    } else {
        vec![
            (q0, class.velocity),
            (class.jacobi.endpoint, class.velocity),
        ]
    };
    super::GeodesicSolution {
        nodes,
        length: class.length,
        converged: true,
        residual: class.residual,
        velocity: class.velocity,
        winding: class.winding,
        near_cut_tie,
    }
}
