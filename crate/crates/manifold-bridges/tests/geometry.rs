//! Oracle tests for the closed-form manifold zoo.

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use nalgebra::{Matrix3, UnitQuaternion, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use manifold_bridges::linalg::{dot, norm, scale};
use manifold_bridges::{Manifold, ManifoldPoint, RadialScratch, TangentVector};

fn sphere2() -> Manifold {
    Manifold::from_id("sphere2").unwrap()
}

fn pt(m: &Manifold, coords: &[f64]) -> ManifoldPoint {
    m.point(coords.to_vec()).unwrap()
}

fn tangent(p: &ManifoldPoint, components: &[f64]) -> TangentVector {
    TangentVector {
        base: p.clone(),
        components: components.to_vec(),
    }
}

fn rot_z(theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    vec![c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]
}

fn all_manifolds() -> Vec<Manifold> {
    ["sphere2", "sphere3", "cylinder", "flat-torus", "so3"]
        .iter()
        .map(|id| Manifold::from_id(id).unwrap())
        .collect()
}

fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Random point, uniform-ish per manifold.
fn random_point(m: &Manifold, rng: &mut ChaCha8Rng) -> ManifoldPoint {
    match m.id().to_string().as_str() {
        "cylinder" => pt(
            m,
            &[
                rng.random_range(0.0..(2.0 * PI)),
                rng.random_range(-2.0..2.0),
            ],
        ),
        "flat-torus" => pt(
            m,
            &[
                rng.random_range(0.0..(2.0 * PI)),
                rng.random_range(0.0..(2.0 * PI)),
            ],
        ),
        "so3" => {
            let w = normal_vec(rng, 3);
            let frame = m.canonical_frame(&pt(m, &rot_z(0.0))).unwrap();
            let mut comp = vec![0.0; 9];
            for (i, wi) in w.iter().enumerate() {
                for (c, f) in comp.iter_mut().zip(&frame.frame[i]) {
                    *c += wi * f;
                }
            }
            m.exp_components(&pt(m, &rot_z(0.0)), &comp).unwrap()
        }
        _ => {
            let raw = normal_vec(rng, m.coord_len());
            m.point(scale(&raw, 1.0 / norm(&raw))).unwrap()
        }
    }
}

/// Random tangent with the given Riemannian norm.
fn random_tangent(m: &Manifold, x: &ManifoldPoint, len: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let frame = m.canonical_frame(x).unwrap();
    let coeffs = normal_vec(rng, m.dim());
    let cn = norm(&coeffs);
    let mut out = vec![0.0; m.coord_len()];
    for (c, e) in coeffs.iter().zip(&frame.frame) {
        for (o, ei) in out.iter_mut().zip(e) {
            *o += c / cn * len * ei;
        }
    }
    out
}

// ---------------------------------------------------------------- distance

#[test]
fn distance_antipodal_sphere() {
    let m = sphere2();
    let n = pt(&m, &[0.0, 0.0, 1.0]);
    let s = pt(&m, &[0.0, 0.0, -1.0]);
    assert_abs_diff_eq!(m.distance(&n, &s).unwrap(), PI, epsilon = 1e-12);
}

#[test]
fn distance_identity_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in all_manifolds() {
        let x = random_point(&m, &mut rng);
        assert!(m.distance(&x, &x).unwrap() < 1e-12, "{}", m.id());
    }
}

#[test]
fn distance_so3_quarter_turn_matches_quaternion_oracle() {
    let m = Manifold::from_id("so3").unwrap();
    let i = pt(&m, &rot_z(0.0));
    let q = pt(&m, &rot_z(PI / 2.0));
    assert_abs_diff_eq!(m.distance(&i, &q).unwrap(), PI / 2.0, epsilon = 1e-12);

    // Quaternion-based rotation-angle oracle on random pairs.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let a = random_point(&m, &mut rng);
        let b = random_point(&m, &mut rng);
        let ma = Matrix3::from_row_slice(&a.coords);
        let mb = Matrix3::from_row_slice(&b.coords);
        let rel = nalgebra::Rotation3::from_matrix_unchecked(ma.transpose() * mb);
        let oracle = UnitQuaternion::from_rotation_matrix(&rel).angle();
        assert_abs_diff_eq!(m.distance(&a, &b).unwrap(), oracle, epsilon = 1e-9);
    }
}

#[test]
fn distance_mismatched_manifolds_is_usage_error() {
    let s2 = sphere2();
    let cyl = Manifold::from_id("cylinder").unwrap();
    let x = pt(&s2, &[1.0, 0.0, 0.0]);
    let v = pt(&cyl, &[0.0, 0.0]);
    assert!(s2.distance(&x, &v).is_err());
}

#[test]
fn distance_symmetry_and_triangle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in all_manifolds() {
        for _ in 0..40 {
            let a = random_point(&m, &mut rng);
            let b = random_point(&m, &mut rng);
            let c = random_point(&m, &mut rng);
            let ab = m.distance(&a, &b).unwrap();
            let ba = m.distance(&b, &a).unwrap();
            assert_abs_diff_eq!(ab, ba, epsilon = 1e-10);
            let ac = m.distance(&a, &c).unwrap();
            let cb = m.distance(&c, &b).unwrap();
            assert!(ab <= ac + cb + 1e-10, "{}", m.id());
        }
    }
}

// ------------------------------------------------------------------ log/exp

#[test]
fn log_at_base_point_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for m in all_manifolds() {
        let x = random_point(&m, &mut rng);
        let log = m.log_map(&x, &x).unwrap();
        assert!(norm(&log.vector.components) < 1e-12);
        assert!(!log.at_cut);
    }
}

#[test]
fn log_quarter_great_circle() {
    let m = sphere2();
    let x = pt(&m, &[1.0, 0.0, 0.0]);
    let v = pt(&m, &[0.0, 1.0, 0.0]);
    let log = m.log_map(&x, &v).unwrap();
    let expected = [0.0, PI / 2.0, 0.0];
    for (got, want) in log.vector.components.iter().zip(&expected) {
        assert_abs_diff_eq!(*got, *want, epsilon = 1e-12);
    }
    // Round-trip through exp.
    let back = m.exp_map(&x, &log.vector).unwrap();
    assert!(m.distance(&back, &v).unwrap() < 1e-12);
}

#[test]
fn log_at_antipode_is_zero_with_flag() {
    let m = sphere2();
    let x = pt(&m, &[1.0, 0.0, 0.0]);
    let v = pt(&m, &[-1.0, 0.0, 0.0]);
    let log = m.log_map(&x, &v).unwrap();
    assert!(log.at_cut);
    assert!(norm(&log.vector.components) == 0.0);
}

#[test]
fn exp_zero_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in all_manifolds() {
        let x = random_point(&m, &mut rng);
        let w = tangent(&x, &vec![0.0; m.coord_len()]);
        let y = m.exp_map(&x, &w).unwrap();
        assert!(m.distance(&x, &y).unwrap() < 1e-12);
    }
}

#[test]
fn exp_half_great_circle() {
    let m = sphere2();
    let x = pt(&m, &[0.0, 0.0, 1.0]);
    let w = tangent(&x, &[PI, 0.0, 0.0]);
    let y = m.exp_map(&x, &w).unwrap();
    assert!(m.distance(&y, &pt(&m, &[0.0, 0.0, -1.0])).unwrap() < 1e-9);
}

#[test]
fn exp_so3_matches_rodrigues_oracle() {
    let m = Manifold::from_id("so3").unwrap();
    let i = pt(&m, &rot_z(0.0));
    for theta in [0.3, 1.0, 2.5] {
        // skew(0, 0, theta) as a 9-vector, row-major.
        let w = tangent(&i, &[0.0, -theta, 0.0, theta, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let y = m.exp_map(&i, &w).unwrap();
        let oracle = rot_z(theta);
        for (a, b) in y.coords.iter().zip(&oracle) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }
}

#[test]
fn exp_distance_matches_tangent_norm_below_injectivity_radius() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for m in all_manifolds() {
        for _ in 0..50 {
            let x = random_point(&m, &mut rng);
            let len = rng.random_range(0.01..2.8);
            let w = random_tangent(&m, &x, len, &mut rng);
            let y = m.exp_components(&x, &w).unwrap();
            assert_abs_diff_eq!(m.distance(&x, &y).unwrap(), len, epsilon = 1e-8);
        }
    }
}

#[test]
fn log_exp_round_trip_thousand_random_tangents() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in all_manifolds() {
        for _ in 0..1000 {
            let x = random_point(&m, &mut rng);
            let len = rng.random_range(1e-4..3.0_f64.min(PI - 0.05));
            let w = random_tangent(&m, &x, len, &mut rng);
            let y = m.exp_components(&x, &w).unwrap();
            let log = m.log_map(&x, &y).unwrap();
            let err: f64 = log
                .vector
                .components
                .iter()
                .zip(&w)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-7, "{}: round-trip error {err}", m.id());
        }
    }
}

// ------------------------------------------------------------------ gradient

#[test]
fn grad_zero_at_target_and_antipode() {
    let m = sphere2();
    let x = pt(&m, &[1.0, 0.0, 0.0]);
    let anti = pt(&m, &[-1.0, 0.0, 0.0]);
    assert!(norm(&m.grad_half_sq_dist(&x, &x).unwrap().components) == 0.0);
    assert!(norm(&m.grad_half_sq_dist(&x, &anti).unwrap().components) == 0.0);
}

#[test]
fn grad_quarter_circle_value() {
    let m = sphere2();
    let x = pt(&m, &[1.0, 0.0, 0.0]);
    let v = pt(&m, &[0.0, 1.0, 0.0]);
    let g = m.grad_half_sq_dist(&x, &v).unwrap();
    let expected = [0.0, -PI / 2.0, 0.0];
    for (got, want) in g.components.iter().zip(&expected) {
        assert_abs_diff_eq!(*got, *want, epsilon = 1e-12);
    }
}

/// Central finite differences of d(., v)^2 / 2 in normal coordinates.
fn fd_gradient_check(m: &Manifold, x: &ManifoldPoint, v: &ManifoldPoint, tol: f64) {
    let frame = m.canonical_frame(x).unwrap();
    let g = m.grad_half_sq_dist(x, v).unwrap();
    let h = 1e-5;
    for e in &frame.frame {
        let step = scale(e, h);
        let xp = m.exp_components(x, &step).unwrap();
        let xm = m.exp_components(x, &scale(e, -h)).unwrap();
        let fp = 0.5 * m.distance(&xp, v).unwrap().powi(2);
        let fm = 0.5 * m.distance(&xm, v).unwrap().powi(2);
        let fd = (fp - fm) / (2.0 * h);
        let exact = m.inner(x, &g.components, e);
        assert!(
            (fd - exact).abs() < tol,
            "{}: fd {fd} vs grad {exact}",
            m.id()
        );
    }
}

#[test]
fn grad_matches_finite_differences_at_500_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for m in all_manifolds() {
        let mut checked = 0;
        while checked < 500 {
            let x = random_point(&m, &mut rng);
            let v = random_point(&m, &mut rng);
            let cut = m.cut_locus_query(&x, &v).unwrap();
            let r = m.distance(&x, &v).unwrap();
            // Keep away from both the cut locus and the r = 0 kink.
            if cut.distance_to_cut < 0.05 || r < 0.05 {
                continue;
            }
            fd_gradient_check(&m, &x, &v, 1e-5);
            checked += 1;
        }
    }
}

// ----------------------------------------------------------------- theta

#[test]
fn theta_tends_to_one_for_small_r() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for m in all_manifolds() {
        let x = random_point(&m, &mut rng);
        let w = random_tangent(&m, &x, 1e-5, &mut rng);
        let y = m.exp_components(&x, &w).unwrap();
        let theta = m.theta_jacobian(&x, &y).unwrap();
        assert_abs_diff_eq!(theta, 1.0, epsilon = 1e-9);
    }
}

#[test]
fn theta_sphere_half_pi() {
    let m = sphere2();
    let v = pt(&m, &[0.0, 0.0, 1.0]);
    let x = pt(&m, &[1.0, 0.0, 0.0]);
    assert_abs_diff_eq!(
        m.theta_jacobian(&v, &x).unwrap(),
        2.0 / PI,
        epsilon = 1e-12
    );
}

#[test]
fn theta_flat_torus_is_one() {
    let m = Manifold::from_id("flat-torus").unwrap();
    let v = pt(&m, &[0.3, 0.4]);
    let x = pt(&m, &[2.0, 1.0]);
    assert_abs_diff_eq!(m.theta_jacobian(&v, &x).unwrap(), 1.0, epsilon = 1e-15);
}

#[test]
fn theta_beyond_cut_is_an_error() {
    let m = sphere2();
    let v = pt(&m, &[0.0, 0.0, 1.0]);
    let x = pt(&m, &[0.0, 0.0, -1.0]);
    assert!(m.theta_jacobian(&v, &x).is_err());
}

/// RK4 integration of the scalar Jacobi equation a'' + K a = 0 with constant
/// curvature, as an independent oracle for the closed-form Theta.
fn jacobi_ode_oracle(curvature: f64, r: f64, steps: usize) -> f64 {
    let mut a = 0.0_f64;
    let mut da = 1.0_f64;
    let h = r / steps as f64;
    for _ in 0..steps {
        let f = |a: f64, da: f64| (da, -curvature * a);
        let (k1a, k1d) = f(a, da);
        let (k2a, k2d) = f(a + 0.5 * h * k1a, da + 0.5 * h * k1d);
        let (k3a, k3d) = f(a + 0.5 * h * k2a, da + 0.5 * h * k2d);
        let (k4a, k4d) = f(a + h * k3a, da + h * k3d);
        a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        da += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    }
    a
}

#[test]
fn theta_closed_form_matches_jacobi_ode_oracle() {
    let s2 = sphere2();
    let so3 = Manifold::from_id("so3").unwrap();
    let vs = pt(&s2, &[0.0, 0.0, 1.0]);
    let vr = pt(&so3, &rot_z(0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut r = 0.05;
    while r < PI - 0.1 {
        // Sphere: K = 1, one transverse dimension.
        let w = random_tangent(&s2, &vs, r, &mut rng);
        let x = s2.exp_components(&vs, &w).unwrap();
        let oracle = jacobi_ode_oracle(1.0, r, 200) / r;
        assert_abs_diff_eq!(s2.theta_jacobian(&vs, &x).unwrap(), oracle, epsilon = 1e-6);

        // SO(3): K = 1/4, two transverse dimensions.
        let w = random_tangent(&so3, &vr, r, &mut rng);
        let x = so3.exp_components(&vr, &w).unwrap();
        let a = jacobi_ode_oracle(0.25, r, 200) / r;
        assert_abs_diff_eq!(
            so3.theta_jacobian(&vr, &x).unwrap(),
            a * a,
            epsilon = 1e-6
        );
        r += 0.15;
    }
}

// ------------------------------------------------- radial log-theta derivative

#[test]
fn log_theta_derivative_flat_cylinder_is_zero() {
    let m = Manifold::from_id("cylinder").unwrap();
    let v = pt(&m, &[0.2, -1.0]);
    let x = pt(&m, &[1.4, 0.7]);
    assert_abs_diff_eq!(m.d_r_log_theta_negsqrt(&v, &x).unwrap(), 0.0, epsilon = 0.0);
}

#[test]
fn log_theta_derivative_sphere_values() {
    let m = sphere2();
    let v = pt(&m, &[0.0, 0.0, 1.0]);
    let x = pt(&m, &[1.0, 0.0, 0.0]);
    // Symbolic: -(1/2) d/dr log(sin r / r) at r = pi/2 equals 1/pi.
    assert_abs_diff_eq!(
        m.d_r_log_theta_negsqrt(&v, &x).unwrap(),
        1.0 / PI,
        epsilon = 1e-12
    );
    // Series: ~ r/6 for small r.
    let r = 1e-6;
    let x = m
        .exp_components(&v, &[r, 0.0, 0.0])
        .unwrap();
    assert_abs_diff_eq!(
        m.d_r_log_theta_negsqrt(&v, &x).unwrap(),
        r / 6.0,
        epsilon = 1e-12
    );
}

/// Symbolic-differentiation oracle via high-order central differences of
/// -(1/2) log Theta.
#[test]
fn log_theta_derivative_matches_finite_differences() {
    let m = sphere2();
    let v = pt(&m, &[0.0, 0.0, 1.0]);
    for r in [0.3, 0.9, 1.6, 2.4] {
        let x = m.exp_components(&v, &[r, 0.0, 0.0]).unwrap();
        let h = 1e-5;
        let th = |rr: f64| -> f64 {
            let xx = m.exp_components(&v, &[rr, 0.0, 0.0]).unwrap();
            -(0.5) * m.theta_jacobian(&v, &xx).unwrap().ln()
        };
        let fd = (th(r + h) - th(r - h)) / (2.0 * h);
        assert_abs_diff_eq!(m.d_r_log_theta_negsqrt(&v, &x).unwrap(), fd, epsilon = 1e-8);
    }
}

// -------------------------------------------------------------- transport

#[test]
fn transport_zero_step_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in all_manifolds() {
        let x = random_point(&m, &mut rng);
        let f = m.canonical_frame(&x).unwrap();
        let w = tangent(&x, &vec![0.0; m.coord_len()]);
        let g = m.parallel_transport_step(&f, &w).unwrap();
        assert!(m.distance(&f.base, &g.base).unwrap() < 1e-12);
        for (a, b) in f.frame.iter().zip(&g.frame) {
            for (ai, bi) in a.iter().zip(b) {
                assert_abs_diff_eq!(*ai, *bi, epsilon = 1e-10);
            }
        }
    }
}

#[test]
fn transport_around_octant_loop_rotates_by_holonomy_angle() {
    // North pole -> (1,0,0) -> (0,1,0) -> north pole encloses one octant,
    // solid angle pi/2, so the frame comes back rotated by pi/2.
    let m = sphere2();
    let north = pt(&m, &[0.0, 0.0, 1.0]);
    let a = pt(&m, &[1.0, 0.0, 0.0]);
    let b = pt(&m, &[0.0, 1.0, 0.0]);
    let mut f = m.canonical_frame(&north).unwrap();
    let start = f.clone();
    for leg in [&a, &b, &north] {
        let w = m.log_map(&f.base, leg).unwrap();
        f = m.parallel_transport_step(&f, &w.vector).unwrap();
    }
    assert!(m.distance(&f.base, &north).unwrap() < 1e-9);
    let c = m.inner(&north, &f.frame[0], &start.frame[0]);
    let s = m.inner(&north, &f.frame[0], &start.frame[1]);
    let angle = s.atan2(c).abs();
    assert_abs_diff_eq!(angle, PI / 2.0, epsilon = 1e-9);
}

#[test]
fn transport_flat_torus_is_componentwise_identity() {
    let m = Manifold::from_id("flat-torus").unwrap();
    let x = pt(&m, &[1.0, 2.0]);
    let moved = m.parallel_transport(&x, &[0.3, -0.4], &[0.7, 0.2]).unwrap();
    assert_eq!(moved, vec![0.7, 0.2]);
}

#[test]
fn transport_preserves_inner_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for m in all_manifolds() {
        for _ in 0..50 {
            let x = random_point(&m, &mut rng);
            let f = m.canonical_frame(&x).unwrap();
            let w = random_tangent(&m, &x, rng.random_range(0.001..0.5), &mut rng);
            let g = m.transport_step_components(&f, &w).unwrap();
            assert!(m.frame_defect(&g) < 1e-8, "{}", m.id());
        }
    }
}

// ---------------------------------------------------------------- cut locus

#[test]
fn cut_query_at_target() {
    let m = sphere2();
    let x = pt(&m, &[0.0, 0.0, 1.0]);
    let info = m.cut_locus_query(&x, &x).unwrap();
    assert!(!info.is_near_cut);
    assert_abs_diff_eq!(info.distance_to_cut, PI, epsilon = 1e-12);
}

#[test]
fn cut_query_cylinder_opposite_ruling() {
    let m = Manifold::from_id("cylinder").unwrap();
    let v = pt(&m, &[0.0, 0.0]);
    let x = pt(&m, &[PI, 5.0]);
    let info = m.cut_locus_query(&x, &v).unwrap();
    assert!(info.is_near_cut);
}

#[test]
fn cut_query_sphere_equator() {
    let m = sphere2();
    let v = pt(&m, &[0.0, 0.0, 1.0]);
    let x = pt(&m, &[1.0, 0.0, 0.0]);
    let info = m.cut_locus_query(&x, &v).unwrap();
    assert_abs_diff_eq!(info.distance_to_cut, PI / 2.0, epsilon = 1e-12);
}

// ---------------------------------------------------------- half laplacian

#[test]
fn half_laplacian_values() {
    let torus = Manifold::from_id("flat-torus").unwrap();
    let x = pt(&torus, &[0.2, 0.4]);
    let v = pt(&torus, &[1.2, 2.0]);
    assert_abs_diff_eq!(torus.half_laplacian_sq_dist(&x, &v).unwrap(), 2.0, epsilon = 1e-14);

    let m = sphere2();
    let v = pt(&m, &[0.0, 0.0, 1.0]);
    let x = pt(&m, &[1.0, 0.0, 0.0]);
    assert_abs_diff_eq!(m.half_laplacian_sq_dist(&x, &v).unwrap(), 1.0, epsilon = 1e-12);

    let near = m.exp_components(&v, &[1e-5, 0.0, 0.0]).unwrap();
    assert_abs_diff_eq!(m.half_laplacian_sq_dist(&near, &v).unwrap(), 2.0, epsilon = 1e-9);
}

#[test]
fn half_laplacian_bounded_by_dimension_on_spheres() {
    // nu = d, lambda = 0 is admissible for the radial moment bound.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for id in ["sphere2", "sphere3", "so3"] {
        let m = Manifold::from_id(id).unwrap();
        let d = m.dim() as f64;
        for _ in 0..300 {
            let x = random_point(&m, &mut rng);
            let v = random_point(&m, &mut rng);
            if m.cut_locus_query(&x, &v).unwrap().distance_to_cut < 1e-3
                || m.distance(&x, &v).unwrap() < 1e-6
            {
                continue;
            }
            let val = m.half_laplacian_sq_dist(&x, &v).unwrap();
            assert!(val <= d + 1e-9, "{id}: {val} > {d}");
        }
    }
}

// ------------------------------------------------------------ radial data

#[test]
fn radial_geometry_gradient_is_unit_norm_off_cut() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for m in all_manifolds() {
        for _ in 0..50 {
            let x = random_point(&m, &mut rng);
            let v = random_point(&m, &mut rng);
            let r = m.distance(&x, &v).unwrap();
            if m.cut_locus_query(&x, &v).unwrap().distance_to_cut < 1e-3 || r < 1e-3 {
                continue;
            }
            let rad = m
                .radial_geometry(&v, &x, &mut RadialScratch::default())
                .unwrap();
            assert!(!rad.at_cut);
            assert_abs_diff_eq!(rad.r, r, epsilon = 1e-12);
            let n = m.inner(&x, &rad.grad_r, &rad.grad_r).sqrt();
            assert_abs_diff_eq!(n, 1.0, epsilon = 1e-9);
            // Moving along grad r increases the distance at unit rate.
            let h = 1e-6;
            let step: Vec<f64> = scale(&rad.grad_r, h);
            let xp = m.exp_components(&x, &step).unwrap();
            let fd = (m.distance(&xp, &v).unwrap() - r) / h;
            assert!((fd - 1.0).abs() < 1e-4, "{}: fd {fd}", m.id());
        }
    }
}

#[test]
fn point_validation_rejects_off_manifold_coordinates() {
    let m = sphere2();
    assert!(m.point(vec![1.0, 0.1, 0.0]).is_err());
    let so3 = Manifold::from_id("so3").unwrap();
    let mut bad = rot_z(0.3);
    bad[0] += 1e-3;
    assert!(so3.point(bad).is_err());
    let torus = Manifold::from_id("flat-torus").unwrap();
    let p = torus.point(vec![-0.5, 7.0]).unwrap();
    assert!(p.coords[0] >= 0.0 && p.coords[0] < 2.0 * PI);
    assert!(p.coords[1] >= 0.0 && p.coords[1] < 2.0 * PI);
}

#[test]
fn tangent_inner_product_so3_normalization() {
    // <skew(w), skew(w)>/2 = |w|^2, so geodesic speed equals rotation angle.
    let m = Manifold::from_id("so3").unwrap();
    let i = pt(&m, &rot_z(0.0));
    let w = [0.0, -0.7, 0.0, 0.7, 0.0, 0.0, 0.0, 0.0, 0.0];
    assert_abs_diff_eq!(m.inner(&i, &w, &w), 0.49, epsilon = 1e-14);
    assert_abs_diff_eq!(dot(&w, &w), 0.98, epsilon = 1e-14);
}
