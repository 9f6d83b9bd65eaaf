//! Structural properties of the pair solver: symmetries, scaling, and the
//! behavior of the reconstructed flow field.

mod common;

use common::{film_params, params, planar, Rng};
use nalgebra::{Rotation3, Vector3};
use swim_core::model::{DragConvention, Medium, Swimmer, SwimmerState};
use swim_core::solver::{
    assemble_alpha_system, flow_field, isolated_speed, separation_warnings, solve_alpha,
    solve_motion,
};
use swim_core::Error;

const BULK: Medium = Medium::Bulk3d { mu: 1.0 };
const FILM: Medium = Medium::QuasiTwoD { mu: 1.0, h: 0.2 };

fn random_pair(rng: &mut Rng, drag: DragConvention, planar_only: bool) -> [Swimmer; 2] {
    let p = if planar_only {
        film_params(rng.in_range(-3.0, -1.3), drag)
    } else {
        params(rng.in_range(-3.0, -1.3), drag)
    };
    let a = rng.in_range(20.0, 60.0);
    let phi = rng.in_range(-3.0, 3.0);
    let mut s1 = planar(&p, 0.0, 0.0, rng.in_range(-3.0, 3.0));
    let mut s2 = planar(&p, a * phi.cos(), a * phi.sin(), rng.in_range(-3.0, 3.0));
    if !planar_only {
        // Tip both axes out of the plane to exercise the full 3D paths.
        for s in [&mut s1, &mut s2] {
            let z = rng.in_range(-0.5, 0.5);
            s.state.tau = (s.state.tau + Vector3::new(0.0, 0.0, z)).normalize();
        }
        s2.state.x_c.z = rng.in_range(-5.0, 5.0);
    }
    [s1, s2]
}

#[test]
fn bulk_rates_are_rotation_equivariant() {
    let mut rng = Rng(0x5eed_0001);
    for trial in 0..10 {
        let pair = random_pair(&mut rng, DragConvention::PointForce, false);
        let rot = Rotation3::from_scaled_axis(Vector3::new(
            rng.in_range(-2.0, 2.0),
            rng.in_range(-2.0, 2.0),
            rng.in_range(-2.0, 2.0),
        ));
        let turned: [Swimmer; 2] = [0, 1].map(|i| Swimmer {
            params: pair[i].params,
            state: SwimmerState {
                x_c: rot * pair[i].state.x_c,
                tau: rot * pair[i].state.tau,
            },
        });
        let (_, kin) = solve_motion(&pair, &BULK).unwrap();
        let (_, kin_t) = solve_motion(&turned, &BULK).unwrap();
        for i in 0..2 {
            let dv = (rot * kin[i].v_c - kin_t[i].v_c).norm();
            let dw = (rot * kin[i].omega - kin_t[i].omega).norm();
            assert!(
                dv <= 1e-12 * kin[i].v_c.norm() && dw <= 1e-12,
                "trial {trial}: rotation broke equivariance (dv={dv:.2e}, dw={dw:.2e})"
            );
        }
    }
}

#[test]
fn film_rates_are_equivariant_under_in_plane_rotation() {
    let mut rng = Rng(0x5eed_0002);
    for _ in 0..10 {
        let pair = random_pair(&mut rng, DragConvention::Stokes, true);
        let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), rng.in_range(-3.0, 3.0));
        let turned: [Swimmer; 2] = [0, 1].map(|i| Swimmer {
            params: pair[i].params,
            state: SwimmerState {
                x_c: rot * pair[i].state.x_c,
                tau: rot * pair[i].state.tau,
            },
        });
        let (_, kin) = solve_motion(&pair, &FILM).unwrap();
        let (_, kin_t) = solve_motion(&turned, &FILM).unwrap();
        for i in 0..2 {
            assert!((rot * kin[i].v_c - kin_t[i].v_c).norm() <= 1e-12 * kin[i].v_c.norm());
            assert!((rot * kin[i].omega - kin_t[i].omega).norm() <= 1e-12);
        }
    }
}

#[test]
fn swapping_the_swimmers_swaps_the_answer() {
    let mut rng = Rng(0x5eed_0003);
    for medium in [BULK, FILM] {
        let planar_only = matches!(medium, Medium::QuasiTwoD { .. });
        let pair = random_pair(&mut rng, DragConvention::PointForce, planar_only);
        let swapped = [pair[1].clone(), pair[0].clone()];
        let (_, kin) = solve_motion(&pair, &medium).unwrap();
        let (_, kin_s) = solve_motion(&swapped, &medium).unwrap();
        for i in 0..2 {
            let dv = (kin[i].v_c - kin_s[1 - i].v_c).norm();
            assert!(
                dv <= 1e-12 * kin[i].v_c.norm(),
                "order of swimmers leaked into the solution (dv={dv:.2e})"
            );
        }
    }
}

#[test]
fn rates_scale_linearly_with_propulsion() {
    let mut rng = Rng(0x5eed_0004);
    let pair = random_pair(&mut rng, DragConvention::Stokes, false);
    let boosted: [Swimmer; 2] = [0, 1].map(|i| {
        let mut s = pair[i].clone();
        s.params.f_p *= 2.0;
        s
    });
    let sys = assemble_alpha_system(&pair, &BULK).unwrap();
    let sol = solve_alpha(&sys, &pair).unwrap();
    let sys_b = assemble_alpha_system(&boosted, &BULK).unwrap();
    let sol_b = solve_alpha(&sys_b, &boosted).unwrap();
    for i in 0..2 {
        // The thrust split is scale-free; the forces carry the factor.
        assert!((sol.alpha[i] - sol_b.alpha[i]).abs() <= 1e-13);
        assert!((2.0 * sol.forces[i].head - sol_b.forces[i].head).norm() <= 1e-13);
    }
    let (_, kin) = solve_motion(&pair, &BULK).unwrap();
    let (_, kin_b) = solve_motion(&boosted, &BULK).unwrap();
    for i in 0..2 {
        assert!((2.0 * kin[i].v_c - kin_b[i].v_c).norm() <= 1e-12 * kin_b[i].v_c.norm());
        assert!((2.0 * kin[i].omega - kin_b[i].omega).norm() <= 1e-12);
    }
}

#[test]
fn distant_swimmers_decouple() {
    for (medium, p) in [
        (BULK, params(-2.0, DragConvention::PointForce)),
        (FILM, film_params(-2.0, DragConvention::PointForce)),
    ] {
        let v0 = isolated_speed(&p, &medium).unwrap();
        let pair = [
            planar(&p, 0.0, 0.0, 0.3),
            planar(&p, 1e5, 3e4, -1.1),
        ];
        let (_, kin) = solve_motion(&pair, &medium).unwrap();
        for (i, k) in kin.iter().enumerate() {
            let speed = k.v_c.dot(&pair[i].state.tau);
            assert!(
                (speed - v0).abs() <= 1e-9 * v0,
                "swimmer {i} still feels its partner at 1e5 lengths: {speed} vs {v0}"
            );
            assert!(k.omega.norm() <= 1e-12);
        }
    }
}

#[test]
fn every_solve_balances_force_and_torque() {
    let mut rng = Rng(0x5eed_0005);
    for trial in 0..20 {
        let drag = if trial % 2 == 0 {
            DragConvention::Stokes
        } else {
            DragConvention::PointForce
        };
        let (medium, planar_only) = if trial % 3 == 0 {
            (FILM, true)
        } else {
            (BULK, false)
        };
        let pair = random_pair(&mut rng, drag, planar_only);
        let sys = assemble_alpha_system(&pair, &medium).unwrap();
        let sol = solve_alpha(&sys, &pair).unwrap();
        for i in 0..2 {
            let f_p = pair[i].params.f_p;
            assert!(
                sol.force_residual[i] <= 1e-12 * f_p,
                "trial {trial}: net force {:.2e}",
                sol.force_residual[i]
            );
            assert!(
                sol.torque_residual[i] <= 1e-12 * f_p * pair[i].params.half_length,
                "trial {trial}: net torque {:.2e}",
                sol.torque_residual[i]
            );
        }
    }
}

#[test]
fn reconstructed_flow_is_incompressible() {
    let mut rng = Rng(0x5eed_0006);
    for (medium, planar_only) in [(BULK, false), (FILM, true)] {
        let pair = random_pair(&mut rng, DragConvention::Stokes, planar_only);
        let sys = assemble_alpha_system(&pair, &medium).unwrap();
        let sol = solve_alpha(&sys, &pair).unwrap();
        let u = |x: Vector3<f64>| flow_field(&x, &pair, &sol, &medium).unwrap();
        let h = 1e-4;
        for probe in [
            Vector3::new(7.0, 3.0, 0.0),
            Vector3::new(-4.0, 9.0, 0.0),
            Vector3::new(11.0, -6.0, 0.0),
        ] {
            let mut div = 0.0;
            let dims = if planar_only { 2 } else { 3 };
            for k in 0..dims {
                let mut e = Vector3::zeros();
                e[k] = h;
                div += (u(probe + e)[k] - u(probe - e)[k]) / (2.0 * h);
            }
            assert!(
                div.abs() <= 1e-6,
                "divergence {div:.2e} at {probe:?} in {medium:?}"
            );
            if planar_only {
                assert_eq!(u(probe).z, 0.0, "film flow left the plane");
            }
        }
    }
}

#[test]
fn flow_scales_with_propulsion_strength() {
    let p = params(-3.0, DragConvention::Stokes);
    let strong = swim_core::model::SwimmerParams { f_p: 2.0, ..p };
    let probe = Vector3::new(4.0, 2.5, 0.0);
    let mut values = Vec::new();
    for q in [p, strong] {
        let group = [planar(&q, 0.0, 0.0, 0.0)];
        let sys = assemble_alpha_system(&group, &BULK).unwrap();
        let sol = solve_alpha(&sys, &group).unwrap();
        values.push(flow_field(&probe, &group, &sol, &BULK).unwrap());
    }
    assert!((2.0 * values[0] - values[1]).norm() <= 1e-14);
}

#[test]
fn overlap_is_rejected_and_close_range_warns() {
    let p = params(-2.0, DragConvention::Stokes);
    let touching = [planar(&p, 0.0, 0.0, 0.0), planar(&p, 2.05, 0.0, 0.0)];
    let err = solve_motion(&touching, &BULK).unwrap_err();
    assert!(matches!(err, Error::OverlappingSwimmers { .. }), "{err:?}");

    let close = [planar(&p, 0.0, 0.0, 0.0), planar(&p, 6.0, 0.0, 0.0)];
    assert!(!separation_warnings(&close).is_empty());
    let far = [planar(&p, 0.0, 0.0, 0.0), planar(&p, 60.0, 0.0, 0.0)];
    assert!(separation_warnings(&far).is_empty());
}
