//! Exact hydrodynamic interaction solver for N swimmers.
//!
//! Each ball of each swimmer moves with the flow created by every force in
//! the system (plus its own drag response), and each swimmer is rigid: head
//! and tail must share their velocity component along the axis. The free
//! parameters are the thrust partitions `alpha^i` that split each propulsion
//! force between tail (`-alpha f_p tau`) and head (`-(1-alpha) f_p tau`)
//! drag; rigidity of every swimmer closes the system. This module assembles
//! and solves that linear system, turns the resulting ball velocities into
//! rigid-body motion, and evaluates the flow anywhere in the fluid.
//!
//! Two self-interaction closures are supported, selected per swimmer by
//! [`DragConvention`]:
//!
//! * [`DragConvention::Stokes`]: a ball's velocity is the superposition of
//!   the partner-ball flow, the propulsion-point flow, and its own drive
//!   `F / (6 pi mu R)`. The rigidity condition is then independent of the
//!   drag coefficient.
//! * [`DragConvention::PointForce`]: a ball obeys the relative drag law
//!   `F = -gamma_0 (v - u)` with `gamma_0 = 8 pi mu R`, where `u` is the
//!   ambient flow of all other forces (its own propulsion image enters with
//!   the opposite sign compared to the superposition closure).
//!
//! Cross-swimmer coupling blocks are identical in both closures; only the
//! self terms differ. Both yield exactly rigid motion; bulk speeds differ
//! by an O(1) factor between the closures.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::kernels::{gamma0, green};
use crate::model::{derived_points, DerivedPoints, DragConvention, Medium, Swimmer};
use crate::{Error, Result};

/// Relative axial-velocity mismatch above which the motion is rejected as
/// non-rigid. A genuinely inconsistent force set (a passive body advected
/// by a gradient) stretches the axis at the 1e-3 level or worse, while a
/// valid pair solve stays near roundoff until the bodies almost touch,
/// where film kernels leak ppm-level mismatch. The gate sits between the
/// two regimes.
pub const RIGIDITY_LIMIT: f64 = 1e-5;

/// 1-norm condition estimate above which the thrust-partition system is
/// reported singular instead of solved.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Center separations below this multiple of the body length `2L` put the
/// far-field ball model under strain; callers should surface a warning.
pub const NEAR_FIELD_FACTOR: f64 = 5.0;

/// The assembled thrust-partition system `matrix * alpha = rhs`. Row `i` is
/// the rigidity condition of swimmer `i`; the ordering follows the input
/// slice of swimmers.
#[derive(Debug, Clone)]
pub struct AlphaSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

/// Forces on one swimmer's material points (all parallel to its axis).
#[derive(Debug, Clone, Copy)]
pub struct BallForces {
    pub head: Vector3<f64>,
    pub tail: Vector3<f64>,
    pub prop: Vector3<f64>,
}

/// Solved thrust partitions with the induced forces and their residuals.
#[derive(Debug, Clone)]
pub struct AlphaSolution {
    pub alpha: Vec<f64>,
    pub forces: Vec<BallForces>,
    /// `|F_H + F_T + F_P|` per swimmer; zero up to roundoff by construction.
    pub force_residual: Vec<f64>,
    /// Norm of the net torque about the center per swimmer; at roundoff
    /// because all three forces are collinear with the axis.
    pub torque_residual: Vec<f64>,
    /// 1-norm condition estimate of the solved system.
    pub condition: f64,
}

/// Rigid-body motion extracted from the two ball velocities.
#[derive(Debug, Clone, Copy)]
pub struct Kinematics {
    pub v_c: Vector3<f64>,
    pub omega: Vector3<f64>,
    pub v_head: Vector3<f64>,
    pub v_tail: Vector3<f64>,
}

fn quad(g: &Matrix3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    (a.transpose() * g * b)[(0, 0)]
}

fn points_of(swimmers: &[Swimmer]) -> Vec<DerivedPoints> {
    swimmers
        .iter()
        .map(|s| derived_points(&s.params, &s.state))
        .collect()
}

/// Validates a group of swimmers against a medium: parameter constraints,
/// in-plane poses for films, and ball overlaps between different swimmers.
pub fn validate_group(swimmers: &[Swimmer], medium: &Medium) -> Result<()> {
    for s in swimmers {
        s.params.validate()?;
        medium.validate_for(&s.params)?;
        if let Medium::QuasiTwoD { .. } = medium {
            let planar = s.state.x_c.z.abs() <= 1e-9 * s.params.half_length
                && s.state.tau.z.abs() <= 1e-9;
            if !planar {
                return Err(Error::InvalidGeometry(
                    "film swimmers must lie in the plane z = 0 with in-plane axes".into(),
                ));
            }
        }
    }
    let pts = points_of(swimmers);
    for i in 0..swimmers.len() {
        for j in (i + 1)..swimmers.len() {
            let contact = swimmers[i].params.ball_radius + swimmers[j].params.ball_radius;
            for a in [pts[i].head, pts[i].tail] {
                for b in [pts[j].head, pts[j].tail] {
                    let dist = (a - b).norm();
                    if dist < contact {
                        return Err(Error::OverlappingSwimmers { dist, contact });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Advisory notes for configurations that are valid but strain the
/// far-field model (centers closer than [`NEAR_FIELD_FACTOR`] body lengths).
pub fn separation_warnings(swimmers: &[Swimmer]) -> Vec<String> {
    let mut notes = Vec::new();
    for i in 0..swimmers.len() {
        for j in (i + 1)..swimmers.len() {
            let dist = (swimmers[i].state.x_c - swimmers[j].state.x_c).norm();
            let body = 2.0 * swimmers[i].params.half_length.max(swimmers[j].params.half_length);
            if dist < NEAR_FIELD_FACTOR * body {
                notes.push(format!(
                    "swimmers {i} and {j} are {dist:.3} apart, below {NEAR_FIELD_FACTOR} body lengths; far-field accuracy degrades"
                ));
            }
        }
    }
    notes
}

/// Assembles the rigidity system for the thrust partitions.
///
/// Row `i` expresses `tau_i . (v_H^i - v_T^i) = 0`. The self block depends
/// on the swimmer's drag closure; the coupling blocks are the same for both
/// closures and involve only differences of the medium's point-force tensor
/// between the four ball pairings. A swimmer with `f_p = 0` exerts no force
/// at all, so its row pins the (then meaningless) partition to `1/2`.
pub fn assemble_alpha_system(swimmers: &[Swimmer], medium: &Medium) -> Result<AlphaSystem> {
    validate_group(swimmers, medium)?;
    let n = swimmers.len();
    let pts = points_of(swimmers);
    let mut matrix = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);

    for i in 0..n {
        let si = &swimmers[i];
        let tau = si.state.tau;
        let l = si.params.half_length;
        let zeta = si.params.zeta;
        if si.params.f_p == 0.0 {
            matrix[(i, i)] = 1.0;
            rhs[i] = 0.5;
            continue;
        }

        // Self terms along the axis. g_q := tau . G(q L tau) tau.
        let g2 = quad(&green(medium, &(2.0 * l * tau))?, &tau, &tau);
        let g1m = quad(&green(medium, &((1.0 - zeta) * l * tau))?, &tau, &tau);
        let g1p = quad(&green(medium, &((1.0 + zeta) * l * tau))?, &tau, &tau);
        match si.params.drag {
            DragConvention::Stokes => {
                matrix[(i, i)] = 2.0 * g2;
                rhs[i] = g2 - g1m + g1p;
            }
            DragConvention::PointForce => {
                let inv_g = 1.0 / gamma0(si.params.ball_radius, medium.mu(), si.params.drag);
                matrix[(i, i)] = 2.0 * (g2 - inv_g);
                rhs[i] = g2 + g1m - g1p - inv_g;
            }
        }

        for j in 0..n {
            if j == i {
                continue;
            }
            let sj = &swimmers[j];
            if sj.params.f_p == 0.0 {
                continue;
            }
            let tj = sj.state.tau;
            // Scale couplings by the force ratio so alpha stays dimensionless.
            let ratio = sj.params.f_p / si.params.f_p;
            let g_hh = green(medium, &(pts[i].head - pts[j].head))?;
            let g_th = green(medium, &(pts[i].tail - pts[j].head))?;
            let g_ht = green(medium, &(pts[i].head - pts[j].tail))?;
            let g_tt = green(medium, &(pts[i].tail - pts[j].tail))?;
            let g_hp = green(medium, &(pts[i].head - pts[j].prop))?;
            let g_tp = green(medium, &(pts[i].tail - pts[j].prop))?;
            matrix[(i, j)] = ratio
                * (-quad(&g_hh, &tau, &tj) + quad(&g_th, &tau, &tj) + quad(&g_ht, &tau, &tj)
                    - quad(&g_tt, &tau, &tj));
            rhs[i] += ratio
                * (-quad(&g_hh, &tau, &tj) + quad(&g_th, &tau, &tj) + quad(&g_hp, &tau, &tj)
                    - quad(&g_tp, &tau, &tj));
        }
    }
    Ok(AlphaSystem { matrix, rhs })
}

/// Solves the assembled system and materializes ball forces.
pub fn solve_alpha(system: &AlphaSystem, swimmers: &[Swimmer]) -> Result<AlphaSolution> {
    let n = swimmers.len();
    assert_eq!(system.matrix.nrows(), n, "system size must match swimmers");
    let inv = system
        .matrix
        .clone()
        .try_inverse()
        .ok_or(Error::SingularSystem(f64::INFINITY))?;
    let norm1 = |m: &DMatrix<f64>| {
        (0..m.ncols())
            .map(|c| m.column(c).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0_f64, f64::max)
    };
    let condition = norm1(&system.matrix) * norm1(&inv);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(Error::SingularSystem(condition));
    }
    let alpha_vec = &inv * &system.rhs;
    let mut alpha = Vec::with_capacity(n);
    let mut forces = Vec::with_capacity(n);
    let mut force_residual = Vec::with_capacity(n);
    let mut torque_residual = Vec::with_capacity(n);
    for (i, s) in swimmers.iter().enumerate() {
        let a = alpha_vec[i];
        let f_p = s.params.f_p;
        let tau = s.state.tau;
        let bf = BallForces {
            head: -(1.0 - a) * f_p * tau,
            tail: -a * f_p * tau,
            prop: f_p * tau,
        };
        let net = bf.head + bf.tail + bf.prop;
        let l = s.params.half_length;
        let torque = (l * tau).cross(&bf.head) + (-l * tau).cross(&bf.tail)
            + (s.params.zeta * l * tau).cross(&bf.prop);
        alpha.push(a);
        forces.push(bf);
        force_residual.push(net.norm());
        torque_residual.push(torque.norm());
    }
    Ok(AlphaSolution {
        alpha,
        forces,
        force_residual,
        torque_residual,
        condition,
    })
}

/// Flow of every force of swimmer `j` evaluated at `x`, skipping nothing.
fn swimmer_flow_at(
    x: &Vector3<f64>,
    pts: &DerivedPoints,
    forces: &BallForces,
    medium: &Medium,
) -> Result<Vector3<f64>> {
    Ok(-(green(medium, &(x - pts.head))? * forces.head
        + green(medium, &(x - pts.tail))? * forces.tail
        + green(medium, &(x - pts.prop))? * forces.prop))
}

/// Velocities of the head and tail balls of every swimmer.
///
/// Cross-swimmer advection is the same superposition for both closures; the
/// self terms implement the closure documented on [`DragConvention`].
pub fn ball_velocities(
    swimmers: &[Swimmer],
    solution: &AlphaSolution,
    medium: &Medium,
) -> Result<Vec<(Vector3<f64>, Vector3<f64>)>> {
    let n = swimmers.len();
    let pts = points_of(swimmers);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let s = &swimmers[i];
        let tau = s.state.tau;
        let l = s.params.half_length;
        let zeta = s.params.zeta;
        let f_p = s.params.f_p;
        let a = solution.alpha[i];
        let mut v_head = Vector3::zeros();
        let mut v_tail = Vector3::zeros();
        for j in 0..n {
            if j == i {
                continue;
            }
            v_head += swimmer_flow_at(&pts[i].head, &pts[j], &solution.forces[j], medium)?;
            v_tail += swimmer_flow_at(&pts[i].tail, &pts[j], &solution.forces[j], medium)?;
        }
        if f_p != 0.0 {
            let g2 = green(medium, &(2.0 * l * tau))?;
            let g1m = green(medium, &((1.0 - zeta) * l * tau))?;
            let g1p = green(medium, &((1.0 + zeta) * l * tau))?;
            let inv_g = 1.0 / gamma0(s.params.ball_radius, medium.mu(), s.params.drag);
            match s.params.drag {
                DragConvention::Stokes => {
                    // Superposition: partner-ball flow + propulsion flow +
                    // own drive through the bare drag coefficient.
                    v_head += f_p * ((a * g2 + g1m) * tau + inv_g * tau);
                    v_tail += f_p * (((1.0 - a) * g2 + g1p) * tau + inv_g * tau);
                }
                DragConvention::PointForce => {
                    // Relative drag law v = u - F/gamma_0: the ambient flow
                    // at the ball excludes only the ball's own force.
                    v_head += f_p * ((a * g2 - g1m) * tau + (1.0 - a) * inv_g * tau);
                    v_tail += f_p * (((1.0 - a) * g2 - g1p) * tau + a * inv_g * tau);
                }
            }
        }
        out.push((v_head, v_tail));
    }
    Ok(out)
}

/// Extracts rigid-body motion from the two ball velocities.
///
/// The center moves with the mean; the angular velocity follows from the
/// velocity difference, `omega = tau x (v_H - v_T) / (2L)` (axial spin is
/// not resolved by two points and is identically zero here). The axial
/// components must agree: a mismatch beyond [`RIGIDITY_LIMIT`] relative to
/// the velocity scale means the force system would stretch the body.
pub fn body_kinematics(
    v_head: &Vector3<f64>,
    v_tail: &Vector3<f64>,
    tau: &Vector3<f64>,
    half_length: f64,
) -> Result<Kinematics> {
    let diff = v_head - v_tail;
    let scale = v_head.norm().max(v_tail.norm()).max(f64::MIN_POSITIVE);
    let residual = tau.dot(&diff).abs();
    if residual > RIGIDITY_LIMIT * scale {
        return Err(Error::RigidityViolation {
            residual,
            limit: RIGIDITY_LIMIT * scale,
        });
    }
    Ok(Kinematics {
        v_c: (v_head + v_tail) / 2.0,
        omega: tau.cross(&diff) / (2.0 * half_length),
        v_head: *v_head,
        v_tail: *v_tail,
    })
}

/// Full pipeline: assemble, solve, ball velocities, rigid-body kinematics.
pub fn solve_motion(
    swimmers: &[Swimmer],
    medium: &Medium,
) -> Result<(AlphaSolution, Vec<Kinematics>)> {
    let system = assemble_alpha_system(swimmers, medium)?;
    let solution = solve_alpha(&system, swimmers)?;
    let velocities = ball_velocities(swimmers, &solution, medium)?;
    let mut kin = Vec::with_capacity(swimmers.len());
    for (s, (v_h, v_t)) in swimmers.iter().zip(&velocities) {
        kin.push(body_kinematics(v_h, v_t, &s.state.tau, s.params.half_length)?);
    }
    Ok((solution, kin))
}

/// Fluid velocity at `x` from all forces of all swimmers.
///
/// The point-force representation breaks down on top of the sources: `x`
/// must stay at least one ball diameter from every ball center and clear of
/// every propulsion point.
pub fn flow_field(
    x: &Vector3<f64>,
    swimmers: &[Swimmer],
    solution: &AlphaSolution,
    medium: &Medium,
) -> Result<Vector3<f64>> {
    let pts = points_of(swimmers);
    for (s, p) in swimmers.iter().zip(&pts) {
        let clearance = 2.0 * s.params.ball_radius;
        for ball in [p.head, p.tail] {
            let d = (x - ball).norm();
            if d < clearance {
                return Err(Error::SingularPoint(d));
            }
        }
        let dp = (x - p.prop).norm();
        if dp < 1e-6 * s.params.half_length {
            return Err(Error::SingularPoint(dp));
        }
    }
    let mut u = Vector3::zeros();
    for (p, f) in pts.iter().zip(&solution.forces) {
        u += swimmer_flow_at(x, p, f, medium)?;
    }
    Ok(u)
}

/// Closed-form bulk swim speed of an isolated swimmer under the classical
/// drag closure:
///
/// ```text
/// v_0 = f_p / (8 pi mu L) [ 1/2 + 4L/(3R) + 1/|zeta - 1| + 1/|zeta + 1| ]
/// ```
///
/// Only valid for [`DragConvention::Stokes`] in bulk; use
/// [`isolated_speed`] for the other closure or for films.
pub fn single_swimmer_speed(params: &crate::model::SwimmerParams, mu: f64) -> Result<f64> {
    params.validate()?;
    if params.drag != DragConvention::Stokes {
        return Err(Error::InvalidGeometry(
            "closed-form speed applies to the classical drag closure only".into(),
        ));
    }
    let l = params.half_length;
    let bracket = 0.5 + 4.0 * l / (3.0 * params.ball_radius)
        + 1.0 / (params.zeta - 1.0).abs()
        + 1.0 / (params.zeta + 1.0).abs();
    Ok(params.f_p / (8.0 * std::f64::consts::PI * mu * l) * bracket)
}

/// Swim speed of an isolated swimmer in any medium under its own drag
/// closure, computed by solving the one-swimmer system.
pub fn isolated_speed(params: &crate::model::SwimmerParams, medium: &Medium) -> Result<f64> {
    let swimmer = crate::model::make_swimmer(
        *params,
        crate::model::SwimmerState {
            x_c: Vector3::zeros(),
            tau: Vector3::x(),
        },
    )?;
    let (_, kin) = solve_motion(&[swimmer], medium)?;
    Ok(kin[0].v_c.dot(&swimmer.state.tau))
}
