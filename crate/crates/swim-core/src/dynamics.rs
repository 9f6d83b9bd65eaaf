//! Time integration of two-swimmer encounters and their classification.
//!
//! A pair of swimmers is advanced with a fixed-step fourth-order
//! Runge-Kutta scheme on the rigid-body state (center position plus axis).
//! Steps that would move any ball further than a set fraction of the
//! current pair clearance are re-done at half the step, recursively up to a
//! cap, so approaches slow down gracefully instead of tunnelling through
//! the partner. An encounter ends when the centers come closer than the
//! contact threshold (the pair "swims in"), or when the pair is beyond the
//! escape threshold and still receding ("swims off"); otherwise the run is
//! undecided at the time cap.
//!
//! The right-hand side comes either from the full interaction solver or
//! from the truncated far-field series, so the same trajectory driver
//! serves both the reference model and its asymptotic approximation.

use nalgebra::Vector3;

use crate::model::{derived_points, Medium, Swimmer, SwimmerParams, SwimmerState};
use crate::series::{
    pair_coefficients, pair_coefficients_q2d, pair_velocities_3d, pair_velocities_q2d,
    PairAngles, Q2dAlphaMode,
};
use crate::solver::solve_motion;
use crate::{Error, Result};

/// Cap on recursive step halvings before a step is declared unresolvable.
pub const MAX_HALVINGS: u32 = 10;

/// Which right-hand side drives the trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Solve the coupled thrust-partition system at every evaluation.
    FullSolver,
    /// Use the far-field pair series truncated at the given order
    /// (0 to 4 in bulk, 0 to 5 in a film).
    Asymptotic { order: u32, q2d_alpha: Q2dAlphaMode },
}

/// Fixed-step integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Outer step size.
    pub dt: f64,
    /// Rescale the axis to unit length after every completed step.
    pub renormalize: bool,
    /// A step may move a ball at most this fraction of the current
    /// smallest ball-to-ball distance between the swimmers; otherwise it
    /// is retried at half the step.
    pub max_disp_frac: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 0.1,
            renormalize: true,
            max_disp_frac: 1e-3,
        }
    }
}

/// Center-distance thresholds that end an encounter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// The pair has swum in when the centers come this close.
    pub d_in: f64,
    /// The pair has swum off when the centers are this far apart and the
    /// distance is still growing.
    pub d_off: f64,
}

/// Outcome class of an encounter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SwimIn,
    SwimOff,
    Undecided,
}

/// What happened during a run and when.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncounterOutcome {
    pub verdict: Verdict,
    /// Time at which a threshold fired; `None` for undecided runs.
    pub t_event: Option<f64>,
    /// First time the separation trend reversed, if it did.
    pub t_turn: Option<f64>,
    /// Center distance when the run ended.
    pub final_sep: f64,
}

/// Sampled history of a run.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<[SwimmerState; 2]>,
    pub seps: Vec<f64>,
}

/// Run extent and sampling cadence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    /// Integration horizon measured from `t_start`; zero records only the
    /// initial sample.
    pub t_max: f64,
    /// Keep every n-th step in the trajectory (the initial and final
    /// samples are always kept).
    pub sample_every: usize,
    /// Clock value of the initial state. The dynamics are autonomous, so
    /// this only shifts reported times; restarting a run from a recorded
    /// sample reproduces the remainder bitwise.
    pub t_start: f64,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            t_max: 1e7,
            sample_every: 1,
            t_start: 0.0,
        }
    }
}

/// Instantaneous rigid-body rates of both swimmers.
#[derive(Debug, Clone, Copy)]
pub struct PairRates {
    pub v: [Vector3<f64>; 2],
    pub omega: [Vector3<f64>; 2],
}

fn same_params(a: &SwimmerParams, b: &SwimmerParams) -> bool {
    a.f_p == b.f_p
        && a.half_length == b.half_length
        && a.ball_radius == b.ball_radius
        && a.zeta == b.zeta
        && a.drag == b.drag
}

/// Evaluates the rigid-body rates of a pair under the chosen model.
pub fn pair_rates(swimmers: &[Swimmer; 2], model: &Model, medium: &Medium) -> Result<PairRates> {
    match model {
        Model::FullSolver => {
            let (_, kin) = solve_motion(swimmers, medium)?;
            Ok(PairRates {
                v: [kin[0].v_c, kin[1].v_c],
                omega: [kin[0].omega, kin[1].omega],
            })
        }
        Model::Asymptotic { order, q2d_alpha } => {
            let p = &swimmers[0].params;
            if !same_params(p, &swimmers[1].params) {
                return Err(Error::InvalidGeometry(
                    "the far-field series assumes identical swimmers".into(),
                ));
            }
            p.validate()?;
            let angles = PairAngles::from_states(&swimmers[0].state, &swimmers[1].state)?;
            let l = p.half_length;
            let motions = match medium {
                Medium::Bulk3d { mu } => {
                    let coeffs = pair_coefficients(p, *mu)?;
                    pair_velocities_3d(&angles, &coeffs, *order, l)?
                }
                Medium::QuasiTwoD { mu, h } => {
                    let coeffs = pair_coefficients_q2d(p, *h, *mu, *q2d_alpha)?;
                    pair_velocities_q2d(&angles, &coeffs, *order, l)?
                }
            };
            Ok(PairRates {
                v: [
                    Vector3::new(motions[0].v.x, motions[0].v.y, 0.0),
                    Vector3::new(motions[1].v.x, motions[1].v.y, 0.0),
                ],
                omega: [
                    Vector3::new(0.0, 0.0, motions[0].omega),
                    Vector3::new(0.0, 0.0, motions[1].omega),
                ],
            })
        }
    }
}

/// State derivative: position rates plus axis rates at the evaluated pose.
struct Deriv {
    dx: [Vector3<f64>; 2],
    dtau: [Vector3<f64>; 2],
}

fn deriv(swimmers: &[Swimmer; 2], model: &Model, medium: &Medium) -> Result<Deriv> {
    let r = pair_rates(swimmers, model, medium)?;
    Ok(Deriv {
        dx: r.v,
        dtau: [
            r.omega[0].cross(&swimmers[0].state.tau),
            r.omega[1].cross(&swimmers[1].state.tau),
        ],
    })
}

/// Intermediate stage state: base advanced by `dt` along a derivative,
/// axes left unnormalized so the scheme keeps its formal order.
fn shifted(base: &[Swimmer; 2], d: &Deriv, dt: f64) -> [Swimmer; 2] {
    let mut out = base.clone();
    for i in 0..2 {
        out[i].state.x_c += dt * d.dx[i];
        out[i].state.tau += dt * d.dtau[i];
    }
    out
}

fn rk4_step(
    base: &[Swimmer; 2],
    k1: &Deriv,
    model: &Model,
    medium: &Medium,
    dt: f64,
    renormalize: bool,
) -> Result<[Swimmer; 2]> {
    let k2 = deriv(&shifted(base, k1, 0.5 * dt), model, medium)?;
    let k3 = deriv(&shifted(base, &k2, 0.5 * dt), model, medium)?;
    let k4 = deriv(&shifted(base, &k3, dt), model, medium)?;
    let mut out = base.clone();
    let w = dt / 6.0;
    for i in 0..2 {
        out[i].state.x_c += w * (k1.dx[i] + 2.0 * k2.dx[i] + 2.0 * k3.dx[i] + k4.dx[i]);
        out[i].state.tau += w * (k1.dtau[i] + 2.0 * k2.dtau[i] + 2.0 * k3.dtau[i] + k4.dtau[i]);
        if renormalize {
            let n = out[i].state.tau.norm();
            if n <= 0.0 || !n.is_finite() {
                return Err(Error::InvalidGeometry(
                    "swimmer axis degenerated during a step".into(),
                ));
            }
            out[i].state.tau /= n;
        }
    }
    Ok(out)
}

/// Smallest distance between a ball of swimmer 1 and a ball of swimmer 2.
fn min_ball_separation(swimmers: &[Swimmer; 2]) -> f64 {
    let p0 = derived_points(&swimmers[0].params, &swimmers[0].state);
    let p1 = derived_points(&swimmers[1].params, &swimmers[1].state);
    let a = [p0.head, p0.tail];
    let b = [p1.head, p1.tail];
    let mut min = f64::INFINITY;
    for x in &a {
        for y in &b {
            min = min.min((x - y).norm());
        }
    }
    min
}

/// Largest ball displacement between two pair states.
fn max_ball_displacement(before: &[Swimmer; 2], after: &[Swimmer; 2]) -> f64 {
    let mut max = 0.0_f64;
    for i in 0..2 {
        let a = derived_points(&before[i].params, &before[i].state);
        let b = derived_points(&after[i].params, &after[i].state);
        max = max.max((b.head - a.head).norm());
        max = max.max((b.tail - a.tail).norm());
    }
    max
}

/// One guarded step of size `dt`: try the full step, and if any ball moves
/// too far (or a stage evaluation fails transiently) split it into two
/// recursive halves. The recursion is stateless, so the same state always
/// advances the same way regardless of history.
fn advance(
    swimmers: &[Swimmer; 2],
    model: &Model,
    medium: &Medium,
    integ: &IntegratorConfig,
    dt: f64,
    depth: u32,
) -> Result<[Swimmer; 2]> {
    // A failure here means the current state itself is bad (overlap,
    // series domain): halving cannot help, so report it.
    let k1 = deriv(swimmers, model, medium)?;
    let clearance = min_ball_separation(swimmers);
    let attempt = rk4_step(swimmers, &k1, model, medium, dt, integ.renormalize);
    match attempt {
        Ok(next) => {
            if max_ball_displacement(swimmers, &next) <= integ.max_disp_frac * clearance {
                return Ok(next);
            }
        }
        Err(e) => {
            // Stage failures can be overshoot artifacts; retry smaller
            // unless the budget is spent.
            if depth >= MAX_HALVINGS {
                return Err(e);
            }
        }
    }
    if depth >= MAX_HALVINGS {
        return Err(Error::StepUnderflow(depth));
    }
    let mid = advance(swimmers, model, medium, integ, 0.5 * dt, depth + 1)?;
    advance(&mid, model, medium, integ, 0.5 * dt, depth + 1)
}

fn center_separation(swimmers: &[Swimmer; 2]) -> f64 {
    (swimmers[1].state.x_c - swimmers[0].state.x_c).norm()
}

fn validate_run_inputs(
    integ: &IntegratorConfig,
    thresholds: &Thresholds,
    spec: &RunSpec,
) -> Result<()> {
    if !(integ.dt > 0.0) || !integ.dt.is_finite() {
        return Err(Error::InvalidGeometry(format!(
            "step size must be positive and finite, got {}",
            integ.dt
        )));
    }
    if !(integ.max_disp_frac > 0.0) {
        return Err(Error::InvalidGeometry(
            "displacement fraction must be positive".into(),
        ));
    }
    if !(thresholds.d_in >= 0.0) || !(thresholds.d_off > thresholds.d_in) {
        return Err(Error::InvalidGeometry(format!(
            "thresholds need 0 <= d_in < d_off, got d_in={} d_off={}",
            thresholds.d_in, thresholds.d_off
        )));
    }
    if !(spec.t_max >= 0.0) || !spec.t_max.is_finite() {
        return Err(Error::InvalidGeometry(format!(
            "horizon must be nonnegative and finite, got {}",
            spec.t_max
        )));
    }
    Ok(())
}

/// Integrates a pair from `initial` and classifies the encounter.
///
/// The run stops at the first threshold event or at the horizon. Samples
/// are recorded at the start, every `sample_every`-th step, and at the end.
pub fn simulate(
    initial: &[Swimmer; 2],
    model: &Model,
    medium: &Medium,
    integ: &IntegratorConfig,
    thresholds: &Thresholds,
    spec: &RunSpec,
) -> Result<(Trajectory, EncounterOutcome)> {
    validate_run_inputs(integ, thresholds, spec)?;
    let stride = spec.sample_every.max(1);

    let mut traj = Trajectory::default();
    let mut state = initial.clone();
    let mut sep = center_separation(&state);
    traj.times.push(spec.t_start);
    traj.states.push([state[0].state, state[1].state]);
    traj.seps.push(sep);

    if sep <= thresholds.d_in {
        return Ok((
            traj,
            EncounterOutcome {
                verdict: Verdict::SwimIn,
                t_event: Some(spec.t_start),
                t_turn: None,
                final_sep: sep,
            },
        ));
    }

    let n_steps = (spec.t_max / integ.dt).ceil() as u64;
    let mut trend = 0.0_f64;
    let mut t_turn = None;

    for k in 1..=n_steps {
        let remaining = spec.t_max - (k - 1) as f64 * integ.dt;
        let dt = integ.dt.min(remaining);
        if dt <= 0.0 {
            break;
        }
        state = advance(&state, model, medium, integ, dt, 0)?;
        let t = spec.t_start + ((k as f64) * integ.dt).min(spec.t_max);

        let new_sep = center_separation(&state);
        let dsep = new_sep - sep;
        if trend == 0.0 {
            trend = dsep.signum() * f64::from(dsep != 0.0);
        } else if dsep * trend < 0.0 && t_turn.is_none() {
            t_turn = Some(t);
        }
        sep = new_sep;

        let event = if sep <= thresholds.d_in {
            Some(Verdict::SwimIn)
        } else if sep >= thresholds.d_off && dsep > 0.0 {
            Some(Verdict::SwimOff)
        } else {
            None
        };

        if k % stride as u64 == 0 || k == n_steps || event.is_some() {
            traj.times.push(t);
            traj.states.push([state[0].state, state[1].state]);
            traj.seps.push(sep);
        }
        if let Some(verdict) = event {
            return Ok((
                traj,
                EncounterOutcome {
                    verdict,
                    t_event: Some(t),
                    t_turn,
                    final_sep: sep,
                },
            ));
        }
    }

    Ok((
        traj,
        EncounterOutcome {
            verdict: Verdict::Undecided,
            t_event: None,
            t_turn,
            final_sep: sep,
        },
    ))
}

/// Classifies an already-recorded trajectory with the same rules the
/// driver applies online. Works on the recorded samples, so with sparse
/// sampling a brief threshold crossing between samples can go unseen.
pub fn classify_encounter(traj: &Trajectory, thresholds: &Thresholds) -> EncounterOutcome {
    let mut trend = 0.0_f64;
    let mut t_turn = None;
    let mut last_sep = traj.seps.first().copied().unwrap_or(f64::NAN);
    if last_sep <= thresholds.d_in {
        return EncounterOutcome {
            verdict: Verdict::SwimIn,
            t_event: traj.times.first().copied(),
            t_turn: None,
            final_sep: last_sep,
        };
    }
    for i in 1..traj.seps.len() {
        let sep = traj.seps[i];
        let dsep = sep - last_sep;
        if trend == 0.0 {
            trend = dsep.signum() * f64::from(dsep != 0.0);
        } else if dsep * trend < 0.0 && t_turn.is_none() {
            t_turn = Some(traj.times[i]);
        }
        last_sep = sep;
        if sep <= thresholds.d_in {
            return EncounterOutcome {
                verdict: Verdict::SwimIn,
                t_event: Some(traj.times[i]),
                t_turn,
                final_sep: sep,
            };
        }
        if sep >= thresholds.d_off && dsep > 0.0 {
            return EncounterOutcome {
                verdict: Verdict::SwimOff,
                t_event: Some(traj.times[i]),
                t_turn,
                final_sep: sep,
            };
        }
    }
    EncounterOutcome {
        verdict: Verdict::Undecided,
        t_event: None,
        t_turn,
        final_sep: last_sep,
    }
}

fn planar_swimmer(params: &SwimmerParams, x: f64, y: f64, tau: Vector3<f64>) -> Swimmer {
    Swimmer {
        params: params.clone(),
        state: SwimmerState {
            x_c: Vector3::new(x, y, 0.0),
            tau,
        },
    }
}

/// Mirror pair: swimmer 1 below the symmetry plane at orientation
/// `theta1`, swimmer 2 its exact reflection straight above at distance
/// `a0`. The reflection is built by negating the axis component, so the
/// symmetry holds to the last bit.
pub fn mirror_pair(params: &SwimmerParams, theta1: f64, a0: f64) -> [Swimmer; 2] {
    let tau1 = Vector3::new(theta1.cos(), theta1.sin(), 0.0);
    let tau2 = Vector3::new(tau1.x, -tau1.y, 0.0);
    [
        planar_swimmer(params, 0.0, -0.5 * a0, tau1),
        planar_swimmer(params, 0.0, 0.5 * a0, tau2),
    ]
}

/// Mirror pair with the symmetry broken by `delta0`: swimmer 2 is held at
/// `-theta1 - delta0`. Small defects only; the linear stability analysis
/// stops making sense beyond `|delta0| = 0.3`.
pub fn perturbed_mirror_pair(
    params: &SwimmerParams,
    theta1: f64,
    delta0: f64,
    a0: f64,
) -> Result<[Swimmer; 2]> {
    if delta0.abs() > 0.3 {
        return Err(Error::InvalidGeometry(format!(
            "mirror defect must satisfy |delta0| <= 0.3, got {delta0}"
        )));
    }
    let theta2 = -theta1 - delta0;
    let tau1 = Vector3::new(theta1.cos(), theta1.sin(), 0.0);
    let tau2 = Vector3::new(theta2.cos(), theta2.sin(), 0.0);
    Ok([
        planar_swimmer(params, 0.0, -0.5 * a0, tau1),
        planar_swimmer(params, 0.0, 0.5 * a0, tau2),
    ])
}

/// Perturbed mirror pair in the frame of the stability-rate formula: the
/// partner sits straight below swimmer 1, so `theta1` between 0 and `pi`
/// tilts swimmer 1 away from it. The defect `delta0` is applied to the
/// partner's orientation, `theta2 = -theta1 - delta0`, exactly as in
/// [`perturbed_mirror_pair`]; only the roles of top and bottom are
/// swapped. Use this pose when comparing measured defect rates against
/// [`crate::series::mirror_stability_rate`], whose sign convention is tied
/// to this frame.
pub fn stability_probe_pair(
    params: &SwimmerParams,
    theta1: f64,
    delta0: f64,
    a0: f64,
) -> Result<[Swimmer; 2]> {
    let pair = perturbed_mirror_pair(params, theta1, delta0, a0)?;
    Ok([
        Swimmer {
            params: pair[0].params.clone(),
            state: SwimmerState {
                x_c: Vector3::new(0.0, 0.5 * a0, 0.0),
                tau: pair[0].state.tau,
            },
        },
        Swimmer {
            params: pair[1].params.clone(),
            state: SwimmerState {
                x_c: Vector3::new(0.0, -0.5 * a0, 0.0),
                tau: pair[1].state.tau,
            },
        },
    ])
}

/// Head-to-tail pair: both swimmers point along `x`, swimmer 2 a distance
/// `a0` straight ahead of swimmer 1.
pub fn head_to_tail_pair(params: &SwimmerParams, a0: f64) -> [Swimmer; 2] {
    [
        planar_swimmer(params, 0.0, 0.0, Vector3::x()),
        planar_swimmer(params, a0, 0.0, Vector3::x()),
    ]
}

/// Side-by-side pair: both swimmers point along `x`, swimmer 2 a distance
/// `a0` straight above swimmer 1.
pub fn parallel_pair(params: &SwimmerParams, a0: f64) -> [Swimmer; 2] {
    [
        planar_swimmer(params, 0.0, -0.5 * a0, Vector3::x()),
        planar_swimmer(params, 0.0, 0.5 * a0, Vector3::x()),
    ]
}

/// Instantaneous growth rate of the center distance.
pub fn separation_rate(swimmers: &[Swimmer; 2], model: &Model, medium: &Medium) -> Result<f64> {
    let r = pair_rates(swimmers, model, medium)?;
    let d = swimmers[1].state.x_c - swimmers[0].state.x_c;
    let a = d.norm();
    if a <= 0.0 {
        return Err(Error::InvalidGeometry("coincident swimmer centers".into()));
    }
    Ok((r.v[1] - r.v[0]).dot(&d) / a)
}

/// Instantaneous growth rate of the mirror defect
/// `delta = -(theta1 + theta2 - 2 phi + pi)`, the angle by which the pair
/// fails to be a mirror image about the plane normal to the separation.
/// Vanishes identically on an exact mirror pair.
pub fn mirror_defect_rate(
    swimmers: &[Swimmer; 2],
    model: &Model,
    medium: &Medium,
) -> Result<f64> {
    let r = pair_rates(swimmers, model, medium)?;
    let d = swimmers[1].state.x_c - swimmers[0].state.x_c;
    let a = d.norm();
    if a <= 0.0 {
        return Err(Error::InvalidGeometry("coincident swimmer centers".into()));
    }
    let e_perp = Vector3::new(-d.y / a, d.x / a, 0.0);
    let phi_rate = (r.v[1] - r.v[0]).dot(&e_perp) / a;
    Ok(2.0 * phi_rate - r.omega[0].z - r.omega[1].z)
}
