//! Swimmer geometry, media, and scalar physics of a single swimmer.
//!
//! A swimmer is two balls of radius `R` rigidly joined along a unit axis
//! `tau` at head `x_C + L tau` and tail `x_C - L tau`, propelled by a point
//! force `f_p tau` applied at `x_P = x_C + zeta L tau`. The force is balanced
//! by drag on the balls, so the swimmer as a whole is force free. The sign
//! and magnitude of `zeta` encode the swimmer type: propulsion behind the
//! tail (`zeta < 0`, pusher) or ahead of the head (`zeta > 0`, puller), with
//! the propulsion point inside (`|zeta| < 1`) or outside (`|zeta| > 1`) the
//! body.

use nalgebra::Vector3;

use crate::{Error, Result};

/// Boltzmann constant in J/K, as used for the diffusion estimates.
pub const BOLTZMANN: f64 = 1.3806503e-23;

/// Closest allowed approach of `zeta` to the ball positions `zeta = +-1`,
/// where the propulsion point would collide with a ball center.
pub const ZETA_MARGIN: f64 = 0.2;

/// Hard upper bound on the ball aspect ratio `R / L`; the interaction model
/// treats balls as small against the body.
pub const MAX_ASPECT: f64 = 0.2;

/// Aspect ratios above this are accepted but flagged: finite-size
/// corrections grow past the percent level.
pub const WARN_ASPECT: f64 = 0.1;

/// Which published drag closure ties ball forces to ball velocities.
///
/// The two choices differ in the drag coefficient (`6 pi mu R` versus
/// `8 pi mu R`) and, consistently, in how a ball's own propulsion image
/// enters its velocity; see [`crate::solver`] for the two closures. Bulk
/// swim speeds differ by O(1) between them, interaction laws agree at
/// leading order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DragConvention {
    /// Classical no-slip sphere drag, `gamma_0 = 6 pi mu R`.
    #[default]
    Stokes,
    /// Drag matched to the point-force kernel, `gamma_0 = 8 pi mu R`; ball
    /// velocities follow the relative-flow drag law `F = -gamma_0 (v - u)`.
    PointForce,
}

/// Material parameters of one swimmer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwimmerParams {
    /// Propulsion force magnitude `f_p` (may be zero for a passive body).
    pub f_p: f64,
    /// Half distance `L` between the ball centers.
    pub half_length: f64,
    /// Ball radius `R`.
    pub ball_radius: f64,
    /// Signed propulsion offset in units of `L`.
    pub zeta: f64,
    /// Drag closure used for this swimmer's balls.
    pub drag: DragConvention,
}

impl SwimmerParams {
    /// Ball aspect ratio `xi = R / L`.
    pub fn xi(&self) -> f64 {
        self.ball_radius / self.half_length
    }

    /// Checks every hard constraint and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.half_length > 0.0) {
            bad.push(format!("half length {} must be positive", self.half_length));
        }
        if !(self.ball_radius > 0.0) {
            bad.push(format!("ball radius {} must be positive", self.ball_radius));
        }
        if !self.f_p.is_finite() {
            bad.push(format!("propulsion force {} must be finite", self.f_p));
        }
        if self.half_length > 0.0 && self.ball_radius > 0.0 && self.xi() > MAX_ASPECT {
            bad.push(format!(
                "aspect ratio R/L = {:.4} exceeds {MAX_ASPECT}",
                self.xi()
            ));
        }
        // Values sitting exactly on the margin (e.g. zeta = 1.2) must pass;
        // the slack absorbs their binary representation error.
        let margin = ZETA_MARGIN - 1e-12;
        if !self.zeta.is_finite() || (self.zeta - 1.0).abs() < margin
            || (self.zeta + 1.0).abs() < margin
        {
            bad.push(format!(
                "zeta = {} within margin {ZETA_MARGIN} of a ball position +-1",
                self.zeta
            ));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGeometry(bad.join("; ")))
        }
    }

    /// Soft advisories that do not block a run.
    pub fn warnings(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.xi() > WARN_ASPECT && self.xi() <= MAX_ASPECT {
            notes.push(format!(
                "aspect ratio R/L = {:.4} above {WARN_ASPECT}: finite-size corrections are no longer small",
                self.xi()
            ));
        }
        notes
    }
}

/// Rigid-body pose of a swimmer: center position and unit axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwimmerState {
    pub x_c: Vector3<f64>,
    pub tau: Vector3<f64>,
}

impl SwimmerState {
    /// In-plane orientation angle `atan2(tau_y, tau_x)`.
    pub fn angle(&self) -> f64 {
        self.tau.y.atan2(self.tau.x)
    }
}

/// A validated swimmer: parameters plus pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Swimmer {
    pub params: SwimmerParams,
    pub state: SwimmerState,
}

/// Validates parameters and pose and assembles a [`Swimmer`]. The axis must
/// be unit length to 1e-9 and is renormalized exactly on acceptance.
pub fn make_swimmer(params: SwimmerParams, state: SwimmerState) -> Result<Swimmer> {
    params.validate()?;
    let n = state.tau.norm();
    if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidGeometry(format!(
            "axis norm {n} differs from 1 beyond 1e-9"
        )));
    }
    if !state.x_c.iter().all(|c| c.is_finite()) {
        return Err(Error::InvalidGeometry("center position not finite".into()));
    }
    Ok(Swimmer {
        params,
        state: SwimmerState {
            x_c: state.x_c,
            tau: state.tau / n,
        },
    })
}

/// The three material points of a swimmer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedPoints {
    /// Head ball center `x_C + L tau`.
    pub head: Vector3<f64>,
    /// Tail ball center `x_C - L tau`.
    pub tail: Vector3<f64>,
    /// Propulsion point `x_C + zeta L tau`.
    pub prop: Vector3<f64>,
}

/// Head, tail, and propulsion point for the given parameters and pose.
pub fn derived_points(params: &SwimmerParams, state: &SwimmerState) -> DerivedPoints {
    let l = params.half_length;
    DerivedPoints {
        head: state.x_c + l * state.tau,
        tail: state.x_c - l * state.tau,
        prop: state.x_c + params.zeta * l * state.tau,
    }
}

/// Pusher or puller: does the propulsion force push the body from behind
/// (`zeta < 0`) or pull it from ahead (`zeta > 0`)?
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propulsion {
    Pusher,
    Puller,
}

/// Whether the propulsion point lies between the balls or outside them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Inner,
    Outer,
}

/// Classifies a swimmer by the sign and magnitude of `zeta`. Within 1e-9 of
/// the boundary values `0` and `+-1` the label is undefined.
pub fn classify_swimmer(zeta: f64) -> Result<(Propulsion, Placement)> {
    const TOL: f64 = 1e-9;
    if zeta.abs() < TOL || (zeta.abs() - 1.0).abs() < TOL {
        return Err(Error::Ambiguous);
    }
    let propulsion = if zeta < 0.0 {
        Propulsion::Pusher
    } else {
        Propulsion::Puller
    };
    let placement = if zeta.abs() < 1.0 {
        Placement::Inner
    } else {
        Placement::Outer
    };
    Ok((propulsion, placement))
}

/// The fluid environment the swimmers live in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Medium {
    /// Unbounded fluid of viscosity `mu`.
    Bulk3d { mu: f64 },
    /// Thin film of total gap `2h` between two no-slip walls, viscosity
    /// `mu`; swimmers sit at the midplane and all geometry is in-plane.
    QuasiTwoD { mu: f64, h: f64 },
}

impl Medium {
    pub fn mu(&self) -> f64 {
        match *self {
            Medium::Bulk3d { mu } | Medium::QuasiTwoD { mu, .. } => mu,
        }
    }

    /// Checks the medium itself and its compatibility with a swimmer: in a
    /// film the balls must fit well under the gap (`R <= h/5`) and the film
    /// must be thin against the body (`h <= L/5`) for the far-field kernel
    /// to apply.
    pub fn validate_for(&self, params: &SwimmerParams) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.mu() > 0.0) {
            bad.push(format!("viscosity {} must be positive", self.mu()));
        }
        if let Medium::QuasiTwoD { h, .. } = *self {
            if !(h > 0.0) {
                bad.push(format!("half gap {h} must be positive"));
            } else {
                if params.ball_radius > h / 5.0 {
                    bad.push(format!(
                        "ball radius {} exceeds h/5 = {}",
                        params.ball_radius,
                        h / 5.0
                    ));
                }
                if h > params.half_length / 5.0 {
                    bad.push(format!(
                        "half gap {h} exceeds L/5 = {}",
                        params.half_length / 5.0
                    ));
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGeometry(bad.join("; ")))
        }
    }
}

/// Rotational diffusion coefficient of a rod of length `length` and diameter
/// `diameter` in a fluid of viscosity `eta` at temperature `temp`:
///
/// ```text
/// D_rot = (12 / pi) k_B T / (length^3 ln(length / diameter) eta)
/// ```
///
/// SI units throughout; the result is in 1/s.
pub fn rotational_diffusion(length: f64, diameter: f64, temp: f64, eta: f64) -> Result<f64> {
    if !(length > 0.0 && diameter > 0.0 && temp > 0.0 && eta > 0.0) {
        return Err(Error::NonPositiveDiffusion);
    }
    if length <= diameter {
        return Err(Error::DegenerateAspect);
    }
    Ok(12.0 / std::f64::consts::PI * BOLTZMANN * temp
        / (length.powi(3) * (length / diameter).ln() * eta))
}

/// Mean time for rotational diffusion to tilt the axis by angle `theta`:
/// `T = theta^2 / D_rot`. Quadruples when the angle doubles.
pub fn brownian_deviation_time(theta: f64, d_rot: f64) -> Result<f64> {
    if !(d_rot > 0.0) {
        return Err(Error::NonPositiveDiffusion);
    }
    Ok(theta * theta / d_rot)
}
