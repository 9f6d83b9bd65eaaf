//! Low-Reynolds-number hydrodynamics of dumbbell microswimmers.
//!
//! A swimmer is a rigid pair of balls (head and tail) of radius `R` held at
//! distance `2L` along a unit axis `tau`, driven by a point propulsion force
//! applied on the axis. The crate builds the mobility problem that couples any
//! number of such swimmers through the fluid, in unbounded 3D and in a thin
//! film between two walls, and layers three things on top of the solver: a
//! far-field series for a coplanar pair, rigid-body time stepping, and
//! encounter classification (do two swimmers aggregate or scatter).
//!
//! Everything is written for `f64` column vectors from [`nalgebra`]; angles
//! are radians, all other quantities are in the caller's consistent unit
//! system (the CLI presets use the swimmer half-length as the length unit).

pub mod dynamics;
pub mod kernels;
pub mod model;
pub mod series;
pub mod solver;

/// Unified error type for geometry validation, kernel evaluation, the
/// interaction solver, the pair series, and time stepping.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A swimmer or pose parameter breaks a hard geometric constraint.
    /// The payload lists every violated constraint, semicolon separated.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// Pusher/puller or inner/outer classification requested within 1e-9 of
    /// a boundary value of `zeta`, where the label is undefined.
    #[error("classification ambiguous: zeta is within 1e-9 of a boundary")]
    Ambiguous,

    /// Rotational diffusion inputs must all be strictly positive.
    #[error("rotational diffusion requires strictly positive inputs")]
    NonPositiveDiffusion,

    /// The rod model for rotational diffusion needs length > diameter.
    #[error("degenerate aspect ratio: length must exceed diameter")]
    DegenerateAspect,

    /// A Green's function or the flow field was evaluated at (or too close
    /// to) a singular point of the kernel.
    #[error("kernel evaluated at a singular point (|x| = {0:.3e})")]
    SingularPoint(f64),

    /// The sphere flow field is only defined on and outside the ball surface.
    #[error("field point inside the sphere: r = {r:.3e} < R = {radius:.3e}")]
    InsideSphere { r: f64, radius: f64 },

    /// The film kernel is only defined for heights inside the gap [0, 2h].
    #[error("height z = {z:.3e} outside the film [0, {gap:.3e}]")]
    OutOfFilm { z: f64, gap: f64 },

    /// Two balls of different swimmers are closer than contact distance.
    #[error("swimmers overlap: inter-ball distance {dist:.6e} < 2R = {contact:.6e}")]
    OverlappingSwimmers { dist: f64, contact: f64 },

    /// The thrust-partition system is numerically singular.
    #[error("interaction system singular (1-norm condition estimate {0:.3e})")]
    SingularSystem(f64),

    /// Head and tail velocities disagree along the axis beyond tolerance,
    /// so the computed motion would stretch the rigid body.
    #[error("rigidity violated: axial velocity mismatch {residual:.3e} exceeds {limit:.3e}")]
    RigidityViolation { residual: f64, limit: f64 },

    /// The far-field pair series was requested outside its convergence
    /// region (ball separation not small against the pair distance).
    #[error("pair series out of range: 2L/a = {0:.4} >= 1")]
    SeriesOutOfRange(f64),

    /// The quartic rotational coefficient vanishes at |zeta| = 1, where the
    /// steady-angle perturbation is undefined.
    #[error("degenerate rotational coefficient: D = 0 at |zeta| = 1")]
    DegenerateD,

    /// Repeated step halving failed to satisfy the displacement guard.
    #[error("time step underflow after {0} halvings")]
    StepUnderflow(u32),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
