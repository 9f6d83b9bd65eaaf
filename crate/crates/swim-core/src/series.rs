//! Far-field interaction series for a coplanar pair of identical swimmers.
//!
//! When two swimmers are far apart against their body size, their mutual
//! influence organizes into powers of the inverse separation `eps = 1/a`.
//! The pair state is captured by three angles and the distance: orientations
//! `theta1`, `theta2` and the direction `phi` of the line from swimmer 1 to
//! swimmer 2. In bulk fluid translation is corrected at `eps^2` and rotation
//! appears at `eps^3` and `eps^4`; in a film everything is screened one to
//! two orders harder (translation at `eps^3`, rotation at `eps^4` and
//! `eps^5`). Material prefactors multiply pure trigonometric shape factors,
//! so the module exposes both separately, plus steady-angle analysis of the
//! mirror configuration.

use nalgebra::Vector2;
use std::f64::consts::PI;

use crate::kernels::gamma0;
use crate::model::{DragConvention, SwimmerParams, SwimmerState};
use crate::{Error, Result};

/// In-plane unit vector at a polar angle.
fn e2(angle: f64) -> Vector2<f64> {
    Vector2::new(angle.cos(), angle.sin())
}

/// Relative pose of a coplanar pair: orientations, separation direction,
/// and center distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairAngles {
    /// Orientation angle of swimmer 1.
    pub theta1: f64,
    /// Orientation angle of swimmer 2.
    pub theta2: f64,
    /// Polar angle of the line from center 1 to center 2.
    pub phi: f64,
    /// Center distance.
    pub a: f64,
}

impl PairAngles {
    /// Series expansion parameter `eps = 1/a`.
    pub fn eps(&self) -> f64 {
        1.0 / self.a
    }

    /// Separation direction relative to swimmer 1, `phi - theta1`; the
    /// natural variable when both swimmers point the same way.
    pub fn phi_tilde(&self) -> f64 {
        self.phi - self.theta1
    }

    /// Convergence ratio `2L / a` of the series.
    pub fn series_ratio(&self, half_length: f64) -> f64 {
        2.0 * half_length / self.a
    }

    /// Whether the ratio is comfortably small; beyond `1/2` truncation
    /// errors are no longer decorative and callers should warn.
    pub fn well_separated(&self, half_length: f64) -> bool {
        self.series_ratio(half_length) <= 0.5
    }

    /// Reads the pair pose off two rigid-body states. Both swimmers must
    /// lie in the `z = 0` plane with in-plane axes.
    pub fn from_states(s1: &SwimmerState, s2: &SwimmerState) -> Result<Self> {
        let d = s2.x_c - s1.x_c;
        let a = d.norm();
        let planar = s1.tau.z.abs() <= 1e-9
            && s2.tau.z.abs() <= 1e-9
            && d.z.abs() <= 1e-9 * a.max(1.0);
        if !planar {
            return Err(Error::InvalidGeometry(
                "pair series requires coplanar swimmers in the z = 0 plane".into(),
            ));
        }
        if a <= 0.0 {
            return Err(Error::InvalidGeometry("coincident swimmer centers".into()));
        }
        Ok(PairAngles {
            theta1: s1.angle(),
            theta2: s2.angle(),
            phi: d.y.atan2(d.x),
            a,
        })
    }
}

/// Odd auxiliary function `z(zeta) = 2 (1/|1+zeta| - 1/|1-zeta|)` entering
/// the isolated thrust partition of the classical closure.
pub fn z_factor(zeta: f64) -> f64 {
    2.0 * (1.0 / (1.0 + zeta).abs() - 1.0 / (1.0 - zeta).abs())
}

/// Isolated thrust partition `alpha_0` in bulk fluid for the swimmer's drag
/// closure. Classical: `alpha_0 = (1 + z(zeta)) / 2`, independent of the
/// ball size. Point-force: the drag term survives in the rigidity row,
/// giving
///
/// ```text
/// alpha_0 = [xi (1/2 + 1/|1-zeta| - 1/|1+zeta|) - 1/2] / (xi - 1)
/// ```
///
/// with `xi = R/L`.
pub fn alpha0_bulk(params: &SwimmerParams) -> f64 {
    match params.drag {
        DragConvention::Stokes => 0.5 * (1.0 + z_factor(params.zeta)),
        DragConvention::PointForce => {
            let xi = params.xi();
            let zeta = params.zeta;
            (xi * (0.5 + 1.0 / (1.0 - zeta).abs() - 1.0 / (1.0 + zeta).abs()) - 0.5) / (xi - 1.0)
        }
    }
}

/// How to evaluate the isolated thrust partition inside the film series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Q2dAlphaMode {
    /// Solve the film's own one-swimmer rigidity row (default; the series
    /// then shares its zeroth order with the film solver).
    #[default]
    SelfConsistent,
    /// Reuse the bulk closed form; kept for comparison because the film
    /// orders are often quoted with the bulk symbol.
    BulkClosedForm,
}

/// Isolated thrust partition in a film of half gap `h`.
///
/// The film analog of the axial kernel projection is `g~_q = f(h)/(qL)^2`
/// with the midplane strength `f(h) = 3h/(16 pi mu)`; the closed forms are
/// the bulk ones with `1/(4 pi mu L q)` replaced by `g~_q`. Under the
/// classical closure the strength cancels:
/// `alpha_0 = 1/2 + 2 [(1+zeta)^-2 - (1-zeta)^-2]`.
pub fn alpha0_q2d(params: &SwimmerParams, h: f64, mu: f64, mode: Q2dAlphaMode) -> f64 {
    if mode == Q2dAlphaMode::BulkClosedForm {
        return alpha0_bulk(params);
    }
    let zeta = params.zeta;
    let l = params.half_length;
    let g = |q: f64| 3.0 * h / (16.0 * PI * mu) / (q * l * q * l);
    let (g2, g1m, g1p) = (g(2.0), g(1.0 - zeta), g(1.0 + zeta));
    match params.drag {
        DragConvention::Stokes => (g2 - g1m + g1p) / (2.0 * g2),
        DragConvention::PointForce => {
            let inv_g = 1.0 / gamma0(params.ball_radius, mu, params.drag);
            (g2 + g1m - g1p - inv_g) / (2.0 * (g2 - inv_g))
        }
    }
}

/// Closed-form bulk swim speed for either closure (order zero of the
/// series). Matches the one-swimmer solver to roundoff.
pub fn v0_bulk(params: &SwimmerParams, mu: f64) -> f64 {
    let l = params.half_length;
    let zeta = params.zeta;
    let g = |q: f64| 1.0 / (4.0 * PI * mu * l * q.abs());
    let alpha0 = alpha0_bulk(params);
    let inv_g = 1.0 / gamma0(params.ball_radius, mu, params.drag);
    match params.drag {
        DragConvention::Stokes => {
            params.f_p * (alpha0 * g(2.0) + g(1.0 - zeta) + inv_g)
        }
        DragConvention::PointForce => {
            params.f_p * (alpha0 * g(2.0) - g(1.0 - zeta) + (1.0 - alpha0) * inv_g)
        }
    }
}

/// Closed-form film swim speed for either closure.
pub fn v0_q2d(params: &SwimmerParams, h: f64, mu: f64, mode: Q2dAlphaMode) -> f64 {
    let l = params.half_length;
    let zeta = params.zeta;
    let g = |q: f64| 3.0 * h / (16.0 * PI * mu) / (q * l * q * l);
    let alpha0 = alpha0_q2d(params, h, mu, mode);
    let inv_g = 1.0 / gamma0(params.ball_radius, mu, params.drag);
    match params.drag {
        DragConvention::Stokes => params.f_p * (alpha0 * g(2.0) + g(1.0 - zeta) + inv_g),
        DragConvention::PointForce => {
            params.f_p * (alpha0 * g(2.0) - g(1.0 - zeta) + (1.0 - alpha0) * inv_g)
        }
    }
}

/// Material prefactors of the bulk pair series.
///
/// `dipole` (the coefficient usually written `A`) carries the force-dipole
/// strength `1 - zeta - 2 alpha_0`; it multiplies the `eps^2` translation
/// and `eps^3` rotation shape factors. `quadrupole` (`D`) carries
/// `zeta^2 - 1` and multiplies the `eps^4` rotation factor. Under the
/// point-force closure the dipole sign encodes the swimmer type: positive
/// for pushers, negative for pullers.
#[derive(Debug, Clone, Copy)]
pub struct PairCoefficients {
    pub dipole: f64,
    pub quadrupole: f64,
    pub alpha0: f64,
    pub v0: f64,
}

/// Bulk pair coefficients for the swimmer's drag closure.
pub fn pair_coefficients(params: &SwimmerParams, mu: f64) -> Result<PairCoefficients> {
    params.validate()?;
    let alpha0 = alpha0_bulk(params);
    let l = params.half_length;
    let zeta = params.zeta;
    Ok(PairCoefficients {
        dipole: params.f_p * l * (1.0 - zeta - 2.0 * alpha0) / (32.0 * PI * mu),
        quadrupole: 3.0 * params.f_p * l * l * (zeta * zeta - 1.0) / (256.0 * PI * mu),
        alpha0,
        v0: v0_bulk(params, mu),
    })
}

/// Material prefactors of the film pair series: `eps^3` translation and
/// `eps^4`, `eps^5` rotation.
#[derive(Debug, Clone, Copy)]
pub struct PairCoefficientsQ2d {
    /// Coefficient of the `eps^3` translation correction.
    pub v3: f64,
    /// Coefficient of the `eps^4` rotation term (equal for both swimmers).
    pub w4: f64,
    /// Coefficient of the `eps^5` rotation term.
    pub w5: f64,
    pub alpha0: f64,
    pub v0: f64,
}

/// Film pair coefficients. The film's screened kernel strength `3h/2`
/// multiplies every interaction order (relative to the bare `1/(4 pi mu)`
/// normalization of the bulk factors).
pub fn pair_coefficients_q2d(
    params: &SwimmerParams,
    h: f64,
    mu: f64,
    mode: Q2dAlphaMode,
) -> Result<PairCoefficientsQ2d> {
    params.validate()?;
    let alpha0 = alpha0_q2d(params, h, mu, mode);
    let l = params.half_length;
    let zeta = params.zeta;
    let m1 = 1.0 - zeta - 2.0 * alpha0;
    let film = 1.5 * h;
    Ok(PairCoefficientsQ2d {
        v3: film * params.f_p * l * m1 / (4.0 * PI * mu),
        w4: film * 3.0 * params.f_p * l * m1 / (4.0 * PI * mu),
        w5: film * 3.0 * params.f_p * l * l * (zeta * zeta - 1.0) / (2.0 * PI * mu),
        alpha0,
        v0: v0_q2d(params, h, mu, mode),
    })
}

/// Pure trigonometric shape factors of the bulk series for both swimmers:
/// `B` drives the `eps^2` translation, `C` the `eps^3` rotation, `E` the
/// `eps^4` rotation. Bounded by `|C| <= 24` and `|E| <= 72`.
#[derive(Debug, Clone, Copy)]
pub struct TrigFactors {
    pub b1: Vector2<f64>,
    pub b2: Vector2<f64>,
    pub c1: f64,
    pub c2: f64,
    pub e1: f64,
    pub e2: f64,
}

fn b_factor(theta_other: f64, phi: f64) -> Vector2<f64> {
    -2.0 * (1.0 + 3.0 * (2.0 * (theta_other - phi)).cos()) * e2(phi)
}

fn c_factor(theta1: f64, theta2: f64, phi: f64) -> f64 {
    3.0 * (theta1 - phi).sin()
        * (5.0 * (theta1 + 2.0 * theta2 - 3.0 * phi).cos()
            + 2.0 * (theta1 - phi).cos()
            + (theta1 - 2.0 * theta2 + phi).cos())
}

fn e_factor(theta1: f64, theta2: f64, phi: f64) -> f64 {
    35.0 * (2.0 * theta1 + 3.0 * theta2 - 5.0 * phi).sin()
        + 5.0 * (2.0 * theta1 + theta2 - 3.0 * phi).sin()
        + 5.0 * (2.0 * theta1 - theta2 - phi).sin()
        - 4.0 * (theta2 - phi).sin()
        - 20.0 * (3.0 * theta2 - 3.0 * phi).sin()
        + 3.0 * (2.0 * theta1 - 3.0 * theta2 + phi).sin()
}

/// Shape factors at a general pair pose. Swimmer 2's factors follow from
/// swimmer 1's by the exchange rule: swap the orientation angles and turn
/// the separation direction around (`phi -> phi + pi`).
pub fn trig_factors(theta1: f64, theta2: f64, phi: f64) -> TrigFactors {
    let flip = phi + PI;
    TrigFactors {
        b1: b_factor(theta2, phi),
        b2: b_factor(theta1, flip),
        c1: c_factor(theta1, theta2, phi),
        c2: c_factor(theta2, theta1, flip),
        e1: e_factor(theta1, theta2, phi),
        e2: e_factor(theta2, theta1, flip),
    }
}

/// Shape factors of the mirror configuration (`theta2 = -theta1`, partner
/// straight above, `phi = pi/2`), in closed form:
///
/// ```text
/// C1 = -3 sin(2 theta) (3 - cos(2 theta))          C2 = -C1
/// B1 = (0, -2 (1 - 3 cos(2 theta)))                B2 = -B1
/// E1 = cos(theta) (2 - 56 cos(2 theta) + 6 cos(4 theta)),  E2 = -E1
/// ```
///
/// All three pairs are antisymmetric, as mirror symmetry demands (the
/// vertical velocity and turn rate of the partner must be the reflection of
/// swimmer 1's).
pub fn mirror_factors(theta1: f64) -> TrigFactors {
    let c1 = -3.0 * (2.0 * theta1).sin() * (3.0 - (2.0 * theta1).cos());
    let b1 = Vector2::new(0.0, -2.0 * (1.0 - 3.0 * (2.0 * theta1).cos()));
    let e1 = theta1.cos()
        * (2.0 - 56.0 * (2.0 * theta1).cos() + 6.0 * (4.0 * theta1).cos());
    TrigFactors {
        b1,
        b2: -b1,
        c1,
        c2: -c1,
        e1,
        e2: -e1,
    }
}

/// Shape factors of the parallel configuration (`theta1 = theta2`) as
/// functions of the relative separation direction `phi_tilde = phi -
/// theta1`, expressed in the frame where both swimmers point along `x`:
///
/// ```text
/// C1 = C2 = 3 sin(2 phi~) (1 - 5 cos(2 phi~))
/// B1 = -2 (1 + 3 cos(2 phi~)) e(phi~)              B2 = -B1
/// E1 = 2 sin(phi~) + 15 sin(3 phi~) - 35 sin(5 phi~),   E2 = -E1
/// ```
pub fn parallel_factors(phi_tilde: f64) -> TrigFactors {
    let c = 3.0 * (2.0 * phi_tilde).sin() * (1.0 - 5.0 * (2.0 * phi_tilde).cos());
    let b1 = -2.0 * (1.0 + 3.0 * (2.0 * phi_tilde).cos()) * e2(phi_tilde);
    let e1 = 2.0 * phi_tilde.sin() + 15.0 * (3.0 * phi_tilde).sin()
        - 35.0 * (5.0 * phi_tilde).sin();
    TrigFactors {
        b1,
        b2: -b1,
        c1: c,
        c2: c,
        e1,
        e2: -e1,
    }
}

/// In-plane rigid-body motion of one swimmer: velocity and signed turn rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarMotion {
    pub v: Vector2<f64>,
    pub omega: f64,
}

fn check_series_domain(angles: &PairAngles, half_length: f64) -> Result<()> {
    let ratio = angles.series_ratio(half_length);
    if !(ratio < 1.0) {
        return Err(Error::SeriesOutOfRange(ratio));
    }
    Ok(())
}

/// Bulk pair motion truncated at the given series order (0 to 4).
///
/// Orders: 0 self-propulsion, 2 translation correction, 3 and 4 rotation.
/// Orders 1 and the rotational orders up to 2 vanish identically.
pub fn pair_velocities_3d(
    angles: &PairAngles,
    coeffs: &PairCoefficients,
    order: u32,
    half_length: f64,
) -> Result<[PlanarMotion; 2]> {
    if order > 4 {
        return Err(Error::InvalidGeometry(format!(
            "bulk series is only available through order 4, got {order}"
        )));
    }
    check_series_domain(angles, half_length)?;
    let eps = angles.eps();
    let tf = trig_factors(angles.theta1, angles.theta2, angles.phi);
    let mut m = [
        PlanarMotion { v: coeffs.v0 * e2(angles.theta1), omega: 0.0 },
        PlanarMotion { v: coeffs.v0 * e2(angles.theta2), omega: 0.0 },
    ];
    if order >= 2 {
        let s = eps * eps * coeffs.dipole;
        m[0].v += s * tf.b1;
        m[1].v += s * tf.b2;
    }
    if order >= 3 {
        let s = eps.powi(3) * coeffs.dipole;
        m[0].omega += s * tf.c1;
        m[1].omega += s * tf.c2;
    }
    if order >= 4 {
        let s = eps.powi(4) * coeffs.quadrupole;
        m[0].omega += s * tf.e1;
        m[1].omega += s * tf.e2;
    }
    Ok(m)
}

/// Film pair motion truncated at the given series order (0 to 5).
///
/// The film screens interactions one order harder than bulk: the first
/// translation correction sits at order 3, rotations at 4 and 5.
pub fn pair_velocities_q2d(
    angles: &PairAngles,
    coeffs: &PairCoefficientsQ2d,
    order: u32,
    half_length: f64,
) -> Result<[PlanarMotion; 2]> {
    if order > 5 {
        return Err(Error::InvalidGeometry(format!(
            "film series is only available through order 5, got {order}"
        )));
    }
    check_series_domain(angles, half_length)?;
    let eps = angles.eps();
    let (t1, t2, phi) = (angles.theta1, angles.theta2, angles.phi);
    let mut m = [
        PlanarMotion { v: coeffs.v0 * e2(t1), omega: 0.0 },
        PlanarMotion { v: coeffs.v0 * e2(t2), omega: 0.0 },
    ];
    if order >= 3 {
        let s = eps.powi(3) * coeffs.v3;
        m[0].v += s * Vector2::new(
            -(2.0 * t2 - 3.0 * phi).cos(),
            (2.0 * t2 - 3.0 * phi).sin(),
        );
        // Exchange rule (swap angles, phi -> phi + pi): the five-fold phase
        // flips the direction sign.
        m[1].v += s * Vector2::new(
            (2.0 * t1 - 3.0 * phi).cos(),
            -(2.0 * t1 - 3.0 * phi).sin(),
        );
    }
    if order >= 4 {
        // Even combined phase: the same turn rate for both swimmers.
        let s = eps.powi(4) * coeffs.w4 * (2.0 * t1 + 2.0 * t2 - 4.0 * phi).sin();
        m[0].omega += s;
        m[1].omega += s;
    }
    if order >= 5 {
        let s = eps.powi(5) * coeffs.w5;
        m[0].omega += s * (2.0 * t1 + 3.0 * t2 - 5.0 * phi).sin();
        m[1].omega -= s * (2.0 * t2 + 3.0 * t1 - 5.0 * phi).sin();
    }
    Ok(m)
}

/// Mirror-configuration turn rate of swimmer 1 at orientation `theta`,
/// truncated at order 4: `eps^3 A C1(theta) + eps^4 D E1(theta)`.
pub fn mirror_turn_rate(coeffs: &PairCoefficients, eps: f64, theta: f64) -> f64 {
    let tf = mirror_factors(theta);
    eps.powi(3) * coeffs.dipole * tf.c1 + eps.powi(4) * coeffs.quadrupole * tf.e1
}

/// Mirror-configuration vertical velocity of swimmer 1 (the component that
/// breaks or preserves translational steadiness): `v0 sin(theta) + eps^2 A
/// B1_y(theta)`.
pub fn mirror_vertical_velocity(coeffs: &PairCoefficients, eps: f64, theta: f64) -> f64 {
    let tf = mirror_factors(theta);
    coeffs.v0 * theta.sin() + eps * eps * coeffs.dipole * tf.b1.y
}

/// Finds all zeros of `f` on `[lo, hi)` by dense scanning plus bisection.
/// Roots are refined until the bracket is below `1e-14` and deduplicated to
/// `1e-9`.
fn scan_roots(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, grid_n: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let step = (hi - lo) / grid_n as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for k in 1..=grid_n {
        let x1 = lo + step * k as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            while b - a > 1e-14 {
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                } else if fa * fm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    roots
}

/// Orientations at which the mirror pair stops turning, through order 4.
///
/// The straight-up and straight-down orientations `+-pi/2` are exact roots
/// at every order. The axis-aligned orientations survive only in perturbed
/// form, shifted by `O(eps)` with leading offset `-4 eps D / A` near zero
/// (and its image near `pi`). Roots are polished until the turn rate is
/// below `1e-12` of the `eps^3 A` scale; values within `1e-9` of `+-pi/2`
/// snap to the exact angles. The scan covers `[-pi/4, 5 pi/4)` shifted to
/// keep the near-`pi` root un-wrapped, so returned angles may slightly
/// exceed `pi`.
pub fn rotationally_steady_angles(coeffs: &PairCoefficients, eps: f64) -> Result<Vec<f64>> {
    if coeffs.quadrupole == 0.0 {
        return Err(Error::DegenerateD);
    }
    let g = |theta: f64| mirror_turn_rate(coeffs, eps, theta);
    let mut roots = scan_roots(&g, -PI / 4.0, 7.0 * PI / 4.0, 8192);
    for r in &mut roots {
        for exact in [-PI / 2.0, PI / 2.0, 3.0 * PI / 2.0] {
            if (*r - exact).abs() < 1e-9 {
                *r = if exact == 3.0 * PI / 2.0 { -PI / 2.0 } else { exact };
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(roots)
}

/// Joint scan for rotational and translational steadiness of the mirror
/// configuration.
#[derive(Debug, Clone)]
pub struct SteadyScan {
    /// Zeros of the turn rate.
    pub rotational: Vec<f64>,
    /// Zeros of the vertical velocity.
    pub translational: Vec<f64>,
    /// Rotational roots with a translational root within one grid cell.
    pub joint: Vec<f64>,
}

/// Scans `theta in [-pi, pi)` on `grid_n` points for both steadiness
/// conditions and intersects them. For small `eps` the rotational roots sit
/// at `{~0-, +-pi/2, ~pi+}` and the translational ones near `{0, pi}` with
/// `O(eps^2)` offsets on the other side, so the intersection is empty: the
/// mirror pair admits no jointly steady orientation.
pub fn steady_state_scan(
    coeffs: &PairCoefficients,
    eps: f64,
    grid_n: usize,
) -> Result<SteadyScan> {
    if grid_n < 256 {
        return Err(Error::InvalidGeometry(format!(
            "steady-state scan needs at least 256 grid points, got {grid_n}"
        )));
    }
    if coeffs.quadrupole == 0.0 {
        return Err(Error::DegenerateD);
    }
    let g = |theta: f64| mirror_turn_rate(coeffs, eps, theta);
    let t = |theta: f64| mirror_vertical_velocity(coeffs, eps, theta);
    let rotational = scan_roots(&g, -PI, PI, grid_n);
    let translational = scan_roots(&t, -PI, PI, grid_n);
    let cell = 2.0 * PI / grid_n as f64;
    let wrap = |x: f64| {
        let mut y = (x + PI).rem_euclid(2.0 * PI) - PI;
        if y == PI {
            y = -PI;
        }
        y
    };
    let joint = rotational
        .iter()
        .copied()
        .filter(|&r| {
            translational
                .iter()
                .any(|&t| wrap(r - t).abs() < cell)
        })
        .collect();
    Ok(SteadyScan {
        rotational,
        translational,
        joint,
    })
}

/// Leading-order rate of the mirror-symmetry defect
/// `delta = pi + 2 phi - (theta1 + theta2)` for a pair at separation
/// `1/eps`, with `theta1` measured in the frame where the partner sits
/// straight below swimmer 1:
///
/// ```text
/// d delta / dt = -2 eps v0 sin(theta1 - delta/2) sin(delta/2)
/// ```
///
/// In that frame `0 < theta1 < pi` is a receding pair (swimmer 1 tilted
/// away from the partner): the defect decays and the mirror symmetry is
/// restored. Approaching pairs (`-pi < theta1 < 0`) amplify the defect.
/// The formula captures the quadrant signs of the self-propulsion channel;
/// the measured small-defect rate is steeper by a factor close to two (see
/// the pair-dynamics tests).
pub fn mirror_stability_rate(theta1: f64, delta: f64, eps: f64, v0: f64) -> f64 {
    -2.0 * eps * v0 * (theta1 - delta / 2.0).sin() * (delta / 2.0).sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;
    use std::f64::consts::FRAC_PI_2;

    fn params(zeta: f64, xi: f64, drag: DragConvention) -> SwimmerParams {
        SwimmerParams {
            f_p: 1.0,
            half_length: 1.0,
            ball_radius: xi,
            zeta,
            drag,
        }
    }

    fn rng(seed: &mut u64) -> f64 {
        *seed ^= *seed << 13;
        *seed ^= *seed >> 7;
        *seed ^= *seed << 17;
        (*seed >> 11) as f64 / (1u64 << 53) as f64 * 2.0 * PI - PI
    }

    #[test]
    fn z_factor_frozen_values() {
        assert_eq!(z_factor(0.0), 0.0);
        assert!((z_factor(-2.0) - 4.0 / 3.0).abs() < 1e-15);
        assert!((z_factor(2.0) + 4.0 / 3.0).abs() < 1e-15);
        assert!((z_factor(0.5) + 8.0 / 3.0).abs() < 1e-15);
        assert!((z_factor(-3.0) - 0.5).abs() < 1e-15);
        // Piecewise closed forms: 4/(zeta^2-1) left of -1, 4 zeta/(zeta^2-1)
        // inside, -4/(zeta^2-1) right of +1.
        for &zeta in &[-3.0, -2.5, -1.4] {
            assert!((z_factor(zeta) - 4.0 / (zeta * zeta - 1.0)).abs() < 1e-14);
            assert!((z_factor(-zeta) + 4.0 / (zeta * zeta - 1.0)).abs() < 1e-14);
        }
        for &zeta in &[-0.7, 0.3, 0.9] {
            assert!((z_factor(zeta) - 4.0 * zeta / (zeta * zeta - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn alpha0_frozen_values() {
        let stokes = params(-2.0, 0.05, DragConvention::Stokes);
        assert!((alpha0_bulk(&stokes) - 7.0 / 6.0).abs() < 1e-15);
        let point = params(-2.0, 0.1, DragConvention::PointForce);
        assert!((alpha0_bulk(&point) - 31.0 / 54.0).abs() < 1e-15);
        // zeta = 0 is symmetric: the split is even under both closures.
        for drag in [DragConvention::Stokes, DragConvention::PointForce] {
            assert!((alpha0_bulk(&params(0.0, 0.05, drag)) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn dipole_sign_encodes_swimmer_type_point_force() {
        for &zeta in &[-3.0, -2.0, -0.5] {
            let c = pair_coefficients(&params(zeta, 0.05, DragConvention::PointForce), 1.0)
                .unwrap();
            assert!(c.dipole > 0.0, "pusher zeta={zeta} must have positive dipole");
            let c = pair_coefficients(&params(-zeta, 0.05, DragConvention::PointForce), 1.0)
                .unwrap();
            assert!(c.dipole < 0.0, "puller zeta={} must have negative dipole", -zeta);
        }
    }

    #[test]
    fn dipole_is_odd_in_zeta_under_both_closures() {
        for drag in [DragConvention::Stokes, DragConvention::PointForce] {
            for &zeta in &[0.5, 2.0] {
                let plus = pair_coefficients(&params(zeta, 0.05, drag), 1.0).unwrap();
                let minus = pair_coefficients(&params(-zeta, 0.05, drag), 1.0).unwrap();
                assert!(
                    (plus.dipole + minus.dipole).abs() < 1e-15,
                    "{drag:?} zeta={zeta}"
                );
            }
        }
    }

    #[test]
    fn quadrupole_is_closure_independent() {
        let a = pair_coefficients(&params(-2.0, 0.05, DragConvention::Stokes), 1.0).unwrap();
        let b = pair_coefficients(&params(-2.0, 0.05, DragConvention::PointForce), 1.0).unwrap();
        assert_eq!(a.quadrupole, b.quadrupole);
        let want = 3.0 * 3.0 / (256.0 * PI);
        assert!((a.quadrupole - want).abs() < 1e-15);
    }

    #[test]
    fn mirror_factor_frozen_values() {
        let tf = mirror_factors(0.0);
        assert_eq!(tf.c1, 0.0);
        assert!((tf.b1 - Vector2::new(0.0, 4.0)).norm() < 1e-15);
        assert!((tf.e1 + 48.0).abs() < 1e-15);
        let tf = mirror_factors(PI / 4.0);
        assert!((tf.c1 + 9.0).abs() < 1e-14);
        assert!((tf.e1 + 2.0 * 2.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn parallel_factor_frozen_values() {
        let tf = parallel_factors(0.0);
        assert_eq!(tf.c1, 0.0);
        assert_eq!(tf.e1, 0.0);
        assert!((tf.b1 - Vector2::new(-8.0, 0.0)).norm() < 1e-15);
        assert!((tf.b2 - Vector2::new(8.0, 0.0)).norm() < 1e-15);
        let tf = parallel_factors(PI / 4.0);
        assert!((tf.c1 - 3.0).abs() < 1e-14);
        assert!((tf.e1 - 26.0 * 2.0_f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn specializations_match_general_factors() {
        let mut seed = 0xA5B35705F2D3E1C7_u64;
        for _ in 0..200 {
            let theta = rng(&mut seed);
            let general = trig_factors(theta, -theta, FRAC_PI_2);
            let mirror = mirror_factors(theta);
            assert!((general.b1 - mirror.b1).norm() < 1e-12, "B1 at {theta}");
            assert!((general.b2 - mirror.b2).norm() < 1e-12, "B2 at {theta}");
            assert!((general.c1 - mirror.c1).abs() < 1e-12, "C1 at {theta}");
            assert!((general.c2 - mirror.c2).abs() < 1e-12, "C2 at {theta}");
            assert!((general.e1 - mirror.e1).abs() < 1e-12, "E1 at {theta}");
            assert!((general.e2 - mirror.e2).abs() < 1e-12, "E2 at {theta}");

            let phi_tilde = rng(&mut seed);
            // Parallel closed forms live in the frame theta1 = theta2 = 0.
            let general = trig_factors(0.0, 0.0, phi_tilde);
            let parallel = parallel_factors(phi_tilde);
            assert!((general.b1 - parallel.b1).norm() < 1e-12);
            assert!((general.b2 - parallel.b2).norm() < 1e-12);
            assert!((general.c1 - parallel.c1).abs() < 1e-12);
            assert!((general.c2 - parallel.c2).abs() < 1e-12);
            assert!((general.e1 - parallel.e1).abs() < 1e-12);
            assert!((general.e2 - parallel.e2).abs() < 1e-12);
        }
    }

    #[test]
    fn exchange_rule_is_an_involution() {
        // Applying the swap twice must reproduce swimmer 1's factors.
        let mut seed = 0x0DDC0FFEE1234567_u64;
        for _ in 0..100 {
            let (t1, t2, phi) = (rng(&mut seed), rng(&mut seed), rng(&mut seed));
            let once = trig_factors(t1, t2, phi);
            let twice = trig_factors(t2, t1, phi + PI);
            assert!((once.b1 - twice.b2).norm() < 1e-12);
            assert!((once.c1 - twice.c2).abs() < 1e-12);
            assert!((once.e1 - twice.e2).abs() < 1e-12);
        }
    }

    #[test]
    fn shape_factors_respect_bounds() {
        let mut seed = 0x13579BDF02468ACE_u64;
        for _ in 0..500 {
            let tf = trig_factors(rng(&mut seed), rng(&mut seed), rng(&mut seed));
            assert!(tf.c1.abs() <= 24.0 + 1e-12 && tf.c2.abs() <= 24.0 + 1e-12);
            assert!(tf.e1.abs() <= 72.0 + 1e-12 && tf.e2.abs() <= 72.0 + 1e-12);
            assert!(tf.b1.norm() <= 8.0 + 1e-12 && tf.b2.norm() <= 8.0 + 1e-12);
        }
    }

    #[test]
    fn head_to_tail_separation_rate() {
        // theta1 = theta2 = 0, partner straight ahead: relative recession
        // (v2 - v1) . e_x = 16 eps^2 A.
        let p = params(-2.0, 0.05, DragConvention::PointForce);
        let coeffs = pair_coefficients(&p, 1.0).unwrap();
        let angles = PairAngles { theta1: 0.0, theta2: 0.0, phi: 0.0, a: 50.0 };
        let m = pair_velocities_3d(&angles, &coeffs, 4, 1.0).unwrap();
        let rate = (m[1].v - m[0].v).x;
        let want = 16.0 * angles.eps() * angles.eps() * coeffs.dipole;
        assert!((rate - want).abs() < 1e-15, "{rate} vs {want}");
        assert_eq!(m[0].omega, 0.0, "axial symmetry: no rotation");
    }

    #[test]
    fn truncation_orders_are_cumulative() {
        let p = params(-2.0, 0.05, DragConvention::PointForce);
        let coeffs = pair_coefficients(&p, 1.0).unwrap();
        let angles = PairAngles { theta1: 0.7, theta2: -0.2, phi: 0.4, a: 60.0 };
        let o0 = pair_velocities_3d(&angles, &coeffs, 0, 1.0).unwrap();
        let o1 = pair_velocities_3d(&angles, &coeffs, 1, 1.0).unwrap();
        let o2 = pair_velocities_3d(&angles, &coeffs, 2, 1.0).unwrap();
        let o3 = pair_velocities_3d(&angles, &coeffs, 3, 1.0).unwrap();
        let o4 = pair_velocities_3d(&angles, &coeffs, 4, 1.0).unwrap();
        assert_eq!(o0, o1, "no first-order term");
        assert!((o0[0].v - coeffs.v0 * e2(0.7)).norm() < 1e-15);
        assert_ne!(o1[0].v, o2[0].v);
        assert_eq!(o2[0].omega, 0.0);
        assert_ne!(o3[0].omega, 0.0);
        assert_ne!(o3[0].omega, o4[0].omega);
        assert_eq!(o3[0].v, o4[0].v, "orders 3 and 4 only touch rotation");
    }

    #[test]
    fn series_domain_is_guarded() {
        let p = params(-2.0, 0.05, DragConvention::Stokes);
        let coeffs = pair_coefficients(&p, 1.0).unwrap();
        let tight = PairAngles { theta1: 0.0, theta2: 0.0, phi: 0.0, a: 1.5 };
        assert!(matches!(
            pair_velocities_3d(&tight, &coeffs, 4, 1.0),
            Err(Error::SeriesOutOfRange(_))
        ));
        let angles = PairAngles { theta1: 0.0, theta2: 0.0, phi: 0.0, a: 3.0 };
        assert!(!angles.well_separated(1.0), "ratio 2/3 is valid but marginal");
        assert!(pair_velocities_3d(&angles, &coeffs, 4, 1.0).is_ok());
        assert!(pair_velocities_3d(&angles, &coeffs, 5, 1.0).is_err());
    }

    #[test]
    fn film_series_antisymmetries() {
        let p = params(-2.0, 0.04, DragConvention::PointForce);
        let coeffs = pair_coefficients_q2d(&p, 0.2, 1.0, Q2dAlphaMode::SelfConsistent).unwrap();
        // Mirror pose: the order-5 turn rates must be opposite, order-4 equal.
        let theta = 0.6;
        let angles = PairAngles { theta1: theta, theta2: -theta, phi: FRAC_PI_2, a: 80.0 };
        let o4 = pair_velocities_q2d(&angles, &coeffs, 4, 1.0).unwrap();
        // The order-4 term carries sin(2 t1 + 2 t2 - 4 phi) = sin(-2 pi) = 0
        // in the mirror pose.
        assert!(o4[0].omega.abs() < 1e-18 && o4[1].omega.abs() < 1e-18);
        let o5 = pair_velocities_q2d(&angles, &coeffs, 5, 1.0).unwrap();
        assert!((o5[0].omega + o5[1].omega).abs() < 1e-18 * o5[0].omega.abs().max(1.0));
        assert!(o5[0].omega != 0.0);
        // Vertical velocities mirror each other.
        let o3 = pair_velocities_q2d(&angles, &coeffs, 3, 1.0).unwrap();
        assert!((o3[0].v.y + o3[1].v.y).abs() < 1e-15);
        assert!((o3[0].v.x - o3[1].v.x).abs() < 1e-15);
    }

    #[test]
    fn film_alpha_modes_differ_and_default_is_self_consistent() {
        let p = params(-2.0, 0.04, DragConvention::PointForce);
        let self_c = alpha0_q2d(&p, 0.2, 1.0, Q2dAlphaMode::SelfConsistent);
        let bulk = alpha0_q2d(&p, 0.2, 1.0, Q2dAlphaMode::BulkClosedForm);
        assert!((bulk - alpha0_bulk(&p)).abs() < 1e-15);
        assert!((self_c - bulk).abs() > 1e-3, "modes must be distinguishable");
        assert_eq!(Q2dAlphaMode::default(), Q2dAlphaMode::SelfConsistent);
        // Classical closure in the film: the kernel strength cancels,
        // alpha_0 = 1/2 + 2 [(1+zeta)^-2 - (1-zeta)^-2].
        let ps = params(-2.0, 0.04, DragConvention::Stokes);
        let got = alpha0_q2d(&ps, 0.2, 1.0, Q2dAlphaMode::SelfConsistent);
        let want = 0.5 + 2.0 * (1.0 / (1.0 - 2.0_f64).powi(2) - 1.0 / (1.0 + 2.0_f64).powi(2));
        assert!((got - want).abs() < 1e-14, "{got} vs {want}");
    }

    #[test]
    fn steady_angles_structure_for_outer_pusher() {
        let p = params(-2.0, 0.05, DragConvention::PointForce);
        let coeffs = pair_coefficients(&p, 1.0).unwrap();
        let eps = 0.01;
        let roots = rotationally_steady_angles(&coeffs, eps).unwrap();
        assert_eq!(roots.len(), 4, "roots: {roots:?}");
        assert_eq!(roots[0], -FRAC_PI_2);
        assert_eq!(roots[2], FRAC_PI_2);
        // Perturbed roots: leading offset -4 eps D / A below zero and its
        // image just past pi.
        let offset = 4.0 * eps * coeffs.quadrupole / coeffs.dipole;
        assert!((roots[1] + offset).abs() < 0.1 * offset, "near-zero root {}", roots[1]);
        assert!(roots[1] < 0.0);
        assert!((roots[3] - PI - offset).abs() < 0.1 * offset, "near-pi root {}", roots[3]);
        assert!(roots[3] > PI);
        // Residual of the polished roots.
        let scale = (eps.powi(3) * coeffs.dipole).abs();
        for &r in &roots {
            assert!(
                mirror_turn_rate(&coeffs, eps, r).abs() < 1e-12 * scale,
                "residual at {r}"
            );
        }
    }

    #[test]
    fn degenerate_quadrupole_is_rejected() {
        let mut coeffs =
            pair_coefficients(&params(-2.0, 0.05, DragConvention::Stokes), 1.0).unwrap();
        coeffs.quadrupole = 0.0;
        assert!(matches!(
            rotationally_steady_angles(&coeffs, 0.01),
            Err(Error::DegenerateD)
        ));
    }

    #[test]
    fn steady_scan_finds_no_joint_roots() {
        let p = params(-2.0, 0.05, DragConvention::PointForce);
        let coeffs = pair_coefficients(&p, 1.0).unwrap();
        let scan = steady_state_scan(&coeffs, 0.01, 1024).unwrap();
        assert_eq!(scan.rotational.len(), 4, "{:?}", scan.rotational);
        assert!(scan.translational.len() >= 2, "{:?}", scan.translational);
        assert!(scan.joint.is_empty(), "joint roots {:?}", scan.joint);
        assert!(matches!(
            steady_state_scan(&coeffs, 0.01, 100),
            Err(Error::InvalidGeometry(_))
        ));
    }

    #[test]
    fn stability_rate_signs_by_quadrant() {
        let (eps, v0) = (0.005, 1.0);
        let delta = 0.01;
        // Outward tilt restores symmetry, inward tilt destroys it, and the
        // rate is odd in delta.
        assert!(mirror_stability_rate(FRAC_PI_2, delta, eps, v0) < 0.0);
        assert!(mirror_stability_rate(FRAC_PI_2, -delta, eps, v0) > 0.0);
        assert!(mirror_stability_rate(-FRAC_PI_2, delta, eps, v0) > 0.0);
        assert!(mirror_stability_rate(-FRAC_PI_2, -delta, eps, v0) < 0.0);
        assert_eq!(mirror_stability_rate(FRAC_PI_2, 0.0, eps, v0), 0.0);
    }

    #[test]
    fn pair_angles_from_states() {
        let s1 = SwimmerState {
            x_c: Vector3::new(1.0, 2.0, 0.0),
            tau: Vector3::new(0.6, 0.8, 0.0),
        };
        let s2 = SwimmerState {
            x_c: Vector3::new(1.0, 42.0, 0.0),
            tau: Vector3::new(0.6, -0.8, 0.0),
        };
        let pa = PairAngles::from_states(&s1, &s2).unwrap();
        assert!((pa.a - 40.0).abs() < 1e-15);
        assert!((pa.phi - FRAC_PI_2).abs() < 1e-15);
        assert!((pa.theta1 - 0.8_f64.atan2(0.6)).abs() < 1e-15);
        let tilted = SwimmerState {
            x_c: Vector3::new(0.0, 0.0, 5.0),
            tau: Vector3::x(),
        };
        assert!(PairAngles::from_states(&s1, &tilted).is_err());
    }
}
