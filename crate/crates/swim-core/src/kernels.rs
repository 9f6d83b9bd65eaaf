//! Green's functions of viscous flow used by the swimmer model.
//!
//! Three kernels appear: the free-space point-force tensor (Oseen tensor),
//! the exact exterior flow of a translating rigid sphere, and the far-field
//! point-force tensor of a thin film squeezed between two no-slip walls.
//! All of them map a force (or ball velocity) to a fluid velocity at a
//! displacement `x` from the source.

use nalgebra::{Matrix3, Vector3};
use std::f64::consts::PI;

use crate::model::{DragConvention, Medium};
use crate::{Error, Result};

/// Displacements shorter than this are treated as singular. The model is
/// formulated in units where ball and body lengths are O(1), so the cutoff
/// sits far below any physical separation but above accumulated roundoff.
pub const SINGULAR_CUTOFF: f64 = 1e-12;

/// Free-space point-force tensor `G(x) = (I + x x^T / |x|^2) / (8 pi mu |x|)`.
///
/// `G(x) F` is the fluid velocity at displacement `x` from a point force `F`
/// in an unbounded fluid of viscosity `mu`. The tensor is symmetric, decays
/// like `1/|x|`, and is homogeneous of degree -1: `G(q x) = G(x) / q`.
pub fn oseen_tensor(x: &Vector3<f64>, mu: f64) -> Result<Matrix3<f64>> {
    let r = x.norm();
    if !r.is_finite() || r < SINGULAR_CUTOFF {
        return Err(Error::SingularPoint(r));
    }
    let n = x / r;
    let scale = 1.0 / (8.0 * PI * mu * r);
    Ok(scale * (Matrix3::identity() + n * n.transpose()))
}

/// Exterior flow tensor of a rigid sphere of radius `radius` translating
/// with velocity `v`: the fluid moves with `sphere_field(x, radius) * v` at
/// displacement `x` from the sphere center.
///
/// The tensor is `(3R/4r) [a I + b n n^T]` with `a = 1 + R^2/(3 r^2)` and
/// `b = 1 - R^2/r^2`; it equals the identity on the sphere surface (no-slip)
/// and approaches `6 pi mu R * G(x)` in the far field.
pub fn sphere_field(x: &Vector3<f64>, radius: f64) -> Result<Matrix3<f64>> {
    let r = x.norm();
    if !r.is_finite() || r < SINGULAR_CUTOFF {
        return Err(Error::SingularPoint(r));
    }
    if r < radius {
        return Err(Error::InsideSphere { r, radius });
    }
    let n = x / r;
    let rho2 = (radius / r) * (radius / r);
    let a = 1.0 + rho2 / 3.0;
    let b = 1.0 - rho2;
    let scale = 3.0 * radius / (4.0 * r);
    Ok(scale * (a * Matrix3::identity() + b * (n * n.transpose())))
}

/// Ball drag coefficient `gamma_0` for the chosen convention.
///
/// [`DragConvention::Stokes`] is the classical no-slip sphere value
/// `6 pi mu R`. [`DragConvention::PointForce`] uses `8 pi mu R`, the
/// coefficient consistent with representing each ball purely by the
/// point-force kernel (the prefactor of [`oseen_tensor`] evaluated at the
/// ball surface). Both appear in the literature for this model; they select
/// slightly different self-interaction closures, see [`crate::solver`].
pub fn gamma0(radius: f64, mu: f64, conv: DragConvention) -> f64 {
    match conv {
        DragConvention::Stokes => 6.0 * PI * mu * radius,
        DragConvention::PointForce => 8.0 * PI * mu * radius,
    }
}

/// Drag force on a ball moving with velocity `v` through ambient flow `u_bg`:
/// `F = -gamma_0 (v - u_bg)`. A ball carried passively by the flow feels no
/// force.
pub fn stokes_drag_force(
    v: &Vector3<f64>,
    u_bg: &Vector3<f64>,
    radius: f64,
    mu: f64,
    conv: DragConvention,
) -> Vector3<f64> {
    -gamma0(radius, mu, conv) * (v - u_bg)
}

/// Height profile `f(z) = 3 z (1 - z / (2h)) / (8 pi mu)` of the film kernel.
///
/// The film occupies `0 <= z <= 2h` between two no-slip walls; the profile
/// is a downward parabola that vanishes on both walls and peaks at the
/// midplane with `f(h) = 3h / (16 pi mu)`.
pub fn film_strength(z: f64, h: f64, mu: f64) -> Result<f64> {
    if !(0.0..=2.0 * h).contains(&z) {
        return Err(Error::OutOfFilm { z, gap: 2.0 * h });
    }
    Ok(3.0 * z * (1.0 - z / (2.0 * h)) / (8.0 * PI * mu))
}

/// Far-field point-force tensor of a thin film (quasi-2D medium).
///
/// For an in-plane displacement `(x, y)` with `rho^2 = x^2 + y^2`, a source
/// at height `z_src` and an observation at the same height,
///
/// ```text
///             f(z)   [ x^2 - y^2    2 x y     0 ]
/// G~(x, y) = ------  [   2 x y    y^2 - x^2   0 ]
///             rho^4  [     0          0       0 ]
/// ```
///
/// The tensor decays like `1/rho^2` (one power faster than free space: the
/// walls screen the flow), is traceless, and acts on an in-plane unit vector
/// `e(beta)` as a reflection: `G~ e(beta) = (f / rho^2) e(2 psi - beta)`
/// where `psi` is the polar angle of the displacement. In particular the
/// transverse coupling `e_x . G~(d e_y) e_x = -f / d^2` is negative.
///
/// Valid in the far-field regime `rho >> h`; see [`q2d_far_field_ok`]. Both
/// endpoints of the height interval give an exactly zero tensor (no-slip
/// walls), heights outside the film are an error. The `z` component of the
/// displacement is ignored: film geometry is in-plane.
pub fn q2d_green(r: &Vector3<f64>, z: f64, h: f64, mu: f64) -> Result<Matrix3<f64>> {
    let (x, y) = (r.x, r.y);
    let rho2 = x * x + y * y;
    let rho = rho2.sqrt();
    if !rho.is_finite() || rho < SINGULAR_CUTOFF {
        return Err(Error::SingularPoint(rho));
    }
    let f = film_strength(z, h, mu)?;
    let s = f / (rho2 * rho2);
    let mut g = Matrix3::zeros();
    g[(0, 0)] = s * (x * x - y * y);
    g[(1, 1)] = -g[(0, 0)];
    g[(0, 1)] = s * 2.0 * x * y;
    g[(1, 0)] = g[(0, 1)];
    Ok(g)
}

/// Whether an in-plane distance is safely inside the far-field regime of the
/// film kernel. Below `5h` the neglected recirculation corrections are no
/// longer small; callers should warn but may proceed.
pub fn q2d_far_field_ok(rho: f64, h: f64) -> bool {
    rho >= 5.0 * h
}

/// Point-force tensor of the given medium: free space for bulk fluid, the
/// midplane film kernel for a thin film. Swimmers in a film are modeled at
/// the midplane `z = h`, where the profile peaks.
pub fn green(medium: &Medium, x: &Vector3<f64>) -> Result<Matrix3<f64>> {
    match *medium {
        Medium::Bulk3d { mu } => oseen_tensor(x, mu),
        Medium::QuasiTwoD { mu, h } => q2d_green(x, h, h, mu),
    }
}
