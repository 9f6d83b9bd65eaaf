//! Shared fixtures for the integration suites. Each suite pulls in the
//! subset it needs, so some items are dead code in any one target.
#![allow(dead_code)]

use nalgebra::Vector3;
use swim_core::model::{DragConvention, Swimmer, SwimmerParams, SwimmerState};

pub fn params(zeta: f64, drag: DragConvention) -> SwimmerParams {
    SwimmerParams {
        f_p: 1.0,
        half_length: 1.0,
        ball_radius: 0.05,
        zeta,
        drag,
    }
}

pub fn film_params(zeta: f64, drag: DragConvention) -> SwimmerParams {
    SwimmerParams {
        ball_radius: 0.04,
        ..params(zeta, drag)
    }
}

pub fn planar(params: &SwimmerParams, x: f64, y: f64, theta: f64) -> Swimmer {
    Swimmer {
        params: *params,
        state: SwimmerState {
            x_c: Vector3::new(x, y, 0.0),
            tau: Vector3::new(theta.cos(), theta.sin(), 0.0),
        },
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    cov / var
}

/// Deterministic xorshift generator for reproducible random poses.
pub struct Rng(pub u64);

impl Rng {
    pub fn next_f64(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
