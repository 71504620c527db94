//! Coefficients of the weighted jump dynamics on `E = (0, inf) x R^3`: the
//! state-dependent rate, the acceptance probability of real jumps, and the
//! post-collision map acting on weight and velocity.

use crate::collision::{post_collision, CollisionAux, ModelParams};
use crate::rng::RngStream;
use crate::velocity::Velocity;

/// A weighted particle `y = (m, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedState {
    pub m: f64,
    pub v: Velocity,
}

impl WeightedState {
    pub fn new(m: f64, v: Velocity) -> Self {
        debug_assert!(m > 0.0 && m.is_finite(), "weight {m} must be positive and finite");
        WeightedState { m, v }
    }
}

/// `Lambda(v) = (1 + e0)(1 + |v|^gamma)`.
#[inline]
pub fn lambda_rate(v: Velocity, params: &ModelParams) -> f64 {
    (1.0 + params.e0) * (1.0 + speed_pow(v.norm(), params.gamma))
}

#[inline]
fn speed_pow(r: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        1.0
    } else if gamma == 1.0 {
        r
    } else {
        r.powf(gamma)
    }
}

/// Probability that a proposed jump is real:
/// `(1 + e0)|v - v*|^gamma / ((1 + |v*|^2) Lambda(v))`.
#[inline]
pub fn acceptance_q(v: Velocity, v_star: Velocity, params: &ModelParams) -> f64 {
    let num = (1.0 + params.e0) * speed_pow((v - v_star).norm(), params.gamma);
    (num / ((1.0 + v_star.norm_sq()) * lambda_rate(v, params))).min(1.0)
}

/// The map `h(y, y*, z)`: the weight is always updated, the velocity jumps
/// only when `a <= q(v, v*)`.
#[inline]
pub fn collision_map(y: WeightedState, y_star: WeightedState, z: CollisionAux, params: &ModelParams) -> WeightedState {
    let m = y.m * y_star.m * (1.0 + y_star.v.norm_sq()) / (1.0 + params.e0);
    let v = if z.a <= acceptance_q(y.v, y_star.v, params) { post_collision(y.v, y_star.v, z.sigma).0 } else { y.v };
    WeightedState { m, v }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
}

/// Monte Carlo estimate of the weak generator
/// `B phi(y, y*) = Lambda(y) * integral over H of [phi(h(y, y*, z)) - phi(y)] nu(dz)`.
///
/// Test utility only; never used by the samplers.
pub fn generator_b<F>(
    phi: F,
    y: WeightedState,
    y_star: WeightedState,
    params: &ModelParams,
    n_mc: usize,
    rng: &mut RngStream,
) -> McEstimate
where
    F: Fn(WeightedState) -> f64,
{
    assert!(n_mc >= 1);
    let base = phi(y);
    let scale = params.kappa() * lambda_rate(y.v, params);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n_mc {
        let z = CollisionAux::sample(y.v, y_star.v, &params.kernel, rng);
        let d = phi(collision_map(y, y_star, z, params)) - base;
        sum += d;
        sum_sq += d * d;
    }
    let n = n_mc as f64;
    let mean = sum / n;
    let var = if n_mc > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    McEstimate { value: scale * mean, stderr: scale * (var / n).sqrt() }
}
