//! Initial distributions.

use rand_distr::{Distribution, StandardNormal};

use crate::collision::uniform_sphere;
use crate::dynamics::WeightedState;
use crate::rng::RngStream;
use crate::velocity::Velocity;

/// Built-in velocity distributions.
#[derive(Clone, Debug, PartialEq)]
pub enum VelocityLaw {
    Dirac(Velocity),
    /// Isotropic Gaussian with the given per-component variance.
    Gaussian {
        mean: Velocity,
        variance: f64,
    },
    /// `v1` with probability `p`, `v2` otherwise.
    TwoPoint {
        v1: Velocity,
        v2: Velocity,
        p: f64,
    },
    UniformBall {
        radius: f64,
    },
    Shell {
        radius: f64,
    },
}

impl VelocityLaw {
    pub fn sample(&self, rng: &mut RngStream) -> Velocity {
        match *self {
            VelocityLaw::Dirac(v) => v,
            VelocityLaw::Gaussian { mean, variance } => {
                let s = variance.sqrt();
                let x: f64 = StandardNormal.sample(rng);
                let y: f64 = StandardNormal.sample(rng);
                let z: f64 = StandardNormal.sample(rng);
                mean + Velocity::new(x, y, z) * s
            }
            VelocityLaw::TwoPoint { v1, v2, p } => {
                if rng.uniform() < p {
                    v1
                } else {
                    v2
                }
            }
            VelocityLaw::UniformBall { radius } => {
                let r = radius * rng.uniform().cbrt();
                uniform_sphere(rng) * r
            }
            VelocityLaw::Shell { radius } => uniform_sphere(rng) * radius,
        }
    }

    /// Second moment `E|v|^2`.
    pub fn energy(&self) -> f64 {
        match *self {
            VelocityLaw::Dirac(v) => v.norm_sq(),
            VelocityLaw::Gaussian { mean, variance } => mean.norm_sq() + 3.0 * variance,
            VelocityLaw::TwoPoint { v1, v2, p } => p * v1.norm_sq() + (1.0 - p) * v2.norm_sq(),
            VelocityLaw::UniformBall { radius } => 0.6 * radius * radius,
            VelocityLaw::Shell { radius } => radius * radius,
        }
    }

    pub fn mean(&self) -> Velocity {
        match *self {
            VelocityLaw::Dirac(v) => v,
            VelocityLaw::Gaussian { mean, .. } => mean,
            VelocityLaw::TwoPoint { v1, v2, p } => v1 * p + v2 * (1.0 - p),
            VelocityLaw::UniformBall { .. } | VelocityLaw::Shell { .. } => Velocity::ZERO,
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            VelocityLaw::Dirac(v) => v.is_finite(),
            VelocityLaw::Gaussian { mean, variance } => mean.is_finite() && variance.is_finite() && variance >= 0.0,
            VelocityLaw::TwoPoint { v1, v2, p } => v1.is_finite() && v2.is_finite() && (0.0..=1.0).contains(&p),
            VelocityLaw::UniformBall { radius } | VelocityLaw::Shell { radius } => radius.is_finite() && radius >= 0.0,
        }
    }
}

/// `F0 = delta_{m0} (x) law` on weighted states.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialLaw {
    pub m0: f64,
    pub velocity: VelocityLaw,
}

impl InitialLaw {
    pub fn new(m0: f64, velocity: VelocityLaw) -> Self {
        InitialLaw { m0, velocity }
    }

    /// Unit weight: the initial law used for the Boltzmann link.
    pub fn unit(velocity: VelocityLaw) -> Self {
        InitialLaw { m0: 1.0, velocity }
    }

    pub fn sample(&self, rng: &mut RngStream) -> WeightedState {
        WeightedState { m: self.m0, v: self.velocity.sample(rng) }
    }

    /// `integral |v|^2 F0`, unweighted.
    pub fn energy(&self) -> f64 {
        self.velocity.energy()
    }

    /// `integral m |v|^2 F0`.
    pub fn weighted_energy(&self) -> f64 {
        self.m0 * self.velocity.energy()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_energies_match_declared() {
        let laws = [
            VelocityLaw::Gaussian { mean: Velocity::new(0.5, 0.0, -0.5), variance: 0.4 },
            VelocityLaw::TwoPoint { v1: Velocity::new(1.0, 0.0, 0.0), v2: Velocity::new(0.0, 2.0, 0.0), p: 0.3 },
            VelocityLaw::UniformBall { radius: 2.0 },
            VelocityLaw::Shell { radius: 1.5 },
        ];
        for (i, law) in laws.iter().enumerate() {
            let mut rng = RngStream::root(100 + i as u64);
            let n = 200_000;
            let xs: Vec<f64> = (0..n).map(|_| law.sample(&mut rng).norm_sq()).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se = (var / n as f64).sqrt();
            assert!((mean - law.energy()).abs() < 5.0 * se + 1e-12, "{law:?}: {mean} vs {}", law.energy());
        }
    }
}
