//! Collision kinematics, the angular kernel `b`, and the derived constants
//! `kappa` (total angular mass) and `c` (mean deviation cosine).

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::velocity::Velocity;

/// Shape of the angular kernel as a function of the deviation cosine `u`.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelShape {
    /// `b(u) = value`.
    Constant(f64),
    /// `b(u) = max(floor, ((1 + u) / 2)^exponent)`.
    TruncatedPower { exponent: f64, floor: f64 },
    /// Linear interpolation through `(u_i, b_i)`, zero outside the table.
    Tabulated { u: Vec<f64>, b: Vec<f64> },
}

/// A bounded, nonnegative angular kernel on `[-1, 1]` together with its
/// precomputed integrals.
#[derive(Clone, Debug)]
pub struct AngularKernel {
    shape: KernelShape,
    kappa: f64,
    mean_cosine: f64,
    sup_b: f64,
    // cumulative integral of b at the table knots (tabulated kernels only)
    cdf: Vec<f64>,
}

impl AngularKernel {
    pub fn constant(value: f64) -> Result<Self> {
        Self::build(KernelShape::Constant(value))
    }

    /// `b = 1/(4 pi)`, the kernel with `kappa = 1`.
    pub fn normalized() -> Self {
        Self::constant(1.0 / (4.0 * PI)).expect("normalized kernel is valid")
    }

    pub fn truncated_power(exponent: f64, floor: f64) -> Result<Self> {
        Self::build(KernelShape::TruncatedPower { exponent, floor })
    }

    pub fn tabulated(u: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        Self::build(KernelShape::Tabulated { u, b })
    }

    /// Reads a two-column `u b(u)` text table. Blank lines and `#` comments
    /// are skipped.
    pub fn from_table_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let mut us = Vec::new();
        let mut bs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::InvalidKernel(format!("line {}: cannot parse {s:?}", lineno + 1)))
            };
            if cols.len() != 2 {
                return Err(Error::InvalidKernel(format!("line {}: expected two columns", lineno + 1)));
            }
            us.push(parse(cols[0])?);
            bs.push(parse(cols[1])?);
        }
        Self::tabulated(us, bs)
    }

    fn build(shape: KernelShape) -> Result<Self> {
        let mut cdf = Vec::new();
        let (mass, first, sup_b) = match &shape {
            KernelShape::Constant(value) => {
                if !value.is_finite() || *value < 0.0 {
                    return Err(Error::InvalidKernel(format!("constant {value} must be finite and >= 0")));
                }
                (2.0 * value, 0.0, *value)
            }
            KernelShape::TruncatedPower { exponent, floor } => {
                let (p, f) = (*exponent, *floor);
                if !(p.is_finite() && p >= 0.0 && f.is_finite() && f >= 0.0) {
                    return Err(Error::InvalidKernel(format!(
                        "power({p}, {f}) needs finite exponent >= 0 and floor >= 0"
                    )));
                }
                let (m, c) = power_integrals(p, f);
                (m, c, f.max(1.0))
            }
            KernelShape::Tabulated { u, b } => {
                if u.len() < 2 || u.len() != b.len() {
                    return Err(Error::InvalidKernel("table needs at least two rows".into()));
                }
                if u.iter().any(|x| !x.is_finite() || *x < -1.0 || *x > 1.0) {
                    return Err(Error::InvalidKernel("table u values must lie in [-1, 1]".into()));
                }
                if u.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidKernel("table u values must be strictly increasing".into()));
                }
                if b.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(Error::InvalidKernel("table b values must be finite and >= 0".into()));
                }
                cdf.reserve(u.len());
                cdf.push(0.0);
                let mut mass = 0.0;
                let mut first = 0.0;
                for i in 0..u.len() - 1 {
                    let h = u[i + 1] - u[i];
                    mass += 0.5 * h * (b[i] + b[i + 1]);
                    first += h / 6.0 * (u[i] * (2.0 * b[i] + b[i + 1]) + u[i + 1] * (b[i] + 2.0 * b[i + 1]));
                    cdf.push(mass);
                }
                (mass, first, b.iter().cloned().fold(0.0, f64::max))
            }
        };
        let kappa = 2.0 * PI * mass;
        if !kappa.is_finite() || kappa <= 0.0 {
            return Err(Error::InvalidKernel(format!("kappa = {kappa} must be finite and > 0")));
        }
        let mean_cosine = first / mass;
        if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&mean_cosine) {
            return Err(Error::InvalidKernel(format!("mean cosine {mean_cosine} outside [-1, 1]")));
        }
        Ok(AngularKernel { shape, kappa, mean_cosine: mean_cosine.clamp(-1.0, 1.0), sup_b, cdf })
    }

    pub fn shape(&self) -> &KernelShape {
        &self.shape
    }

    /// `2 pi * integral of b over [-1, 1]`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `(2 pi / kappa) * integral of u b(u) over [-1, 1]`.
    pub fn mean_cosine(&self) -> f64 {
        self.mean_cosine
    }

    pub fn sup_b(&self) -> f64 {
        self.sup_b
    }

    pub fn eval(&self, u: f64) -> f64 {
        if !(-1.0..=1.0).contains(&u) {
            return 0.0;
        }
        match &self.shape {
            KernelShape::Constant(v) => *v,
            KernelShape::TruncatedPower { exponent, floor } => floor.max((0.5 * (1.0 + u)).powf(*exponent)),
            KernelShape::Tabulated { u: us, b } => {
                if u < us[0] || u > us[us.len() - 1] {
                    return 0.0;
                }
                let i = segment_of(us, u);
                let t = (u - us[i]) / (us[i + 1] - us[i]);
                b[i] + t * (b[i + 1] - b[i])
            }
        }
    }

    /// Draws a deviation cosine with density `2 pi b(u) / kappa` on `[-1, 1]`.
    pub fn sample_cosine(&self, rng: &mut RngStream) -> f64 {
        match &self.shape {
            KernelShape::Constant(_) => 2.0 * rng.uniform() - 1.0,
            KernelShape::TruncatedPower { .. } => loop {
                let u = 2.0 * rng.uniform() - 1.0;
                if rng.uniform() * self.sup_b <= self.eval(u) {
                    return u;
                }
            },
            KernelShape::Tabulated { u, b } => {
                let total = self.cdf[self.cdf.len() - 1];
                let target = rng.uniform() * total;
                // last knot with cdf <= target, skipping zero-mass segments
                let i = match self.cdf.partition_point(|&c| c <= target) {
                    0 => 0,
                    k => (k - 1).min(u.len() - 2),
                };
                let h = u[i + 1] - u[i];
                let r = target - self.cdf[i];
                let slope = (b[i + 1] - b[i]) / h;
                // solve b_i x + slope x^2 / 2 = r on [0, h]
                let disc = (b[i] * b[i] + 2.0 * slope * r).max(0.0);
                let denom = b[i] + disc.sqrt();
                let x = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
                (u[i] + x.clamp(0.0, h)).clamp(-1.0, 1.0)
            }
        }
    }
}

fn segment_of(us: &[f64], u: f64) -> usize {
    us.partition_point(|&x| x <= u).saturating_sub(1).min(us.len() - 2)
}

// Returns (int b du, int u b du) over [-1, 1] for b(u) = max(f, ((1+u)/2)^p).
fn power_integrals(p: f64, f: f64) -> (f64, f64) {
    // substitute x = (1+u)/2; the floor is active on [0, xs)
    let xs = if f >= 1.0 {
        1.0
    } else if p == 0.0 || f == 0.0 {
        0.0
    } else {
        f.powf(1.0 / p).clamp(0.0, 1.0)
    };
    let mass = 2.0 * (f * xs + (1.0 - xs.powf(p + 1.0)) / (p + 1.0));
    let first =
        2.0 * (f * (xs * xs - xs) + 2.0 * (1.0 - xs.powf(p + 2.0)) / (p + 2.0) - (1.0 - xs.powf(p + 1.0)) / (p + 1.0));
    (mass, first)
}

/// Physical parameters of the model: `gamma`, the reference energy `e0` used
/// by the weighted dynamics, and the angular kernel.
#[derive(Clone, Debug)]
pub struct ModelParams {
    pub gamma: f64,
    pub e0: f64,
    pub kernel: AngularKernel,
}

impl ModelParams {
    pub fn new(gamma: f64, e0: f64, kernel: AngularKernel) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParams(format!("gamma = {gamma} not in [0, 1]")));
        }
        if !(e0.is_finite() && e0 > 0.0) {
            return Err(Error::InvalidParams(format!("e0 = {e0} must be finite and > 0")));
        }
        Ok(ModelParams { gamma, e0, kernel })
    }

    pub fn kappa(&self) -> f64 {
        self.kernel.kappa()
    }

    /// `(1 + e0)(1 + e0^(gamma/2))`, an upper bound on the mean jump rate
    /// (divided by kappa) along the whole trajectory.
    pub fn mean_rate_bound(&self) -> f64 {
        (1.0 + self.e0) * (1.0 + self.e0.powf(0.5 * self.gamma))
    }
}

/// Auxiliary collision variable `z = (sigma, a)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionAux {
    pub sigma: Velocity,
    pub a: f64,
}

impl CollisionAux {
    pub fn new(sigma: Velocity, a: f64) -> Result<Self> {
        if (sigma.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("|sigma| = {} is not 1", sigma.norm())));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidParams(format!("a = {a} not in [0, 1]")));
        }
        Ok(CollisionAux { sigma, a })
    }

    /// Draws `sigma ~ beta_{v,v*} / kappa` and `a ~ U[0, 1]`.
    pub fn sample(v: Velocity, v_star: Velocity, kernel: &AngularKernel, rng: &mut RngStream) -> Self {
        let sigma = sample_sigma(v, v_star, kernel, rng);
        CollisionAux { sigma, a: rng.uniform() }
    }
}

/// Post-collision velocities `(v', v'*)` for the direction `sigma`.
#[inline]
pub fn post_collision(v: Velocity, v_star: Velocity, sigma: Velocity) -> (Velocity, Velocity) {
    let center = (v + v_star) * 0.5;
    let half = sigma * (0.5 * (v - v_star).norm());
    (center + half, center - half)
}

/// Orthonormal pair completing `e` (a unit vector) to a right-handed basis.
#[inline]
fn frame(e: Velocity) -> (Velocity, Velocity) {
    let (ax, ay, az) = (e.x.abs(), e.y.abs(), e.z.abs());
    let axis = if ax <= ay && ax <= az {
        Velocity::new(1.0, 0.0, 0.0)
    } else if ay <= az {
        Velocity::new(0.0, 1.0, 0.0)
    } else {
        Velocity::new(0.0, 0.0, 1.0)
    };
    let e1 = e.cross(axis);
    let e1 = e1 * (1.0 / e1.norm());
    (e1, e.cross(e1))
}

pub fn uniform_sphere(rng: &mut RngStream) -> Velocity {
    let u = 2.0 * rng.uniform() - 1.0;
    let phi = 2.0 * PI * rng.uniform();
    let s = (1.0 - u * u).max(0.0).sqrt();
    Velocity::new(s * phi.cos(), s * phi.sin(), u)
}

/// Samples `sigma` with density `b(<(v - v*)/|v - v*|, sigma>) / kappa` on the
/// unit sphere; uniform when `v` and `v*` coincide.
pub fn sample_sigma(v: Velocity, v_star: Velocity, kernel: &AngularKernel, rng: &mut RngStream) -> Velocity {
    let d = v - v_star;
    let r = d.norm();
    if r < 1e-14 * (1.0 + v.norm() + v_star.norm()) {
        return uniform_sphere(rng);
    }
    let e = d * (1.0 / r);
    let u = kernel.sample_cosine(rng);
    let phi = 2.0 * PI * rng.uniform();
    let s = (1.0 - u * u).max(0.0).sqrt();
    let (e1, e2) = frame(e);
    e * u + (e1 * phi.cos() + e2 * phi.sin()) * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn head_on_collision_rotates_into_sigma() {
        let (a, b) =
            post_collision(Velocity::new(1.0, 0.0, 0.0), Velocity::new(-1.0, 0.0, 0.0), Velocity::new(0.0, 1.0, 0.0));
        assert_eq!(a, Velocity::new(0.0, 1.0, 0.0));
        assert_eq!(b, Velocity::new(0.0, -1.0, 0.0));
    }

    #[test]
    fn equal_velocities_are_a_fixed_point() {
        let v = Velocity::new(0.3, -1.2, 2.0);
        let (a, b) = post_collision(v, v, Velocity::new(0.0, 0.0, 1.0));
        assert_eq!(a, v);
        assert_eq!(b, v);
    }

    #[test]
    fn aligned_sigma_is_identity() {
        let v = Velocity::new(0.5, 2.0, -1.0);
        let w = Velocity::new(-0.25, 0.0, 3.0);
        let d = v - w;
        let (a, b) = post_collision(v, w, d * (1.0 / d.norm()));
        for (x, y) in a.to_array().iter().zip(v.to_array()) {
            assert_relative_eq!(*x, y, epsilon = 1e-14);
        }
        for (x, y) in b.to_array().iter().zip(w.to_array()) {
            assert_relative_eq!(*x, y, epsilon = 1e-14);
        }
    }

    #[test]
    fn kappa_closed_forms() {
        assert_relative_eq!(AngularKernel::constant(1.0).unwrap().kappa(), 4.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(AngularKernel::normalized().kappa(), 1.0, epsilon = 1e-14);
        assert!(matches!(AngularKernel::constant(0.0), Err(Error::InvalidKernel(_))));
        assert!(AngularKernel::tabulated(vec![-1.0, 1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn mean_cosine_closed_forms() {
        assert_eq!(AngularKernel::constant(2.0).unwrap().mean_cosine(), 0.0);
        let lin = AngularKernel::tabulated(vec![-1.0, 1.0], vec![0.0, 2.0]).unwrap();
        assert_relative_eq!(lin.mean_cosine(), 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(lin.kappa(), 4.0 * PI, epsilon = 1e-14);
        // b(u) = 1{u > 0}
        let step_table = AngularKernel::tabulated(vec![-1.0, 0.0, 1e-15, 1.0], vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_relative_eq!(step_table.mean_cosine(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn power_integrals_match_quadrature() {
        for &(p, f) in &[(0.0, 0.0), (1.0, 0.0), (2.5, 0.1), (0.5, 0.7), (3.0, 1.5)] {
            let k = AngularKernel::truncated_power(p, f).unwrap();
            let n = 200_000;
            let h = 2.0 / n as f64;
            let (mut m, mut c) = (0.0, 0.0);
            for i in 0..n {
                let u = -1.0 + (i as f64 + 0.5) * h;
                m += k.eval(u) * h;
                c += u * k.eval(u) * h;
            }
            assert_relative_eq!(k.kappa(), 2.0 * PI * m, max_relative = 1e-6);
            assert_relative_eq!(k.mean_cosine(), c / m, epsilon = 1e-6);
        }
    }

    #[test]
    fn table_rejects_bad_input() {
        assert!(AngularKernel::tabulated(vec![-1.0, -1.0], vec![1.0, 1.0]).is_err());
        assert!(AngularKernel::tabulated(vec![-1.5, 1.0], vec![1.0, 1.0]).is_err());
        assert!(AngularKernel::tabulated(vec![-1.0, 1.0], vec![-1.0, 1.0]).is_err());
        assert!(AngularKernel::tabulated(vec![-1.0], vec![1.0]).is_err());
    }

    #[test]
    fn equal_velocities_give_uniform_sphere() {
        let k = AngularKernel::truncated_power(4.0, 0.0).unwrap();
        let v = Velocity::new(1.0, 1.0, 1.0);
        let mut rng = RngStream::root(5);
        let n = 200_000;
        let mut mean = Velocity::ZERO;
        for _ in 0..n {
            let s = sample_sigma(v, v, &k, &mut rng);
            assert!((s.norm() - 1.0).abs() < 1e-12);
            mean = mean + s;
        }
        mean = mean * (1.0 / n as f64);
        // each component has variance 1/3
        let tol = 5.0 * (1.0 / 3.0 / n as f64).sqrt();
        assert!(mean.norm() < tol * 3f64.sqrt(), "mean {mean:?}");
    }

    #[test]
    fn frame_is_orthonormal() {
        let mut rng = RngStream::root(11);
        for _ in 0..1000 {
            let e = uniform_sphere(&mut rng);
            let (a, b) = frame(e);
            assert!((a.norm() - 1.0).abs() < 1e-12);
            assert!((b.norm() - 1.0).abs() < 1e-12);
            assert!(a.dot(e).abs() < 1e-12 && b.dot(e).abs() < 1e-12 && a.dot(b).abs() < 1e-12);
        }
    }
}
