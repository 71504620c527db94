use std::f64::consts::PI;

use wildtree::collision::{post_collision, sample_sigma, uniform_sphere};
use wildtree::stats::ks_one_sample;
use wildtree::{AngularKernel, RngStream, Velocity};

// Kernels written out independently of the library, with their CDF in the
// deviation cosine obtained by fine Simpson quadrature.
fn power_b(u: f64) -> f64 {
    (((1.0 + u) / 2.0).powf(3.0)).max(0.01)
}

const TABLE_U: [f64; 4] = [-1.0, -0.5, 0.2, 1.0];
const TABLE_B: [f64; 4] = [0.1, 0.3, 2.0, 0.5];

fn table_b(u: f64) -> f64 {
    for i in 0..3 {
        if u <= TABLE_U[i + 1] {
            let s = (u - TABLE_U[i]) / (TABLE_U[i + 1] - TABLE_U[i]);
            return TABLE_B[i] + s * (TABLE_B[i + 1] - TABLE_B[i]);
        }
    }
    TABLE_B[3]
}

fn cdf_table(b: impl Fn(f64) -> f64) -> Vec<f64> {
    // cumulative integral on a grid of 2 * 4096 panels
    let n = 8192;
    let h = 2.0 / n as f64;
    let mut cum = vec![0.0; n + 1];
    for i in 0..n {
        let a = -1.0 + i as f64 * h;
        cum[i + 1] = cum[i] + h / 6.0 * (b(a) + 4.0 * b(a + h / 2.0) + b(a + h));
    }
    let total = cum[n];
    cum.iter().map(|c| c / total).collect()
}

fn cdf_at(table: &[f64], u: f64) -> f64 {
    let n = table.len() - 1;
    let x = ((u + 1.0) / 2.0 * n as f64).clamp(0.0, n as f64);
    let i = (x.floor() as usize).min(n - 1);
    let s = x - i as f64;
    table[i] + s * (table[i + 1] - table[i])
}

fn cosines(kernel: &AngularKernel, seed: u64, n: usize) -> Vec<f64> {
    let mut rng = RngStream::root(seed);
    let v = Velocity::new(0.4, -1.0, 2.0);
    let w = Velocity::new(-1.1, 0.2, 0.7);
    let e = v - w;
    let e = e * (1.0 / e.norm());
    (0..n).map(|_| sample_sigma(v, w, kernel, &mut rng).dot(e)).collect()
}

#[test]
fn cosine_law_matches_each_kernel() {
    let cases: Vec<(&str, AngularKernel, Vec<f64>)> = vec![
        ("constant", AngularKernel::normalized(), cdf_table(|_| 1.0)),
        ("power", AngularKernel::truncated_power(3.0, 0.01).unwrap(), cdf_table(power_b)),
        ("table", AngularKernel::tabulated(TABLE_U.to_vec(), TABLE_B.to_vec()).unwrap(), cdf_table(table_b)),
    ];
    for (i, (name, kernel, table)) in cases.iter().enumerate() {
        let xs = cosines(kernel, 100 + i as u64, 100_000);
        let ks = ks_one_sample(&xs, |u| cdf_at(table, u));
        assert!(ks.p_value > 1e-3, "{name}: KS p = {}", ks.p_value);
    }
}

#[test]
fn kappa_and_mean_cosine_against_quadrature() {
    let k = AngularKernel::truncated_power(3.0, 0.01).unwrap();
    let n = 20_000;
    let h = 2.0 / n as f64;
    let (mut mass, mut first) = (0.0, 0.0);
    for i in 0..n {
        let u = -1.0 + (i as f64 + 0.5) * h;
        mass += power_b(u) * h;
        first += u * power_b(u) * h;
    }
    assert!((k.kappa() - 2.0 * PI * mass).abs() < 1e-6);
    assert!((k.mean_cosine() - first / mass).abs() < 1e-6);
}

#[test]
fn momentum_and_energy_over_a_million_triples() {
    let mut rng = RngStream::root(7);
    for _ in 0..1_000_000 {
        let scale = 10f64.powf(4.0 * rng.uniform() - 2.0);
        let v = uniform_sphere(&mut rng) * (scale * rng.uniform());
        let w = uniform_sphere(&mut rng) * (scale * rng.uniform());
        let sigma = uniform_sphere(&mut rng);
        let (a, b) = post_collision(v, w, sigma);
        let dp = ((a + b) - (v + w)).norm();
        let de = (a.norm_sq() + b.norm_sq() - v.norm_sq() - w.norm_sq()).abs();
        assert!(dp <= 1e-12 * (1.0 + v.norm() + w.norm()));
        assert!(de <= 1e-10 * (1.0 + v.norm_sq() + w.norm_sq()));
    }
}
