//! The acceptance checks, shared by `wildtree check --preset paper-checks`
//! and the `acceptance` integration test.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use super::config::{EnergySpec, KernelSpec, RunConfig};
use super::experiment::{run_experiment, Command};
use super::report::estimate_weighted_moment;
use crate::collision::{post_collision, sample_sigma, uniform_sphere, AngularKernel, ModelParams};
use crate::dsmc::{self, OracleThresholds};
use crate::dynamics::lambda_rate;
use crate::exec::Execution;
use crate::law::{InitialLaw, VelocityLaw};
use crate::maxwell;
use crate::rng::{derive_id, RngStream};
use crate::sampler::{self, SampleRecord, DEFAULT_CAP};
use crate::series::{self, SeriesBudget};
use crate::stats;
use crate::tree::{enumerate_trees, OrderedTree};
use crate::velocity::Velocity;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(id: u32, name: &str, passed: bool, detail: String) -> Self {
        CheckOutcome { id, name: name.to_string(), passed, detail }
    }

    pub fn line(&self) -> String {
        format!("[{}] check {:>2} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

/// Sample sizes used by the checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckScale {
    pub triples: usize,
    pub sigma_draws: usize,
    pub replicates: usize,
    pub dsmc_particles: usize,
    pub series_repeats: usize,
}

impl CheckScale {
    pub fn full() -> Self {
        CheckScale {
            triples: 1_000_000,
            sigma_draws: 1_000_000,
            replicates: 100_000,
            dsmc_particles: 100_000,
            series_repeats: 8,
        }
    }
}

const CHUNK: usize = 10_000;

fn chunked<T: Send>(n: usize, seed: u64, exec: Execution, f: impl Fn(usize, &mut RngStream) -> T + Sync) -> Vec<T> {
    let root = RngStream::root(seed);
    exec.map(n.div_ceil(CHUNK), |c| {
        let mut r = root.derive(c as u64);
        let len = CHUNK.min(n - c * CHUNK);
        f(len, &mut r)
    })
}

fn gaussian(mean: Velocity, variance: f64) -> VelocityLaw {
    VelocityLaw::Gaussian { mean, variance }
}

fn hard_spheres(e0: f64) -> ModelParams {
    ModelParams::new(1.0, e0, AngularKernel::normalized()).expect("valid")
}

fn time_for_load(params: &ModelParams, load: f64) -> f64 {
    load / (params.kappa() * params.mean_rate_bound())
}

/// Momentum and energy are conserved by the post-collision map to round-off
/// over random triples of widely varying magnitude; runs in under 5 s.
pub fn collision_conservation(scale: &CheckScale, seed: u64, exec: Execution) -> CheckOutcome {
    let clock = Instant::now();
    let worst = chunked(scale.triples, seed, exec, |len, r| {
        let (mut dp, mut de) = (0.0f64, 0.0f64);
        for _ in 0..len {
            let sv = 10f64.powf(4.0 * r.uniform() - 2.0);
            let sw = 10f64.powf(4.0 * r.uniform() - 2.0);
            let v = gaussian(Velocity::ZERO, 1.0).sample(r) * sv;
            let w = gaussian(Velocity::ZERO, 1.0).sample(r) * sw;
            let sigma = uniform_sphere(r);
            let (a, b) = post_collision(v, w, sigma);
            let p_scale = 1.0 + v.norm() + w.norm();
            let e_scale = 1.0 + v.norm_sq() + w.norm_sq();
            dp = dp.max(((a + b) - (v + w)).norm() / p_scale);
            de = de.max((a.norm_sq() + b.norm_sq() - v.norm_sq() - w.norm_sq()).abs() / e_scale);
        }
        (dp, de)
    });
    let dp = worst.iter().map(|x| x.0).fold(0.0, f64::max);
    let de = worst.iter().map(|x| x.1).fold(0.0, f64::max);
    let secs = clock.elapsed().as_secs_f64();
    let passed = dp <= 1e-10 && de <= 1e-10 && secs < 5.0;
    CheckOutcome::new(
        1,
        "collision conservation",
        passed,
        format!("{} triples, max rel momentum err {dp:.2e}, max rel energy err {de:.2e}", scale.triples),
    )
}

fn check_kernels() -> Vec<(&'static str, AngularKernel)> {
    vec![
        ("uniform", AngularKernel::normalized()),
        ("power(3,0.01)", AngularKernel::truncated_power(3.0, 0.01).expect("valid")),
        ("table", AngularKernel::tabulated(vec![-1.0, -0.5, 0.2, 1.0], vec![0.1, 0.3, 2.0, 0.5]).expect("valid")),
    ]
}

/// `E|v'|^2 = (1+c)/2 |v|^2 + (1-c)/2 |v*|^2` for each kernel and several
/// velocity pairs, within four standard errors.
pub fn sigma_moment_identity(scale: &CheckScale, seed: u64, exec: Execution) -> CheckOutcome {
    let pairs = [
        (Velocity::new(1.0, 0.0, 0.0), Velocity::new(-1.0, 0.0, 0.0)),
        (Velocity::new(0.3, -1.2, 2.0), Velocity::new(0.0, 0.5, -0.1)),
        (Velocity::new(5.0, 1.0, 0.0), Velocity::new(4.5, 1.2, 0.3)),
        (Velocity::new(0.0, 0.0, 2.0), Velocity::ZERO),
        (Velocity::new(-0.7, 0.7, 0.1), Velocity::new(1.5, -2.5, 0.4)),
    ];
    let mut worst = 0.0f64;
    let mut k = 0u64;
    for (_, kernel) in check_kernels() {
        let c = kernel.mean_cosine();
        for &(v, w) in &pairs {
            let target = 0.5 * (1.0 + c) * v.norm_sq() + 0.5 * (1.0 - c) * w.norm_sq();
            let sums = chunked(scale.sigma_draws, derive_id(seed, k), exec, |len, r| {
                let (mut s, mut s2) = (0.0, 0.0);
                for _ in 0..len {
                    let sigma = sample_sigma(v, w, &kernel, r);
                    let e = post_collision(v, w, sigma).0.norm_sq();
                    s += e;
                    s2 += e * e;
                }
                (s, s2)
            });
            k += 1;
            let n = scale.sigma_draws as f64;
            let s: f64 = sums.iter().map(|x| x.0).sum();
            let s2: f64 = sums.iter().map(|x| x.1).sum();
            let mean = s / n;
            let se = ((s2 / n - mean * mean).max(0.0) / n).sqrt();
            let z =
                if se > 0.0 { (mean - target).abs() / se } else { (mean - target).abs() / (1e-12 * (1.0 + target)) };
            worst = worst.max(z);
        }
    }
    CheckOutcome::new(
        2,
        "post-collision energy moment",
        worst <= 4.0,
        format!("3 kernels x 5 pairs x {} draws, worst |z| = {worst:.2}", scale.sigma_draws),
    )
}

/// Mass and energy of the weighted process are conserved in expectation for
/// `gamma` in {0, 0.5, 1}: median-of-means within 3 half-widths.
pub fn weighted_moments(scale: &CheckScale, seed: u64, exec: Execution) -> CheckOutcome {
    let clock = Instant::now();
    let f0 = InitialLaw::unit(gaussian(Velocity::new(0.5, 0.0, 0.0), 0.25));
    let e0 = f0.energy();
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut tails = Vec::new();
    for (i, gamma) in [0.0, 0.5, 1.0].into_iter().enumerate() {
        let params = ModelParams::new(gamma, e0, AngularKernel::normalized()).expect("valid");
        let t = time_for_load(&params, 0.5);
        let batch = match sampler::batch_sample(
            t,
            scale.replicates,
            &f0,
            &params,
            derive_id(seed, i as u64),
            DEFAULT_CAP,
            exec,
        ) {
            Ok(b) => b,
            Err(e) => return CheckOutcome::new(3, "weighted moment conservation", false, e.to_string()),
        };
        ok &= batch.failures == 0;
        match (estimate_weighted_moment(&batch.records, 0.0, 32), estimate_weighted_moment(&batch.records, 2.0, 32)) {
            (Ok(m), Ok(e)) => {
                worst = worst.max(m.deviation(1.0)).max(e.deviation(e0));
                tails.push(m.weight_tail_index.map_or("n/a".to_string(), |a| format!("{a:.2}")));
            }
            (Err(e), _) | (_, Err(e)) => {
                return CheckOutcome::new(3, "weighted moment conservation", false, e.to_string())
            }
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    CheckOutcome::new(
        3,
        "weighted moment conservation",
        ok && worst <= 3.0 && secs <= 600.0,
        format!(
            "gamma 0/0.5/1 at kappa*Lambda*t = 0.5, {} reps, worst deviation {worst:.2} half-widths, weight tail index {}",
            scale.replicates,
            tails.join("/")
        ),
    )
}

// E[exp(-kappa Lambda(V) t)] for a centered Gaussian with per-component
// variance s, by Simpson's rule on the speed density.
fn gaussian_no_jump_probability(s: f64, params: &ModelParams, t: f64) -> f64 {
    let kappa = params.kappa();
    let rmax = 14.0 * s.sqrt();
    let n = 20_000;
    let h = rmax / n as f64;
    let f = |r: f64| {
        let dens = 4.0 * PI * r * r * (2.0 * PI * s).powf(-1.5) * (-r * r / (2.0 * s)).exp();
        dens * (-kappa * lambda_rate(Velocity::new(r, 0.0, 0.0), params) * t).exp()
    };
    let mut acc = f(0.0) + f(rmax);
    for i in 1..n {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// The mean counter stays below its exponential bound, and `P(N_t = 0)`
/// matches `E[exp(-kappa Lambda(V_0) t)]`.
pub fn counter_checks(scale: &CheckScale, seed: u64, exec: Execution) -> CheckOutcome {
    let var = 1.0 / 3.0;
    let f0 = InitialLaw::unit(gaussian(Velocity::ZERO, var));
    let params = hard_spheres(f0.energy());
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, load) in [0.25, 0.5, 1.0].into_iter().enumerate() {
        let t = time_for_load(&params, load);
        let batch = match sampler::batch_sample(
            t,
            scale.replicates,
            &f0,
            &params,
            derive_id(seed, i as u64),
            DEFAULT_CAP,
            exec,
        ) {
            Ok(b) => b,
            Err(e) => return CheckOutcome::new(4, "counter bound and no-jump probability", false, e.to_string()),
        };
        let ns: Vec<f64> = batch.records.iter().map(|r| r.n as f64).collect();
        let (mean, se) = stats::mean_se(&ns);
        let bound = sampler::counter_bound(t, &params, f0.energy());
        ok &= batch.failures == 0 && mean <= bound + 4.0 * se;
        parts.push(format!("E[N]={mean:.3}<={bound:.3}"));
        if i == 1 {
            let zero = ns.iter().filter(|&&n| n == 0.0).count() as f64 / ns.len() as f64;
            let exact = gaussian_no_jump_probability(var, &params, t);
            let z = (zero - exact).abs() / (exact * (1.0 - exact) / ns.len() as f64).sqrt();
            ok &= z <= 4.0;
            parts.push(format!("gaussian P(N=0) {zero:.4} vs {exact:.4} (|z|={z:.2})"));
        }
    }
    let v0 = Velocity::new(1.0, 0.0, 0.0);
    let dirac = InitialLaw::unit(VelocityLaw::Dirac(v0));
    let params = hard_spheres(1.0);
    let t = time_for_load(&params, 0.5);
    match sampler::batch_sample(t, scale.replicates, &dirac, &params, derive_id(seed, 99), DEFAULT_CAP, exec) {
        Ok(batch) => {
            let n = batch.records.len() as f64;
            let zero = batch.records.iter().filter(|r| r.n == 0).count() as f64 / n;
            let exact = (-params.kappa() * lambda_rate(v0, &params) * t).exp();
            let z = (zero - exact).abs() / (exact * (1.0 - exact) / n).sqrt();
            ok &= z <= 4.0;
            parts.push(format!("dirac P(N=0) {zero:.4} vs {exact:.4} (|z|={z:.2})"));
        }
        Err(e) => return CheckOutcome::new(4, "counter bound and no-jump probability", false, e.to_string()),
    }
    CheckOutcome::new(4, "counter bound and no-jump probability", ok, parts.join(", "))
}

fn radial(records: &[SampleRecord]) -> Vec<(f64, f64)> {
    records.iter().map(|r| (r.v.norm(), r.m)).collect()
}

/// For Maxwellian molecules, the weighted sampler, the unweighted recursive
/// sampler and the Wild sum agree: pairwise radial KS and radial moments.
pub fn maxwell_triangle(scale: &CheckScale, seed: u64, exec: Execution) -> CheckOutcome {
    let law = VelocityLaw::Shell { radius: 1.0 };
    let f0 = InitialLaw::unit(law.clone());
    let kernel = AngularKernel::normalized();
    let params = ModelParams::new(0.0, 1.0, kernel.clone()).expect("valid");
    let t = time_for_load(&params, 1.0);
    let weighted = match sampler::batch_sample(t, scale.replicates, &f0, &params, derive_id(seed, 0), DEFAULT_CAP, exec)
    {
        Ok(b) => radial(&b.records),
        Err(e) => return CheckOutcome::new(5, "Maxwellian sampler triangle", false, e.to_string()),
    };
    let root1 = derive_id(seed, 1);
    let recursive: Vec<(f64, f64)> = exec
        .map(scale.replicates, |i| {
            maxwell::velocity_sample(
                t,
                &law,
                &kernel,
                RngStream::root(sampler::replicate_seed(root1, i as u64)),
                DEFAULT_CAP,
            )
            .map(|s| (s.v.norm(), 1.0))
        })
        .into_iter()
        .filter_map(|r| r.ok())
        .collect();
    let root2 = derive_id(seed, 2);
    let wild: Vec<(f64, f64)> = exec.map(scale.replicates, |i| {
        let mut r = RngStream::root(sampler::replicate_seed(root2, i as u64));
        (maxwell::wild_mixture_sample(t, &law, &kernel, &mut r).0.norm(), 1.0)
    });
    let samples = [("weighted", &weighted), ("recursive", &recursive), ("wild", &wild)];
    let mut ok = recursive.len() == scale.replicates;
    let mut min_p = 1.0f64;
    let mut worst_z = 0.0f64;
    for a in 0..3 {
        for b in a + 1..3 {
            let ks = stats::ks_two_sample_weighted(samples[a].1, samples[b].1);
            min_p = min_p.min(ks.p_value);
            ok &= ks.p_value > 1e-3;
            for p in [1, 2] {
                let ma: Vec<(f64, f64)> = samples[a].1.iter().map(|&(r, w)| (r.powi(p), w)).collect();
                let mb: Vec<(f64, f64)> = samples[b].1.iter().map(|&(r, w)| (r.powi(p), w)).collect();
                let (xa, sa) = stats::self_normalized_mean(&ma);
                let (xb, sb) = stats::self_normalized_mean(&mb);
                let z = (xa - xb).abs() / sa.hypot(sb);
                worst_z = worst_z.max(z);
                ok &= z <= 3.0;
            }
        }
    }
    CheckOutcome::new(
        5,
        "Maxwellian sampler triangle",
        ok,
        format!("shell f0, kappa*t = {t}, min KS p = {min_p:.3e}, worst moment |z| = {worst_z:.2}"),
    )
}

/// `sum_{n<=N} w_n = 1 - (1 - e^{-kappa t})^N` to 1e-14 for `N <= 200`.
pub fn wild_truncation() -> CheckOutcome {
    let mut worst = 0.0f64;
    for kt in [1e-3f64, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
        for kappa in [1.0f64, 0.3, 4.0] {
            let t = kt / kappa;
            let q = -(-kappa * t).exp_m1();
            for order in 1..=200u64 {
                let lhs = maxwell::wild_partial_sum(order, t, kappa);
                let rhs = 1.0 - q.powi(order as i32);
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    CheckOutcome::new(6, "Wild weight truncation identity", worst <= 1e-14, format!("max abs error {worst:.2e}"))
}

/// Series masses are nonnegative with nondecreasing partial sums bounded by
/// one, match sampler tree frequencies, and the two-leaf Dirac term matches
/// its closed form.
pub fn series_consistency(scale: &CheckScale, seed: u64, exec: Execution) -> CheckOutcome {
    let v0 = Velocity::new(1.0, 0.0, 0.0);
    let cases = [
        ("dirac", InitialLaw::unit(VelocityLaw::Dirac(v0))),
        ("gaussian", InitialLaw::unit(gaussian(Velocity::ZERO, 1.0 / 3.0))),
    ];
    let budget = SeriesBudget::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (ci, (name, f0)) in cases.iter().enumerate() {
        let params = hard_spheres(f0.energy());
        let t = time_for_load(&params, 0.5);
        let rows = match series::series_mass_table(
            t,
            7,
            f0,
            &params,
            &budget,
            scale.series_repeats,
            derive_id(seed, ci as u64),
            exec,
        ) {
            Ok(r) => r,
            Err(e) => return CheckOutcome::new(7, "series consistency", false, e.to_string()),
        };
        ok &= rows.iter().all(|r| r.mass >= 0.0);
        let mut prev = 0.0;
        for k in [1, 3, 5, 7] {
            let rows_k: Vec<_> = rows.iter().filter(|r| r.tree.node_count() <= k).collect();
            let mass: f64 = rows_k.iter().map(|r| r.mass).sum();
            let se = rows_k.iter().map(|r| r.stderr * r.stderr).sum::<f64>().sqrt();
            ok &= mass >= prev && mass <= 1.0 + 4.0 * se;
            prev = mass;
        }
        let check = match series::tree_probability_check(
            t,
            7,
            f0,
            &params,
            scale.replicates,
            &budget,
            scale.series_repeats,
            derive_id(seed, 10 + ci as u64),
            exec,
        ) {
            Ok(c) => c,
            Err(e) => return CheckOutcome::new(7, "series consistency", false, e.to_string()),
        };
        let flagged = check.iter().filter(|r| r.flagged).count();
        ok &= flagged == 0;
        parts.push(format!("{name}: partial mass {prev:.4}, {flagged}/{} trees flagged", check.len()));
    }

    let f0 = &cases[0].1;
    let params = hard_spheres(1.0);
    let t = time_for_load(&params, 0.5);
    let lam = params.kappa() * lambda_rate(v0, &params);
    let fine = SeriesBudget { n_particles: 256, n_time: 256, floor: 64 };
    let two = OrderedTree::from_code("100").expect("valid");
    match series::j_measure(&two, t, f0, &params, &fine, RngStream::root(derive_id(seed, 20)), exec) {
        Ok(j) => {
            let j_exact = 0.5 * (-(-2.0 * lam * t).exp_m1());
            let g_exact = (-lam * t).exp() * (-(-lam * t).exp_m1());
            let g = series::gamma_damp(&j, t, &params).total_mass();
            let ej = (j.total_mass() / j_exact - 1.0).abs();
            let eg = (g / g_exact - 1.0).abs();
            ok &= ej <= 0.01 && eg <= 0.01;
            parts.push(format!("two-leaf dirac rel err J {ej:.1e}, damped {eg:.1e}"));
        }
        Err(e) => return CheckOutcome::new(7, "series consistency", false, e.to_string()),
    }
    CheckOutcome::new(7, "series consistency", ok, parts.join("; "))
}

/// The weighted sampler agrees with the particle-system oracle for hard
/// spheres at `kappa * Lambda * t` in {0.25, 0.75}.
pub fn oracle_agreement(scale: &CheckScale, seed: u64, exec: Execution) -> CheckOutcome {
    let radius = (5.0f64 / 3.0).sqrt();
    let law = VelocityLaw::UniformBall { radius };
    let f0 = InitialLaw::unit(law.clone());
    let params = hard_spheres(f0.energy());
    let dt = 0.01 / (params.kappa() * 2.0 * radius);
    let thresholds = OracleThresholds::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, load) in [0.25, 0.75].into_iter().enumerate() {
        let t = time_for_load(&params, load);
        let records = match sampler::batch_sample(
            t,
            scale.replicates,
            &f0,
            &params,
            derive_id(seed, i as u64),
            DEFAULT_CAP,
            exec,
        ) {
            Ok(b) => b.records,
            Err(e) => return CheckOutcome::new(8, "oracle agreement", false, e.to_string()),
        };
        let oracle = match dsmc::run_dsmc(
            scale.dsmc_particles,
            t,
            Some(dt),
            &law,
            &params,
            RngStream::root(derive_id(seed, 10 + i as u64)),
            exec,
        ) {
            Ok(v) => v,
            Err(e) => return CheckOutcome::new(8, "oracle agreement", false, e.to_string()),
        };
        match dsmc::weighted_vs_oracle_report(&records, &oracle, 32, thresholds, derive_id(seed, 20 + i as u64)) {
            Ok(rep) => {
                ok &= rep.pass;
                let zs: Vec<String> = rep.moments.iter().map(|m| format!("{} z={:.2}", m.name, m.z)).collect();
                parts.push(format!(
                    "load {load}: KS p={:.3e}, {}, sliced W1={:.4}",
                    rep.radial_ks.p_value,
                    zs.join(", "),
                    rep.sliced_w1
                ));
            }
            Err(e) => return CheckOutcome::new(8, "oracle agreement", false, e.to_string()),
        }
    }
    CheckOutcome::new(8, "oracle agreement", ok, parts.join("; "))
}

fn catalan(n: u64) -> u64 {
    (0..n).fold(1u64, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

// Brute force: every 0/1 string of length 2l - 1 that parses as a tree.
fn brute_force_count(leaves: usize) -> usize {
    let len = 2 * leaves - 1;
    (0u32..1 << len)
        .filter(|bits| {
            let code: String = (0..len).map(|i| if bits >> (len - 1 - i) & 1 == 1 { '1' } else { '0' }).collect();
            OrderedTree::from_code(&code).is_ok()
        })
        .count()
}

/// Tree counts match the Catalan numbers and brute-force enumeration up to
/// six leaves; the code round-trips for every tree with at most nine nodes.
pub fn tree_codec() -> CheckOutcome {
    let mut ok = true;
    let mut counts = Vec::new();
    let all = enumerate_trees(11);
    for l in 1..=6usize {
        let listed = all.iter().filter(|t| t.leaf_count() == l).count();
        let expect = catalan(l as u64 - 1) as usize;
        ok &= listed == expect && brute_force_count(l) == expect;
        counts.push(listed.to_string());
    }
    let small = enumerate_trees(9);
    for t in &small {
        let back = OrderedTree::from_code(t.code());
        ok &= back.ok().as_ref() == Some(t);
        if let Some((l, r)) = t.children() {
            ok &= &OrderedTree::join(&l, &r) == t;
        }
        ok &= t.code().parse::<OrderedTree>().ok().as_ref() == Some(t);
    }
    CheckOutcome::new(
        9,
        "tree enumeration and codec",
        ok,
        format!("counts by leaves {}, {} trees round-tripped", counts.join(","), small.len()),
    )
}

fn scratch_dir(tag: &str) -> PathBuf {
    use std::sync::atomic::{AtomicU64, Ordering};
    static NEXT: AtomicU64 = AtomicU64::new(0);
    let n = NEXT.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!("wildtree-{tag}-{}-{n}", std::process::id()))
}

/// A reduced preset run twice from the same configuration writes
/// byte-identical artifacts, except for the wall-clock file.
pub fn rerun_determinism(seed: u64) -> CheckOutcome {
    let dirs = [scratch_dir("a"), scratch_dir("b")];
    let mut cfg = RunConfig {
        gamma: 1.0,
        e0: EnergySpec::Auto,
        kernel: KernelSpec::Constant(1.0 / (4.0 * PI)),
        f0: gaussian(Velocity::ZERO, 1.0 / 3.0),
        t: vec![0.05, 0.1],
        n_rep: 2_000,
        base_seed: seed,
        series_k: 5,
        series_particles: 256,
        series_time_steps: 16,
        series_repeats: 2,
        dsmc_n: 2_000,
        blocks: 16,
        n_proj: 8,
        ..RunConfig::default()
    };
    let cmds = [Command::Sample, Command::Maxwell, Command::Wild, Command::Series, Command::Dsmc, Command::Compare];
    let mut manifests = Vec::new();
    for d in &dirs {
        cfg.out = d.clone();
        match run_experiment(&cfg, &cmds) {
            Ok(out) => manifests.push(out),
            Err(e) => return CheckOutcome::new(10, "rerun determinism", false, e.to_string()),
        }
    }
    let mut same = manifests[0].manifest_sha256 == manifests[1].manifest_sha256;
    let mut compared = 0;
    for f in &manifests[0].files {
        let name = f.file_name().expect("file");
        let a = std::fs::read(f).ok();
        let b = std::fs::read(dirs[1].join(name)).ok();
        same &= a.is_some() && a == b;
        compared += 1;
    }
    for d in &dirs {
        let _ = std::fs::remove_dir_all(d);
    }
    CheckOutcome::new(
        10,
        "rerun determinism",
        same,
        format!("{compared} artifacts and manifest compared, manifest sha256 {}", &manifests[0].manifest_sha256[..16]),
    )
}

/// Runs every check in order.
pub fn run_all(scale: &CheckScale, seed: u64, exec: Execution) -> Vec<CheckOutcome> {
    vec![
        collision_conservation(scale, derive_id(seed, 1), exec),
        sigma_moment_identity(scale, derive_id(seed, 2), exec),
        weighted_moments(scale, derive_id(seed, 3), exec),
        counter_checks(scale, derive_id(seed, 4), exec),
        maxwell_triangle(scale, derive_id(seed, 5), exec),
        wild_truncation(),
        series_consistency(scale, derive_id(seed, 7), exec),
        oracle_agreement(scale, derive_id(seed, 8), exec),
        tree_codec(),
        rerun_determinism(derive_id(seed, 10)),
    ]
}
