use wildtree::sampler::{batch_sample, batch_sample_range, counter_bound, DEFAULT_CAP};
use wildtree::stats::{ks_two_sample_weighted, mean_se};
use wildtree::{AngularKernel, Execution, InitialLaw, ModelParams, Velocity, VelocityLaw};

fn gaussian_f0() -> InitialLaw {
    InitialLaw::unit(VelocityLaw::Gaussian { mean: Velocity::ZERO, variance: 1.0 / 3.0 })
}

fn hard_spheres() -> ModelParams {
    ModelParams::new(1.0, 1.0, AngularKernel::normalized()).unwrap()
}

#[test]
fn terminates_well_below_the_cap() {
    let params = hard_spheres();
    let t = 3.0 / (params.kappa() * params.mean_rate_bound());
    let batch = batch_sample(t, 100_000, &gaussian_f0(), &params, 21, DEFAULT_CAP, Execution::Parallel).unwrap();
    assert!((batch.failures as f64) < 1e-3 * 100_000.0, "failures {}", batch.failures);
}

#[test]
fn counter_mean_respects_bound_near_ten() {
    let params = hard_spheres();
    let t = 11f64.ln() / (params.kappa() * params.mean_rate_bound());
    let bound = counter_bound(t, &params, 1.0);
    assert!((bound - 10.0).abs() < 1e-9);
    let batch = batch_sample(t, 100_000, &gaussian_f0(), &params, 22, DEFAULT_CAP, Execution::Parallel).unwrap();
    let ns: Vec<f64> = batch.records.iter().map(|r| r.n as f64).collect();
    let (mean, se) = mean_se(&ns);
    assert!(mean <= bound + 4.0 * se, "mean {mean} bound {bound}");
}

#[test]
fn unweighted_energy_does_not_grow() {
    let params = hard_spheres();
    let f0 = gaussian_f0();
    let t = 1.0 / (params.kappa() * params.mean_rate_bound());
    let batch = batch_sample(t, 50_000, &f0, &params, 23, DEFAULT_CAP, Execution::Parallel).unwrap();
    let es: Vec<f64> = batch.records.iter().map(|r| r.v.norm_sq()).collect();
    let (mean, se) = mean_se(&es);
    assert!(mean <= f0.energy() + 3.0 * se, "mean {mean} vs {}", f0.energy());
}

#[test]
fn disjoint_seed_ranges_have_the_same_law() {
    let params = hard_spheres();
    let f0 = gaussian_f0();
    let t = 0.5 / (params.kappa() * params.mean_rate_bound());
    let a = batch_sample_range(t, 0, 50_000, &f0, &params, 24, DEFAULT_CAP, Execution::Parallel).unwrap();
    let b = batch_sample_range(t, 50_000, 50_000, &f0, &params, 24, DEFAULT_CAP, Execution::Parallel).unwrap();
    let ra: Vec<(f64, f64)> = a.records.iter().map(|r| (r.v.norm(), r.m)).collect();
    let rb: Vec<(f64, f64)> = b.records.iter().map(|r| (r.v.norm(), r.m)).collect();
    let ks = ks_two_sample_weighted(&ra, &rb);
    assert!(ks.p_value > 1e-3, "KS p = {}", ks.p_value);
    let na: Vec<(f64, f64)> = a.records.iter().map(|r| (r.n as f64, 1.0)).collect();
    let nb: Vec<(f64, f64)> = b.records.iter().map(|r| (r.n as f64, 1.0)).collect();
    assert!(ks_two_sample_weighted(&na, &nb).p_value > 1e-3);
}

#[test]
fn records_are_identical_across_execution_policies() {
    let params = ModelParams::new(0.5, 1.0, AngularKernel::truncated_power(2.0, 0.1).unwrap()).unwrap();
    let f0 = gaussian_f0();
    let a = batch_sample(0.2, 2_000, &f0, &params, 25, DEFAULT_CAP, Execution::Sequential).unwrap();
    let b = batch_sample(0.2, 2_000, &f0, &params, 25, DEFAULT_CAP, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}
