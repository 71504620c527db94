//! Runs configured experiments and writes their artifacts plus a manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::checks::{self, CheckOutcome, CheckScale};
use super::config::RunConfig;
use super::io;
use super::report::{estimate_weighted_moment, MomentReport};
use crate::dsmc::{self, OracleReport};
use crate::error::Result;
use crate::exec::Execution;
use crate::maxwell;
use crate::rng::{derive_id, RngStream};
use crate::sampler::{self, replicate_seed, SampleRecord};
use crate::series;
use crate::velocity::Velocity;

pub const SCHEMA_VERSION: u32 = 1;

// Sub-seed tags so that different commands never share streams.
const TAG_MAXWELL: u64 = 1;
const TAG_WILD: u64 = 2;
const TAG_SERIES: u64 = 3;
const TAG_DSMC: u64 = 4;
const TAG_COMPARE: u64 = 5;
const TAG_CHECK: u64 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Sample,
    Maxwell,
    Wild,
    Series,
    Dsmc,
    Compare,
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Maxwell => "maxwell",
            Command::Wild => "wild",
            Command::Series => "series",
            Command::Dsmc => "dsmc",
            Command::Compare => "compare",
            Command::Check => "check",
        }
    }
}

#[derive(Serialize)]
struct SampleSummary {
    t: f64,
    n_rep: usize,
    records: usize,
    failures: usize,
    cap: u64,
    mean_n: f64,
    counter_bound: f64,
}

#[derive(Serialize)]
struct Summary {
    e0: f64,
    f0_energy: f64,
    e0_mismatch: bool,
    kappa: f64,
    mean_rate_bound: f64,
    sample: Vec<SampleSummary>,
}

#[derive(Serialize)]
struct MomentsAtTime {
    t: f64,
    mass: MomentReport,
    energy: MomentReport,
}

#[derive(Serialize)]
struct CompareAtTime {
    t: f64,
    report: OracleReport,
}

#[derive(Serialize)]
struct Manifest {
    schema_version: u32,
    tool: &'static str,
    tool_version: &'static str,
    config_sha256: String,
    config: String,
    base_seed: u64,
    commands: Vec<&'static str>,
    files: BTreeMap<String, String>,
}

/// Paths and outcomes of one `run_experiment` call.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub manifest_sha256: String,
    pub checks: Vec<CheckOutcome>,
}

impl RunOutput {
    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }
}

fn suffix(i: usize, n: usize) -> String {
    if n == 1 {
        String::new()
    } else {
        format!("_t{i}")
    }
}

/// Executes `commands` (in canonical order, deduplicated) for `config` and
/// writes everything under `config.out`. Wall-clock times go to
/// `timing.json`, which is left out of the manifest so that reruns are
/// byte-identical.
pub fn run_experiment(config: &RunConfig, commands: &[Command]) -> Result<RunOutput> {
    config.validate()?;
    let mut cmds = commands.to_vec();
    cmds.sort();
    cmds.dedup();
    #[cfg(feature = "parallel")]
    if config.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| crate::error::Error::Config(format!("threads: {e}")))?;
        return pool.install(|| run_inner(config, &cmds));
    }
    run_inner(config, &cmds)
}

fn run_inner(config: &RunConfig, cmds: &[Command]) -> Result<RunOutput> {
    let exec = Execution::default();
    let params = config.params()?;
    let f0 = config.initial_law();
    let kappa = params.kappa();
    std::fs::create_dir_all(&config.out)?;
    let mut w = Writer { dir: &config.out, files: Vec::new() };
    let mut timing: BTreeMap<String, f64> = BTreeMap::new();
    let mut out = RunOutput::default();

    if config.e0_mismatch() {
        eprintln!(
            "warning: e0 = {} differs from the energy of f0 ({}); the rate bound uses e0",
            config.resolved_e0(),
            f0.energy()
        );
    }

    let nt = config.t.len();
    let base = config.base_seed;
    let mut sampled: Vec<Vec<SampleRecord>> = Vec::new();
    let mut oracles: Vec<Vec<Velocity>> = Vec::new();

    let need_sample = cmds.contains(&Command::Sample) || cmds.contains(&Command::Compare);
    if need_sample {
        let clock = Instant::now();
        let mut summaries = Vec::new();
        let mut moments = Vec::new();
        for &t in &config.t {
            let batch = sampler::batch_sample(t, config.n_rep, &f0, &params, base, config.cap, exec)?;
            let mean_n = if batch.records.is_empty() {
                0.0
            } else {
                batch.records.iter().map(|r| r.n as f64).sum::<f64>() / batch.records.len() as f64
            };
            summaries.push(SampleSummary {
                t,
                n_rep: config.n_rep,
                records: batch.records.len(),
                failures: batch.failures,
                cap: config.cap,
                mean_n,
                counter_bound: sampler::counter_bound(t, &params, config.resolved_e0()),
            });
            if cmds.contains(&Command::Sample) {
                match (
                    estimate_weighted_moment(&batch.records, 0.0, config.blocks),
                    estimate_weighted_moment(&batch.records, 2.0, config.blocks),
                ) {
                    (Ok(mass), Ok(energy)) => moments.push(MomentsAtTime { t, mass, energy }),
                    (Err(e), _) | (_, Err(e)) => eprintln!("warning: moments at t = {t} skipped: {e}"),
                }
            }
            sampled.push(batch.records);
        }
        if cmds.contains(&Command::Sample) {
            let all: Vec<SampleRecord> = sampled.iter().flatten().cloned().collect();
            io::write_records(&w.path("records.jsonl"), &all)?;
            io::write_json(&w.path("moments.json"), &moments)?;
            let summary = Summary {
                e0: config.resolved_e0(),
                f0_energy: f0.energy(),
                e0_mismatch: config.e0_mismatch(),
                kappa,
                mean_rate_bound: params.mean_rate_bound(),
                sample: summaries,
            };
            io::write_json(&w.path("summary.json"), &summary)?;
        }
        timing.insert("sample".into(), clock.elapsed().as_secs_f64());
    }

    if cmds.contains(&Command::Maxwell) {
        let clock = Instant::now();
        let seed = derive_id(base, TAG_MAXWELL);
        let mut all = Vec::new();
        for &t in &config.t {
            let recs = exec.map(config.n_rep, |i| {
                let s = replicate_seed(seed, i as u64);
                maxwell::velocity_sample(t, &f0.velocity, &params.kernel, RngStream::root(s), config.cap)
                    .map(|m| SampleRecord { seed: s, t, m: 1.0, v: m.v, n: m.n, tree: m.tree.code().to_string() })
            });
            for r in recs {
                match r {
                    Ok(r) => all.push(r),
                    Err(crate::error::Error::CapExceeded { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        io::write_records(&w.path("maxwell_records.jsonl"), &all)?;
        timing.insert("maxwell".into(), clock.elapsed().as_secs_f64());
    }

    if cmds.contains(&Command::Wild) {
        let clock = Instant::now();
        let seed = derive_id(base, TAG_WILD);
        let mut all = Vec::new();
        for &t in &config.t {
            let recs = exec.map(config.n_rep, |i| {
                let s = replicate_seed(seed, i as u64);
                let (v, tree) = maxwell::wild_mixture_sample(t, &f0.velocity, &params.kernel, &mut RngStream::root(s));
                SampleRecord { seed: s, t, m: 1.0, v, n: tree.internal_count() as u64, tree: tree.code().to_string() }
            });
            all.extend(recs);
        }
        io::write_records(&w.path("wild_records.jsonl"), &all)?;
        timing.insert("wild".into(), clock.elapsed().as_secs_f64());
    }

    if cmds.contains(&Command::Series) {
        let clock = Instant::now();
        let budget = config.budget();
        for (i, &t) in config.t.iter().enumerate() {
            let rows = series::series_mass_table(
                t,
                config.series_k,
                &f0,
                &params,
                &budget,
                config.series_repeats,
                derive_id(derive_id(base, TAG_SERIES), i as u64),
                exec,
            )?;
            io::write_tree_table(&w.path(&format!("series_trees{}.csv", suffix(i, nt))), &rows)?;
        }
        timing.insert("series".into(), clock.elapsed().as_secs_f64());
    }

    let need_dsmc = cmds.contains(&Command::Dsmc) || cmds.contains(&Command::Compare);
    if need_dsmc {
        let clock = Instant::now();
        for (i, &t) in config.t.iter().enumerate() {
            let stream = RngStream::root(derive_id(derive_id(base, TAG_DSMC), i as u64));
            let vs = dsmc::run_dsmc(config.dsmc_n, t, config.dsmc_dt, &f0.velocity, &params, stream, exec)?;
            io::write_velocities_csv(&w.path(&format!("oracle{}.csv", suffix(i, nt))), &vs)?;
            oracles.push(vs);
        }
        timing.insert("dsmc".into(), clock.elapsed().as_secs_f64());
    }

    if cmds.contains(&Command::Compare) {
        let clock = Instant::now();
        let mut reports = Vec::new();
        for (i, &t) in config.t.iter().enumerate() {
            let report = dsmc::weighted_vs_oracle_report(
                &sampled[i],
                &oracles[i],
                config.n_proj,
                config.thresholds,
                derive_id(derive_id(base, TAG_COMPARE), i as u64),
            )?;
            reports.push(CompareAtTime { t, report });
        }
        io::write_json(&w.path("compare_report.json"), &reports)?;
        timing.insert("compare".into(), clock.elapsed().as_secs_f64());
    }

    if cmds.contains(&Command::Check) {
        let clock = Instant::now();
        let scale = CheckScale::full();
        let outcomes = checks::run_all(&scale, derive_id(base, TAG_CHECK), exec);
        io::write_json(&w.path("check_report.json"), &outcomes)?;
        out.checks = outcomes;
        timing.insert("check".into(), clock.elapsed().as_secs_f64());
    }

    let mut files = BTreeMap::new();
    for f in &w.files {
        let name = f.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        files.insert(name, io::sha256_file(f)?);
    }
    let canonical = config.canonical();
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME"),
        tool_version: env!("CARGO_PKG_VERSION"),
        config_sha256: io::sha256_hex(canonical.as_bytes()),
        config: canonical,
        base_seed: base,
        commands: cmds.iter().map(|c| c.name()).collect(),
        files,
    };
    let manifest_path = config.out.join("manifest.json");
    io::write_json(&manifest_path, &manifest)?;
    io::write_json(&config.out.join("timing.json"), &timing)?;
    out.manifest_sha256 = io::sha256_file(&manifest_path)?;
    out.manifest = manifest_path;
    out.files = w.files;
    Ok(out)
}
