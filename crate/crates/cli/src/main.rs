use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use wildtree::dsmc::weighted_vs_oracle_report;
use wildtree::harness::checks::{self, CheckScale};
use wildtree::harness::{io, run_experiment, Command, RunConfig};
use wildtree::Execution;

#[derive(Parser)]
#[command(
    name = "wildtree",
    version,
    about = "Weighted perfect sampling for the spatially homogeneous Boltzmann equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated output times.
    #[arg(long)]
    t: Option<String>,
    /// Replicates per time.
    #[arg(long)]
    reps: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    PaperChecks,
}

#[derive(Subcommand)]
enum Cmd {
    /// Weighted perfect sampler: records, moments, summary.
    Sample(Common),
    /// Unweighted recursive sampler for Maxwellian molecules.
    Maxwell(Common),
    /// Direct sampling from the Wild sum.
    Wild(Common),
    /// Truncated tree series: per-tree mass table.
    Series(Common),
    /// Particle-system oracle velocities.
    Dsmc(Common),
    /// Sampler against oracle. With --records and --oracle, compares existing files.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, requires = "oracle")]
        records: Option<PathBuf>,
        #[arg(long, requires = "records")]
        oracle: Option<PathBuf>,
    },
    /// Several stages in one run, e.g. `--stages sample,series,compare`.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "sample,maxwell,wild,series,dsmc,compare")]
        stages: Vec<String>,
    },
    /// Acceptance checks.
    Check {
        #[arg(long, value_enum)]
        preset: Preset,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write check_report.json here as well.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
}

fn load(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::from_file(p).with_context(|| format!("reading {}", p.display()))?,
        None => RunConfig::default(),
    };
    let here = Path::new(".");
    if let Some(s) = common.seed {
        cfg.base_seed = s;
    }
    if let Some(t) = &common.t {
        cfg.set("t", t, here)?;
    }
    if let Some(r) = common.reps {
        cfg.n_rep = r;
    }
    if let Some(o) = &common.out {
        cfg.out = o.clone();
    }
    if let Some(n) = common.threads {
        cfg.threads = n;
    }
    for kv in &common.overrides {
        let Some((k, v)) = kv.split_once('=') else { bail!("--set expects KEY=VALUE, got {kv:?}") };
        cfg.set(k.trim(), v.trim(), here)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn stage(name: &str) -> Result<Command> {
    Ok(match name.trim() {
        "sample" => Command::Sample,
        "maxwell" => Command::Maxwell,
        "wild" => Command::Wild,
        "series" => Command::Series,
        "dsmc" => Command::Dsmc,
        "compare" => Command::Compare,
        "check" => Command::Check,
        other => bail!("unknown stage {other:?}"),
    })
}

fn execute(common: &Common, cmds: &[Command]) -> Result<ExitCode> {
    let cfg = load(common)?;
    let out = run_experiment(&cfg, cmds)?;
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    println!("manifest {} sha256 {}", out.manifest.display(), out.manifest_sha256);
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Cmd::Sample(c) => execute(&c, &[Command::Sample]),
        Cmd::Maxwell(c) => execute(&c, &[Command::Maxwell]),
        Cmd::Wild(c) => execute(&c, &[Command::Wild]),
        Cmd::Series(c) => execute(&c, &[Command::Series]),
        Cmd::Dsmc(c) => execute(&c, &[Command::Dsmc]),
        Cmd::Compare { common, records: None, .. } => execute(&common, &[Command::Compare]),
        Cmd::Compare { common, records: Some(r), oracle: Some(o) } => {
            let cfg = load(&common)?;
            let records = io::read_records(&r)?;
            let oracle = io::read_velocities_csv(&o)?;
            let report = weighted_vs_oracle_report(&records, &oracle, cfg.n_proj, cfg.thresholds, cfg.base_seed)?;
            std::fs::create_dir_all(&cfg.out)?;
            let path = cfg.out.join("compare_report.json");
            io::write_json(&path, &report)?;
            println!(
                "radial KS p = {:.3e}, sliced W1 = {:.4}, pass = {}; wrote {}",
                report.radial_ks.p_value,
                report.sliced_w1,
                report.pass,
                path.display()
            );
            Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Cmd::Compare { .. } => unreachable!("clap enforces --records with --oracle"),
        Cmd::Run { common, stages } => {
            let cmds = stages.iter().map(|s| stage(s)).collect::<Result<Vec<_>>>()?;
            execute(&common, &cmds)
        }
        Cmd::Check { preset: Preset::PaperChecks, seed, out, sequential } => {
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let outcomes = checks::run_all(&CheckScale::full(), seed, exec);
            for o in &outcomes {
                println!("{}", o.line());
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                io::write_json(&dir.join("check_report.json"), &outcomes)?;
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}
