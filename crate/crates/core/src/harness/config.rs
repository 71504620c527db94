//! Flat `key = value` run configuration.
//!
//! ```text
//! # hard spheres, Gaussian start
//! gamma = 1
//! e0 = auto
//! kernel = constant(0.0795774715459477)
//! f0 = gaussian(0, 0, 0, 0.5)
//! t = 0.05, 0.1
//! n_rep = 100000
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::collision::{AngularKernel, ModelParams};
use crate::dsmc::OracleThresholds;
use crate::error::{Error, Result};
use crate::law::{InitialLaw, VelocityLaw};
use crate::series::SeriesBudget;
use crate::velocity::Velocity;

#[derive(Clone, Debug, PartialEq)]
pub enum KernelSpec {
    Constant(f64),
    Power { exponent: f64, floor: f64 },
    Table(PathBuf),
}

impl KernelSpec {
    pub fn build(&self) -> Result<AngularKernel> {
        match self {
            KernelSpec::Constant(v) => AngularKernel::constant(*v),
            KernelSpec::Power { exponent, floor } => AngularKernel::truncated_power(*exponent, *floor),
            KernelSpec::Table(path) => AngularKernel::from_table_file(path),
        }
    }

    fn render(&self) -> String {
        match self {
            KernelSpec::Constant(v) => format!("constant({v})"),
            KernelSpec::Power { exponent, floor } => format!("power({exponent}, {floor})"),
            KernelSpec::Table(p) => format!("table({})", p.display()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnergySpec {
    /// Resolve to the energy of `f0`.
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub gamma: f64,
    pub e0: EnergySpec,
    pub kernel: KernelSpec,
    pub f0: VelocityLaw,
    pub m0: f64,
    pub t: Vec<f64>,
    pub n_rep: usize,
    pub base_seed: u64,
    pub cap: u64,
    pub series_k: usize,
    pub series_particles: usize,
    pub series_time_steps: usize,
    pub series_repeats: usize,
    pub dsmc_n: usize,
    pub dsmc_dt: Option<f64>,
    pub blocks: usize,
    pub n_proj: usize,
    pub threads: usize,
    pub out: PathBuf,
    pub thresholds: OracleThresholds,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            gamma: 1.0,
            e0: EnergySpec::Auto,
            kernel: KernelSpec::Constant(1.0 / (4.0 * std::f64::consts::PI)),
            f0: VelocityLaw::Gaussian { mean: Velocity::ZERO, variance: 1.0 / 3.0 },
            m0: 1.0,
            t: vec![0.1],
            n_rep: 10_000,
            base_seed: 1,
            cap: crate::sampler::DEFAULT_CAP,
            series_k: 7,
            series_particles: 2048,
            series_time_steps: 64,
            series_repeats: 8,
            dsmc_n: 100_000,
            dsmc_dt: None,
            blocks: 32,
            n_proj: 32,
            threads: 0,
            out: PathBuf::from("out"),
            thresholds: OracleThresholds::default(),
        }
    }
}

fn err(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

fn num(key: &str, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| err(key, format!("cannot parse {s:?} as a number")))
}

fn count(key: &str, s: &str) -> Result<usize> {
    let x = s.trim().replace('_', "");
    // accept 1e5 style counts
    let v = x
        .parse::<usize>()
        .or_else(|_| x.parse::<f64>().ok().filter(|f| f.fract() == 0.0 && *f >= 0.0).map(|f| f as usize).ok_or(()));
    v.map_err(|_| err(key, format!("cannot parse {s:?} as a count")))
}

// `name(a, b, c)` -> ("name", ["a", "b", "c"])
fn call<'a>(key: &str, s: &'a str) -> Result<(&'a str, Vec<&'a str>)> {
    let s = s.trim();
    let open = s.find('(').ok_or_else(|| err(key, format!("expected name(args) in {s:?}")))?;
    if !s.ends_with(')') {
        return Err(err(key, format!("missing ')' in {s:?}")));
    }
    let inner = &s[open + 1..s.len() - 1];
    let args = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').map(str::trim).collect() };
    Ok((s[..open].trim(), args))
}

fn nums(key: &str, args: &[&str], n: usize) -> Result<Vec<f64>> {
    if args.len() != n {
        return Err(err(key, format!("expected {n} arguments, got {}", args.len())));
    }
    args.iter().map(|a| num(key, a)).collect()
}

pub fn parse_kernel(s: &str, base_dir: &Path) -> Result<KernelSpec> {
    let (name, args) = call("kernel", s)?;
    match name {
        "constant" => Ok(KernelSpec::Constant(nums("kernel", &args, 1)?[0])),
        "power" => {
            let a = nums("kernel", &args, 2)?;
            Ok(KernelSpec::Power { exponent: a[0], floor: a[1] })
        }
        "table" => {
            if args.len() != 1 {
                return Err(err("kernel", "table(path) takes one argument"));
            }
            let p = PathBuf::from(args[0]);
            Ok(KernelSpec::Table(if p.is_relative() { base_dir.join(p) } else { p }))
        }
        other => Err(err("kernel", format!("unknown kernel {other:?}"))),
    }
}

pub fn parse_law(s: &str) -> Result<VelocityLaw> {
    let (name, args) = call("f0", s)?;
    let law = match name {
        "dirac" => {
            let a = nums("f0", &args, 3)?;
            VelocityLaw::Dirac(Velocity::new(a[0], a[1], a[2]))
        }
        "gaussian" => {
            let a = nums("f0", &args, 4)?;
            VelocityLaw::Gaussian { mean: Velocity::new(a[0], a[1], a[2]), variance: a[3] }
        }
        "twopoint" => {
            let a = nums("f0", &args, 7)?;
            VelocityLaw::TwoPoint { v1: Velocity::new(a[0], a[1], a[2]), v2: Velocity::new(a[3], a[4], a[5]), p: a[6] }
        }
        "ball" => VelocityLaw::UniformBall { radius: nums("f0", &args, 1)?[0] },
        "shell" => VelocityLaw::Shell { radius: nums("f0", &args, 1)?[0] },
        other => return Err(err("f0", format!("unknown law {other:?}"))),
    };
    if !law.is_valid() {
        return Err(err("f0", format!("invalid parameters in {s:?}")));
    }
    Ok(law)
}

fn render_law(law: &VelocityLaw) -> String {
    match law {
        VelocityLaw::Dirac(v) => format!("dirac({}, {}, {})", v.x, v.y, v.z),
        VelocityLaw::Gaussian { mean, variance } => {
            format!("gaussian({}, {}, {}, {variance})", mean.x, mean.y, mean.z)
        }
        VelocityLaw::TwoPoint { v1, v2, p } => {
            format!("twopoint({}, {}, {}, {}, {}, {}, {p})", v1.x, v1.y, v1.z, v2.x, v2.y, v2.z)
        }
        VelocityLaw::UniformBall { radius } => format!("ball({radius})"),
        VelocityLaw::Shell { radius } => format!("shell({radius})"),
    }
}

impl RunConfig {
    /// Parses config text; relative table paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim(), base_dir)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        RunConfig::parse(&text, base)
    }

    /// Sets one key; used by the parser and for command-line overrides.
    pub fn set(&mut self, key: &str, value: &str, base_dir: &Path) -> Result<()> {
        match key {
            "gamma" => self.gamma = num(key, value)?,
            "e0" => {
                self.e0 = if value.eq_ignore_ascii_case("auto") {
                    EnergySpec::Auto
                } else {
                    EnergySpec::Fixed(num(key, value)?)
                }
            }
            "kernel" => self.kernel = parse_kernel(value, base_dir)?,
            "f0" => self.f0 = parse_law(value)?,
            "m0" => self.m0 = num(key, value)?,
            "t" => {
                self.t = value.split(',').map(|s| num(key, s)).collect::<Result<_>>()?;
            }
            "n_rep" => self.n_rep = count(key, value)?,
            "base_seed" | "seed" => {
                self.base_seed = value.trim().parse().map_err(|_| err(key, format!("cannot parse {value:?}")))?
            }
            "cap" => self.cap = count(key, value)? as u64,
            "series_k" => self.series_k = count(key, value)?,
            "series_particles" => self.series_particles = count(key, value)?,
            "series_time_steps" => self.series_time_steps = count(key, value)?,
            "series_repeats" => self.series_repeats = count(key, value)?,
            "dsmc_n" => self.dsmc_n = count(key, value)?,
            "dsmc_dt" => self.dsmc_dt = if value.eq_ignore_ascii_case("auto") { None } else { Some(num(key, value)?) },
            "blocks" => self.blocks = count(key, value)?,
            "n_proj" => self.n_proj = count(key, value)?,
            "threads" => self.threads = count(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "ks_alpha" => self.thresholds.ks_alpha = num(key, value)?,
            "moment_sigmas" => self.thresholds.moment_sigmas = num(key, value)?,
            "sliced_w1_max" => self.thresholds.sliced_w1_max = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(err("gamma", "must lie in [0, 1]"));
        }
        if let EnergySpec::Fixed(e) = self.e0 {
            if !(e.is_finite() && e > 0.0) {
                return Err(err("e0", "must be > 0"));
            }
        }
        if !(self.m0.is_finite() && self.m0 > 0.0) {
            return Err(err("m0", "must be > 0"));
        }
        if self.t.is_empty() || self.t.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(err("t", "needs at least one finite time >= 0"));
        }
        for (k, v) in [
            ("n_rep", self.n_rep),
            ("cap", self.cap as usize),
            ("series_k", self.series_k),
            ("series_particles", self.series_particles),
            ("series_time_steps", self.series_time_steps),
            ("series_repeats", self.series_repeats),
            ("dsmc_n", self.dsmc_n),
            ("n_proj", self.n_proj),
        ] {
            if v < 1 {
                return Err(err(k, "must be >= 1"));
            }
        }
        if self.blocks < 8 {
            return Err(err("blocks", "must be >= 8"));
        }
        Ok(())
    }

    pub fn initial_law(&self) -> InitialLaw {
        InitialLaw::new(self.m0, self.f0.clone())
    }

    /// Reference energy after resolving `auto`.
    pub fn resolved_e0(&self) -> f64 {
        match self.e0 {
            EnergySpec::Auto => self.f0.energy(),
            EnergySpec::Fixed(e) => e,
        }
    }

    /// True when `e0` differs from the energy of `f0`; the weighted samples
    /// then no longer represent the Boltzmann solution.
    pub fn e0_mismatch(&self) -> bool {
        let e = self.f0.energy();
        (self.resolved_e0() - e).abs() > 1e-12 * (1.0 + e)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.gamma, self.resolved_e0(), self.kernel.build()?)
    }

    pub fn budget(&self) -> SeriesBudget {
        SeriesBudget { n_particles: self.series_particles, n_time: self.series_time_steps, floor: 64 }
    }

    /// Canonical sorted rendering with `e0` resolved; the basis of the
    /// config hash. The output directory is not part of it.
    pub fn canonical(&self) -> String {
        let mut m = BTreeMap::new();
        m.insert("gamma", self.gamma.to_string());
        m.insert("e0", self.resolved_e0().to_string());
        m.insert("kernel", self.kernel.render());
        m.insert("f0", render_law(&self.f0));
        m.insert("m0", self.m0.to_string());
        m.insert("t", self.t.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", "));
        m.insert("n_rep", self.n_rep.to_string());
        m.insert("base_seed", self.base_seed.to_string());
        m.insert("cap", self.cap.to_string());
        m.insert("series_k", self.series_k.to_string());
        m.insert("series_particles", self.series_particles.to_string());
        m.insert("series_time_steps", self.series_time_steps.to_string());
        m.insert("series_repeats", self.series_repeats.to_string());
        m.insert("dsmc_n", self.dsmc_n.to_string());
        m.insert("dsmc_dt", self.dsmc_dt.map_or("auto".to_string(), |d| d.to_string()));
        m.insert("blocks", self.blocks.to_string());
        m.insert("n_proj", self.n_proj.to_string());
        m.insert("ks_alpha", self.thresholds.ks_alpha.to_string());
        m.insert("moment_sigmas", self.thresholds.moment_sigmas.to_string());
        m.insert("sliced_w1_max", self.thresholds.sliced_w1_max.to_string());
        m.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "
            # comment
            gamma = 0.5
            e0 = auto
            kernel = power(2, 0.1)
            f0 = twopoint(1, 0, 0, -1, 0, 0, 0.5)
            t = 0.1, 0.2
            n_rep = 1e4
            seed = 42
            dsmc_dt = 0.001
        ";
        let cfg = RunConfig::parse(text, Path::new(".")).unwrap();
        assert_eq!(cfg.gamma, 0.5);
        assert_eq!(cfg.t, vec![0.1, 0.2]);
        assert_eq!(cfg.n_rep, 10_000);
        assert_eq!(cfg.base_seed, 42);
        assert_eq!(cfg.resolved_e0(), 1.0);
        assert_eq!(cfg.dsmc_dt, Some(0.001));
        assert!(!cfg.e0_mismatch());
        assert!(cfg.params().is_ok());
    }

    #[test]
    fn canonical_form_round_trips() {
        let cfg = RunConfig::parse("f0 = shell(2)\nkernel = constant(0.5)\nt = 0, 0.3", Path::new(".")).unwrap();
        let again = RunConfig::parse(&cfg.canonical(), Path::new(".")).unwrap();
        assert_eq!(again.canonical(), cfg.canonical());
    }

    #[test]
    fn rejects_bad_input() {
        for text in
            ["gamma = 2", "bogus = 1", "kernel = sinc(1)", "f0 = shell()", "t =", "blocks = 4", "e0 = -1", "noequals"]
        {
            assert!(RunConfig::parse(text, Path::new(".")).is_err(), "{text}");
        }
    }

    #[test]
    fn manual_e0_mismatch_is_detected() {
        let cfg = RunConfig::parse("f0 = shell(1)\ne0 = 2", Path::new(".")).unwrap();
        assert!(cfg.e0_mismatch());
    }

    #[test]
    fn table_kernel_resolves_relative_path() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("b.txt"), "-1 0\n1 2\n").unwrap();
        let cfg = RunConfig::parse("kernel = table(b.txt)", dir.path()).unwrap();
        let k = cfg.kernel.build().unwrap();
        assert!((k.mean_cosine() - 1.0 / 3.0).abs() < 1e-12);
    }
}
