//! Command-line experiment runner.
//!
//! Every subcommand reads one TOML document (all keys optional), writes its
//! results under `--out`, and prefixes each CSV with
//! `# config_hash=<hex> seed=<u64>`. The hash covers the resolved
//! configuration except the output directory and worker count, so the same
//! experiment produces the same bytes on any number of workers.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::connection::{check_assumptions, ConnectionProfile, SparsitySchedule};
use crate::dsc::{self, BlockPartition, CenterKind, DscConfig, RateTuple};
use crate::error::Error;
use crate::geometry::{DomainSpec, Shape};
use crate::infotheory::{aep_cell, conditional_entropy, h_star};
use crate::oracle::{run_oracle_suite, OracleSuiteConfig};
use crate::sampler::sample_srgg;
use crate::stats::linear_fit;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_ORACLE: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Sample one graph and write it in the `srgg v1` text format.
    Sample,
    /// Entropy rate h* with the integrability report.
    Hstar,
    /// Normalized conditional entropy against s.
    LimitSweep,
    /// Mean and variance of the normalized information density on an (n, s) grid.
    AepSweep,
    /// Brute-force checks at tiny n.
    Oracle,
    /// Rate-region bounds for every block subset.
    RateRegion,
    /// Random-binning error probability sweep.
    DscSim,
}

#[derive(Debug, Parser)]
#[command(name = "srgg", version, about = "Soft random geometric graph experiments")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub model: ModelConfig,
    pub sample: SampleConfig,
    pub limit_sweep: LimitSweepConfig,
    pub aep_sweep: AepSweepConfig,
    pub oracle: OracleConfig,
    pub rate_region: RateRegionConfig,
    pub dsc: DscSimConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            out: None,
            workers: None,
            model: ModelConfig::default(),
            sample: SampleConfig::default(),
            limit_sweep: LimitSweepConfig::default(),
            aep_sweep: AepSweepConfig::default(),
            oracle: OracleConfig::default(),
            rate_region: RateRegionConfig::default(),
            dsc: DscSimConfig::default(),
        }
    }
}

/// The ensemble: domain, connection function and sparsity schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// `torus` or `cube` (`square`, `interval` are aliases).
    pub shape: String,
    pub dimension: usize,
    /// `rayleigh`, `exponential` or `scaled-rayleigh:<q>`.
    pub profile: String,
    /// `s(n) = c n^(-beta)`.
    pub c: f64,
    pub beta: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            shape: "torus".into(),
            dimension: 2,
            profile: "rayleigh".into(),
            c: 0.8,
            beta: 0.25,
        }
    }
}

impl ModelConfig {
    pub fn domain(&self) -> crate::Result<DomainSpec> {
        DomainSpec::new(self.dimension, self.shape.parse::<Shape>()?)
    }

    pub fn profile(&self) -> crate::Result<ConnectionProfile> {
        self.profile.parse()
    }

    pub fn schedule(&self) -> crate::Result<SparsitySchedule> {
        SparsitySchedule::new(self.c, self.beta, self.dimension)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub n: usize,
    /// Fixed sparsity; the schedule's `s(n)` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { n: 100, s: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitSweepConfig {
    pub s: Vec<f64>,
    /// Shapes swept in addition to nothing else; the model's dimension is used.
    pub shapes: Vec<String>,
}

impl Default for LimitSweepConfig {
    fn default() -> Self {
        LimitSweepConfig {
            s: vec![0.2, 0.1, 0.05],
            shapes: vec!["torus".into(), "cube".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AepSweepConfig {
    pub n: Vec<usize>,
    pub s: Vec<f64>,
    pub trials: usize,
}

impl Default for AepSweepConfig {
    fn default() -> Self {
        AepSweepConfig {
            n: vec![50, 100, 200, 400, 800],
            s: vec![0.1, 0.05],
            trials: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub n: usize,
    pub s: f64,
    pub trials: usize,
    pub aep_samples: usize,
    pub h2_trials: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n: 4,
            s: 0.3,
            trials: 1_000_000,
            aep_samples: 100_000,
            h2_trials: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateRegionConfig {
    pub blocks: usize,
    /// Optional rate tuple to test against the region.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
}

impl Default for RateRegionConfig {
    fn default() -> Self {
        RateRegionConfig { blocks: 2, rates: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DscSimConfig {
    pub n: usize,
    pub blocks: usize,
    pub epsilon: f64,
    /// `finite-n` or `h-star`.
    pub center: String,
    pub gammas: Vec<f64>,
    /// Adds the smallest `gamma` at which every codebook is injective.
    pub injective: bool,
    pub trials: usize,
    /// Rates at `gamma = 1`; the symmetric corner of the region when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
}

impl Default for DscSimConfig {
    fn default() -> Self {
        DscSimConfig {
            n: 6,
            blocks: 2,
            epsilon: 1.5,
            center: "finite-n".into(),
            gammas: vec![0.25, 0.5, 1.0, 2.0],
            injective: true,
            trials: 1000,
            rates: None,
        }
    }
}

/// Why a run stopped.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Library(Error),
    OracleChecks(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Library(e) if e.is_numeric() => EXIT_NUMERIC,
            Failure::Library(_) => EXIT_CONFIG,
            Failure::OracleChecks(_) => EXIT_ORACLE,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Library(e) => write!(f, "{e}"),
            Failure::OracleChecks(k) => write!(f, "{k} oracle check(s) failed"),
        }
    }
}

type RunResult = std::result::Result<(), Failure>;

/// Parses the arguments, runs the subcommand and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("srgg: {f}");
            f.exit_code()
        }
    }
}

/// Reads the config and applies flag overrides.
pub fn resolve_config(cli: &Cli) -> std::result::Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    if cfg.workers == Some(0) {
        return Err(Failure::Config("workers must be at least 1".into()));
    }
    let invalid = |e: Error| Failure::Config(format!("[model]: {e}"));
    cfg.model.domain().map_err(invalid)?;
    cfg.model.profile().map_err(invalid)?;
    cfg.model.schedule().map_err(invalid)?;
    Ok(cfg)
}

/// SHA-256 (first 16 hex digits) of the configuration without its output
/// directory and worker count.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut canonical = cfg.clone();
    canonical.out = None;
    canonical.workers = None;
    let text = toml::to_string(&canonical).expect("configs always serialize");
    Sha256::digest(text.as_bytes())[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn run(cli: &Cli) -> RunResult {
    let cfg = resolve_config(cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| Failure::Config(format!("worker pool: {e}")))?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("srgg-out"));
    fs::create_dir_all(&out).map_err(|e| Failure::Config(format!("cannot create {}: {e}", out.display())))?;
    let ctx = Context {
        hash: config_hash(&cfg),
        cfg,
        out,
    };
    pool.install(|| match cli.command {
        Command::Sample => ctx.sample(),
        Command::Hstar => ctx.hstar(),
        Command::LimitSweep => ctx.limit_sweep(),
        Command::AepSweep => ctx.aep_sweep(),
        Command::Oracle => ctx.oracle(),
        Command::RateRegion => ctx.rate_region(),
        Command::DscSim => ctx.dsc_sim(),
    })
}

struct Context {
    cfg: ExperimentConfig,
    hash: String,
    out: PathBuf,
}

impl Context {
    fn create(&self, name: &str) -> std::result::Result<BufWriter<File>, Failure> {
        let path: PathBuf = self.out.join(name);
        let file = File::create(&path).map_err(|e| Failure::Config(format!("cannot create {}: {e}", path.display())))?;
        Ok(BufWriter::new(file))
    }

    /// A CSV file whose first row names the config hash and master seed.
    fn csv(&self, name: &str) -> std::result::Result<BufWriter<File>, Failure> {
        let mut w = self.create(name)?;
        writeln!(w, "# config_hash={} seed={}", self.hash, self.cfg.seed).map_err(Error::from)?;
        Ok(w)
    }

    fn announce(&self, name: &str) {
        println!("wrote {}", Path::new(&self.out).join(name).display());
    }

    fn sample(&self) -> RunResult {
        let m = &self.cfg.model;
        let n = self.cfg.sample.n;
        let s = match self.cfg.sample.s {
            Some(s) => s,
            None => m.schedule()?.sparsity(n)?,
        };
        let g = sample_srgg(n, m.domain()?, m.profile()?, s, self.cfg.seed)?;
        let mut w = self.create("sample.srgg")?;
        g.write_to(&mut w)?;
        w.flush().map_err(Error::from)?;
        println!("n = {n}, s = {s}, edges = {}", g.edge_count());
        self.announce("sample.srgg");
        Ok(())
    }

    fn hstar(&self) -> RunResult {
        let m = &self.cfg.model;
        let profile = m.profile()?;
        let report = check_assumptions(&profile, m.dimension)?;
        let h = report.h_star;
        println!("h* = {:.9} bits  (+/- {:.1e})", h.value, h.error_bound());
        println!(
            "entropy moment {:.6e} ({}), log-odds moment {:.6e} ({})",
            report.entropy_moment.value,
            if report.entropy_moment.finite { "finite" } else { "not finite" },
            report.log_odds_moment.value,
            if report.log_odds_moment.finite { "finite" } else { "not finite" },
        );
        let mut w = self.csv("hstar.csv")?;
        (|| -> std::io::Result<()> {
            writeln!(w, "profile,dimension,h_star,error_bound,entropy_moment,log_odds_moment,all_finite")?;
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                profile,
                m.dimension,
                h.value,
                h.error_bound(),
                report.entropy_moment.value,
                report.log_odds_moment.value,
                report.all_finite()
            )?;
            w.flush()
        })()
        .map_err(Error::from)?;
        self.announce("hstar.csv");
        if !report.all_finite() {
            return Err(Error::Divergent(format!("integrability conditions fail for {profile}")).into());
        }
        Ok(())
    }

    fn limit_sweep(&self) -> RunResult {
        let m = &self.cfg.model;
        let profile = m.profile()?;
        let hs = h_star(&profile, m.dimension)?;
        let mut rows = Vec::new();
        for shape in &self.cfg.limit_sweep.shapes {
            let domain = DomainSpec::new(m.dimension, shape.parse()?)?;
            for &s in &self.cfg.limit_sweep.s {
                let ce = conditional_entropy(&domain, &profile, 2, s)?;
                println!("{domain:<8} s = {s:<6} normalized = {:.9}  h* - value = {:+.3e}", ce.normalized, hs - ce.normalized);
                rows.push((domain, s, ce));
            }
        }
        let mut w = self.csv("limit_sweep.csv")?;
        (|| -> std::io::Result<()> {
            writeln!(w, "domain,s,normalized,h_star,deficit,abs_error")?;
            for (domain, s, ce) in &rows {
                writeln!(
                    w,
                    "{domain},{s},{},{hs},{},{}",
                    ce.normalized,
                    hs - ce.normalized,
                    ce.abs_error / crate::infotheory::normalization(2, *s, m.dimension)
                )?;
            }
            w.flush()
        })()
        .map_err(Error::from)?;
        self.announce("limit_sweep.csv");
        Ok(())
    }

    fn aep_sweep(&self) -> RunResult {
        let m = &self.cfg.model;
        let (domain, profile) = (m.domain()?, m.profile()?);
        let a = &self.cfg.aep_sweep;
        if a.trials < 2 {
            return Err(Failure::Config("aep_sweep.trials must be at least 2".into()));
        }
        let mut cells = Vec::new();
        for (si, &s) in a.s.iter().enumerate() {
            for (ni, &n) in a.n.iter().enumerate() {
                let seed = crate::rng::derive_path(self.cfg.seed, &[si as u64, ni as u64]);
                let cell = aep_cell(&domain, &profile, n, s, a.trials, seed)?;
                println!(
                    "n = {n:<5} s = {s:<6} C(n,2)s^d = {:<10.3} mean = {:.5} (se {:.1e})  var = {:.4e}",
                    cell.scale, cell.mean, cell.std_error, cell.variance
                );
                cells.push(cell);
            }
        }
        let x: Vec<f64> = cells.iter().map(|c| c.scale.ln()).collect();
        let y: Vec<f64> = cells.iter().map(|c| c.variance.ln()).collect();
        if let Some(fit) = linear_fit(&x, &y) {
            println!("log variance vs log C(n,2)s^d: slope {:.4} (se {:.4})", fit.slope, fit.slope_std_error);
        }
        let mut w = self.csv("aep_sweep.csv")?;
        (|| -> std::io::Result<()> {
            writeln!(w, "n,s,scale,trials,mean,std_error,variance,conditional_entropy")?;
            for c in &cells {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    c.n, c.s, c.scale, c.trials, c.mean, c.std_error, c.variance, c.conditional_entropy
                )?;
            }
            w.flush()
        })()
        .map_err(Error::from)?;
        self.announce("aep_sweep.csv");
        Ok(())
    }

    fn oracle(&self) -> RunResult {
        let m = &self.cfg.model;
        let o = &self.cfg.oracle;
        let suite = OracleSuiteConfig {
            n: o.n,
            domain: m.domain()?,
            profile: m.profile()?,
            s: o.s,
            trials: o.trials,
            aep_samples: o.aep_samples,
            h2_trials: o.h2_trials,
            seed: self.cfg.seed,
        };
        let report = run_oracle_suite(&suite)?;
        let mut w = self.csv("oracle_checks.csv")?;
        (|| -> std::io::Result<()> {
            writeln!(w, "check,statistic,tolerance,passed")?;
            for c in &report.checks {
                writeln!(w, "{},{},{},{}", c.name.replace(',', ";"), c.statistic, c.tolerance, c.passed)?;
            }
            w.flush()
        })()
        .map_err(Error::from)?;
        let mut t = self.csv("oracle_table.csv")?;
        report.table.write_csv(&mut t)?;
        t.flush().map_err(Error::from)?;
        for c in &report.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            println!("{mark} {:<34} {:+.3e} (tol {:.3e})  {}", c.name, c.statistic, c.tolerance, c.detail);
        }
        self.announce("oracle_checks.csv");
        self.announce("oracle_table.csv");
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        if failed > 0 {
            return Err(Failure::OracleChecks(failed));
        }
        Ok(())
    }

    fn rate_region(&self) -> RunResult {
        let m = &self.cfg.model;
        let schedule = m.schedule()?;
        let hs = h_star(&m.profile()?, m.dimension)?;
        let rr = &self.cfg.rate_region;
        let rows = dsc::rate_region(rr.blocks, &schedule, hs)?;
        for (mask, b) in &rows {
            println!("subset {mask:0width$b}: sum of rates >= {b:.6}", width = rr.blocks);
        }
        if let Some(rates) = &rr.rates {
            let rates = RateTuple::new(rates.clone())?;
            if rates.blocks() != rr.blocks {
                return Err(Failure::Config("rate_region.rates must have one entry per block".into()));
            }
            let a = dsc::is_achievable(&rates, &schedule, hs)?;
            match a.tightest {
                None => println!("rates {:?} are achievable", rates.rates()),
                Some(v) => println!(
                    "rates {:?} are not achievable: subset {:b} has {:.6} < {:.6}",
                    rates.rates(),
                    v.subset,
                    v.rate_sum,
                    v.bound
                ),
            }
        }
        let mut w = self.csv("rate_region.csv")?;
        dsc::write_rate_region_csv(&rows, &mut w)?;
        w.flush().map_err(Error::from)?;
        self.announce("rate_region.csv");
        Ok(())
    }

    fn dsc_sim(&self) -> RunResult {
        let m = &self.cfg.model;
        let d = &self.cfg.dsc;
        let (domain, profile, schedule) = (m.domain()?, m.profile()?, m.schedule()?);
        let hs = h_star(&profile, m.dimension)?;
        let rates = match &d.rates {
            Some(r) => RateTuple::new(r.clone())?,
            None => dsc::corner_rates(d.blocks, &schedule, hs)?,
        };
        let center = match d.center.as_str() {
            "finite-n" => CenterKind::FiniteN,
            "h-star" => CenterKind::HStar,
            other => return Err(Failure::Config(format!("dsc.center must be finite-n or h-star, got '{other}'"))),
        };
        let mut gammas = d.gammas.clone();
        if d.injective {
            let partition = BlockPartition::new(d.n, d.blocks)?;
            gammas.push(dsc::injective_gamma(&partition, &rates, schedule.sparsity(d.n)?, m.dimension)?);
        }
        let cfg = DscConfig {
            n: d.n,
            blocks: d.blocks,
            domain,
            profile,
            schedule,
            rates,
            gammas,
            epsilon: d.epsilon,
            center,
            trials: d.trials,
            seed: self.cfg.seed,
        };
        let report = dsc::simulate_dsc(&cfg)?;
        let mut w = self.csv("dsc_trials.csv")?;
        dsc::write_dsc_csv(&cfg, &report, &mut w)?;
        w.flush().map_err(Error::from)?;
        let mut w = self.csv("dsc_summary.csv")?;
        (|| -> std::io::Result<()> {
            writeln!(w, "gamma,bits,trials,errors,p_error,ci_low,ci_high,atypical,collisions,no_candidate,union_bound")?;
            for c in &report.cells {
                let bits: Vec<String> = c.bits.iter().map(|b| b.to_string()).collect();
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    c.gamma,
                    bits.join(";"),
                    c.trials,
                    c.errors,
                    c.p_error,
                    c.ci.0,
                    c.ci.1,
                    c.atypical,
                    c.collisions,
                    c.no_candidate,
                    c.union_bound.map_or(String::new(), |u| u.to_string())
                )?;
            }
            w.flush()
        })()
        .map_err(Error::from)?;
        println!("s(n) = {:.5}, typical-set center = {:.5}", report.s, report.center);
        for c in &report.cells {
            println!(
                "gamma {:<7.4} bits {:?}: P_E = {:.4} [{:.4}, {:.4}], atypical {}, collisions {}",
                c.gamma, c.bits, c.p_error, c.ci.0, c.ci.1, c.atypical, c.collisions
            );
        }
        let summary = serde_json::to_string_pretty(&report.cells).map_err(|e| Failure::Config(e.to_string()))?;
        fs::write(self.out.join("dsc_summary.json"), summary + "\n").map_err(Error::from)?;
        self.announce("dsc_trials.csv");
        self.announce("dsc_summary.csv");
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ExperimentConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn hash_ignores_out_and_workers() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.out = Some("elsewhere".into());
        b.workers = Some(3);
        assert_eq!(config_hash(&a), config_hash(&b));
        b.seed = 2;
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 16);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<ExperimentConfig>("sed = 3").is_err());
        let partial: ExperimentConfig = toml::from_str("seed = 9\n[model]\nshape = \"cube\"\n").unwrap();
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.model.dimension, 2);
    }

    fn run_in(dir: &Path, args: &[&str]) -> i32 {
        let mut full = vec!["srgg".to_string()];
        full.extend(args.iter().map(|a| a.to_string()));
        full.push("--out".into());
        full.push(dir.display().to_string());
        main_with_args(full)
    }

    fn small_config(dir: &Path) -> PathBuf {
        let path = dir.join("small.toml");
        fs::write(
            &path,
            "seed = 11\n[aep_sweep]\nn = [20, 40]\ns = [0.2]\ntrials = 50\n\
             [dsc]\ntrials = 40\n[oracle]\ntrials = 10000\naep_samples = 2000\nh2_trials = 1000\n",
        )
        .unwrap();
        path
    }

    #[test]
    fn outputs_identical_across_worker_counts() {
        let root = tempfile::tempdir().unwrap();
        let config = small_config(root.path());
        let config = config.to_str().unwrap();
        let (a, b) = (root.path().join("a"), root.path().join("b"));
        for cmd in ["sample", "hstar", "limit-sweep", "aep-sweep", "rate-region", "dsc-sim", "oracle"] {
            let ca = run_in(&a, &[cmd, "--config", config, "--workers", "1"]);
            let cb = run_in(&b, &[cmd, "--config", config, "--workers", "3"]);
            assert_eq!(ca, cb, "{cmd}");
            assert!(ca == EXIT_OK || (cmd == "oracle" && ca == EXIT_ORACLE), "{cmd} exited {ca}");
        }
        let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(names.len() >= 10);
        for name in names {
            let x = fs::read(a.join(&name)).unwrap();
            let y = fs::read(b.join(&name)).unwrap();
            assert_eq!(x, y, "{name:?}");
            if name.to_string_lossy().ends_with(".csv") {
                let first = String::from_utf8(x).unwrap().lines().next().unwrap().to_string();
                assert!(first.starts_with("# config_hash=") && first.ends_with(" seed=11"), "{first}");
            }
        }
    }

    #[test]
    fn seed_flag_changes_output() {
        let root = tempfile::tempdir().unwrap();
        let (a, b) = (root.path().join("a"), root.path().join("b"));
        assert_eq!(run_in(&a, &["sample", "--seed", "1"]), EXIT_OK);
        assert_eq!(run_in(&b, &["sample", "--seed", "2"]), EXIT_OK);
        let x = fs::read_to_string(a.join("sample.srgg")).unwrap();
        let y = fs::read_to_string(b.join("sample.srgg")).unwrap();
        assert_ne!(x, y);
        assert!(x.starts_with("srgg v1 n=100 d=2 s="));
        assert!(x.lines().next().unwrap().ends_with("profile=rayleigh seed=1"));
    }

    #[test]
    fn config_and_numeric_errors() {
        let root = tempfile::tempdir().unwrap();
        let bad = root.path().join("bad.toml");
        fs::write(&bad, "[model]\nshape = \"sphere\"\n").unwrap();
        let out = root.path().join("o");
        assert_eq!(run_in(&out, &["hstar", "--config", bad.to_str().unwrap()]), EXIT_CONFIG);
        fs::write(&bad, "[model]\nbeta = 0.9\n").unwrap();
        assert_eq!(run_in(&out, &["rate-region", "--config", bad.to_str().unwrap()]), EXIT_CONFIG);
        assert_eq!(run_in(&out, &["hstar", "--config", "/nonexistent.toml"]), EXIT_CONFIG);
        assert_eq!(run_in(&out, &["nonsense"]), EXIT_CONFIG);
        assert_eq!(run_in(&out, &["hstar", "--workers", "0"]), EXIT_CONFIG);
        fs::write(&bad, "[model]\nprofile = \"rayleigh\"\n[sample]\nn = 3\ns = 1e-300\n").unwrap();
        assert_eq!(run_in(&out, &["sample", "--config", bad.to_str().unwrap()]), EXIT_OK);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::Config("x".into()).exit_code(), 2);
        assert_eq!(Failure::Library(Error::Divergent("x".into())).exit_code(), 3);
        assert_eq!(Failure::Library(Error::Size("x".into())).exit_code(), 2);
        assert_eq!(Failure::OracleChecks(1).exit_code(), 4);
    }
}
