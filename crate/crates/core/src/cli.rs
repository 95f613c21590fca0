//! Command-line front end. Every subcommand is a pure function of its
//! configuration, so the library entry points here are also what the
//! integration tests drive.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::construct::{FactoryConfig, DEFAULT_MAX_COINS, DEFAULT_MAX_PROPOSALS};
use crate::error::{Error, Result};
use crate::jsonl::write_record;
use crate::measures::BaseMeasureSpec;
use crate::pipeline::{RowBuilder, SourceKind};
use crate::rng::RngState;
use crate::sources::sample_bep;
use crate::suites::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    if err.is_budget() {
        EXIT_BUDGET
    } else {
        EXIT_USAGE
    }
}

#[derive(Debug, Parser)]
#[command(name = "nbp", version, about = "Negative binomial processes from Bernoulli process sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write sampled rows as JSONL.
    Sample(RunConfig),
    /// Run a validation suite and print a JSON report.
    Validate(ValidateConfig),
    /// Time a sampling run and report coin usage.
    Bench(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Bep,
    NbpKnown,
    NbpIbp,
    NbpHier,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Bep => "bep",
            Mode::NbpKnown => "nbp-known",
            Mode::NbpIbp => "nbp-ibp",
            Mode::NbpHier => "nbp-hier",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Negative binomial shape.
    #[arg(long)]
    pub r: Option<f64>,
    /// Concentration of the buffet and one-parameter layers.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Diffuse mass of the base measure.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1)]
    pub rows: u64,
    /// Number of one-parameter layers for nbp-hier.
    #[arg(long, default_value_t = 0)]
    pub depth: u32,
    #[arg(long, env = "NBP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Fixed atoms of a known base as `loc:mass,loc:mass`.
    #[arg(long, value_parser = parse_atoms)]
    pub atoms: Option<::std::vec::Vec<(f64, f64)>>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_COINS)]
    pub max_coins: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_PROPOSALS)]
    pub max_proposals: u64,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        RunConfig {
            mode,
            r: None,
            c: 1.0,
            gamma: 0.0,
            rows: 1,
            depth: 0,
            seed: 0,
            atoms: None,
            out: None,
            max_coins: DEFAULT_MAX_COINS,
            max_proposals: DEFAULT_MAX_PROPOSALS,
        }
    }

    fn base(&self) -> Result<BaseMeasureSpec> {
        BaseMeasureSpec::from_pairs(self.atoms.as_deref().unwrap_or(&[]), self.gamma)
    }

    fn factory(&self) -> Result<FactoryConfig> {
        let r = self.r.ok_or_else(|| Error::invalid(format!("--r is required for {}", self.mode.name())))?;
        FactoryConfig { r, max_coins: self.max_coins, max_proposals: self.max_proposals }.validated()
    }

    /// Source and factory settings, checked before any sampling.
    fn plan(&self) -> Result<(SourceKind, Option<FactoryConfig>)> {
        if self.mode == Mode::Bep {
            if self.r.is_some() {
                return Err(Error::invalid("--r does not apply to bep"));
            }
            return Ok((SourceKind::Known(self.base()?), None));
        }
        let cfg = self.factory()?;
        let kind = match self.mode {
            Mode::NbpKnown => SourceKind::Known(self.base()?),
            Mode::NbpIbp | Mode::NbpHier => {
                if self.atoms.is_some() {
                    return Err(Error::invalid("--atoms applies to known-base modes only"));
                }
                if !(self.c > 0.0 && self.c.is_finite() && self.gamma > 0.0 && self.gamma.is_finite()) {
                    return Err(Error::invalid("--c and --gamma must be positive for buffet sources"));
                }
                if self.mode == Mode::NbpIbp {
                    if self.depth != 0 {
                        return Err(Error::invalid("--depth applies to nbp-hier only"));
                    }
                    SourceKind::Ibp { c: self.c, gamma: self.gamma }
                } else {
                    if self.depth == 0 {
                        return Err(Error::invalid("nbp-hier needs --depth of at least 1"));
                    }
                    SourceKind::Hierarchy { c: self.c, gamma: self.gamma, depth: self.depth }
                }
            }
            Mode::Bep => unreachable!(),
        };
        Ok((kind, Some(cfg)))
    }

    fn echo(&self) -> String {
        let r = self.r.map_or("-".to_string(), |r| r.to_string());
        let atoms = self.atoms.as_ref().map_or("-".to_string(), |a| {
            a.iter().map(|(l, m)| format!("{l}:{m}")).collect::<Vec<_>>().join(",")
        });
        format!(
            "mode={} r={r} c={} gamma={} rows={} depth={} seed={} atoms={atoms}",
            self.mode.name(),
            self.c,
            self.gamma,
            self.rows,
            self.depth,
            self.seed
        )
    }
}

/// Parse `loc:mass,loc:mass`.
pub fn parse_atoms(s: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|pair| {
            let (l, m) = pair.split_once(':').ok_or_else(|| format!("expected loc:mass, got {pair:?}"))?;
            let l = l.trim().parse::<f64>().map_err(|e| format!("location {l:?}: {e}"))?;
            let m = m.trim().parse::<f64>().map_err(|e| format!("mass {m:?}: {e}"))?;
            Ok((l, m))
        })
        .collect()
}

/// Per-row costs of a sampling run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunStats {
    pub rows: u64,
    pub coins: u64,
    pub proposals: u64,
}

/// Sample `cfg.rows` rows into `out`.
pub fn sample_to<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<RunStats> {
    let (kind, factory) = cfg.plan()?;
    let mut stats = RunStats::default();
    match factory {
        None => {
            let SourceKind::Known(base) = kind else { unreachable!() };
            let mut rng = RngState::substream(cfg.seed, "source/bep");
            for n in 1..=cfg.rows {
                write_record(out, n, &sample_bep(&base, &mut rng)?.to_multiset())?;
                stats.rows += 1;
            }
        }
        Some(fc) => {
            let mut builder = RowBuilder::from_kind(&kind, fc, cfg.seed, Some(cfg.rows.max(1)))?;
            for n in 1..=cfg.rows {
                let (x, trace) = builder.row(n)?;
                write_record(out, n, &x)?;
                stats.rows += 1;
                stats.coins += trace.coins;
                stats.proposals += trace.proposals;
            }
        }
    }
    Ok(stats)
}

fn run_sample(cfg: &RunConfig) -> Result<()> {
    if cfg.rows == 0 {
        return Err(Error::invalid("--rows must be positive"));
    }
    cfg.plan()?;
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            sample_to(cfg, &mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            sample_to(cfg, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn report_error(err: &Error) -> i32 {
    eprintln!("nbp: {err}");
    exit_code(err)
}

pub fn cmd_sample(cfg: &RunConfig) -> i32 {
    match run_sample(cfg) {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e),
    }
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ValidateConfig {
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, env = "NBP_SEED", default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 20_000)]
    pub samples: u64,
    /// Report path; standard output when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Exit 0 iff every test in the report passed.
pub fn cmd_validate(cfg: &ValidateConfig) -> i32 {
    let report = match run_suite(&cfg.suite, cfg.seed, cfg.samples) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    for w in &report.warnings {
        eprintln!("nbp: warning: {w}");
    }
    let written = serde_json::to_string_pretty(&report).map_err(Error::from).and_then(|json| {
        match &cfg.report {
            Some(path) => std::fs::write(path, json + "\n")?,
            None => println!("{json}"),
        }
        Ok(())
    });
    if let Err(e) = written {
        return report_error(&e);
    }
    if report.passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub stats: RunStats,
    pub seconds: f64,
}

impl BenchResult {
    pub fn coins_per_row(&self) -> f64 {
        if self.stats.rows == 0 {
            0.0
        } else {
            self.stats.coins as f64 / self.stats.rows as f64
        }
    }

    pub fn rows_per_sec(&self) -> f64 {
        if self.seconds > 0.0 {
            self.stats.rows as f64 / self.seconds
        } else {
            0.0
        }
    }
}

/// Time a run whose rows are discarded.
pub fn bench(cfg: &RunConfig) -> Result<BenchResult> {
    cfg.plan()?;
    let start = Instant::now();
    let stats = sample_to(cfg, &mut io::sink())?;
    Ok(BenchResult { stats, seconds: start.elapsed().as_secs_f64() })
}

/// Write the bench table for `cfg` to `out`.
pub fn bench_report<W: Write>(cfg: &RunConfig, out: &mut W) -> Result<()> {
    writeln!(out, "# {}", cfg.echo())?;
    writeln!(out, "mode\tr\trows\tseconds\trows_per_sec\tcoins_per_row\tproposals_per_row")?;
    if cfg.rows == 0 {
        cfg.plan()?;
        return Ok(());
    }
    let b = bench(cfg)?;
    let r = cfg.r.map_or("-".to_string(), |r| r.to_string());
    writeln!(
        out,
        "{}\t{r}\t{}\t{:.6}\t{:.1}\t{:.3}\t{:.3}",
        cfg.mode.name(),
        b.stats.rows,
        b.seconds,
        b.rows_per_sec(),
        b.coins_per_row(),
        b.stats.proposals as f64 / b.stats.rows as f64
    )?;
    Ok(())
}

pub fn cmd_bench(cfg: &RunConfig) -> i32 {
    match bench_report(cfg, &mut io::stdout().lock()) {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e),
    }
}

/// Parse `args` and dispatch; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match &cli.command {
        Command::Sample(c) => cmd_sample(c),
        Command::Validate(c) => cmd_validate(c),
        Command::Bench(c) => cmd_bench(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_flag() {
        assert_eq!(parse_atoms("0.5:0.3,0.1:0.2").unwrap(), vec![(0.5, 0.3), (0.1, 0.2)]);
        assert_eq!(parse_atoms("").unwrap(), vec![]);
        assert!(parse_atoms("0.5").is_err());
        assert!(parse_atoms("a:0.1").is_err());
    }

    #[test]
    fn mode_validation() {
        let mut c = RunConfig::new(Mode::NbpKnown);
        assert!(c.plan().is_err());
        c.r = Some(2.0);
        assert!(c.plan().is_ok());
        let mut h = RunConfig::new(Mode::NbpHier);
        h.r = Some(2.0);
        h.gamma = 1.0;
        assert!(h.plan().is_err());
        h.depth = 1;
        assert!(h.plan().is_ok());
        let mut b = RunConfig::new(Mode::Bep);
        b.r = Some(1.0);
        assert!(b.plan().is_err());
    }

    #[test]
    fn empty_bep_rows() {
        let mut c = RunConfig::new(Mode::Bep);
        c.rows = 3;
        let mut buf = Vec::new();
        sample_to(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "{\"row\":1,\"atoms\":[]}\n{\"row\":2,\"atoms\":[]}\n{\"row\":3,\"atoms\":[]}\n");
    }

    #[test]
    fn bench_zero_rows() {
        let mut c = RunConfig::new(Mode::NbpKnown);
        c.r = Some(2.0);
        c.rows = 0;
        let mut buf = Vec::new();
        bench_report(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("seed=0"));
    }
}
