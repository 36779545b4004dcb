//! Command-line flags, the optional `key = value` config file, and the
//! validated run configuration they resolve to. Flags override the file,
//! which overrides the defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tightbench_core::campaign::{cycle_checkpoints, Campaign, Engine};
use tightbench_core::measures::TightnessProbe;
use tightbench_core::model::{CostModel, MAX_CYCLE};
use tightbench_core::sde::{Mode, SimConfig};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "tightbench", version = crate::VERSION, about = "Runs the inventory policy engines and writes CSV/JSON results")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate closed-form values as JSON.
    Oracle(OracleArgs),
    /// Run an engine and write snapshots, ledgers and renewal statistics.
    Simulate(RunArgs),
    /// Run an engine and write escape masses with a tightness verdict.
    Tightness(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Det,
    Sde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Renewal,
    Path,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Index range, as `a..b`, `a..=b` (both inclusive) or a single `n`.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub k1: Option<f64>,
    /// Also write `report.json` and `manifest.json` into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Sampling mode of the Brownian model.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Last cycle to run.
    #[arg(long)]
    pub i_max: Option<u32>,
    /// Path-mode step.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub k1: Option<f64>,
    /// Comma-separated escape radii.
    #[arg(long)]
    pub m_grid: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the number of available processors.
    #[arg(long)]
    pub parallelism: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write every order of replication 0 to `trace.csv`.
    #[arg(long)]
    pub dump_trace: bool,
}

/// Flat `key = value` pairs; `#` starts a comment. Keys may use `-` or `_`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", k + 1)))?;
        out.insert(key.trim().replace('_', "-"), value.trim().to_string());
    }
    Ok(out)
}

struct FileValues(BTreeMap<String, String>);

impl FileValues {
    fn load(path: Option<&Path>, allowed: &[&str]) -> Result<Self, CliError> {
        let map = match path {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(CliError::Config(format!("unknown config key `{k}`")));
        }
        Ok(FileValues(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.0
            .get(key)
            .map(|v| v.parse().map_err(|_| CliError::Config(format!("config key `{key}`: cannot parse `{v}`"))))
            .transpose()
    }

    fn get_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.0
            .get(key)
            .map(|v| T::from_str(v, true).map_err(|_| CliError::Config(format!("config key `{key}`: bad value `{v}`"))))
            .transpose()
    }
}

fn cost(k1: f64) -> Result<CostModel, CliError> {
    CostModel::new(k1).map_err(|e| CliError::Config(e.to_string()))
}

/// Parses `a..b`, `a..=b` or `n`; both ends inclusive.
pub fn parse_range(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Config(format!("bad index range `{s}`"));
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if lo == 0 || hi < lo || hi > MAX_CYCLE {
        return Err(CliError::Config(format!("index range {lo}..={hi} must lie within 1..={MAX_CYCLE}")));
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleConfig {
    pub n_lo: u32,
    pub n_hi: u32,
    pub k1: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl OracleConfig {
    pub fn resolve(a: &OracleArgs) -> Result<Self, CliError> {
        let file = FileValues::load(a.config.as_deref(), &["n", "k1", "out"])?;
        let range = a.n.clone().or(file.get("n")?).unwrap_or_else(|| "1..10".to_string());
        let (n_lo, n_hi) = parse_range(&range)?;
        let k1 = a.k1.or(file.get("k1")?).unwrap_or(1.0);
        cost(k1)?;
        Ok(OracleConfig { n_lo, n_hi, k1, out: a.out.clone().or(file.get("out")?) })
    }
}

/// Everything that determines the outputs of `simulate` and `tightness`.
/// The output directory and the worker count are kept out of it, so two runs
/// that differ only in those produce identical files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(skip)]
    pub command: &'static str,
    pub model: ModelArg,
    pub mode: Option<ModeArg>,
    pub i_max: u32,
    pub dt: Option<f64>,
    pub reps: u64,
    pub seed: u64,
    pub k1: f64,
    pub m_grid: Vec<f64>,
    /// Where snapshots are taken.
    pub snapshots: &'static str,
    pub dump_trace: bool,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub parallelism: usize,
}

const RUN_KEYS: &[&str] =
    &["model", "mode", "i-max", "dt", "reps", "seed", "k1", "m-grid", "out", "parallelism", "dump-trace"];

pub fn parse_m_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let grid: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad M value `{t}`"))))
        .collect::<Result<_, _>>()?;
    if grid.is_empty() || grid.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
        return Err(CliError::Config("M values must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config("M values must be strictly increasing".into()));
    }
    Ok(grid)
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl RunConfig {
    pub fn resolve(command: &'static str, a: &RunArgs) -> Result<Self, CliError> {
        let file = FileValues::load(a.config.as_deref(), RUN_KEYS)?;
        let model = a.model.or(file.get_enum("model")?).unwrap_or(ModelArg::Det);
        let mode = match model {
            ModelArg::Det => None,
            ModelArg::Sde => Some(a.mode.or(file.get_enum("mode")?).unwrap_or(ModeArg::Renewal)),
        };
        let i_max = a.i_max.or(file.get("i-max")?).unwrap_or(match mode {
            None => 20,
            Some(ModeArg::Renewal) => 20,
            Some(ModeArg::Path) => 10,
        });
        let dt = a.dt.or(file.get("dt")?).unwrap_or(1e-3);
        let reps = match model {
            ModelArg::Det => 1,
            ModelArg::Sde => a.reps.or(file.get("reps")?).unwrap_or(100),
        };
        let m_grid = match a.m_grid.clone().or(file.get("m-grid")?) {
            Some(s) => parse_m_grid(&s)?,
            None => TightnessProbe::geometric(1.0, 64.0, 2.0).expect("valid default grid"),
        };
        let k1 = a.k1.or(file.get("k1")?).unwrap_or(1.0);
        cost(k1)?;
        let parallelism = a.parallelism.or(file.get("parallelism")?).unwrap_or_else(default_parallelism);
        let cfg = RunConfig {
            command,
            model,
            mode,
            i_max,
            dt: (mode == Some(ModeArg::Path)).then_some(dt),
            reps,
            seed: a.seed.or(file.get("seed")?).unwrap_or(0),
            k1,
            m_grid,
            snapshots: "cycle boundaries: large order and end of every cycle",
            dump_trace: a.dump_trace || file.get("dump-trace")?.unwrap_or(false),
            out: a.out.clone().or(file.get("out")?).unwrap_or_else(|| PathBuf::from("out")),
            parallelism,
        };
        cfg.campaign()?.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn campaign(&self) -> Result<Campaign, CliError> {
        let engine = match self.mode {
            None => Engine::Det { i_max: self.i_max },
            Some(m) => Engine::Sde(SimConfig {
                replications: self.reps,
                dt: self.dt.unwrap_or(1e-3),
                ..SimConfig::new(
                    match m {
                        ModeArg::Renewal => Mode::Renewal,
                        ModeArg::Path => Mode::Path,
                    },
                    self.i_max,
                )
            }),
        };
        Ok(Campaign {
            engine,
            cost: cost(self.k1)?,
            checkpoints: cycle_checkpoints(self.i_max),
            radii: self.m_grid.clone(),
            seed: self.seed,
            parallelism: self.parallelism,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..10").unwrap(), (1, 10));
        assert_eq!(parse_range("2..=4").unwrap(), (2, 4));
        assert_eq!(parse_range("7").unwrap(), (7, 7));
        assert!(parse_range("0").is_err());
        assert!(parse_range("5..3").is_err());
        assert!(parse_range("1..61").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn config_text() {
        let m = parse_config("# run\nmodel = sde\ni_max=12 # trailing\n\n").unwrap();
        assert_eq!(m.get("model").map(String::as_str), Some("sde"));
        assert_eq!(m.get("i-max").map(String::as_str), Some("12"));
        assert!(parse_config("model sde").is_err());
    }

    #[test]
    fn m_grid() {
        assert_eq!(parse_m_grid("1, 4,16").unwrap(), vec![1.0, 4.0, 16.0]);
        assert!(parse_m_grid("4,1").is_err());
        assert!(parse_m_grid("0").is_err());
    }
}
