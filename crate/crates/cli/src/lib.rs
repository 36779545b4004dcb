//! Experiment runner behind the `tightbench` binary.
//!
//! ```text
//! tightbench oracle --n 1..10 --k1 1
//! tightbench simulate --model sde --mode renewal --i-max 20 --reps 100 --seed 7 --out runs/renewal
//! tightbench tightness --model det --i-max 20 --m-grid 4,16,64 --out runs/det
//! ```

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use tightbench_core::campaign::{CampaignResult, RenewalStat};
use tightbench_core::measures::{ledger_rows, occupation_rows, ordering_rows, tightness_rows, LedgerCsvRow};
use tightbench_core::model::{large_level, CostModel};
use tightbench_core::oracle::{self, Bounds, OracleReport};
use tightbench_core::trace::Checkpoint;

pub mod config;
pub mod output;

use config::{Cli, Command, OracleConfig, RunConfig};
use output::*;

pub const VERSION: &str = env!("TIGHTBENCH_VERSION");

/// Escape mass below which the occupation measures look tight.
pub const OCC_TIGHT_THRESHOLD: f64 = 0.02;
/// Escape-mass floor that signals non-tight ordering measures.
pub const ORD_FLOOR_THRESHOLD: f64 = 0.4;
/// Largest number of orders `--dump-trace` will write.
pub const MAX_DUMPED_ORDERS: u64 = 1 << 22;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<tightbench_core::Error> for CliError {
    fn from(e: tightbench_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Oracle(a) => cmd_oracle(&OracleConfig::resolve(&a)?),
        Command::Simulate(a) => cmd_simulate(&RunConfig::resolve("simulate", &a)?),
        Command::Tightness(a) => cmd_tightness(&RunConfig::resolve("tightness", &a)?),
    }
}

pub fn cmd_oracle(cfg: &OracleConfig) -> Result<(), CliError> {
    let report = OracleReport::build(cfg.n_lo..=cfg.n_hi, &CostModel::new(cfg.k1)?)?;
    let text = to_json(&report)?;
    print!("{text}");
    if let Some(dir) = &cfg.out {
        ensure_dir(dir)?;
        write_json(&dir.join("report.json"), &report)?;
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            tool: "tightbench",
            version: VERSION,
            command: "oracle",
            seed: None,
            config: cfg,
            outputs: vec![OutputFile { file: "report.json", columns: &[] }],
            volatile: vec![],
        };
        write_json(&dir.join("manifest.json"), &manifest)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct RenewalRow {
    t_label: String,
    t: f64,
    n: f64,
    n_over_t: f64,
    stderr: f64,
    sigma_over_n: Option<f64>,
    sigma_stderr: Option<f64>,
}

fn renewal_rows(stats: &[RenewalStat]) -> Vec<RenewalRow> {
    stats
        .iter()
        .map(|s| RenewalRow {
            t_label: s.at.label(),
            t: s.t.mean(),
            n: s.n.mean(),
            n_over_t: s.n_over_t.mean(),
            stderr: s.n_over_t.stderr(),
            sigma_over_n: s.sigma_over_n.map(|x| x.mean()),
            sigma_stderr: s.sigma_over_n.map(|x| x.stderr()),
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct TraceRow {
    event_time: f64,
    y: f64,
    z: f64,
    i: u32,
    j: u64,
    is_zero: bool,
}

fn dump_trace(cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
    let tr = cfg.campaign()?.trace(0)?;
    let rows: Vec<TraceRow> = tr
        .events()?
        .map(|e| TraceRow {
            event_time: e.time,
            y: e.pre_level,
            z: e.post_level,
            i: e.address.cycle(),
            j: e.address.order(),
            is_zero: e.is_zero_size(),
        })
        .collect();
    write_csv(path, TRACE_COLUMNS, &rows)
}

#[derive(Debug, Serialize)]
struct SimulateReport {
    reps: u64,
    last: LedgerCsvRow,
    renewal: RenewalSummary,
    bounds: Bounds,
    /// Closed-form values at the last cycle end (constant demand only).
    oracle: Option<DetOracle>,
}

#[derive(Debug, Serialize)]
struct RenewalSummary {
    n_over_t: f64,
    sigma_over_n: Option<f64>,
}

#[derive(Debug, Serialize)]
struct DetOracle {
    total_time: f64,
    average_cost: f64,
    diagonal_mass: f64,
}

fn start_run(cfg: &RunConfig) -> Result<(Instant, CampaignResult), CliError> {
    if cfg.dump_trace {
        let orders = (1u64 << (cfg.i_max + 1).min(63)) + cfg.i_max as u64;
        if orders > MAX_DUMPED_ORDERS {
            return Err(CliError::Config(format!(
                "--dump-trace writes at most {MAX_DUMPED_ORDERS} orders; i-max {} would produce {orders}",
                cfg.i_max
            )));
        }
    }
    ensure_dir(&cfg.out)?;
    let started = Instant::now();
    let result = cfg.campaign()?.run()?;
    Ok((started, result))
}

fn finish_run(cfg: &RunConfig, started: Instant, outputs: Vec<OutputFile>) -> Result<(), CliError> {
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        tool: "tightbench",
        version: VERSION,
        command: cfg.command,
        seed: Some(cfg.seed),
        config: cfg,
        outputs,
        volatile: vec!["timing.json"],
    };
    write_json(&cfg.out.join("manifest.json"), &manifest)?;
    let timing = Timing { wall_seconds: started.elapsed().as_secs_f64(), parallelism: cfg.parallelism };
    write_json(&cfg.out.join("timing.json"), &timing)
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let (started, res) = start_run(cfg)?;
    let dir = &cfg.out;
    let occ: Vec<_> = res
        .snapshots
        .iter()
        .filter(|s| matches!(s.at, Checkpoint::CycleEnd(_)))
        .flat_map(occupation_rows)
        .collect();
    let ord: Vec<_> = res.snapshots.iter().flat_map(ordering_rows).collect();
    let ledger = ledger_rows(&res.ledger);
    let renewal = renewal_rows(&res.renewal);
    write_csv(&dir.join("occupation.csv"), OCCUPATION_COLUMNS, &occ)?;
    write_csv(&dir.join("ordering.csv"), ORDERING_COLUMNS, &ord)?;
    write_csv(&dir.join("ledger.csv"), LEDGER_COLUMNS, &ledger)?;
    write_csv(&dir.join("renewal.csv"), RENEWAL_COLUMNS, &renewal)?;
    let mut outputs = vec![
        OutputFile { file: "occupation.csv", columns: OCCUPATION_COLUMNS },
        OutputFile { file: "ordering.csv", columns: ORDERING_COLUMNS },
        OutputFile { file: "ledger.csv", columns: LEDGER_COLUMNS },
        OutputFile { file: "renewal.csv", columns: RENEWAL_COLUMNS },
        OutputFile { file: "report.json", columns: &[] },
    ];
    if cfg.dump_trace {
        dump_trace(cfg, &dir.join("trace.csv"))?;
        outputs.push(OutputFile { file: "trace.csv", columns: TRACE_COLUMNS });
    }
    let m = CostModel::new(cfg.k1)?;
    let oracle = match cfg.mode {
        None => Some(DetOracle {
            total_time: oracle::det_total_time(cfg.i_max)?,
            average_cost: oracle::det_total_cost(cfg.i_max, &m)? / oracle::det_total_time(cfg.i_max)?,
            diagonal_mass: oracle::det_diagonal_mass(cfg.i_max)?,
        }),
        Some(_) => None,
    };
    let last_renewal = renewal.last().expect("at least one checkpoint");
    let report = SimulateReport {
        reps: res.reps,
        last: ledger.into_iter().last().expect("at least one checkpoint"),
        renewal: RenewalSummary { n_over_t: last_renewal.n_over_t, sigma_over_n: last_renewal.sigma_over_n },
        bounds: oracle::bounds(&m),
        oracle,
    };
    write_json(&dir.join("report.json"), &report)?;
    finish_run(cfg, started, outputs)
}

#[derive(Debug, Serialize)]
pub struct RadiusVerdict {
    #[serde(rename = "M")]
    pub m: f64,
    /// Mean occupation escape mass at the last cycle end.
    pub occ_escape_final: Option<f64>,
    /// Whether it is at most [`OCC_TIGHT_THRESHOLD`].
    pub occ_tight: Option<bool>,
    /// First cycle whose boundaries enter the floor estimate: the cycle after
    /// the first one whose large level exceeds `M`.
    pub ord_window_from_cycle: Option<u32>,
    /// Smallest mean ordering escape mass over those boundaries.
    pub ord_floor: Option<f64>,
    /// Whether the floor is at least [`ORD_FLOOR_THRESHOLD`].
    pub ord_non_tight: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub reps: u64,
    pub occ_threshold: f64,
    pub ord_floor_threshold: f64,
    pub radii: Vec<RadiusVerdict>,
}

pub fn verdict(res: &CampaignResult, i_max: u32) -> Verdict {
    let rows = res.probe.rows();
    let radii = res
        .probe
        .radii()
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let last_end = rows.iter().rev().find(|r| matches!(r.at, Checkpoint::CycleEnd(_)));
            let occ = last_end.and_then(|r| (r.occ[k].count() > 0).then(|| r.occ[k].mean()));
            let from = (1..=i_max).find(|&i| large_level(i) > m).map(|i| i + 1).filter(|&i| i <= i_max);
            let floor = from.and_then(|i0| {
                rows.iter()
                    .filter(|r| r.at.cycle().is_some_and(|i| i >= i0))
                    .map(|r| r.ord[k].mean())
                    .min_by(f64::total_cmp)
            });
            RadiusVerdict {
                m,
                occ_escape_final: occ,
                occ_tight: occ.map(|o| o <= OCC_TIGHT_THRESHOLD),
                ord_window_from_cycle: from,
                ord_floor: floor,
                ord_non_tight: floor.map(|f| f >= ORD_FLOOR_THRESHOLD),
            }
        })
        .collect();
    Verdict { reps: res.reps, occ_threshold: OCC_TIGHT_THRESHOLD, ord_floor_threshold: ORD_FLOOR_THRESHOLD, radii }
}

pub fn cmd_tightness(cfg: &RunConfig) -> Result<(), CliError> {
    let (started, res) = start_run(cfg)?;
    let dir = &cfg.out;
    write_csv(&dir.join("tightness.csv"), TIGHTNESS_COLUMNS, &tightness_rows(&res.probe))?;
    write_json(&dir.join("verdict.json"), &verdict(&res, cfg.i_max))?;
    let outputs = vec![
        OutputFile { file: "tightness.csv", columns: TIGHTNESS_COLUMNS },
        OutputFile { file: "verdict.json", columns: &[] },
    ];
    finish_run(cfg, started, outputs)
}
