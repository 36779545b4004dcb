//! One test per acceptance criterion. Each prints a single
//! `[criterion N] PASS|FAIL ...` line to stderr and then asserts.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use tightbench_core::campaign::{cycle_checkpoints, Campaign, CampaignResult, Engine};
use tightbench_core::det::build_schedule;
use tightbench_core::measures::Stat;
use tightbench_core::model::{large_level, CostModel, CycleAddress};
use tightbench_core::oracle;
use tightbench_core::sde::{
    last_order_time, renewal_counts_at, sample_cycle_path, sample_first_passage, simulate_policy, Mode, RngStream,
    SimConfig,
};
use tightbench_core::trace::Checkpoint;

fn report(n: u32, pass: bool, details: &str, elapsed: Duration, budget: Duration) -> bool {
    let in_budget = elapsed <= budget;
    let ok = pass && in_budget;
    let verdict = if ok { "PASS" } else { "FAIL" };
    let line = format!(
        "[criterion {n}] {verdict} {details}; runtime {:.2}s (budget {}s{})\n",
        elapsed.as_secs_f64(),
        budget.as_secs(),
        if in_budget { "" } else { ", exceeded" }
    );
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    ok
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

#[test]
fn criterion_01_det_oracle_equivalence() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for k1 in [1.0, 2.5] {
        let m = CostModel::new(k1).unwrap();
        let s = build_schedule(30).unwrap();
        for n in 1..=30 {
            let z = large_level(n);
            let (h, o) = s.cycle_costs(n, &m).unwrap();
            let (oh, oo) = oracle::det_cycle_costs(n, &m).unwrap();
            let explicit_h = 2f64.powi(n as i32);
            let explicit_o = (2.0 * k1 + 1.0) * 2f64.powi(n as i32 - 1) + z + k1;
            let diag = s.ordering(Checkpoint::CycleEnd(n)).unwrap().weight_at(z, z);
            for (a, b) in [
                (s.cycle_length(n).unwrap(), oracle::det_cycle_length(n).unwrap()),
                (s.cycle_start(n + 1).unwrap(), oracle::det_total_time(n).unwrap()),
                (h, oh),
                (h, explicit_h),
                (o, oo),
                (o, explicit_o),
                (diag, oracle::det_diagonal_mass(n).unwrap()),
            ] {
                worst = worst.max(rel(a, b));
                checked += 1;
            }
        }
    }
    let pass = worst <= 1e-12;
    let details = format!("{checked} comparisons for n=1..30, k1 in {{1, 2.5}}; worst relative error {worst:.3e} (tol 1e-12)");
    assert!(report(1, pass, &details, t0.elapsed(), Duration::from_secs(1)));
}

#[test]
fn criterion_02_det_cost_bound() {
    let t0 = Instant::now();
    let m = CostModel::default();
    let s = build_schedule(30).unwrap();
    let mut worst = (0, 0.0f64);
    for n in 1..=30 {
        let total = s.running_cost_average(Checkpoint::CycleEnd(n), &m).unwrap().total().unwrap();
        if total > worst.1 {
            worst = (n, total);
        }
    }
    let bound = oracle::bounds(&m).det_total;
    let pass = worst.1 <= bound;
    let details = format!("max running average cost over n<=30 is {:.6} at n={} (bound {bound})", worst.1, worst.0);
    assert!(report(2, pass, &details, t0.elapsed(), Duration::from_secs(1)));
}

#[test]
fn criterion_03_det_non_tightness() {
    let t0 = Instant::now();
    let s = build_schedule(30).unwrap();
    let mut least = (0, f64::INFINITY);
    for n in 11..=30 {
        let e = s.ordering(Checkpoint::CycleEnd(n)).unwrap().mass_outside(16.0);
        if e < least.1 {
            least = (n, e);
        }
    }
    let pass = least.1 > 0.45;
    let details = format!("min ord_escape(M=16) over 11<=n<=30 is {:.6} at n={} (threshold > 0.45)", least.1, least.0);
    assert!(report(3, pass, &details, t0.elapsed(), Duration::from_secs(1)));
}

#[test]
fn criterion_04_first_passage_moments() {
    let t0 = Instant::now();
    let n = 1_000_000;
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, z) in [1.0, 2.0, 4.0].into_iter().enumerate() {
        let mut rng = RngStream::new(1, k as u64);
        let s = Stat::of((0..n).map(|_| sample_first_passage(z, &mut rng).unwrap()));
        let se_dev = (s.mean() - z).abs() / s.stderr();
        let var_dev = rel(s.variance(), z);
        pass &= se_dev <= 3.0 && var_dev <= 0.015;
        parts.push(format!("z={z}: mean {:.5} ({se_dev:.2} se), var {:.5} ({:.2}%)", s.mean(), s.variance(), 100.0 * var_dev));
    }
    let details = format!("{n} samples each; {}", parts.join(", "));
    assert!(report(4, pass, &details, t0.elapsed(), Duration::from_secs(10)));
}

fn mean_holding(z: f64, dt: f64, cycles: u64, stream: u64) -> Stat {
    let mut rng = RngStream::new(1, stream);
    Stat::of((0..cycles).map(|_| sample_cycle_path(z, dt, &mut rng).unwrap().holding.unwrap()))
}

#[test]
fn criterion_05_path_holding_mean() {
    let t0 = Instant::now();
    let cycles = 100_000;
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, z) in [1.0, 2.0].into_iter().enumerate() {
        let target = z * z + z;
        let coarse = mean_holding(z, 1e-3, cycles, k as u64);
        let fine = mean_holding(z, 5e-4, cycles, k as u64);
        let within = rel(coarse.mean(), target) <= 0.03;
        let toward = (fine.mean() - target).abs() < (coarse.mean() - target).abs();
        pass &= within && toward;
        parts.push(format!(
            "z={z}: L {:.4} +- {:.4} vs {target} ({:.2}%), dt/2 gives {:.4} ({})",
            coarse.mean(),
            coarse.stderr(),
            100.0 * rel(coarse.mean(), target),
            fine.mean(),
            if toward { "closer" } else { "not closer" }
        ));
    }
    let details = format!("{cycles} cycles at dt=1e-3; {}", parts.join(", "));
    assert!(report(5, pass, &details, t0.elapsed(), Duration::from_secs(120)));
}

#[test]
fn criterion_06_renewal_limits() {
    let t0 = Instant::now();
    let cfg = SimConfig::new(Mode::Renewal, 20);
    let mut inside = 0;
    let mut rate = Stat::default();
    for seed in 0..100 {
        let tr = simulate_policy(&cfg, &mut RngStream::new(seed, 0)).unwrap();
        let (n, sigma) = last_order_time(&tr, 20).unwrap();
        if (0.9..=1.1).contains(&(sigma / n as f64)) {
            inside += 1;
        }
        let end = Checkpoint::CycleEnd(20);
        let (count, _, _) = renewal_counts_at(&tr, end).unwrap();
        rate.push(count as f64 / tr.resolve(end).unwrap().t);
    }
    let pass = inside >= 95 && rel(rate.mean(), 1.0) <= 0.1;
    let details = format!(
        "sigma_n/n in [0.9, 1.1] for {inside}/100 seeds (need 95); mean N(t)/t {:.5} +- {:.5} (within 10% of 1)",
        rate.mean(),
        rate.stderr()
    );
    assert!(report(6, pass, &details, t0.elapsed(), Duration::from_secs(60)));
}

#[test]
fn criterion_07_cesaro_means() {
    let t0 = Instant::now();
    let n_max: u64 = 1 << 24;
    let (mut beta, mut hold) = (0.0f64, 0.0f64);
    let mut worst = 0.0f64;
    for k in 1..=n_max {
        let a = CycleAddress::from_linear_index(k).unwrap();
        beta += oracle::sde_beta_moments(&a).unwrap().0;
        hold += oracle::sde_cycle_holding_mean(&a).unwrap();
        if k >= 2 {
            let n = k as f64;
            worst = worst
                .max(rel(beta / n, oracle::sde_cesaro_interorder(k).unwrap()))
                .max(rel(hold / n, oracle::sde_cesaro_holding(k).unwrap()));
        }
    }
    let (cb, cl) = (beta / n_max as f64, hold / n_max as f64);
    let match_ok = worst <= 1e-10;
    let beta_ok = (cb - 1.0).abs() <= 2e-2;
    let hold_ok = (cl - 3.0).abs() <= 2e-2;
    let bound = oracle::sde_cesaro_holding_bound(n_max).unwrap();
    // n = 2^23 + 22 is i = 24, j = 0, where the exact mean peaks
    let peak = oracle::sde_cesaro_holding((1 << 23) + 22).unwrap();
    let details = format!(
        "closed forms match to {worst:.3e} (tol 1e-10) for n<=2^24; at n=2^24 interorder mean {cb:.6} ({}), \
         holding mean {cl:.6} vs 3 ({}); holding upper envelope {bound:.6}, cycle-24 peak {peak:.6}",
        if beta_ok { "within 2e-2 of 1" } else { "not within 2e-2 of 1" },
        if hold_ok { "within 2e-2" } else { "not within 2e-2" }
    );
    let pass = match_ok && beta_ok && hold_ok;
    assert!(report(7, pass, &details, t0.elapsed(), Duration::from_secs(30)));
}

fn path_campaign() -> &'static (CampaignResult, Duration) {
    static CELL: OnceLock<(CampaignResult, Duration)> = OnceLock::new();
    CELL.get_or_init(|| {
        let t0 = Instant::now();
        let mut cfg = SimConfig::new(Mode::Path, 12);
        cfg.replications = 200;
        let c = Campaign {
            engine: Engine::Sde(cfg),
            cost: CostModel::default(),
            checkpoints: cycle_checkpoints(12),
            radii: vec![16.0, 64.0],
            seed: 1,
            parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        (c.run().unwrap(), t0.elapsed())
    })
}

#[test]
fn criterion_08_path_holding_average() {
    let t0 = Instant::now();
    let (res, _) = path_campaign();
    let row = res.ledger.rows().iter().find(|r| r.at == Checkpoint::CycleEnd(12)).unwrap();
    let h = row.holding.unwrap();
    let pass = (2.3..=3.2).contains(&h.mean());
    let details = format!("{} reps, mean holding average at c12.end {:.4} +- {:.4} (range [2.3, 3.2])", res.reps, h.mean(), h.stderr());
    assert!(report(8, pass, &details, t0.elapsed(), Duration::from_secs(900)));
}

#[test]
fn criterion_09_sde_ordering_and_tightness() {
    let t0 = Instant::now();
    let mut cfg = SimConfig::new(Mode::Renewal, 20);
    cfg.replications = 200;
    let c = Campaign {
        engine: Engine::Sde(cfg),
        cost: CostModel::new(1.0).unwrap(),
        checkpoints: cycle_checkpoints(20),
        radii: vec![16.0],
        seed: 1,
        parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let res = c.run().unwrap();
    let last = res.ledger.rows().iter().find(|r| r.at == Checkpoint::CycleEnd(20)).unwrap();
    let ordering = last.ordering.mean();
    let floor = res
        .probe
        .rows()
        .iter()
        .filter(|r| r.at.cycle().is_some_and(|i| i >= 12))
        .map(|r| r.ord[0].mean())
        .fold(f64::INFINITY, f64::min);

    let (path, _) = path_campaign();
    let occ = path
        .probe
        .rows()
        .iter()
        .filter(|r| matches!(r.at, Checkpoint::CycleEnd(_)))
        .map(|r| r.occ[1].mean())
        .fold(0.0, f64::max);

    let pass = ordering <= 5.3 && floor >= 0.4 && occ <= 0.02;
    let details = format!(
        "renewal: mean ordering average at c20.end {ordering:.4} (<= 5.3), min mean ord_escape(M=16) over cycles >= 12 \
         {floor:.4} (>= 0.4); path: max mean occ_escape(M=64) over cycle ends {occ:.3e} (<= 0.02)"
    );
    assert!(report(9, pass, &details, t0.elapsed(), Duration::from_secs(300)));
}

fn run_cli(args: &[&str], out: Option<&Path>) -> Vec<u8> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tightbench"));
    cmd.args(args);
    if let Some(o) = out {
        cmd.arg("--out").arg(o);
    }
    let res = cmd.output().unwrap();
    assert!(res.status.success(), "{args:?}: {}", String::from_utf8_lossy(&res.stderr));
    res.stdout
}

/// Files of `dir` except the volatile timing sidecar, by name.
fn snapshot_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "timing.json")
        .map(|e| (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_10_reproducibility() {
    let t0 = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["oracle", "--n", "1..40", "--k1", "1.5"],
        &["simulate", "--model", "det", "--i-max", "18", "--dump-trace"],
        &["simulate", "--model", "sde", "--mode", "renewal", "--i-max", "16", "--reps", "40", "--seed", "3"],
        &["simulate", "--model", "sde", "--mode", "path", "--i-max", "6", "--reps", "24", "--seed", "3", "--dump-trace"],
        &["tightness", "--model", "det", "--i-max", "20"],
        &["tightness", "--model", "sde", "--mode", "renewal", "--i-max", "16", "--reps", "40", "--seed", "5"],
        &["tightness", "--model", "sde", "--mode", "path", "--i-max", "6", "--reps", "24", "--seed", "5"],
    ];
    let mut failures = Vec::new();
    let mut files = 0;
    for (k, args) in cases.iter().enumerate() {
        let mut runs = Vec::new();
        for (r, par) in ["1", "1", "4"].iter().enumerate() {
            let dir = tmp.path().join(format!("{k}-{r}"));
            let mut full = args.to_vec();
            if args[0] != "oracle" {
                full.extend(["--parallelism", par]);
            }
            let stdout = run_cli(&full, Some(&dir));
            runs.push((stdout, snapshot_dir(&dir)));
        }
        files += runs[0].1.len();
        if runs[0] != runs[1] {
            failures.push(format!("{} differs between identical runs", args.join(" ")));
        }
        if runs[0] != runs[2] {
            failures.push(format!("{} differs between parallelism 1 and 4", args.join(" ")));
        }
    }
    let pass = failures.is_empty();
    let details = if pass {
        format!("{} configurations, {files} output files plus stdout byte-identical across repeat runs and parallelism 1 vs 4", cases.len())
    } else {
        failures.join("; ")
    };
    assert!(report(10, pass, &details, t0.elapsed(), Duration::from_secs(60)));
}
