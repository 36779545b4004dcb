//! Replication campaigns.
//!
//! Replication `r` always uses stream `r` of the campaign seed, and the
//! per-replication summaries are folded strictly in replication order, so the
//! result does not depend on how many worker threads produced them.

use rayon::prelude::*;
use serde::Serialize;

use crate::det::build_schedule;
use crate::error::{Error, Result};
use crate::histogram::BinGrid;
use crate::measures::{cost_ledger, snapshot, CostLedger, MeasureSnapshot, Stat, TightnessProbe};
use crate::model::CostModel;
use crate::sde::{last_order_time, renewal_counts_at, simulate_policy, Mode, RngStream, SimConfig};
use crate::trace::{Checkpoint, Trace};

/// Cap on deterministic occupancy bins; mass above lands in the tail cell.
pub const DET_MAX_BINS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Engine {
    Det { i_max: u32 },
    Sde(SimConfig),
}

impl Engine {
    pub fn i_max(&self) -> u32 {
        match self {
            Engine::Det { i_max } => *i_max,
            Engine::Sde(c) => c.i_max,
        }
    }

    pub fn replications(&self) -> u64 {
        match self {
            Engine::Det { .. } => 1,
            Engine::Sde(c) => c.replications,
        }
    }

    fn observes_holding(&self) -> bool {
        !matches!(self, Engine::Sde(SimConfig { mode: Mode::Renewal, .. }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub engine: Engine,
    pub cost: CostModel,
    pub checkpoints: Vec<Checkpoint>,
    pub radii: Vec<f64>,
    pub seed: u64,
    pub parallelism: usize,
}

/// Cycle-end and large-order checkpoints for cycles `1..=i_max`, in time
/// order.
pub fn cycle_checkpoints(i_max: u32) -> Vec<Checkpoint> {
    (1..=i_max).flat_map(|i| [Checkpoint::LargeOrder(i), Checkpoint::CycleEnd(i)]).collect()
}

/// Renewal statistics at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenewalStat {
    pub at: Checkpoint,
    pub t: Stat,
    /// Non-zero orders placed by `t`.
    pub n: Stat,
    pub n_over_t: Stat,
    /// `sigma_n / n` for the last non-zero order of the checkpoint's cycle.
    pub sigma_over_n: Option<Stat>,
}

impl RenewalStat {
    fn merge(&mut self, o: &RenewalStat) -> Result<()> {
        if self.at != o.at {
            return Err(Error::Mismatch("renewal rows at different checkpoints".into()));
        }
        self.t.merge(&o.t);
        self.n.merge(&o.n);
        self.n_over_t.merge(&o.n_over_t);
        if let (Some(a), Some(b)) = (self.sigma_over_n.as_mut(), o.sigma_over_n.as_ref()) {
            a.merge(b);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub reps: u64,
    pub snapshots: Vec<MeasureSnapshot>,
    pub probe: TightnessProbe,
    pub ledger: CostLedger,
    pub renewal: Vec<RenewalStat>,
}

impl CampaignResult {
    fn absorb(&mut self, o: &CampaignResult) -> Result<()> {
        for (a, b) in self.snapshots.iter_mut().zip(&o.snapshots) {
            *a = a.merge(b)?;
        }
        self.probe.merge(&o.probe)?;
        self.ledger.merge(&o.ledger)?;
        for (a, b) in self.renewal.iter_mut().zip(&o.renewal) {
            a.merge(b)?;
        }
        self.reps += o.reps;
        Ok(())
    }
}

impl Campaign {
    pub fn validate(&self) -> Result<()> {
        match &self.engine {
            Engine::Det { i_max } => crate::model::check_cycle(*i_max)?,
            Engine::Sde(c) => c.validate()?,
        }
        if self.checkpoints.is_empty() {
            return Err(Error::Guardrail("at least one checkpoint is required".into()));
        }
        if self.radii.is_empty() || self.radii.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::Guardrail("escape radii must be positive".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::Guardrail("parallelism must be at least 1".into()));
        }
        Ok(())
    }

    /// The trace of replication `rep`.
    pub fn trace(&self, rep: u64) -> Result<Trace> {
        match &self.engine {
            Engine::Det { i_max } => Ok(build_schedule(*i_max)?.trace().clone()),
            Engine::Sde(c) => simulate_policy(c, &mut RngStream::new(self.seed, rep)),
        }
    }

    fn det_grid(&self) -> Result<Option<BinGrid>> {
        match self.engine {
            Engine::Det { i_max } => Ok(Some(build_schedule(i_max)?.default_grid(DET_MAX_BINS)?)),
            Engine::Sde(_) => Ok(None),
        }
    }

    fn summarize(&self, tr: &Trace, grid: Option<&BinGrid>) -> Result<CampaignResult> {
        let mut probe = TightnessProbe::new(self.radii.clone(), &self.checkpoints)?;
        let mut snapshots = Vec::with_capacity(self.checkpoints.len());
        let mut renewal = Vec::with_capacity(self.checkpoints.len());
        for (k, &at) in self.checkpoints.iter().enumerate() {
            let snap = snapshot(tr, at, grid)?;
            probe.record(k, &snap)?;
            let (n, _, _) = renewal_counts_at(tr, at)?;
            let sigma_over_n = match at.cycle() {
                Some(i) => {
                    let (n, sigma) = last_order_time(tr, i)?;
                    Some(Stat::of([sigma / n as f64]))
                }
                None => None,
            };
            renewal.push(RenewalStat {
                at,
                t: Stat::of([snap.t]),
                n: Stat::of([n as f64]),
                n_over_t: Stat::of([n as f64 / snap.t]),
                sigma_over_n,
            });
            snapshots.push(snap);
        }
        let ledger = cost_ledger(tr, &self.checkpoints, &self.cost, self.engine.observes_holding())?;
        Ok(CampaignResult { reps: 1, snapshots, probe, ledger, renewal })
    }

    pub fn run(&self) -> Result<CampaignResult> {
        self.validate()?;
        let grid = self.det_grid()?;
        let one = |rep: u64| -> Result<CampaignResult> { self.summarize(&self.trace(rep)?, grid.as_ref()) };
        let reps = self.engine.replications();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.parallelism)
            .build()
            .map_err(|e| Error::Guardrail(format!("cannot start worker pool: {e}")))?;
        let chunk = (4 * self.parallelism as u64).max(16);
        let mut acc: Option<CampaignResult> = None;
        let mut lo = 0;
        while lo < reps {
            let hi = (lo + chunk).min(reps);
            let part: Vec<Result<CampaignResult>> = pool.install(|| (lo..hi).into_par_iter().map(one).collect());
            for r in part {
                let r = r?;
                match acc.as_mut() {
                    None => acc = Some(r),
                    Some(a) => a.absorb(&r)?,
                }
            }
            lo = hi;
        }
        Ok(acc.expect("at least one replication"))
    }
}
