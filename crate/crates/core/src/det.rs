//! Constant unit demand, evaluated in closed form.
//!
//! Every sub-cycle is a straight line of slope -1, so a cycle is fully
//! described by its index: `2^(i-1)` unit sub-cycles of length 1 followed by
//! one sub-cycle of length `2^((i-1)/2)`. No time stepping is involved.

use crate::error::{domain, Result};
use crate::histogram::{BinGrid, Histogram};
use crate::measures::{self, MeasureSnapshot, OrderingMeasure, RunningCost};
use crate::model::{check_cycle, large_level, unit_orders, CostModel, CycleRecord, OrderEvent};
use crate::trace::{Checkpoint, CycleTrace, Trace, TraceKind, UnitPhase};

/// Default occupancy bin width.
pub const BIN_WIDTH: f64 = 1.0 / 16.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DetSchedule {
    trace: Trace,
}

/// Orders of cycles `1..=i_max`, zero-size orders included.
pub fn build_schedule(i_max: u32) -> Result<DetSchedule> {
    check_cycle(i_max)?;
    let mut cycles = Vec::with_capacity(i_max as usize);
    let mut start = 0.0;
    for i in 1..=i_max {
        let z = large_level(i);
        let large = CycleRecord { start_level: z, duration: z, holding: Some(z * z) };
        let c = CycleTrace::new(i, start, UnitPhase::Regular { count: unit_orders(i) }, large, unit_orders(i), None)?;
        start = c.end();
        cycles.push(c);
    }
    Ok(DetSchedule { trace: Trace::new(TraceKind::Deterministic, cycles, None)? })
}

impl DetSchedule {
    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn i_max(&self) -> u32 {
        self.trace.last_cycle()
    }

    /// `t_{i,1}`; `i = i_max + 1` gives the horizon.
    pub fn cycle_start(&self, i: u32) -> Result<f64> {
        match i {
            0 => domain("cycles are numbered from 1"),
            i if i == self.i_max() + 1 => Ok(self.horizon()),
            i if i > self.i_max() => domain(format!("cycle {i} is beyond the schedule")),
            i => Ok(self.trace.cycles()[i as usize - 1].start()),
        }
    }

    pub fn cycle_length(&self, i: u32) -> Result<f64> {
        Ok(self.cycle_start(i + 1)? - self.cycle_start(i)?)
    }

    /// `(holding, ordering)` cost accumulated over cycle `i`.
    pub fn cycle_costs(&self, i: u32, m: &CostModel) -> Result<(f64, f64)> {
        let before = self.accumulated(i - 1, m)?;
        let after = self.accumulated(i, m)?;
        Ok((after.0 - before.0, after.1 - before.1))
    }

    fn accumulated(&self, i: u32, m: &CostModel) -> Result<(f64, f64)> {
        if i == 0 {
            return Ok((0.0, 0.0));
        }
        let c = self.running_cost_average(Checkpoint::CycleEnd(i), m)?;
        Ok((c.holding.unwrap_or(0.0) * c.t, c.ordering * c.t))
    }

    pub fn horizon(&self) -> f64 {
        self.trace.horizon()
    }

    /// The schedule restricted to cycles `1..=n`.
    pub fn truncated(&self, n: u32) -> Result<DetSchedule> {
        if n == 0 || n > self.i_max() {
            return domain(format!("cannot truncate to {n} cycles"));
        }
        let cycles = self.trace.cycles()[..n as usize].to_vec();
        Ok(DetSchedule { trace: Trace::new(TraceKind::Deterministic, cycles, None)? })
    }

    /// Orders of cycle `i` in time order.
    pub fn orders(&self, i: u32) -> Result<impl Iterator<Item = OrderEvent> + '_> {
        self.trace.cycle_events(i)
    }

    /// Inventory level, right-continuous at order times.
    pub fn state_at(&self, t: f64) -> Result<f64> {
        let cut = self.trace.resolve(Checkpoint::Time(t))?;
        Ok(cut.current.map_or(0.0, |p| p.level - p.elapsed))
    }

    /// Default occupancy grid: width 1/16 on `[0, 2^((i_max-1)/2)]`, with at
    /// most `max_bins` bins; anything above lands in the upper tail cell.
    pub fn default_grid(&self, max_bins: usize) -> Result<BinGrid> {
        let hi = large_level(self.i_max()).min(BIN_WIDTH * max_bins as f64);
        BinGrid::covering(0.0, hi, BIN_WIDTH)
    }

    pub fn exact_measures(&self, at: Checkpoint, grid: &BinGrid) -> Result<MeasureSnapshot> {
        measures::snapshot(&self.trace, at, Some(grid))
    }

    pub fn occupation(&self, at: Checkpoint, grid: &BinGrid) -> Result<Histogram> {
        measures::occupation_snapshot(&self.trace, at, grid)
    }

    pub fn ordering(&self, at: Checkpoint) -> Result<OrderingMeasure> {
        measures::ordering_snapshot(&self.trace, at)
    }

    /// Holding, ordering and total cost per unit time over `[0, t]`.
    pub fn running_cost_average(&self, at: Checkpoint, m: &CostModel) -> Result<RunningCost> {
        measures::running_cost(&self.trace, at, m, true)
    }
}
