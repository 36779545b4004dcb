//! Realized policy paths.
//!
//! A [`Trace`] stores one record per cycle rather than one per order: the
//! zero-size orders and the order levels are fully determined by the cycle
//! index, so only sub-cycle durations (and holding costs, when observed) need
//! to be kept. Individual [`OrderEvent`]s are generated on demand.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::histogram::{BinGrid, Histogram};
use crate::model::{large_level, unit_orders, CycleAddress, CycleRecord, OrderEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    /// Constant unit demand; every sub-cycle is a straight line of slope -1.
    Deterministic,
    /// Drifted Brownian motion, sub-cycle durations only.
    Renewal,
    /// Drifted Brownian motion, discretized paths with holding costs and
    /// occupancy histograms.
    Path,
}

impl TraceKind {
    pub fn name(&self) -> &'static str {
        match self {
            TraceKind::Deterministic => "deterministic",
            TraceKind::Renewal => "renewal",
            TraceKind::Path => "path",
        }
    }
}

/// The `2^(i-1)` unit sub-cycles of Phase 1.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitPhase {
    /// Every sub-cycle lasts exactly one time unit with holding cost 1.
    Regular { count: u64 },
    /// One duration (and optionally one holding cost) per sub-cycle.
    Sampled { durations: Vec<f64>, holdings: Option<Vec<f64>> },
    /// Only the total duration is known.
    Lumped { count: u64, duration: f64 },
}

impl UnitPhase {
    pub fn count(&self) -> u64 {
        match self {
            UnitPhase::Regular { count } | UnitPhase::Lumped { count, .. } => *count,
            UnitPhase::Sampled { durations, .. } => durations.len() as u64,
        }
    }
}

/// Time spent per bin during each phase of a cycle (not normalized).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOccupancy {
    pub units: Histogram,
    pub large: Histogram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleTrace {
    cycle: u32,
    start: f64,
    units: UnitPhase,
    unit_holding: Option<f64>,
    large_order_time: f64,
    large: CycleRecord,
    zero_orders: u64,
    occupancy: Option<PhaseOccupancy>,
}

impl CycleTrace {
    pub fn new(
        cycle: u32,
        start: f64,
        units: UnitPhase,
        large: CycleRecord,
        zero_orders: u64,
        occupancy: Option<PhaseOccupancy>,
    ) -> Result<Self> {
        crate::model::check_cycle(cycle)?;
        let expected = unit_orders(cycle);
        if units.count() != expected {
            return domain(format!(
                "cycle {cycle} needs {expected} unit sub-cycles, got {}",
                units.count()
            ));
        }
        if zero_orders != 0 && zero_orders != expected {
            return domain(format!("cycle {cycle} places 0 or {expected} zero-size orders"));
        }
        if large.start_level != large_level(cycle) {
            return domain(format!("large sub-cycle of cycle {cycle} starts at the wrong level"));
        }
        if !(large.duration > 0.0) {
            return domain("sub-cycle durations must be positive");
        }
        let (large_order_time, unit_holding) = match &units {
            UnitPhase::Regular { count } => (start + *count as f64, Some(*count as f64)),
            UnitPhase::Sampled { durations, holdings } => {
                if durations.iter().any(|d| !(*d > 0.0)) {
                    return domain("sub-cycle durations must be positive");
                }
                if let Some(h) = holdings {
                    if h.len() != durations.len() {
                        return domain("one holding cost per unit sub-cycle");
                    }
                }
                let end = durations.iter().fold(start, |t, d| t + d);
                (end, holdings.as_ref().map(|h| h.iter().sum()))
            }
            UnitPhase::Lumped { duration, .. } => (start + duration, None),
        };
        Ok(CycleTrace { cycle, start, units, unit_holding, large_order_time, large, zero_orders, occupancy })
    }

    pub fn cycle(&self) -> u32 {
        self.cycle
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn units(&self) -> &UnitPhase {
        &self.units
    }

    pub fn large(&self) -> &CycleRecord {
        &self.large
    }

    pub fn zero_orders(&self) -> u64 {
        self.zero_orders
    }

    pub fn occupancy(&self) -> Option<&PhaseOccupancy> {
        self.occupancy.as_ref()
    }

    /// Time of the large order and of the zero-size orders that follow it.
    pub fn large_order_time(&self) -> f64 {
        self.large_order_time
    }

    pub fn end(&self) -> f64 {
        self.large_order_time + self.large.duration
    }

    pub fn unit_holding(&self) -> Option<f64> {
        self.unit_holding
    }

    pub fn holding(&self) -> Option<f64> {
        Some(self.unit_holding? + self.large.holding?)
    }

    /// Non-zero orders placed in the cycle.
    pub fn nonzero_orders(&self) -> u64 {
        self.units.count() + 1
    }
}

/// Where to evaluate a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Checkpoint {
    /// End of cycle `i`. Counts exactly the orders of cycles `1..=i`; the next
    /// cycle's first order, which shares this instant, is left out.
    CycleEnd(u32),
    /// Instant of the large order of cycle `i`, including it and its
    /// zero-size orders.
    LargeOrder(u32),
    /// A wall-clock time; every order placed at or before it counts.
    Time(f64),
}

impl Checkpoint {
    pub fn label(&self) -> String {
        match self {
            Checkpoint::CycleEnd(i) => format!("c{i}.end"),
            Checkpoint::LargeOrder(i) => format!("c{i}.large"),
            Checkpoint::Time(t) => format!("t={t}"),
        }
    }

    pub fn cycle(&self) -> Option<u32> {
        match self {
            Checkpoint::CycleEnd(i) | Checkpoint::LargeOrder(i) => Some(*i),
            Checkpoint::Time(_) => None,
        }
    }
}

/// A checkpoint resolved against a particular trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cut {
    pub t: f64,
    /// Number of cycles that are over by `t`.
    pub complete: usize,
    pub current: Option<PartialCycle>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialCycle {
    /// Position of the cycle in [`Trace::cycles`].
    pub index: usize,
    /// Unit orders placed by `t`.
    pub units_placed: u64,
    /// Whether the large order (and its zero-size orders) has been placed.
    pub large_placed: bool,
    /// Start level of the running sub-cycle.
    pub level: f64,
    /// Time elapsed in the running sub-cycle.
    pub elapsed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    kind: TraceKind,
    cycles: Vec<CycleTrace>,
    grid: Option<BinGrid>,
}

impl Trace {
    /// `cycles` must be numbered `1, 2, ...` with each cycle starting where
    /// the previous one ended. `grid` is the bin grid of the recorded
    /// occupancy histograms, if any.
    pub fn new(kind: TraceKind, cycles: Vec<CycleTrace>, grid: Option<BinGrid>) -> Result<Self> {
        if cycles.is_empty() {
            return domain("a trace holds at least one cycle");
        }
        if cycles[0].start != 0.0 {
            return domain("the first order is placed at time 0");
        }
        for (k, c) in cycles.iter().enumerate() {
            if c.cycle as usize != k + 1 {
                return domain("cycles must be numbered consecutively from 1");
            }
            if k > 0 && c.start != cycles[k - 1].end() {
                return domain(format!("cycle {} does not start where cycle {k} ends", k + 1));
            }
            if c.occupancy.is_some() != grid.is_some() {
                return domain("occupancy histograms must be recorded for all cycles or none");
            }
            if let (Some(g), Some(occ)) = (&grid, &c.occupancy) {
                if occ.units.grid() != g || occ.large.grid() != g {
                    return domain("occupancy histograms must share the trace grid");
                }
            }
        }
        Ok(Trace { kind, cycles, grid })
    }

    pub fn kind(&self) -> TraceKind {
        self.kind
    }

    pub fn cycles(&self) -> &[CycleTrace] {
        &self.cycles
    }

    pub fn grid(&self) -> Option<&BinGrid> {
        self.grid.as_ref()
    }

    pub fn last_cycle(&self) -> u32 {
        self.cycles.len() as u32
    }

    pub fn horizon(&self) -> f64 {
        self.cycles.last().map_or(0.0, CycleTrace::end)
    }

    pub fn nonzero_orders(&self) -> u64 {
        self.cycles.iter().map(CycleTrace::nonzero_orders).sum()
    }

    /// Times `sigma_1, sigma_2, ...` of the non-zero orders.
    pub fn order_times(&self) -> Result<Vec<f64>> {
        self.require_unlumped("order times")?;
        Ok(self
            .events()?
            .filter(|e| !e.address.is_zero_size())
            .map(|e| e.time)
            .collect())
    }

    /// All orders in time order; simultaneous orders follow their address.
    pub fn events(&self) -> Result<Events<'_>> {
        self.require_unlumped("individual orders")?;
        Ok(Events { cycles: &self.cycles, ci: 0, j: 1, clock: 0.0 })
    }

    /// The orders of cycle `i` alone.
    pub fn cycle_events(&self, i: u32) -> Result<Events<'_>> {
        self.require_unlumped("individual orders")?;
        if i == 0 || i > self.last_cycle() {
            return domain(format!("cycle {i} is not in this trace (1..={})", self.last_cycle()));
        }
        let k = i as usize - 1;
        Ok(Events { cycles: &self.cycles[k..=k], ci: 0, j: 1, clock: 0.0 })
    }

    /// One record per non-zero order, in order.
    pub fn sub_cycles(&self) -> Result<Vec<CycleRecord>> {
        self.require_unlumped("individual sub-cycles")?;
        let mut out = Vec::with_capacity(self.nonzero_orders() as usize);
        for c in &self.cycles {
            match &c.units {
                UnitPhase::Regular { count } => out.extend((0..*count).map(|_| CycleRecord {
                    start_level: 1.0,
                    duration: 1.0,
                    holding: Some(1.0),
                })),
                UnitPhase::Sampled { durations, holdings } => {
                    out.extend(durations.iter().enumerate().map(|(k, &d)| CycleRecord {
                        start_level: 1.0,
                        duration: d,
                        holding: holdings.as_ref().map(|h| h[k]),
                    }))
                }
                UnitPhase::Lumped { .. } => unreachable!(),
            }
            out.push(c.large);
        }
        Ok(out)
    }

    fn require_unlumped(&self, what: &'static str) -> Result<()> {
        if self.cycles.iter().any(|c| matches!(c.units, UnitPhase::Lumped { .. })) {
            return Err(Error::UnsupportedMode { mode: "aggregated", what });
        }
        Ok(())
    }

    pub fn resolve(&self, at: Checkpoint) -> Result<Cut> {
        let last = self.cycles.len() as u32;
        match at {
            Checkpoint::CycleEnd(i) => {
                if i == 0 || i > last {
                    return domain(format!("cycle {i} is not in this trace (1..={last})"));
                }
                Ok(Cut { t: self.cycles[i as usize - 1].end(), complete: i as usize, current: None })
            }
            Checkpoint::LargeOrder(i) => {
                if i == 0 || i > last {
                    return domain(format!("cycle {i} is not in this trace (1..={last})"));
                }
                let c = &self.cycles[i as usize - 1];
                Ok(Cut {
                    t: c.large_order_time,
                    complete: i as usize - 1,
                    current: Some(PartialCycle {
                        index: i as usize - 1,
                        units_placed: c.units.count(),
                        large_placed: true,
                        level: c.large.start_level,
                        elapsed: 0.0,
                    }),
                })
            }
            Checkpoint::Time(t) => self.resolve_time(t),
        }
    }

    fn resolve_time(&self, t: f64) -> Result<Cut> {
        let horizon = self.horizon();
        if !(t >= 0.0) || t > horizon {
            return domain(format!("time {t} outside [0, {horizon}]"));
        }
        if t == horizon {
            return Ok(Cut { t, complete: self.cycles.len(), current: None });
        }
        // first cycle whose end lies strictly after t
        let index = self.cycles.partition_point(|c| c.end() <= t);
        let c = &self.cycles[index];
        let current = if t >= c.large_order_time {
            PartialCycle {
                index,
                units_placed: c.units.count(),
                large_placed: true,
                level: c.large.start_level,
                elapsed: t - c.large_order_time,
            }
        } else {
            let (units_placed, elapsed) = match &c.units {
                UnitPhase::Regular { count } => {
                    let k = ((t - c.start).floor() as u64 + 1).min(*count);
                    (k, t - (c.start + (k - 1) as f64))
                }
                UnitPhase::Sampled { durations, .. } => {
                    let mut clock = c.start;
                    let mut k = 1u64;
                    for d in durations {
                        let next = clock + d;
                        if next > t {
                            break;
                        }
                        clock = next;
                        k += 1;
                    }
                    (k, t - clock)
                }
                UnitPhase::Lumped { .. } => {
                    if t != c.start {
                        return Err(Error::Unresolved {
                            t,
                            why: "inside a phase whose sub-cycles were sampled in aggregate",
                        });
                    }
                    (1, 0.0)
                }
            };
            PartialCycle { index, units_placed, large_placed: false, level: 1.0, elapsed }
        };
        Ok(Cut { t, complete: index, current: Some(current) })
    }

    /// Non-zero orders placed by the cut.
    pub fn nonzero_orders_at(&self, cut: &Cut) -> u64 {
        let done: u64 = self.cycles[..cut.complete].iter().map(CycleTrace::nonzero_orders).sum();
        done + cut.current.map_or(0, |p| p.units_placed + p.large_placed as u64)
    }
}

/// Iterator over every order of a trace, zero-size orders included.
pub struct Events<'a> {
    cycles: &'a [CycleTrace],
    ci: usize,
    j: u64,
    clock: f64,
}

impl Iterator for Events<'_> {
    type Item = OrderEvent;

    fn next(&mut self) -> Option<OrderEvent> {
        let c = self.cycles.get(self.ci)?;
        let units = c.units.count();
        let z = c.large.start_level;
        if self.j == 1 {
            self.clock = c.start;
        }
        let j = self.j;
        let event = if j <= units {
            let time = match &c.units {
                UnitPhase::Regular { .. } => c.start + (j - 1) as f64,
                UnitPhase::Sampled { durations, .. } => {
                    let time = self.clock;
                    self.clock += durations[(j - 1) as usize];
                    time
                }
                UnitPhase::Lumped { .. } => unreachable!("checked by Trace::events"),
            };
            OrderEvent { time, pre_level: 0.0, post_level: 1.0, address: addr(c.cycle, j) }
        } else if j == units + 1 {
            OrderEvent { time: c.large_order_time, pre_level: 0.0, post_level: z, address: addr(c.cycle, j) }
        } else {
            OrderEvent { time: c.large_order_time, pre_level: z, post_level: z, address: addr(c.cycle, j) }
        };
        if j >= units + 1 + c.zero_orders {
            self.ci += 1;
            self.j = 1;
        } else {
            self.j += 1;
        }
        Some(event)
    }
}

fn addr(cycle: u32, order: u64) -> CycleAddress {
    CycleAddress::new(cycle, order).expect("trace cycles hold valid addresses")
}
