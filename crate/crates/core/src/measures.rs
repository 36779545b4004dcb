//! Occupation and ordering measures, escape masses and running costs.
//!
//! Everything is evaluated at a [`Checkpoint`]. Replications of the Brownian
//! model reach a given cycle boundary at different wall times, so snapshots
//! from different replications are merged per checkpoint and their times
//! averaged.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::histogram::{BinGrid, Histogram};
use crate::model::CostModel;
use crate::trace::{Checkpoint, Cut, Trace, TraceKind, UnitPhase};

/// Streaming mean and variance; merges with Chan's pairwise update so any
/// reduction tree gives the same moments up to rounding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Stat {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let mut s = Stat::default();
        for v in values {
            s.push(v);
        }
        s
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, o: &Stat) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two values.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// A weighted point of the ordering measure: orders from level `y` to `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderPoint {
    pub y: f64,
    pub z: f64,
    pub weight: f64,
}

fn by_coords(a: &OrderPoint, b: &OrderPoint) -> Ordering {
    a.y.total_cmp(&b.y).then(a.z.total_cmp(&b.z))
}

/// Finitely many weighted points on `{y <= z}`, kept sorted and aggregated by
/// coincident coordinates.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OrderingMeasure {
    points: Vec<OrderPoint>,
}

impl OrderingMeasure {
    pub fn from_points(points: impl IntoIterator<Item = OrderPoint>) -> Result<Self> {
        let mut points: Vec<OrderPoint> = points.into_iter().collect();
        if let Some(p) = points.iter().find(|p| !(p.y <= p.z)) {
            return domain(format!("ordering point ({}, {}) has y > z", p.y, p.z));
        }
        points.sort_by(by_coords);
        let mut out: Vec<OrderPoint> = Vec::with_capacity(points.len());
        for p in points {
            match out.last_mut() {
                Some(q) if by_coords(q, &p) == Ordering::Equal => q.weight += p.weight,
                _ => out.push(p),
            }
        }
        Ok(OrderingMeasure { points: out })
    }

    pub fn points(&self) -> &[OrderPoint] {
        &self.points
    }

    pub fn total(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    pub fn weight_at(&self, y: f64, z: f64) -> f64 {
        self.points.iter().filter(|p| p.y == y && p.z == z).map(|p| p.weight).sum()
    }

    /// Weight of points outside `[-m, m]^2`.
    pub fn mass_outside(&self, m: f64) -> f64 {
        self.points.iter().filter(|p| p.y.abs() > m || p.z.abs() > m).map(|p| p.weight).sum()
    }

    /// `self * wa + other * wb`, matching points by coordinates.
    pub fn blend(&self, wa: f64, other: &OrderingMeasure, wb: f64) -> OrderingMeasure {
        let (a, b) = (&self.points, &other.points);
        let mut out = Vec::with_capacity(a.len().max(b.len()));
        let (mut i, mut k) = (0, 0);
        while i < a.len() || k < b.len() {
            let ord = match (a.get(i), b.get(k)) {
                (Some(p), Some(q)) => by_coords(p, q),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            let p = match ord {
                Ordering::Less => {
                    i += 1;
                    OrderPoint { weight: a[i - 1].weight * wa, ..a[i - 1] }
                }
                Ordering::Greater => {
                    k += 1;
                    OrderPoint { weight: b[k - 1].weight * wb, ..b[k - 1] }
                }
                Ordering::Equal => {
                    i += 1;
                    k += 1;
                    OrderPoint { weight: a[i - 1].weight * wa + b[k - 1].weight * wb, ..a[i - 1] }
                }
            };
            out.push(p);
        }
        OrderingMeasure { points: out }
    }
}

/// Normalized occupation and ordering measures of one or more replications at
/// one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureSnapshot {
    pub at: Checkpoint,
    /// Evaluation time; the replication average after a merge.
    pub t: f64,
    /// `None` for traces that do not observe the path.
    pub occ: Option<Histogram>,
    pub ord: OrderingMeasure,
    pub reps: u64,
}

impl MeasureSnapshot {
    /// Replication-weighted average of two snapshots at the same checkpoint.
    pub fn merge(&self, other: &MeasureSnapshot) -> Result<MeasureSnapshot> {
        if self.at != other.at {
            return Err(Error::Mismatch(format!(
                "snapshots at {} and {} cannot be merged",
                self.at.label(),
                other.at.label()
            )));
        }
        let n = (self.reps + other.reps) as f64;
        let (wa, wb) = (self.reps as f64 / n, other.reps as f64 / n);
        let occ = match (&self.occ, &other.occ) {
            (Some(a), Some(b)) => Some(a.blend(wa, b, wb)?),
            (None, None) => None,
            _ => return Err(Error::Mismatch("only one snapshot carries an occupation measure".into())),
        };
        Ok(MeasureSnapshot {
            at: self.at,
            t: self.t * wa + other.t * wb,
            occ,
            ord: self.ord.blend(wa, &other.ord, wb),
            reps: self.reps + other.reps,
        })
    }
}

fn unsupported(tr: &Trace, what: &'static str) -> Error {
    Error::UnsupportedMode { mode: tr.kind().name(), what }
}

fn unresolved(cut: &Cut, why: &'static str) -> Error {
    Error::Unresolved { t: cut.t, why }
}

/// Time spent in each bin up to the cut, not normalized.
fn occupation_time(tr: &Trace, cut: &Cut, grid: &BinGrid) -> Result<Histogram> {
    let mut h = Histogram::new(*grid);
    match tr.kind() {
        TraceKind::Renewal => return Err(unsupported(tr, "occupation measure")),
        TraceKind::Path => {
            if tr.grid() != Some(grid) {
                return Err(Error::Mismatch("occupancy was recorded on a different bin grid".into()));
            }
            for c in &tr.cycles()[..cut.complete] {
                let occ = c.occupancy().expect("path traces record occupancy");
                h.add(&occ.units)?;
                h.add(&occ.large)?;
            }
            if let Some(p) = cut.current {
                let occ = tr.cycles()[p.index].occupancy().expect("path traces record occupancy");
                match (p.large_placed, p.units_placed, p.elapsed) {
                    (true, _, e) if e == 0.0 => h.add(&occ.units)?,
                    (false, 1, e) if e == 0.0 => {}
                    _ => return Err(unresolved(cut, "occupancy is recorded per phase, not per step")),
                }
            }
        }
        TraceKind::Deterministic => {
            for c in &tr.cycles()[..cut.complete] {
                let z = c.large().start_level;
                h.add_interval(0.0, 1.0, c.units().count() as f64);
                h.add_interval(0.0, z, z);
            }
            if let Some(p) = cut.current {
                let c = &tr.cycles()[p.index];
                let e = p.elapsed;
                if p.large_placed {
                    h.add_interval(0.0, 1.0, c.units().count() as f64);
                    h.add_interval(p.level - e, p.level, e);
                } else {
                    h.add_interval(0.0, 1.0, (p.units_placed - 1) as f64);
                    h.add_interval(1.0 - e, 1.0, e);
                }
            }
        }
    }
    Ok(h)
}

fn resolve_positive(tr: &Trace, at: Checkpoint) -> Result<Cut> {
    let cut = tr.resolve(at)?;
    if !(cut.t > 0.0) {
        return domain("measures are averaged over [0, t] with t > 0");
    }
    Ok(cut)
}

/// Fraction of `[0, t]` spent in each bin; total mass 1.
pub fn occupation_snapshot(tr: &Trace, at: Checkpoint, grid: &BinGrid) -> Result<Histogram> {
    let cut = resolve_positive(tr, at)?;
    let mut h = occupation_time(tr, &cut, grid)?;
    h.scale(1.0 / cut.t);
    Ok(h)
}

/// Weight `1/t` at `(pre-level, post-level)` for every order placed by `t`,
/// zero-size orders included.
pub fn ordering_snapshot(tr: &Trace, at: Checkpoint) -> Result<OrderingMeasure> {
    let cut = resolve_positive(tr, at)?;
    let w = 1.0 / cut.t;
    let mut pts = Vec::with_capacity(3 * (cut.complete + 1));
    let mut push = |y: f64, z: f64, n: u64| {
        if n > 0 {
            pts.push(OrderPoint { y, z, weight: n as f64 * w });
        }
    };
    for c in &tr.cycles()[..cut.complete] {
        let z = c.large().start_level;
        push(0.0, 1.0, c.units().count());
        push(0.0, z, 1);
        push(z, z, c.zero_orders());
    }
    if let Some(p) = cut.current {
        let c = &tr.cycles()[p.index];
        let z = c.large().start_level;
        push(0.0, 1.0, p.units_placed);
        if p.large_placed {
            push(0.0, z, 1);
            push(z, z, c.zero_orders());
        }
    }
    OrderingMeasure::from_points(pts)
}

/// Both measures at one checkpoint. The occupation measure is included when
/// the trace supports it: deterministic traces use `grid`, path traces their
/// own recorded grid, renewal traces have none.
pub fn snapshot(tr: &Trace, at: Checkpoint, grid: Option<&BinGrid>) -> Result<MeasureSnapshot> {
    let t = resolve_positive(tr, at)?.t;
    let occ = match (tr.kind(), grid) {
        (TraceKind::Renewal, _) => None,
        (TraceKind::Path, _) => Some(occupation_snapshot(tr, at, tr.grid().expect("path traces carry a grid"))?),
        (TraceKind::Deterministic, Some(g)) => Some(occupation_snapshot(tr, at, g)?),
        (TraceKind::Deterministic, None) => None,
    };
    Ok(MeasureSnapshot { at, t, occ, ord: ordering_snapshot(tr, at)?, reps: 1 })
}

/// Masses outside `[-m, m]` (occupation) and `[-m, m]^2` (ordering).
pub fn escape_mass(snap: &MeasureSnapshot, m: f64) -> Result<(Option<f64>, f64)> {
    if !(m > 0.0) {
        return domain(format!("escape radius must be positive, got {m}"));
    }
    Ok((snap.occ.as_ref().map(|h| h.mass_outside(m)), snap.ord.mass_outside(m)))
}

/// Escape masses over a grid of radii for a sequence of checkpoints, with
/// cross-replication statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessProbe {
    radii: Vec<f64>,
    rows: Vec<ProbeRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub at: Checkpoint,
    pub occ: Vec<Stat>,
    pub ord: Vec<Stat>,
}

impl TightnessProbe {
    pub fn new(radii: Vec<f64>, checkpoints: &[Checkpoint]) -> Result<Self> {
        if radii.is_empty() || radii.iter().any(|m| !(*m > 0.0)) {
            return domain("escape radii must be positive and non-empty");
        }
        let rows = checkpoints
            .iter()
            .map(|&at| ProbeRow { at, occ: vec![Stat::default(); radii.len()], ord: vec![Stat::default(); radii.len()] })
            .collect();
        Ok(TightnessProbe { radii, rows })
    }

    /// Geometric grid `lo, lo*ratio, ...` up to and including `hi`.
    pub fn geometric(lo: f64, hi: f64, ratio: f64) -> Result<Vec<f64>> {
        if !(lo > 0.0 && hi >= lo && ratio > 1.0) {
            return domain("geometric grid needs 0 < lo <= hi and ratio > 1");
        }
        let mut out = vec![lo];
        while let Some(&m) = out.last() {
            let next = m * ratio;
            if next > hi * (1.0 + 1e-12) {
                break;
            }
            out.push(next);
        }
        Ok(out)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn rows(&self) -> &[ProbeRow] {
        &self.rows
    }

    /// Records one replication's snapshot; `row` indexes the checkpoints.
    pub fn record(&mut self, row: usize, snap: &MeasureSnapshot) -> Result<()> {
        let r = &mut self.rows[row];
        if r.at != snap.at {
            return Err(Error::Mismatch(format!("probe row {} fed {}", r.at.label(), snap.at.label())));
        }
        for (k, &m) in self.radii.iter().enumerate() {
            let (occ, ord) = escape_mass(snap, m)?;
            if let Some(o) = occ {
                r.occ[k].push(o);
            }
            r.ord[k].push(ord);
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &TightnessProbe) -> Result<()> {
        if self.radii != other.radii || self.rows.len() != other.rows.len() {
            return Err(Error::Mismatch("probes cover different radii or checkpoints".into()));
        }
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            if a.at != b.at {
                return Err(Error::Mismatch("probes cover different checkpoints".into()));
            }
            for k in 0..a.occ.len() {
                a.occ[k].merge(&b.occ[k]);
                a.ord[k].merge(&b.ord[k]);
            }
        }
        Ok(())
    }
}

/// Running averages over `[0, t]` for one trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunningCost {
    pub t: f64,
    /// `None` when the trace does not observe holding costs.
    pub holding: Option<f64>,
    pub ordering: f64,
}

impl RunningCost {
    pub fn total(&self) -> Option<f64> {
        Some(self.holding? + self.ordering)
    }
}

fn ordering_cost(tr: &Trace, cut: &Cut, m: &CostModel) -> f64 {
    let k1 = m.k1();
    let large = |z: f64, zero: u64| k1 + z + zero as f64 * k1;
    let mut acc = 0.0;
    for c in &tr.cycles()[..cut.complete] {
        acc += c.units().count() as f64 * (k1 + 1.0) + large(c.large().start_level, c.zero_orders());
    }
    if let Some(p) = cut.current {
        let c = &tr.cycles()[p.index];
        acc += p.units_placed as f64 * (k1 + 1.0);
        if p.large_placed {
            acc += large(c.large().start_level, c.zero_orders());
        }
    }
    acc
}

fn holding_cost(tr: &Trace, cut: &Cut) -> Result<f64> {
    if tr.kind() == TraceKind::Renewal {
        return Err(unsupported(tr, "holding cost"));
    }
    let mut acc = 0.0;
    for c in &tr.cycles()[..cut.complete] {
        acc += c.holding().ok_or_else(|| unsupported(tr, "holding cost"))?;
    }
    let Some(p) = cut.current else { return Ok(acc) };
    let c = &tr.cycles()[p.index];
    let e = p.elapsed;
    // a straight segment of slope -1 from level a, over time e
    let linear = |a: f64| 2.0 * a * e - e * e;
    acc += match (c.units(), p.large_placed) {
        (_, true) if tr.kind() == TraceKind::Deterministic => c.unit_holding().unwrap_or(0.0) + linear(p.level),
        (UnitPhase::Regular { .. }, false) => (p.units_placed - 1) as f64 + linear(1.0),
        (_, true) if e == 0.0 => c.unit_holding().ok_or_else(|| unsupported(tr, "holding cost"))?,
        (UnitPhase::Sampled { holdings: Some(h), .. }, false) if e == 0.0 => {
            h[..(p.units_placed - 1) as usize].iter().sum()
        }
        _ => return Err(unresolved(cut, "holding costs are recorded per sub-cycle")),
    };
    Ok(acc)
}

pub fn running_cost(tr: &Trace, at: Checkpoint, m: &CostModel, with_holding: bool) -> Result<RunningCost> {
    let cut = resolve_positive(tr, at)?;
    let holding = if with_holding { Some(holding_cost(tr, &cut)? / cut.t) } else { None };
    Ok(RunningCost { t: cut.t, holding, ordering: ordering_cost(tr, &cut, m) / cut.t })
}

/// Running cost averages per checkpoint with cross-replication statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostLedger {
    rows: Vec<LedgerRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerRow {
    pub at: Checkpoint,
    pub t: Stat,
    pub holding: Option<Stat>,
    pub ordering: Stat,
    pub total: Option<Stat>,
}

impl CostLedger {
    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    pub fn merge(&mut self, other: &CostLedger) -> Result<()> {
        if self.rows.len() != other.rows.len() {
            return Err(Error::Mismatch("ledgers cover different checkpoints".into()));
        }
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            if a.at != b.at || a.holding.is_some() != b.holding.is_some() {
                return Err(Error::Mismatch("ledgers cover different checkpoints or components".into()));
            }
            a.t.merge(&b.t);
            a.ordering.merge(&b.ordering);
            if let (Some(x), Some(y)) = (a.holding.as_mut(), b.holding.as_ref()) {
                x.merge(y);
            }
            if let (Some(x), Some(y)) = (a.total.as_mut(), b.total.as_ref()) {
                x.merge(y);
            }
        }
        Ok(())
    }
}

/// Single-replication ledger. Asking for holding costs on a renewal trace
/// is an error.
pub fn cost_ledger(tr: &Trace, checkpoints: &[Checkpoint], m: &CostModel, with_holding: bool) -> Result<CostLedger> {
    let rows = checkpoints
        .iter()
        .map(|&at| {
            let c = running_cost(tr, at, m, with_holding)?;
            Ok(LedgerRow {
                at,
                t: Stat::of([c.t]),
                holding: c.holding.map(|h| Stat::of([h])),
                ordering: Stat::of([c.ordering]),
                total: c.total().map(|v| Stat::of([v])),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CostLedger { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationRow {
    pub t_label: String,
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingRow {
    pub t_label: String,
    pub y: f64,
    pub z: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessRow {
    pub t_label: String,
    #[serde(rename = "M")]
    pub m: f64,
    pub occ_escape: Option<f64>,
    pub ord_escape: f64,
    pub stderr: f64,
    pub occ_stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerCsvRow {
    pub t_label: String,
    pub t: f64,
    pub holding: Option<f64>,
    pub ordering: f64,
    pub total: Option<f64>,
    pub stderr: Option<f64>,
    pub ordering_stderr: f64,
}

/// Non-empty bins of the occupation measure, tails included with infinite
/// outer edges.
pub fn occupation_rows(snap: &MeasureSnapshot) -> Vec<OccupationRow> {
    let Some(h) = &snap.occ else { return Vec::new() };
    let label = snap.at.label();
    let g = h.grid();
    let row = |bin_lo, bin_hi, mass| OccupationRow { t_label: label.clone(), bin_lo, bin_hi, mass };
    let mut out = Vec::new();
    if h.below() != 0.0 {
        out.push(row(f64::NEG_INFINITY, g.lo(), h.below()));
    }
    for (k, &mass) in h.masses().iter().enumerate() {
        if mass != 0.0 {
            out.push(row(g.edge(k), g.edge(k + 1), mass));
        }
    }
    if h.above() != 0.0 {
        out.push(row(g.hi(), f64::INFINITY, h.above()));
    }
    out
}

pub fn ordering_rows(snap: &MeasureSnapshot) -> Vec<OrderingRow> {
    let label = snap.at.label();
    snap.ord
        .points()
        .iter()
        .map(|p| OrderingRow { t_label: label.clone(), y: p.y, z: p.z, weight: p.weight })
        .collect()
}

pub fn tightness_rows(probe: &TightnessProbe) -> Vec<TightnessRow> {
    let mut out = Vec::new();
    for r in probe.rows() {
        for (k, &m) in probe.radii().iter().enumerate() {
            let occ = (r.occ[k].count() > 0).then_some(r.occ[k]);
            out.push(TightnessRow {
                t_label: r.at.label(),
                m,
                occ_escape: occ.map(|s| s.mean()),
                ord_escape: r.ord[k].mean(),
                stderr: r.ord[k].stderr(),
                occ_stderr: occ.map(|s| s.stderr()),
            });
        }
    }
    out
}

pub fn ledger_rows(ledger: &CostLedger) -> Vec<LedgerCsvRow> {
    ledger
        .rows()
        .iter()
        .map(|r| LedgerCsvRow {
            t_label: r.at.label(),
            t: r.t.mean(),
            holding: r.holding.map(|s| s.mean()),
            ordering: r.ordering.mean(),
            total: r.total.map(|s| s.mean()),
            stderr: r.total.map(|s| s.stderr()),
            ordering_stderr: r.ordering.stderr(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn stat_merge_matches_direct() {
        let xs: Vec<f64> = (0..50).map(|k| ((k * 37) % 11) as f64 * 0.3 - 1.0).collect();
        let direct = Stat::of(xs.iter().copied());
        let mut a = Stat::of(xs[..17].iter().copied());
        a.merge(&Stat::of(xs[17..].iter().copied()));
        assert_relative_eq!(a.mean(), direct.mean(), epsilon = 1e-14);
        assert_relative_eq!(a.variance(), direct.variance(), epsilon = 1e-13);
        assert_eq!(a.count(), 50);
    }

    #[test]
    fn ordering_measure_aggregates_and_rejects_bad_points() {
        let p = |y, z, weight| OrderPoint { y, z, weight };
        let m = OrderingMeasure::from_points([p(0.0, 1.0, 0.5), p(1.0, 1.0, 0.5), p(0.0, 1.0, 0.5)]).unwrap();
        assert_eq!(m.points().len(), 2);
        assert_eq!(m.weight_at(0.0, 1.0), 1.0);
        assert!(OrderingMeasure::from_points([p(2.0, 1.0, 1.0)]).is_err());
    }

    #[test]
    fn blend_keeps_disjoint_points() {
        let p = |y, z, weight| OrderPoint { y, z, weight };
        let a = OrderingMeasure::from_points([p(0.0, 1.0, 1.0), p(3.0, 3.0, 2.0)]).unwrap();
        let b = OrderingMeasure::from_points([p(0.0, 1.0, 3.0), p(0.0, 2.0, 4.0)]).unwrap();
        let c = a.blend(0.5, &b, 0.5);
        assert_eq!(c.weight_at(0.0, 1.0), 2.0);
        assert_eq!(c.weight_at(0.0, 2.0), 2.0);
        assert_eq!(c.weight_at(3.0, 3.0), 1.0);
        assert_eq!(c.points().len(), 3);
    }

    #[test]
    fn geometric_grid() {
        assert_eq!(TightnessProbe::geometric(1.0, 64.0, 2.0).unwrap(), vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]);
        assert!(TightnessProbe::geometric(0.0, 1.0, 2.0).is_err());
    }
}
