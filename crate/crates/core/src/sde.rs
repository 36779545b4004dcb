//! Inventory driven by `X(t) = X(0) - t + W(t)`.
//!
//! Two sampling modes:
//!
//! * renewal: sub-cycle durations are drawn exactly from the first-passage
//!   law of `z - t + W(t)` to zero, an inverse Gaussian with mean `z` and
//!   shape `z^2`;
//! * path: the inventory is stepped on a grid of width `dt` with a Brownian
//!   bridge test for crossings between grid points, recording holding costs
//!   and occupancy as well.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::histogram::{BinGrid, Histogram};
use crate::model::{large_level, unit_orders, CycleRecord};
use crate::trace::{Checkpoint, CycleTrace, PhaseOccupancy, Trace, TraceKind, UnitPhase};

/// Largest cycle index simulated in renewal mode.
pub const MAX_RENEWAL_CYCLE: u32 = 40;
/// Largest cycle index simulated in path mode.
pub const MAX_PATH_CYCLE: u32 = 16;
/// Largest path step.
pub const MAX_DT: f64 = 0.01;

/// Reproducible random source for one replication: ChaCha8 keyed by `seed`,
/// with `stream` selecting one of 2^64 independent streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { rng }
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Inverse Gaussian variate with mean `mu` and shape `lambda`, by the
/// transformation method (one normal and one uniform per draw).
pub fn sample_inverse_gaussian(mu: f64, lambda: f64, rng: &mut RngStream) -> f64 {
    let v = rng.normal();
    let w = mu * v * v / (2.0 * lambda);
    // smaller root of the quadratic, written without cancellation
    let x = mu / (1.0 + w + (w * (w + 2.0)).sqrt());
    if rng.uniform() * (mu + x) <= mu {
        x
    } else {
        mu * mu / x
    }
}

/// First time `z - t + W(t)` reaches zero.
pub fn sample_first_passage(z: f64, rng: &mut RngStream) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return domain(format!("start level must be positive, got {z}"));
    }
    Ok(sample_inverse_gaussian(z, z * z, rng))
}

/// Sum of `count` independent unit first-passage times, drawn in one go:
/// the sum of `m` draws of IG(1, 1) is IG(m, m^2).
pub fn sample_unit_phase_total(count: u64, rng: &mut RngStream) -> f64 {
    let m = count as f64;
    sample_inverse_gaussian(m, m * m, rng)
}

/// Below this exponent the bridge crossing probability `exp(-q)` is under
/// 2^-53 and no uniform is drawn.
const BRIDGE_CUTOFF: f64 = 37.0;

/// Steps one sub-cycle on a grid of width `dt`, optionally recording the time
/// spent per bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSampler {
    dt: f64,
    sqrt_dt: f64,
}

impl PathSampler {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt <= MAX_DT) {
            return domain(format!("path step must lie in (0, {MAX_DT}], got {dt}"));
        }
        Ok(PathSampler { dt, sqrt_dt: dt.sqrt() })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Runs from level `z` until absorption at zero. Holding cost is the
    /// trapezoid rule on `2|X|`; each step's time goes to the bin of its
    /// midpoint.
    pub fn run(&self, z: f64, rng: &mut RngStream, mut occ: Option<&mut Histogram>) -> Result<CycleRecord> {
        if !(z > 0.0) || !z.is_finite() {
            return domain(format!("start level must be positive, got {z}"));
        }
        let dt = self.dt;
        let mut x = z;
        let mut t = 0.0;
        let mut area = 0.0;
        loop {
            let next = x - dt + self.sqrt_dt * rng.normal();
            // fraction of the step at which the path is taken to hit zero
            let hit = if next <= 0.0 {
                Some(x / (x - next))
            } else {
                let q = 2.0 * x * next / dt;
                if q < BRIDGE_CUTOFF && rng.uniform() < (-q).exp() {
                    Some(x / (x + next))
                } else {
                    None
                }
            };
            if let Some(f) = hit {
                let h = f * dt;
                t += h;
                area += x * h;
                if let Some(o) = occ.as_deref_mut() {
                    o.add_point(0.5 * x, h);
                }
                return Ok(CycleRecord { start_level: z, duration: t, holding: Some(area) });
            }
            t += dt;
            area += (x + next) * dt;
            if let Some(o) = occ.as_deref_mut() {
                o.add_point(0.5 * (x + next), dt);
            }
            x = next;
        }
    }
}

/// One path-mode sub-cycle without occupancy recording.
pub fn sample_cycle_path(z: f64, dt: f64, rng: &mut RngStream) -> Result<CycleRecord> {
    PathSampler::new(dt)?.run(z, rng, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Renewal,
    Path,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Renewal => "renewal",
            Mode::Path => "path",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub mode: Mode,
    /// Last cycle simulated.
    pub i_max: u32,
    /// Path step; ignored in renewal mode.
    pub dt: f64,
    pub replications: u64,
    /// Occupancy bin width (path mode).
    pub bin_width: f64,
    /// Renewal mode draws unit phases with more sub-cycles than this as a
    /// single total.
    pub lump_threshold: u64,
    /// Whether the zero-size orders are materialized.
    pub zero_size_orders: bool,
}

impl SimConfig {
    pub fn new(mode: Mode, i_max: u32) -> Self {
        SimConfig {
            mode,
            i_max,
            dt: 1e-3,
            replications: 1,
            bin_width: 1.0 / 16.0,
            lump_threshold: 1 << 20,
            zero_size_orders: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cap = match self.mode {
            Mode::Renewal => MAX_RENEWAL_CYCLE,
            Mode::Path => MAX_PATH_CYCLE,
        };
        if self.i_max == 0 {
            return Err(Error::Guardrail("i_max must be at least 1".into()));
        }
        if self.i_max > cap {
            return Err(Error::Guardrail(format!("{} mode runs at most {cap} cycles, got {}", self.mode.name(), self.i_max)));
        }
        if self.mode == Mode::Path && !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(Error::Guardrail(format!("dt must lie in (0, {MAX_DT}], got {}", self.dt)));
        }
        if self.replications == 0 {
            return Err(Error::Guardrail("at least one replication is required".into()));
        }
        if !(self.bin_width > 0.0) || !self.bin_width.is_finite() {
            return Err(Error::Guardrail(format!("bin width must be positive, got {}", self.bin_width)));
        }
        if self.lump_threshold == 0 {
            return Err(Error::Guardrail("lump threshold must be positive".into()));
        }
        Ok(())
    }

    /// Occupancy grid for path mode: `[0, 2 z_max + 16]`, which the path
    /// leaves only with negligible probability.
    pub fn grid(&self) -> Result<BinGrid> {
        BinGrid::covering(0.0, 2.0 * large_level(self.i_max) + 16.0, self.bin_width)
    }
}

/// Runs the policy for cycles `1..=cfg.i_max`.
pub fn simulate_policy(cfg: &SimConfig, rng: &mut RngStream) -> Result<Trace> {
    cfg.validate()?;
    let mut cycles = Vec::with_capacity(cfg.i_max as usize);
    let mut start = 0.0;
    let (grid, sampler) = match cfg.mode {
        Mode::Renewal => (None, None),
        Mode::Path => (Some(cfg.grid()?), Some(PathSampler::new(cfg.dt)?)),
    };
    for i in 1..=cfg.i_max {
        let count = unit_orders(i);
        let z = large_level(i);
        let zero = if cfg.zero_size_orders { count } else { 0 };
        let c = match (sampler, grid) {
            (Some(s), Some(g)) => {
                let mut units_occ = Histogram::new(g);
                let mut large_occ = Histogram::new(g);
                let mut durations = Vec::with_capacity(count as usize);
                let mut holdings = Vec::with_capacity(count as usize);
                for _ in 0..count {
                    let r = s.run(1.0, rng, Some(&mut units_occ))?;
                    durations.push(r.duration);
                    holdings.push(r.holding.expect("path records holding"));
                }
                let large = s.run(z, rng, Some(&mut large_occ))?;
                let occ = PhaseOccupancy { units: units_occ, large: large_occ };
                let units = UnitPhase::Sampled { durations, holdings: Some(holdings) };
                CycleTrace::new(i, start, units, large, zero, Some(occ))?
            }
            _ => {
                let units = if count > cfg.lump_threshold {
                    UnitPhase::Lumped { count, duration: sample_unit_phase_total(count, rng) }
                } else {
                    let durations = (0..count).map(|_| sample_inverse_gaussian(1.0, 1.0, rng)).collect();
                    UnitPhase::Sampled { durations, holdings: None }
                };
                let large = CycleRecord { start_level: z, duration: sample_first_passage(z, rng)?, holding: None };
                CycleTrace::new(i, start, units, large, zero, None)?
            }
        };
        start = c.end();
        cycles.push(c);
    }
    let kind = match cfg.mode {
        Mode::Renewal => TraceKind::Renewal,
        Mode::Path => TraceKind::Path,
    };
    Trace::new(kind, cycles, grid)
}

/// `(N, I, J)`: the number of non-zero orders placed by `t` and its
/// `(cycle, order)` form `N = 2^(I-1) + I + J - 2`.
pub fn renewal_counts(tr: &Trace, t: f64) -> Result<(u64, u32, u64)> {
    renewal_counts_at(tr, Checkpoint::Time(t))
}

pub fn renewal_counts_at(tr: &Trace, at: Checkpoint) -> Result<(u64, u32, u64)> {
    let cut = tr.resolve(at)?;
    let n = tr.nonzero_orders_at(&cut);
    let a = crate::model::CycleAddress::from_linear_index(n)?;
    Ok((n, a.cycle(), a.order()))
}

/// Time `sigma_n` of the last non-zero order of cycle `i` (its large order),
/// with `n = 2^i + i - 1`.
pub fn last_order_time(tr: &Trace, i: u32) -> Result<(u64, f64)> {
    let cut = tr.resolve(Checkpoint::LargeOrder(i))?;
    Ok((tr.nonzero_orders_at(&cut), cut.t))
}
