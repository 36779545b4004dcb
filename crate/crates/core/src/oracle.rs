//! Closed-form values for both models.
//!
//! Everything here is a direct evaluation of a formula in `(i, j, n, k1)`;
//! engines are checked against these numbers, never the other way round.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::model::{check_cycle, large_level, pow2, pow2_half, CostModel, CycleAddress, OrderKind};

/// `1 / (sqrt(2) - 1) = sqrt(2) + 1`.
pub const INV_SQRT2_MINUS_1: f64 = 1.0 + std::f64::consts::SQRT_2;

/// `(2^(k/2) - 1) / (sqrt(2) - 1)`, the partial sum `sum_{m<k} 2^(m/2)`.
fn half_power_sum(k: u32) -> f64 {
    (pow2_half(k) - 1.0) * INV_SQRT2_MINUS_1
}

/// Length `2^(i-1) + 2^((i-1)/2)` of cycle `i` under constant demand.
pub fn det_cycle_length(i: u32) -> Result<f64> {
    check_cycle(i)?;
    Ok(pow2(i - 1) + large_level(i))
}

/// Start time of cycle `n + 1`: `2^n + (2^(n/2) - 1)/(sqrt(2) - 1) - 1`.
pub fn det_total_time(n: u32) -> Result<f64> {
    check_cycle(n)?;
    Ok(pow2(n) + half_power_sum(n) - 1.0)
}

/// `(holding, ordering)` cost of cycle `i`: `2^i` and
/// `(2 k1 + 1) 2^(i-1) + 2^((i-1)/2) + k1`.
pub fn det_cycle_costs(i: u32, m: &CostModel) -> Result<(f64, f64)> {
    check_cycle(i)?;
    let k1 = m.k1();
    Ok((pow2(i), (2.0 * k1 + 1.0) * pow2(i - 1) + large_level(i) + k1))
}

/// Total holding plus ordering cost of cycles `1..=n`:
/// `(k1 + 1) 2^(n+1) + 2^n + (2^(n/2) - 1)/(sqrt(2) - 1) + k1 n - 2 k1 - 3`.
pub fn det_total_cost(n: u32, m: &CostModel) -> Result<f64> {
    check_cycle(n)?;
    let k1 = m.k1();
    Ok((k1 + 1.0) * pow2(n + 1) + pow2(n) + half_power_sum(n) + k1 * n as f64 - 2.0 * k1 - 3.0)
}

/// Ordering-measure mass at the diagonal point `(2^((n-1)/2), 2^((n-1)/2))`
/// at the end of cycle `n`: `2^(n-1) / t_{n+1,1}`.
pub fn det_diagonal_mass(n: u32) -> Result<f64> {
    Ok(pow2(n - 1) / det_total_time(n)?)
}

fn nonzero_start_level(a: &CycleAddress) -> Result<f64> {
    match a.kind() {
        OrderKind::Unit => Ok(1.0),
        OrderKind::Large => Ok(large_level(a.cycle())),
        OrderKind::PreviousLarge => Ok(large_level(a.cycle() - 1)),
        OrderKind::ZeroSize => domain("zero-size orders do not start a sub-cycle"),
    }
}

/// Mean and variance of the sub-cycle started by the order at `a`; both equal
/// the start level `z` (first passage of `z - t + W(t)` to zero).
pub fn sde_beta_moments(a: &CycleAddress) -> Result<(f64, f64)> {
    let z = nonzero_start_level(a)?;
    Ok((z, z))
}

/// Expected holding cost `z^2 + z` of the sub-cycle started by the order at
/// `a`.
pub fn sde_cycle_holding_mean(a: &CycleAddress) -> Result<f64> {
    let z = nonzero_start_level(a)?;
    Ok(z * z + z)
}

/// Splits `n >= 2` as `n = 2^(i-1) + i + j - 2` with `i >= 2`,
/// `0 <= j <= 2^(i-1)`.
fn split(n: u64) -> Result<(u32, f64, f64)> {
    if n < 2 {
        return domain(format!("Cesaro means are tabulated for n >= 2, got {n}"));
    }
    let a = CycleAddress::from_linear_index(n)?;
    Ok((a.cycle(), a.order() as f64, n as f64))
}

/// `(1/n) sum_{k=1}^n E[beta_k]`
/// `= (2^(i-1) - 1 + (2^((i-1)/2) - 1)/(sqrt(2) - 1) + j) / n`.
pub fn sde_cesaro_interorder(n: u64) -> Result<f64> {
    let (i, j, n) = split(n)?;
    Ok((pow2(i - 1) - 1.0 + half_power_sum(i - 1) + j) / n)
}

/// `(1/n) sum_{k=1}^n E[L_k]`
/// `= (3 (2^(i-1) - 1) + (2^((i-1)/2) - 1)/(sqrt(2) - 1) + 2 j) / n`.
///
/// This is the exact Cesaro mean. It oscillates: it is close to 3 just after
/// a large sub-cycle (`j = 0`) and close to 5/2 at the end of a unit phase
/// (`j = 2^(i-1)`).
pub fn sde_cesaro_holding(n: u64) -> Result<f64> {
    let (i, j, n) = split(n)?;
    Ok((3.0 * (pow2(i - 1) - 1.0) + half_power_sum(i - 1) + 2.0 * j) / n)
}

/// Upper envelope of [`sde_cesaro_holding`] obtained by charging 3 instead
/// of 2 per unit sub-cycle of the running cycle:
/// `(3 (2^(i-1) + j) + (2^((i-1)/2) - 1)/(sqrt(2) - 1) - 3) / n`.
/// Converges to 3.
pub fn sde_cesaro_holding_bound(n: u64) -> Result<f64> {
    let (i, j, n) = split(n)?;
    Ok((3.0 * (pow2(i - 1) + j) + half_power_sum(i - 1) - 3.0) / n)
}

/// Asymptotic constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    /// Bound on the long-run average total cost under constant demand.
    pub det_total: f64,
    /// Bound on the long-run average holding cost under Brownian demand.
    pub sde_holding: f64,
    /// Bound on the long-run average ordering cost under Brownian demand.
    pub sde_ordering: f64,
    /// Level the escaping ordering mass approaches.
    pub escape_mass: f64,
}

pub fn bounds(m: &CostModel) -> Bounds {
    let k1 = m.k1();
    Bounds { det_total: 6.0 * k1 + 9.0, sde_holding: 3.0, sde_ordering: 3.0 * k1 + 2.0, escape_mass: 0.5 }
}

/// Named oracle values, serialized as one flat JSON object.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct OracleReport {
    values: BTreeMap<String, f64>,
}

impl OracleReport {
    /// Tabulates every per-index formula for `n` in `range` plus the
    /// asymptotic constants. Cesaro means start at `n = 2`.
    pub fn build(range: std::ops::RangeInclusive<u32>, m: &CostModel) -> Result<Self> {
        let (lo, hi) = (*range.start(), *range.end());
        if lo == 0 || hi < lo || hi > crate::model::MAX_CYCLE {
            return domain(format!("index range {lo}..={hi} must lie within 1..={}", crate::model::MAX_CYCLE));
        }
        let mut r = OracleReport::default();
        r.insert("k1", m.k1());
        for n in range {
            let (holding, ordering) = det_cycle_costs(n, m)?;
            r.insert(&format!("det_cycle_length[{n}]"), det_cycle_length(n)?);
            r.insert(&format!("det_total_time[{n}]"), det_total_time(n)?);
            r.insert(&format!("det_cycle_holding[{n}]"), holding);
            r.insert(&format!("det_cycle_ordering[{n}]"), ordering);
            r.insert(&format!("det_total_cost[{n}]"), det_total_cost(n, m)?);
            r.insert(&format!("det_average_cost[{n}]"), det_total_cost(n, m)? / det_total_time(n)?);
            r.insert(&format!("det_diagonal_mass[{n}]"), det_diagonal_mass(n)?);
            let z = large_level(n);
            r.insert(&format!("sde_large_beta_mean[{n}]"), z);
            r.insert(&format!("sde_large_holding_mean[{n}]"), z * z + z);
            if n >= 2 {
                let n = n as u64;
                r.insert(&format!("sde_cesaro_interorder[{n}]"), sde_cesaro_interorder(n)?);
                r.insert(&format!("sde_cesaro_holding[{n}]"), sde_cesaro_holding(n)?);
                r.insert(&format!("sde_cesaro_holding_bound[{n}]"), sde_cesaro_holding_bound(n)?);
            }
        }
        let b = bounds(m);
        r.insert("bound_det_total", b.det_total);
        r.insert("bound_sde_holding", b.sde_holding);
        r.insert("bound_sde_ordering", b.sde_ordering);
        r.insert("bound_escape_mass", b.escape_mass);
        Ok(r)
    }

    fn insert(&mut self, key: &str, v: f64) {
        self.values.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub fn values(&self) -> &BTreeMap<String, f64> {
        &self.values
    }
}
