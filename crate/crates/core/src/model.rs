//! Cost primitives, order addressing and the per-order value types shared by
//! both engines.
//!
//! Orders are addressed by `(cycle, order)`. Within cycle `i` the orders are
//! listed as
//!
//! ```text
//! order 1 ..= 2^(i-1)              unit orders, (0, 1)
//! order 2^(i-1) + 1                the large order, (0, 2^((i-1)/2))
//! order 2^(i-1) + 2 ..= 2^i + 1    zero-size orders at the large level
//! ```
//!
//! and `order == 0` (only for `cycle >= 2`) is an alias for the large order of
//! the previous cycle. Non-zero orders are also numbered consecutively from 1;
//! see [`CycleAddress::linear_index`].

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Largest cycle index any engine accepts; keeps `2^cycle` inside `u64` and
/// the cycle start times well inside the exact-integer range of `f64`.
pub const MAX_CYCLE: u32 = 60;

/// `2^e`, exact.
pub fn pow2(e: u32) -> f64 {
    2f64.powi(e as i32)
}

/// `2^(k/2)`. Even `k` is exact; odd `k` is `sqrt(2)` scaled by an exact power
/// of two, so it carries only the rounding of the `sqrt(2)` constant.
pub fn pow2_half(k: u32) -> f64 {
    if k % 2 == 0 {
        pow2(k / 2)
    } else {
        std::f64::consts::SQRT_2 * pow2(k / 2)
    }
}

/// Post-order level of the large order of `cycle`: `2^((cycle-1)/2)`.
pub fn large_level(cycle: u32) -> f64 {
    pow2_half(cycle - 1)
}

/// Number of unit orders (and of zero-size orders) in `cycle`: `2^(cycle-1)`.
pub fn unit_orders(cycle: u32) -> u64 {
    1u64 << (cycle - 1)
}

pub(crate) fn check_cycle(cycle: u32) -> Result<()> {
    if cycle == 0 || cycle > MAX_CYCLE {
        return domain(format!("cycle index {cycle} outside 1..={MAX_CYCLE}"));
    }
    Ok(())
}

/// Holding / back-order cost rate `2|x|`.
#[inline]
pub fn holding_rate(x: f64) -> f64 {
    2.0 * x.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    k1: f64,
}

impl CostModel {
    pub fn new(k1: f64) -> Result<Self> {
        if !(k1 > 0.0) || !k1.is_finite() {
            return domain(format!("fixed order cost must be positive and finite, got {k1}"));
        }
        Ok(CostModel { k1 })
    }

    /// Fixed cost charged per order, including orders of size zero.
    pub fn k1(&self) -> f64 {
        self.k1
    }
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { k1: 1.0 }
    }
}

/// Cost `k1 + (z - y)` of raising the inventory from `y` to `z`.
pub fn order_cost(y: f64, z: f64, m: &CostModel) -> Result<f64> {
    if !(y <= z) {
        return domain(format!("order from {y} to {z} has negative size"));
    }
    Ok(m.k1 + (z - y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    Unit,
    Large,
    ZeroSize,
    /// `order == 0`: the large order of the previous cycle.
    PreviousLarge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CycleAddress {
    cycle: u32,
    order: u64,
}

impl CycleAddress {
    pub fn new(cycle: u32, order: u64) -> Result<Self> {
        check_cycle(cycle)?;
        if order == 0 && cycle < 2 {
            return domain("order 0 exists only for cycles >= 2");
        }
        let last = 2 * unit_orders(cycle) + 1;
        if order > last {
            return domain(format!("cycle {cycle} has orders 0..={last}, got {order}"));
        }
        Ok(CycleAddress { cycle, order })
    }

    pub fn cycle(&self) -> u32 {
        self.cycle
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn kind(&self) -> OrderKind {
        let units = unit_orders(self.cycle);
        match self.order {
            0 => OrderKind::PreviousLarge,
            j if j <= units => OrderKind::Unit,
            j if j == units + 1 => OrderKind::Large,
            _ => OrderKind::ZeroSize,
        }
    }

    pub fn is_zero_size(&self) -> bool {
        self.kind() == OrderKind::ZeroSize
    }

    /// Position `n = 2^(i-1) + i + j - 2` of this order among the non-zero
    /// orders.
    pub fn linear_index(&self) -> Result<u64> {
        if self.is_zero_size() {
            return domain(format!(
                "({}, {}) is a zero-size order and has no position among non-zero orders",
                self.cycle, self.order
            ));
        }
        Ok(unit_orders(self.cycle) + self.cycle as u64 + self.order - 2)
    }

    /// Inverse of [`linear_index`](Self::linear_index). Returns `(1, 1)` for
    /// `n = 1` and otherwise the unique `(i, j)` with `i >= 2` and
    /// `0 <= j <= 2^(i-1)`, so large orders come back in their `j = 0` form.
    pub fn from_linear_index(n: u64) -> Result<Self> {
        if n == 0 {
            return domain("non-zero orders are numbered from 1");
        }
        if n == 1 {
            return Ok(CycleAddress { cycle: 1, order: 1 });
        }
        for cycle in 2..=MAX_CYCLE {
            let first = unit_orders(cycle) + cycle as u64 - 2;
            let last = first + unit_orders(cycle);
            if n <= last {
                return Ok(CycleAddress { cycle, order: n - first });
            }
        }
        domain(format!("order number {n} lies beyond cycle {MAX_CYCLE}"))
    }

    /// Rewrites the large order `(i, 2^(i-1)+1)` as `(i+1, 0)`; other
    /// addresses are returned unchanged.
    pub fn canonical(&self) -> Self {
        if self.kind() == OrderKind::Large && self.cycle < MAX_CYCLE {
            CycleAddress { cycle: self.cycle + 1, order: 0 }
        } else {
            *self
        }
    }
}

/// Free-function form of [`CycleAddress::linear_index`].
pub fn linear_index(a: &CycleAddress) -> Result<u64> {
    a.linear_index()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderEvent {
    pub time: f64,
    pub pre_level: f64,
    pub post_level: f64,
    pub address: CycleAddress,
}

impl OrderEvent {
    pub fn is_zero_size(&self) -> bool {
        self.post_level == self.pre_level
    }

    pub fn size(&self) -> f64 {
        self.post_level - self.pre_level
    }

    pub fn cost(&self, m: &CostModel) -> f64 {
        m.k1() + self.size()
    }
}

/// One sub-cycle: the inventory starts at `start_level` right after an order
/// and runs until it next hits zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub start_level: f64,
    pub duration: f64,
    /// Integral of the holding rate over the sub-cycle; `None` when the
    /// sampling mode does not observe the path.
    pub holding: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn holding_rate_values() {
        assert_eq!(holding_rate(0.0), 0.0);
        assert_eq!(holding_rate(3.0), 6.0);
        assert_eq!(holding_rate(-2.0), 4.0);
    }

    #[test]
    fn order_cost_values() {
        let m = CostModel::new(1.0).unwrap();
        assert_eq!(order_cost(0.0, 1.0, &m).unwrap(), 2.0);
        assert_eq!(order_cost(2.0, 2.0, &m).unwrap(), 1.0);
        assert!(order_cost(1.0, 0.0, &m).is_err());
    }

    #[test]
    fn cost_model_rejects_nonpositive_k1() {
        assert!(CostModel::new(0.0).is_err());
        assert!(CostModel::new(-1.0).is_err());
        assert!(CostModel::new(f64::NAN).is_err());
        assert_eq!(CostModel::default().k1(), 1.0);
    }

    #[test]
    fn linear_index_examples() {
        let idx = |i, j| CycleAddress::new(i, j).unwrap().linear_index().unwrap();
        assert_eq!(idx(1, 1), 1);
        assert_eq!(idx(2, 0), 2);
        assert_eq!(idx(3, 4), 9);
        // the large order of cycle 1 and its j = 0 alias share a position
        assert_eq!(idx(1, 2), idx(2, 0));
    }

    #[test]
    fn zero_size_orders_have_no_position() {
        let a = CycleAddress::new(1, 3).unwrap();
        assert!(a.is_zero_size());
        assert!(a.linear_index().is_err());
        assert!(CycleAddress::new(3, 6).unwrap().linear_index().is_err());
    }

    #[test]
    fn address_bounds() {
        assert!(CycleAddress::new(1, 0).is_err());
        assert!(CycleAddress::new(0, 1).is_err());
        assert!(CycleAddress::new(2, 6).is_err());
        assert!(CycleAddress::new(2, 5).is_ok());
        assert!(CycleAddress::new(MAX_CYCLE + 1, 1).is_err());
        assert!(CycleAddress::from_linear_index(0).is_err());
    }

    #[test]
    fn large_levels() {
        assert_eq!(large_level(1), 1.0);
        assert_eq!(large_level(3), 2.0);
        assert_eq!(large_level(5), 4.0);
        assert_eq!(large_level(2), std::f64::consts::SQRT_2);
    }

    fn canonical_address() -> impl Strategy<Value = CycleAddress> {
        (2u32..=40).prop_flat_map(|i| {
            (Just(i), 0..=unit_orders(i)).prop_map(|(i, j)| CycleAddress::new(i, j).unwrap())
        })
    }

    proptest! {
        #[test]
        fn order_cost_minus_k1_is_size(y in -1e6f64..1e6, d in 0f64..1e6, k1 in 1e-3f64..1e3) {
            let m = CostModel::new(k1).unwrap();
            let z = y + d;
            prop_assert_eq!(order_cost(y, z, &m).unwrap() - k1, (k1 + (z - y)) - k1);
            prop_assert!(order_cost(y, z, &m).unwrap() >= k1);
        }

        #[test]
        fn holding_rate_is_even(x in -1e12f64..1e12) {
            prop_assert_eq!(holding_rate(x), holding_rate(-x));
            prop_assert!(holding_rate(x) >= 0.0);
        }

        #[test]
        fn inverse_is_exact(n in 1u64..=(1u64 << 40)) {
            let a = CycleAddress::from_linear_index(n).unwrap();
            prop_assert_eq!(a.linear_index().unwrap(), n);
        }

        #[test]
        fn index_increases_lexicographically(a in canonical_address(), b in canonical_address()) {
            prop_assume!(a != b);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(lo.linear_index().unwrap() < hi.linear_index().unwrap());
        }

        #[test]
        fn large_order_alias(i in 1u32..40) {
            let large = CycleAddress::new(i, unit_orders(i) + 1).unwrap();
            let alias = large.canonical();
            prop_assert_eq!(alias, CycleAddress::new(i + 1, 0).unwrap());
            prop_assert_eq!(large.linear_index().unwrap(), alias.linear_index().unwrap());
            prop_assert_eq!(CycleAddress::from_linear_index(alias.linear_index().unwrap()).unwrap(), alias);
        }
    }
}
