use approx::assert_relative_eq;
use proptest::prelude::*;
use tightbench_core::det::build_schedule;
use tightbench_core::model::{large_level, CostModel, OrderKind};
use tightbench_core::oracle;
use tightbench_core::trace::Checkpoint;

const REL: f64 = 1e-12;

#[test]
fn cycle_lengths_and_times_match_closed_forms() {
    let s = build_schedule(60).unwrap();
    for i in 1..=60 {
        assert_relative_eq!(s.cycle_length(i).unwrap(), oracle::det_cycle_length(i).unwrap(), max_relative = REL);
        assert_relative_eq!(s.cycle_start(i + 1).unwrap(), oracle::det_total_time(i).unwrap(), max_relative = REL);
    }
}

#[test]
fn unit_orders_are_one_apart() {
    let s = build_schedule(8).unwrap();
    for i in 1..=8 {
        let times: Vec<f64> = s.orders(i).unwrap().filter(|e| e.address.kind() == OrderKind::Unit).map(|e| e.time).collect();
        for w in times.windows(2) {
            assert!((w[1] - w[0] - 1.0).abs() <= REL * w[1]);
        }
    }
}

#[test]
fn cycle_costs_match_closed_forms() {
    for k1 in [0.5, 1.0, 3.0] {
        let m = CostModel::new(k1).unwrap();
        let s = build_schedule(30).unwrap();
        for i in 1..=30 {
            let (h, o) = s.cycle_costs(i, &m).unwrap();
            let (oh, oo) = oracle::det_cycle_costs(i, &m).unwrap();
            assert_relative_eq!(h, oh, max_relative = REL);
            assert_relative_eq!(o, oo, max_relative = REL);
            let avg = s.running_cost_average(Checkpoint::CycleEnd(i), &m).unwrap();
            let expected = oracle::det_total_cost(i, &m).unwrap() / oracle::det_total_time(i).unwrap();
            assert_relative_eq!(avg.total().unwrap(), expected, max_relative = REL);
        }
    }
}

#[test]
fn running_average_reference_values() {
    // 50-digit values of det_total_cost(n) / det_total_time(n), k1 = 1
    let s = build_schedule(30).unwrap();
    let m = CostModel::default();
    let at = |n| s.running_cost_average(Checkpoint::CycleEnd(n), &m).unwrap().total().unwrap();
    assert_eq!(at(1), 3.5);
    assert_relative_eq!(at(2), 3.585786437626905, max_relative = REL);
    assert_relative_eq!(at(5), 4.053786361403660, max_relative = REL);
    assert_relative_eq!(at(20), 4.990619845647310, max_relative = REL);
    assert_relative_eq!(at(30), 4.999705354836650, max_relative = REL);
    for n in 1..=30 {
        assert!(at(n) <= oracle::bounds(&m).det_total);
    }
}

#[test]
fn diagonal_mass_matches_closed_form() {
    let s = build_schedule(30).unwrap();
    for n in 1..=30 {
        let z = large_level(n);
        let w = s.ordering(Checkpoint::CycleEnd(n)).unwrap().weight_at(z, z);
        assert_relative_eq!(w, oracle::det_diagonal_mass(n).unwrap(), max_relative = REL);
    }
}

#[test]
fn snapshots_are_normalized() {
    let s = build_schedule(12).unwrap();
    let grid = s.default_grid(1 << 20).unwrap();
    for n in 1..=12 {
        for at in [Checkpoint::CycleEnd(n), Checkpoint::LargeOrder(n)] {
            let snap = s.exact_measures(at, &grid).unwrap();
            assert_relative_eq!(snap.occ.as_ref().unwrap().total(), 1.0, epsilon = 1e-9);
            let cut = s.trace().resolve(at).unwrap();
            let orders = s.trace().nonzero_orders_at(&cut) as f64;
            let zero: u64 = s.trace().cycles()[..n as usize].iter().map(|c| c.zero_orders()).sum();
            assert_relative_eq!(snap.ord.total(), (orders + zero as f64) / snap.t, max_relative = 1e-12);
        }
    }
}

#[test]
fn occupation_integral_matches_holding_average() {
    // midpoint rule on 2|x| is exact per bin for uniform mass except at the
    // partially covered top bin, so the gap is at most one bin width
    let s = build_schedule(14).unwrap();
    let grid = s.default_grid(1 << 20).unwrap();
    let m = CostModel::default();
    for at in [Checkpoint::CycleEnd(14), Checkpoint::Time(1000.3), Checkpoint::LargeOrder(9)] {
        let occ = s.occupation(at, &grid).unwrap();
        let h = s.running_cost_average(at, &m).unwrap().holding.unwrap();
        assert!((occ.integrate(|x| 2.0 * x.abs()) - h).abs() <= grid.width(), "{at:?}");
    }
}

#[test]
fn truncation_keeps_prefix() {
    let s = build_schedule(10).unwrap();
    let t = s.truncated(4).unwrap();
    assert_eq!(t.i_max(), 4);
    assert_eq!(t.horizon(), s.cycle_start(5).unwrap());
    assert!(s.truncated(11).is_err());
}

proptest! {
    #[test]
    fn state_stays_within_cycle_band(u in 0f64..1.0) {
        let s = build_schedule(12).unwrap();
        let t = u * s.horizon();
        let x = s.state_at(t).unwrap();
        let cut = s.trace().resolve(Checkpoint::Time(t)).unwrap();
        let cycle = cut.current.map_or(12, |p| p.index as u32 + 1);
        prop_assert!(x >= 0.0 && x <= large_level(cycle));
    }

    #[test]
    fn state_decays_at_unit_rate_between_orders(u in 0f64..1.0, h in 1e-6f64..1e-3) {
        let s = build_schedule(10).unwrap();
        let t = u * (s.horizon() - 1e-3);
        let (a, b) = (s.state_at(t).unwrap(), s.state_at(t + h).unwrap());
        // either no order in (t, t + h] and the level fell by h, or an order
        // lifted it back up
        prop_assert!((a - b - h).abs() < 1e-9 || b > a - h);
    }

    #[test]
    fn running_total_is_sum_of_parts(u in 1e-3f64..1.0, k1 in 0.1f64..10.0) {
        let s = build_schedule(12).unwrap();
        let c = s.running_cost_average(Checkpoint::Time(u * s.horizon()), &CostModel::new(k1).unwrap()).unwrap();
        let h = c.holding.unwrap();
        prop_assert!(h >= 0.0 && c.ordering >= 0.0);
        prop_assert_eq!(c.total().unwrap(), h + c.ordering);
    }
}
