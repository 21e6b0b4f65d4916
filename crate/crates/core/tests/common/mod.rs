#![allow(dead_code)]

use itp_core::instance::{Feasibility, Interval, IntervalTpInstance, Scenario};
use rand::Rng;

fn interval<R: Rng>(rng: &mut R, lo_max: i64, max_width: i64) -> Interval {
    let lo = rng.gen_range(0..=lo_max);
    Interval::new(lo, lo + rng.gen_range(0..=max_width))
}

/// Random instance with integer data and interval widths at most
/// `max_width`, rejecting instances without a feasible scenario.
pub fn small_instance<R: Rng>(rng: &mut R, m: usize, n: usize, max_width: i64) -> IntervalTpInstance {
    loop {
        let cost = (0..m * n).map(|_| interval(rng, 9, max_width)).collect();
        let supply = (0..m).map(|_| interval(rng, 8, max_width)).collect();
        let demand = (0..n).map(|_| interval(rng, 8, max_width)).collect();
        // the constructor refuses data without a feasible scenario
        if let Ok(inst) = IntervalTpInstance::new("rand", cost, supply, demand) {
            return inst;
        }
    }
}

/// Random instance of the requested feasibility class.
pub fn instance_of_class<R: Rng>(
    rng: &mut R,
    m: usize,
    n: usize,
    max_width: i64,
    class: Feasibility,
) -> IntervalTpInstance {
    loop {
        let inst = small_instance(rng, m, n, max_width);
        if inst.classify_feasibility() == class {
            return inst;
        }
    }
}

/// Random instance with `m + n <= max_dim`.
pub fn instance_up_to<R: Rng>(rng: &mut R, max_dim: usize, max_width: i64) -> IntervalTpInstance {
    let m = rng.gen_range(1..max_dim);
    let n = rng.gen_range(1..=max_dim - m);
    small_instance(rng, m, n, max_width)
}

/// Random scenario, feasible with probability about 3/4.
pub fn scenario<R: Rng>(rng: &mut R, m: usize, n: usize) -> Scenario {
    let cost = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(0..=20)).collect())
        .collect();
    let supply: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=30)).collect();
    let mut demand: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=30)).collect();
    if rng.gen_bool(0.75) {
        // scale demand down until it fits
        while demand.iter().sum::<i64>() > supply.iter().sum::<i64>() {
            let j = demand.iter().enumerate().max_by_key(|(_, d)| **d).unwrap().0;
            demand[j] -= 1;
        }
    }
    Scenario::new(cost, supply, demand)
}
