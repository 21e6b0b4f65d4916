mod common;

use itp_core::instance::Scenario;
use itp_core::transport::oracle::evaluate_oracle;
use itp_core::transport::{evaluate, LpStatus};
use itp_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn flow_is_feasible(sc: &Scenario, flow: &[i64]) -> bool {
    let n = sc.n;
    let rows_ok = (0..sc.m).all(|i| flow[i * n..(i + 1) * n].iter().sum::<i64>() <= sc.supply[i]);
    let cols_ok = (0..n).all(|j| (0..sc.m).map(|i| flow[i * n + j]).sum::<i64>() == sc.demand[j]);
    rows_ok && cols_ok && flow.iter().all(|&x| x >= 0)
}

#[test]
fn kernel_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut feasible = 0;
    for _ in 0..120 {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=6);
        let sc = common::scenario(&mut rng, m, n);
        let fast = evaluate(&sc).unwrap();
        let slow = evaluate_oracle(&sc).unwrap();
        assert_eq!(fast.status, slow.status, "{sc:?}");
        assert_eq!(fast.objective, slow.objective, "{sc:?}");
        if let Some(obj) = fast.objective {
            feasible += 1;
            assert!(flow_is_feasible(&sc, &fast.flow));
            let cost: i64 = fast.flow.iter().zip(&sc.cost).map(|(x, c)| x * c).sum();
            assert_eq!(cost, obj);
            assert!(fast.duals.as_ref().unwrap().certifies(&sc, &fast.flow, obj));
        }
    }
    assert!(feasible > 60);
}

#[test]
fn degenerate_scenarios() {
    // zero supplies and demands
    let sc = Scenario::new(vec![vec![4, 2], vec![1, 8]], vec![0, 0], vec![0, 0]);
    let r = evaluate(&sc).unwrap();
    assert_eq!(r.objective, Some(0));
    // equal-cost ties everywhere
    let sc = Scenario::new(vec![vec![3, 3, 3]; 3], vec![5, 5, 5], vec![5, 5, 5]);
    assert_eq!(evaluate(&sc).unwrap().objective, Some(45));
    // a single source
    let sc = Scenario::new(vec![vec![1, 2, 3]], vec![10], vec![1, 2, 3]);
    assert_eq!(evaluate(&sc).unwrap().objective, Some(14));
}

#[test]
fn infeasible_scenario_is_reported() {
    let sc = Scenario::new(vec![vec![1], vec![1]], vec![2, 2], vec![5]);
    let r = evaluate(&sc).unwrap();
    assert_eq!(r.status, LpStatus::Infeasible);
    assert_eq!(r.objective, None);
}

#[test]
fn malformed_scenarios_are_rejected() {
    let mut sc = Scenario::new(vec![vec![1, 2]], vec![3], vec![1, 1]);
    sc.cost.pop();
    assert!(matches!(evaluate(&sc), Err(Error::DimensionMismatch(_))));
    let sc = Scenario::new(vec![vec![1]], vec![-1], vec![0]);
    assert!(matches!(evaluate(&sc), Err(Error::NegativeData(_))));
}

#[test]
fn value_is_monotone_in_supply_and_demand() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let m = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=4);
        let sc = common::scenario(&mut rng, m, n);
        let Some(base) = evaluate(&sc).unwrap().objective else {
            continue;
        };
        let mut more_supply = sc.clone();
        more_supply.supply[rng.gen_range(0..m)] += rng.gen_range(1..=5);
        assert!(evaluate(&more_supply).unwrap().objective.unwrap() <= base);
        let mut less_demand = sc.clone();
        let j = rng.gen_range(0..n);
        less_demand.demand[j] = (less_demand.demand[j] - rng.gen_range(1..=5)).max(0);
        assert!(evaluate(&less_demand).unwrap().objective.unwrap() <= base);
    }
}
