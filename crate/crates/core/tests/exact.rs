mod common;

use itp_core::encoding::{decode, Configuration};
use itp_core::exact::{exact_worst, exact_worst_with, grid_oracle_worst, ExactOptions};
use itp_core::instance::{Feasibility, Interval, IntervalTpInstance};
use itp_core::transport::evaluate;
use itp_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn enumeration_matches_grid_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=3);
        let inst = common::small_instance(&mut rng, m, n, 3);
        let full = exact_worst_with(
            &inst,
            &ExactOptions {
                all_feasible_shortcut: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(full.worst_value, grid_oracle_worst(&inst).unwrap(), "{:?}", inst.to_data());
    }
}

#[test]
fn maximizer_reproduces_the_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let inst = common::instance_of_class(&mut rng, 2, 3, 4, Feasibility::Mixed);
        let r = exact_worst(&inst).unwrap();
        assert!(inst.contains(&r.worst_scenario));
        assert!(r.worst_scenario.is_balanced());
        let cfg = r.worst_config.clone().unwrap();
        let dec = decode(&inst, &cfg);
        assert!(dec.balanced);
        assert_eq!(dec.scenario, r.worst_scenario);
        assert_eq!(evaluate(&r.worst_scenario).unwrap().objective, Some(r.worst_value));
    }
}

#[test]
fn counters_cover_the_whole_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let inst = common::instance_of_class(&mut rng, 3, 2, 4, Feasibility::Mixed);
        let r = exact_worst(&inst).unwrap();
        let dim = inst.dim() as u64;
        let total = r.scenarios_examined + r.scenarios_skipped_infeasible + r.scenarios_skipped_unbalanced;
        assert_eq!(total, dim << (dim - 1));
    }
}

#[test]
fn shortcut_agrees_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let inst = common::instance_of_class(&mut rng, 2, 2, 3, Feasibility::AllScenariosFeasible);
        let fast = exact_worst(&inst).unwrap();
        assert!(fast.used_shortcut);
        let slow = exact_worst_with(
            &inst,
            &ExactOptions {
                all_feasible_shortcut: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(fast.worst_value, slow.worst_value);
    }
}

#[test]
fn rejects_instances_without_feasible_scenarios() {
    // built through the data record to get past constructor validation
    let good = IntervalTpInstance::new(
        "x",
        vec![Interval::new(1, 2)],
        vec![Interval::new(1, 2)],
        vec![Interval::new(1, 3)],
    )
    .unwrap();
    assert!(exact_worst(&good).is_ok());
    let mut data = good.to_data();
    data.demand_lo = vec![5];
    data.demand_hi = vec![6];
    assert!(IntervalTpInstance::try_from(data).is_err());
}

#[test]
fn oversized_instances_are_refused() {
    let inst = IntervalTpInstance::new(
        "big",
        vec![Interval::new(1, 2); 13 * 13],
        vec![Interval::new(1, 20); 13],
        vec![Interval::new(1, 20); 13],
    )
    .unwrap();
    assert!(matches!(
        exact_worst(&inst),
        Err(Error::InstanceTooLarge { size: 26, cap: 24 })
    ));
}

#[test]
fn exact_value_dominates_every_configuration() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let inst = common::instance_of_class(&mut rng, 2, 2, 4, Feasibility::Mixed);
    let worst = exact_worst(&inst).unwrap().worst_value;
    let mut cache = itp_core::encoding::FitnessCache::unmemoized();
    for _ in 0..200 {
        let c = Configuration::random(inst.dim(), &mut rng);
        assert!(itp_core::encoding::fitness(&inst, &c, &mut cache).unwrap() <= worst);
    }
}
