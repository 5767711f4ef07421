//! Every capacity on three states with values in {0, 1/4, 1/2, 3/4, 1} that
//! passes the verification checks is recovered exactly.

use veriobs_core::axioms::SamplingPlan;
use veriobs_core::{
    check_biseparable_grid, check_comonotonic_independence, check_critical_event_modularity, check_supermodularity,
    recover_structure, ChoquetPreference, Mode, Rational64, SetFunction, StateSpace,
};

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

#[test]
fn passing_capacities_are_recovered_exactly() {
    let space = StateSpace::new(["s", "t", "u"]).unwrap();
    let levels: Vec<Rational64> = (0..=4).map(|k| q(k, 4)).collect();
    let grid = vec![q(0, 1), q(1, 2), q(1, 1)];
    let plan = SamplingPlan::Exhaustive { grid: grid.clone() };
    let (mut monotone, mut passing) = (0, 0);
    for code in 0..5usize.pow(6) {
        let mut values = vec![q(0, 1); 8];
        let mut c = code;
        for slot in values.iter_mut().take(7).skip(1) {
            *slot = levels[c % 5];
            c /= 5;
        }
        values[7] = q(1, 1);
        let nu = SetFunction::new(space.clone(), values).unwrap();
        if !nu.is_capacity() {
            continue;
        }
        monotone += 1;
        let pref = ChoquetPreference { capacity: nu.clone() };
        if !check_supermodularity(&pref).holds || !check_critical_event_modularity(&nu, Mode::Min).holds {
            continue;
        }
        assert!(check_comonotonic_independence(&pref, &plan).unwrap().holds);
        assert!(check_biseparable_grid(&pref, &grid).unwrap().holds);
        passing += 1;
        let r = recover_structure(&nu).unwrap_or_else(|e| panic!("{:?}: {e}", nu.values()));
        assert_eq!(r.rebuilt_capacity(), nu, "{:?}", nu.values());
    }
    assert!(monotone > 0 && passing > 0);
    assert!(passing < monotone);
}
