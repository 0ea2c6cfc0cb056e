mod common;

use spca::exact::{solve_exact, SolveOptions, SolveStatus};
use spca::instance::Budget;
use spca::oracle::{brute_force, DEFAULT_MAX_SUBSETS};

#[test]
fn exact_matches_enumeration_on_random_instances() {
    let opts = SolveOptions { gap_tol: 1e-6, ..Default::default() };
    for trial in 0..60u64 {
        let p = 6 + (trial as usize % 7);
        let inst = common::random_instance(p, 1000 + trial);
        for k in [2usize, 3, 5] {
            let k = Budget::new(k, p).unwrap();
            let r = solve_exact(&inst, k, &opts).unwrap();
            let o = brute_force(&inst, k, DEFAULT_MAX_SUBSETS).unwrap();
            assert_eq!(r.status, SolveStatus::Optimal);
            let rel = (r.lower_bound - o.objective).abs() / o.objective.abs().max(1e-12);
            assert!(rel <= 1e-6, "trial {trial} k {}: {} vs {}", k.get(), r.lower_bound, o.objective);
            assert!(r.upper_bound >= o.objective * (1.0 - 1e-9));
        }
    }
}

#[test]
fn disabling_gershgorin_keeps_the_optimum() {
    for trial in 0..15u64 {
        let p = 8 + (trial as usize % 4);
        let inst = common::random_instance(p, 2000 + trial);
        let k = Budget::new(3, p).unwrap();
        let on = SolveOptions { gap_tol: 1e-6, ..Default::default() };
        let off = SolveOptions { use_gershgorin: false, ..on.clone() };
        let cas = SolveOptions { use_cassini: true, ..on.clone() };
        let a = solve_exact(&inst, k, &on).unwrap();
        let b = solve_exact(&inst, k, &off).unwrap();
        let c = solve_exact(&inst, k, &cas).unwrap();
        assert!((a.lower_bound - b.lower_bound).abs() <= 1e-6 * a.lower_bound);
        assert!((a.lower_bound - c.lower_bound).abs() <= 1e-6 * a.lower_bound);
    }
}

#[test]
fn exact_is_deterministic() {
    let inst = common::random_instance(12, 77);
    let k = Budget::new(4, 12).unwrap();
    let opts = SolveOptions { gap_tol: 1e-6, ..Default::default() };
    let a = solve_exact(&inst, k, &opts).unwrap();
    let b = solve_exact(&inst, k, &opts).unwrap();
    assert_eq!(a.nodes_explored, b.nodes_explored);
    assert_eq!(a.cuts_generated, b.cuts_generated);
    assert_eq!(a.incumbent.unwrap().chosen(), b.incumbent.unwrap().chosen());
}

#[test]
fn anytime_bounds_bracket_the_optimum() {
    for trial in 0..10u64 {
        let inst = common::random_instance(12, 3000 + trial);
        let k = Budget::new(5, 12).unwrap();
        let o = brute_force(&inst, k, DEFAULT_MAX_SUBSETS).unwrap();
        for limit in [1u64, 3, 10, 30] {
            let opts = SolveOptions { gap_tol: 1e-6, node_limit: Some(limit), ..Default::default() };
            let r = solve_exact(&inst, k, &opts).unwrap();
            assert!(r.lower_bound <= o.objective * (1.0 + 1e-12));
            assert!(r.upper_bound >= o.objective * (1.0 - 1e-9));
            let inc = r.incumbent.unwrap();
            assert!((inc.objective - r.lower_bound).abs() <= 1e-12 * r.lower_bound.max(1.0));
        }
    }
}
