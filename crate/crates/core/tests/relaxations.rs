mod common;

use nalgebra::{DMatrix, DVector};
use spca::conic::SolverSettings;
use spca::instance::{Budget, Instance, Source};
use spca::linalg::sym_eig_unchecked;
use spca::oracle::{brute_force, DEFAULT_MAX_SUBSETS};
use spca::relax::{solve_relaxation, PsdMode, RelaxationKind, RelaxationResult, RelaxationTag};
use spca::rounding::{greedy_round, gw_round};

fn solve(inst: &Instance, k: usize, tag: RelaxationTag, mode: PsdMode) -> RelaxationResult {
    let k = Budget::new(k, inst.p()).unwrap();
    solve_relaxation(inst, k, RelaxationKind::new(tag, mode), &SolverSettings::default()).unwrap()
}

fn second_eigenvalue(x: &DMatrix<f64>) -> f64 {
    let vals = sym_eig_unchecked(x).values;
    vals[vals.len() - 2]
}

#[test]
fn weak_dominates_strong_dominates_oracle() {
    for trial in 0..15u64 {
        let p = 6 + (trial as usize % 5);
        let inst = common::random_instance(p, 4000 + trial);
        for k in [2usize, 3, 5] {
            let opt = brute_force(&inst, Budget::new(k, p).unwrap(), DEFAULT_MAX_SUBSETS).unwrap().objective;
            let weak = solve(&inst, k, RelaxationTag::Weak, PsdMode::Exact);
            let strong = solve(&inst, k, RelaxationTag::Strong, PsdMode::Exact);
            let minors = solve(&inst, k, RelaxationTag::StrongMinors, PsdMode::MinorsOnly);
            assert!(weak.upper_bound >= strong.upper_bound - 1e-5, "trial {trial} k {k}: {} < {}", weak.upper_bound, strong.upper_bound);
            assert!(strong.upper_bound >= opt - 1e-5, "trial {trial} k {k}: {} < {opt}", strong.upper_bound);
            assert!(minors.upper_bound >= strong.upper_bound - 1e-5, "trial {trial} k {k}");

            let rounded = greedy_round(&inst, Budget::new(k, p).unwrap(), &strong.z_frac);
            assert!(rounded.objective <= opt + 1e-9);
            assert!(rounded.objective <= strong.upper_bound + 1e-6);
        }
    }
}

#[test]
fn minors_only_is_looser_than_exact_cone() {
    for trial in 0..10u64 {
        let p = 6 + (trial as usize % 5);
        let inst = common::random_instance(p, 4100 + trial);
        for tag in [RelaxationTag::Weak, RelaxationTag::Strong] {
            let exact = solve(&inst, 3, tag, PsdMode::Exact);
            let minors = solve(&inst, 3, tag, PsdMode::MinorsOnly);
            assert!(minors.upper_bound >= exact.upper_bound - 1e-5, "trial {trial} {tag}");
        }
    }
}

#[test]
fn cut_rounds_never_raise_the_bound() {
    let settings = SolverSettings::default();
    for trial in 0..100u64 {
        let inst = common::random_instance(8, 500 + trial);
        let k = Budget::new(2 + trial as usize % 3, 8).unwrap();
        let kind = RelaxationKind::new(RelaxationTag::Strong, PsdMode::MinorsPlusCuts(10));
        let r = solve_relaxation(&inst, k, kind, &settings).unwrap();
        assert_eq!(r.round_bounds.len(), r.cuts_added + 1);
        for w in r.round_bounds.windows(2) {
            // each round is solved to `tol`, so allow that much drift
            assert!(w[1] <= w[0] + 10.0 * settings.tol * w[0].abs(), "trial {trial}: {:?}", r.round_bounds);
        }
        assert!(r.upper_bound <= r.round_bounds[0] + 1e-12);
    }
}

/// `Σ = 0.1·I + c·vvᵀ` with `v` the indicator of the first `s` coordinates.
fn planted(p: usize, s: usize, c: f64) -> Instance {
    let v = DVector::from_fn(p, |i, _| if i < s { 1.0 } else { 0.0 });
    let m = DMatrix::identity(p, p) * 0.1 + &v * v.transpose() * c;
    Instance::new("planted", Source::RawCovariance, m).unwrap()
}

#[test]
fn rank_one_solutions_are_tight() {
    let mut cases: Vec<(Instance, usize)> = vec![
        (Instance::new("identity", Source::RawCovariance, DMatrix::identity(6, 6)).unwrap(), 1),
        (planted(8, 3, 5.0), 3),
        (planted(10, 4, 10.0), 4),
        (planted(9, 2, 3.0), 2),
    ];
    for trial in 0..10u64 {
        cases.push((common::random_instance(6 + trial as usize % 4, 4200 + trial), 2 + trial as usize % 3));
    }
    let mut rank_one = 0;
    for (inst, k) in &cases {
        let opt = brute_force(inst, Budget::new(*k, inst.p()).unwrap(), DEFAULT_MAX_SUBSETS).unwrap().objective;
        // the z-coupled rows are what force a rank-one X onto k coordinates;
        // the weak relaxation has rank-one optima that are not k-sparse
        let r = solve(inst, *k, RelaxationTag::Strong, PsdMode::Exact);
        if second_eigenvalue(&r.x) <= 1e-6 {
            rank_one += 1;
            // solver tolerances are relative; scale the 1e-4 with the optimum
            assert!((r.upper_bound - opt).abs() <= 1e-4 * opt.max(1.0), "{}: {} vs {opt}", inst.name(), r.upper_bound);
        }
    }
    assert!(rank_one > 0, "no rank-one outputs among the cases");
}

#[test]
fn planted_support_closes_the_strong_gap() {
    for (p, s, c) in [(8, 3, 5.0), (10, 4, 10.0), (9, 2, 3.0)] {
        let inst = planted(p, s, c);
        let opt = brute_force(&inst, Budget::new(s, p).unwrap(), DEFAULT_MAX_SUBSETS).unwrap().objective;
        let r = solve(&inst, s, RelaxationTag::Strong, PsdMode::Exact);
        assert!((r.upper_bound - opt).abs() <= 1e-4 * opt, "p {p}: {} vs {opt}", r.upper_bound);
    }
}

#[test]
fn gaussian_rounding_of_dnn_output() {
    for trial in 0..8u64 {
        let p = 5 + (trial as usize % 4);
        let inst = common::random_instance(p, 4300 + trial);
        let k = Budget::new(2 + trial as usize % 2, p).unwrap();
        let opt = brute_force(&inst, k, DEFAULT_MAX_SUBSETS).unwrap().objective;
        let r = solve_relaxation(&inst, k, RelaxationKind::with_default_mode(RelaxationTag::Dnn, p), &SolverSettings::default()).unwrap();
        let big_z = r.z_matrix.as_ref().expect("dnn keeps Z");
        let floor = greedy_round(&inst, k, &r.z_frac);
        let a = gw_round(&inst, k, &r.z_frac, big_z, 100, trial);
        let b = gw_round(&inst, k, &r.z_frac, big_z, 100, trial);
        assert!(a.objective >= floor.objective);
        assert!(a.objective <= opt + 1e-9);
        assert!(a.objective <= r.upper_bound + 1e-6);
        assert_eq!(a.chosen(), b.chosen());
    }
}

#[test]
fn daspremont_strong_is_below_daspremont() {
    for trial in 0..3u64 {
        let inst = common::random_instance(5, 4400 + trial);
        let d = solve(&inst, 2, RelaxationTag::Daspremont, PsdMode::Exact);
        let ds = solve(&inst, 2, RelaxationTag::DaspremontStrong, PsdMode::Exact);
        assert!(ds.upper_bound <= d.upper_bound + 1e-5, "trial {trial}: {} > {}", ds.upper_bound, d.upper_bound);
    }
}
