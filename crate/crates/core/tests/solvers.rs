mod common;

use recovtsp::approx::{solve_approx4, solve_enum2, Guarantee, SolveOptions};
use recovtsp::graphkit::{mst, Traversal};
use recovtsp::instances::{
    gen_euclidean, gen_integer_metric_stages, gen_random_metric, gen_random_metric_stages,
};
use recovtsp::oracle::{recov_tsp_bruteforce_profile, tsp_exact};
use recovtsp::recov_st::{
    recov_st_bruteforce_profile, recov_st_exact, recov_st_heuristic, recov_st_search,
    RecovStOptions,
};
use recovtsp::{approx_le, check_solution, DistanceMatrix, Error, Instance};

fn stages(n: usize, k: usize, seed: u64) -> Vec<DistanceMatrix> {
    gen_random_metric_stages(n, k, seed, 0.1, 10.0).unwrap()
}

#[test]
fn tree_pairs_match_pair_enumeration() {
    for seed in 0..6 {
        let n = 4 + (seed % 2) as usize;
        let d = gen_integer_metric_stages(n, 2, seed, 1, 9).unwrap();
        let expected = common::recov_st_values_by_pairs(&d[0], &d[1]);
        let brute = recov_st_bruteforce_profile(&d[0], &d[1]).unwrap();
        for q in 0..n {
            let exact = recov_st_exact(&d[0], &d[1], q).unwrap();
            assert_eq!(exact.value, expected[q], "seed {seed} q {q}");
            assert_eq!(brute[q].value, expected[q], "seed {seed} q {q}");
            assert!(exact.intersection.len() >= q);
        }
    }
}

#[test]
fn tree_pair_value_is_monotone_and_bounds_heuristic() {
    for seed in 0..10 {
        let n = 8;
        let d = stages(n, 2, 100 + seed);
        let mut last = 0.0;
        for q in 0..n {
            let exact = recov_st_exact(&d[0], &d[1], q).unwrap();
            assert!(exact.optimal);
            assert!(approx_le(last, exact.value), "seed {seed} q {q}");
            last = exact.value;
            let h = recov_st_heuristic(&d[0], &d[1], q).unwrap();
            assert!(h.intersection.len() >= q);
            assert!(approx_le(exact.value, h.value));
        }
        let free = recov_st_exact(&d[0], &d[1], 0).unwrap();
        assert_eq!(free.value, d[0].cost(&mst(&d[0])) + d[1].cost(&mst(&d[1])));
        assert!(recov_st_exact(&d[0], &d[1], n).is_err());
    }
}

#[test]
fn tree_search_respects_budget() {
    let d = stages(12, 2, 7);
    let opts = RecovStOptions {
        node_budget: 1,
        incumbent: None,
    };
    match recov_st_search(&d[0], &d[1], 6, &opts) {
        Err(Error::BudgetExceeded { .. }) => {}
        Ok(s) => assert!(s.nodes <= 1),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn approx4_is_deterministic_and_certified() {
    let inst = gen_euclidean(12, 3, Some(5)).unwrap();
    let a = solve_approx4(&inst, &SolveOptions::default()).unwrap();
    let b = solve_approx4(&inst, &SolveOptions::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.guarantee, Guarantee::FourApprox);
    assert!(a.intersection.len() >= 5);
    a.certificate.verify(&inst).unwrap();
    let lower = a.certificate.lower_bound.unwrap();
    assert!(approx_le(a.value, 4.0 * lower));
    assert!(a
        .certificate
        .slacks()
        .iter()
        .all(|&(_, s)| s >= -1e-9 * a.value));
}

#[test]
fn approx4_bound_holds_for_any_traversal() {
    let inst = gen_random_metric(6, 11, Some(3)).unwrap();
    let opt = recov_tsp_bruteforce_profile(inst.metrics()).unwrap()[3].value;
    for seed in 0..30 {
        let opts = SolveOptions {
            traversal: Traversal::Seeded(seed),
            ..Default::default()
        };
        let sol = solve_approx4(&inst, &opts).unwrap();
        assert!(check_solution(&inst, &sol.tours).feasible);
        assert!(
            approx_le(opt, sol.value) && approx_le(sol.value, 4.0 * opt),
            "seed {seed}"
        );
    }
}

#[test]
fn unit_metric_gives_2n() {
    for n in 3..=8 {
        let d = DistanceMatrix::from_fn(n, |_, _| 1.0);
        for q in 0..=n {
            let inst = Instance::new(vec![d.clone(), d.clone()], q).unwrap();
            assert_eq!(
                solve_approx4(&inst, &SolveOptions::default())
                    .unwrap()
                    .value,
                (2 * n) as f64
            );
            if q <= 2 {
                assert_eq!(
                    solve_enum2(&inst, &SolveOptions::default())
                        .unwrap()
                        .solution
                        .value,
                    (2 * n) as f64
                );
            }
        }
    }
}

#[test]
fn full_overlap_uses_one_tour() {
    for seed in 0..10 {
        let d = stages(6, 2, 300 + seed);
        let inst = Instance::new(d.clone(), 6).unwrap();
        let sol = solve_approx4(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.guarantee, Guarantee::TwoApprox);
        assert_eq!(sol.tours[0].edges(), sol.tours[1].edges());
        let (_, single) = tsp_exact(&inst.combined()).unwrap();
        let opt = recov_tsp_bruteforce_profile(&d).unwrap()[6].value;
        assert!((single - opt).abs() <= 1e-9 * opt);
        assert!(approx_le(sol.value, 2.0 * opt));
    }
}

#[test]
fn enum2_stays_within_twice_its_tree_bound() {
    for seed in 0..5 {
        let inst = Instance::new(stages(7, 3, 500 + seed), 2).unwrap();
        let out = solve_enum2(&inst, &SolveOptions::default()).unwrap();
        assert!(check_solution(&inst, &out.solution.tours).feasible);
        assert!(approx_le(out.stats.min_tree_bound, out.solution.value));
        assert!(approx_le(
            out.solution.value,
            2.0 * out.stats.min_tree_bound
        ));
        assert_eq!(out.stats.candidates, out.stats.evaluated + out.stats.pruned);
        out.solution.certificate.verify(&inst).unwrap();
    }
}

#[test]
fn enum2_refuses_over_budget() {
    let inst = Instance::new(stages(9, 2, 1), 4).unwrap();
    let opts = SolveOptions {
        budget: Some(10),
        ..Default::default()
    };
    assert!(matches!(
        solve_enum2(&inst, &opts),
        Err(Error::BudgetExceeded { .. })
    ));
}

#[test]
fn non_metric_input_needs_force() {
    let mut rows = stages(5, 1, 2).pop().unwrap().rows();
    rows[0][1] = 100.0;
    rows[1][0] = 100.0;
    let bad = DistanceMatrix::from_rows(&rows).unwrap();
    let inst = Instance::new(vec![bad.clone(), bad], 2).unwrap();
    assert!(matches!(
        solve_approx4(&inst, &SolveOptions::default()),
        Err(Error::NonMetric(_))
    ));
    let forced = SolveOptions {
        force_nonmetric: true,
        ..Default::default()
    };
    let sol = solve_approx4(&inst, &forced).unwrap();
    assert_eq!(sol.guarantee, Guarantee::Heuristic);
    assert!(check_solution(&inst, &sol.tours).feasible);
}
