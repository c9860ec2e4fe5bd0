//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any failed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use recovtsp::approx::{solve_approx4, solve_enum2, SolveOptions};
use recovtsp::graphkit::{
    double_tree_hamilton_path, euler_with_forced_paths, shortcut_preserving_paths, Traversal,
};
use recovtsp::instances::{
    gen_integer_metric_stages, gen_paris_star, gen_random_metric_stages, gen_tight_family,
};
use recovtsp::oracle::{hamilton_path_exact, recov_tsp_bruteforce_profile, tsp_exact};
use recovtsp::recov_st::{
    recov_st_bruteforce_profile, recov_st_exact, recov_st_search, RecovStOptions, TreePair,
};
use recovtsp::{approx_eq, approx_le, check_solution, Instance, Tour};

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, title: &'static str, failures: &[String], detail: String) -> Outcome {
    let detail = if failures.is_empty() {
        detail
    } else {
        let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
        format!(
            "{detail}; {} failure(s): {}",
            failures.len(),
            shown.join(" | ")
        )
    };
    Outcome {
        id,
        title,
        pass: failures.is_empty(),
        detail,
    }
}

/// Metric-closure stages; odd seeds use a wide weight range so the closure
/// actually shortens edges.
fn closure_stages(n: usize, k: usize, seed: u64) -> Vec<recovtsp::DistanceMatrix> {
    let (lo, hi) = if seed.is_multiple_of(2) {
        (1.0, 2.0)
    } else {
        (0.1, 10.0)
    };
    gen_random_metric_stages(n, k, seed, lo, hi).unwrap()
}

struct Approx4Run {
    label: String,
    feasible: bool,
    ratio: f64,
    value: f64,
    opt: f64,
    chain: Result<(), String>,
    tree_value: Option<f64>,
    q: usize,
    n: usize,
}

fn approx4_suite() -> Vec<Approx4Run> {
    let mut runs = Vec::new();
    for i in 0..100u64 {
        let n = 5 + (i % 3) as usize;
        let seed = 1000 + i;
        let stages = closure_stages(n, 2, seed);
        let profile = recov_tsp_bruteforce_profile(&stages).unwrap();
        for (q, best) in profile.iter().enumerate() {
            let inst = Instance::new(stages.clone(), q).unwrap();
            let sol = solve_approx4(&inst, &SolveOptions::default()).unwrap();
            let opt = best.value;
            runs.push(Approx4Run {
                label: format!("seed {seed} n {n} q {q}"),
                feasible: check_solution(&inst, &sol.tours).feasible,
                ratio: sol.value / opt,
                value: sol.value,
                opt,
                chain: sol.certificate.verify(&inst).map_err(|e| e.to_string()),
                tree_value: sol.certificate.tree_pair.as_ref().map(|p| p.value),
                q,
                n,
            });
        }
    }
    runs
}

fn criteria_1_and_2() -> Vec<Outcome> {
    let started = Instant::now();
    let runs = approx4_suite();
    let secs = started.elapsed().as_secs_f64();

    let mut fail1 = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for r in &runs {
        lo = lo.min(r.ratio);
        hi = hi.max(r.ratio);
        if !r.feasible {
            fail1.push(format!("{}: infeasible", r.label));
        }
        if !approx_le(r.opt, r.value) || !approx_le(r.value, 4.0 * r.opt) {
            fail1.push(format!("{}: ratio {}", r.label, r.ratio));
        }
    }
    let one = outcome(
        "1",
        "factor-4 ratio against brute-force optimum",
        &fail1,
        format!(
            "{} runs, ratio in [{lo:.4}, {hi:.4}], {secs:.1}s",
            runs.len()
        ),
    );

    let mut fail2 = Vec::new();
    let mut lower_checked = 0;
    for r in &runs {
        if let Err(e) = &r.chain {
            fail2.push(format!("{}: {e}", r.label));
        }
        if r.q < r.n {
            let t = r.tree_value.expect("tree pair recorded");
            lower_checked += 1;
            if !approx_le(t, r.opt) {
                fail2.push(format!("{}: trees {t} > optimum {}", r.label, r.opt));
            }
        }
    }
    let two = outcome(
        "2",
        "certificate chain and tree lower bound",
        &fail2,
        format!(
            "{} chains verified, {lower_checked} lower bounds checked",
            runs.len()
        ),
    );
    vec![one, two]
}

fn criterion_3() -> Outcome {
    let started = Instant::now();
    let mut failures = Vec::new();

    let big = gen_tight_family(10, 1e-4).unwrap();
    if big.ratio < 3.75 {
        failures.push(format!("k=10 ratio {} < 3.75", big.ratio));
    }

    let small = gen_tight_family(3, 1e-3).unwrap();
    let inst = small.instance().unwrap();
    let incumbent = TreePair::new(
        inst.metric(0),
        inst.metric(1),
        small.t1.clone(),
        small.t2.clone(),
        false,
    );
    let opts = RecovStOptions {
        incumbent: Some(incumbent),
        ..Default::default()
    };
    let search = recov_st_search(inst.metric(0), inst.metric(1), small.q, &opts).unwrap();
    if search.pair.t1 != small.t1 || search.pair.t2 != small.t2 {
        failures.push("k=3 search with incumbent differs from the certified trees".into());
    }
    let plain = recov_st_exact(inst.metric(0), inst.metric(1), small.q).unwrap();
    if plain.t1 != small.t1 || plain.t2 != small.t2 || !plain.optimal {
        failures.push("k=3 exact tree pair differs from the certified trees".into());
    }
    let how = if search.closed_at_root {
        "closed by the unconstrained bound"
    } else {
        "full search"
    };

    let mut sizes = Vec::new();
    for k in 2..=10 {
        let c = gen_tight_family(k, 0.5 / (k * k) as f64).unwrap();
        sizes.push(c.intersection.len());
        if c.intersection.len() != 12 * k - 1 {
            failures.push(format!(
                "k={k}: |T1∩T2| = {} != 12k-1 = {}",
                c.intersection.len(),
                12 * k - 1
            ));
        }
    }
    outcome(
        "3",
        "tight family",
        &failures,
        format!(
            "k=10 ratio {:.4}; k=3 trees {how}; |T1∩T2| for k=2..10: {sizes:?}; {:.1}s",
            big.ratio,
            started.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_4() -> Outcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    let (mut hi, mut runs) = (0.0f64, 0);
    for i in 0..50u64 {
        let n = 5 + (i % 2) as usize;
        let seed = 2000 + i;
        let stages = closure_stages(n, 2, seed);
        let profile = recov_tsp_bruteforce_profile(&stages).unwrap();
        for (q, best) in profile.iter().enumerate().take(3) {
            let inst = Instance::new(stages.clone(), q).unwrap();
            let out = solve_enum2(&inst, &SolveOptions::default()).unwrap();
            let opt = best.value;
            let v = out.solution.value;
            hi = hi.max(v / opt);
            runs += 1;
            if !check_solution(&inst, &out.solution.tours).feasible {
                failures.push(format!("seed {seed} q {q}: infeasible"));
            }
            if !approx_le(opt, v) || !approx_le(v, 2.0 * opt) {
                failures.push(format!("seed {seed} q {q}: ratio {}", v / opt));
            }
            if !approx_le(out.stats.min_tree_bound, opt) {
                failures.push(format!(
                    "seed {seed} q {q}: tree bound {} > optimum {opt}",
                    out.stats.min_tree_bound
                ));
            }
        }
    }
    for i in 0..10u64 {
        let seed = 3000 + i;
        let stages = closure_stages(5, 3, seed);
        let opt = recov_tsp_bruteforce_profile(&stages).unwrap()[1].value;
        let inst = Instance::new(stages, 1).unwrap();
        let out = solve_enum2(&inst, &SolveOptions::default()).unwrap();
        let v = out.solution.value;
        hi = hi.max(v / opt);
        runs += 1;
        if !check_solution(&inst, &out.solution.tours).feasible
            || !approx_le(opt, v)
            || !approx_le(v, 2.0 * opt)
        {
            failures.push(format!("three stages seed {seed}: ratio {}", v / opt));
        }
    }
    outcome(
        "4",
        "factor-2 enumeration against brute-force optimum",
        &failures,
        format!(
            "{runs} runs, max ratio {hi:.4}, {:.1}s",
            started.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for n in 4..=9usize {
        let (star, d) = gen_paris_star(n).unwrap();
        let combined = recovtsp::DistanceMatrix::sum([&d, &d]).unwrap();
        let (_, exact) = hamilton_path_exact(&combined, &star.vertices).unwrap();
        if exact != (4 * n - 4) as f64 {
            failures.push(format!("n={n}: exact path {exact} != {}", 4 * n - 4));
        }
        let tree = combined.cost(&star.edges);
        let dt = double_tree_hamilton_path(&star, &combined, &Traversal::Canonical)
            .unwrap()
            .cost(&combined);
        if !approx_le(dt, 2.0 * tree) {
            failures.push(format!("n={n}: double-tree path {dt} > 2 * {tree}"));
        }
        rows.push(format!("n={n}: opt {exact} dt {dt} tree {tree}"));
        if n == 9 {
            let ratio = dt / tree;
            if ratio < 1.8 {
                failures.push(format!("n=9: double-tree ratio {ratio:.4} < 1.8"));
            }
            rows.push(format!(
                "double-tree ratio {ratio:.4}, optimum ratio {:.4}",
                exact / tree
            ));
        }
    }
    outcome(
        "5",
        "Hamilton paths on the star metric",
        &failures,
        rows.join("; "),
    )
}

fn criterion_6() -> Outcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = common::rng(6);
    let mut path_count = 0;
    for trial in 0..500u64 {
        use rand::Rng;
        let n = rng.random_range(3..=20);
        let tree = common::random_tree(n, &mut rng);
        let paths = common::random_tree_paths(&tree, n, &mut rng);
        path_count += paths.len();
        let d = closure_stages(n, 1, trial).pop().unwrap();
        let traversal = Traversal::Seeded(trial);
        let walk = match euler_with_forced_paths(&tree, n, &paths, &traversal) {
            Ok(w) => w,
            Err(e) => {
                failures.push(format!("trial {trial}: {e}"));
                continue;
            }
        };
        let counts = walk.edge_counts();
        if counts.len() != tree.len() || !tree.iter().all(|e| counts.get(&e) == Some(&2)) {
            failures.push(format!("trial {trial}: walk is not the doubled tree"));
        }
        if let Some(p) = paths.iter().find(|p| !p.occurs_in(walk.order())) {
            failures.push(format!(
                "trial {trial}: path {:?} not contiguous",
                p.order()
            ));
        }
        match shortcut_preserving_paths(&walk, &paths, n) {
            Ok(tour) => {
                let edges = tour.edges();
                if paths.iter().any(|p| !p.edges().is_subset(&edges)) {
                    failures.push(format!("trial {trial}: tour drops a path edge"));
                }
                if !approx_le(tour.cost(&d).unwrap(), walk.cost(&d)) {
                    failures.push(format!("trial {trial}: tour longer than walk"));
                }
            }
            Err(e) => failures.push(format!("trial {trial}: {e}")),
        }
    }
    outcome(
        "6",
        "forced-path Euler walks and shortcutting",
        &failures,
        format!(
            "500 trees, {path_count} forced paths, {:.1}s",
            started.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_7() -> Outcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut compared = 0;
    for i in 0..200u64 {
        let n = 4 + (i % 3) as usize;
        let seed = 7000 + i;
        let stages = closure_stages(n, 2, seed);
        let brute = recov_st_bruteforce_profile(&stages[0], &stages[1]).unwrap();
        for (q, b) in brute.iter().enumerate() {
            let exact = recov_st_exact(&stages[0], &stages[1], q).unwrap();
            compared += 1;
            if exact.value != b.value {
                failures.push(format!(
                    "seed {seed} q {q}: exact {} brute {}",
                    exact.value, b.value
                ));
            }
        }
    }
    // Integer weights: distinct optimal tours can tie in exact arithmetic, and
    // only integer sums make those ties bitwise equal.
    for i in 0..50u64 {
        let n = 5 + (i % 5) as usize;
        let d = gen_integer_metric_stages(n, 1, 8000 + i, 1, 100)
            .unwrap()
            .pop()
            .unwrap();
        let (tour, dp): (Tour, f64) = tsp_exact(&d).unwrap();
        let enumerated = common::tsp_by_permutations(&d);
        if dp != enumerated || tour.cost(&d).unwrap() != dp {
            failures.push(format!(
                "seed {}: Held-Karp {dp} enumeration {enumerated}",
                8000 + i
            ));
        }
    }
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let n = 5 + (i % 5) as usize;
        let d = closure_stages(n, 1, 8500 + i).pop().unwrap();
        let (_, dp) = tsp_exact(&d).unwrap();
        let enumerated = common::tsp_by_permutations(&d);
        worst = worst.max((dp - enumerated).abs() / enumerated);
        if !approx_eq(dp, enumerated) {
            failures.push(format!(
                "real weights seed {}: Held-Karp {dp} enumeration {enumerated}",
                8500 + i
            ));
        }
    }
    outcome(
        "7",
        "exact solvers against enumeration",
        &failures,
        format!("{compared} tree-pair values, 50 integer TSP values exact, 50 real TSP values within {worst:.1e}, {:.1}s", started.elapsed().as_secs_f64()),
    )
}

fn guarded(id: &'static str, f: impl FnOnce() -> Vec<Outcome>) -> Vec<Outcome> {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        vec![Outcome {
            id,
            title: "panicked",
            pass: false,
            detail: msg,
        }]
    })
}

fn main() {
    let started = Instant::now();
    let mut all = Vec::new();
    all.extend(guarded("1-2", criteria_1_and_2));
    all.extend(guarded("3", || vec![criterion_3()]));
    all.extend(guarded("4", || vec![criterion_4()]));
    all.extend(guarded("5", || vec![criterion_5()]));
    all.extend(guarded("6", || vec![criterion_6()]));
    all.extend(guarded("7", || vec![criterion_7()]));

    println!();
    for o in &all {
        println!(
            "criterion {} {}: {} ({})",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.title,
            o.detail
        );
    }
    let failed = all.iter().filter(|o| !o.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed, {:.1}s",
        all.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
