use super::{
    require_metric, require_tours, solve_all_equal, CertificateChain, Guarantee, Solution,
    SolveOptions,
};
use crate::error::{Error, Result};
use crate::graphkit::{
    components, double_tree_hamilton_path, euler_with_forced_paths, shortcut_preserving_paths,
};
use crate::model::{EdgeSet, Instance};
use crate::recov_st::{
    recov_st_heuristic, recov_st_search, RecovStOptions, TreePair, DEFAULT_NODE_BUDGET,
};

/// Factor-4 approximation for two stages.
///
/// Solves the spanning tree pair problem exactly, replaces every component
/// of the trees' intersection by a double-tree Hamilton path under `d1 + d2`
/// in both trees, and turns each modified tree into a tour that keeps those
/// paths. `q = n` is solved as one TSP under `d1 + d2`.
pub fn solve_approx4(inst: &Instance, opts: &SolveOptions) -> Result<Solution> {
    if inst.k() != 2 {
        return Err(Error::input(format!(
            "this algorithm handles 2 stages, got {}",
            inst.k()
        )));
    }
    require_tours(inst)?;
    let metric = require_metric(inst, opts.force_nonmetric)?;
    if inst.q() == inst.n() {
        return solve_all_equal(inst, opts, metric);
    }
    let (d1, d2) = (inst.metric(0), inst.metric(1));
    let budget = opts
        .budget
        .map_or(DEFAULT_NODE_BUDGET, |b| b.min(u64::MAX as u128) as u64);
    let st_opts = RecovStOptions {
        node_budget: budget,
        incumbent: None,
    };
    let pair = match recov_st_search(d1, d2, inst.q(), &st_opts) {
        Ok(search) => search.pair,
        Err(Error::BudgetExceeded { .. }) if opts.heuristic_fallback => {
            recov_st_heuristic(d1, d2, inst.q())?
        }
        Err(e) => return Err(e),
    };
    solve_approx4_with_trees(inst, pair, opts)
}

/// The pipeline after the spanning tree pair is known. With a non-optimal
/// pair the result is still feasible but carries no guarantee.
pub fn solve_approx4_with_trees(
    inst: &Instance,
    pair: TreePair,
    opts: &SolveOptions,
) -> Result<Solution> {
    if inst.k() != 2 {
        return Err(Error::input(format!(
            "this algorithm handles 2 stages, got {}",
            inst.k()
        )));
    }
    require_tours(inst)?;
    let metric = require_metric(inst, opts.force_nonmetric)?;
    let n = inst.n();
    for t in [&pair.t1, &pair.t2] {
        if t.len() + 1 != n || t.vertex_bound() > n {
            return Err(Error::input("tree pair does not span the instance"));
        }
    }
    if pair.intersection.len() < inst.q() {
        return Err(Error::input(format!(
            "tree pair shares {} edges, q = {}",
            pair.intersection.len(),
            inst.q()
        )));
    }

    let combined = inst.combined();
    let comps = components(&pair.intersection)?;
    let paths = comps
        .iter()
        .map(|c| double_tree_hamilton_path(c, &combined, &opts.traversal))
        .collect::<Result<Vec<_>>>()?;
    let path_edges: EdgeSet = paths
        .iter()
        .flat_map(|p| p.edges().iter().collect::<Vec<_>>())
        .collect();
    let substitute = |t: &EdgeSet| t.difference(&pair.intersection).union(&path_edges);
    let trees = vec![substitute(&pair.t1), substitute(&pair.t2)];

    let mut walks = Vec::with_capacity(2);
    let mut tours = Vec::with_capacity(2);
    for t in &trees {
        let w = euler_with_forced_paths(t, n, &paths, &opts.traversal)?;
        tours.push(shortcut_preserving_paths(&w, &paths, n)?);
        walks.push(w);
    }
    let lower = pair.optimal.then_some(pair.value);
    let guarantee = if metric && pair.optimal {
        Guarantee::FourApprox
    } else {
        Guarantee::Heuristic
    };
    let chain =
        CertificateChain::build(inst, Some(pair), trees, paths, walks, tours, lower, metric)?;
    if !opts.skip_verify {
        chain.verify(inst)?;
    }
    Solution::from_chain(inst, chain, guarantee)
}
