use serde::{Deserialize, Serialize};

use super::{
    require_metric, require_tours, solve_all_equal, CertificateChain, Guarantee, Solution,
    SolveOptions,
};
use crate::error::{Error, Result};
use crate::graphkit::{euler_with_forced_paths, shortcut_preserving_paths, ForcedMst, Path};
use crate::model::{Edge, EdgeSet, Instance};
use crate::recov_st::binomial;

/// Default limit on the number of `q`-edge subsets the enumeration may visit.
pub const DEFAULT_CANDIDATE_BUDGET: u128 = 20_000_000;

/// Number of `q`-edge subsets of the complete graph on `n` vertices, an upper
/// bound on the number of path sets.
pub fn path_set_count_estimate(n: usize, q: usize) -> u128 {
    binomial((n * n.saturating_sub(1) / 2) as u128, q as u128)
}

/// Streams every set of `q` edges of `K_n` that forms vertex-disjoint simple
/// paths, each set split into its maximal paths. Paths start at their smaller
/// endpoint and are sorted by first vertex.
pub fn enumerate_vertex_disjoint_path_sets(n: usize, q: usize, budget: u128) -> Result<PathSets> {
    let estimate = path_set_count_estimate(n, q);
    if estimate > budget {
        return Err(Error::BudgetExceeded {
            what: "path set enumeration",
            estimate,
            budget,
        });
    }
    let edges = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| Edge::new(u, v)))
        .collect();
    Ok(PathSets {
        n,
        q,
        edges,
        chosen: Vec::with_capacity(q),
        adj: vec![Vec::new(); n],
        cursor: 0,
        done: false,
    })
}

/// Iterator returned by [`enumerate_vertex_disjoint_path_sets`].
#[derive(Clone, Debug)]
pub struct PathSets {
    n: usize,
    q: usize,
    edges: Vec<Edge>,
    chosen: Vec<usize>,
    adj: Vec<Vec<usize>>,
    cursor: usize,
    done: bool,
}

impl PathSets {
    /// Far end of the path that has `x` as an endpoint.
    fn far_end(&self, x: usize) -> usize {
        let (mut prev, mut cur) = (usize::MAX, x);
        loop {
            match self.adj[cur].iter().find(|&&y| y != prev) {
                Some(&y) => (prev, cur) = (cur, y),
                None => return cur,
            }
        }
    }

    fn can_add(&self, e: Edge) -> bool {
        let (u, v) = e.ends();
        self.adj[u].len() < 2 && self.adj[v].len() < 2 && self.far_end(u) != v
    }

    fn push(&mut self, i: usize) {
        let (u, v) = self.edges[i].ends();
        self.adj[u].push(v);
        self.adj[v].push(u);
        self.chosen.push(i);
    }

    fn pop(&mut self) -> Option<usize> {
        let i = self.chosen.pop()?;
        let (u, v) = self.edges[i].ends();
        self.adj[u].retain(|&x| x != v);
        self.adj[v].retain(|&x| x != u);
        Some(i)
    }

    fn current_paths(&self) -> Vec<Path> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] || self.adj[s].len() != 1 {
                continue;
            }
            let mut order = vec![s];
            let (mut prev, mut cur) = (usize::MAX, s);
            while let Some(&y) = self.adj[cur].iter().find(|&&y| y != prev) {
                order.push(y);
                (prev, cur) = (cur, y);
            }
            for &v in &order {
                seen[v] = true;
            }
            out.push(Path::new(order).expect("simple path"));
        }
        out
    }
}

impl Iterator for PathSets {
    type Item = Vec<Path>;

    fn next(&mut self) -> Option<Vec<Path>> {
        if self.done {
            return None;
        }
        if self.q == 0 {
            self.done = true;
            return Some(Vec::new());
        }
        let m = self.edges.len();
        loop {
            let mut extended = false;
            let mut i = self.cursor;
            while i < m && self.chosen.len() + (m - i) >= self.q {
                if self.can_add(self.edges[i]) {
                    self.push(i);
                    self.cursor = i + 1;
                    extended = true;
                    break;
                }
                i += 1;
            }
            if extended {
                if self.chosen.len() == self.q {
                    let out = self.current_paths();
                    let last = self.pop().expect("q > 0");
                    self.cursor = last + 1;
                    return Some(out);
                }
                continue;
            }
            match self.pop() {
                Some(last) => self.cursor = last + 1,
                None => {
                    self.done = true;
                    return None;
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Enum2Stats {
    /// Path sets produced by the enumeration.
    pub candidates: u64,
    /// Path sets for which tours were built.
    pub evaluated: u64,
    /// Path sets skipped because their forced trees already cost at least the
    /// incumbent.
    pub pruned: u64,
    /// Smallest `sum_i d_i(T'_i)` over all path sets; a lower bound on the
    /// optimum for `q < n`.
    pub min_tree_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Enum2Solution {
    pub solution: Solution,
    pub stats: Enum2Stats,
}

/// Factor-2 approximation for any number of stages and small `q`.
///
/// For every set `F` of vertex-disjoint paths with `q` edges, each stage gets
/// the cheapest spanning tree containing `F`, which is doubled, walked and
/// shortcut with `F` kept intact. The cheapest tour tuple over all `F` is
/// returned. A tour tuple built on `F` costs at least its trees, so sets whose
/// trees already reach the incumbent are skipped.
pub fn solve_enum2(inst: &Instance, opts: &SolveOptions) -> Result<Enum2Solution> {
    require_tours(inst)?;
    let metric = require_metric(inst, opts.force_nonmetric)?;
    let n = inst.n();
    let q = inst.q();
    if q == n {
        let solution = solve_all_equal(inst, opts, metric)?;
        let bound = solution.certificate.lower_bound.unwrap_or(0.0);
        let stats = Enum2Stats {
            candidates: 0,
            evaluated: 1,
            pruned: 0,
            min_tree_bound: bound,
        };
        return Ok(Enum2Solution { solution, stats });
    }
    let budget = opts.budget.unwrap_or(DEFAULT_CANDIDATE_BUDGET);
    let sets = enumerate_vertex_disjoint_path_sets(n, q, budget).map_err(|e| match e {
        Error::BudgetExceeded {
            estimate, budget, ..
        } => Error::BudgetExceeded {
            what: "path set enumeration (for two stages the tree-pair algorithm has no such limit)",
            estimate,
            budget,
        },
        other => other,
    })?;
    let solvers = inst
        .metrics()
        .iter()
        .map(|d| ForcedMst::new(d, None))
        .collect::<Result<Vec<_>>>()?;

    struct Best {
        value: f64,
        paths: Vec<Path>,
        trees: Vec<EdgeSet>,
        walks: Vec<crate::graphkit::ClosedWalk>,
        tours: Vec<crate::model::Tour>,
    }
    let mut best: Option<Best> = None;
    let mut stats = Enum2Stats {
        min_tree_bound: f64::INFINITY,
        ..Default::default()
    };
    for paths in sets {
        stats.candidates += 1;
        let forced: EdgeSet = paths
            .iter()
            .flat_map(|p| p.edges().iter().collect::<Vec<_>>())
            .collect();
        let trees = solvers
            .iter()
            .map(|s| s.solve(&forced))
            .collect::<Result<Vec<_>>>()?;
        let bound: f64 = trees
            .iter()
            .zip(inst.metrics())
            .map(|(t, d)| d.cost(t))
            .sum();
        stats.min_tree_bound = stats.min_tree_bound.min(bound);
        if best.as_ref().is_some_and(|b| bound >= b.value) {
            stats.pruned += 1;
            continue;
        }
        stats.evaluated += 1;
        let mut walks = Vec::with_capacity(trees.len());
        let mut tours = Vec::with_capacity(trees.len());
        for t in &trees {
            let w = euler_with_forced_paths(t, n, &paths, &opts.traversal)?;
            tours.push(shortcut_preserving_paths(&w, &paths, n)?);
            walks.push(w);
        }
        let value = inst.objective(&tours)?;
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(Best {
                value,
                paths,
                trees,
                walks,
                tours,
            });
        }
    }
    let best = best.expect("q < n admits at least one path set");
    let chain = CertificateChain::build(
        inst,
        None,
        best.trees,
        best.paths,
        best.walks,
        best.tours,
        Some(stats.min_tree_bound),
        metric,
    )?;
    if !opts.skip_verify {
        chain.verify(inst)?;
        if metric && !crate::model::approx_le(chain.stage_costs.tours, 2.0 * stats.min_tree_bound) {
            // Holds because the best tuple costs at most twice the trees of
            // the set with the smallest bound.
            return Err(Error::Certificate(format!(
                "value {} > 2 * smallest tree bound {}",
                chain.stage_costs.tours, stats.min_tree_bound
            )));
        }
    }
    let guarantee = if metric {
        Guarantee::TwoApprox
    } else {
        Guarantee::Heuristic
    };
    Ok(Enum2Solution {
        solution: Solution::from_chain(inst, chain, guarantee)?,
        stats,
    })
}
