//! Recoverable spanning tree: two spanning trees `T1`, `T2` with
//! `|T1 ∩ T2| >= q` minimizing `d1(T1) + d2(T2)`.
//!
//! [`recov_st_exact`] is a branch-and-bound over `q`-edge forests `F`, each
//! completed by forced-edge Kruskal in both metrics. Any optimal pair contains
//! a `q`-edge forest in its intersection, and forcing that forest cannot make
//! either minimum spanning tree more expensive than the optimal trees, so the
//! minimum over all forests is the optimum. Forcing more edges never lowers
//! the completion cost, which makes the completion of a partial forest a
//! valid lower bound for everything below it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphkit::ForcedMst;
use crate::model::{DistanceMatrix, Edge, EdgeSet};

/// Default node budget for [`recov_st_exact`].
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

/// Largest `n` accepted by [`recov_st_bruteforce`].
pub const BRUTEFORCE_MAX_N: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreePair {
    pub t1: EdgeSet,
    pub t2: EdgeSet,
    /// `d1(t1) + d2(t2)`.
    pub value: f64,
    pub intersection: EdgeSet,
    /// Proven optimal for the `q` it was computed for.
    pub optimal: bool,
}

impl TreePair {
    pub fn new(
        d1: &DistanceMatrix,
        d2: &DistanceMatrix,
        t1: EdgeSet,
        t2: EdgeSet,
        optimal: bool,
    ) -> Self {
        let value = d1.cost(&t1) + d2.cost(&t2);
        let intersection = t1.intersection(&t2);
        Self {
            t1,
            t2,
            value,
            intersection,
            optimal,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RecovStOptions {
    /// Abort with [`Error::BudgetExceeded`] after this many search nodes.
    pub node_budget: u64,
    /// Known feasible pair used as the initial incumbent.
    pub incumbent: Option<TreePair>,
}

impl Default for RecovStOptions {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
            incumbent: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RecovStSearch {
    pub pair: TreePair,
    /// Search nodes expanded (each costs two forced-MST computations).
    pub nodes: u64,
    /// The unconstrained lower bound already matched the incumbent, so no
    /// forest was enumerated.
    pub closed_at_root: bool,
}

fn check_inputs(d1: &DistanceMatrix, d2: &DistanceMatrix, q: usize) -> Result<usize> {
    let n = d1.n();
    if d2.n() != n {
        return Err(Error::input(format!(
            "metrics disagree on n: {} vs {}",
            n,
            d2.n()
        )));
    }
    if q + 1 > n {
        return Err(Error::Infeasible(format!(
            "q = {q} but spanning trees on {n} vertices have only {} edges",
            n - 1
        )));
    }
    Ok(n)
}

/// Provably optimal tree pair.
pub fn recov_st_exact(d1: &DistanceMatrix, d2: &DistanceMatrix, q: usize) -> Result<TreePair> {
    recov_st_search(d1, d2, q, &RecovStOptions::default()).map(|s| s.pair)
}

struct Search<'a> {
    d1: &'a DistanceMatrix,
    d2: &'a DistanceMatrix,
    m1: ForcedMst,
    m2: ForcedMst,
    edges: Vec<Edge>,
    q: usize,
    budget: u64,
    nodes: u64,
    best: TreePair,
}

impl Search<'_> {
    /// Completes `forced` in both metrics and returns the pair.
    fn complete(&mut self, forced: &EdgeSet) -> Result<TreePair> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                what: "recoverable spanning tree branch-and-bound",
                estimate: binomial(self.edges.len() as u128, self.q as u128),
                budget: self.budget as u128,
            });
        }
        let t1 = self.m1.solve(forced)?;
        let t2 = self.m2.solve(forced)?;
        Ok(TreePair::new(self.d1, self.d2, t1, t2, false))
    }

    fn dfs(&mut self, forced: &mut EdgeSet, from: usize) -> Result<()> {
        let pair = self.complete(forced)?;
        if pair.value >= self.best.value {
            return Ok(());
        }
        if pair.intersection.len() >= self.q {
            // Feasible and equal to the bound of the whole subtree.
            self.best = pair;
            return Ok(());
        }
        let missing = self.q - forced.len();
        for i in from..self.edges.len() {
            if self.edges.len() - i < missing {
                break;
            }
            let e = self.edges[i];
            if creates_cycle(forced, e) {
                continue;
            }
            forced.insert(e);
            self.dfs(forced, i + 1)?;
            forced.remove(e);
        }
        Ok(())
    }
}

fn creates_cycle(forest: &EdgeSet, e: Edge) -> bool {
    // Forests here have at most q edges; a BFS from one endpoint is enough.
    let (s, t) = e.ends();
    let mut stack = vec![s];
    let mut seen = vec![s];
    while let Some(x) = stack.pop() {
        if x == t {
            return true;
        }
        for f in forest.iter().filter(|f| f.contains(x)) {
            let y = f.other(x);
            if !seen.contains(&y) {
                seen.push(y);
                stack.push(y);
            }
        }
    }
    false
}

/// Branch-and-bound with explicit options and search statistics.
pub fn recov_st_search(
    d1: &DistanceMatrix,
    d2: &DistanceMatrix,
    q: usize,
    opts: &RecovStOptions,
) -> Result<RecovStSearch> {
    let n = check_inputs(d1, d2, q)?;
    let m1 = ForcedMst::new(d1, None)?;
    let m2 = ForcedMst::new(d2, None)?;
    let empty = EdgeSet::new();
    let root = TreePair::new(d1, d2, m1.solve(&empty)?, m2.solve(&empty)?, false);
    if root.intersection.len() >= q {
        return Ok(RecovStSearch {
            pair: TreePair {
                optimal: true,
                ..root
            },
            nodes: 1,
            closed_at_root: true,
        });
    }

    let mut best = recov_st_heuristic(d1, d2, q)?;
    let swapped = recov_st_heuristic(d2, d1, q)?;
    if swapped.value < best.value {
        best = TreePair::new(d1, d2, swapped.t2, swapped.t1, false);
    }
    if let Some(inc) = &opts.incumbent {
        if inc.t1.len() + 1 != n || inc.t2.len() + 1 != n || inc.intersection.len() < q {
            return Err(Error::input(
                "supplied incumbent is not a feasible tree pair",
            ));
        }
        let inc = TreePair::new(d1, d2, inc.t1.clone(), inc.t2.clone(), false);
        if inc.value <= best.value {
            best = inc;
        }
    }
    if best.value <= root.value {
        return Ok(RecovStSearch {
            pair: TreePair {
                optimal: true,
                ..best
            },
            nodes: 1,
            closed_at_root: true,
        });
    }

    let mut edges: Vec<Edge> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| Edge::new(u, v)))
        .collect();
    edges.sort_by(|a, b| {
        (d1.edge(*a) + d2.edge(*a))
            .total_cmp(&(d1.edge(*b) + d2.edge(*b)))
            .then(a.cmp(b))
    });
    let mut search = Search {
        d1,
        d2,
        m1,
        m2,
        edges,
        q,
        budget: opts.node_budget,
        nodes: 0,
        best,
    };
    search.dfs(&mut EdgeSet::new(), 0)?;
    Ok(RecovStSearch {
        pair: TreePair {
            optimal: true,
            ..search.best
        },
        nodes: search.nodes,
        closed_at_root: false,
    })
}

/// Fast feasible pair with no optimality claim: `T1 = MST(d1)`, then the `q`
/// edges of `T1` cheapest under `d2` are forced into `T2`.
pub fn recov_st_heuristic(d1: &DistanceMatrix, d2: &DistanceMatrix, q: usize) -> Result<TreePair> {
    check_inputs(d1, d2, q)?;
    let t1 = ForcedMst::new(d1, None)?.solve(&EdgeSet::new())?;
    let mut by_d2: Vec<Edge> = t1.iter().collect();
    by_d2.sort_by(|a, b| d2.edge(*a).total_cmp(&d2.edge(*b)).then(a.cmp(b)));
    let forced: EdgeSet = by_d2.into_iter().take(q).collect();
    let t2 = ForcedMst::new(d2, None)?.solve(&forced)?;
    Ok(TreePair::new(d1, d2, t1, t2, false))
}

/// Every labeled spanning tree of `K_n`, decoded from Prüfer sequences and
/// sorted lexicographically.
pub fn all_spanning_trees(n: usize) -> Vec<EdgeSet> {
    match n {
        0 | 1 => return vec![EdgeSet::new()],
        2 => return vec![std::iter::once(Edge::new(0, 1)).collect()],
        _ => {}
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    let mut seq = vec![0usize; len];
    for code in 0..total {
        let mut c = code;
        for s in seq.iter_mut() {
            *s = c % n;
            c /= n;
        }
        out.push(prufer_decode(&seq, n));
    }
    out.sort();
    out
}

fn prufer_decode(seq: &[usize], n: usize) -> EdgeSet {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut tree = EdgeSet::new();
    for &s in seq {
        let leaf = (0..n)
            .find(|&v| degree[v] == 1)
            .expect("a leaf always exists");
        tree.insert(Edge::new(leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    tree.insert(Edge::new(rest[0], rest[1]));
    tree
}

/// Optimal pair for every `q in 0..n` by enumerating all spanning-tree pairs.
/// Ties keep the lexicographically first pair.
pub fn recov_st_bruteforce_profile(
    d1: &DistanceMatrix,
    d2: &DistanceMatrix,
) -> Result<Vec<TreePair>> {
    let n = check_inputs(d1, d2, 0)?;
    if n > BRUTEFORCE_MAX_N {
        let trees = (n as u128).pow(n as u32 - 2);
        return Err(Error::BudgetExceeded {
            what: "spanning-tree pair enumeration",
            estimate: trees * trees,
            budget: (BRUTEFORCE_MAX_N as u128).pow(2 * (BRUTEFORCE_MAX_N as u32 - 2)),
        });
    }
    let trees = all_spanning_trees(n);
    let index = |e: Edge| e.u() * n + e.v();
    let masks: Vec<u64> = trees
        .iter()
        .map(|t| t.iter().fold(0u64, |m, e| m | 1 << index(e)))
        .collect();
    let c1: Vec<f64> = trees.iter().map(|t| d1.cost(t)).collect();
    let c2: Vec<f64> = trees.iter().map(|t| d2.cost(t)).collect();

    // best[s]: cheapest pair whose intersection has exactly s edges.
    let mut best: Vec<Option<(f64, usize, usize)>> = vec![None; n];
    for i in 0..trees.len() {
        for j in 0..trees.len() {
            let s = (masks[i] & masks[j]).count_ones() as usize;
            let v = c1[i] + c2[j];
            if best[s].is_none_or(|(b, _, _)| v < b) {
                best[s] = Some((v, i, j));
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for q in 0..n {
        let (_, i, j) = best[q..]
            .iter()
            .flatten()
            .copied()
            .reduce(|a, b| {
                if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                    b
                } else {
                    a
                }
            })
            .expect("identical trees give s = n - 1");
        out.push(TreePair::new(
            d1,
            d2,
            trees[i].clone(),
            trees[j].clone(),
            true,
        ));
    }
    Ok(out)
}

/// Independent oracle for [`recov_st_exact`], limited to `n <= 6`.
pub fn recov_st_bruteforce(d1: &DistanceMatrix, d2: &DistanceMatrix, q: usize) -> Result<TreePair> {
    check_inputs(d1, d2, q)?;
    recov_st_bruteforce_profile(d1, d2).map(|mut all| all.swap_remove(q))
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}
