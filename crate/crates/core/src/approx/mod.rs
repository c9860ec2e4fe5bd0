//! The two approximation algorithms and their runtime-checked certificates.
//!
//! [`solve_approx4`] handles two stages and any `q`; [`solve_enum2`] handles
//! any number of stages when `q` is small enough to enumerate forced path
//! sets. Both end with the same pipeline: per stage, a spanning tree that
//! contains a set of vertex-disjoint paths is doubled, walked by an Euler
//! circuit that keeps every path contiguous, and shortcut into a tour that
//! still contains the paths. All tours therefore share the path edges.

mod algorithm1;
mod enum2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphkit::{
    double_tree_tour, euler_with_forced_paths, mst, shortcut_preserving_paths, ClosedWalk, Path,
    Traversal,
};
use crate::model::{approx_le, check_solution, mutual_intersection, EdgeSet, Instance, Tour};
use crate::recov_st::TreePair;

pub use algorithm1::{solve_approx4, solve_approx4_with_trees};
pub use enum2::{
    enumerate_vertex_disjoint_path_sets, path_set_count_estimate, solve_enum2, Enum2Solution,
    Enum2Stats, PathSets,
};

/// What the returned value is guaranteed to be relative to the optimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Guarantee {
    #[serde(rename = "4-approx")]
    FourApprox,
    #[serde(rename = "2-approx")]
    TwoApprox,
    #[serde(rename = "exact")]
    Exact,
    /// Non-metric input or a non-optimal spanning tree pair.
    #[serde(rename = "heuristic")]
    Heuristic,
}

impl Guarantee {
    pub fn as_str(self) -> &'static str {
        match self {
            Guarantee::FourApprox => "4-approx",
            Guarantee::TwoApprox => "2-approx",
            Guarantee::Exact => "exact",
            Guarantee::Heuristic => "heuristic",
        }
    }
}

impl std::fmt::Display for Guarantee {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Options shared by both algorithms.
#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Child order of the double-tree DFS and edge order of Hierholzer.
    pub traversal: Traversal,
    /// Run on non-metric input; the guarantee is then reported as heuristic.
    pub force_nonmetric: bool,
    /// Work budget: search nodes for the spanning-tree branch-and-bound, or
    /// candidate path sets for the enumeration algorithm.
    pub budget: Option<u128>,
    /// Use the heuristic tree pair when the exact tree search exceeds its
    /// budget instead of failing.
    pub heuristic_fallback: bool,
    /// Skip certificate verification (timing runs only).
    pub skip_verify: bool,
}

/// The four summed quantities of the cost chain
/// `tours <= walks <= 2 * substituted trees <= 4 * trees`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCosts {
    pub tours: f64,
    pub walks: f64,
    pub doubled_substituted: f64,
    /// Absent when there is no original tree pair (enumeration algorithm).
    pub quadrupled_trees: Option<f64>,
}

/// Intermediate objects of one pipeline run with the cost chain between them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateChain {
    pub tree_pair: Option<TreePair>,
    pub substituted_trees: Vec<EdgeSet>,
    pub paths: Vec<Path>,
    pub walks: Vec<ClosedWalk>,
    pub tours: Vec<Tour>,
    pub stage_costs: ChainCosts,
    /// A lower bound on the optimum: the optimal tree pair value for
    /// `q < n`, or the smallest forced-tree value over all path sets.
    pub lower_bound: Option<f64>,
    /// All metrics passed the triangle inequality check.
    pub metric: bool,
}

impl CertificateChain {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn build(
        inst: &Instance,
        tree_pair: Option<TreePair>,
        substituted_trees: Vec<EdgeSet>,
        paths: Vec<Path>,
        walks: Vec<ClosedWalk>,
        tours: Vec<Tour>,
        lower_bound: Option<f64>,
        metric: bool,
    ) -> Result<Self> {
        let ds = inst.metrics();
        let tours_cost = inst.objective(&tours)?;
        let walks_cost: f64 = walks.iter().zip(ds).map(|(w, d)| w.cost(d)).sum();
        let substituted: f64 = substituted_trees
            .iter()
            .zip(ds)
            .map(|(t, d)| d.cost(t))
            .sum();
        let stage_costs = ChainCosts {
            tours: tours_cost,
            walks: walks_cost,
            doubled_substituted: 2.0 * substituted,
            quadrupled_trees: tree_pair.as_ref().map(|p| 4.0 * p.value),
        };
        Ok(Self {
            tree_pair,
            substituted_trees,
            paths,
            walks,
            tours,
            stage_costs,
            lower_bound,
            metric,
        })
    }

    /// Named slack of every link of the cost chain (`right - left`).
    pub fn slacks(&self) -> Vec<(&'static str, f64)> {
        let c = &self.stage_costs;
        let mut out = vec![
            ("tours<=walks", c.walks - c.tours),
            ("walks<=2*substituted", c.doubled_substituted - c.walks),
        ];
        if let Some(quad) = c.quadrupled_trees {
            out.push(("2*substituted<=4*trees", quad - c.doubled_substituted));
        }
        out
    }

    /// Re-checks the structure and every inequality the guarantee relies on.
    ///
    /// Structure: each walk traverses its doubled tree exactly, every path is
    /// contiguous in every walk and contained in every tour, and the tours
    /// share every path edge. The cost inequalities are checked when the
    /// metrics are metric; the tree substitution link additionally needs an
    /// optimal tree pair.
    pub fn verify(&self, inst: &Instance) -> Result<()> {
        let k = inst.k();
        let n = inst.n();
        if self.tours.len() != k || self.walks.len() != k || self.substituted_trees.len() != k {
            return Err(Error::Certificate(format!(
                "expected {k} tours, walks and trees"
            )));
        }
        let path_edges: EdgeSet = self
            .paths
            .iter()
            .flat_map(|p| p.edges().iter().collect::<Vec<_>>())
            .collect();
        for (i, ((tree, walk), tour)) in self
            .substituted_trees
            .iter()
            .zip(&self.walks)
            .zip(&self.tours)
            .enumerate()
        {
            if tree.len() + 1 != n {
                return Err(Error::Certificate(format!(
                    "stage {i}: substituted tree has {} edges",
                    tree.len()
                )));
            }
            if !path_edges.is_subset(tree) {
                return Err(Error::Certificate(format!(
                    "stage {i}: a path edge is missing from the tree"
                )));
            }
            let counts = walk.edge_counts();
            if counts.len() != tree.len() || !tree.iter().all(|e| counts.get(&e) == Some(&2)) {
                return Err(Error::Certificate(format!(
                    "stage {i}: walk does not traverse the doubled tree"
                )));
            }
            for (j, p) in self.paths.iter().enumerate() {
                if !p.occurs_in(walk.order()) {
                    return Err(Error::Certificate(format!(
                        "stage {i}: path {j} is not contiguous in the walk"
                    )));
                }
            }
            if !path_edges.is_subset(&tour.edges()) {
                return Err(Error::Certificate(format!(
                    "stage {i}: tour drops a path edge"
                )));
            }
        }
        let verdict = check_solution(inst, &self.tours);
        if !verdict.feasible {
            return Err(Error::Certificate(format!(
                "infeasible tours: {}",
                verdict.violations.join("; ")
            )));
        }
        let common = mutual_intersection(&self.tours.iter().map(Tour::edges).collect::<Vec<_>>())?;
        if common.len() < path_edges.len() {
            return Err(Error::Certificate(format!(
                "tours share {} edges, fewer than the {} path edges",
                common.len(),
                path_edges.len()
            )));
        }

        if self.metric {
            let c = &self.stage_costs;
            if !approx_le(c.tours, c.walks) {
                return Err(Error::Certificate(format!(
                    "tours {} > walks {}",
                    c.tours, c.walks
                )));
            }
            if !approx_le(c.walks, c.doubled_substituted) {
                return Err(Error::Certificate(format!(
                    "walks {} > 2 * substituted trees {}",
                    c.walks, c.doubled_substituted
                )));
            }
            if let (Some(quad), Some(pair)) = (c.quadrupled_trees, &self.tree_pair) {
                if pair.optimal && !approx_le(c.doubled_substituted, quad) {
                    return Err(Error::Certificate(format!(
                        "2 * substituted trees {} > 4 * trees {quad}",
                        c.doubled_substituted
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A solution with its certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub tours: Vec<Tour>,
    /// `d_i(C_i)` per stage.
    pub stage_costs: Vec<f64>,
    pub value: f64,
    pub intersection: EdgeSet,
    pub guarantee: Guarantee,
    pub certificate: CertificateChain,
}

impl Solution {
    pub(crate) fn from_chain(
        inst: &Instance,
        certificate: CertificateChain,
        guarantee: Guarantee,
    ) -> Result<Self> {
        let tours = certificate.tours.clone();
        let stage_costs = tours
            .iter()
            .zip(inst.metrics())
            .map(|(t, d)| t.cost(d))
            .collect::<Result<Vec<_>>>()?;
        let value = inst.objective(&tours)?;
        let intersection = mutual_intersection(&tours.iter().map(Tour::edges).collect::<Vec<_>>())?;
        Ok(Self {
            tours,
            stage_costs,
            value,
            intersection,
            guarantee,
            certificate,
        })
    }
}

pub(crate) fn require_metric(inst: &Instance, force: bool) -> Result<bool> {
    for (i, d) in inst.metrics().iter().enumerate() {
        let report = d.validate_metric();
        if !report.is_metric() {
            if force {
                return Ok(false);
            }
            return Err(Error::NonMetric(format!("stage {i}: {}", report.summary())));
        }
    }
    Ok(true)
}

pub(crate) fn require_tours(inst: &Instance) -> Result<()> {
    if inst.n() < 3 {
        return Err(Error::input(format!(
            "a tour needs at least 3 vertices, got {}",
            inst.n()
        )));
    }
    Ok(())
}

/// `q = n` forces all tours to be equal, which is a single TSP under the
/// summed metric; it is solved by the double-tree heuristic.
pub(crate) fn solve_all_equal(
    inst: &Instance,
    opts: &SolveOptions,
    metric: bool,
) -> Result<Solution> {
    let n = inst.n();
    let combined = inst.combined();
    let tree = mst(&combined);
    let walk = euler_with_forced_paths(&tree, n, &[], &opts.traversal)?;
    let tour = shortcut_preserving_paths(&walk, &[], n)?;
    debug_assert_eq!(
        Some(&tour),
        double_tree_tour(&combined, &opts.traversal).ok().as_ref()
    );
    let k = inst.k();
    let pair = (k == 2).then(|| {
        TreePair::new(
            inst.metric(0),
            inst.metric(1),
            tree.clone(),
            tree.clone(),
            true,
        )
    });
    let lower = combined.cost(&tree);
    let chain = CertificateChain::build(
        inst,
        pair,
        vec![tree; k],
        Vec::new(),
        vec![walk; k],
        vec![tour; k],
        Some(lower),
        metric,
    )?;
    if !opts.skip_verify {
        chain.verify(inst)?;
    }
    let guarantee = if metric {
        Guarantee::TwoApprox
    } else {
        Guarantee::Heuristic
    };
    Solution::from_chain(inst, chain, guarantee)
}
