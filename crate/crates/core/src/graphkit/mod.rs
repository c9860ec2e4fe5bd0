//! Graph primitives used by the approximation pipeline: forced-edge spanning
//! trees, forest components, double-tree Hamilton paths, Euler circuits that
//! keep prescribed paths contiguous, and shortcutting that preserves them.

mod components;
mod double_tree;
mod euler;
mod mst;
mod shortcut;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DistanceMatrix, Edge, EdgeSet};

pub use components::{components, Component};
pub use double_tree::{double_tree_hamilton_path, double_tree_tour};
pub use euler::euler_with_forced_paths;
pub use mst::{mst, mst_forced, ForcedMst};
pub use shortcut::shortcut_preserving_paths;

/// Order in which the double-tree DFS visits children and Hierholzer picks
/// the next edge.
///
/// Every choice point ranks candidate vertices; the lowest rank goes first.
/// `Canonical` ranks vertices by index. `Seeded` draws a random permutation,
/// which is how adversarial runs of the pipeline are reproduced. `Ranked`
/// supplies the permutation explicitly (`ranks[v]` is the rank of vertex `v`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Traversal {
    #[default]
    Canonical,
    Seeded(u64),
    Ranked(Vec<usize>),
}

impl Traversal {
    pub fn ranks(&self, n: usize) -> Result<Vec<usize>> {
        match self {
            Traversal::Canonical => Ok((0..n).collect()),
            Traversal::Seeded(seed) => {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
                let mut ranks = vec![0; n];
                for (r, v) in order.into_iter().enumerate() {
                    ranks[v] = r;
                }
                Ok(ranks)
            }
            Traversal::Ranked(ranks) => {
                if ranks.len() != n {
                    return Err(Error::input(format!(
                        "rank vector has {} entries, graph has {n} vertices",
                        ranks.len()
                    )));
                }
                let mut seen = vec![false; n];
                for &r in ranks {
                    if r >= n || std::mem::replace(&mut seen[r], true) {
                        return Err(Error::input("rank vector is not a permutation"));
                    }
                }
                Ok(ranks.clone())
            }
        }
    }
}

/// Simple path given by its vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Path {
    order: Vec<usize>,
}

impl Path {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        if order.is_empty() {
            return Err(Error::input("a path needs at least one vertex"));
        }
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!("path repeats vertex {}", w[0])));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn first(&self) -> usize {
        self.order[0]
    }

    pub fn last(&self) -> usize {
        self.order[self.order.len() - 1]
    }

    pub fn edges(&self) -> EdgeSet {
        self.order
            .windows(2)
            .map(|w| Edge::new(w[0], w[1]))
            .collect()
    }

    /// Vertices other than the two endpoints.
    pub fn inner(&self) -> &[usize] {
        if self.order.len() <= 2 {
            &[]
        } else {
            &self.order[1..self.order.len() - 1]
        }
    }

    pub fn reversed(&self) -> Path {
        Path {
            order: self.order.iter().rev().copied().collect(),
        }
    }

    pub fn cost(&self, d: &DistanceMatrix) -> f64 {
        self.order.windows(2).map(|w| d.get(w[0], w[1])).sum()
    }

    /// Whether `seq` contains this path as a contiguous run, in either direction.
    pub fn occurs_in(&self, seq: &[usize]) -> bool {
        self.find_in(seq).is_some()
    }

    /// Start index of the first contiguous occurrence in `seq`, in either direction.
    pub fn find_in(&self, seq: &[usize]) -> Option<usize> {
        let len = self.order.len();
        let rev: Vec<usize> = self.order.iter().rev().copied().collect();
        seq.windows(len)
            .position(|w| w == self.order.as_slice() || w == rev.as_slice())
    }
}

impl TryFrom<Vec<usize>> for Path {
    type Error = Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        Path::new(order)
    }
}

impl From<Path> for Vec<usize> {
    fn from(p: Path) -> Self {
        p.order
    }
}

/// Closed walk `(v_0, ..., v_m)` with `v_0 = v_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ClosedWalk {
    order: Vec<usize>,
}

impl TryFrom<Vec<usize>> for ClosedWalk {
    type Error = Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        ClosedWalk::new(order)
    }
}

impl From<ClosedWalk> for Vec<usize> {
    fn from(w: ClosedWalk) -> Self {
        w.order
    }
}

impl ClosedWalk {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        match (order.first(), order.last()) {
            (Some(a), Some(b)) if a == b => Ok(Self { order }),
            (None, _) => Err(Error::input("empty walk")),
            _ => Err(Error::input("walk does not return to its start vertex")),
        }
    }

    /// The vertex sequence including the repeated start at the end.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Number of traversed edges.
    pub fn steps(&self) -> usize {
        self.order.len() - 1
    }

    pub fn cost(&self, d: &DistanceMatrix) -> f64 {
        self.order.windows(2).map(|w| d.get(w[0], w[1])).sum()
    }

    /// How many times each undirected edge is traversed.
    pub fn edge_counts(&self) -> HashMap<Edge, usize> {
        let mut counts = HashMap::new();
        for w in self.order.windows(2) {
            *counts.entry(Edge::new(w[0], w[1])).or_insert(0) += 1;
        }
        counts
    }
}

/// Fails unless the paths are pairwise vertex-disjoint and use vertices `< n`.
pub(crate) fn check_disjoint_paths(n: usize, paths: &[Path]) -> Result<()> {
    let mut owner = vec![usize::MAX; n];
    for (j, p) in paths.iter().enumerate() {
        for &v in p.order() {
            if v >= n {
                return Err(Error::input(format!(
                    "path {j} uses vertex {v} outside 0..{n}"
                )));
            }
            if owner[v] != usize::MAX {
                return Err(Error::input(format!(
                    "paths {} and {j} share vertex {v}",
                    owner[v]
                )));
            }
            owner[v] = j;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traversal_ranks() {
        assert_eq!(Traversal::Canonical.ranks(4).unwrap(), vec![0, 1, 2, 3]);
        let a = Traversal::Seeded(7).ranks(10).unwrap();
        assert_eq!(a, Traversal::Seeded(7).ranks(10).unwrap());
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(sorted, (0..10).collect::<Vec<_>>());
        assert!(Traversal::Ranked(vec![0, 0, 1]).ranks(3).is_err());
        assert!(Traversal::Ranked(vec![0, 1]).ranks(3).is_err());
    }

    #[test]
    fn paths() {
        assert!(Path::new(vec![]).is_err());
        assert!(Path::new(vec![1, 2, 1]).is_err());
        let p = Path::new(vec![3, 1, 4]).unwrap();
        assert_eq!(p.inner(), &[1]);
        assert_eq!(p.edges().len(), 2);
        assert_eq!(p.find_in(&[0, 4, 1, 3, 2]), Some(1));
        assert!(!p.occurs_in(&[3, 1, 0, 4]));
    }

    #[test]
    fn walks() {
        assert!(ClosedWalk::new(vec![0, 1]).is_err());
        let w = ClosedWalk::new(vec![0, 1, 2, 1, 0]).unwrap();
        assert_eq!(w.steps(), 4);
        assert_eq!(w.edge_counts()[&Edge::new(1, 2)], 2);
    }
}
