use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::model::{DistanceMatrix, Edge, EdgeSet};

/// Kruskal solver over a fixed vertex set that can be re-run cheaply with
/// different sets of forced edges.
///
/// Candidate edges are sorted once by `(cost, edge)`, so ties resolve to the
/// lexicographically smaller edge.
#[derive(Clone, Debug)]
pub struct ForcedMst {
    n: usize,
    vertices: Vec<usize>,
    sorted: Vec<(Edge, f64)>,
}

impl ForcedMst {
    /// Complete graph on `vertices` (all of `0..d.n()` if `None`).
    pub fn new(d: &DistanceMatrix, vertices: Option<&[usize]>) -> Result<Self> {
        let n = d.n();
        let vertices: Vec<usize> = match vertices {
            Some(vs) => {
                let mut vs = vs.to_vec();
                vs.sort_unstable();
                vs.dedup();
                if let Some(&v) = vs.iter().find(|&&v| v >= n) {
                    return Err(Error::input(format!("vertex {v} outside 0..{n}")));
                }
                vs
            }
            None => (0..n).collect(),
        };
        let mut sorted = Vec::with_capacity(vertices.len() * vertices.len().saturating_sub(1) / 2);
        for (i, &u) in vertices.iter().enumerate() {
            for &v in &vertices[i + 1..] {
                sorted.push((Edge::new(u, v), d.get(u, v)));
            }
        }
        sorted.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        Ok(Self {
            n,
            vertices,
            sorted,
        })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Minimum spanning tree among the trees containing `forced`.
    pub fn solve(&self, forced: &EdgeSet) -> Result<EdgeSet> {
        let mut uf = UnionFind::<usize>::new(self.n);
        let mut tree = EdgeSet::new();
        let mut members = vec![false; self.n];
        for &v in &self.vertices {
            members[v] = true;
        }
        for e in forced.iter() {
            let (u, v) = e.ends();
            if v >= self.n || !members[u] || !members[v] {
                return Err(Error::input(format!(
                    "forced edge {e} leaves the vertex set"
                )));
            }
            if !uf.union(u, v) {
                return Err(Error::Infeasible(format!(
                    "forced edges contain a cycle through {e}"
                )));
            }
            tree.insert(e);
        }
        let target = self.vertices.len().saturating_sub(1);
        for &(e, _) in &self.sorted {
            if tree.len() == target {
                break;
            }
            let (u, v) = e.ends();
            if uf.union(u, v) {
                tree.insert(e);
            }
        }
        debug_assert_eq!(tree.len(), target);
        Ok(tree)
    }
}

/// Minimum-cost spanning tree of the complete graph on `vertices` that
/// contains every edge of `forced`.
pub fn mst_forced(d: &DistanceMatrix, vertices: &[usize], forced: &EdgeSet) -> Result<EdgeSet> {
    ForcedMst::new(d, Some(vertices))?.solve(forced)
}

/// Minimum spanning tree on all vertices of `d`.
pub fn mst(d: &DistanceMatrix) -> EdgeSet {
    ForcedMst::new(d, None)
        .and_then(|m| m.solve(&EdgeSet::new()))
        .expect("unforced MST always exists")
}
