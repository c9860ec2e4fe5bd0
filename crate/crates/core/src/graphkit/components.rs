use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::model::{DistanceMatrix, EdgeSet};

/// A connected tree component of a forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Sorted ascending.
    pub vertices: Vec<usize>,
    pub edges: EdgeSet,
}

impl Component {
    /// Validates that `edges` form a spanning tree of `vertices`.
    pub fn new(vertices: Vec<usize>, edges: EdgeSet) -> Result<Self> {
        let mut vertices = vertices;
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(Error::input("component without vertices"));
        }
        if edges.len() + 1 != vertices.len() {
            return Err(Error::input(format!(
                "{} edges cannot form a tree on {} vertices",
                edges.len(),
                vertices.len()
            )));
        }
        let bound = vertices[vertices.len() - 1] + 1;
        let mut uf = UnionFind::<usize>::new(bound);
        for e in edges.iter() {
            if vertices.binary_search(&e.u()).is_err() || vertices.binary_search(&e.v()).is_err() {
                return Err(Error::input(format!("edge {e} leaves the component")));
            }
            if !uf.union(e.u(), e.v()) {
                return Err(Error::input(format!(
                    "component edges contain a cycle through {e}"
                )));
            }
        }
        Ok(Self { vertices, edges })
    }

    pub fn cost(&self, d: &DistanceMatrix) -> f64 {
        d.cost(&self.edges)
    }
}

/// Connected components of an acyclic edge set, ordered by smallest vertex.
/// Vertices without incident edges do not form components.
pub fn components(forest: &EdgeSet) -> Result<Vec<Component>> {
    let bound = forest.vertex_bound();
    let mut uf = UnionFind::<usize>::new(bound);
    for e in forest.iter() {
        if !uf.union(e.u(), e.v()) {
            return Err(Error::input(format!(
                "edge set contains a cycle through {e}"
            )));
        }
    }
    let mut groups: BTreeMap<usize, (Vec<usize>, EdgeSet)> = BTreeMap::new();
    let mut touched = vec![false; bound];
    for e in forest.iter() {
        touched[e.u()] = true;
        touched[e.v()] = true;
        groups.entry(uf.find(e.u())).or_default().1.insert(e);
    }
    for v in (0..bound).filter(|&v| touched[v]) {
        groups.entry(uf.find(v)).or_default().0.push(v);
    }
    let mut out: Vec<Component> = groups
        .into_values()
        .map(|(vertices, edges)| Component { vertices, edges })
        .collect();
    out.sort_by_key(|c| c.vertices[0]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_forest_has_no_components() {
        assert!(components(&EdgeSet::new()).unwrap().is_empty());
    }

    #[test]
    fn single_path() {
        let f = EdgeSet::from_pairs(9, &[(4, 2), (2, 7), (7, 1), (1, 8)]).unwrap();
        let cs = components(&f).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].vertices, vec![1, 2, 4, 7, 8]);
        assert_eq!(cs[0].edges, f);
    }

    #[test]
    fn several_components_sorted_by_smallest_vertex() {
        let f = EdgeSet::from_pairs(9, &[(5, 6), (0, 8), (1, 2), (2, 3)]).unwrap();
        let cs = components(&f).unwrap();
        let firsts: Vec<usize> = cs.iter().map(|c| c.vertices[0]).collect();
        assert_eq!(firsts, vec![0, 1, 5]);
        assert_eq!(cs[1].edges.len(), 2);
    }

    #[test]
    fn cycles_are_rejected() {
        let f = EdgeSet::from_pairs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(components(&f).is_err());
    }

    #[test]
    fn component_validation() {
        let e = EdgeSet::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(Component::new(vec![0, 1, 2, 3], e).is_err());
        let e = EdgeSet::from_pairs(4, &[(0, 1), (1, 3)]).unwrap();
        assert!(Component::new(vec![0, 1, 3], e).is_ok());
    }
}
