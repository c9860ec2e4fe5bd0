use std::collections::HashMap;

use super::{euler_with_forced_paths, mst, shortcut_preserving_paths, Component, Path, Traversal};
use crate::error::{Error, Result};
use crate::model::{DistanceMatrix, Tour};

/// Hamilton path through a tree component obtained by the double-tree
/// heuristic: depth-first preorder from the lowest-ranked vertex, children in
/// rank order. This is the shortcut Euler tour of the doubled tree with the
/// closing edge dropped, so under a metric its cost is at most twice the
/// tree's.
pub fn double_tree_hamilton_path(
    component: &Component,
    d: &DistanceMatrix,
    traversal: &Traversal,
) -> Result<Path> {
    let component = Component::new(component.vertices.clone(), component.edges.clone())?;
    let n = d.n();
    if let Some(&v) = component.vertices.iter().find(|&&v| v >= n) {
        return Err(Error::input(format!(
            "component vertex {v} outside the matrix (n = {n})"
        )));
    }
    let ranks = traversal.ranks(n)?;

    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in component.edges.iter() {
        adj.entry(e.u()).or_default().push(e.v());
        adj.entry(e.v()).or_default().push(e.u());
    }
    for list in adj.values_mut() {
        list.sort_by_key(|&w| ranks[w]);
    }
    let root = *component
        .vertices
        .iter()
        .min_by_key(|&&v| ranks[v])
        .expect("components are nonempty");

    let mut order = Vec::with_capacity(component.vertices.len());
    let mut stack = vec![(root, usize::MAX)];
    while let Some((v, parent)) = stack.pop() {
        order.push(v);
        if let Some(children) = adj.get(&v) {
            stack.extend(
                children
                    .iter()
                    .rev()
                    .filter(|&&w| w != parent)
                    .map(|&w| (w, v)),
            );
        }
    }
    Path::new(order)
}

/// Classic double-tree tour of a whole metric: MST, doubled, Euler circuit,
/// first-visit shortcutting.
pub fn double_tree_tour(d: &DistanceMatrix, traversal: &Traversal) -> Result<Tour> {
    let tree = mst(d);
    let walk = euler_with_forced_paths(&tree, d.n(), &[], traversal)?;
    shortcut_preserving_paths(&walk, &[], d.n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EdgeSet;

    #[test]
    fn single_edge() {
        let d = DistanceMatrix::from_fn(4, |u, v| (u + v) as f64);
        let k = Component::new(vec![1, 3], EdgeSet::from_pairs(4, &[(1, 3)]).unwrap()).unwrap();
        let p = double_tree_hamilton_path(&k, &d, &Traversal::Canonical).unwrap();
        assert_eq!(p.order(), &[1, 3]);
        assert_eq!(p.cost(&d), 4.0);
    }

    #[test]
    fn path_shaped_component_is_its_own_preorder() {
        let d = DistanceMatrix::from_fn(6, |u, v| (v as f64 - u as f64).abs());
        let edges = EdgeSet::from_pairs(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let k = Component::new((0..6).collect(), edges.clone()).unwrap();
        let p = double_tree_hamilton_path(&k, &d, &Traversal::Canonical).unwrap();
        assert_eq!(p.order(), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(p.cost(&d), d.cost(&edges));
    }

    #[test]
    fn star_preorder_visits_leaves_by_rank() {
        let d = DistanceMatrix::from_fn(5, |u, v| if u == 0 || v == 0 { 1.0 } else { 2.0 });
        let edges = EdgeSet::from_pairs(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let k = Component::new((0..5).collect(), edges).unwrap();
        let p = double_tree_hamilton_path(&k, &d, &Traversal::Canonical).unwrap();
        assert_eq!(p.order(), &[0, 1, 2, 3, 4]);
        let p = double_tree_hamilton_path(&k, &d, &Traversal::Ranked(vec![4, 0, 1, 2, 3])).unwrap();
        assert_eq!(p.order(), &[1, 0, 2, 3, 4]);
    }

    #[test]
    fn non_tree_is_rejected() {
        let d = DistanceMatrix::from_fn(3, |_, _| 1.0);
        let k = Component {
            vertices: vec![0, 1, 2],
            edges: EdgeSet::from_pairs(3, &[(0, 1)]).unwrap(),
        };
        assert!(double_tree_hamilton_path(&k, &d, &Traversal::Canonical).is_err());
    }
}
