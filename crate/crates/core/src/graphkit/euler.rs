use petgraph::unionfind::UnionFind;

use super::{check_disjoint_paths, ClosedWalk, Path, Traversal};
use crate::error::{Error, Result};
use crate::model::EdgeSet;

#[derive(Clone, Copy, Debug)]
enum Link {
    Tree,
    /// Stands in for the whole path with this index.
    Special(usize),
}

/// Euler circuit of the doubled spanning tree `tree + tree` in which every
/// path of `paths` is traversed contiguously.
///
/// One copy of each path edge is replaced by a single special edge joining
/// the path's endpoints, Hierholzer's algorithm runs on the resulting
/// Eulerian multigraph, and each special edge is expanded back into its path
/// in the direction the circuit crossed it. The circuit starts at the
/// lowest-ranked vertex and always leaves a vertex along the unused edge
/// whose other end has the lowest rank.
pub fn euler_with_forced_paths(
    tree: &EdgeSet,
    n: usize,
    paths: &[Path],
    traversal: &Traversal,
) -> Result<ClosedWalk> {
    if n == 0 {
        return Err(Error::input("empty vertex set"));
    }
    if tree.len() + 1 != n {
        return Err(Error::input(format!(
            "{} edges cannot span {n} vertices as a tree",
            tree.len()
        )));
    }
    let mut uf = UnionFind::<usize>::new(n);
    for e in tree.iter() {
        if e.v() >= n {
            return Err(Error::input(format!("tree edge {e} outside 0..{n}")));
        }
        if !uf.union(e.u(), e.v()) {
            return Err(Error::input(format!(
                "tree edges contain a cycle through {e}"
            )));
        }
    }
    check_disjoint_paths(n, paths)?;
    let mut on_path = EdgeSet::new();
    for (j, p) in paths.iter().enumerate() {
        let edges = p.edges();
        if !edges.is_subset(tree) {
            return Err(Error::input(format!(
                "path {j} uses an edge that is not in the tree"
            )));
        }
        on_path.extend(edges.iter());
    }
    let ranks = traversal.ranks(n)?;

    let mut links: Vec<(usize, usize, Link)> = Vec::with_capacity(2 * tree.len());
    for e in tree.iter() {
        let copies = if on_path.contains(e) { 1 } else { 2 };
        for _ in 0..copies {
            links.push((e.u(), e.v(), Link::Tree));
        }
    }
    for (j, p) in paths.iter().enumerate() {
        if p.len() >= 2 {
            links.push((p.last(), p.first(), Link::Special(j)));
        }
    }

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (id, &(u, v, _)) in links.iter().enumerate() {
        adj[u].push(id);
        adj[v].push(id);
    }
    let other = |id: usize, x: usize| -> usize {
        let (u, v, _) = links[id];
        if u == x {
            v
        } else {
            u
        }
    };
    for (x, list) in adj.iter_mut().enumerate() {
        list.sort_by_key(|&id| (ranks[other(id, x)], id));
    }

    let start = (0..n).min_by_key(|&v| ranks[v]).expect("n > 0");
    let mut used = vec![false; links.len()];
    let mut next = vec![0usize; n];
    // (vertex, link used to arrive)
    let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
    let mut circuit: Vec<(usize, Option<usize>)> = Vec::with_capacity(links.len() + 1);
    while let Some(&(v, _)) = stack.last() {
        while next[v] < adj[v].len() && used[adj[v][next[v]]] {
            next[v] += 1;
        }
        if next[v] < adj[v].len() {
            let id = adj[v][next[v]];
            used[id] = true;
            stack.push((other(id, v), Some(id)));
        } else {
            circuit.push(stack.pop().expect("nonempty"));
        }
    }
    circuit.reverse();
    debug_assert_eq!(circuit.len(), links.len() + 1);

    let mut walk = Vec::with_capacity(2 * tree.len() + 1);
    walk.push(start);
    for w in circuit.windows(2) {
        let (from, (to, via)) = (w[0].0, w[1]);
        match via.map(|id| links[id].2) {
            Some(Link::Special(j)) => {
                let p = paths[j].order();
                if from == p[0] {
                    walk.extend_from_slice(&p[1..]);
                } else {
                    walk.extend(p[..p.len() - 1].iter().rev());
                }
            }
            _ => walk.push(to),
        }
    }
    ClosedWalk::new(walk)
}

#[cfg(test)]
/// The traversed-edge multiset equals two copies of `tree`.
pub(crate) fn traverses_doubled_tree(walk: &ClosedWalk, tree: &EdgeSet) -> bool {
    let counts = walk.edge_counts();
    counts.len() == tree.len() && tree.iter().all(|e| counts.get(&e) == Some(&2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Edge;

    fn path_tree(n: usize) -> EdgeSet {
        (0..n - 1).map(|i| Edge::new(i, i + 1)).collect()
    }

    #[test]
    fn whole_tree_as_one_path() {
        let tree = path_tree(6);
        let p = Path::new((0..6).collect()).unwrap();
        let w = euler_with_forced_paths(&tree, 6, std::slice::from_ref(&p), &Traversal::Canonical)
            .unwrap();
        assert_eq!(w.steps(), 10);
        assert!(traverses_doubled_tree(&w, &tree));
        assert!(p.occurs_in(w.order()));
    }

    #[test]
    fn no_paths_gives_plain_double_tree_walk() {
        let tree = EdgeSet::from_pairs(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        let w = euler_with_forced_paths(&tree, 5, &[], &Traversal::Canonical).unwrap();
        assert_eq!(w.order(), &[0, 1, 0, 2, 3, 2, 4, 2, 0]);
        assert!(traverses_doubled_tree(&w, &tree));
    }

    #[test]
    fn forced_path_inside_a_star_like_tree() {
        // 3 - 0 - 1 - 2 with a leaf 4 on 1 and a leaf 5 on 0
        let tree = EdgeSet::from_pairs(6, &[(3, 0), (0, 1), (1, 2), (1, 4), (0, 5)]).unwrap();
        let p = Path::new(vec![3, 0, 1, 2]).unwrap();
        for seed in 0..20 {
            let w = euler_with_forced_paths(
                &tree,
                6,
                std::slice::from_ref(&p),
                &Traversal::Seeded(seed),
            )
            .unwrap();
            assert!(
                traverses_doubled_tree(&w, &tree),
                "seed {seed}: {:?}",
                w.order()
            );
            assert!(p.occurs_in(w.order()), "seed {seed}: {:?}", w.order());
        }
    }

    #[test]
    fn precondition_failures() {
        let tree = path_tree(4);
        let not_in_tree = Path::new(vec![0, 2]).unwrap();
        assert!(euler_with_forced_paths(&tree, 4, &[not_in_tree], &Traversal::Canonical).is_err());
        let a = Path::new(vec![0, 1]).unwrap();
        let b = Path::new(vec![1, 2]).unwrap();
        assert!(euler_with_forced_paths(&tree, 4, &[a, b], &Traversal::Canonical).is_err());
        assert!(euler_with_forced_paths(&tree, 5, &[], &Traversal::Canonical).is_err());
    }
}
