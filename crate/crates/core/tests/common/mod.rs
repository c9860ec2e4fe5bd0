//! Reference implementations used only by tests. They share no code with the
//! library solvers beyond the data types.
#![allow(dead_code)]

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recovtsp::graphkit::Path;
use recovtsp::{DistanceMatrix, Edge, EdgeSet, Tour};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lexicographic next permutation; false after the last one.
pub fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
        return false;
    };
    let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Cheapest tour by trying every permutation of `1..n` behind vertex 0.
pub fn tsp_by_permutations(d: &DistanceMatrix) -> f64 {
    let n = d.n();
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best = f64::INFINITY;
    loop {
        if rest[0] < rest[n - 2] {
            let mut order = vec![0];
            order.extend_from_slice(&rest);
            best = best.min(Tour::new(order).unwrap().cost(d).unwrap());
        }
        if !next_permutation(&mut rest) {
            return best;
        }
    }
}

/// Every spanning tree of `K_n`, found by testing all `(n-1)`-edge subsets for
/// connectivity.
pub fn spanning_trees_by_subsets(n: usize) -> Vec<EdgeSet> {
    let all: Vec<Edge> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| Edge::new(u, v)))
        .collect();
    let m = all.len();
    let mut out = Vec::new();
    for mask in 0u64..(1 << m) {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let edges: Vec<Edge> = (0..m)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| all[i])
            .collect();
        let mut reached = vec![false; n];
        reached[0] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for e in &edges {
                if reached[e.u()] != reached[e.v()] {
                    reached[e.u()] = true;
                    reached[e.v()] = true;
                    changed = true;
                }
            }
        }
        if reached.iter().all(|&r| r) {
            out.push(edges.into_iter().collect());
        }
    }
    out
}

/// Best `d1(T1) + d2(T2)` with `|T1 ∩ T2| >= q`, for every `q`, over all tree
/// pairs.
pub fn recov_st_values_by_pairs(d1: &DistanceMatrix, d2: &DistanceMatrix) -> Vec<f64> {
    let n = d1.n();
    let trees = spanning_trees_by_subsets(n);
    let mut best = vec![f64::INFINITY; n];
    for a in &trees {
        let ca = d1.cost(a);
        for b in &trees {
            let v = ca + d2.cost(b);
            let s = a.intersection(b).len();
            for slot in &mut best[..=s] {
                if v < *slot {
                    *slot = v;
                }
            }
        }
    }
    best
}

/// Uniformly random labeled tree on `n` vertices (random attachment order).
pub fn random_tree(n: usize, rng: &mut impl Rng) -> EdgeSet {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    (1..n)
        .map(|i| Edge::new(order[i], order[rng.random_range(0..i)]))
        .collect()
}

/// Random vertex-disjoint paths made of tree edges.
pub fn random_tree_paths(tree: &EdgeSet, n: usize, rng: &mut impl Rng) -> Vec<Path> {
    let mut adj = vec![Vec::new(); n];
    for e in tree.iter() {
        adj[e.u()].push(e.v());
        adj[e.v()].push(e.u());
    }
    let mut used = vec![false; n];
    let mut paths = Vec::new();
    for _ in 0..rng.random_range(0..=4) {
        let free: Vec<usize> = (0..n).filter(|&v| !used[v]).collect();
        let Some(&start) = free.choose(rng) else {
            break;
        };
        let want = rng.random_range(1..=6);
        let mut order = vec![start];
        used[start] = true;
        while order.len() < want {
            let last = *order.last().unwrap();
            let next: Vec<usize> = adj[last].iter().copied().filter(|&w| !used[w]).collect();
            let Some(&w) = next.choose(rng) else { break };
            used[w] = true;
            order.push(w);
        }
        paths.push(Path::new(order).unwrap());
    }
    paths
}
