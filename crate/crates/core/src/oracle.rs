//! Exact baselines for small instances: Held-Karp TSP, brute-force recoverable
//! TSP over tour tuples and exact minimum Hamilton paths.
//!
//! Every size limit is a refusal ([`Error::BudgetExceeded`]), never a
//! truncated search.

use crate::error::{Error, Result};
use crate::graphkit::Path;
use crate::model::{DistanceMatrix, Instance, Tour};

pub const TSP_EXACT_MAX_N: usize = 15;
pub const HAMILTON_PATH_MAX: usize = 12;

fn refuse(what: &'static str, estimate: u128, budget: u128) -> Error {
    Error::BudgetExceeded {
        what,
        estimate,
        budget,
    }
}

/// Optimal tour by the Held-Karp subset recursion. Among optimal tours the
/// lexicographically smallest one starting at vertex 0 is returned.
pub fn tsp_exact(d: &DistanceMatrix) -> Result<(Tour, f64)> {
    let n = d.n();
    if n < 3 {
        return Err(Error::input(format!(
            "a tour needs at least 3 vertices, got {n}"
        )));
    }
    if n > TSP_EXACT_MAX_N {
        return Err(refuse(
            "Held-Karp",
            (n as u128) << n,
            (TSP_EXACT_MAX_N as u128) << TSP_EXACT_MAX_N,
        ));
    }
    // f[s * n + v]: cheapest way to leave v, visit every vertex of s (a subset
    // of 1..n encoded on bits 0..n-1) and return to 0.
    let m = n - 1;
    let full = (1usize << m) - 1;
    let mut f = vec![f64::INFINITY; (full + 1) * n];
    for (v, slot) in f.iter_mut().take(n).enumerate() {
        *slot = d.get(v, 0);
    }
    for s in 1..=full {
        for v in 0..n {
            if v > 0 && s & (1 << (v - 1)) != 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut rest = s;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let c = d.get(v, b + 1) + f[(s & !(1 << b)) * n + b + 1];
                if c < best {
                    best = c;
                }
            }
            f[s * n + v] = best;
        }
    }

    let mut order = vec![0];
    let (mut s, mut v) = (full, 0);
    while s != 0 {
        let target = f[s * n + v];
        let b = (0..m)
            .filter(|&b| s & (1 << b) != 0)
            .find(|&b| d.get(v, b + 1) + f[(s & !(1 << b)) * n + b + 1] == target)
            .expect("the minimum is attained by some successor");
        order.push(b + 1);
        s &= !(1 << b);
        v = b + 1;
    }
    let tour = Tour::new(order)?;
    let cost = tour.cost(d)?;
    Ok((tour, cost))
}

/// All tours on `n` vertices up to rotation and reflection: vertex 0 first and
/// the second vertex smaller than the last, in lexicographic order.
pub fn canonical_tours(n: usize) -> Vec<Tour> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            if prefix[1] < prefix[n - 1] {
                out.push(prefix.clone());
            }
            return;
        }
        for v in 1..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    if n < 3 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    used[0] = true;
    rec(&mut vec![0], &mut used, &mut out);
    out.into_iter()
        .map(|o| Tour::new(o).expect("permutation"))
        .collect()
}

/// An optimal tour tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct RecovTspOptimum {
    pub tours: Vec<Tour>,
    /// `sum_i d_i(C_i)`.
    pub value: f64,
    pub intersection: usize,
}

fn check_bruteforce_size(n: usize, k: usize) -> Result<()> {
    let ok = match k {
        2 => n <= 8,
        3 => n <= 6,
        _ => false,
    };
    if n < 3 {
        return Err(Error::input(format!(
            "a tour needs at least 3 vertices, got {n}"
        )));
    }
    if !ok {
        let tours = (1..n as u128).product::<u128>() / 2;
        return Err(refuse(
            "recoverable TSP tour-tuple enumeration",
            tours.saturating_pow(k as u32),
            2520u128.pow(2),
        ));
    }
    Ok(())
}

/// Optimal solution for every `q in 0..=n` by enumerating tour tuples
/// (`k = 2` with `n <= 8` or `k = 3` with `n <= 6`). Ties keep the
/// lexicographically first tuple of canonical tours.
pub fn recov_tsp_bruteforce_profile(metrics: &[DistanceMatrix]) -> Result<Vec<RecovTspOptimum>> {
    let k = metrics.len();
    let n = metrics.first().map_or(0, DistanceMatrix::n);
    if metrics.iter().any(|m| m.n() != n) {
        return Err(Error::input("metrics disagree on n"));
    }
    check_bruteforce_size(n, k)?;
    let tours = canonical_tours(n);
    let masks: Vec<u64> = tours
        .iter()
        .map(|t| {
            t.edges()
                .iter()
                .fold(0u64, |m, e| m | 1 << (e.u() * n + e.v()))
        })
        .collect();
    let costs: Vec<Vec<f64>> = metrics
        .iter()
        .map(|d| {
            tours
                .iter()
                .map(|t| t.cost(d).expect("sizes match"))
                .collect()
        })
        .collect();

    // by_size[s]: best tuple with exactly s common edges.
    let mut by_size: Vec<Option<(f64, Vec<usize>)>> = vec![None; n + 1];
    let mut idx = vec![0usize; k];
    let t = tours.len();
    loop {
        let mut common = u64::MAX;
        let mut value = 0.0;
        for (stage, &i) in idx.iter().enumerate() {
            common &= masks[i];
            value += costs[stage][i];
        }
        let s = common.count_ones() as usize;
        if by_size[s].as_ref().is_none_or(|(b, _)| value < *b) {
            by_size[s] = Some((value, idx.clone()));
        }
        // Odometer increment, last stage fastest, giving lexicographic order.
        let mut pos = k;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < t {
                break;
            }
            idx[pos] = 0;
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }

    let mut out = Vec::with_capacity(n + 1);
    for q in 0..=n {
        let (value, best) = by_size[q..]
            .iter()
            .flatten()
            .fold(None::<&(f64, Vec<usize>)>, |acc, cand| match acc {
                Some(a) if a.0 < cand.0 || (a.0 == cand.0 && a.1 <= cand.1) => Some(a),
                _ => Some(cand),
            })
            .cloned()
            .expect("identical tours share all n edges");
        let chosen: Vec<Tour> = best.iter().map(|&i| tours[i].clone()).collect();
        let common = best.iter().fold(u64::MAX, |m, &i| m & masks[i]);
        out.push(RecovTspOptimum {
            tours: chosen,
            value,
            intersection: common.count_ones() as usize,
        });
    }
    Ok(out)
}

/// Globally optimal tour tuple for the instance.
pub fn recov_tsp_bruteforce(inst: &Instance) -> Result<RecovTspOptimum> {
    recov_tsp_bruteforce_profile(inst.metrics()).map(|mut all| all.swap_remove(inst.q()))
}

/// Minimum-cost Hamilton path on `vertices` (free endpoints), at most 12
/// vertices. The path starts at its smaller endpoint.
pub fn hamilton_path_exact(d: &DistanceMatrix, vertices: &[usize]) -> Result<(Path, f64)> {
    let mut vs = vertices.to_vec();
    vs.sort_unstable();
    vs.dedup();
    if vs.len() != vertices.len() {
        return Err(Error::input("repeated vertex in subset"));
    }
    if let Some(&v) = vs.iter().find(|&&v| v >= d.n()) {
        return Err(Error::input(format!(
            "vertex {v} outside the matrix (n = {})",
            d.n()
        )));
    }
    let m = vs.len();
    if m == 0 {
        return Err(Error::input("empty vertex subset"));
    }
    if m > HAMILTON_PATH_MAX {
        return Err(refuse(
            "Hamilton path subset DP",
            (m as u128) << m,
            (HAMILTON_PATH_MAX as u128) << HAMILTON_PATH_MAX,
        ));
    }
    // g[s * m + i]: cheapest path covering s that ends at vs[i].
    let full = (1usize << m) - 1;
    let mut g = vec![f64::INFINITY; (full + 1) * m];
    for i in 0..m {
        g[(1 << i) * m + i] = 0.0;
    }
    for s in 1..=full {
        for i in (0..m).filter(|&i| s & (1 << i) != 0) {
            let cur = g[s * m + i];
            if cur == f64::INFINITY {
                continue;
            }
            for j in (0..m).filter(|&j| s & (1 << j) == 0) {
                let t = (s | 1 << j) * m + j;
                let c = cur + d.get(vs[i], vs[j]);
                if c < g[t] {
                    g[t] = c;
                }
            }
        }
    }
    let mut end = (0..m)
        .min_by(|&a, &b| g[full * m + a].total_cmp(&g[full * m + b]))
        .expect("m > 0");
    let mut order = vec![vs[end]];
    let mut s = full;
    while s.count_ones() > 1 {
        let prev = s & !(1 << end);
        let target = g[s * m + end];
        let i = (0..m)
            .filter(|&i| prev & (1 << i) != 0)
            .find(|&i| g[prev * m + i] + d.get(vs[i], vs[end]) == target)
            .expect("the minimum is attained by some predecessor");
        order.push(vs[i]);
        s = prev;
        end = i;
    }
    if order[0] > order[order.len() - 1] {
        order.reverse();
    }
    let path = Path::new(order)?;
    let cost = path.cost(d);
    Ok((path, cost))
}
