//! Problem model: distance matrices, instances, tours, edge sets and the
//! feasibility check for the k-stage recoverable TSP.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used for every floating point inequality certificate.
pub const REL_TOL: f64 = 1e-9;

/// `a <= b` up to [`REL_TOL`] relative slack.
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * a.abs().max(b.abs())
}

/// `a == b` up to [`REL_TOL`] relative slack.
pub fn approx_eq(a: f64, b: f64) -> bool {
    approx_le(a, b) && approx_le(b, a)
}

/// Dense symmetric matrix of pairwise distances on vertices `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from full row-major storage.
    ///
    /// Only structural problems are rejected here (non-square, empty, NaN or
    /// infinite entries). Symmetry and the metric axioms are reported by
    /// [`DistanceMatrix::validate_metric`].
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::input("distance matrix has no rows"));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::input(format!(
                    "distance matrix is not square: row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::input(format!(
                        "entry ({i},{j}) is not a finite number: {x}"
                    )));
                }
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    /// Builds a symmetric matrix with zero diagonal from `f(u, v)` evaluated for `u < v`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for u in 0..n {
            for v in (u + 1)..n {
                let x = f(u, v);
                data[u * n + v] = x;
                data[v * n + u] = x;
            }
        }
        Self { n, data }
    }

    /// Euclidean distances between planar points.
    pub fn euclidean(points: &[[f64; 2]]) -> Self {
        Self::from_fn(points.len(), |u, v| {
            let dx = points[u][0] - points[v][0];
            let dy = points[u][1] - points[v][1];
            dx.hypot(dy)
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    #[inline]
    pub fn edge(&self, e: Edge) -> f64 {
        self.get(e.0, e.1)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Entry-wise sum of several matrices of equal size.
    pub fn sum<'a>(mats: impl IntoIterator<Item = &'a DistanceMatrix>) -> Result<Self> {
        let mut it = mats.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::input("sum of zero matrices"))?;
        let mut out = first.clone();
        for m in it {
            if m.n != out.n {
                return Err(Error::input(format!("size mismatch: {} vs {}", m.n, out.n)));
            }
            for (a, b) in out.data.iter_mut().zip(&m.data) {
                *a += b;
            }
        }
        Ok(out)
    }

    /// Sum of the distances of an edge set, accumulated in edge order.
    pub fn cost(&self, edges: &EdgeSet) -> f64 {
        edges.iter().map(|e| self.edge(e)).sum()
    }

    /// Checks symmetry, nonnegativity, the zero diagonal and every triangle
    /// inequality. `O(n^3)`.
    pub fn validate_metric(&self) -> MetricReport {
        let n = self.n;
        let mut report = MetricReport {
            n,
            ..MetricReport::default()
        };
        for u in 0..n {
            if self.get(u, u) != 0.0 {
                report.nonzero_diagonal.push(u);
            }
            for v in 0..n {
                if self.get(u, v) < 0.0 {
                    report.negative_entries.push((u, v));
                }
                if u < v && self.get(u, v) != self.get(v, u) {
                    report.asymmetric_pairs.push((u, v));
                }
            }
        }
        for a in 0..n {
            for c in (a + 1)..n {
                let direct = self.get(a, c);
                for b in 0..n {
                    if b == a || b == c {
                        continue;
                    }
                    let detour = self.get(a, b) + self.get(b, c);
                    if !approx_le(direct, detour) {
                        report.triangle_violations.push(TriangleViolation {
                            a,
                            via: b,
                            c,
                            slack: direct - detour,
                        });
                    }
                }
            }
        }
        report
    }
}

/// `d(a, c) > d(a, via) + d(via, c)` by `slack`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleViolation {
    pub a: usize,
    pub via: usize,
    pub c: usize,
    pub slack: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub n: usize,
    pub asymmetric_pairs: Vec<(usize, usize)>,
    pub negative_entries: Vec<(usize, usize)>,
    pub nonzero_diagonal: Vec<usize>,
    pub triangle_violations: Vec<TriangleViolation>,
}

impl MetricReport {
    pub fn symmetric(&self) -> bool {
        self.asymmetric_pairs.is_empty()
    }

    pub fn nonnegative(&self) -> bool {
        self.negative_entries.is_empty()
    }

    pub fn zero_diagonal(&self) -> bool {
        self.nonzero_diagonal.is_empty()
    }

    /// Symmetric, nonnegative, zero diagonal.
    pub fn is_distance(&self) -> bool {
        self.symmetric() && self.nonnegative() && self.zero_diagonal()
    }

    pub fn is_metric(&self) -> bool {
        self.is_distance() && self.triangle_violations.is_empty()
    }

    /// Short human readable description of the first problems found.
    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if let Some(&(u, v)) = self.asymmetric_pairs.first() {
            parts.push(format!(
                "{} asymmetric pairs (first {u},{v})",
                self.asymmetric_pairs.len()
            ));
        }
        if let Some(&(u, v)) = self.negative_entries.first() {
            parts.push(format!(
                "{} negative entries (first {u},{v})",
                self.negative_entries.len()
            ));
        }
        if let Some(&u) = self.nonzero_diagonal.first() {
            parts.push(format!(
                "{} nonzero diagonal entries (first {u})",
                self.nonzero_diagonal.len()
            ));
        }
        if let Some(t) = self.triangle_violations.first() {
            parts.push(format!(
                "{} triangle violations (first d({},{}) exceeds the route via {} by {})",
                self.triangle_violations.len(),
                t.a,
                t.c,
                t.via,
                t.slack
            ));
        }
        if parts.is_empty() {
            "metric".to_string()
        } else {
            parts.join("; ")
        }
    }
}

/// Free-function form of [`DistanceMatrix::validate_metric`].
pub fn validate_metric(d: &DistanceMatrix) -> MetricReport {
    d.validate_metric()
}

/// Undirected edge `{u, v}` stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 2]", into = "[usize; 2]")]
pub struct Edge(usize, usize);

impl TryFrom<[usize; 2]> for Edge {
    type Error = Error;

    fn try_from([u, v]: [usize; 2]) -> Result<Self> {
        if u == v {
            return Err(Error::input(format!("loop edge at vertex {u}")));
        }
        Ok(Edge::new(u, v))
    }
}

impl From<Edge> for [usize; 2] {
    fn from(e: Edge) -> Self {
        [e.0, e.1]
    }
}

impl Edge {
    /// # Panics
    /// On a loop `u == v`.
    pub fn new(u: usize, v: usize) -> Self {
        assert!(u != v, "loop edge {{{u},{u}}}");
        if u < v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn u(self) -> usize {
        self.0
    }

    pub fn v(self) -> usize {
        self.1
    }

    pub fn ends(self) -> (usize, usize) {
        (self.0, self.1)
    }

    pub fn contains(self, x: usize) -> bool {
        self.0 == x || self.1 == x
    }

    /// The endpoint that is not `x`.
    pub fn other(self, x: usize) -> usize {
        if self.0 == x {
            self.1
        } else {
            self.0
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

/// Set of undirected edges, iterated in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeSet(BTreeSet<Edge>);

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an edge set from vertex pairs, rejecting loops, duplicates and
    /// endpoints outside `0..n`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut set = Self::new();
        for &(u, v) in pairs {
            if u == v {
                return Err(Error::input(format!("loop edge at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "edge {{{u},{v}}} out of range for n = {n}"
                )));
            }
            if !set.insert(Edge::new(u, v)) {
                return Err(Error::input(format!("duplicate edge {{{u},{v}}}")));
            }
        }
        Ok(set)
    }

    pub fn insert(&mut self, e: Edge) -> bool {
        self.0.insert(e)
    }

    pub fn remove(&mut self, e: Edge) -> bool {
        self.0.remove(&e)
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.0.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.0.iter().copied()
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.union(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Largest endpoint plus one, or 0 for the empty set.
    pub fn vertex_bound(&self) -> usize {
        self.iter().map(|e| e.1 + 1).max().unwrap_or(0)
    }

    pub fn pairs(&self) -> Vec<[usize; 2]> {
        self.iter().map(|e| [e.0, e.1]).collect()
    }
}

impl FromIterator<Edge> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        EdgeSet(iter.into_iter().collect())
    }
}

impl Extend<Edge> for EdgeSet {
    fn extend<I: IntoIterator<Item = Edge>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

/// Intersection of all given edge sets.
pub fn mutual_intersection(sets: &[EdgeSet]) -> Result<EdgeSet> {
    let (first, rest) = sets
        .split_first()
        .ok_or_else(|| Error::input("intersection of an empty list of edge sets"))?;
    Ok(rest
        .iter()
        .fold(first.clone(), |acc, s| acc.intersection(s)))
}

/// Hamiltonian cycle given as a cyclic vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Tour {
    order: Vec<usize>,
}

impl Tour {
    /// Accepts any permutation of `0..n` with `n >= 3`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n < 3 {
            return Err(Error::input(format!(
                "a tour needs at least 3 vertices to have distinct edges, got {n}"
            )));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n {
                return Err(Error::input(format!(
                    "tour vertex {v} out of range for n = {n}"
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::input(format!("tour visits vertex {v} twice")));
            }
        }
        Ok(Self { order })
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    /// Consecutive pairs, closing with `{v_{n-1}, v_0}`.
    pub fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order.len();
        (0..n).map(move |i| (self.order[i], self.order[(i + 1) % n]))
    }

    pub fn edges(&self) -> EdgeSet {
        self.steps().map(|(u, v)| Edge::new(u, v)).collect()
    }

    pub fn cost(&self, d: &DistanceMatrix) -> Result<f64> {
        if d.n() != self.n() {
            return Err(Error::input(format!(
                "tour has {} vertices but the matrix has {}",
                self.n(),
                d.n()
            )));
        }
        // Summed along the rotation starting at vertex 0, in the direction of
        // its smaller neighbour, so equal tours always give identical floats.
        let n = self.n();
        let start = self
            .order
            .iter()
            .position(|&v| v == 0)
            .expect("permutation contains 0");
        let forward = self.order[(start + 1) % n] < self.order[(start + n - 1) % n];
        let at = |i: usize| {
            if forward {
                self.order[(start + i) % n]
            } else {
                self.order[(start + n - i) % n]
            }
        };
        Ok((0..n).map(|i| d.get(at(i), at(i + 1))).sum())
    }

    pub fn reversed(&self) -> Tour {
        Tour {
            order: self.order.iter().rev().copied().collect(),
        }
    }

    pub fn rotated(&self, by: usize) -> Tour {
        let mut order = self.order.clone();
        order.rotate_left(by % self.n());
        Tour { order }
    }
}

impl TryFrom<Vec<usize>> for Tour {
    type Error = Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        Tour::new(order)
    }
}

impl From<Tour> for Vec<usize> {
    fn from(t: Tour) -> Self {
        t.order
    }
}

impl AsRef<[usize]> for Tour {
    fn as_ref(&self) -> &[usize] {
        &self.order
    }
}

pub fn tour_cost(d: &DistanceMatrix, tour: &Tour) -> Result<f64> {
    tour.cost(d)
}

/// Edge set of a raw cyclic order; validates it as a tour first.
pub fn tour_edges(order: &[usize]) -> Result<EdgeSet> {
    Ok(Tour::new(order.to_vec())?.edges())
}

/// An instance `(V, d_1, ..., d_k, q)` of the k-stage recoverable TSP.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    n: usize,
    metrics: Vec<DistanceMatrix>,
    q: usize,
}

impl Instance {
    /// Requires `k >= 2` matrices of equal size, each symmetric and nonnegative
    /// with zero diagonal, and `q <= n`.
    pub fn new(metrics: Vec<DistanceMatrix>, q: usize) -> Result<Self> {
        if metrics.len() < 2 {
            return Err(Error::input(format!(
                "need at least 2 stages, got {}",
                metrics.len()
            )));
        }
        let n = metrics[0].n();
        for (i, m) in metrics.iter().enumerate() {
            if m.n() != n {
                return Err(Error::input(format!(
                    "metric {i} has {} vertices, metric 0 has {n}",
                    m.n()
                )));
            }
            let report = m.validate_metric();
            if !report.is_distance() {
                return Err(Error::input(format!(
                    "metric {i} is not a distance matrix: {}",
                    report.summary()
                )));
            }
        }
        if q > n {
            return Err(Error::Infeasible(format!(
                "q = {q} exceeds the number of tour edges n = {n}"
            )));
        }
        Ok(Self { n, metrics, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k(&self) -> usize {
        self.metrics.len()
    }

    pub fn metrics(&self) -> &[DistanceMatrix] {
        &self.metrics
    }

    pub fn metric(&self, stage: usize) -> &DistanceMatrix {
        &self.metrics[stage]
    }

    /// Same metrics, different intersection size.
    pub fn with_q(&self, q: usize) -> Result<Self> {
        Instance::new(self.metrics.clone(), q)
    }

    /// `d_1 + ... + d_k`.
    pub fn combined(&self) -> DistanceMatrix {
        DistanceMatrix::sum(&self.metrics).expect("instance metrics share n")
    }

    /// Objective value `sum_i d_i(C_i)`.
    pub fn objective(&self, tours: &[Tour]) -> Result<f64> {
        if tours.len() != self.k() {
            return Err(Error::input(format!(
                "expected {} tours, got {}",
                self.k(),
                tours.len()
            )));
        }
        tours
            .iter()
            .zip(&self.metrics)
            .map(|(t, d)| t.cost(d))
            .sum()
    }

    /// Every metric passes [`DistanceMatrix::validate_metric`].
    pub fn is_metric(&self) -> bool {
        self.metrics.iter().all(|m| m.validate_metric().is_metric())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub intersection_size: usize,
    pub violations: Vec<String>,
}

/// Checks that `tours` are `k` Hamiltonian cycles on the instance's vertex set
/// whose common edge set has at least `q` edges.
pub fn check_solution<T: AsRef<[usize]>>(inst: &Instance, tours: &[T]) -> FeasibilityVerdict {
    let mut violations = Vec::new();
    if tours.len() != inst.k() {
        violations.push(format!("expected {} tours, got {}", inst.k(), tours.len()));
    }
    let mut edge_sets = Vec::with_capacity(tours.len());
    for (i, t) in tours.iter().enumerate() {
        let order = t.as_ref();
        if order.len() != inst.n() {
            violations.push(format!(
                "tour {i} has {} vertices, instance has {}",
                order.len(),
                inst.n()
            ));
            continue;
        }
        match Tour::new(order.to_vec()) {
            Ok(tour) => edge_sets.push(tour.edges()),
            Err(e) => violations.push(format!("tour {i}: {e}")),
        }
    }
    let intersection_size = if edge_sets.is_empty() {
        0
    } else {
        mutual_intersection(&edge_sets)
            .map(|s| s.len())
            .unwrap_or(0)
    };
    if violations.is_empty() && intersection_size < inst.q() {
        violations.push(format!(
            "tours share {intersection_size} edges but q = {} requires {} more",
            inst.q(),
            inst.q() - intersection_size
        ));
    }
    FeasibilityVerdict {
        feasible: violations.is_empty(),
        intersection_size,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> DistanceMatrix {
        DistanceMatrix::from_fn(n, |_, _| 1.0)
    }

    fn triangle(ab: f64, ac: f64, bc: f64) -> DistanceMatrix {
        DistanceMatrix::from_rows(&[vec![0.0, ab, ac], vec![ab, 0.0, bc], vec![ac, bc, 0.0]])
            .unwrap()
    }

    #[test]
    fn unit_metric_has_no_violations() {
        let r = unit(3).validate_metric();
        assert!(r.is_metric());
        assert!(r.triangle_violations.is_empty());
    }

    #[test]
    fn reports_the_violated_triangle_with_its_slack() {
        let r = triangle(1.0, 3.0, 1.0).validate_metric();
        assert!(r.is_distance());
        assert_eq!(
            r.triangle_violations,
            vec![TriangleViolation {
                a: 0,
                via: 1,
                c: 2,
                slack: 1.0
            }]
        );
        assert!(!r.is_metric());
    }

    #[test]
    fn malformed_matrices_are_rejected() {
        assert!(DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0]]).is_err());
        assert!(DistanceMatrix::from_rows(&[vec![0.0, f64::NAN], vec![1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_rows(&[]).is_err());
        let asym = DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert!(!asym.validate_metric().symmetric());
    }

    #[test]
    fn tour_costs() {
        let t = Tour::new(vec![2, 0, 3, 1]).unwrap();
        assert_eq!(t.cost(&unit(4)).unwrap(), 4.0);
        let t = Tour::new(vec![0, 1, 2]).unwrap();
        assert_eq!(t.cost(&triangle(1.0, 2.0, 3.0)).unwrap(), 6.0);
        assert!(t.cost(&unit(4)).is_err());
    }

    #[test]
    fn tour_edge_sets() {
        let e = tour_edges(&[0, 1, 2]).unwrap();
        assert_eq!(
            e,
            EdgeSet::from_pairs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
        );
        let t = Tour::new(vec![0, 1, 2, 3]).unwrap();
        assert_eq!(t.edges().len(), 4);
        assert_eq!(t.edges(), t.reversed().edges());
        assert!(tour_edges(&[0, 1]).is_err());
        assert!(tour_edges(&[0, 1, 1]).is_err());
        assert!(tour_edges(&[0, 1, 5]).is_err());
    }

    #[test]
    fn intersections() {
        let t = Tour::new(vec![0, 1, 2, 3, 4]).unwrap().edges();
        assert_eq!(
            mutual_intersection(&[t.clone(), t.clone()]).unwrap().len(),
            5
        );
        let a = EdgeSet::from_pairs(6, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let b = EdgeSet::from_pairs(6, &[(3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(mutual_intersection(&[a, b]).unwrap().is_empty());
        assert!(mutual_intersection(&[]).is_err());
    }

    #[test]
    fn instance_construction_rules() {
        assert!(Instance::new(vec![unit(4)], 0).is_err());
        assert!(Instance::new(vec![unit(4), unit(5)], 0).is_err());
        assert!(matches!(
            Instance::new(vec![unit(4), unit(4)], 5),
            Err(Error::Infeasible(_))
        ));
        let inst = Instance::new(vec![unit(4), unit(4)], 0).unwrap();
        assert_eq!((inst.n(), inst.k(), inst.q()), (4, 2, 0));
    }

    #[test]
    fn feasibility_verdicts() {
        let inst = Instance::new(vec![unit(5), unit(5)], 5).unwrap();
        let t = vec![0, 1, 2, 3, 4];
        let v = check_solution(&inst, &[t.clone(), t.clone()]);
        assert!(v.feasible);
        assert_eq!(v.intersection_size, 5);

        // Shared edges: {0,1} and {2,3}.
        let inst = Instance::new(vec![unit(5), unit(5)], 3).unwrap();
        let v = check_solution(&inst, &[vec![0, 1, 2, 3, 4], vec![0, 1, 4, 2, 3]]);
        assert!(!v.feasible);
        assert_eq!(v.intersection_size, 2);
        assert!(v.violations[0].contains("1 more"), "{:?}", v.violations);

        let v = check_solution(&inst, &[vec![0, 1, 2, 3, 4], vec![0, 1, 2, 3, 3]]);
        assert!(!v.feasible);
        let v = check_solution(&inst, &[vec![0, 1, 2, 3, 4]]);
        assert!(!v.feasible);
    }
}
