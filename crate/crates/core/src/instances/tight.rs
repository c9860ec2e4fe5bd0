//! The factor-4 lower-bound family: a `2 x k` grid of nine-vertex satellite
//! gadgets plus `2k - 1` helper vertices.
//!
//! Every gadget has a center `C`, four arms `E N W S` at distance `2 eps` and
//! four satellites. In stage 1 the satellites hang off `E` and `W`; in stage 2
//! they move next to `N` and `S`. Helpers sit `3 eps` from the top-row grid
//! points (below each top center, and right of every top center but the
//! last) and make both minimum spanning trees unique.

use serde::{Deserialize, Serialize};

use super::PointSet;
use crate::approx::{solve_approx4_with_trees, SolveOptions};
use crate::error::{Error, Result};
use crate::graphkit::{components, double_tree_hamilton_path, mst, Path, Traversal};
use crate::model::{check_solution, DistanceMatrix, Edge, EdgeSet, Instance, Tour};
use crate::recov_st::TreePair;

const C: usize = 0;
const E: usize = 1;
const N: usize = 2;
const W: usize = 3;
const S: usize = 4;
const NE: usize = 5;
const SE: usize = 6;
const NW: usize = 7;
const SW: usize = 8;

/// `(name, stage-1 offset, stage-2 offset)` in units of `eps`, indexed by the
/// position of the vertex inside its gadget.
pub const GADGET_OFFSETS: [(&str, [f64; 2], [f64; 2]); 9] = [
    ("C", [0.0, 0.0], [0.0, 0.0]),
    ("E", [2.0, 0.0], [2.0, 0.0]),
    ("N", [0.0, 2.0], [0.0, 2.0]),
    ("W", [-2.0, 0.0], [-2.0, 0.0]),
    ("S", [0.0, -2.0], [0.0, -2.0]),
    ("NE", [2.0, 1.0], [1.0, 2.0]),
    ("SE", [2.0, -1.0], [1.0, -2.0]),
    ("NW", [-2.0, 1.0], [-1.0, 2.0]),
    ("SW", [-2.0, -1.0], [-1.0, -2.0]),
];

/// Vertex numbering: gadget `(row, col)` occupies `9 * (row * k + col) ..`
/// in [`GADGET_OFFSETS`] order, then `k` vertical helpers, then `k - 1`
/// horizontal helpers. Row 0 is the top row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightLayout {
    pub k: usize,
}

impl TightLayout {
    pub fn n(self) -> usize {
        20 * self.k - 1
    }

    pub fn gadget(self, row: usize, col: usize, part: usize) -> usize {
        9 * (row * self.k + col) + part
    }

    /// Helper below the top center of column `col`.
    pub fn vertical_helper(self, col: usize) -> usize {
        18 * self.k + col
    }

    /// Helper right of the top center of column `col < k - 1`.
    pub fn horizontal_helper(self, col: usize) -> usize {
        19 * self.k + col
    }

    pub fn is_satellite(self, v: usize) -> bool {
        v < 18 * self.k && v % 9 >= NE
    }

    fn points(self, eps: f64, stage: usize) -> Vec<[f64; 2]> {
        let mut p = vec![[0.0; 2]; self.n()];
        for row in 0..2 {
            for col in 0..self.k {
                let (x, y) = (col as f64, -(row as f64));
                for (part, (_, o1, o2)) in GADGET_OFFSETS.iter().enumerate() {
                    let o = if stage == 0 { o1 } else { o2 };
                    p[self.gadget(row, col, part)] = [x + o[0] * eps, y + o[1] * eps];
                }
            }
        }
        for col in 0..self.k {
            p[self.vertical_helper(col)] = [col as f64, -3.0 * eps];
        }
        for col in 0..self.k - 1 {
            p[self.horizontal_helper(col)] = [col as f64 + 3.0 * eps, 0.0];
        }
        p
    }

    /// Edges shared by both minimum spanning trees: the four arms of every
    /// gadget and the helper connections.
    pub fn shared_edges(self) -> EdgeSet {
        let mut t = EdgeSet::new();
        for row in 0..2 {
            for col in 0..self.k {
                for arm in [E, N, W, S] {
                    t.insert(Edge::new(
                        self.gadget(row, col, C),
                        self.gadget(row, col, arm),
                    ));
                }
            }
        }
        for col in 0..self.k {
            let h = self.vertical_helper(col);
            t.insert(Edge::new(self.gadget(0, col, S), h));
            t.insert(Edge::new(h, self.gadget(1, col, N)));
        }
        for col in 0..self.k - 1 {
            let h = self.horizontal_helper(col);
            t.insert(Edge::new(self.gadget(0, col, E), h));
            t.insert(Edge::new(h, self.gadget(0, col + 1, W)));
        }
        t
    }

    /// Minimum spanning tree of stage 0 or 1 as constructed.
    pub fn tree(self, stage: usize) -> EdgeSet {
        let mut t = self.shared_edges();
        let hang = if stage == 0 {
            [(E, NE), (E, SE), (W, NW), (W, SW)]
        } else {
            [(N, NW), (N, NE), (S, SW), (S, SE)]
        };
        for row in 0..2 {
            for col in 0..self.k {
                for (arm, sat) in hang {
                    t.insert(Edge::new(
                        self.gadget(row, col, arm),
                        self.gadget(row, col, sat),
                    ));
                }
            }
        }
        t
    }

    /// Choice order that makes the pipeline produce the worst tours.
    ///
    /// Satellites rank first, so the Euler circuit detours into them at the
    /// first visit of their arm and the tour only reaches them after the
    /// whole forced path. The top-left center ranks next, which makes it the
    /// DFS root, followed by all `S`, `N`, `E` and `W` arms. The DFS then
    /// walks down each column before moving right and comes back to the
    /// top-left `W` arm at the very end.
    pub fn adversarial_ranks(self) -> Vec<usize> {
        let n = self.n();
        let mut order: Vec<usize> = (0..n).filter(|&v| self.is_satellite(v)).collect();
        order.push(self.gadget(0, 0, C));
        for arm in [S, N, E, W] {
            order.extend((0..18 * self.k).filter(|&v| v % 9 == arm));
        }
        let mut placed = vec![false; n];
        for &v in &order {
            placed[v] = true;
        }
        order.extend((0..n).filter(|&v| !placed[v]));
        let mut ranks = vec![0; n];
        for (r, v) in order.into_iter().enumerate() {
            ranks[v] = r;
        }
        ranks
    }

    /// A tour of cost about `2k` in both stages: down the first column, along
    /// the bottom row, up the last column and back along the top row.
    pub fn good_tour(self) -> Vec<usize> {
        let k = self.k;
        let g = |row, col, part| self.gadget(row, col, part);
        let mut t = Vec::with_capacity(self.n());
        t.extend([
            g(0, 0, SE),
            g(0, 0, C),
            g(0, 0, E),
            self.horizontal_helper(0),
        ]);
        t.extend([NE, N, NW, W, SW, S].map(|p| g(0, 0, p)));
        t.push(self.vertical_helper(0));
        t.extend([N, NW, W, SW, S, SE, E, C, NE].map(|p| g(1, 0, p)));
        for col in 1..k - 1 {
            t.extend([NW, W, SW, S, SE, E, C, N, NE].map(|p| g(1, col, p)));
        }
        t.extend([NW, C, W, SW, S, SE, E, NE, N].map(|p| g(1, k - 1, p)));
        t.push(self.vertical_helper(k - 1));
        t.extend([S, SE, E, NE, N, NW, W, C, SW].map(|p| g(0, k - 1, p)));
        for col in (1..k - 1).rev() {
            t.extend([
                g(0, col, SE),
                self.vertical_helper(col),
                g(0, col, S),
                g(0, col, C),
                g(0, col, E),
            ]);
            t.push(self.horizontal_helper(col));
            t.extend([NE, N, NW, W, SW].map(|p| g(0, col, p)));
        }
        t
    }
}

/// Smallest gap between a non-tree edge and the heaviest tree edge on the
/// cycle it closes. A positive gap means `tree` is the unique minimum
/// spanning tree.
pub fn unique_mst_margin(d: &DistanceMatrix, tree: &EdgeSet) -> f64 {
    let n = d.n();
    let mut adj = vec![Vec::new(); n];
    for e in tree.iter() {
        adj[e.u()].push(e.v());
        adj[e.v()].push(e.u());
    }
    let mut margin = f64::INFINITY;
    let mut heaviest = vec![0.0f64; n];
    for s in 0..n {
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        heaviest[s] = 0.0;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    heaviest[y] = heaviest[x].max(d.get(x, y));
                    stack.push(y);
                }
            }
        }
        for (v, &h) in heaviest.iter().enumerate().skip(s + 1) {
            if !tree.contains(Edge::new(s, v)) {
                margin = margin.min(d.get(s, v) - h);
            }
        }
    }
    margin
}

/// Everything needed to replay the lower-bound example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightFamilyCertificate {
    pub k: usize,
    pub eps: f64,
    pub q: usize,
    pub points: PointSet,
    pub t1: EdgeSet,
    pub t2: EdgeSet,
    pub intersection: EdgeSet,
    /// Smallest uniqueness gap of the two spanning trees.
    pub mst_margin: f64,
    /// Double-tree path through the intersection under the adversarial order.
    pub path: Path,
    pub traversal: Traversal,
    /// Output of the approximation pipeline under `traversal`.
    pub bad_tours: Vec<Tour>,
    pub bad_value: f64,
    pub good_tour: Tour,
    pub good_costs: [f64; 2],
    pub good_value: f64,
    /// `bad_value / good_value`.
    pub ratio: f64,
    /// Leading terms `2 (8k - 4)` and `4k` of the two values.
    pub bad_asymptotic: f64,
    pub good_asymptotic: f64,
}

impl TightFamilyCertificate {
    pub fn layout(&self) -> TightLayout {
        TightLayout { k: self.k }
    }

    pub fn instance(&self) -> Result<Instance> {
        Instance::new(self.points.metrics(), self.q)
    }

    /// Re-checks every recorded property against the point coordinates.
    pub fn verify(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Certificate(msg));
        let layout = self.layout();
        let inst = self.instance()?;
        if inst.n() != layout.n() {
            return fail(format!(
                "{} vertices, layout needs {}",
                inst.n(),
                layout.n()
            ));
        }
        for (stage, t) in [&self.t1, &self.t2].into_iter().enumerate() {
            let d = inst.metric(stage);
            if &mst(d) != t {
                return fail(format!(
                    "stage {stage}: recorded tree is not the minimum spanning tree"
                ));
            }
            if unique_mst_margin(d, t) <= 0.0 {
                return fail(format!(
                    "stage {stage}: minimum spanning tree is not unique"
                ));
            }
        }
        if self.t1.intersection(&self.t2) != self.intersection || self.intersection.len() < self.q {
            return fail(format!(
                "intersection has {} edges, q = {}",
                self.intersection.len(),
                self.q
            ));
        }
        let comps = components(&self.intersection)?;
        if comps.len() != 1
            || !self
                .path
                .edges()
                .iter()
                .all(|e| comps[0].vertices.binary_search(&e.u()).is_ok())
        {
            return fail("intersection is not a single component covered by the path".into());
        }
        if self.path.len() != comps[0].vertices.len() {
            return fail("path does not visit the whole intersection".into());
        }
        for (name, tours) in [
            ("bad", self.bad_tours.clone()),
            ("good", vec![self.good_tour.clone(); 2]),
        ] {
            let verdict = check_solution(&inst, &tours);
            if !verdict.feasible {
                return fail(format!("{name} tours: {}", verdict.violations.join("; ")));
            }
        }
        if inst.objective(&self.bad_tours)? != self.bad_value {
            return fail("recorded bad value does not match the tours".into());
        }
        let good = [
            self.good_tour.cost(inst.metric(0))?,
            self.good_tour.cost(inst.metric(1))?,
        ];
        if good != self.good_costs || good[0] + good[1] != self.good_value {
            return fail("recorded good costs do not match the tour".into());
        }
        Ok(())
    }
}

/// Builds the example for `k >= 2` and `0 < eps < 1 / k^2`, runs the
/// approximation pipeline on it with the adversarial order and verifies the
/// result.
///
/// The intersection of the two trees is a tree on `12k - 1` vertices, so it
/// has `12k - 2` edges and `q` is set to that.
pub fn gen_tight_family(k: usize, eps: f64) -> Result<TightFamilyCertificate> {
    if k < 2 {
        return Err(Error::input(format!("k must be at least 2, got {k}")));
    }
    let limit = 1.0 / (k * k) as f64;
    if !(eps > 0.0 && eps < limit) {
        return Err(Error::input(format!(
            "eps must lie in (0, 1/k^2) = (0, {limit}), got {eps}"
        )));
    }
    let layout = TightLayout { k };
    let points = PointSet {
        stages: vec![layout.points(eps, 0), layout.points(eps, 1)],
    };
    let q = 12 * k - 2;
    let inst = Instance::new(points.metrics(), q)?;
    let (d1, d2) = (inst.metric(0), inst.metric(1));

    let t1 = layout.tree(0);
    let t2 = layout.tree(1);
    let mst_margin = unique_mst_margin(d1, &t1).min(unique_mst_margin(d2, &t2));
    let pair = TreePair::new(d1, d2, t1.clone(), t2.clone(), true);
    let intersection = pair.intersection.clone();

    let traversal = Traversal::Ranked(layout.adversarial_ranks());
    let comps = components(&intersection)?;
    if comps.len() != 1 {
        return Err(Error::Certificate(format!(
            "intersection has {} components",
            comps.len()
        )));
    }
    let path = double_tree_hamilton_path(&comps[0], &inst.combined(), &traversal)?;
    let opts = SolveOptions {
        traversal: traversal.clone(),
        ..Default::default()
    };
    let bad = solve_approx4_with_trees(&inst, pair, &opts)?;
    if bad.certificate.paths != [path.clone()] {
        return Err(Error::Certificate(
            "pipeline used a different forced path".into(),
        ));
    }

    let good_tour = Tour::new(layout.good_tour())?;
    let good_costs = [good_tour.cost(d1)?, good_tour.cost(d2)?];
    let good_value = good_costs[0] + good_costs[1];
    let cert = TightFamilyCertificate {
        k,
        eps,
        q,
        points,
        t1,
        t2,
        intersection,
        mst_margin,
        path,
        traversal,
        ratio: bad.value / good_value,
        bad_tours: bad.tours,
        bad_value: bad.value,
        good_tour,
        good_costs,
        good_value,
        bad_asymptotic: 2.0 * (8 * k - 4) as f64,
        good_asymptotic: 4.0 * k as f64,
    };
    cert.verify()?;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let l = TightLayout { k: 3 };
        assert_eq!(l.n(), 59);
        assert_eq!(l.tree(0).len(), 58);
        assert_eq!(l.shared_edges().len(), 34);
        assert_eq!(l.tree(0).intersection(&l.tree(1)), l.shared_edges());
        let mut good = l.good_tour();
        good.sort();
        assert_eq!(good, (0..59).collect::<Vec<_>>());
    }

    #[test]
    fn eps_range() {
        assert!(gen_tight_family(3, 0.2).is_err());
        assert!(gen_tight_family(3, 0.0).is_err());
        assert!(gen_tight_family(1, 1e-3).is_err());
    }

    #[test]
    fn small_family_is_certified() {
        let c = gen_tight_family(2, 1e-3).unwrap();
        assert_eq!(c.q, 22);
        assert!(c.mst_margin > 0.0);
        assert!(c.ratio > 2.9, "ratio {}", c.ratio);
    }
}
