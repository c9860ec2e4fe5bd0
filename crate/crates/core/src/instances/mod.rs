//! Instance generators, the interval-uncertainty reduction and file I/O.

mod io;
mod tight;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphkit::Component;
use crate::model::{DistanceMatrix, EdgeSet, Instance};

pub use io::{
    read_instance, read_instance_file, read_intervals, write_instance, write_instance_file,
    write_solution, InstanceFile, MetricSpec, SolutionFile, INSTANCE_FORMAT_VERSION,
};
pub use tight::{gen_tight_family, TightFamilyCertificate, TightLayout, GADGET_OFFSETS};

/// Per-stage planar coordinates of every vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub stages: Vec<Vec<[f64; 2]>>,
}

impl PointSet {
    pub fn n(&self) -> usize {
        self.stages.first().map_or(0, Vec::len)
    }

    pub fn metrics(&self) -> Vec<DistanceMatrix> {
        self.stages
            .iter()
            .map(|p| DistanceMatrix::euclidean(p))
            .collect()
    }
}

fn default_q(n: usize, q: Option<usize>) -> usize {
    q.unwrap_or(n.div_ceil(2))
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::input(format!("generators need n >= 3, got {n}")));
    }
    Ok(())
}

/// Two independent uniform point sets in the unit square.
pub fn gen_euclidean_points(n: usize, seed: u64) -> Result<PointSet> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stages = (0..2)
        .map(|_| {
            (0..n)
                .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
                .collect()
        })
        .collect();
    Ok(PointSet { stages })
}

/// Euclidean two-stage instance; `q` defaults to `ceil(n / 2)`.
pub fn gen_euclidean(n: usize, seed: u64, q: Option<usize>) -> Result<Instance> {
    let points = gen_euclidean_points(n, seed)?;
    Instance::new(points.metrics(), default_q(n, q))
}

/// Shortest-path closure of a complete weighted graph.
pub fn metric_closure(d: &DistanceMatrix) -> DistanceMatrix {
    let n = d.n();
    let mut rows = d.rows();
    for via in 0..n {
        for a in 0..n {
            for b in 0..n {
                let alt = rows[a][via] + rows[via][b];
                if alt < rows[a][b] {
                    rows[a][b] = alt;
                }
            }
        }
    }
    DistanceMatrix::from_rows(&rows).expect("closure of a valid matrix is valid")
}

/// `k` stages of uniform edge weights in `[lo, hi]`, each replaced by its
/// shortest-path closure.
pub fn gen_random_metric_stages(
    n: usize,
    k: usize,
    seed: u64,
    lo: f64,
    hi: f64,
) -> Result<Vec<DistanceMatrix>> {
    check_n(n)?;
    if !(0.0 <= lo && lo <= hi && hi.is_finite()) {
        return Err(Error::input(format!(
            "weight range [{lo}, {hi}] is not a nonnegative interval"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..k)
        .map(|_| {
            metric_closure(&DistanceMatrix::from_fn(n, |_, _| {
                rng.random_range(lo..=hi)
            }))
        })
        .collect())
}

/// Like [`gen_random_metric_stages`] with integer weights in `lo..=hi`.
/// Every cost and every tour or tree sum is then exact in `f64`, so distinct
/// solvers agree bit for bit even on ties.
pub fn gen_integer_metric_stages(
    n: usize,
    k: usize,
    seed: u64,
    lo: u32,
    hi: u32,
) -> Result<Vec<DistanceMatrix>> {
    check_n(n)?;
    if lo > hi {
        return Err(Error::input(format!("weight range [{lo}, {hi}] is empty")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..k)
        .map(|_| {
            metric_closure(&DistanceMatrix::from_fn(n, |_, _| {
                f64::from(rng.random_range(lo..=hi))
            }))
        })
        .collect())
}

/// Two-stage metric instance with weights in `[1, 2]`; `q` defaults to
/// `ceil(n / 2)`.
pub fn gen_random_metric(n: usize, seed: u64, q: Option<usize>) -> Result<Instance> {
    Instance::new(
        gen_random_metric_stages(n, 2, seed, 1.0, 2.0)?,
        default_q(n, q),
    )
}

/// Star on `n + 1` vertices centered at vertex 0 with the metric that is 1 to
/// the center and 2 between leaves.
pub fn gen_paris_star(n: usize) -> Result<(Component, DistanceMatrix)> {
    if n < 2 {
        return Err(Error::input(format!(
            "the star needs n >= 2 leaves, got {n}"
        )));
    }
    let edges: EdgeSet = (1..=n).map(|v| crate::model::Edge::new(0, v)).collect();
    let star = Component::new((0..=n).collect(), edges)?;
    let d = DistanceMatrix::from_fn(n + 1, |u, v| if u == 0 || v == 0 { 1.0 } else { 2.0 });
    Ok((star, d))
}

/// Per-edge cost intervals `[lower, upper]`, stored as full symmetric
/// matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyInterval {
    pub lower: Vec<Vec<f64>>,
    pub upper: Vec<Vec<f64>>,
}

/// Worst case of the interval uncertainty set: every cost at its upper bound.
pub fn reduce_interval_uncertainty(intervals: &UncertaintyInterval) -> Result<DistanceMatrix> {
    let lower = DistanceMatrix::from_rows(&intervals.lower)?;
    let upper = DistanceMatrix::from_rows(&intervals.upper)?;
    if lower.n() != upper.n() {
        return Err(Error::input(format!(
            "bounds have sizes {} and {}",
            lower.n(),
            upper.n()
        )));
    }
    for u in 0..lower.n() {
        for v in 0..lower.n() {
            let (l, h) = (lower.get(u, v), upper.get(u, v));
            if l < 0.0 {
                return Err(Error::input(format!(
                    "negative lower bound {l} on ({u},{v})"
                )));
            }
            if l > h {
                return Err(Error::input(format!(
                    "lower bound {l} exceeds upper bound {h} on ({u},{v})"
                )));
            }
        }
    }
    Ok(upper)
}

/// Recoverable instance whose second stage is the worst case of `intervals`.
pub fn interval_instance(
    first_stage: DistanceMatrix,
    intervals: &UncertaintyInterval,
    q: usize,
) -> Result<Instance> {
    Instance::new(
        vec![first_stage, reduce_interval_uncertainty(intervals)?],
        q,
    )
}
