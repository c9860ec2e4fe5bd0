//! Approximation algorithms and exact oracles for the recoverable traveling
//! salesman problem: two (or k) tours under different metrics whose common
//! edge set must contain at least `q` edges.
//!
//! The main entry points are [`approx::solve_approx4`] (factor 4 for two
//! stages, any `q`) and [`approx::solve_enum2`] (factor 2 for any number of
//! stages, small constant `q`). Both return an [`approx::CertificateChain`]
//! whose inequalities are re-checked at runtime.
//!
//! ```
//! use recovtsp::approx::{solve_approx4, SolveOptions};
//! use recovtsp::instances::gen_random_metric;
//!
//! let inst = gen_random_metric(7, 1, Some(3)).unwrap();
//! let sol = solve_approx4(&inst, &SolveOptions::default()).unwrap();
//! assert!(sol.intersection.len() >= 3);
//! assert!(sol.value <= 4.0 * sol.certificate.lower_bound.unwrap() * (1.0 + 1e-9));
//! ```

pub mod approx;
pub mod error;
pub mod graphkit;
pub mod instances;
pub mod model;
pub mod oracle;
pub mod recov_st;

pub use error::{Error, Result};
pub use model::{
    approx_eq, approx_le, check_solution, mutual_intersection, tour_cost, tour_edges,
    validate_metric, DistanceMatrix, Edge, EdgeSet, FeasibilityVerdict, Instance, MetricReport,
    Tour, TriangleViolation, REL_TOL,
};
