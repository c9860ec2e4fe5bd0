use std::time::Instant;

use anyhow::{bail, Context, Result};
use recovtsp::approx::{solve_approx4, solve_enum2, Solution, SolveOptions};
use recovtsp::graphkit::Traversal;
use recovtsp::instances::{read_instance, write_solution, SolutionFile};
use recovtsp::oracle::recov_tsp_bruteforce;
use recovtsp::recov_st::{recov_st_search, RecovStOptions, DEFAULT_NODE_BUDGET};
use recovtsp::{Instance, Tour};
use serde_json::json;

use crate::{Algorithm, SolveArgs};

/// Result of one solver invocation, in the shape both `solve` and
/// `experiment` report.
pub struct Run {
    pub algorithm: Algorithm,
    pub tours: Vec<Tour>,
    pub stage_costs: Vec<f64>,
    pub value: f64,
    pub intersection: Vec<[usize; 2]>,
    pub guarantee: String,
    pub lower_bound: Option<f64>,
    pub slacks: Vec<(&'static str, f64)>,
    pub certificate: serde_json::Value,
    pub verified: bool,
    pub runtime_ms: f64,
}

impl Run {
    pub fn summary(&self) -> String {
        let mut line = format!(
            "{} {} {} {} {:.3}",
            self.algorithm.name(),
            self.value,
            self.intersection.len(),
            self.guarantee,
            self.runtime_ms
        );
        if !self.verified {
            line.push_str(" untrusted");
        }
        line
    }

    pub fn solution_file(&self) -> SolutionFile {
        SolutionFile {
            tours: self.tours.iter().map(|t| t.order().to_vec()).collect(),
            stage_costs: self.stage_costs.clone(),
            total: self.value,
            intersection: self.intersection.clone(),
            certificate: self.certificate.clone(),
            guarantee: self.guarantee.clone(),
        }
    }

    fn from_solution(
        algorithm: Algorithm,
        sol: Solution,
        extra: serde_json::Value,
        verified: bool,
    ) -> Result<Self> {
        let mut certificate = serde_json::to_value(&sol.certificate)?;
        certificate["verified"] = json!(verified);
        if !extra.is_null() {
            certificate["stats"] = extra;
        }
        Ok(Self {
            algorithm,
            slacks: sol.certificate.slacks(),
            lower_bound: sol.certificate.lower_bound,
            tours: sol.tours,
            stage_costs: sol.stage_costs,
            value: sol.value,
            intersection: sol.intersection.pairs(),
            guarantee: sol.guarantee.to_string(),
            certificate,
            verified,
            runtime_ms: 0.0,
        })
    }
}

pub fn options(args: &SolveArgs) -> SolveOptions {
    SolveOptions {
        traversal: args
            .adversarial_seed
            .map_or(Traversal::Canonical, Traversal::Seeded),
        force_nonmetric: args.force_nonmetric,
        budget: args.budget,
        heuristic_fallback: false,
        skip_verify: args.no_verify,
    }
}

pub fn solve_instance(inst: &Instance, algorithm: Algorithm, opts: &SolveOptions) -> Result<Run> {
    let started = Instant::now();
    let verified = !opts.skip_verify;
    let mut run = match algorithm {
        Algorithm::Approx4 => Run::from_solution(
            algorithm,
            solve_approx4(inst, opts)?,
            serde_json::Value::Null,
            verified,
        )?,
        Algorithm::Enum2 => {
            let out = solve_enum2(inst, opts)?;
            Run::from_solution(
                algorithm,
                out.solution,
                serde_json::to_value(out.stats)?,
                verified,
            )?
        }
        Algorithm::Oracle => {
            let opt = recov_tsp_bruteforce(inst)?;
            let verdict = recovtsp::check_solution(inst, &opt.tours);
            if !verdict.feasible {
                return Err(recovtsp::Error::Certificate(verdict.violations.join("; ")).into());
            }
            let edge_sets: Vec<_> = opt.tours.iter().map(Tour::edges).collect();
            Run {
                algorithm,
                stage_costs: opt
                    .tours
                    .iter()
                    .zip(inst.metrics())
                    .map(|(t, d)| t.cost(d))
                    .collect::<Result<_, _>>()?,
                value: opt.value,
                intersection: recovtsp::mutual_intersection(&edge_sets)?.pairs(),
                tours: opt.tours,
                guarantee: "exact".into(),
                lower_bound: Some(opt.value),
                slacks: Vec::new(),
                certificate: json!({ "method": "enumeration", "verified": true }),
                verified: true,
                runtime_ms: 0.0,
            }
        }
        Algorithm::RecovSt => {
            if inst.k() != 2 {
                bail!(
                    "recov-st needs exactly two stages, the instance has {}",
                    inst.k()
                );
            }
            let node_budget = match opts.budget {
                Some(b) => u64::try_from(b).context("budget does not fit in 64 bits")?,
                None => DEFAULT_NODE_BUDGET,
            };
            let search = recov_st_search(
                inst.metric(0),
                inst.metric(1),
                inst.q(),
                &RecovStOptions {
                    node_budget,
                    incumbent: None,
                },
            )?;
            let pair = search.pair;
            Run {
                algorithm,
                tours: Vec::new(),
                stage_costs: vec![inst.metric(0).cost(&pair.t1), inst.metric(1).cost(&pair.t2)],
                value: pair.value,
                intersection: pair.intersection.pairs(),
                guarantee: "exact".into(),
                lower_bound: Some(pair.value),
                slacks: Vec::new(),
                certificate: json!({
                    "t1": pair.t1.pairs(),
                    "t2": pair.t2.pairs(),
                    "nodes": search.nodes,
                    "closed_at_root": search.closed_at_root,
                    "verified": true,
                }),
                verified: true,
                runtime_ms: 0.0,
            }
        }
    };
    run.runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(run)
}

pub fn run(args: &SolveArgs) -> Result<()> {
    let inst = read_instance(&args.instance)?;
    let run = solve_instance(&inst, args.algorithm, &options(args))
        .with_context(|| format!("{} on {}", args.algorithm.name(), args.instance.display()))?;
    if let Some(out) = &args.out {
        write_solution(&run.solution_file(), out)?;
    }
    println!("{}", run.summary());
    Ok(())
}
