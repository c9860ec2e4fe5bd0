use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use recovtsp::approx::SolveOptions;
use recovtsp::graphkit::Traversal;
use recovtsp::instances::{
    gen_euclidean_points, gen_random_metric_stages, gen_tight_family, read_instance,
};
use recovtsp::oracle::recov_tsp_bruteforce_profile;
use recovtsp::{DistanceMatrix, Instance};
use serde::{Deserialize, Serialize};

use crate::solve::solve_instance;
use crate::Algorithm;

/// Bump when the column set or order changes.
pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(clap::Args)]
pub struct Args {
    /// JSON experiment configuration.
    pub config: PathBuf,
    /// CSV report path.
    #[arg(short, long)]
    pub out: PathBuf,
    /// Also write the rows as a JSON array.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Parallel instances; defaults to the number of cores.
    #[arg(long, env = "RECOVTSP_JOBS")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub instances: Vec<InstanceSpec>,
    pub algorithms: Vec<Algorithm>,
    /// Compare against the brute-force optimum where its size limits allow.
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub budget: Option<u128>,
    #[serde(default)]
    pub adversarial_seed: Option<u64>,
    #[serde(default)]
    pub no_verify: bool,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    RandomMetric {
        n: Vec<usize>,
        seeds: Seeds,
        #[serde(default)]
        q: QSpec,
        #[serde(default = "two")]
        stages: usize,
        #[serde(default = "one")]
        lo: f64,
        #[serde(default = "two_f")]
        hi: f64,
    },
    Euclidean {
        n: Vec<usize>,
        seeds: Seeds,
        #[serde(default)]
        q: QSpec,
    },
    TightFamily {
        k: Vec<usize>,
        #[serde(default = "default_eps")]
        eps: f64,
    },
    File {
        path: PathBuf,
        #[serde(default)]
        q: QSpec,
    },
}

fn two() -> usize {
    2
}
fn one() -> f64 {
    1.0
}
fn two_f() -> f64 {
    2.0
}
fn default_eps() -> f64 {
    1e-4
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Range { start: u64, count: u64 },
}

impl Seeds {
    fn values(&self) -> Vec<u64> {
        match self {
            Seeds::List(v) => v.clone(),
            Seeds::Range { start, count } => (*start..start + count).collect(),
        }
    }
}

/// `"all"`, `"default"` (the file's q, or `ceil(n / 2)`), or an explicit list.
#[derive(Debug, Default, Deserialize)]
#[serde(untagged)]
pub enum QSpec {
    #[default]
    #[serde(skip)]
    Default,
    Keyword(QKeyword),
    List(Vec<usize>),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QKeyword {
    All,
    Default,
}

impl QSpec {
    fn values(&self, n: usize, default: usize) -> Vec<usize> {
        match self {
            QSpec::Default | QSpec::Keyword(QKeyword::Default) => vec![default],
            QSpec::Keyword(QKeyword::All) => (0..=n).collect(),
            QSpec::List(v) => v.clone(),
        }
    }
}

/// One set of metrics and the `q` values to run on it.
struct Job {
    label: String,
    generator: &'static str,
    seed: Option<u64>,
    metrics: Vec<DistanceMatrix>,
    qs: Vec<usize>,
    /// Good tour value and adversarial order of a tight-family instance.
    tight: Option<(f64, Traversal)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub instance: String,
    pub generator: &'static str,
    pub seed: Option<u64>,
    pub n: usize,
    pub k: usize,
    pub q: usize,
    pub algorithm: &'static str,
    pub status: String,
    pub value: Option<f64>,
    pub intersection: Option<usize>,
    pub guarantee: String,
    pub reference: Option<f64>,
    pub reference_kind: &'static str,
    pub ratio: Option<f64>,
    pub lower_bound: Option<f64>,
    pub slack_tours_walks: Option<f64>,
    pub slack_walks_substituted: Option<f64>,
    pub slack_substituted_trees: Option<f64>,
    pub verified: bool,
    pub runtime_ms: f64,
}

fn expand(config: &Config) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for spec in &config.instances {
        match spec {
            InstanceSpec::RandomMetric {
                n,
                seeds,
                q,
                stages,
                lo,
                hi,
            } => {
                for &n in n {
                    for seed in seeds.values() {
                        jobs.push(Job {
                            label: format!("random-metric-n{n}-k{stages}-s{seed}"),
                            generator: "random-metric",
                            seed: Some(seed),
                            metrics: gen_random_metric_stages(n, *stages, seed, *lo, *hi)?,
                            qs: q.values(n, n.div_ceil(2)),
                            tight: None,
                        });
                    }
                }
            }
            InstanceSpec::Euclidean { n, seeds, q } => {
                for &n in n {
                    for seed in seeds.values() {
                        jobs.push(Job {
                            label: format!("euclidean-n{n}-s{seed}"),
                            generator: "euclidean",
                            seed: Some(seed),
                            metrics: gen_euclidean_points(n, seed)?.metrics(),
                            qs: q.values(n, n.div_ceil(2)),
                            tight: None,
                        });
                    }
                }
            }
            InstanceSpec::TightFamily { k, eps } => {
                for &k in k {
                    let cert =
                        gen_tight_family(k, *eps).with_context(|| format!("tight family k={k}"))?;
                    jobs.push(Job {
                        label: format!("tight-family-k{k}"),
                        generator: "tight-family",
                        seed: None,
                        metrics: cert.points.metrics(),
                        qs: vec![cert.q],
                        tight: Some((cert.good_value, cert.traversal.clone())),
                    });
                }
            }
            InstanceSpec::File { path, q } => {
                let inst = read_instance(path)?;
                jobs.push(Job {
                    label: path.display().to_string(),
                    generator: "file",
                    seed: None,
                    qs: q.values(inst.n(), inst.q()),
                    metrics: inst.metrics().to_vec(),
                    tight: None,
                });
            }
        }
    }
    Ok(jobs)
}

fn status_of(err: &recovtsp::Error) -> &'static str {
    match err {
        recovtsp::Error::BudgetExceeded { .. } => "budget-exceeded",
        recovtsp::Error::Infeasible(_) => "infeasible",
        recovtsp::Error::NonMetric(_) => "non-metric",
        _ => "invalid-input",
    }
}

fn run_job(job: &Job, config: &Config) -> Result<Vec<Row>> {
    let n = job.metrics[0].n();
    let k = job.metrics.len();
    let profile = if config.oracle && job.tight.is_none() {
        recov_tsp_bruteforce_profile(&job.metrics).ok()
    } else {
        None
    };
    let mut rows = Vec::new();
    for &q in &job.qs {
        let inst = Instance::new(job.metrics.clone(), q)
            .with_context(|| format!("{} q={q}", job.label))?;
        let (reference, reference_kind) = match (&job.tight, &profile) {
            (Some((good, _)), _) => (Some(*good), "good-tour"),
            (None, Some(p)) => (Some(p[q].value), "oracle"),
            (None, None) => (None, "none"),
        };
        let traversal = match (&job.tight, config.adversarial_seed) {
            (Some((_, t)), _) => t.clone(),
            (None, Some(seed)) => Traversal::Seeded(seed),
            (None, None) => Traversal::Canonical,
        };
        let opts = SolveOptions {
            traversal,
            budget: config.budget,
            skip_verify: config.no_verify,
            ..Default::default()
        };
        for &algorithm in &config.algorithms {
            let mut row = Row {
                instance: job.label.clone(),
                generator: job.generator,
                seed: job.seed,
                n,
                k,
                q,
                algorithm: algorithm.name(),
                status: "ok".into(),
                value: None,
                intersection: None,
                guarantee: String::new(),
                reference,
                reference_kind,
                ratio: None,
                lower_bound: None,
                slack_tours_walks: None,
                slack_walks_substituted: None,
                slack_substituted_trees: None,
                verified: false,
                runtime_ms: 0.0,
            };
            match solve_instance(&inst, algorithm, &opts) {
                Ok(run) => {
                    let slack =
                        |name: &str| run.slacks.iter().find(|(s, _)| *s == name).map(|&(_, v)| v);
                    row.value = Some(run.value);
                    row.intersection = Some(run.intersection.len());
                    row.ratio = reference.map(|r| run.value / r);
                    row.lower_bound = run.lower_bound;
                    row.slack_tours_walks = slack("tours<=walks");
                    row.slack_walks_substituted = slack("walks<=2*substituted");
                    row.slack_substituted_trees = slack("2*substituted<=4*trees");
                    row.guarantee = run.guarantee;
                    row.verified = run.verified;
                    row.runtime_ms = run.runtime_ms;
                }
                Err(err) => match err.downcast_ref::<recovtsp::Error>() {
                    Some(recovtsp::Error::Certificate(_)) | None => {
                        return Err(err.context(format!(
                            "{} q={q} {}",
                            job.label,
                            algorithm.name()
                        )));
                    }
                    Some(e) => row.status = status_of(e).into(),
                },
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn run_config(config: &Config, jobs: Option<usize>) -> Result<Vec<Row>> {
    if config.algorithms.is_empty() {
        bail!("the configuration lists no algorithms");
    }
    let expanded = expand(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()?;
    let per_job: Vec<Result<Vec<Row>>> =
        pool.install(|| expanded.par_iter().map(|j| run_job(j, config)).collect());
    let mut rows = Vec::new();
    for r in per_job {
        rows.extend(r?);
    }
    Ok(rows)
}

fn write_csv(rows: &[Row], path: &std::path::Path, untrusted: bool) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(
        out,
        "# recovtsp experiment report, format {REPORT_FORMAT_VERSION}"
    )?;
    if untrusted {
        writeln!(out, "# untrusted: certificate checks were skipped")?;
    }
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: &Args) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let config: Config = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    let rows = run_config(&config, args.jobs)?;
    write_csv(&rows, &args.out, config.no_verify)?;
    if let Some(path) = &args.json {
        let mut text = serde_json::to_string_pretty(&rows)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }

    let mut worst: BTreeMap<&str, (usize, f64)> = BTreeMap::new();
    for row in &rows {
        let e = worst.entry(row.algorithm).or_insert((0, 0.0));
        e.0 += 1;
        if let Some(r) = row.ratio {
            e.1 = e.1.max(r);
        }
    }
    for (alg, (count, max)) in worst {
        println!("{alg} rows={count} max_ratio={max:.6}");
    }
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}
