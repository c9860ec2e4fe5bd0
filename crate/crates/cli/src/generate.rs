use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Subcommand;
use recovtsp::instances::{
    gen_euclidean_points, gen_paris_star, gen_random_metric_stages, gen_tight_family,
    write_instance, write_instance_file, InstanceFile,
};
use recovtsp::Instance;
use serde::Serialize;

#[derive(Subcommand)]
pub enum Kind {
    /// Two uniform point sets in the unit square.
    Euclidean {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to ceil(n / 2).
        #[arg(long)]
        q: Option<usize>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Shortest-path closures of uniform random weights.
    RandomMetric {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, default_value_t = 2)]
        stages: usize,
        #[arg(long, default_value_t = 1.0)]
        lo: f64,
        #[arg(long, default_value_t = 2.0)]
        hi: f64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Lower-bound family for the factor-4 algorithm, with its certificate.
    TightFamily {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(short, long)]
        out: PathBuf,
        /// Defaults to the instance path with a `.certificate.json` suffix.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Star tree with its metric (1 to the center, 2 between leaves).
    ParisStar {
        /// Number of leaves.
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct StarFile {
    vertices: Vec<usize>,
    edges: Vec<[usize; 2]>,
    matrix: Vec<Vec<f64>>,
}

pub fn certificate_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.certificate.json"))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn run(kind: Kind) -> Result<()> {
    match kind {
        Kind::Euclidean { n, seed, q, out } => {
            let points = gen_euclidean_points(n, seed)?;
            let file = InstanceFile::euclidean(&points, q.unwrap_or(n.div_ceil(2)));
            file.to_instance()?;
            write_instance_file(&file, &out)?;
            println!("wrote {} n={} q={}", out.display(), file.n, file.q);
        }
        Kind::RandomMetric {
            n,
            seed,
            q,
            stages,
            lo,
            hi,
            out,
        } => {
            let inst = Instance::new(
                gen_random_metric_stages(n, stages, seed, lo, hi)?,
                q.unwrap_or(n.div_ceil(2)),
            )?;
            write_instance(&inst, &out)?;
            println!("wrote {} n={} q={}", out.display(), inst.n(), inst.q());
        }
        Kind::TightFamily {
            k,
            eps,
            out,
            certificate,
        } => {
            let cert = gen_tight_family(k, eps)?;
            write_instance_file(&InstanceFile::euclidean(&cert.points, cert.q), &out)?;
            let cert_path = certificate.unwrap_or_else(|| certificate_path(&out));
            write_json(&cert, &cert_path)?;
            println!(
                "wrote {} n={} q={} ratio={:.6} certificate={}",
                out.display(),
                cert.points.n(),
                cert.q,
                cert.ratio,
                cert_path.display()
            );
        }
        Kind::ParisStar { n, out } => {
            let (star, d) = gen_paris_star(n)?;
            let file = StarFile {
                vertices: star.vertices,
                edges: star.edges.pairs(),
                matrix: d.rows(),
            };
            write_json(&file, &out)?;
            println!("wrote {} vertices={}", out.display(), n + 1);
        }
    }
    Ok(())
}
