use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use recovtsp::instances::{read_instance, SolutionFile, TightFamilyCertificate};
use recovtsp::{approx_eq, check_solution, Tour};

#[derive(clap::Args)]
pub struct Args {
    /// Instance file.
    pub instance: Option<PathBuf>,
    /// Solution file to check against the instance.
    #[arg(long, requires = "instance")]
    pub solution: Option<PathBuf>,
    /// Tight-family certificate to re-verify from its coordinates.
    #[arg(long)]
    pub certificate: Option<PathBuf>,
}

pub fn run(args: &Args) -> Result<()> {
    if args.instance.is_none() && args.certificate.is_none() {
        bail!("nothing to validate: give an instance file or --certificate");
    }
    if let Some(path) = &args.instance {
        let inst = read_instance(path)?;
        println!("instance n={} k={} q={}", inst.n(), inst.k(), inst.q());
        for (i, d) in inst.metrics().iter().enumerate() {
            println!("stage {i}: {}", d.validate_metric().summary());
        }
        if let Some(sol_path) = &args.solution {
            let text = std::fs::read_to_string(sol_path)
                .with_context(|| format!("reading {}", sol_path.display()))?;
            let sol: SolutionFile = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", sol_path.display()))?;
            let verdict = check_solution(&inst, &sol.tours);
            if !verdict.feasible {
                bail!("infeasible solution: {}", verdict.violations.join("; "));
            }
            let tours = sol
                .tours
                .iter()
                .map(|t| Tour::new(t.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            let total = inst.objective(&tours)?;
            if !approx_eq(total, sol.total) {
                bail!("recorded total {} but the tours cost {total}", sol.total);
            }
            println!(
                "solution feasible intersection={} total={total}",
                verdict.intersection_size
            );
        }
    }
    if let Some(path) = &args.certificate {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cert: TightFamilyCertificate =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cert.verify()
            .with_context(|| format!("certificate {}", path.display()))?;
        println!("certificate ok k={} ratio={:.6}", cert.k, cert.ratio);
    }
    Ok(())
}
