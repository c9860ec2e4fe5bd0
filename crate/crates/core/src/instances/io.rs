use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{PointSet, UncertaintyInterval};
use crate::error::{Error, Result};
use crate::model::{DistanceMatrix, Instance};

pub const INSTANCE_FORMAT_VERSION: u32 = 1;

/// One stage's metric in an instance file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MetricSpec {
    Explicit { matrix: Vec<Vec<f64>> },
    Euclidean { points: Vec<[f64; 2]> },
}

impl MetricSpec {
    pub fn matrix(&self) -> Result<DistanceMatrix> {
        match self {
            MetricSpec::Explicit { matrix } => DistanceMatrix::from_rows(matrix),
            MetricSpec::Euclidean { points } => {
                if points.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(Error::input("non-finite point coordinate"));
                }
                Ok(DistanceMatrix::euclidean(points))
            }
        }
    }
}

/// On-disk instance: `{"version":1,"n":..,"q":..,"metrics":[..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: u32,
    pub n: usize,
    pub q: usize,
    pub metrics: Vec<MetricSpec>,
}

impl InstanceFile {
    pub fn explicit(inst: &Instance) -> Self {
        Self {
            version: INSTANCE_FORMAT_VERSION,
            n: inst.n(),
            q: inst.q(),
            metrics: inst
                .metrics()
                .iter()
                .map(|d| MetricSpec::Explicit { matrix: d.rows() })
                .collect(),
        }
    }

    pub fn euclidean(points: &PointSet, q: usize) -> Self {
        Self {
            version: INSTANCE_FORMAT_VERSION,
            n: points.n(),
            q,
            metrics: points
                .stages
                .iter()
                .map(|p| MetricSpec::Euclidean { points: p.clone() })
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        if self.version != INSTANCE_FORMAT_VERSION {
            return Err(Error::Parse {
                context: "field `version`".into(),
                message: format!("unsupported version {}", self.version),
            });
        }
        let metrics = self
            .metrics
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let d = m.matrix().map_err(|e| Error::Parse {
                    context: format!("metrics[{i}]"),
                    message: e.to_string(),
                })?;
                if d.n() != self.n {
                    return Err(Error::Parse {
                        context: format!("metrics[{i}]"),
                        message: format!("{} vertices, field `n` says {}", d.n(), self.n),
                    });
                }
                Ok(d)
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(metrics, self.q)
    }
}

/// On-disk solution. `certificate` is free-form JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub tours: Vec<Vec<usize>>,
    pub stage_costs: Vec<f64>,
    pub total: f64,
    pub intersection: Vec<[usize; 2]>,
    pub certificate: serde_json::Value,
    pub guarantee: String,
}

fn parse_json<T: DeserializeOwned>(text: &str, context: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        context: format!(
            "{} line {} column {}",
            context.display(),
            e.line(),
            e.column()
        ),
        message: e.to_string(),
    })
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::input(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_instance_file(path: impl AsRef<Path>) -> Result<InstanceFile> {
    let path = path.as_ref();
    parse_json(&fs::read_to_string(path)?, path)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    read_instance_file(path)?.to_instance()
}

pub fn write_instance_file(file: &InstanceFile, path: impl AsRef<Path>) -> Result<()> {
    write_json(file, path.as_ref())
}

/// Writes the instance with explicit matrices.
pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    write_instance_file(&InstanceFile::explicit(inst), path)
}

pub fn write_solution(solution: &SolutionFile, path: impl AsRef<Path>) -> Result<()> {
    write_json(solution, path.as_ref())
}

pub fn read_intervals(path: impl AsRef<Path>) -> Result<UncertaintyInterval> {
    let path = path.as_ref();
    parse_json(&fs::read_to_string(path)?, path)
}
