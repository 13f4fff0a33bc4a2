//! Declarative dataset recipes, read from TOML:
//!
//! ```toml
//! seed = 7
//! name = "groundtruth"
//!
//! [dataset]
//! family = "ground_truth"
//! n_groups = 10
//! group_size = 40
//! selected_per_group = 5
//! n_topics = 40
//! deadline = 50
//! ```
//!
//! Other families: `pareto` (`alpha`, `scale`), `normal` (`mean`, `sd`),
//! `uniform` (`low`, `high`), each with `n_students` and `n_topics`, and
//! `grm`, which reads course difficulties from a CSV file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::datagen::{
    default_grade_categories, default_threshold_offsets, gen_distribution, gen_grm, gen_ground_truth,
    grades_to_repetitions, CellDistribution, GroundTruthSpec, GrmSample, GrmSpec,
};
use crate::error::{Error, Result};
use crate::io;
use crate::model::RequirementMatrix;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub name: Option<String>,
    pub dataset: Family,
}

fn pareto_alpha() -> f64 {
    2.0
}
fn one() -> f64 {
    1.0
}
fn normal_mean() -> f64 {
    30.0
}
fn normal_sd() -> f64 {
    5.0
}
fn uniform_low() -> u32 {
    5
}
fn uniform_high() -> u32 {
    100
}
fn ability_mean() -> f64 {
    1.13
}
fn ability_sd() -> f64 {
    1.41
}
fn base() -> u32 {
    5
}
fn step() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    GroundTruth(GroundTruthSpec),
    Pareto {
        n_students: usize,
        n_topics: usize,
        #[serde(default = "pareto_alpha")]
        alpha: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    Normal {
        n_students: usize,
        n_topics: usize,
        #[serde(default = "normal_mean")]
        mean: f64,
        #[serde(default = "normal_sd")]
        sd: f64,
    },
    Uniform {
        n_students: usize,
        n_topics: usize,
        #[serde(default = "uniform_low")]
        low: u32,
        #[serde(default = "uniform_high")]
        high: u32,
    },
    Grm(GrmConfig),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrmConfig {
    pub n_students: usize,
    pub n_topics: usize,
    /// CSV `course_id,difficulty`, relative to the spec file.
    pub difficulties: PathBuf,
    #[serde(default = "ability_mean")]
    pub ability_mean: f64,
    #[serde(default = "ability_sd")]
    pub ability_sd: f64,
    #[serde(default = "one")]
    pub discrimination: f64,
    #[serde(default)]
    pub categories: Option<Vec<String>>,
    #[serde(default)]
    pub threshold_offsets: Option<Vec<f64>>,
    #[serde(default = "base")]
    pub base: u32,
    #[serde(default = "step")]
    pub step: u32,
}

/// A generated matrix plus whatever side products its family yields.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub matrix: RequirementMatrix,
    pub labels: Option<Vec<usize>>,
    pub grm: Option<GrmSample>,
}

/// Overrides applied at generation time (the `--base` / `--step` flags).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub base: Option<u32>,
    pub step: Option<u32>,
}

impl DatasetSpec {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::parse(&text)?, base_dir))
    }

    pub fn family_name(&self) -> &'static str {
        match self.dataset {
            Family::GroundTruth(_) => "ground_truth",
            Family::Pareto { .. } => "pareto",
            Family::Normal { .. } => "normal",
            Family::Uniform { .. } => "uniform",
            Family::Grm(_) => "grm",
        }
    }

    /// Generates the dataset; relative paths resolve against `base_dir`.
    pub fn generate(&self, base_dir: &Path, overrides: Overrides) -> Result<Dataset> {
        let name = self
            .name
            .clone()
            .unwrap_or_else(|| self.family_name().to_string());
        let seed = self.seed;
        let plain = |matrix| Dataset {
            name: name.clone(),
            matrix,
            labels: None,
            grm: None,
        };
        match &self.dataset {
            Family::GroundTruth(spec) => {
                let (matrix, labels) = gen_ground_truth(spec, seed)?;
                Ok(Dataset {
                    name,
                    matrix,
                    labels: Some(labels),
                    grm: None,
                })
            }
            &Family::Pareto {
                n_students,
                n_topics,
                alpha,
                scale,
            } => Ok(plain(gen_distribution(
                CellDistribution::Pareto { alpha, scale },
                n_students,
                n_topics,
                seed,
            )?)),
            &Family::Normal {
                n_students,
                n_topics,
                mean,
                sd,
            } => Ok(plain(gen_distribution(
                CellDistribution::Normal { mean, sd },
                n_students,
                n_topics,
                seed,
            )?)),
            &Family::Uniform {
                n_students,
                n_topics,
                low,
                high,
            } => Ok(plain(gen_distribution(
                CellDistribution::Uniform { low, high },
                n_students,
                n_topics,
                seed,
            )?)),
            Family::Grm(cfg) => {
                let path = base_dir.join(&cfg.difficulties);
                let source: Vec<f64> = io::read_scalar_column(&path)
                    .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
                    .into_iter()
                    .map(|(_, v)| v)
                    .collect();
                let spec = GrmSpec {
                    n_students: cfg.n_students,
                    n_topics: cfg.n_topics,
                    ability_mean: cfg.ability_mean,
                    ability_sd: cfg.ability_sd,
                    source_difficulties: source,
                    discrimination: cfg.discrimination,
                    categories: cfg.categories.clone().unwrap_or_else(default_grade_categories),
                    threshold_offsets: cfg
                        .threshold_offsets
                        .clone()
                        .unwrap_or_else(default_threshold_offsets),
                    base: overrides.base.unwrap_or(cfg.base),
                    step: overrides.step.unwrap_or(cfg.step),
                };
                let sample = gen_grm(&spec, seed)?;
                let matrix = grades_to_repetitions(&sample.grades, spec.base, spec.step)?;
                Ok(Dataset {
                    name,
                    matrix,
                    labels: None,
                    grm: Some(sample),
                })
            }
        }
    }
}
