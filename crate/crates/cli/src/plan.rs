//! Experiment plans, read from TOML:
//!
//! ```toml
//! name = "groundtruth"
//! dataset = "groundtruth.toml"   # a dataset recipe, or
//! # matrix = "matrix.csv"        # an existing matrix (optional `labels`)
//! algorithms = ["random", "kmeans", "cohpart", "cohpart_s"]
//! k = [1, 5, 10, 20]
//! d = [50, "avg"]
//! trials = 5
//! seed = 1
//! ```
//!
//! Relative paths resolve against the plan file's directory.

use std::path::{Path, PathBuf};

use cohort::dataset::{DatasetSpec, Overrides};
use cohort::RequirementMatrix;
use serde::Deserialize;

use crate::algo::{Algorithm, Deadline};
use crate::error::{validation, CliResult};

fn all_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}
fn five() -> usize {
    5
}
fn four() -> usize {
    4
}
fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub name: Option<String>,
    pub dataset: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    #[serde(default = "all_algorithms")]
    pub algorithms: Vec<Algorithm>,
    pub k: Vec<usize>,
    pub d: Vec<Deadline>,
    #[serde(default = "five")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "four")]
    pub sample_c: usize,
    #[serde(default = "one")]
    pub restarts: usize,
    pub base: Option<u32>,
    pub step: Option<u32>,
    pub out: Option<PathBuf>,
}

pub struct LoadedDataset {
    pub name: String,
    pub matrix: RequirementMatrix,
    pub labels: Option<Vec<usize>>,
}

impl ExperimentPlan {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).or_else(|e| validation(format!("plan: {e}")))
    }

    /// Parses the plan and makes its paths absolute against the plan's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .or_else(|e| validation(format!("{}: {e}", path.display())))?;
        let mut plan = Self::parse(&text)?;
        let dir = path.parent().unwrap_or(Path::new(""));
        for p in [&mut plan.dataset, &mut plan.matrix, &mut plan.labels, &mut plan.out]
            .into_iter()
            .flatten()
        {
            *p = dir.join(&*p);
        }
        Ok(plan)
    }

    pub fn validate(&self) -> CliResult<()> {
        match (&self.dataset, &self.matrix) {
            (Some(_), Some(_)) => return validation("plan sets both dataset and matrix"),
            (None, None) => return validation("plan needs a dataset or a matrix"),
            _ => {}
        }
        if self.labels.is_some() && self.matrix.is_none() {
            return validation("labels are only read alongside a matrix");
        }
        if self.algorithms.is_empty() || self.k.is_empty() || self.d.is_empty() {
            return validation("algorithms, k and d must be non-empty");
        }
        if self.trials == 0 {
            return validation("trials must be >= 1");
        }
        if self.restarts == 0 || self.sample_c == 0 {
            return validation("restarts and sample_c must be >= 1");
        }
        Ok(())
    }

    /// Trial `i` runs with seed `seed + i`.
    pub fn trial_seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.trials as u64).map(|i| self.seed.wrapping_add(i))
    }

    pub fn load_dataset(&self) -> CliResult<LoadedDataset> {
        if let Some(spec_path) = &self.dataset {
            let (spec, base_dir) = DatasetSpec::load(spec_path)?;
            let overrides = Overrides {
                base: self.base,
                step: self.step,
            };
            let ds = spec.generate(&base_dir, overrides)?;
            return Ok(LoadedDataset {
                name: self.name.clone().unwrap_or(ds.name),
                matrix: ds.matrix,
                labels: ds.labels,
            });
        }
        let path = self.matrix.as_ref().expect("validated");
        let matrix = cohort::io::read_matrix(path)?;
        let labels = match &self.labels {
            Some(p) => Some(cohort::io::read_labels(&matrix, p)?),
            None => None,
        };
        let name = self.name.clone().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "matrix".into())
        });
        Ok(LoadedDataset {
            name,
            matrix,
            labels,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_defaults() {
        let plan = ExperimentPlan::parse("dataset = \"gt.toml\"\nk = [1, 5]\nd = [50, \"avg\"]\n").unwrap();
        assert_eq!(plan.trials, 5);
        assert_eq!(plan.algorithms, Algorithm::ALL);
        assert_eq!(plan.d, vec![Deadline::Fixed(50), Deadline::Average]);
        assert_eq!(plan.trial_seeds().collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
        plan.validate().unwrap();
    }

    #[test]
    fn rejects_bad_plans() {
        assert!(ExperimentPlan::parse("dataset = \"a\"\nk = [1]\nd = [\"soon\"]\n").is_err());
        assert!(ExperimentPlan::parse("dataset = \"a\"\nk = [1]\nd = [1]\nalgorithms = [\"svm\"]\n").is_err());
        let empty = ExperimentPlan::parse("dataset = \"a\"\nk = []\nd = [1]\n").unwrap();
        assert!(empty.validate().is_err());
        let zero = ExperimentPlan::parse("dataset = \"a\"\nk = [1]\nd = [1]\ntrials = 0\n").unwrap();
        assert!(zero.validate().is_err());
        let both = ExperimentPlan::parse("dataset = \"a\"\nmatrix = \"b\"\nk = [1]\nd = [1]\n").unwrap();
        assert!(both.validate().is_err());
    }
}
