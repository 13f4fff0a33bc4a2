use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use cohort::{
    cohpart, cohpart_sampled, kmeans_partition, random_partition, BenefitFunction, PartitionConfig,
    PartitionResult, RequirementMatrix,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Random,
    Kmeans,
    Cohpart,
    #[value(name = "cohpart_s")]
    CohpartS,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Random,
        Algorithm::Kmeans,
        Algorithm::Cohpart,
        Algorithm::CohpartS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Random => "random",
            Algorithm::Kmeans => "kmeans",
            Algorithm::Cohpart => "cohpart",
            Algorithm::CohpartS => "cohpart_s",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A deadline, either fixed or the rounded mean per-student requirement sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(try_from = "RawDeadline")]
pub enum Deadline {
    Fixed(usize),
    Average,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawDeadline {
    Slots(usize),
    Name(String),
}

impl TryFrom<RawDeadline> for Deadline {
    type Error = String;

    fn try_from(raw: RawDeadline) -> Result<Self, String> {
        match raw {
            RawDeadline::Slots(d) => Ok(Deadline::Fixed(d)),
            RawDeadline::Name(s) => s.parse(),
        }
    }
}

impl FromStr for Deadline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "avg" | "average" => Ok(Deadline::Average),
            other => other
                .parse()
                .map(Deadline::Fixed)
                .map_err(|_| format!("deadline '{other}' is neither a slot count nor 'avg'")),
        }
    }
}

impl Deadline {
    pub fn resolve(self, matrix: &RequirementMatrix) -> usize {
        match self {
            Deadline::Fixed(d) => d,
            Deadline::Average => matrix.average_requirement_sum(),
        }
    }
}

pub struct Run {
    pub assignment: Vec<usize>,
    pub objective: f64,
    pub iterations: usize,
    pub runtime_ms: f64,
}

impl From<PartitionResult<f64>> for Run {
    fn from(r: PartitionResult<f64>) -> Self {
        Run {
            objective: r.partition.objective,
            assignment: r.partition.assignment,
            iterations: r.iterations,
            runtime_ms: r.runtime_ms,
        }
    }
}

pub fn run_algorithm(
    algo: Algorithm,
    matrix: &RequirementMatrix,
    cfg: &PartitionConfig,
) -> cohort::Result<Run> {
    let bf = BenefitFunction::Uniform;
    match algo {
        Algorithm::Random => {
            let started = Instant::now();
            let p = random_partition::<f64>(matrix, cfg, bf)?;
            Ok(Run {
                objective: p.objective,
                assignment: p.assignment,
                iterations: 0,
                runtime_ms: started.elapsed().as_secs_f64() * 1e3,
            })
        }
        Algorithm::Kmeans => kmeans_partition::<f64>(matrix, cfg, bf).map(Run::from),
        Algorithm::Cohpart => cohpart::<f64>(matrix, cfg, bf).map(Run::from),
        Algorithm::CohpartS => cohpart_sampled::<f64>(matrix, cfg, bf).map(Run::from),
    }
}
