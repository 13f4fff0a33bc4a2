//! Synthetic requirement matrices.
//!
//! * planted groups whose selected topics' requirements sum to the deadline,
//! * i.i.d. Pareto / Normal / Uniform cells,
//! * a graded-response-model forward simulation producing letter grades,
//!   which [`grades_to_repetitions`] turns into requirements.
//!
//! Every generator draws from [`crate::rng::stream`]: one stream for layout
//! decisions and one per student row, so output depends only on the seed.

use rand::seq::index;
use rand::Rng as _;
use rand_distr::{Distribution, Normal, Pareto};
use serde::Deserialize;

use crate::error::{invalid, Error, Result};
use crate::model::RequirementMatrix;
use crate::rng::{self, LAYOUT_STREAM, ROW_BASE};

fn row_rng(seed: u64, row: usize) -> rng::Rng {
    rng::stream(seed, ROW_BASE + row as u64)
}

fn clamp_round(x: f64) -> u32 {
    if x.is_nan() || x < 1.0 {
        1
    } else {
        x.round().min(u32::MAX as f64) as u32
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthSpec {
    #[serde(default = "GroundTruthSpec::default_groups")]
    pub n_groups: usize,
    #[serde(default = "GroundTruthSpec::default_group_size")]
    pub group_size: usize,
    #[serde(default = "GroundTruthSpec::default_selected")]
    pub selected_per_group: usize,
    #[serde(default = "GroundTruthSpec::default_topics")]
    pub n_topics: usize,
    pub deadline: usize,
    /// Defaults to `deadline / 5`.
    #[serde(default)]
    pub filler_mean: Option<f64>,
    #[serde(default = "GroundTruthSpec::default_filler_sd")]
    pub filler_sd: f64,
}

impl GroundTruthSpec {
    fn default_groups() -> usize {
        10
    }
    fn default_group_size() -> usize {
        40
    }
    fn default_selected() -> usize {
        5
    }
    fn default_topics() -> usize {
        40
    }
    fn default_filler_sd() -> f64 {
        3.0
    }

    /// 10 groups of 40 students, 5 selected topics out of 40.
    pub fn standard(deadline: usize) -> Self {
        Self {
            n_groups: 10,
            group_size: 40,
            selected_per_group: 5,
            n_topics: 40,
            deadline,
            filler_mean: None,
            filler_sd: 3.0,
        }
    }

    pub fn n_students(&self) -> usize {
        self.n_groups * self.group_size
    }

    pub fn filler_mean(&self) -> f64 {
        self.filler_mean.unwrap_or(self.deadline as f64 / 5.0)
    }
}

/// Uniformly random composition of `total` into `parts` positive integers.
fn random_composition(rng: &mut rng::Rng, total: usize, parts: usize) -> Vec<u32> {
    let mut cuts: Vec<usize> = index::sample(rng, total - 1, parts - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut out = Vec::with_capacity(parts);
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        out.push((c - prev) as u32);
        prev = c;
    }
    out
}

/// Planted-group matrix and its group labels (students are ordered by group).
pub fn gen_ground_truth(spec: &GroundTruthSpec, seed: u64) -> Result<(RequirementMatrix, Vec<usize>)> {
    if spec.n_groups == 0 || spec.group_size == 0 {
        return invalid("ground truth needs at least one group of one student");
    }
    if spec.selected_per_group == 0 || spec.selected_per_group > spec.n_topics {
        return invalid(format!(
            "selected_per_group={} must be in 1..={}",
            spec.selected_per_group, spec.n_topics
        ));
    }
    if spec.deadline < spec.selected_per_group {
        return invalid(format!(
            "deadline {} is smaller than selected_per_group {}",
            spec.deadline, spec.selected_per_group
        ));
    }
    if spec.filler_sd.is_nan() || spec.filler_sd < 0.0 || !spec.filler_mean().is_finite() {
        return invalid("filler distribution parameters must be finite and sd >= 0");
    }
    let filler = Normal::new(spec.filler_mean(), spec.filler_sd)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let selected = ground_truth_selected_topics(spec, seed);
    let mut rows = Vec::with_capacity(spec.n_students());
    let mut labels = Vec::with_capacity(spec.n_students());
    for (g, topics) in selected.iter().enumerate() {
        for i in 0..spec.group_size {
            let student = g * spec.group_size + i;
            let mut rng = row_rng(seed, student);
            let parts = random_composition(&mut rng, spec.deadline, spec.selected_per_group);
            let mut row: Vec<u32> = (0..spec.n_topics)
                .map(|_| clamp_round(filler.sample(&mut rng)))
                .collect();
            for (&t, &r) in topics.iter().zip(&parts) {
                row[t] = r;
            }
            rows.push(row);
            labels.push(g);
        }
    }
    Ok((RequirementMatrix::from_rows(rows)?, labels))
}

/// Which topics each planted group's requirements were concentrated on.
pub fn ground_truth_selected_topics(spec: &GroundTruthSpec, seed: u64) -> Vec<Vec<usize>> {
    let mut layout = rng::stream(seed, LAYOUT_STREAM);
    (0..spec.n_groups)
        .map(|_| {
            let mut s = index::sample(&mut layout, spec.n_topics, spec.selected_per_group).into_vec();
            s.sort_unstable();
            s
        })
        .collect()
}

/// Per-cell distribution for i.i.d. requirement matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellDistribution {
    /// Pareto(scale, alpha), rounded up.
    Pareto { alpha: f64, scale: f64 },
    /// Normal(mean, sd), rounded and clamped to `>= 1`.
    Normal { mean: f64, sd: f64 },
    /// Integers uniform in `[low, high]`.
    Uniform { low: u32, high: u32 },
}

impl CellDistribution {
    pub const PARETO: Self = Self::Pareto {
        alpha: 2.0,
        scale: 1.0,
    };
    pub const NORMAL: Self = Self::Normal { mean: 30.0, sd: 5.0 };
    pub const UNIFORM: Self = Self::Uniform { low: 5, high: 100 };
}

pub fn gen_distribution(
    dist: CellDistribution,
    n_students: usize,
    n_topics: usize,
    seed: u64,
) -> Result<RequirementMatrix> {
    let rows: Vec<Vec<u32>> = match dist {
        CellDistribution::Pareto { alpha, scale } => {
            let p = Pareto::new(scale, alpha).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            sample_rows(seed, n_students, n_topics, |rng| {
                let x: f64 = p.sample(rng);
                (x.ceil().min(u32::MAX as f64) as u32).max(1)
            })
        }
        CellDistribution::Normal { mean, sd } => {
            let nd = Normal::new(mean, sd).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            sample_rows(seed, n_students, n_topics, |rng| clamp_round(nd.sample(rng)))
        }
        CellDistribution::Uniform { low, high } => {
            if low == 0 || low > high {
                return invalid(format!("uniform range [{low}, {high}] must satisfy 1 <= low <= high"));
            }
            sample_rows(seed, n_students, n_topics, |rng| rng.random_range(low..=high))
        }
    };
    RequirementMatrix::from_rows(rows)
}

fn sample_rows(
    seed: u64,
    n: usize,
    m: usize,
    mut cell: impl FnMut(&mut rng::Rng) -> u32,
) -> Vec<Vec<u32>> {
    (0..n)
        .map(|s| {
            let mut rng = row_rng(seed, s);
            (0..m).map(|_| cell(&mut rng)).collect()
        })
        .collect()
}

/// Letter grades, best first.
pub fn default_grade_categories() -> Vec<String> {
    ["A", "A-", "B+", "B", "B-", "C+", "C", "C-", "D", "F"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// Category boundaries relative to a course difficulty, ascending.
pub fn default_threshold_offsets() -> Vec<f64> {
    vec![-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5]
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrmSpec {
    pub n_students: usize,
    pub n_topics: usize,
    pub ability_mean: f64,
    pub ability_sd: f64,
    /// Course difficulties the new ones are resampled from.
    pub source_difficulties: Vec<f64>,
    pub discrimination: f64,
    /// Best first.
    pub categories: Vec<String>,
    /// Ascending, one fewer than categories.
    pub threshold_offsets: Vec<f64>,
    pub base: u32,
    pub step: u32,
}

impl GrmSpec {
    pub fn new(n_students: usize, n_topics: usize, source_difficulties: Vec<f64>) -> Self {
        Self {
            n_students,
            n_topics,
            ability_mean: 1.13,
            ability_sd: 1.41,
            source_difficulties,
            discrimination: 1.0,
            categories: default_grade_categories(),
            threshold_offsets: default_threshold_offsets(),
            base: 5,
            step: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.source_difficulties.is_empty() {
            return bad("no source difficulties".into());
        }
        if self.source_difficulties.iter().any(|d| !d.is_finite()) {
            return bad("source difficulties must be finite".into());
        }
        if self.categories.len() < 2 {
            return bad("need at least two grade categories".into());
        }
        if self.threshold_offsets.len() + 1 != self.categories.len() {
            return bad(format!(
                "{} thresholds for {} categories",
                self.threshold_offsets.len(),
                self.categories.len()
            ));
        }
        if self.threshold_offsets.windows(2).any(|w| w[0].is_nan() || w[1].is_nan() || w[0] >= w[1]) {
            return bad("category thresholds must be strictly increasing".into());
        }
        if self.ability_sd.is_nan() || self.ability_sd < 0.0 || !self.ability_mean.is_finite() {
            return bad("ability distribution parameters must be finite and sd >= 0".into());
        }
        if self.base == 0 || self.step == 0 {
            return bad("base and step must be positive".into());
        }
        Ok(())
    }
}

/// Grades as category ranks (0 = best) with their category labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradeMatrix {
    categories: Vec<String>,
    n_students: usize,
    n_courses: usize,
    ranks: Vec<u16>,
}

impl GradeMatrix {
    pub fn from_ranks(categories: Vec<String>, rows: Vec<Vec<u16>>) -> Result<Self> {
        let n_students = rows.len();
        let n_courses = rows.first().map_or(0, Vec::len);
        let mut ranks = Vec::with_capacity(n_students * n_courses);
        for row in rows {
            if row.len() != n_courses {
                return invalid("ragged grade matrix");
            }
            if let Some(r) = row.iter().find(|&&r| usize::from(r) >= categories.len()) {
                return invalid(format!("grade rank {r} out of range"));
            }
            ranks.extend(row);
        }
        Ok(Self {
            categories,
            n_students,
            n_courses,
            ranks,
        })
    }

    pub fn from_symbols<S: AsRef<str>>(categories: Vec<String>, rows: &[Vec<S>]) -> Result<Self> {
        let ranked = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|sym| {
                        let sym = sym.as_ref().trim();
                        categories
                            .iter()
                            .position(|c| c == sym)
                            .map(|p| p as u16)
                            .ok_or_else(|| Error::InvalidArgument(format!("unknown grade '{sym}'")))
                    })
                    .collect::<Result<Vec<u16>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_ranks(categories, ranked)
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn n_students(&self) -> usize {
        self.n_students
    }

    pub fn n_courses(&self) -> usize {
        self.n_courses
    }

    pub fn rank(&self, student: usize, course: usize) -> u16 {
        self.ranks[student * self.n_courses + course]
    }

    pub fn symbol(&self, student: usize, course: usize) -> &str {
        &self.categories[usize::from(self.rank(student, course))]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrmSample {
    pub grades: GradeMatrix,
    pub abilities: Vec<f64>,
    pub difficulties: Vec<f64>,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `P(score level >= g)` for `g = 1..G-1`, where level 0 is the worst category.
pub fn cumulative_probabilities(theta: f64, thresholds: &[f64], discrimination: f64) -> Vec<f64> {
    thresholds
        .iter()
        .map(|&b| logistic(discrimination * (theta - b)))
        .collect()
}

/// Probability of each category, best first, under the graded response model.
pub fn category_probabilities(theta: f64, thresholds: &[f64], discrimination: f64) -> Vec<f64> {
    let cum = cumulative_probabilities(theta, thresholds, discrimination);
    let levels = thresholds.len() + 1;
    let at_least = |l: usize| -> f64 {
        if l == 0 {
            1.0
        } else if l >= levels {
            0.0
        } else {
            cum[l - 1]
        }
    };
    // level l has category index levels - 1 - l
    (0..levels)
        .map(|cat| {
            let l = levels - 1 - cat;
            (at_least(l) - at_least(l + 1)).max(0.0)
        })
        .collect()
}

/// Rule-of-thumb Gaussian bandwidth (Silverman).
pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (n - 1.0);
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
    };
    let iqr = q(0.75) - q(0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * n.powf(-0.2)
}

/// Draws `count` values from a Gaussian kernel density estimate of `source`.
pub fn kde_resample(source: &[f64], count: usize, rng: &mut rng::Rng) -> Vec<f64> {
    let h = silverman_bandwidth(source);
    (0..count)
        .map(|_| {
            let center = source[rng.random_range(0..source.len())];
            if h > 0.0 {
                let z: f64 = rand_distr::StandardNormal.sample(rng);
                center + h * z
            } else {
                center
            }
        })
        .collect()
}

fn sample_category(rng: &mut rng::Rng, probs: &[f64]) -> u16 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as u16;
        }
    }
    (probs.len() - 1) as u16
}

/// Forward graded-response simulation: abilities, resampled course
/// difficulties and one sampled grade per (student, course).
pub fn gen_grm(spec: &GrmSpec, seed: u64) -> Result<GrmSample> {
    spec.validate()?;
    let ability = Normal::new(spec.ability_mean, spec.ability_sd)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut layout = rng::stream(seed, LAYOUT_STREAM);
    let difficulties = kde_resample(&spec.source_difficulties, spec.n_topics, &mut layout);
    let thresholds: Vec<Vec<f64>> = difficulties
        .iter()
        .map(|&d| spec.threshold_offsets.iter().map(|o| d + o).collect())
        .collect();

    let mut abilities = Vec::with_capacity(spec.n_students);
    let mut rows = Vec::with_capacity(spec.n_students);
    for s in 0..spec.n_students {
        let mut rng = row_rng(seed, s);
        let theta = ability.sample(&mut rng);
        abilities.push(theta);
        rows.push(
            thresholds
                .iter()
                .map(|b| {
                    let probs = category_probabilities(theta, b, spec.discrimination);
                    sample_category(&mut rng, &probs)
                })
                .collect(),
        );
    }
    Ok(GrmSample {
        grades: GradeMatrix::from_ranks(spec.categories.clone(), rows)?,
        abilities,
        difficulties,
    })
}

/// `req = base + step * rank`, the best grade having rank 0.
pub fn grades_to_repetitions(grades: &GradeMatrix, base: u32, step: u32) -> Result<RequirementMatrix> {
    if base == 0 || step == 0 {
        return invalid("base and step must be positive");
    }
    let rows = (0..grades.n_students())
        .map(|s| {
            (0..grades.n_courses())
                .map(|c| base.saturating_add(step.saturating_mul(u32::from(grades.rank(s, c)))))
                .collect()
        })
        .collect();
    RequirementMatrix::from_rows(rows)
}
