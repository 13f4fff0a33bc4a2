//! Domain types and benefit computations.
//!
//! A student `s` gains `1 / req(s, t)` from each of the first `req(s, t)`
//! occurrences of topic `t` in a schedule and nothing from later ones. All
//! group and partition benefits are sums of that per-occurrence quantity, so
//! benefit depends only on how many times each topic appears, never on the
//! order of the slots.

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Requirements larger than this are clamped on ingestion.
pub const MAX_REQUIREMENT: u32 = 1_000_000;

/// Dense per-(student, topic) repetition requirements, every cell `>= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementMatrix {
    n_students: usize,
    n_topics: usize,
    req: Vec<u32>,
    student_ids: Vec<String>,
    topic_ids: Vec<String>,
}

impl RequirementMatrix {
    /// Builds a matrix from rows with default labels `s1..` and `t1..`.
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let student_ids = (1..=n).map(|i| format!("s{i}")).collect();
        let topic_ids = (1..=m).map(|t| format!("t{t}")).collect();
        Self::with_labels(rows, student_ids, topic_ids)
    }

    pub fn with_labels(
        rows: Vec<Vec<u32>>,
        student_ids: Vec<String>,
        topic_ids: Vec<String>,
    ) -> Result<Self> {
        let n_students = rows.len();
        let n_topics = topic_ids.len();
        if n_students == 0 {
            return invalid("requirement matrix has no students");
        }
        if n_topics == 0 {
            return invalid("requirement matrix has no topics");
        }
        if student_ids.len() != n_students {
            return invalid(format!(
                "{} student ids for {} rows",
                student_ids.len(),
                n_students
            ));
        }
        let mut req = Vec::with_capacity(n_students * n_topics);
        for (s, row) in rows.into_iter().enumerate() {
            if row.len() != n_topics {
                return invalid(format!(
                    "row {s} has {} cells, expected {n_topics}",
                    row.len()
                ));
            }
            for (t, v) in row.into_iter().enumerate() {
                if v == 0 {
                    return invalid(format!("req({s},{t}) is zero; requirements must be >= 1"));
                }
                req.push(v.min(MAX_REQUIREMENT));
            }
        }
        Ok(Self {
            n_students,
            n_topics,
            req,
            student_ids,
            topic_ids,
        })
    }

    pub fn n_students(&self) -> usize {
        self.n_students
    }

    pub fn n_topics(&self) -> usize {
        self.n_topics
    }

    #[inline]
    pub fn req(&self, student: usize, topic: usize) -> u32 {
        self.req[student * self.n_topics + topic]
    }

    pub fn row(&self, student: usize) -> &[u32] {
        &self.req[student * self.n_topics..(student + 1) * self.n_topics]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.req.chunks_exact(self.n_topics)
    }

    pub fn student_ids(&self) -> &[String] {
        &self.student_ids
    }

    pub fn topic_ids(&self) -> &[String] {
        &self.topic_ids
    }

    pub fn topic_index(&self, label: &str) -> Option<usize> {
        self.topic_ids.iter().position(|t| t == label)
    }

    /// Sum of requirements of one student over all topics.
    pub fn requirement_sum(&self, student: usize) -> u64 {
        self.row(student).iter().map(|&r| u64::from(r)).sum()
    }

    /// Mean per-student requirement sum, rounded to the nearest integer.
    pub fn average_requirement_sum(&self) -> usize {
        let total: u64 = (0..self.n_students).map(|s| self.requirement_sum(s)).sum();
        (total as f64 / self.n_students as f64).round() as usize
    }

    pub(crate) fn check_student(&self, s: usize) -> Result<()> {
        if s >= self.n_students {
            return invalid(format!("student index {s} out of range ({})", self.n_students));
        }
        Ok(())
    }

    pub(crate) fn check_group(&self, group: &[usize]) -> Result<()> {
        if group.is_empty() {
            return invalid("group is empty");
        }
        group.iter().try_for_each(|&s| self.check_student(s))
    }
}

/// The `occurrence`-th appearance (1-based) of `topic` in a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub topic: usize,
    pub occurrence: u32,
}

/// An ordered, collision-free assignment of topic occurrences to timeslots.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schedule {
    slots: Vec<Occurrence>,
}

impl Schedule {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates that each topic's occurrence indices run 1, 2, ... in slot order.
    pub fn from_slots(slots: Vec<Occurrence>) -> Result<Self> {
        let mut seen: Vec<u32> = Vec::new();
        for (r, occ) in slots.iter().enumerate() {
            if occ.topic >= seen.len() {
                seen.resize(occ.topic + 1, 0);
            }
            let expected = seen[occ.topic] + 1;
            if occ.occurrence != expected {
                return invalid(format!(
                    "slot {r}: topic {} has occurrence {}, expected {expected}",
                    occ.topic, occ.occurrence
                ));
            }
            seen[occ.topic] = expected;
        }
        Ok(Self { slots })
    }

    /// Builds a schedule from a plain topic sequence, numbering occurrences.
    pub fn from_topics(topics: &[usize]) -> Self {
        let mut counts: Vec<u32> = Vec::new();
        let slots = topics
            .iter()
            .map(|&topic| {
                if topic >= counts.len() {
                    counts.resize(topic + 1, 0);
                }
                counts[topic] += 1;
                Occurrence {
                    topic,
                    occurrence: counts[topic],
                }
            })
            .collect();
        Self { slots }
    }

    pub fn slots(&self) -> &[Occurrence] {
        &self.slots
    }

    /// Number of timeslots `d`.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn topics(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots.iter().map(|o| o.topic)
    }
}

/// Per-topic occurrence counts of a schedule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepetitionVector {
    reps: Vec<u32>,
}

impl RepetitionVector {
    pub fn zeros(n_topics: usize) -> Self {
        Self {
            reps: vec![0; n_topics],
        }
    }

    pub fn from_counts(reps: Vec<u32>) -> Self {
        Self { reps }
    }

    pub fn reps(&self) -> &[u32] {
        &self.reps
    }

    pub fn get(&self, topic: usize) -> u32 {
        self.reps[topic]
    }

    pub fn n_topics(&self) -> usize {
        self.reps.len()
    }

    pub fn total(&self) -> u64 {
        self.reps.iter().map(|&r| u64::from(r)).sum()
    }

    pub fn increment(&mut self, topic: usize) {
        self.reps[topic] += 1;
    }
}

/// Counts occurrences per topic over `n_topics` topics.
pub fn repetition_vector_of(sched: &Schedule, n_topics: usize) -> RepetitionVector {
    let width = sched.topics().map(|t| t + 1).max().unwrap_or(0).max(n_topics);
    let mut rv = RepetitionVector::zeros(width);
    for t in sched.topics() {
        rv.increment(t);
    }
    rv
}

/// Per-occurrence benefit model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BenefitFunction {
    /// `1 / req` for each of the first `req` occurrences.
    #[default]
    Uniform,
    /// `1 / 2^i` for the `i`-th occurrence while `i <= req`.
    Geometric,
}

impl BenefitFunction {
    /// Benefit of occurrence `i` given requirement `req`; both must be `>= 1`.
    pub fn occurrence<S: Scalar>(self, req: u32, i: u32) -> S {
        if i > req {
            return S::zero();
        }
        match self {
            BenefitFunction::Uniform => S::ratio(1, u64::from(req)),
            BenefitFunction::Geometric => S::half_pow(i),
        }
    }

    /// Benefit of the first `count` occurrences together.
    pub fn cumulative<S: Scalar>(self, req: u32, count: u32) -> S {
        let useful = count.min(req);
        match self {
            BenefitFunction::Uniform => S::ratio(u64::from(useful), u64::from(req)),
            BenefitFunction::Geometric => S::one() - S::half_pow(useful),
        }
    }
}

impl std::str::FromStr for BenefitFunction {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Self::Uniform),
            "geometric" => Ok(Self::Geometric),
            other => invalid(format!("unknown benefit function '{other}'")),
        }
    }
}

pub fn occurrence_benefit<S: Scalar>(bf: BenefitFunction, req_st: u32, i: u32) -> Result<S> {
    if req_st == 0 {
        return invalid("requirement must be >= 1");
    }
    if i == 0 {
        return invalid("occurrence index must be >= 1");
    }
    Ok(bf.occurrence(req_st, i))
}

fn check_rv(matrix: &RequirementMatrix, rv: &RepetitionVector) -> Result<()> {
    if rv.n_topics() != matrix.n_topics() {
        return invalid(format!(
            "repetition vector covers {} topics, matrix has {}",
            rv.n_topics(),
            matrix.n_topics()
        ));
    }
    Ok(())
}

/// Benefit to one student of a schedule with the given repetition counts.
pub(crate) fn student_benefit_unchecked<S: Scalar>(
    matrix: &RequirementMatrix,
    s: usize,
    reps: &[u32],
    bf: BenefitFunction,
) -> S {
    matrix
        .row(s)
        .iter()
        .zip(reps)
        .map(|(&req, &r)| bf.cumulative::<S>(req, r))
        .sum()
}

pub fn student_benefit<S: Scalar>(
    matrix: &RequirementMatrix,
    s: usize,
    rv: &RepetitionVector,
    bf: BenefitFunction,
) -> Result<S> {
    matrix.check_student(s)?;
    check_rv(matrix, rv)?;
    Ok(student_benefit_unchecked(matrix, s, rv.reps(), bf))
}

pub fn group_benefit<S: Scalar>(
    matrix: &RequirementMatrix,
    group: &[usize],
    rv: &RepetitionVector,
    bf: BenefitFunction,
) -> Result<S> {
    matrix.check_group(group)?;
    check_rv(matrix, rv)?;
    Ok(group
        .iter()
        .map(|&s| student_benefit_unchecked::<S>(matrix, s, rv.reps(), bf))
        .sum())
}

/// Increase in group benefit from the `i`-th occurrence of `topic`.
pub fn marginal_benefit<S: Scalar>(
    matrix: &RequirementMatrix,
    group: &[usize],
    topic: usize,
    i: u32,
    bf: BenefitFunction,
) -> Result<S> {
    matrix.check_group(group)?;
    if topic >= matrix.n_topics() {
        return invalid(format!("topic index {topic} out of range"));
    }
    if i == 0 {
        return invalid("occurrence index must be >= 1");
    }
    Ok(marginal_unchecked(matrix, group, topic, i, bf))
}

pub(crate) fn marginal_unchecked<S: Scalar>(
    matrix: &RequirementMatrix,
    group: &[usize],
    topic: usize,
    i: u32,
    bf: BenefitFunction,
) -> S {
    group
        .iter()
        .map(|&s| bf.occurrence::<S>(matrix.req(s, topic), i))
        .sum()
}

/// Students assigned to `K` groups together with one schedule per group.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition<S> {
    pub assignment: Vec<usize>,
    pub k: usize,
    pub group_schedules: Vec<RepetitionVector>,
    pub objective: S,
}

impl<S: Scalar> Partition<S> {
    /// Member lists per group, in student order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        members(&self.assignment, self.k)
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &g in &self.assignment {
            sizes[g] += 1;
        }
        sizes
    }

    /// Recomputes `objective` from the assignment and schedules.
    pub fn refresh_objective(&mut self, matrix: &RequirementMatrix, bf: BenefitFunction) -> Result<S> {
        self.objective = partition_benefit(matrix, self, bf)?;
        Ok(self.objective)
    }
}

pub(crate) fn members(assignment: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::new(); k];
    for (s, &g) in assignment.iter().enumerate() {
        groups[g].push(s);
    }
    groups
}

/// Total benefit over all groups; empty groups contribute zero.
pub fn partition_benefit<S: Scalar>(
    matrix: &RequirementMatrix,
    p: &Partition<S>,
    bf: BenefitFunction,
) -> Result<S> {
    if p.assignment.len() != matrix.n_students() {
        return invalid(format!(
            "partition assigns {} students, matrix has {}",
            p.assignment.len(),
            matrix.n_students()
        ));
    }
    if p.group_schedules.len() != p.k {
        return invalid(format!(
            "partition has {} schedules for {} groups",
            p.group_schedules.len(),
            p.k
        ));
    }
    if let Some(&g) = p.assignment.iter().find(|&&g| g >= p.k) {
        return invalid(format!("group index {g} out of range for K={}", p.k));
    }
    for rv in &p.group_schedules {
        check_rv(matrix, rv)?;
    }
    Ok(p.assignment
        .iter()
        .enumerate()
        .map(|(s, &g)| student_benefit_unchecked::<S>(matrix, s, p.group_schedules[g].reps(), bf))
        .sum())
}
