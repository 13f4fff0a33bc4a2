//! Cohort partitioning: CohPart, its sampled variant, and the random and
//! k-means baselines.
//!
//! CohPart alternates two steps much like Lloyd's algorithm, except that a
//! group's "center" is its optimal schedule and students are attracted to the
//! schedule they benefit from most:
//!
//! 1. assignment: each student joins the group whose center schedule gives it
//!    the largest benefit;
//! 2. update: each group's center is recomputed with the greedy scheduler.
//!
//! Neither step can lower the total benefit, so the objective trace is
//! non-decreasing and the loop stops once no student moves.

use std::collections::HashMap;
use std::time::Instant;

use rand::seq::index;
use rand::Rng as _;

use crate::error::{invalid, Result};
use crate::model::{
    members, partition_benefit, repetition_vector_of, student_benefit_unchecked, BenefitFunction,
    Partition, RepetitionVector, RequirementMatrix,
};
use crate::rng::{self, Rng};
use crate::scalar::Scalar;
use crate::scheduler::{schedule_group, TieBreakPolicy};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionConfig {
    pub k: usize,
    pub d: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// CohPart_S samples `k * sample_multiplier` students.
    pub sample_multiplier: usize,
    pub restarts: usize,
}

impl PartitionConfig {
    pub fn new(k: usize, d: usize, seed: u64) -> Self {
        Self {
            k,
            d,
            seed,
            max_iters: 100,
            sample_multiplier: 4,
            restarts: 1,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_sample_multiplier(mut self, c: usize) -> Self {
        self.sample_multiplier = c;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn sample_size(&self) -> usize {
        self.k.saturating_mul(self.sample_multiplier)
    }

    fn validate(&self, n_students: usize) -> Result<()> {
        if self.k == 0 {
            return invalid("K must be >= 1");
        }
        if self.k > n_students {
            return invalid(format!("K={} exceeds {} students", self.k, n_students));
        }
        if self.sample_multiplier == 0 {
            return invalid("sample multiplier must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult<S> {
    pub partition: Partition<S>,
    /// Objective after initialization, then after every iteration.
    pub objective_trace: Vec<S>,
    pub iterations: usize,
    pub converged: bool,
    pub runtime_ms: f64,
    /// Wall-clock of each assignment + update iteration.
    pub iteration_ms: Vec<f64>,
}

impl<S: Scalar> PartitionResult<S> {
    fn single(partition: Partition<S>, iterations: usize, converged: bool, started: Instant) -> Self {
        Self {
            objective_trace: vec![partition.objective],
            partition,
            iterations,
            converged,
            runtime_ms: elapsed_ms(started),
            iteration_ms: Vec::new(),
        }
    }

    pub fn mean_iteration_ms(&self) -> Option<f64> {
        if self.iteration_ms.is_empty() {
            None
        } else {
            Some(self.iteration_ms.iter().sum::<f64>() / self.iteration_ms.len() as f64)
        }
    }
}

fn elapsed_ms(started: Instant) -> f64 {
    started.elapsed().as_secs_f64() * 1e3
}

fn center_of<S: Scalar>(
    matrix: &RequirementMatrix,
    group: &[usize],
    d: usize,
    bf: BenefitFunction,
) -> Result<RepetitionVector> {
    let sched = schedule_group::<S>(matrix, group, d, bf, TieBreakPolicy::LowestTopicIndex)?;
    Ok(repetition_vector_of(&sched, matrix.n_topics()))
}

/// Optimal schedules per group; empty groups get the all-zero vector.
fn centers_of<S: Scalar>(
    matrix: &RequirementMatrix,
    groups: &[Vec<usize>],
    d: usize,
    bf: BenefitFunction,
) -> Result<Vec<RepetitionVector>> {
    groups
        .iter()
        .map(|g| {
            if g.is_empty() {
                Ok(RepetitionVector::zeros(matrix.n_topics()))
            } else {
                center_of::<S>(matrix, g, d, bf)
            }
        })
        .collect()
}

/// Scores an arbitrary assignment with per-group optimal schedules.
pub fn evaluate_partition<S: Scalar>(
    matrix: &RequirementMatrix,
    assignment: &[usize],
    k: usize,
    d: usize,
    bf: BenefitFunction,
) -> Result<Partition<S>> {
    if assignment.len() != matrix.n_students() {
        return invalid(format!(
            "assignment covers {} students, matrix has {}",
            assignment.len(),
            matrix.n_students()
        ));
    }
    if let Some(&g) = assignment.iter().find(|&&g| g >= k) {
        return invalid(format!("group index {g} out of range for K={k}"));
    }
    let groups = members(assignment, k);
    let mut p = Partition {
        assignment: assignment.to_vec(),
        k,
        group_schedules: centers_of::<S>(matrix, &groups, d, bf)?,
        objective: S::zero(),
    };
    p.objective = partition_benefit(matrix, &p, bf)?;
    Ok(p)
}

fn random_labels(rng: &mut Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}

/// Each student independently and uniformly assigned to one of `K` groups.
pub fn random_partition<S: Scalar>(
    matrix: &RequirementMatrix,
    cfg: &PartitionConfig,
    bf: BenefitFunction,
) -> Result<Partition<S>> {
    cfg.validate(matrix.n_students())?;
    let mut rng = rng::stream(cfg.seed, 0);
    let labels = random_labels(&mut rng, matrix.n_students(), cfg.k);
    evaluate_partition(matrix, &labels, cfg.k, cfg.d, bf)
}

/// State of one CohPart run over a subset of the students.
struct Run<'a, S> {
    matrix: &'a RequirementMatrix,
    population: &'a [usize],
    k: usize,
    d: usize,
    bf: BenefitFunction,
    assign: Vec<usize>,
    centers: Vec<RepetitionVector>,
    trace: Vec<S>,
    iteration_ms: Vec<f64>,
    iterations: usize,
    converged: bool,
}

impl<'a, S: Scalar> Run<'a, S> {
    fn new(
        matrix: &'a RequirementMatrix,
        population: &'a [usize],
        k: usize,
        d: usize,
        bf: BenefitFunction,
        assign: Vec<usize>,
    ) -> Result<Self> {
        let mut run = Self {
            matrix,
            population,
            k,
            d,
            bf,
            assign,
            centers: Vec::new(),
            trace: Vec::new(),
            iteration_ms: Vec::new(),
            iterations: 0,
            converged: false,
        };
        run.update_centers()?;
        run.repair_empty_groups()?;
        let objective = run.objective();
        run.trace.push(objective);
        Ok(run)
    }

    fn benefit(&self, local: usize, group: usize) -> S {
        student_benefit_unchecked(
            self.matrix,
            self.population[local],
            self.centers[group].reps(),
            self.bf,
        )
    }

    fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.k];
        for (i, &g) in self.assign.iter().enumerate() {
            groups[g].push(self.population[i]);
        }
        groups
    }

    fn update_centers(&mut self) -> Result<()> {
        self.centers = centers_of::<S>(self.matrix, &self.groups(), self.d, self.bf)?;
        Ok(())
    }

    fn update_center(&mut self, g: usize) -> Result<()> {
        let members: Vec<usize> = self
            .assign
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a == g)
            .map(|(i, _)| self.population[i])
            .collect();
        self.centers[g] = if members.is_empty() {
            RepetitionVector::zeros(self.matrix.n_topics())
        } else {
            center_of::<S>(self.matrix, &members, self.d, self.bf)?
        };
        Ok(())
    }

    /// Moves the worst-served student (from a group of size > 1) into each
    /// empty group.
    fn repair_empty_groups(&mut self) -> Result<()> {
        let mut sizes = vec![0usize; self.k];
        for &g in &self.assign {
            sizes[g] += 1;
        }
        for empty in 0..self.k {
            if sizes[empty] != 0 {
                continue;
            }
            let mut pick: Option<(usize, S)> = None;
            for (i, &g) in self.assign.iter().enumerate() {
                if sizes[g] < 2 {
                    continue;
                }
                let b = self.benefit(i, g);
                if pick.is_none_or(|(_, best)| best.gt_tol(b)) {
                    pick = Some((i, b));
                }
            }
            let Some((i, _)) = pick else {
                return invalid("cannot fill empty group: too few students");
            };
            let donor = self.assign[i];
            self.assign[i] = empty;
            sizes[donor] -= 1;
            sizes[empty] += 1;
            self.update_center(donor)?;
            self.update_center(empty)?;
        }
        Ok(())
    }

    fn objective(&self) -> S {
        (0..self.assign.len())
            .map(|i| self.benefit(i, self.assign[i]))
            .sum()
    }

    /// Index of the best center for `local`; the current group wins ties,
    /// then the lowest index.
    fn best_group(&self, local: usize) -> usize {
        let current = self.assign[local];
        let values: Vec<S> = (0..self.k).map(|g| self.benefit(local, g)).collect();
        let mut best = values[0];
        for &v in &values[1..] {
            if v.gt_tol(best) {
                best = v;
            }
        }
        if values[current].approx_eq(best) {
            return current;
        }
        values
            .iter()
            .position(|v| v.approx_eq(best))
            .unwrap_or(current)
    }

    fn assignment_step(&mut self) -> bool {
        let moves: Vec<usize> = (0..self.assign.len()).map(|i| self.best_group(i)).collect();
        let changed = moves != self.assign;
        self.assign = moves;
        changed
    }

    fn iterate(&mut self, max_iters: usize) -> Result<()> {
        while self.iterations < max_iters {
            let started = Instant::now();
            self.iterations += 1;
            let changed = self.assignment_step();
            if changed {
                self.update_centers()?;
                self.repair_empty_groups()?;
            }
            let objective = self.objective();
            self.trace.push(objective);
            self.iteration_ms.push(elapsed_ms(started));
            if !changed {
                self.converged = true;
                break;
            }
        }
        Ok(())
    }
}

fn run_cohpart<'a, S: Scalar>(
    matrix: &'a RequirementMatrix,
    population: &'a [usize],
    cfg: &PartitionConfig,
    bf: BenefitFunction,
    rng: &mut Rng,
) -> Result<Run<'a, S>> {
    let labels = random_labels(rng, population.len(), cfg.k);
    let mut run = Run::new(matrix, population, cfg.k, cfg.d, bf, labels)?;
    run.iterate(cfg.max_iters)?;
    Ok(run)
}

/// Keeps the better of two results, preferring the earlier on ties.
fn keep_best<S: Scalar>(best: Option<PartitionResult<S>>, next: PartitionResult<S>) -> PartitionResult<S> {
    match best {
        Some(b) if !next.partition.objective.gt_tol(b.partition.objective) => b,
        _ => next,
    }
}

/// CohPart over all students, best of `cfg.restarts` seeded runs.
pub fn cohpart<S: Scalar>(
    matrix: &RequirementMatrix,
    cfg: &PartitionConfig,
    bf: BenefitFunction,
) -> Result<PartitionResult<S>> {
    cfg.validate(matrix.n_students())?;
    let population: Vec<usize> = (0..matrix.n_students()).collect();
    let started = Instant::now();
    let mut best = None;
    for restart in 0..cfg.restarts.max(1) {
        let mut rng = rng::stream(cfg.seed, restart as u64);
        let run = run_cohpart::<S>(matrix, &population, cfg, bf, &mut rng)?;
        let objective = *run.trace.last().expect("trace holds the initial objective");
        let result = PartitionResult {
            partition: Partition {
                assignment: run.assign,
                k: cfg.k,
                group_schedules: run.centers,
                objective,
            },
            objective_trace: run.trace,
            iterations: run.iterations,
            converged: run.converged,
            runtime_ms: 0.0,
            iteration_ms: run.iteration_ms,
        };
        best = Some(keep_best(best, result));
    }
    let mut best = best.expect("at least one restart");
    best.runtime_ms = elapsed_ms(started);
    Ok(best)
}

/// CohPart on a random sample of `K * c` students; everyone else then joins
/// the group whose final center benefits them most, and each center is
/// recomputed once over its full membership.
pub fn cohpart_sampled<S: Scalar>(
    matrix: &RequirementMatrix,
    cfg: &PartitionConfig,
    bf: BenefitFunction,
) -> Result<PartitionResult<S>> {
    cfg.validate(matrix.n_students())?;
    let n = matrix.n_students();
    let sample_size = cfg.sample_size();
    if sample_size >= n {
        return cohpart(matrix, cfg, bf);
    }
    let started = Instant::now();
    let mut best = None;
    for restart in 0..cfg.restarts.max(1) {
        let mut rng = rng::stream(cfg.seed, restart as u64);
        let mut sample = index::sample(&mut rng, n, sample_size).into_vec();
        sample.sort_unstable();
        let run = run_cohpart::<S>(matrix, &sample, cfg, bf, &mut rng)?;

        let mut assignment = vec![usize::MAX; n];
        for (i, &s) in sample.iter().enumerate() {
            assignment[s] = run.assign[i];
        }
        for (s, slot) in assignment.iter_mut().enumerate() {
            if *slot != usize::MAX {
                continue;
            }
            let mut best_g = 0;
            let mut best_v = S::zero();
            for (g, c) in run.centers.iter().enumerate() {
                let v = student_benefit_unchecked::<S>(matrix, s, c.reps(), bf);
                if g == 0 || v.gt_tol(best_v) {
                    best_g = g;
                    best_v = v;
                }
            }
            *slot = best_g;
        }
        let partition = evaluate_partition::<S>(matrix, &assignment, cfg.k, cfg.d, bf)?;
        let mut trace = run.trace;
        trace.push(partition.objective);
        let result = PartitionResult {
            partition,
            objective_trace: trace,
            iterations: run.iterations,
            converged: run.converged,
            runtime_ms: 0.0,
            iteration_ms: run.iteration_ms,
        };
        best = Some(keep_best(best, result));
    }
    let mut best = best.expect("at least one restart");
    best.runtime_ms = elapsed_ms(started);
    Ok(best)
}

fn squared_distance(a: &[f64], b: &[u32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let diff = x - f64::from(y);
            diff * diff
        })
        .sum()
}

struct Lloyd {
    assign: Vec<usize>,
    inertia: f64,
    iterations: usize,
    converged: bool,
}

fn lloyd(matrix: &RequirementMatrix, k: usize, max_iters: usize, rng: &mut Rng) -> Lloyd {
    let n = matrix.n_students();
    let m = matrix.n_topics();
    let mut centers: Vec<Vec<f64>> = index::sample(rng, n, k)
        .into_iter()
        .map(|s| matrix.row(s).iter().map(|&v| f64::from(v)).collect())
        .collect();
    let mut assign = vec![usize::MAX; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iters {
        iterations += 1;
        let mut changed = false;
        for (s, row) in matrix.rows().enumerate() {
            let dists: Vec<f64> = centers.iter().map(|c| squared_distance(c, row)).collect();
            let min = dists.iter().copied().fold(f64::INFINITY, f64::min);
            let current = assign[s];
            let next = if current != usize::MAX && dists[current] <= min {
                current
            } else {
                dists.iter().position(|&x| x <= min).unwrap_or(0)
            };
            if next != current {
                assign[s] = next;
                changed = true;
            }
        }
        if !changed {
            converged = true;
            break;
        }

        let mut sums = vec![vec![0.0; m]; k];
        let mut counts = vec![0usize; k];
        for (s, row) in matrix.rows().enumerate() {
            counts[assign[s]] += 1;
            for (acc, &v) in sums[assign[s]].iter_mut().zip(row) {
                *acc += f64::from(v);
            }
        }
        for g in 0..k {
            if counts[g] > 0 {
                centers[g] = sums[g].iter().map(|x| x / counts[g] as f64).collect();
            }
        }
        // Re-seed empty clusters with the points farthest from their centers.
        let mut taken = vec![false; n];
        for g in (0..k).filter(|&g| counts[g] == 0) {
            let mut far: Option<(usize, f64)> = None;
            for (s, row) in matrix.rows().enumerate() {
                if taken[s] {
                    continue;
                }
                let dist = squared_distance(&centers[assign[s]], row);
                if far.is_none_or(|(_, best)| dist > best) {
                    far = Some((s, dist));
                }
            }
            if let Some((s, _)) = far {
                taken[s] = true;
                centers[g] = matrix.row(s).iter().map(|&v| f64::from(v)).collect();
            }
        }
    }

    let inertia = matrix
        .rows()
        .enumerate()
        .map(|(s, row)| squared_distance(&centers[assign[s]], row))
        .sum();
    Lloyd {
        assign,
        inertia,
        iterations,
        converged,
    }
}

/// Lloyd's k-means on raw requirement rows, then scored with per-group
/// optimal schedules. Restarts keep the clustering of least inertia.
pub fn kmeans_partition<S: Scalar>(
    matrix: &RequirementMatrix,
    cfg: &PartitionConfig,
    bf: BenefitFunction,
) -> Result<PartitionResult<S>> {
    cfg.validate(matrix.n_students())?;
    let started = Instant::now();
    let mut best: Option<Lloyd> = None;
    for restart in 0..cfg.restarts.max(1) {
        let mut rng = rng::stream(cfg.seed, restart as u64);
        let run = lloyd(matrix, cfg.k, cfg.max_iters, &mut rng);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    let partition = evaluate_partition(matrix, &best.assign, cfg.k, cfg.d, bf)?;
    Ok(PartitionResult::single(
        partition,
        best.iterations,
        best.converged,
        started,
    ))
}

fn comb2(x: u64) -> f64 {
    (x as f64) * (x.saturating_sub(1) as f64) / 2.0
}

/// Adjusted Rand index between two labelings of the same students.
pub fn partition_similarity(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return invalid(format!("labelings differ in size: {} vs {}", a.len(), b.len()));
    }
    let n = a.len() as u64;
    if n < 2 {
        return Ok(1.0);
    }
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| comb2(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| comb2(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| comb2(c)).sum();
    let expected = sum_a * sum_b / comb2(n);
    let max = (sum_a + sum_b) / 2.0;
    if (max - expected).abs() < f64::EPSILON {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use proptest::prelude::*;

    type Q = Rational64;
    const U: BenefitFunction = BenefitFunction::Uniform;

    fn random_matrix(seed: u64, n: usize, m: usize, hi: u32) -> RequirementMatrix {
        let mut rng = rng::stream(seed, 99);
        let rows = (0..n)
            .map(|_| (0..m).map(|_| rng.random_range(1..=hi)).collect())
            .collect();
        RequirementMatrix::from_rows(rows).unwrap()
    }

    fn assert_monotone(trace: &[f64]) {
        for w in trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "trace decreased: {trace:?}");
        }
    }

    #[test]
    fn k1_is_single_group() {
        let a = random_matrix(1, 12, 5, 6);
        let cfg = PartitionConfig::new(1, 10, 3);
        let r = cohpart::<Q>(&a, &cfg, U).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert!(r.partition.assignment.iter().all(|&g| g == 0));
        let all: Vec<usize> = (0..12).collect();
        let center = center_of::<Q>(&a, &all, 10, U).unwrap();
        assert_eq!(r.partition.group_schedules[0], center);

        let rand = random_partition::<Q>(&a, &cfg, U).unwrap();
        assert_eq!(rand.objective, r.partition.objective);
        let km = kmeans_partition::<Q>(&a, &cfg, U).unwrap();
        assert_eq!(km.partition.objective, r.partition.objective);
        let s = cohpart_sampled::<Q>(&a, &cfg.clone().with_sample_multiplier(2), U).unwrap();
        assert_eq!(s.partition.objective, r.partition.objective);
    }

    #[test]
    fn private_tutors_master_everything() {
        let a = random_matrix(2, 6, 4, 5);
        let d = (0..6).map(|s| a.requirement_sum(s)).max().unwrap() as usize;
        let cfg = PartitionConfig::new(6, d, 11);
        let r = cohpart::<Q>(&a, &cfg, U).unwrap();
        assert_eq!(r.partition.objective, Q::from_integer(24));
    }

    #[test]
    fn k_larger_than_n_rejected() {
        let a = random_matrix(3, 3, 2, 3);
        let cfg = PartitionConfig::new(4, 2, 0);
        assert!(cohpart::<f64>(&a, &cfg, U).is_err());
        assert!(cohpart_sampled::<f64>(&a, &cfg, U).is_err());
        assert!(random_partition::<f64>(&a, &cfg, U).is_err());
        assert!(kmeans_partition::<f64>(&a, &cfg, U).is_err());
    }

    #[test]
    fn sampled_equals_full_when_sample_covers_everyone() {
        let a = random_matrix(4, 10, 5, 6);
        let cfg = PartitionConfig::new(3, 8, 5).with_sample_multiplier(4);
        let full = cohpart::<f64>(&a, &cfg, U).unwrap();
        let sampled = cohpart_sampled::<f64>(&a, &cfg, U).unwrap();
        assert_eq!(full.partition, sampled.partition);
    }

    #[test]
    fn sampled_assigns_everyone() {
        let a = random_matrix(5, 60, 6, 8);
        let cfg = PartitionConfig::new(3, 12, 9).with_sample_multiplier(2);
        let r = cohpart_sampled::<f64>(&a, &cfg, U).unwrap();
        assert_eq!(r.partition.assignment.len(), 60);
        assert!(r.partition.assignment.iter().all(|&g| g < 3));
        assert_monotone(&r.objective_trace);
        let again = evaluate_partition::<f64>(&a, &r.partition.assignment, 3, 12, U).unwrap();
        assert!((again.objective - r.partition.objective).abs() < 1e-9);
    }

    #[test]
    fn kmeans_identical_rows_collapse() {
        let a = RequirementMatrix::from_rows(vec![vec![3, 1, 4]; 8]).unwrap();
        let cfg = PartitionConfig::new(3, 5, 1);
        let r = kmeans_partition::<Q>(&a, &cfg, U).unwrap();
        let sizes = r.partition.group_sizes();
        assert_eq!(sizes.iter().filter(|&&s| s > 0).count(), 1);
        let one = evaluate_partition::<Q>(&a, &[0; 8], 1, 5, U).unwrap();
        assert_eq!(r.partition.objective, one.objective);
    }

    #[test]
    fn kmeans_separates_obvious_clusters() {
        let mut rows = vec![vec![1, 1, 20, 20]; 5];
        rows.extend(vec![vec![20, 20, 1, 1]; 5]);
        let a = RequirementMatrix::from_rows(rows).unwrap();
        let r = kmeans_partition::<f64>(&a, &PartitionConfig::new(2, 2, 0).with_restarts(3), U).unwrap();
        let labels = &r.partition.assignment;
        assert!(labels[..5].iter().all(|&g| g == labels[0]));
        assert!(labels[5..].iter().all(|&g| g == labels[5]));
        assert_ne!(labels[0], labels[5]);
    }

    #[test]
    fn seeded_determinism() {
        let a = random_matrix(6, 40, 6, 9);
        let cfg = PartitionConfig::new(4, 10, 77).with_restarts(2);
        let x = cohpart::<f64>(&a, &cfg, U).unwrap();
        let y = cohpart::<f64>(&a, &cfg, U).unwrap();
        assert_eq!(x.partition, y.partition);
        assert_eq!(x.objective_trace, y.objective_trace);
        let x = kmeans_partition::<f64>(&a, &cfg, U).unwrap();
        let y = kmeans_partition::<f64>(&a, &cfg, U).unwrap();
        assert_eq!(x.partition, y.partition);
        let x = random_partition::<f64>(&a, &cfg, U).unwrap();
        let y = random_partition::<f64>(&a, &cfg, U).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn evaluate_partition_examples() {
        let a = random_matrix(7, 9, 4, 5);
        let all: Vec<usize> = (0..9).collect();
        let p = evaluate_partition::<Q>(&a, &[0; 9], 1, 6, U).unwrap();
        let direct = schedule_group::<Q>(&a, &all, 6, U, TieBreakPolicy::LowestTopicIndex).unwrap();
        let rv = repetition_vector_of(&direct, 4);
        assert_eq!(p.objective, crate::model::group_benefit::<Q>(&a, &all, &rv, U).unwrap());

        let labels = vec![0, 1, 2, 0, 1, 2, 0, 1, 2];
        let p = evaluate_partition::<Q>(&a, &labels, 3, 6, U).unwrap();
        let again = evaluate_partition::<Q>(&a, &p.assignment, 3, 6, U).unwrap();
        assert_eq!(p, again);

        assert!(evaluate_partition::<Q>(&a, &[0, 1, 5, 0, 0, 0, 0, 0, 0], 3, 6, U).is_err());
        assert!(evaluate_partition::<Q>(&a, &[0; 4], 1, 6, U).is_err());
    }

    #[test]
    fn ari_examples() {
        let a = vec![0, 0, 1, 1, 2, 2];
        assert_eq!(partition_similarity(&a, &a).unwrap(), 1.0);
        let relabeled = vec![2, 2, 0, 0, 1, 1];
        assert!((partition_similarity(&a, &relabeled).unwrap() - 1.0).abs() < 1e-12);
        assert!(partition_similarity(&a, &[0, 1]).is_err());
        // Known value: sklearn adjusted_rand_score([0,0,1,1],[0,0,1,2]) = 0.5714285714
        let v = partition_similarity(&[0, 0, 1, 1], &[0, 0, 1, 2]).unwrap();
        assert!((v - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn ari_random_labels_near_zero() {
        let planted: Vec<usize> = (0..200).map(|i| i / 20).collect();
        let mut total = 0.0;
        for seed in 0..20 {
            let mut rng = rng::stream(seed, 5);
            let noise = random_labels(&mut rng, 200, 10);
            total += partition_similarity(&planted, &noise).unwrap();
        }
        assert!((total / 20.0).abs() < 0.1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn cohpart_trace_non_decreasing(seed in any::<u64>(), n in 4usize..30, k in 1usize..5, d in 0usize..15) {
            prop_assume!(k <= n);
            let a = random_matrix(seed, n, 5, 7);
            let cfg = PartitionConfig::new(k, d, seed);
            let r = cohpart::<f64>(&a, &cfg, U).unwrap();
            assert_monotone(&r.objective_trace);
            prop_assert!(r.iterations <= cfg.max_iters);
            prop_assert_eq!(r.partition.objective, *r.objective_trace.last().unwrap());
            prop_assert!(r.partition.group_sizes().iter().all(|&s| s > 0));
            let check = partition_benefit(&a, &r.partition, U).unwrap();
            prop_assert!((check - r.partition.objective).abs() < 1e-9);
        }

        #[test]
        fn ari_symmetric_and_relabel_invariant(
            a in prop::collection::vec(0usize..4, 2..30),
            perm_seed in any::<u64>(),
        ) {
            let b: Vec<usize> = a.iter().map(|&x| (x * 7 + perm_seed as usize) % 5).collect();
            let ab = partition_similarity(&a, &b).unwrap();
            let ba = partition_similarity(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&ab));
            let relabel: Vec<usize> = a.iter().map(|&x| 3 - x).collect();
            prop_assert!((partition_similarity(&a, &relabel).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
