//! Exhaustive solvers for small instances.
//!
//! These exist to check the greedy scheduler and the partition heuristics, so
//! they share nothing with them beyond the benefit definitions: schedules are
//! enumerated as multisets (benefit ignores slot order) and partitions as
//! restricted growth strings (one representative per relabeling).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{group_benefit, BenefitFunction, RepetitionVector, RequirementMatrix};
use crate::scalar::Scalar;

/// Hard caps; requests beyond them are refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_students: usize,
    pub max_topics: usize,
    pub max_d: usize,
    pub max_partition_students: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_students: 6,
            max_topics: 6,
            max_d: 8,
            max_partition_students: 10,
        }
    }
}

fn refuse<T>(msg: String) -> Result<T> {
    Err(Error::LimitExceeded(msg))
}

/// Calls `visit` on every vector of `n_topics` non-negative counts summing
/// to `d`, in lexicographic order.
fn for_each_multiset(n_topics: usize, d: usize, mut visit: impl FnMut(&[u32])) {
    fn rec(pos: usize, left: u32, counts: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        if pos + 1 == counts.len() {
            counts[pos] = left;
            visit(counts);
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            rec(pos + 1, left - c, counts, visit);
        }
    }
    let mut counts = vec![0u32; n_topics];
    rec(0, d as u32, &mut counts, &mut visit);
}

fn best_schedule<S: Scalar>(
    matrix: &RequirementMatrix,
    group: &[usize],
    d: usize,
    bf: BenefitFunction,
) -> Result<(S, RepetitionVector)> {
    let mut best: Option<(S, Vec<u32>)> = None;
    let mut failure = None;
    for_each_multiset(matrix.n_topics(), d, |counts| {
        let rv = RepetitionVector::from_counts(counts.to_vec());
        match group_benefit::<S>(matrix, group, &rv, bf) {
            Ok(value) => {
                if best.as_ref().is_none_or(|(b, _)| value.gt_tol(*b)) {
                    best = Some((value, counts.to_vec()));
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let (value, counts) = best.expect("at least one multiset");
    Ok((value, RepetitionVector::from_counts(counts)))
}

/// Maximum group benefit over every `d`-slot schedule, with the
/// lexicographically smallest optimal repetition vector.
pub fn brute_force_schedule<S: Scalar>(
    matrix: &RequirementMatrix,
    group: &[usize],
    d: usize,
    bf: BenefitFunction,
    limits: &OracleLimits,
) -> Result<(S, RepetitionVector)> {
    if group.len() > limits.max_students {
        return refuse(format!(
            "group of {} exceeds max_students {}",
            group.len(),
            limits.max_students
        ));
    }
    if matrix.n_topics() > limits.max_topics {
        return refuse(format!(
            "{} topics exceeds max_topics {}",
            matrix.n_topics(),
            limits.max_topics
        ));
    }
    if d > limits.max_d {
        return refuse(format!("d={d} exceeds max_d {}", limits.max_d));
    }
    best_schedule(matrix, group, d, bf)
}

/// Calls `visit` on every restricted growth string of length `n` using at most `k` labels.
fn for_each_assignment(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(
        pos: usize,
        used: usize,
        k: usize,
        labels: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if pos == labels.len() {
            visit(labels);
            return;
        }
        let top = (used + 1).min(k);
        for g in 0..top {
            labels[pos] = g;
            rec(pos + 1, used.max(g + 1), k, labels, visit);
        }
    }
    let mut labels = vec![0usize; n];
    if n == 0 {
        visit(&labels);
        return;
    }
    rec(0, 0, k, &mut labels, &mut visit);
}

/// Maximum partition objective over every assignment into at most `k` groups,
/// each group scheduled optimally by exhaustive search.
pub fn brute_force_partition<S: Scalar>(
    matrix: &RequirementMatrix,
    k: usize,
    d: usize,
    bf: BenefitFunction,
    limits: &OracleLimits,
) -> Result<(S, Vec<usize>)> {
    let n = matrix.n_students();
    if k == 0 {
        return Err(Error::InvalidArgument("K must be >= 1".into()));
    }
    if n > limits.max_partition_students {
        return refuse(format!(
            "{n} students exceeds max_partition_students {}",
            limits.max_partition_students
        ));
    }
    if n > 63 {
        return refuse(format!("{n} students cannot be encoded as a group mask"));
    }
    if matrix.n_topics() > limits.max_topics {
        return refuse(format!(
            "{} topics exceeds max_topics {}",
            matrix.n_topics(),
            limits.max_topics
        ));
    }
    if d > limits.max_d {
        return refuse(format!("d={d} exceeds max_d {}", limits.max_d));
    }

    let mut cache: HashMap<u64, S> = HashMap::new();
    let mut best: Option<(S, Vec<usize>)> = None;
    let mut failure = None;
    for_each_assignment(n, k, |labels| {
        let mut masks = vec![0u64; k];
        for (s, &g) in labels.iter().enumerate() {
            masks[g] |= 1 << s;
        }
        let mut total = S::zero();
        for &mask in masks.iter().filter(|&&m| m != 0) {
            let value = match cache.get(&mask) {
                Some(v) => *v,
                None => {
                    let group: Vec<usize> = (0..n).filter(|s| mask & (1 << s) != 0).collect();
                    match best_schedule::<S>(matrix, &group, d, bf) {
                        Ok((v, _)) => {
                            cache.insert(mask, v);
                            v
                        }
                        Err(e) => {
                            failure = Some(e);
                            return;
                        }
                    }
                }
            };
            total += value;
        }
        if best.as_ref().is_none_or(|(b, _)| total.gt_tol(*b)) {
            best = Some((total, labels.to_vec()));
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best.expect("at least one assignment"))
}
