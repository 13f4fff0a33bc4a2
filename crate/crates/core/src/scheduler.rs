//! Greedy optimal schedule for a fixed group of students.
//!
//! The marginal benefit of the `i`-th occurrence of a topic depends only on the
//! topic and `i`, and is non-increasing in `i`. Repeatedly taking the topic
//! whose next occurrence has the largest marginal benefit therefore yields a
//! schedule of maximal group benefit. Per-topic next-occurrence values live in
//! a max-heap, so each slot costs one `O(|group|)` recomputation plus a heap
//! operation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use petgraph::graphmap::DiGraphMap;

use crate::error::{Error, Result};
use crate::model::{marginal_unchecked, BenefitFunction, Occurrence, RequirementMatrix, Schedule};
use crate::scalar::Scalar;

/// How to choose between topics whose next occurrences have equal marginal benefit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreakPolicy {
    #[default]
    LowestTopicIndex,
}

/// `target` may be scheduled only after every `(topic, min_reps)` prerequisite
/// has appeared at least `min_reps` times in earlier slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecedenceConstraint {
    pub target: usize,
    pub prerequisites: Vec<(usize, u32)>,
}

impl PrecedenceConstraint {
    pub fn new(target: usize, prerequisites: Vec<(usize, u32)>) -> Self {
        Self {
            target,
            prerequisites,
        }
    }
}

/// One greedy iteration: which topic occurrence was placed and what it added.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep<S> {
    pub topic: usize,
    pub occurrence: u32,
    pub marginal: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleOutcome<S> {
    pub schedule: Schedule,
    pub trace: Vec<TraceStep<S>>,
    /// Group benefit of the schedule (sum of the traced marginals).
    pub benefit: S,
}

#[derive(Debug, Clone, Copy)]
struct Candidate<S> {
    marginal: S,
    topic: usize,
}

impl<S: Scalar> PartialEq for Candidate<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Candidate<S> {}

impl<S: Scalar> PartialOrd for Candidate<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Candidate<S> {
    // Max-heap order: larger marginal first, then lower topic index.
    fn cmp(&self, other: &Self) -> Ordering {
        self.marginal
            .cmp_tol(other.marginal)
            .then_with(|| other.topic.cmp(&self.topic))
    }
}

struct Greedy<'a, S> {
    matrix: &'a RequirementMatrix,
    group: &'a [usize],
    bf: BenefitFunction,
    counts: Vec<u32>,
    heap: BinaryHeap<Candidate<S>>,
    slots: Vec<Occurrence>,
    trace: Vec<TraceStep<S>>,
}

impl<'a, S: Scalar> Greedy<'a, S> {
    fn new(matrix: &'a RequirementMatrix, group: &'a [usize], bf: BenefitFunction, d: usize) -> Self {
        Self {
            matrix,
            group,
            bf,
            counts: vec![0; matrix.n_topics()],
            heap: BinaryHeap::with_capacity(matrix.n_topics()),
            slots: Vec::with_capacity(d),
            trace: Vec::with_capacity(d),
        }
    }

    fn unlock(&mut self, topic: usize) {
        let next = self.counts[topic] + 1;
        let marginal = marginal_unchecked(self.matrix, self.group, topic, next, self.bf);
        self.heap.push(Candidate { marginal, topic });
    }

    fn step(&mut self) -> Option<usize> {
        let Candidate { marginal, topic } = self.heap.pop()?;
        self.counts[topic] += 1;
        let occurrence = self.counts[topic];
        self.slots.push(Occurrence { topic, occurrence });
        self.trace.push(TraceStep {
            topic,
            occurrence,
            marginal,
        });
        self.unlock(topic);
        Some(topic)
    }

    fn finish(self) -> ScheduleOutcome<S> {
        let benefit = self.trace.iter().map(|t| t.marginal).sum();
        ScheduleOutcome {
            schedule: Schedule::from_slots(self.slots).expect("greedy emits occurrences in order"),
            trace: self.trace,
            benefit,
        }
    }
}

/// Optimal `d`-slot schedule for `group`, with the per-iteration trace.
pub fn schedule_group_traced<S: Scalar>(
    matrix: &RequirementMatrix,
    group: &[usize],
    d: usize,
    bf: BenefitFunction,
    _tb: TieBreakPolicy,
) -> Result<ScheduleOutcome<S>> {
    matrix.check_group(group)?;
    let mut greedy = Greedy::<S>::new(matrix, group, bf, d);
    for t in 0..matrix.n_topics() {
        greedy.unlock(t);
    }
    for _ in 0..d {
        greedy.step();
    }
    Ok(greedy.finish())
}

pub fn schedule_group<S: Scalar>(
    matrix: &RequirementMatrix,
    group: &[usize],
    d: usize,
    bf: BenefitFunction,
    tb: TieBreakPolicy,
) -> Result<Schedule> {
    Ok(schedule_group_traced::<S>(matrix, group, d, bf, tb)?.schedule)
}

/// Checks topic indices, self-references and acyclicity of the prerequisite graph.
pub fn validate_constraints(n_topics: usize, constraints: &[PrecedenceConstraint]) -> Result<()> {
    let mut graph = DiGraphMap::<usize, ()>::new();
    for c in constraints {
        if c.target >= n_topics {
            return Err(Error::InvalidConstraints(format!(
                "target topic {} out of range ({n_topics} topics)",
                c.target
            )));
        }
        graph.add_node(c.target);
        for &(pre, reps) in &c.prerequisites {
            if pre >= n_topics {
                return Err(Error::InvalidConstraints(format!(
                    "prerequisite topic {pre} out of range ({n_topics} topics)"
                )));
            }
            if reps == 0 {
                return Err(Error::InvalidConstraints(format!(
                    "prerequisite {pre} -> {} has min_reps 0",
                    c.target
                )));
            }
            if pre == c.target {
                return Err(Error::InvalidConstraints(format!(
                    "topic {pre} is its own prerequisite"
                )));
            }
            graph.add_edge(pre, c.target, ());
        }
    }
    if petgraph::algo::is_cyclic_directed(&graph) {
        return Err(Error::InvalidConstraints(
            "prerequisite graph contains a cycle".into(),
        ));
    }
    Ok(())
}

/// Greedy schedule that only picks topics whose prerequisites are met.
///
/// Constraints sharing a target are combined conjunctively. A topic becomes
/// eligible once unlocked and stays eligible, so once any topic is eligible
/// every remaining slot can be filled; no optimality is claimed.
pub fn schedule_group_constrained_traced<S: Scalar>(
    matrix: &RequirementMatrix,
    group: &[usize],
    d: usize,
    bf: BenefitFunction,
    tb: TieBreakPolicy,
    constraints: &[PrecedenceConstraint],
) -> Result<ScheduleOutcome<S>> {
    matrix.check_group(group)?;
    let n_topics = matrix.n_topics();
    validate_constraints(n_topics, constraints)?;
    if constraints.is_empty() {
        return schedule_group_traced(matrix, group, d, bf, tb);
    }

    let mut blockers: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n_topics];
    for c in constraints {
        blockers[c.target].extend_from_slice(&c.prerequisites);
    }
    // dependents[p] lists targets that wait on p.
    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); n_topics];
    for (target, pres) in blockers.iter().enumerate() {
        for &(p, _) in pres {
            if !dependents[p].contains(&target) {
                dependents[p].push(target);
            }
        }
    }

    let mut greedy = Greedy::<S>::new(matrix, group, bf, d);
    let mut unlocked = vec![false; n_topics];
    for t in 0..n_topics {
        if blockers[t].is_empty() {
            unlocked[t] = true;
            greedy.unlock(t);
        }
    }

    for r in 0..d {
        let Some(placed) = greedy.step() else {
            return Err(Error::InfeasibleConstraints(format!(
                "no eligible topic for slot {}",
                r + 1
            )));
        };
        for &target in &dependents[placed] {
            if !unlocked[target]
                && blockers[target]
                    .iter()
                    .all(|&(p, reps)| greedy.counts[p] >= reps)
            {
                unlocked[target] = true;
                greedy.unlock(target);
            }
        }
    }
    Ok(greedy.finish())
}

pub fn schedule_group_constrained<S: Scalar>(
    matrix: &RequirementMatrix,
    group: &[usize],
    d: usize,
    bf: BenefitFunction,
    tb: TieBreakPolicy,
    constraints: &[PrecedenceConstraint],
) -> Result<Schedule> {
    Ok(schedule_group_constrained_traced::<S>(matrix, group, d, bf, tb, constraints)?.schedule)
}

/// Groups `(target, prerequisite, min_reps)` rows into one constraint per target.
pub fn constraints_from_rows(rows: &[(usize, usize, u32)]) -> Vec<PrecedenceConstraint> {
    let mut out: Vec<PrecedenceConstraint> = Vec::new();
    for &(target, pre, reps) in rows {
        match out.iter_mut().find(|c| c.target == target) {
            Some(c) => c.prerequisites.push((pre, reps)),
            None => out.push(PrecedenceConstraint::new(target, vec![(pre, reps)])),
        }
    }
    out
}
