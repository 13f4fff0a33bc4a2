//! Schedules repetition-based course material for groups of students and
//! partitions a student population into cohorts so that total learning
//! benefit is maximized.
//!
//! The benefit computations are generic over [`Scalar`]; use [`Exact`]
//! (`Rational64`) when results must compare exactly and [`f64`] otherwise.

pub mod dataset;
pub mod datagen;
pub mod error;
pub mod io;
pub mod model;
pub mod oracle;
pub mod partitioner;
pub mod rng;
pub mod scalar;
pub mod scheduler;

pub use error::{Error, Result};
pub use model::{
    group_benefit, marginal_benefit, occurrence_benefit, partition_benefit, repetition_vector_of,
    student_benefit, BenefitFunction, Occurrence, Partition, RepetitionVector, RequirementMatrix,
    Schedule,
};
pub use oracle::{brute_force_partition, brute_force_schedule, OracleLimits};
pub use partitioner::{
    cohpart, cohpart_sampled, evaluate_partition, kmeans_partition, partition_similarity,
    random_partition, PartitionConfig, PartitionResult,
};
pub use scalar::Scalar;
pub use scheduler::{
    schedule_group, schedule_group_constrained, schedule_group_constrained_traced,
    schedule_group_traced, validate_constraints, PrecedenceConstraint, ScheduleOutcome,
    TieBreakPolicy, TraceStep,
};

/// Exact rational benefits.
pub type Exact = num_rational::Rational64;

pub type ExactPartition = Partition<Exact>;
pub type Partition64 = Partition<f64>;
pub type PartitionResult64 = PartitionResult<f64>;
pub type ExactPartitionResult = PartitionResult<Exact>;
pub type ScheduleOutcome64 = ScheduleOutcome<f64>;
pub type ExactScheduleOutcome = ScheduleOutcome<Exact>;
