//! Randomized oracle checks. Instance `i` of a run with seed `s` is drawn from
//! RNG stream `i` of `s`, so any instance can be replayed on its own.

use std::fmt::Write as _;

use cohort::rng;
use cohort::{
    brute_force_partition, brute_force_schedule, cohpart, evaluate_partition, group_benefit,
    repetition_vector_of, schedule_group, BenefitFunction, Exact, OracleLimits, PartitionConfig,
    RequirementMatrix, Scalar as _, TieBreakPolicy,
};
use rand::Rng;

use crate::error::{CliError, CliResult};

const U: BenefitFunction = BenefitFunction::Uniform;
const PARTITION_STREAM_BASE: u64 = 1 << 40;

fn random_matrix(rng: &mut rng::Rng, n: usize, m: usize) -> RequirementMatrix {
    let rows = (0..n)
        .map(|_| (0..m).map(|_| rng.random_range(1..=4)).collect())
        .collect();
    RequirementMatrix::from_rows(rows).expect("cells are >= 1")
}

fn describe(matrix: &RequirementMatrix, d: usize) -> String {
    let rows: Vec<String> = matrix.rows().map(|r| format!("{r:?}")).collect();
    format!("d={d} req=[{}]", rows.join(", "))
}

struct ScheduleCase {
    matrix: RequirementMatrix,
    d: usize,
}

fn schedule_case(seed: u64, i: u64) -> ScheduleCase {
    let mut rng = rng::stream(seed, i);
    let n = rng.random_range(1..=4);
    let m = rng.random_range(1..=5);
    let d = rng.random_range(0..=6);
    ScheduleCase {
        matrix: random_matrix(&mut rng, n, m),
        d,
    }
}

struct PartitionCase {
    matrix: RequirementMatrix,
    k: usize,
    d: usize,
}

fn partition_case(seed: u64, i: u64) -> PartitionCase {
    let mut rng = rng::stream(seed, PARTITION_STREAM_BASE + i);
    let n = rng.random_range(2..=6);
    let m = rng.random_range(1..=4);
    let k = rng.random_range(1..=n.min(3));
    let d = rng.random_range(1..=5);
    PartitionCase {
        matrix: random_matrix(&mut rng, n, m),
        k,
        d,
    }
}

/// Greedy benefit and oracle optimum.
fn check_schedule(case: &ScheduleCase) -> CliResult<(Exact, Exact)> {
    let group: Vec<usize> = (0..case.matrix.n_students()).collect();
    let sched = schedule_group::<Exact>(&case.matrix, &group, case.d, U, TieBreakPolicy::LowestTopicIndex)?;
    let rv = repetition_vector_of(&sched, case.matrix.n_topics());
    let greedy = group_benefit::<Exact>(&case.matrix, &group, &rv, U)?;
    let (best, _) = brute_force_schedule::<Exact>(&case.matrix, &group, case.d, U, &OracleLimits::default())?;
    Ok((greedy, best))
}

struct PartitionCheck {
    optimum: Exact,
    optimum_rescored: Exact,
    heuristic: Exact,
    heuristic_rescored: Exact,
}

impl PartitionCheck {
    fn consistent(&self) -> bool {
        self.optimum == self.optimum_rescored
            && self.heuristic == self.heuristic_rescored
            && self.heuristic <= self.optimum
    }
}

fn check_partition(case: &PartitionCase, seed: u64) -> CliResult<PartitionCheck> {
    let (optimum, labels) =
        brute_force_partition::<Exact>(&case.matrix, case.k, case.d, U, &OracleLimits::default())?;
    let optimum_rescored = evaluate_partition::<Exact>(&case.matrix, &labels, case.k, case.d, U)?.objective;
    let cfg = PartitionConfig::new(case.k, case.d, seed).with_restarts(10);
    let r = cohpart::<Exact>(&case.matrix, &cfg, U)?;
    let heuristic_rescored =
        evaluate_partition::<Exact>(&case.matrix, &r.partition.assignment, case.k, case.d, U)?.objective;
    Ok(PartitionCheck {
        optimum,
        optimum_rescored,
        heuristic: r.partition.objective,
        heuristic_rescored,
    })
}

fn ratio(num: Exact, den: Exact) -> f64 {
    if den == Exact::from_integer(0) {
        1.0
    } else {
        (num / den).to_f64_lossy()
    }
}

pub fn cmd_verify(instances: usize, seed: u64, replay: Option<u64>) -> CliResult<String> {
    let mut report = String::new();
    let ids: Vec<u64> = match replay {
        Some(i) => vec![i],
        None => (0..instances as u64).collect(),
    };

    let mut violations = 0;
    let mut matches = 0;
    for &i in &ids {
        let case = schedule_case(seed, i);
        let (greedy, best) = check_schedule(&case)?;
        if greedy == best {
            matches += 1;
        } else {
            violations += 1;
        }
        if replay.is_some() || greedy != best {
            writeln!(
                report,
                "schedule instance {i}: {} greedy {greedy} oracle {best}",
                describe(&case.matrix, case.d)
            )
            .unwrap();
        }
    }
    writeln!(report, "schedule: {matches}/{} greedy matches oracle", ids.len()).unwrap();

    let mut consistent = 0;
    let mut ratios = Vec::new();
    for &i in &ids {
        let case = partition_case(seed, i);
        let check = check_partition(&case, seed.wrapping_add(i))?;
        ratios.push(ratio(check.heuristic, check.optimum));
        if check.consistent() {
            consistent += 1;
        } else {
            violations += 1;
        }
        if replay.is_some() || !check.consistent() {
            writeln!(
                report,
                "partition instance {i}: {} K={} optimum {} (rescored {}) cohpart {} (rescored {})",
                describe(&case.matrix, case.d),
                case.k,
                check.optimum,
                check.optimum_rescored,
                check.heuristic,
                check.heuristic_rescored
            )
            .unwrap();
        }
    }
    let mean_ratio = if ratios.is_empty() {
        String::from("n/a")
    } else {
        format!("{:.4}", ratios.iter().sum::<f64>() / ratios.len() as f64)
    };
    writeln!(
        report,
        "partition: {consistent}/{} consistent with oracle; mean cohpart/optimum {mean_ratio}",
        ids.len()
    )
    .unwrap();

    if violations > 0 {
        print!("{report}");
        return Err(CliError::Verification(format!("{violations} oracle violations")));
    }
    Ok(report)
}
