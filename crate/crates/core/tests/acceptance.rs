//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::time::Instant;

use cohort::datagen::{gen_distribution, gen_grm, gen_ground_truth, grades_to_repetitions};
use cohort::datagen::{ground_truth_selected_topics, CellDistribution, GroundTruthSpec, GrmSpec};
use cohort::rng;
use cohort::{
    brute_force_partition, brute_force_schedule, cohpart, cohpart_sampled, evaluate_partition,
    kmeans_partition, partition_similarity, random_partition, repetition_vector_of,
    schedule_group, schedule_group_constrained, BenefitFunction, Exact, OracleLimits,
    PartitionConfig, PartitionResult, PrecedenceConstraint, RequirementMatrix, Schedule, Scalar,
    TieBreakPolicy,
};
use rand::Rng;

const U: BenefitFunction = BenefitFunction::Uniform;
const TB: TieBreakPolicy = TieBreakPolicy::LowestTopicIndex;
const SEEDS: [u64; 5] = [11, 12, 13, 14, 15];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Every CohPart run in this suite goes through here so its trace and
/// iteration count are checked.
#[derive(Default)]
struct ConvergenceLog {
    runs: usize,
    violations: Vec<String>,
}

impl ConvergenceLog {
    fn record<S: Scalar>(&mut self, label: &str, r: &PartitionResult<S>) {
        self.runs += 1;
        let trace: Vec<f64> = r.objective_trace.iter().map(|v| v.to_f64_lossy()).collect();
        if trace.windows(2).any(|w| w[1] < w[0] - 1e-9 * w[0].abs().max(1.0)) {
            self.violations.push(format!("{label}: trace decreased"));
        }
        if r.iterations > 100 {
            self.violations.push(format!("{label}: {} iterations", r.iterations));
        }
    }
}

fn random_rows(rng: &mut rng::Rng, n: usize, m: usize, hi: u32) -> RequirementMatrix {
    let rows = (0..n)
        .map(|_| (0..m).map(|_| rng.random_range(1..=hi)).collect())
        .collect();
    RequirementMatrix::from_rows(rows).unwrap()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn scaled_ground_truth() -> GroundTruthSpec {
    GroundTruthSpec {
        n_groups: 5,
        group_size: 20,
        selected_per_group: 5,
        n_topics: 40,
        deadline: 50,
        filler_mean: None,
        filler_sd: 3.0,
    }
}

fn c1_greedy_optimality() -> Outcome {
    let limits = OracleLimits::default();
    let mut matches = 0;
    let mut first_failure = None;
    for i in 0..200u64 {
        let mut rng = rng::stream(1000 + i, 0);
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=5);
        let d = rng.random_range(0..=6);
        let a = random_rows(&mut rng, n, m, 4);
        let group: Vec<usize> = (0..n).collect();
        let sched = schedule_group::<Exact>(&a, &group, d, U, TB).unwrap();
        let rv = repetition_vector_of(&sched, m);
        let greedy: Exact = cohort::group_benefit(&a, &group, &rv, U).unwrap();
        let (best, _) = brute_force_schedule::<Exact>(&a, &group, d, U, &limits).unwrap();
        if greedy == best {
            matches += 1;
        } else if first_failure.is_none() {
            first_failure = Some(i);
        }
    }
    outcome(
        matches == 200,
        format!("{matches}/200 exact matches; first failure {first_failure:?}"),
    )
}

fn c2_convergence(log: &mut ConvergenceLog) -> Outcome {
    let spec = GroundTruthSpec::standard(50);
    let mut within = 0;
    let mut iters = Vec::new();
    for seed in SEEDS {
        let (a, _) = gen_ground_truth(&spec, seed).unwrap();
        let r = cohpart::<f64>(&a, &PartitionConfig::new(10, 50, seed), U).unwrap();
        log.record("full-size ground truth", &r);
        iters.push(r.iterations);
        if r.converged && r.iterations <= 40 {
            within += 1;
        }
    }
    outcome(
        within >= 4,
        format!("converged within 40 iterations in {within}/5 seeds (iterations {iters:?})"),
    )
}

struct GroundTruthRuns {
    cohpart: Vec<f64>,
    kmeans: Vec<f64>,
    random: Vec<f64>,
    planted: Vec<f64>,
    ari_cohpart: Vec<f64>,
    ari_kmeans: Vec<f64>,
}

fn ground_truth_runs(log: &mut ConvergenceLog) -> GroundTruthRuns {
    let spec = scaled_ground_truth();
    let mut runs = GroundTruthRuns {
        cohpart: vec![],
        kmeans: vec![],
        random: vec![],
        planted: vec![],
        ari_cohpart: vec![],
        ari_kmeans: vec![],
    };
    for seed in SEEDS {
        let (a, labels) = gen_ground_truth(&spec, seed).unwrap();
        let cfg = PartitionConfig::new(5, spec.deadline, seed);
        let cp = cohpart::<f64>(&a, &cfg, U).unwrap();
        log.record("scaled ground truth K=5", &cp);
        let km = kmeans_partition::<f64>(&a, &cfg, U).unwrap();
        let rp = random_partition::<f64>(&a, &cfg, U).unwrap();
        let planted = evaluate_partition::<f64>(&a, &labels, 5, spec.deadline, U).unwrap();
        runs.ari_cohpart
            .push(partition_similarity(&labels, &cp.partition.assignment).unwrap());
        runs.ari_kmeans
            .push(partition_similarity(&labels, &km.partition.assignment).unwrap());
        runs.cohpart.push(cp.partition.objective);
        runs.kmeans.push(km.partition.objective);
        runs.random.push(rp.objective);
        runs.planted.push(planted.objective);
    }
    runs
}

fn c3_baseline_ordering(runs: &GroundTruthRuns) -> Outcome {
    let (c, k, r) = (mean(&runs.cohpart), mean(&runs.kmeans), mean(&runs.random));
    outcome(
        c > k && k > r && c >= 1.10 * r,
        format!("mean objective cohpart {c:.3} > kmeans {k:.3} > random {r:.3}; cohpart/random {:.3}", c / r),
    )
}

fn c4_planted_structure(runs: &GroundTruthRuns) -> Outcome {
    let ari_wins = runs
        .ari_cohpart
        .iter()
        .zip(&runs.ari_kmeans)
        .filter(|(c, k)| c > k)
        .count();
    let close = runs
        .cohpart
        .iter()
        .zip(&runs.planted)
        .filter(|(c, p)| **c >= 0.95 * **p)
        .count();
    outcome(
        ari_wins >= 4 && close >= 4,
        format!(
            "ARI cohpart > kmeans in {ari_wins}/5 (cohpart {:?}, kmeans {:?}); within 5% of planted in {close}/5 (ratios {:?})",
            round3(&runs.ari_cohpart),
            round3(&runs.ari_kmeans),
            runs.cohpart
                .iter()
                .zip(&runs.planted)
                .map(|(c, p)| (c / p * 1000.0).round() / 1000.0)
                .collect::<Vec<_>>()
        ),
    )
}

fn round3(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| (x * 1000.0).round() / 1000.0).collect()
}

fn c5_benefit_grows_with_k(log: &mut ConvergenceLog) -> Outcome {
    let spec = scaled_ground_truth();
    let ks = [1usize, 5, 10, 20];
    let mut monotone = 0;
    let mut at1 = Vec::new();
    let mut at10 = Vec::new();
    for seed in SEEDS {
        let (a, _) = gen_ground_truth(&spec, seed).unwrap();
        let values: Vec<f64> = ks
            .iter()
            .map(|&k| {
                let r = cohpart::<f64>(&a, &PartitionConfig::new(k, spec.deadline, seed), U).unwrap();
                log.record("ground truth K sweep", &r);
                r.partition.objective
            })
            .collect();
        if values.windows(2).all(|w| w[1] >= w[0] - 1e-9) {
            monotone += 1;
        }
        at1.push(values[0]);
        at10.push(values[2]);
    }
    let (m1, m10) = (mean(&at1), mean(&at10));
    outcome(
        monotone >= 4 && m10 > m1,
        format!("non-decreasing in K for {monotone}/5 seeds; mean K=1 {m1:.3}, K=10 {m10:.3}"),
    )
}

fn c6_small_instance_gap(log: &mut ConvergenceLog) -> Outcome {
    let limits = OracleLimits::default();
    let mut ratios = Vec::new();
    for i in 0..50u64 {
        let mut rng = rng::stream(5000 + i, 0);
        let n = rng.random_range(2..=8);
        let m = rng.random_range(1..=4);
        let d = rng.random_range(1..=5);
        let a = random_rows(&mut rng, n, m, 4);
        let (opt, _) = brute_force_partition::<Exact>(&a, 2, d, U, &limits).unwrap();
        let r = cohpart::<Exact>(&a, &PartitionConfig::new(2, d, i).with_restarts(10), U).unwrap();
        log.record("small instance", &r);
        assert!(r.partition.objective <= opt, "heuristic beat the exact optimum");
        ratios.push(r.partition.objective.to_f64_lossy() / opt.to_f64_lossy());
    }
    let avg = mean(&ratios);
    let worst = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        avg >= 0.95,
        format!("mean cohpart/optimum {avg:.4} over 50 instances (worst {worst:.4})"),
    )
}

fn grm_matrix(seed: u64) -> RequirementMatrix {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/difficulties.csv");
    let source: Vec<f64> = cohort::io::read_scalar_column(&path)
        .unwrap()
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    let spec = GrmSpec::new(2000, 100, source);
    let sample = gen_grm(&spec, seed).unwrap();
    grades_to_repetitions(&sample.grades, spec.base, spec.step).unwrap()
}

fn c7_sampling_fidelity(log: &mut ConvergenceLog) -> Outcome {
    let d = 100;
    let mut full = Vec::new();
    let mut sampled = Vec::new();
    let mut faster = 0;
    let mut times = Vec::new();
    for seed in SEEDS {
        let a = grm_matrix(seed);
        let cfg = PartitionConfig::new(10, d, seed).with_sample_multiplier(4);
        let cp = cohpart::<f64>(&a, &cfg, U).unwrap();
        log.record("grm cohpart", &cp);
        let cs = cohpart_sampled::<f64>(&a, &cfg, U).unwrap();
        log.record("grm cohpart_s", &cs);
        if cs.runtime_ms < cp.runtime_ms {
            faster += 1;
        }
        times.push((cp.runtime_ms.round(), cs.runtime_ms.round()));
        full.push(cp.partition.objective);
        sampled.push(cs.partition.objective);
    }
    let ratio = mean(&sampled) / mean(&full);
    outcome(
        ratio >= 0.9 && faster == 5,
        format!("mean cohpart_s/cohpart {ratio:.4}; cohpart_s faster in {faster}/5 runs (ms full,sampled {times:?})"),
    )
}

fn c8_scaling(log: &mut ConvergenceLog) -> Outcome {
    let sizes = [2000usize, 4000, 8000];
    let mut per_iter = Vec::new();
    for &n in &sizes {
        let mut samples = Vec::new();
        for seed in SEEDS {
            let a = gen_distribution(CellDistribution::NORMAL, n, 100, seed).unwrap();
            let r = cohpart::<f64>(&a, &PartitionConfig::new(10, 200, seed), U).unwrap();
            log.record("scaling", &r);
            samples.extend(r.iteration_ms.iter().copied());
        }
        per_iter.push(mean(&samples));
    }
    let factors: Vec<f64> = per_iter.windows(2).map(|w| w[1] / w[0]).collect();
    let pass = factors.iter().all(|&f| (1.5..=3.0).contains(&f));
    outcome(
        pass,
        format!(
            "mean ms/iteration {:?} for n {:?}; doubling factors {:?}",
            round3(&per_iter),
            sizes,
            round3(&factors)
        ),
    )
}

/// Replays a schedule and checks every precedence constraint slot by slot.
fn replay_ok(schedule: &Schedule, n_topics: usize, constraints: &[PrecedenceConstraint]) -> bool {
    let mut seen = vec![0u32; n_topics];
    for topic in schedule.topics() {
        for c in constraints.iter().filter(|c| c.target == topic) {
            if c.prerequisites.iter().any(|&(p, r)| seen[p] < r) {
                return false;
            }
        }
        seen[topic] += 1;
    }
    true
}

fn c9_constraint_validity() -> Outcome {
    let mut valid = 0;
    let mut identical = 0;
    for i in 0..100u64 {
        let mut rng = rng::stream(9000 + i, 0);
        let n = rng.random_range(1..=5);
        let m = rng.random_range(2..=8);
        let d = rng.random_range(0..=12);
        let a = random_rows(&mut rng, n, m, 4);
        let group: Vec<usize> = (0..n).collect();

        // Random DAG: prerequisites only come earlier in a random topic order.
        let mut order: Vec<usize> = (0..m).collect();
        for j in (1..m).rev() {
            order.swap(j, rng.random_range(0..=j));
        }
        let mut constraints = Vec::new();
        for pos in 1..m {
            if rng.random_bool(0.6) {
                let n_pre = rng.random_range(1..=pos.min(2));
                let mut pres: Vec<(usize, u32)> = Vec::new();
                while pres.len() < n_pre {
                    let p = order[rng.random_range(0..pos)];
                    if !pres.iter().any(|&(q, _)| q == p) {
                        pres.push((p, rng.random_range(1..=3)));
                    }
                }
                constraints.push(PrecedenceConstraint::new(order[pos], pres));
            }
        }
        let s = schedule_group_constrained::<Exact>(&a, &group, d, U, TB, &constraints).unwrap();
        if s.len() == d && replay_ok(&s, m, &constraints) {
            valid += 1;
        }
        let plain = schedule_group::<Exact>(&a, &group, d, U, TB).unwrap();
        let empty = schedule_group_constrained::<Exact>(&a, &group, d, U, TB, &[]).unwrap();
        if plain == empty {
            identical += 1;
        }
    }
    outcome(
        valid == 100 && identical == 100,
        format!("{valid}/100 pass replay validation; {identical}/100 identical with no constraints"),
    )
}

fn c10_generator_statistics() -> Outcome {
    let normal = gen_distribution(CellDistribution::NORMAL, 400, 40, 21).unwrap();
    let cells: Vec<f64> = normal.rows().flatten().map(|&v| f64::from(v)).collect();
    let mu = mean(&cells);
    let sd = (cells.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (cells.len() - 1) as f64).sqrt();
    let normal_ok = (mu - 30.0).abs() <= 0.5 && (sd - 5.0).abs() <= 0.5;

    let uniform = gen_distribution(CellDistribution::UNIFORM, 400, 40, 22).unwrap();
    let uniform_ok = uniform.rows().flatten().all(|&v| (5..=100).contains(&v));

    let spec = GroundTruthSpec::standard(50);
    let mut rows = 0;
    let mut exact = 0;
    for seed in SEEDS {
        let (a, labels) = gen_ground_truth(&spec, seed).unwrap();
        let selected = ground_truth_selected_topics(&spec, seed);
        for s in 0..a.n_students() {
            rows += 1;
            let sum: u32 = selected[labels[s]].iter().map(|&t| a.req(s, t)).sum();
            if sum as usize == spec.deadline {
                exact += 1;
            }
        }
    }
    outcome(
        normal_ok && uniform_ok && exact == rows,
        format!(
            "normal mean {mu:.3} sd {sd:.3}; uniform in [5,100]: {uniform_ok}; ground truth sums exact {exact}/{rows}"
        ),
    )
}

fn main() {
    let started = Instant::now();
    let mut log = ConvergenceLog::default();
    let mut results: Vec<(&str, Outcome)> = Vec::new();

    results.push(("C1 greedy schedule optimality", c1_greedy_optimality()));
    let c2 = c2_convergence(&mut log);
    let runs = ground_truth_runs(&mut log);
    results.push(("C3 baseline ordering", c3_baseline_ordering(&runs)));
    results.push(("C4 planted structure advantage", c4_planted_structure(&runs)));
    results.push(("C5 benefit grows with K", c5_benefit_grows_with_k(&mut log)));
    results.push(("C6 small-instance optimality gap", c6_small_instance_gap(&mut log)));
    results.push(("C7 sampling fidelity", c7_sampling_fidelity(&mut log)));
    results.push(("C8 per-iteration scaling", c8_scaling(&mut log)));
    results.push(("C9 constraint validity", c9_constraint_validity()));
    results.push(("C10 generator statistics", c10_generator_statistics()));

    let c2 = outcome(
        c2.pass && log.violations.is_empty(),
        format!(
            "{}; {} cohpart runs checked, trace/iteration violations: {:?}",
            c2.detail, log.runs, log.violations
        ),
    );
    results.insert(1, ("C2 cohpart convergence", c2));

    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("[{tag}] {name}: {}", o.detail);
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
