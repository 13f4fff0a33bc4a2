use std::path::Path;

use cohort::dataset::{DatasetSpec, Overrides};
use cohort::{
    group_benefit, io, repetition_vector_of, schedule_group, schedule_group_constrained,
    BenefitFunction, PartitionConfig, RequirementMatrix, TieBreakPolicy,
};
use serde::Serialize;

use crate::algo::{run_algorithm, Algorithm, Deadline};
use crate::error::{validation, CliResult};

pub fn cmd_generate(
    spec_path: &Path,
    out_dir: &Path,
    seed: Option<u64>,
    overrides: Overrides,
) -> CliResult<Vec<String>> {
    let (mut spec, base_dir) = DatasetSpec::load(spec_path)?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let ds = spec.generate(&base_dir, overrides)?;
    std::fs::create_dir_all(out_dir)?;
    let mut written = vec!["matrix.csv".to_string()];
    io::write_matrix(&ds.matrix, &out_dir.join("matrix.csv"))?;
    if let Some(labels) = &ds.labels {
        io::write_planted_labels(&ds.matrix, labels, &out_dir.join("labels.csv"))?;
        written.push("labels.csv".into());
    }
    if let Some(grm) = &ds.grm {
        io::write_scalar_column(
            &out_dir.join("abilities.csv"),
            ["student_id", "ability"],
            ds.matrix.student_ids(),
            &grm.abilities,
        )?;
        io::write_scalar_column(
            &out_dir.join("difficulties.csv"),
            ["course_id", "difficulty"],
            ds.matrix.topic_ids(),
            &grm.difficulties,
        )?;
        written.extend(["abilities.csv".into(), "difficulties.csv".into()]);
    }
    Ok(written)
}

/// Students by id or zero-based index, comma separated; `None` means everyone.
fn parse_group(matrix: &RequirementMatrix, spec: Option<&str>) -> CliResult<Vec<usize>> {
    let Some(spec) = spec else {
        return Ok((0..matrix.n_students()).collect());
    };
    let mut group = Vec::new();
    for field in spec.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        let s = match matrix.student_ids().iter().position(|id| id == field) {
            Some(s) => s,
            None => match field.parse::<usize>() {
                Ok(s) if s < matrix.n_students() => s,
                _ => return validation(format!("unknown student '{field}'")),
            },
        };
        if !group.contains(&s) {
            group.push(s);
        }
    }
    if group.is_empty() {
        return validation("group is empty");
    }
    Ok(group)
}

#[derive(Serialize)]
struct SlotOut<'a> {
    slot: usize,
    topic: &'a str,
    occurrence: u32,
}

#[derive(Serialize)]
struct ScheduleOut<'a> {
    slots: Vec<SlotOut<'a>>,
    benefit: f64,
}

pub fn cmd_schedule(
    matrix_path: &Path,
    group: Option<&str>,
    d: Deadline,
    constraints: Option<&Path>,
    bf: BenefitFunction,
) -> CliResult<String> {
    let matrix = io::read_matrix(matrix_path)?;
    let group = parse_group(&matrix, group)?;
    let d = d.resolve(&matrix);
    let tb = TieBreakPolicy::LowestTopicIndex;
    let schedule = match constraints {
        Some(path) => {
            let cons = io::read_constraints(&matrix, path)?;
            schedule_group_constrained::<f64>(&matrix, &group, d, bf, tb, &cons)?
        }
        None => schedule_group::<f64>(&matrix, &group, d, bf, tb)?,
    };
    let rv = repetition_vector_of(&schedule, matrix.n_topics());
    let benefit = group_benefit::<f64>(&matrix, &group, &rv, bf)?;
    let out = ScheduleOut {
        slots: schedule
            .slots()
            .iter()
            .enumerate()
            .map(|(i, o)| SlotOut {
                slot: i + 1,
                topic: &matrix.topic_ids()[o.topic],
                occurrence: o.occurrence,
            })
            .collect(),
        benefit,
    };
    Ok(serde_json::to_string(&out)?)
}

#[derive(Serialize)]
struct PartitionMeta {
    algorithm: Algorithm,
    #[serde(rename = "K")]
    k: usize,
    d: usize,
    seed: u64,
    objective: f64,
    iterations: usize,
    runtime_ms: f64,
}

pub struct PartitionArgs<'a> {
    pub matrix: &'a Path,
    pub out_dir: &'a Path,
    pub algorithm: Algorithm,
    pub k: usize,
    pub d: Deadline,
    pub seed: u64,
    pub restarts: usize,
    pub sample_c: usize,
}

/// Writes `partition.csv` and `partition.json`; returns the JSON.
pub fn cmd_partition(args: &PartitionArgs) -> CliResult<String> {
    let matrix = io::read_matrix(args.matrix)?;
    let d = args.d.resolve(&matrix);
    let cfg = PartitionConfig::new(args.k, d, args.seed)
        .with_restarts(args.restarts)
        .with_sample_multiplier(args.sample_c);
    let run = run_algorithm(args.algorithm, &matrix, &cfg)?;
    std::fs::create_dir_all(args.out_dir)?;
    io::write_partition_to(
        &matrix,
        &run.assignment,
        std::fs::File::create(args.out_dir.join("partition.csv"))?,
    )?;
    let meta = PartitionMeta {
        algorithm: args.algorithm,
        k: args.k,
        d,
        seed: args.seed,
        objective: run.objective,
        iterations: run.iterations,
        runtime_ms: run.runtime_ms,
    };
    let json = serde_json::to_string(&meta)?;
    std::fs::write(args.out_dir.join("partition.json"), format!("{json}\n"))?;
    Ok(json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_by_id_or_index() {
        let m = RequirementMatrix::from_rows(vec![vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(parse_group(&m, None).unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_group(&m, Some("s3, 0,s3")).unwrap(), vec![2, 0]);
        assert!(parse_group(&m, Some("s9")).is_err());
        assert!(parse_group(&m, Some("3")).is_err());
        assert!(parse_group(&m, Some(" , ")).is_err());
    }
}
