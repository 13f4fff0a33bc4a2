//! CSV formats.
//!
//! | file | header |
//! |------|--------|
//! | requirement matrix | `student_id,<topic_1>,...,<topic_m>` |
//! | planted labels | `student_id,planted_group` |
//! | partition | `student_id,group` |
//! | constraints | `target_topic,prereq_topic,min_reps` (header optional) |
//! | difficulties / abilities | `course_id,difficulty` / `student_id,ability` |

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::RequirementMatrix;
use crate::scheduler::{constraints_from_rows, PrecedenceConstraint};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn read_matrix_from<R: Read>(reader: R) -> Result<RequirementMatrix> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() < 2 {
        return Err(parse_err("matrix header needs student_id and at least one topic"));
    }
    let topics: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        ids.push(record.get(0).unwrap_or_default().to_string());
        let row = record
            .iter()
            .skip(1)
            .map(|cell| {
                cell.parse::<u32>().map_err(|_| {
                    parse_err(format!("row {}: '{cell}' is not a positive integer", line + 1))
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        rows.push(row);
    }
    RequirementMatrix::with_labels(rows, ids, topics)
}

pub fn read_matrix(path: &Path) -> Result<RequirementMatrix> {
    read_matrix_from(std::fs::File::open(path)?)
}

pub fn write_matrix_to<W: Write>(matrix: &RequirementMatrix, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["student_id".to_string()];
    header.extend(matrix.topic_ids().iter().cloned());
    w.write_record(&header)?;
    for (id, row) in matrix.student_ids().iter().zip(matrix.rows()) {
        let mut rec = vec![id.clone()];
        rec.extend(row.iter().map(u32::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix(matrix: &RequirementMatrix, path: &Path) -> Result<()> {
    write_matrix_to(matrix, std::fs::File::create(path)?)
}

fn write_labels_to<W: Write>(
    matrix: &RequirementMatrix,
    labels: &[usize],
    column: &str,
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["student_id", column])?;
    for (id, g) in matrix.student_ids().iter().zip(labels) {
        w.write_record([id.as_str(), &g.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_planted_labels(matrix: &RequirementMatrix, labels: &[usize], path: &Path) -> Result<()> {
    write_labels_to(matrix, labels, "planted_group", std::fs::File::create(path)?)
}

pub fn write_partition_to<W: Write>(matrix: &RequirementMatrix, assignment: &[usize], writer: W) -> Result<()> {
    write_labels_to(matrix, assignment, "group", writer)
}

/// Reads `student_id,<label>` rows and orders them by the matrix's student ids.
pub fn read_labels(matrix: &RequirementMatrix, path: &Path) -> Result<Vec<usize>> {
    let pairs = read_pairs(path)?;
    let mut labels = vec![None; matrix.n_students()];
    for (id, value) in pairs {
        let s = matrix
            .student_ids()
            .iter()
            .position(|x| *x == id)
            .ok_or_else(|| parse_err(format!("label for unknown student '{id}'")))?;
        labels[s] = Some(
            value
                .parse::<usize>()
                .map_err(|_| parse_err(format!("bad group '{value}' for '{id}'")))?,
        );
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(s, l)| l.ok_or_else(|| parse_err(format!("no label for student '{}'", matrix.student_ids()[s]))))
        .collect()
}

fn read_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() < 2 {
            return Err(parse_err("expected two columns"));
        }
        out.push((record[0].to_string(), record[1].to_string()));
    }
    Ok(out)
}

/// Reads `id,value` rows of floats (difficulties or abilities).
pub fn read_scalar_column(path: &Path) -> Result<Vec<(String, f64)>> {
    read_pairs(path)?
        .into_iter()
        .map(|(id, v)| {
            v.parse::<f64>()
                .map(|x| (id.clone(), x))
                .map_err(|_| parse_err(format!("'{v}' for '{id}' is not a number")))
        })
        .collect()
}

pub fn write_scalar_column(path: &Path, header: [&str; 2], ids: &[String], values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for (id, v) in ids.iter().zip(values) {
        w.write_record([id.as_str(), &v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn topic_ref(matrix: &RequirementMatrix, field: &str) -> Result<usize> {
    if let Some(t) = matrix.topic_index(field) {
        return Ok(t);
    }
    match field.parse::<usize>() {
        Ok(t) if t < matrix.n_topics() => Ok(t),
        _ => Err(Error::InvalidConstraints(format!("unknown topic '{field}'"))),
    }
}

/// Topics may be given by header label or by zero-based index.
pub fn read_constraints_from<R: Read>(matrix: &RequirementMatrix, reader: R) -> Result<Vec<PrecedenceConstraint>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 3 {
            return Err(parse_err(format!("constraint row {} needs 3 fields", i + 1)));
        }
        let reps = match record[2].parse::<u32>() {
            Ok(r) => r,
            Err(_) if i == 0 => continue, // header
            Err(_) => return Err(parse_err(format!("constraint row {}: bad min_reps", i + 1))),
        };
        rows.push((topic_ref(matrix, &record[0])?, topic_ref(matrix, &record[1])?, reps));
    }
    Ok(constraints_from_rows(&rows))
}

pub fn read_constraints(matrix: &RequirementMatrix, path: &Path) -> Result<Vec<PrecedenceConstraint>> {
    read_constraints_from(matrix, std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let text = "student_id,algebra,geometry\nu1,1,2\nu2,3,4\n";
        let m = read_matrix_from(text.as_bytes()).unwrap();
        assert_eq!(m.topic_ids(), &["algebra", "geometry"]);
        assert_eq!(m.student_ids(), &["u1", "u2"]);
        assert_eq!(m.req(1, 0), 3);
        let mut out = Vec::new();
        write_matrix_to(&m, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn matrix_rejects_bad_cells() {
        assert!(read_matrix_from("student_id,a\nu1,0\n".as_bytes()).is_err());
        assert!(read_matrix_from("student_id,a\nu1,x\n".as_bytes()).is_err());
        assert!(read_matrix_from("student_id,a\nu1,-2\n".as_bytes()).is_err());
        assert!(read_matrix_from("student_id\nu1\n".as_bytes()).is_err());
    }

    #[test]
    fn constraints_by_label_or_index() {
        let m = read_matrix_from("student_id,t1,t2,t3\nu,1,1,1\n".as_bytes()).unwrap();
        let text = "target_topic,prereq_topic,min_reps\nt2,t1,2\n2,0,1\nt3,t2,1\n";
        let cons = read_constraints_from(&m, text.as_bytes()).unwrap();
        assert_eq!(cons.len(), 2);
        assert_eq!(cons[0], PrecedenceConstraint::new(1, vec![(0, 2)]));
        assert_eq!(cons[1], PrecedenceConstraint::new(2, vec![(0, 1), (1, 1)]));
        assert!(read_constraints_from(&m, "t9,t1,1\n".as_bytes()).is_err());
        assert!(read_constraints_from(&m, "".as_bytes()).unwrap().is_empty());
    }
}
