//! File formats. Every file is written to a temporary sibling and renamed
//! into place, so readers never observe a partial file.
//!
//! | file            | header                      |
//! |-----------------|-----------------------------|
//! | archive         | `task,x1..xd,f1..fm`        |
//! | decision view   | `task,c1,c2`                |
//! | objective view  | `task,f1,f2`                |
//! | RMMD matrix     | `task,<task names>`         |
//! | summary         | `suite,algo,chv_mean,chv_std` |
//!
//! Task ids in files are 1-based. Numbers use the shortest decimal text that
//! parses back to the same `f64`.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sos_core::analysis::{DecisionRow, ObjectiveRow};
use sos_core::{DecisionVector, Individual, ParetoArchive, TaskDefinition};

use crate::{Result, RunnerError};

/// Writes `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| RunnerError::io(dir, e))?;
    }
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| RunnerError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| RunnerError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| RunnerError::format(path, e))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn csv_bytes(header: Vec<String>, rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// One row per member: 1-based task id, native decision values, objectives.
pub fn archive_csv(archive: &ParetoArchive, task: &TaskDefinition) -> Vec<u8> {
    let d = task.dim();
    let m = task.num_objectives();
    let mut header = vec!["task".to_string()];
    header.extend((1..=d).map(|i| format!("x{i}")));
    header.extend((1..=m).map(|i| format!("f{i}")));
    let rows = archive.members().iter().map(|ind| {
        let mut row = vec![(archive.task() + 1).to_string()];
        row.extend(ind.decision.native.iter().map(|&v| num(v)));
        row.extend(ind.objectives.iter().map(|&v| num(v)));
        row
    });
    csv_bytes(header, rows)
}

/// Reads an archive file back. Unified coordinates are recomputed from the
/// native values and padded with zeros up to `unified_len`.
pub fn read_archive_csv(
    path: &Path,
    task_index: usize,
    task: &TaskDefinition,
    unified_len: usize,
    capacity: usize,
) -> Result<ParetoArchive> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| RunnerError::format(path, e))?;
    let d = task.dim();
    let m = task.num_objectives();
    let width = reader.headers().map_err(|e| RunnerError::format(path, e))?.len();
    if width != 1 + d + m {
        return Err(RunnerError::format(
            path,
            format!("expected {} columns, found {width}", 1 + d + m),
        ));
    }
    let mut members = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| RunnerError::format(path, e))?;
        let values = record
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| RunnerError::format(path, e))?;
        if values[0] != (task_index + 1) as f64 {
            return Err(RunnerError::format(
                path,
                format!("row labelled task {}, expected {}", values[0], task_index + 1),
            ));
        }
        let native = values[1..=d].to_vec();
        let mut unified = task.encode(&native);
        unified.resize(unified_len.max(d), 0.0);
        let decision = DecisionVector { unified, native };
        members.push(Individual::new(decision, values[1 + d..].to_vec(), task_index));
    }
    let archive = ParetoArchive::from_individuals(task_index, capacity.max(members.len()).max(1), members)?;
    archive.validate()?;
    Ok(archive)
}

pub fn decision_view_csv(rows: &[DecisionRow]) -> Vec<u8> {
    csv_bytes(
        vec!["task".into(), "c1".into(), "c2".into()],
        rows.iter().map(|r| vec![(r.task + 1).to_string(), num(r.c1), num(r.c2)]),
    )
}

pub fn objective_view_csv(rows: &[ObjectiveRow]) -> Vec<u8> {
    csv_bytes(
        vec!["task".into(), "f1".into(), "f2".into()],
        rows.iter().map(|r| vec![(r.task + 1).to_string(), num(r.f1), num(r.f2)]),
    )
}

/// Square matrix with task names labelling rows and columns.
pub fn matrix_csv(names: &[String], values: &[Vec<f64>]) -> Vec<u8> {
    let mut header = vec!["task".to_string()];
    header.extend(names.iter().cloned());
    csv_bytes(
        header,
        names.iter().zip(values).map(|(name, row)| {
            let mut r = vec![name.clone()];
            r.extend(row.iter().map(|&v| num(v)));
            r
        }),
    )
}

/// Parses a file written by [`matrix_csv`].
pub fn read_matrix_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| RunnerError::format(path, e))?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| RunnerError::format(path, e))?
        .iter()
        .skip(1)
        .map(str::to_string)
        .collect();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| RunnerError::format(path, e))?;
        let row = record
            .iter()
            .skip(1)
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| RunnerError::format(path, e))?;
        values.push(row);
    }
    Ok((names, values))
}

/// Writes a table of already formatted cells.
pub fn table_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    csv_bytes(header.iter().map(|s| s.to_string()).collect(), rows)
}

pub fn fmt(v: f64) -> String {
    num(v)
}
