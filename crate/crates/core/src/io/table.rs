//! Trajectory CSV files: a header `t,<labels...>` and one row per stored
//! state, floats written with 17 significant digits.

use std::path::Path;

use crate::flows::Trajectory;
use crate::{Error, Result};

/// Columns read back from a trajectory CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes a trajectory to CSV text.
pub fn trajectory_csv(traj: &Trajectory) -> Result<String> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = std::iter::once("t").chain(traj.labels.iter().map(String::as_str));
    let to_err = |e: csv::Error| Error::InvalidArgument(e.to_string());
    w.write_record(header).map_err(to_err)?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let row = std::iter::once(format_float(*t)).chain(s.iter().map(|v| format_float(*v)));
        w.write_record(row).map_err(to_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ASCII output"))
}

pub fn emit_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    let text = trajectory_csv(traj)?;
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn read_trajectory_csv(path: &Path) -> Result<CsvTable> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.get(0) != Some("t") {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            column: 1,
            message: "first column must be t".into(),
        });
    }
    let labels: Vec<String> = header.iter().skip(1).map(String::from).collect();
    let mut times = Vec::new();
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let mut vals = Vec::with_capacity(rec.len());
        for (col, field) in rec.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: line + 2,
                column: col + 1,
                message: format!("not a number: {field:?}"),
            })?;
            vals.push(v);
        }
        times.push(vals[0]);
        rows.push(vals[1..].to_vec());
    }
    Ok(CsvTable {
        labels,
        times,
        rows,
    })
}
