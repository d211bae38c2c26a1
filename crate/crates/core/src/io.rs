//! File formats: path CSV (`t,value`), multi-replicate CSV
//! (`replicate,t,value`), and the float formatting rule shared by every
//! emitted table. All JSON forms are plain serde on the domain types.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::process::{PathError, PathMeta, SampledPath};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected {expected}")]
    Malformed { line: usize, expected: &'static str },
    #[error("line {line}: grid is not uniform (t = {t}, expected {expected})")]
    NonUniformGrid { line: usize, t: f64, expected: f64 },
    #[error("file contains no data rows")]
    NoRows,
    #[error(transparent)]
    Path(#[from] PathError),
}

/// 17 significant digits: enough to round-trip any f64, locale independent.
pub fn format_float(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Write one path as `t,value` rows.
pub fn write_path_csv<W: Write>(mut w: W, path: &SampledPath) -> Result<(), CsvError> {
    writeln!(w, "t,value")?;
    for (j, v) in path.values().iter().enumerate() {
        writeln!(w, "{},{}", format_float(path.time(j)), format_float(*v))?;
    }
    Ok(())
}

/// Write replicates as `replicate,t,value` rows, replicate ids in order.
pub fn write_replicates_csv<W: Write>(mut w: W, paths: &[SampledPath]) -> Result<(), CsvError> {
    writeln!(w, "replicate,t,value")?;
    for (r, path) in paths.iter().enumerate() {
        for (j, v) in path.values().iter().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                r,
                format_float(path.time(j)),
                format_float(*v)
            )?;
        }
    }
    Ok(())
}

/// Read a `t,value` CSV, validating uniform spacing to 1e-9 relative.
pub fn read_path_csv<R: BufRead>(r: R) -> Result<SampledPath, CsvError> {
    let rows = read_rows(r, &["t", "value"])?;
    let pairs: Vec<(f64, f64)> = rows.into_iter().map(|row| (row.0[0], row.0[1])).collect();
    path_from_pairs(&pairs, PathMeta::default(), 0)
}

/// Read a `replicate,t,value` CSV into one path per replicate id, in order
/// of first appearance.
pub fn read_replicates_csv<R: BufRead>(r: R) -> Result<Vec<SampledPath>, CsvError> {
    let rows = read_rows(r, &["replicate", "t", "value"])?;
    let mut groups: Vec<(u64, Vec<(f64, f64)>)> = Vec::new();
    for (fields, line) in rows {
        let rep = fields[0] as u64;
        let pair = (fields[1], fields[2]);
        match groups.last_mut() {
            Some((id, pairs)) if *id == rep => pairs.push(pair),
            _ => {
                if groups.iter().any(|(id, _)| *id == rep) {
                    return Err(CsvError::Malformed {
                        line,
                        expected: "contiguous replicate blocks",
                    });
                }
                groups.push((rep, vec![pair]));
            }
        }
    }
    groups
        .into_iter()
        .map(|(_, pairs)| path_from_pairs(&pairs, PathMeta::default(), 0))
        .collect()
}

fn path_from_pairs(
    pairs: &[(f64, f64)],
    meta: PathMeta,
    line_offset: usize,
) -> Result<SampledPath, CsvError> {
    if pairs.is_empty() {
        return Err(CsvError::NoRows);
    }
    let t0 = pairs[0].0;
    let dt = if pairs.len() >= 2 {
        (pairs[pairs.len() - 1].0 - t0) / (pairs.len() - 1) as f64
    } else {
        1.0
    };
    for (k, &(t, _)) in pairs.iter().enumerate() {
        let expected = t0 + k as f64 * dt;
        let tol = 1e-9 * dt.abs().max(t.abs()).max(1e-300);
        if (t - expected).abs() > tol {
            return Err(CsvError::NonUniformGrid {
                line: line_offset + k + 2,
                t,
                expected,
            });
        }
    }
    let values: Vec<f64> = pairs.iter().map(|&(_, v)| v).collect();
    Ok(SampledPath::new(t0, dt, values, meta)?)
}

type Row = (Vec<f64>, usize);

fn read_rows<R: BufRead>(r: R, header: &[&str]) -> Result<Vec<Row>, CsvError> {
    let mut rows = Vec::new();
    let mut lines = r.lines().enumerate();
    let (_, first) = lines.next().ok_or(CsvError::NoRows)?;
    let first = first?;
    let expected_header = header.join(",");
    if first.trim() != expected_header {
        return Err(CsvError::Malformed {
            line: 1,
            expected: match header.len() {
                2 => "header 't,value'",
                _ => "header 'replicate,t,value'",
            },
        });
    }
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Result<Vec<f64>, _> =
            line.trim().split(',').map(|f| f.parse::<f64>()).collect();
        match fields {
            Ok(f) if f.len() == header.len() => rows.push((f, idx + 1)),
            _ => {
                return Err(CsvError::Malformed {
                    line: idx + 1,
                    expected: "comma-separated numeric fields",
                })
            }
        }
    }
    if rows.is_empty() {
        return Err(CsvError::NoRows);
    }
    Ok(rows)
}
