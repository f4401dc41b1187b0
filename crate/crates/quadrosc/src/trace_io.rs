//! CSV ingestion and emission. Imports motion-tracker exports (header row,
//! numeric cells, occasional junk rows), and writes traces, wave samples,
//! edge lists, event logs, trajectories and sweep tables. Floats are
//! written in shortest round-trip form, so export → import is exact.

use crate::calibrate::SweepTable;
use crate::crawler::TrajectoryPoint;
use crate::quadrature::{EventLog, SystemEvent};
use crate::signal::{EdgeDir, Level, SignalTrace, SquareWave};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TraceIoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: String, msg: String },
    #[error("{path}: time column is not strictly increasing at row {row}")]
    NonMonotoneTime { path: String, row: usize },
    #[error("{path}: no usable samples")]
    EmptyTrace { path: String },
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> TraceIoError + '_ {
    move |source| TraceIoError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Column selector: by header name, or by 0-based index for headerless
/// tooling that emits positional columns.
fn resolve_column(headers: &[String], wanted: &str, path: &Path) -> Result<usize, TraceIoError> {
    if let Some(i) = headers.iter().position(|h| h == wanted) {
        return Ok(i);
    }
    if let Ok(i) = wanted.parse::<usize>() {
        if i < headers.len() {
            return Ok(i);
        }
    }
    Err(TraceIoError::Format {
        path: path.display().to_string(),
        msg: format!("column '{wanted}' not found in header {headers:?}"),
    })
}

/// A trace imported from a tracker CSV plus the count of skipped rows.
#[derive(Debug, Clone)]
pub struct ImportedTrace {
    pub trace: SignalTrace,
    pub skipped_rows: usize,
}

/// Reads (time, value) pairs from a CSV with a header row. Rows whose
/// selected cells are missing or non-numeric are skipped and counted; a
/// non-monotone time column is an error.
pub fn import_tracker_csv(
    path: &Path,
    time_col: &str,
    value_col: &str,
) -> Result<ImportedTrace, TraceIoError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| TraceIoError::Format {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| TraceIoError::Format {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();
    let t_idx = resolve_column(&headers, time_col, path)?;
    let v_idx = resolve_column(&headers, value_col, path)?;

    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut skipped = 0usize;
    for (row_no, record) in reader.records().enumerate() {
        let Ok(record) = record else {
            skipped += 1;
            continue;
        };
        let parsed = (
            record.get(t_idx).and_then(|c| c.parse::<f64>().ok()),
            record.get(v_idx).and_then(|c| c.parse::<f64>().ok()),
        );
        match parsed {
            (Some(t), Some(y)) if t.is_finite() && y.is_finite() => {
                if let Some(&(prev, _)) = samples.last() {
                    if t <= prev {
                        return Err(TraceIoError::NonMonotoneTime {
                            path: path.display().to_string(),
                            row: row_no + 2, // 1-based, after the header
                        });
                    }
                }
                samples.push((t, y));
            }
            _ => skipped += 1,
        }
    }
    if samples.len() < 2 {
        return Err(TraceIoError::EmptyTrace {
            path: path.display().to_string(),
        });
    }
    let label = headers
        .get(v_idx)
        .cloned()
        .unwrap_or_else(|| value_col.to_string());
    Ok(ImportedTrace {
        trace: SignalTrace::new(samples, label).expect("monotonicity enforced above"),
        skipped_rows: skipped,
    })
}

/// Writes a trace as `time_s,<label>` rows.
pub fn export_trace_csv(trace: &SignalTrace, path: &Path) -> Result<(), TraceIoError> {
    let mut out = std::fs::File::create(path).map_err(io_err(path))?;
    writeln!(out, "time_s,{}", trace.label).map_err(io_err(path))?;
    for (t, y) in &trace.samples {
        writeln!(out, "{t},{y}").map_err(io_err(path))?;
    }
    Ok(())
}

/// Writes a wave as level samples at `sample_period`, plus a companion
/// `<stem>_edges.csv` edge list.
pub fn export_wave_csv(
    wave: &SquareWave,
    sample_period: f64,
    t_end: f64,
    path: &Path,
) -> Result<(), TraceIoError> {
    let mut out = std::fs::File::create(path).map_err(io_err(path))?;
    writeln!(out, "time_s,{}", wave.label).map_err(io_err(path))?;
    let mut t = 0.0;
    while t <= t_end {
        let level = match wave.level_at(t) {
            Level::High => 1,
            Level::Low => 0,
        };
        writeln!(out, "{t},{level}").map_err(io_err(path))?;
        t += sample_period;
    }

    let edges_path = companion_path(path, "_edges");
    let mut out = std::fs::File::create(&edges_path).map_err(io_err(&edges_path))?;
    writeln!(out, "time_s,direction").map_err(io_err(&edges_path))?;
    for e in &wave.edges {
        let dir = match e.dir {
            EdgeDir::Rising => "rising",
            EdgeDir::Falling => "falling",
        };
        writeln!(out, "{},{}", e.time, dir).map_err(io_err(&edges_path))?;
    }
    Ok(())
}

fn companion_path(path: &Path, suffix: &str) -> std::path::PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = path
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

/// Event log CSV: `time_s,event_kind,oscillator_id,beam_side_after,stage_index`.
pub fn export_event_log_csv(log: &EventLog, path: &Path) -> Result<(), TraceIoError> {
    let mut out = std::fs::File::create(path).map_err(io_err(path))?;
    writeln!(out, "time_s,event_kind,oscillator_id,beam_side_after,stage_index")
        .map_err(io_err(path))?;
    for e in &log.events {
        let (kind, osc, side) = match e.event {
            SystemEvent::CentralSnap { new_side, .. } => {
                ("central_snap", "central", new_side.as_str())
            }
            SystemEvent::PeripheralSnap { id, new_side } => {
                ("peripheral_snap", id.as_str(), new_side.as_str())
            }
        };
        writeln!(out, "{},{},{},{},{}", e.time, kind, osc, side, e.stage_after.0)
            .map_err(io_err(path))?;
    }
    Ok(())
}

/// Trajectory CSV: `time_s,x_front_mm,x_back_mm,pose_bits`.
pub fn export_trajectory_csv(
    trajectory: &[TrajectoryPoint],
    path: &Path,
) -> Result<(), TraceIoError> {
    let mut out = std::fs::File::create(path).map_err(io_err(path))?;
    writeln!(out, "time_s,x_front_mm,x_back_mm,pose_bits").map_err(io_err(path))?;
    for p in trajectory {
        writeln!(
            out,
            "{},{},{},{}{}",
            p.time, p.x_front, p.x_back, p.front_on as u8, p.back_on as u8
        )
        .map_err(io_err(path))?;
    }
    Ok(())
}

/// Sweep table CSV: header names the grid axes then the objective column;
/// failed rows carry the error text in place of a value.
pub fn export_sweep_csv(table: &SweepTable, path: &Path) -> Result<(), TraceIoError> {
    let mut out = std::fs::File::create(path).map_err(io_err(path))?;
    writeln!(out, "{},{}", table.axes.join(","), table.objective).map_err(io_err(path))?;
    for row in &table.rows {
        let coords = row
            .coords
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        match &row.value {
            Ok(v) => writeln!(out, "{coords},{v}").map_err(io_err(path))?,
            Err(e) => writeln!(out, "{coords},error: {e}").map_err(io_err(path))?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Level;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("quadrosc_trace_io_tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn import_three_column_file() {
        let path = tmp("three_col.csv");
        std::fs::write(&path, "t,x,y\n0.0,1.0,5.0\n0.1,2.0,6.0\n0.2,3.0,7.0\n").unwrap();
        let imported = import_tracker_csv(&path, "t", "y").unwrap();
        assert_eq!(imported.skipped_rows, 0);
        assert_eq!(
            imported.trace.samples,
            vec![(0.0, 5.0), (0.1, 6.0), (0.2, 7.0)]
        );
        assert_eq!(imported.trace.label, "y");
    }

    #[test]
    fn import_skips_malformed_rows_with_count() {
        let path = tmp("malformed.csv");
        std::fs::write(&path, "t,y\n0.0,1.0\noops,not_a_number\n0.2,3.0\n").unwrap();
        let imported = import_tracker_csv(&path, "t", "y").unwrap();
        assert_eq!(imported.skipped_rows, 1);
        assert_eq!(imported.trace.samples.len(), 2);
    }

    #[test]
    fn import_rejects_non_monotone_time() {
        let path = tmp("nonmono.csv");
        std::fs::write(&path, "t,y\n0.0,1.0\n0.2,2.0\n0.1,3.0\n").unwrap();
        assert!(matches!(
            import_tracker_csv(&path, "t", "y"),
            Err(TraceIoError::NonMonotoneTime { row: 4, .. })
        ));
    }

    #[test]
    fn import_rejects_empty() {
        let path = tmp("empty.csv");
        std::fs::write(&path, "t,y\n").unwrap();
        assert!(matches!(
            import_tracker_csv(&path, "t", "y"),
            Err(TraceIoError::EmptyTrace { .. })
        ));
    }

    #[test]
    fn import_by_column_index() {
        let path = tmp("by_index.csv");
        std::fs::write(&path, "a,b\n0.0,1.5\n1.0,2.5\n").unwrap();
        let imported = import_tracker_csv(&path, "0", "1").unwrap();
        assert_eq!(imported.trace.samples, vec![(0.0, 1.5), (1.0, 2.5)]);
    }

    #[test]
    fn export_import_roundtrip_exact() {
        let trace = SignalTrace::new(
            vec![
                (0.0, -1.0),
                (0.1234567890123, 0.3333333333333333),
                (1.0 / 3.0, 2.0f64.sqrt()),
                (0.9999999999, -7.25e-13),
            ],
            "disp",
        )
        .unwrap();
        let path = tmp("roundtrip.csv");
        export_trace_csv(&trace, &path).unwrap();
        let back = import_tracker_csv(&path, "time_s", "disp").unwrap();
        assert_eq!(back.trace.samples, trace.samples);
    }

    #[test]
    fn wave_export_writes_edge_list() {
        let wave = SquareWave::from_toggle_times(Level::Low, &[0.5, 1.5, 2.5], "sig").unwrap();
        let path = tmp("wave.csv");
        export_wave_csv(&wave, 0.25, 3.0, &path).unwrap();
        let edges = std::fs::read_to_string(tmp("wave_edges.csv")).unwrap();
        let lines: Vec<&str> = edges.lines().collect();
        assert_eq!(lines.len(), 4); // header + 3 edges
        assert_eq!(lines[1], "0.5,rising");
        assert_eq!(lines[2], "1.5,falling");
    }
}
