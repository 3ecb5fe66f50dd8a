//! Dead reckoning: integrates a piecewise-constant velocity log with exact
//! exponential steps and writes the trajectory as CSV.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;
use serde::Deserialize;

use sek3::{propagate, Frame, GeneralizedVelocity, GroupElement};

use crate::CommandError;

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum FrameTag {
    Left,
    Right,
}

/// One velocity-log line: a timestamp, rates, and the frame they live in.
#[derive(Deserialize)]
struct VelocityRecord {
    t: f64,
    omega: [f64; 3],
    nu: Vec<[f64; 3]>,
    frame: FrameTag,
}

impl VelocityRecord {
    fn velocity(&self) -> GeneralizedVelocity {
        let frame = match self.frame {
            FrameTag::Left => Frame::Left,
            FrameTag::Right => Frame::Right,
        };
        GeneralizedVelocity::new(
            frame,
            Vector3::from_column_slice(&self.omega),
            self.nu.iter().map(|n| Vector3::from_column_slice(n)).collect(),
        )
    }
}

fn parse_log(path: &Path, k: usize) -> Result<Vec<VelocityRecord>, CommandError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CommandError::Io(format!("{}: {e}", path.display())))?;
    let mut records = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: VelocityRecord = serde_json::from_str(line)
            .map_err(|e| CommandError::Parse(format!("line {line_no}: {e}")))?;
        if !record.t.is_finite() {
            return Err(CommandError::Parse(format!(
                "line {line_no}: timestamp is not finite"
            )));
        }
        if let Some(previous) = records.last() {
            let previous: &VelocityRecord = previous;
            if record.t <= previous.t {
                return Err(CommandError::Parse(format!(
                    "line {line_no}: timestamps must be strictly increasing"
                )));
            }
        }
        if record.nu.len() != k {
            return Err(CommandError::Dimension(format!(
                "line {line_no}: record has {} translation rates, expected {k}",
                record.nu.len()
            )));
        }
        records.push(record);
    }
    Ok(records)
}

fn write_row(out: &mut impl Write, t: f64, state: &GroupElement) -> std::io::Result<()> {
    write!(out, "{t:.16e}")?;
    let r = state.rotation().matrix();
    for i in 0..3 {
        for j in 0..3 {
            write!(out, ",{:.16e}", r[(i, j)])?;
        }
    }
    for p in state.translations() {
        write!(out, ",{:.16e},{:.16e},{:.16e}", p.x, p.y, p.z)?;
    }
    writeln!(out)
}

fn write_header(out: &mut impl Write, k: usize) -> std::io::Result<()> {
    write!(out, "t")?;
    for i in 0..3 {
        for j in 0..3 {
            write!(out, ",r{i}{j}")?;
        }
    }
    for slot in 1..=k {
        write!(out, ",p{slot}x,p{slot}y,p{slot}z")?;
    }
    writeln!(out)
}

pub fn run(input: &Path, k: usize, dt: f64, output: Option<&Path>) -> Result<(), CommandError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(CommandError::Parse(format!(
            "--dt must be a positive number of seconds, got {dt}"
        )));
    }
    let records = parse_log(input, k)?;

    let mut rows: Vec<(f64, GroupElement)> = Vec::new();
    let mut state = GroupElement::identity(k);
    if records.is_empty() {
        rows.push((0.0, state.clone()));
    } else {
        let start = records[0].t;
        let end = records.last().expect("nonempty").t;
        rows.push((start, state.clone()));

        let mut cursor = start;
        let mut active = 0usize;
        let mut next_output = start + dt;
        while cursor < end - 1e-12 {
            let target = next_output.min(end);
            // Step across record boundaries inside this output interval; the
            // velocity is the latest record at or before the cursor.
            while cursor < target - 1e-12 {
                while active + 1 < records.len() && records[active + 1].t <= cursor + 1e-12 {
                    active += 1;
                }
                let segment_end = if active + 1 < records.len() {
                    records[active + 1].t.min(target)
                } else {
                    target
                };
                state = propagate(&state, &records[active].velocity(), segment_end - cursor)
                    .map_err(|e| CommandError::Dimension(e.to_string()))?;
                cursor = segment_end;
            }
            rows.push((cursor, state.clone()));
            next_output += dt;
        }
    }

    let mut buffer = Vec::new();
    write_header(&mut buffer, k).expect("in-memory write");
    for (t, state) in &rows {
        write_row(&mut buffer, *t, state).expect("in-memory write");
    }
    match output {
        Some(path) => fs::write(path, buffer)
            .map_err(|e| CommandError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(&buffer)
            .map_err(|e| CommandError::Io(e.to_string()))?,
    }
    Ok(())
}
