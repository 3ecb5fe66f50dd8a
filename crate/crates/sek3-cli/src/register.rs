//! Point registration: reads model points and their observed locations,
//! recovers the transformation by Gauss-Newton, and prints it as JSON.

use std::fs;
use std::path::Path;

use nalgebra::Vector3;
use serde::Deserialize;

use sek3::{gauss_newton_fit, Error, GroupElement, GroupElementRecord, Observation};

use crate::CommandError;

/// One model point assigned to a translation slot (1-based in the file).
#[derive(Deserialize)]
struct PointRecord {
    slot: usize,
    p: [f64; 3],
}

/// One observation of a model point after the unknown transformation.
#[derive(Deserialize)]
struct ObservationRecord {
    point: usize,
    y: [f64; 3],
    #[serde(default = "default_weight")]
    weight: f64,
}

fn default_weight() -> f64 {
    1.0
}

fn parse_lines<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CommandError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CommandError::Io(format!("{}: {e}", path.display())))?;
    let mut records = Vec::new();
    for (index, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(line).map_err(|e| {
            CommandError::Parse(format!("{}: line {}: {e}", path.display(), index + 1))
        })?;
        records.push(record);
    }
    Ok(records)
}

pub fn run(
    points_path: &Path,
    observations_path: &Path,
    k: usize,
    max_iters: usize,
    tol: f64,
) -> Result<(), CommandError> {
    let points: Vec<PointRecord> = parse_lines(points_path)?;
    let observation_records: Vec<ObservationRecord> = parse_lines(observations_path)?;

    for (index, point) in points.iter().enumerate() {
        if point.slot == 0 || point.slot > k {
            return Err(CommandError::Dimension(format!(
                "{}: line {}: slot {} is outside 1..={k}",
                points_path.display(),
                index + 1,
                point.slot
            )));
        }
    }

    let mut observations = Vec::with_capacity(observation_records.len());
    for (index, record) in observation_records.iter().enumerate() {
        let point = points.get(record.point).ok_or_else(|| {
            CommandError::Parse(format!(
                "{}: line {}: point index {} is outside the points file",
                observations_path.display(),
                index + 1,
                record.point
            ))
        })?;
        observations.push(Observation {
            slot: point.slot - 1,
            point: Vector3::from_column_slice(&point.p),
            target: Vector3::from_column_slice(&record.y),
            weight: record.weight,
        });
    }

    let report = gauss_newton_fit(
        &observations,
        k,
        &GroupElement::identity(k),
        max_iters,
        tol,
    )
    .map_err(|e| match e {
        Error::RankDeficient { .. } => CommandError::RankDeficient(format!(
            "{e}; observations do not determine every block (add more points per slot)"
        )),
        Error::DimensionMismatch { .. } => CommandError::Dimension(e.to_string()),
        other => CommandError::Parse(other.to_string()),
    })?;

    let record = GroupElementRecord::from(report.estimate);
    let mut json = serde_json::to_value(&record).expect("record serializes");
    json["cost"] = report.final_cost.into();
    json["iterations"] = report.iterations.into();
    println!("{json}");
    Ok(())
}
