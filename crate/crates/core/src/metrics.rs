//! IGD, MIGD and mean standard score.

use rayon::prelude::*;

use crate::error::{invalid, EtmoError, Result};
use crate::shapefn::ReferenceFront;

/// Number of environment changes in one standard dynamic run.
pub const STANDARD_CHANGES: usize = 30;

/// Below this a task's spread is treated as zero in the standard score.
pub const SIGMA_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Distance {
    #[default]
    Manhattan,
    Euclidean,
}

impl std::str::FromStr for Distance {
    type Err = EtmoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "manhattan" => Ok(Distance::Manhattan),
            "euclidean" => Ok(Distance::Euclidean),
            _ => Err(EtmoError::Parse(format!("unknown distance {s:?}"))),
        }
    }
}

fn normalise(p: &[f64], front: &ReferenceFront) -> Vec<f64> {
    p.iter()
        .enumerate()
        .map(|(k, v)| (v - front.ideal()[k]) / front.span(k))
        .collect()
}

/// IGD of `s` against `front` with Manhattan distance in the space
/// normalised by the front's ideal and nadir points.
pub fn igd(s: &[Vec<f64>], front: &ReferenceFront) -> Result<f64> {
    igd_with(s, front, Distance::Manhattan)
}

pub fn igd_with(s: &[Vec<f64>], front: &ReferenceFront, distance: Distance) -> Result<f64> {
    if s.is_empty() {
        return Err(invalid("IGD of an empty set"));
    }
    if front.is_empty() {
        return Err(invalid("IGD against an empty reference front"));
    }
    let m = front.m();
    if let Some(bad) = s.iter().find(|p| p.len() != m) {
        return Err(EtmoError::DimensionMismatch {
            expected: m,
            got: bad.len(),
        });
    }
    let sn: Vec<Vec<f64>> = s.iter().map(|p| normalise(p, front)).collect();
    let mins: Vec<f64> = front
        .points()
        .par_iter()
        .map(|r| {
            let r = normalise(r, front);
            sn.iter()
                .map(|q| match distance {
                    Distance::Manhattan => r.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>(),
                    Distance::Euclidean => r.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(),
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(mins.iter().sum::<f64>() / mins.len() as f64)
}

/// Mean of the per-change IGD values; the list must hold exactly `changes` entries.
pub fn migd(per_change: &[f64], changes: usize) -> Result<f64> {
    if per_change.is_empty() {
        return Err(invalid("MIGD of an empty series"));
    }
    if per_change.len() != changes {
        return Err(EtmoError::DimensionMismatch {
            expected: changes,
            got: per_change.len(),
        });
    }
    Ok(per_change.iter().sum::<f64>() / changes as f64)
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Mean standard score. `per_task[i][c]` is the IGD or MIGD of cell `c`
/// (one optimizer-run pair) on task `i`; every task must list the same cells.
/// Returns one score per cell.
pub fn mss(per_task: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(first) = per_task.first() else {
        return Err(invalid("MSS needs at least one task"));
    };
    let cells = first.len();
    if cells < 2 {
        return Err(invalid("MSS needs at least two optimizer-run cells"));
    }
    if let Some(bad) = per_task.iter().find(|v| v.len() != cells) {
        return Err(EtmoError::DimensionMismatch {
            expected: cells,
            got: bad.len(),
        });
    }
    let mut out = vec![0.0; cells];
    for values in per_task {
        let (mu, sigma) = mean_std(values);
        if sigma < SIGMA_GUARD {
            continue;
        }
        for (o, v) in out.iter_mut().zip(values) {
            *o += (v - mu) / sigma;
        }
    }
    let k = per_task.len() as f64;
    out.iter_mut().for_each(|o| *o /= k);
    Ok(out)
}
