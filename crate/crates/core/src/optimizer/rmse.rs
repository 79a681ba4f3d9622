use alloc::vec::Vec;

use super::TrainTrace;
use crate::math::sqrt;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RmseRow {
    pub iteration: usize,
    pub rmse_theta: f64,
    pub rmse_objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RmseReport {
    pub rows: Vec<RmseRow>,
    /// RMSE of `θ^(M)` across runs.
    pub final_rmse_theta: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Per-iteration RMSE of `θ^(j,r)` (Euclidean) and `Ĵ^(j,r)` across runs.
pub fn rmse_report(traces: &[TrainTrace], theta_star: &[f64], j_star: f64) -> Result<RmseReport> {
    let first = traces.first().ok_or(Error::InvalidParameter("at least one trace is required"))?;
    let m = first.records.len();
    for t in traces {
        if t.records.len() != m {
            return Err(Error::LengthMismatch(m, t.records.len()));
        }
        if t.final_theta.len() != theta_star.len() {
            return Err(Error::DimensionMismatch { expected: theta_star.len(), actual: t.final_theta.len() });
        }
    }
    let r = traces.len() as f64;
    let rows = (0..m)
        .map(|j| {
            let (mut st, mut sj) = (0.0, 0.0);
            for t in traces {
                let rec = &t.records[j];
                st += sq_dist(&rec.theta, theta_star);
                sj += (rec.objective - j_star) * (rec.objective - j_star);
            }
            RmseRow { iteration: j, rmse_theta: sqrt(st / r), rmse_objective: sqrt(sj / r) }
        })
        .collect();
    let final_rmse_theta = sqrt(traces.iter().map(|t| sq_dist(&t.final_theta, theta_star)).sum::<f64>() / r);
    Ok(RmseReport { rows, final_rmse_theta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evt::Estimator;
    use crate::optimizer::IterationRecord;
    use alloc::vec;

    fn trace(thetas: &[f64], objective: f64) -> TrainTrace {
        TrainTrace {
            records: thetas
                .iter()
                .enumerate()
                .map(|(j, &t)| IterationRecord {
                    iteration: j,
                    theta: vec![t],
                    objective,
                    method: Estimator::Sa,
                    threshold: None,
                    threshold_level: None,
                    fallback: false,
                    gradient: vec![0.0],
                    batch_seed: 0,
                })
                .collect(),
            final_theta: vec![*thetas.last().unwrap()],
        }
    }

    #[test]
    fn at_optimum_is_zero() {
        let r = rmse_report(&[trace(&[0.4, 0.4], 10.0), trace(&[0.4, 0.4], 10.0)], &[0.4], 10.0).unwrap();
        assert!(r.rows.iter().all(|row| row.rmse_theta == 0.0 && row.rmse_objective == 0.0));
    }

    #[test]
    fn symmetric_offsets() {
        let r = rmse_report(&[trace(&[0.5], 12.0), trace(&[0.3], 8.0)], &[0.4], 10.0).unwrap();
        assert!((r.rows[0].rmse_theta - 0.1).abs() < 1e-12);
        assert!((r.rows[0].rmse_objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_run_absolute_error() {
        let r = rmse_report(&[trace(&[1.0, 0.9], 7.0)], &[0.4], 10.0).unwrap();
        assert!((r.rows[1].rmse_theta - 0.5).abs() < 1e-12);
        assert_eq!(r.rows[0].rmse_objective, 3.0);
        assert!((r.final_rmse_theta - 0.5).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(rmse_report(&[trace(&[1.0], 0.0), trace(&[1.0, 2.0], 0.0)], &[0.0], 0.0).is_err());
        assert!(rmse_report(&[], &[0.0], 0.0).is_err());
    }
}
