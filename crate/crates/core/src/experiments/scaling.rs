use rayon::prelude::*;

use super::fit::fit_exponent;
use super::generate::{generate_instance, InstanceKind, InstanceSpec};
use crate::counting::{rect_partitioned, RecursionConfig};
use crate::error::{Result, TangenciaError};
use crate::params::ParamSet;

/// One (kind, size) row averaged over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub kind: InstanceKind,
    pub m: usize,
    pub n: usize,
    pub delta: f64,
    pub rect_count: f64,
    pub incidences: f64,
    pub delta_evals: f64,
    /// Trials that completed; the averages are over these.
    pub trials: usize,
    /// First error met, if any trial failed.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingResult {
    pub rows: Vec<ScalingRow>,
    /// Slope of `ln rect_count` against `ln(mn)`; `None` when fewer than two
    /// distinct sizes have a positive count.
    pub fitted_exponent: Option<f64>,
    pub residual: Option<f64>,
}

/// Instance seed for a (kind, size, trial) triple.
pub fn trial_seed(kind: InstanceKind, m: usize, n: usize, trial: usize) -> u64 {
    let k = match kind {
        InstanceKind::Random => 1u64,
        InstanceKind::TangentPencil => 2,
        InstanceKind::Grid => 3,
    };
    (k << 56) ^ ((m as u64) << 36) ^ ((n as u64) << 16) ^ trial as u64
}

/// Runs the partitioned counter on `trials` seeded instances per kind and
/// size. Failures are recorded in the row rather than aborting the run.
pub fn scaling_run(kinds: &[InstanceKind], sizes: &[(usize, usize)], trials: usize, params: &ParamSet) -> Result<ScalingResult> {
    if sizes.is_empty() || kinds.is_empty() || trials == 0 {
        return Err(TangenciaError::InvalidParams("need at least one kind, size and trial".into()));
    }
    params.validate()?;
    let cfg = RecursionConfig {
        epsilon: params.epsilon,
        ..RecursionConfig::default()
    };
    let mut rows = Vec::new();
    for &kind in kinds {
        for &(m, n) in sizes {
            let outcomes: Vec<Result<(usize, u64, u64)>> = (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let spec = InstanceSpec {
                        kind,
                        m,
                        n,
                        delta: params.delta,
                        t: params.t,
                        seed: trial_seed(kind, m, n, trial),
                    };
                    let pair = generate_instance(&spec, params)?;
                    let rep = rect_partitioned(&pair, &cfg)?;
                    Ok((rep.rect_count, rep.incidence_triples, rep.delta_evals))
                })
                .collect();
            let mut row = ScalingRow {
                kind,
                m,
                n,
                delta: params.delta,
                rect_count: 0.0,
                incidences: 0.0,
                delta_evals: 0.0,
                trials: 0,
                error: None,
            };
            for o in outcomes {
                match o {
                    Ok((r, i, e)) => {
                        row.rect_count += r as f64;
                        row.incidences += i as f64;
                        row.delta_evals += e as f64;
                        row.trials += 1;
                    }
                    Err(e) => {
                        row.error.get_or_insert_with(|| e.to_string());
                    }
                }
            }
            if row.trials > 0 {
                let k = row.trials as f64;
                row.rect_count /= k;
                row.incidences /= k;
                row.delta_evals /= k;
            }
            rows.push(row);
        }
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.trials > 0 && r.rect_count > 0.0)
        .map(|r| ((r.m * r.n) as f64, r.rect_count))
        .collect();
    let fit = fit_exponent(&pts).ok();
    Ok(ScalingResult {
        rows,
        fitted_exponent: fit.map(|f| f.0),
        residual: fit.map(|f| f.1),
    })
}
