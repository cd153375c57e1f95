//! Percentile bootstrap for counted coincidence data.
//!
//! Each resample redraws every configuration's count table from its observed
//! frequencies at the observed depth, reruns the full solve, and collects
//! the recovered parameters. Angles are compared through wrapped deviations
//! from the point estimate so the branch cut cannot smear the interval.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::measure::{
    derive_seed, estimate_probs, sample_counts, ConfigId, CountTable, MeasureError,
};
use crate::reconstruct::{reconstruct, ProtocolInput, ReconstructError, ReconstructionReport};
use crate::state::wrap_angle;

pub const DEFAULT_RESAMPLES: u32 = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BootstrapError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
    /// Fewer than two resamples solved; no spread can be estimated.
    #[error("only {successes} of {resamples} resamples reconstructed")]
    TooFewSuccesses { successes: u32, resamples: u32 },
}

/// Point estimate with standard error and a 95 percent percentile interval.
/// For angles the interval endpoints are wrapped to (-pi, pi], so `lo > hi`
/// means the interval crosses the branch cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamStats {
    pub point: f64,
    pub std_err: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapSummary {
    pub resamples: u32,
    /// Resamples whose solve errored (degenerate redraw, residual breach).
    pub failures: u32,
    pub w_hh: ParamStats,
    pub w_hv_tot: ParamStats,
    pub w_vv: ParamStats,
    pub delta: ParamStats,
    pub phi1: ParamStats,
    pub phi3: ParamStats,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q / 100.0 * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn spread(point: f64, values: &mut [f64], angular: bool) -> ParamStats {
    if angular {
        for v in values.iter_mut() {
            *v = wrap_angle(*v - point);
        }
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite parameter values"));
    let (lo, hi) = (percentile(values, 2.5), percentile(values, 97.5));
    if angular {
        ParamStats {
            point,
            std_err: var.sqrt(),
            lo: wrap_angle(point + lo),
            hi: wrap_angle(point + hi),
        }
    } else {
        ParamStats {
            point,
            std_err: var.sqrt(),
            lo,
            hi,
        }
    }
}

/// Point solve plus `resamples` parametric redraws of `counts` under the
/// derived seed streams of `seed`.
pub fn bootstrap(
    counts: &BTreeMap<ConfigId, CountTable>,
    resamples: u32,
    seed: u64,
) -> Result<(ReconstructionReport, BootstrapSummary), BootstrapError> {
    let mut freqs = BTreeMap::new();
    let mut n_min = u64::MAX;
    for (id, table) in counts {
        freqs.insert(*id, estimate_probs(table)?);
        n_min = n_min.min(table.total());
    }
    if counts.is_empty() {
        return Err(MeasureError::EmptyCounts.into());
    }
    let point = reconstruct(&ProtocolInput::sampled(freqs.clone(), n_min))?;

    let n_configs = ConfigId::ALL.len() as u64;
    let mut failures = 0u32;
    let mut w_cols: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut ang_cols: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for r in 0..resamples {
        let mut redraw = BTreeMap::new();
        for (k, (id, table)) in counts.iter().enumerate() {
            let stream = 1 + u64::from(r) * n_configs + k as u64;
            redraw.insert(
                *id,
                sample_counts(&freqs[id], table.total(), derive_seed(seed, stream)),
            );
        }
        let mut probs = BTreeMap::new();
        for (id, table) in &redraw {
            probs.insert(*id, estimate_probs(table)?);
        }
        match reconstruct(&ProtocolInput::sampled(probs, n_min)) {
            Ok(rep) => {
                let [w1, w2, w3] = rep.state.probabilities();
                let ph = rep.state.phases();
                for (col, v) in w_cols.iter_mut().zip([w1, w2, w3]) {
                    col.push(v);
                }
                for (col, v) in ang_cols.iter_mut().zip([rep.delta, ph.phi1, ph.phi3]) {
                    col.push(v);
                }
            }
            Err(_) => failures += 1,
        }
    }

    let successes = resamples - failures;
    if successes < 2 {
        return Err(BootstrapError::TooFewSuccesses {
            successes,
            resamples,
        });
    }

    let [wp1, wp2, wp3] = point.state.probabilities();
    let point_ph = point.state.phases();
    let summary = BootstrapSummary {
        resamples,
        failures,
        w_hh: spread(wp1, &mut w_cols[0], false),
        w_hv_tot: spread(wp2, &mut w_cols[1], false),
        w_vv: spread(wp3, &mut w_cols[2], false),
        delta: spread(point.delta, &mut ang_cols[0], true),
        phi1: spread(point_ph.phi1, &mut ang_cols[1], true),
        phi3: spread(point_ph.phi3, &mut ang_cols[2], true),
    };
    Ok((point, summary))
}
