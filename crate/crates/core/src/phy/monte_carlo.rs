//! Monte-Carlo rate sweeps over SNR grids and packet counts.
//!
//! All packet counts and SNR points of a sweep share the same channel
//! draws: trial i uses the RNG stream derived from (seed, i) and nothing
//! else, so curves are paired sample by sample and their differences carry
//! far less Monte-Carlo noise than independent runs would.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::{sample_channel, RngSpec};
use super::rate::{rate_from_gain_table, transmission_gain_table};
use super::PhyError;
use crate::delivery::full_delivery_schedule;
use crate::params::NetworkParams;
use crate::placement::PlacementMatrix;

/// Sweep dimensions: SNR grid, trial count, and the RNG specification all
/// trials descend from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub rng: RngSpec,
}

/// One point of a rate curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub snr_db: f64,
    pub mean_rate: f64,
    pub std_err: f64,
    pub trials: usize,
}

/// Mean symmetric rate over the SNR grid for one packet count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub packets: usize,
    pub points: Vec<RatePoint>,
}

/// Raw per-trial rates, indexed `[placement][snr][trial]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMatrix {
    pub packet_counts: Vec<usize>,
    pub snr_grid_db: Vec<f64>,
    pub rates: Vec<Vec<Vec<f64>>>,
}

/// One row of the rate-advantage table: percentage gain of `packets` over
/// the baseline packet count at one SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvantageRow {
    pub packets: usize,
    pub snr_db: f64,
    pub advantage_pct: f64,
}

fn check_sweep(placements: &[PlacementMatrix], sweep: &SweepSpec) -> Result<(), PhyError> {
    if placements.is_empty() || sweep.snr_grid_db.is_empty() || sweep.trials == 0 {
        return Err(PhyError::EmptySweep);
    }
    Ok(())
}

/// Runs the paired sweep and keeps every per-trial rate.
///
/// Trials run in parallel; the output is ordered by trial index and does
/// not depend on the thread schedule.
pub fn monte_carlo_trials(
    params: &NetworkParams,
    placements: &[PlacementMatrix],
    demands: &[usize],
    sweep: &SweepSpec,
) -> Result<TrialMatrix, PhyError> {
    check_sweep(placements, sweep)?;
    let schedules = placements
        .iter()
        .map(|v| full_delivery_schedule(v, params, demands))
        .collect::<Result<Vec<_>, _>>()?;
    let snr_linear: Vec<f64> = sweep
        .snr_grid_db
        .iter()
        .map(|db| 10f64.powf(db / 10.0))
        .collect();

    // rate for (placement, snr) on one channel draw: [placement][snr]
    let per_trial: Vec<Vec<Vec<f64>>> = (0..sweep.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = sweep.rng.trial_rng(trial as u64);
            let h = sample_channel(params, &mut rng);
            placements
                .iter()
                .zip(&schedules)
                .map(|(v, schedule)| {
                    let tables = schedule
                        .transmissions
                        .iter()
                        .filter(|tx| !tx.codewords.is_empty())
                        .map(|tx| {
                            transmission_gain_table(tx, &h)
                                .map(|table| (tx.codewords.len() as f64, table))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    if tables.is_empty() {
                        return Err(PhyError::EmptySchedule);
                    }
                    let subpackets = (v.packets() * params.subs_per_packet()) as f64;
                    Ok(snr_linear
                        .iter()
                        .map(|&snr| {
                            let inverse_sum: f64 = tables
                                .iter()
                                .map(|(phi, table)| 1.0 / rate_from_gain_table(table, snr / phi))
                                .sum();
                            subpackets / inverse_sum
                        })
                        .collect::<Vec<f64>>())
                })
                .collect::<Result<Vec<_>, PhyError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut rates =
        vec![vec![vec![0.0; sweep.trials]; sweep.snr_grid_db.len()]; placements.len()];
    for (trial, by_placement) in per_trial.iter().enumerate() {
        for (p, by_snr) in by_placement.iter().enumerate() {
            for (s, &r) in by_snr.iter().enumerate() {
                rates[p][s][trial] = r;
            }
        }
    }
    Ok(TrialMatrix {
        packet_counts: placements.iter().map(PlacementMatrix::packets).collect(),
        snr_grid_db: sweep.snr_grid_db.clone(),
        rates,
    })
}

/// Runs the sweep and reduces each (packet count, SNR) cell to mean and
/// standard error.
pub fn monte_carlo_rate(
    params: &NetworkParams,
    placements: &[PlacementMatrix],
    demands: &[usize],
    sweep: &SweepSpec,
) -> Result<Vec<RateCurve>, PhyError> {
    let trials = monte_carlo_trials(params, placements, demands, sweep)?;
    Ok(trials
        .rates
        .iter()
        .zip(&trials.packet_counts)
        .map(|(by_snr, &packets)| RateCurve {
            packets,
            points: by_snr
                .iter()
                .zip(&trials.snr_grid_db)
                .map(|(samples, &snr_db)| summarize(samples, snr_db))
                .collect(),
        })
        .collect())
}

fn summarize(samples: &[f64], snr_db: f64) -> RatePoint {
    let n = samples.len();
    let mean = kahan_sum(samples.iter().copied()) / n as f64;
    let std_err = if n < 2 {
        0.0
    } else {
        let var = kahan_sum(samples.iter().map(|x| (x - mean) * (x - mean))) / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    RatePoint {
        snr_db,
        mean_rate: mean,
        std_err,
        trials: n,
    }
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Percentage rate gain of every curve over the `baseline` packet count,
/// per SNR point. The baseline rows come out as exact zeros.
pub fn rate_advantage(
    curves: &[RateCurve],
    baseline: usize,
) -> Result<Vec<AdvantageRow>, PhyError> {
    let base = curves
        .iter()
        .find(|c| c.packets == baseline)
        .ok_or_else(|| {
            PhyError::SweepMismatch(format!("baseline P={baseline} is not among the curves"))
        })?;
    let mut rows = Vec::new();
    for curve in curves {
        if curve.points.len() != base.points.len()
            || curve
                .points
                .iter()
                .zip(&base.points)
                .any(|(a, b)| a.snr_db != b.snr_db)
        {
            return Err(PhyError::SweepMismatch(format!(
                "P={} was swept over a different SNR grid than the baseline",
                curve.packets
            )));
        }
        for (point, base_point) in curve.points.iter().zip(&base.points) {
            rows.push(AdvantageRow {
                packets: curve.packets,
                snr_db: point.snr_db,
                advantage_pct: 100.0 * (point.mean_rate - base_point.mean_rate)
                    / base_point.mean_rate,
            });
        }
    }
    Ok(rows)
}
