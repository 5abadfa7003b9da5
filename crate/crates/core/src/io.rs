//! Text formats: placement matrices, schedule exports, CSV tables.
//!
//! Every renderer is deterministic down to the byte; identical inputs give
//! identical files. All output is LF-terminated UTF-8.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delivery::DeliverySchedule;
use crate::metrics::{EfficiencyProfile, EfficiencyReport};
use crate::phy::{AdvantageRow, RateCurve};
use crate::placement::{PlacementMatrix, ValidationReport};

#[derive(Debug, Error)]
pub enum PlacementTextError {
    #[error("placement file is empty")]
    Empty,
    #[error("header must be three integers `P K t`, got '{0}'")]
    Header(String),
    #[error("line {line}: expected {expected} characters from 0/1, got '{text}'")]
    Row {
        line: usize,
        expected: usize,
        text: String,
    },
    #[error("header announces {expected} rows, file has {got}")]
    RowCount { expected: usize, got: usize },
    #[error("placement fails validation\n{0}")]
    Invalid(ValidationReport),
}

/// Renders a placement matrix: `P K t` header, then one row of 0/1
/// characters per packet.
pub fn render_placement(v: &PlacementMatrix) -> String {
    let mut out = format!("{} {} {}\n", v.packets(), v.users(), v.replication());
    for row in v.rows() {
        out.extend(row.iter().map(|&b| if b { '1' } else { '0' }));
        out.push('\n');
    }
    out
}

/// Parses the placement text format. With `validate` set, matrices failing
/// the placement rules are rejected; without it the bits are taken as-is.
pub fn parse_placement(text: &str, validate: bool) -> Result<PlacementMatrix, PlacementTextError> {
    let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
    let header = lines.next().ok_or(PlacementTextError::Empty)?;
    let fields: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| PlacementTextError::Header(header.to_string()))?;
    let [packets, users, replication] = fields[..] else {
        return Err(PlacementTextError::Header(header.to_string()));
    };

    let mut rows: Vec<Vec<bool>> = Vec::with_capacity(packets);
    for (i, line) in lines.enumerate() {
        if line.is_empty() && i >= packets {
            continue;
        }
        let row: Option<Vec<bool>> = line
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        match row {
            Some(row) if row.len() == users => rows.push(row),
            _ => {
                return Err(PlacementTextError::Row {
                    line: i + 2,
                    expected: users,
                    text: line.to_string(),
                })
            }
        }
    }
    if rows.len() != packets {
        return Err(PlacementTextError::RowCount {
            expected: packets,
            got: rows.len(),
        });
    }
    if validate {
        PlacementMatrix::new(rows, replication).map_err(PlacementTextError::Invalid)
    } else {
        Ok(PlacementMatrix::new_unchecked(rows, replication))
    }
}

/// Schedule export document. All indices are one-based on disk; `q` is the
/// subpacket sub-index within its packet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub users: usize,
    pub packets: usize,
    pub subs_per_packet: usize,
    pub demands: Vec<usize>,
    pub transmissions: Vec<TransmissionDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransmissionDoc {
    pub subset: Vec<usize>,
    pub codewords: Vec<CodewordDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodewordDoc {
    pub target: Vec<usize>,
    pub parts: Vec<PartDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartDoc {
    pub user: usize,
    pub file: usize,
    pub p: usize,
    pub q: usize,
}

pub fn schedule_doc(schedule: &DeliverySchedule, packets: usize) -> ScheduleDoc {
    ScheduleDoc {
        users: schedule.demands.len(),
        packets,
        subs_per_packet: schedule.subs_per_packet,
        demands: schedule.demands.iter().map(|&d| d + 1).collect(),
        transmissions: schedule
            .transmissions
            .iter()
            .map(|tx| TransmissionDoc {
                subset: tx.subset.iter().map(|&k| k + 1).collect(),
                codewords: tx
                    .codewords
                    .iter()
                    .map(|cw| CodewordDoc {
                        target: cw.target.iter().map(|&k| k + 1).collect(),
                        parts: cw
                            .parts
                            .iter()
                            .map(|part| PartDoc {
                                user: part.user + 1,
                                file: part.subpacket.file + 1,
                                p: part.subpacket.packet + 1,
                                q: part.subpacket.sub + 1,
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Renders the schedule export as pretty-printed JSON with a trailing
/// newline.
pub fn render_schedule(schedule: &DeliverySchedule, packets: usize) -> String {
    let doc = schedule_doc(schedule, packets);
    let mut out = serde_json::to_string_pretty(&doc).expect("schedule doc serializes");
    out.push('\n');
    out
}

pub fn parse_schedule(text: &str) -> Result<ScheduleDoc, serde_json::Error> {
    serde_json::from_str(text)
}

/// One line of the efficiency CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyRow {
    pub network: String,
    pub packets: usize,
    /// One-based user index.
    pub user: usize,
    pub gamma: f64,
    pub theta: usize,
    pub phi: usize,
}

/// Rows for a single-transmission efficiency report.
pub fn efficiency_rows(
    network: &str,
    packets: usize,
    report: &EfficiencyReport,
) -> Vec<EfficiencyRow> {
    report
        .gamma
        .iter()
        .zip(&report.theta)
        .enumerate()
        .map(|(k, (&gamma, &theta))| EfficiencyRow {
            network: network.to_string(),
            packets,
            user: k + 1,
            gamma,
            theta,
            phi: report.phi,
        })
        .collect()
}

/// Rows for a multi-transmission profile: per-user means, with theta and
/// phi summed over the slots serving each user. The network label gets a
/// `-mean` suffix to mark the aggregated definition.
pub fn profile_rows(
    network: &str,
    packets: usize,
    profile: &EfficiencyProfile,
) -> Vec<EfficiencyRow> {
    let users = profile.mean_gamma.len();
    let mut theta = vec![0usize; users];
    let mut phi = vec![0usize; users];
    for slot in &profile.slots {
        for (pos, &k) in slot.subset.iter().enumerate() {
            theta[k] += slot.theta[pos];
            phi[k] += slot.phi;
        }
    }
    (0..users)
        .map(|k| EfficiencyRow {
            network: format!("{network}-mean"),
            packets,
            user: k + 1,
            gamma: profile.mean_gamma[k],
            theta: theta[k],
            phi: phi[k],
        })
        .collect()
}

pub fn render_efficiency_csv(rows: &[EfficiencyRow]) -> String {
    let mut out = String::from("network,P,user,gamma,theta,phi\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{},{}\n",
            row.network, row.packets, row.user, row.gamma, row.theta, row.phi
        ));
    }
    out
}

pub fn render_rate_csv(curves: &[RateCurve], seed: u64) -> String {
    let mut out = String::from("P,snr_db,mean_rate,std_err,trials,seed\n");
    for curve in curves {
        for point in &curve.points {
            out.push_str(&format!(
                "{},{},{:.9},{:.9},{},{}\n",
                curve.packets, point.snr_db, point.mean_rate, point.std_err, point.trials, seed
            ));
        }
    }
    out
}

pub fn render_advantage_csv(rows: &[AdvantageRow]) -> String {
    let mut out = String::from("P,snr_db,advantage_pct\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{:.4}\n",
            row.packets, row.snr_db, row.advantage_pct
        ));
    }
    out
}
