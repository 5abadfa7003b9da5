//! MAC-constrained symmetric rates for single transmissions and whole
//! delivery schedules.

use super::beamformer::BeamformerSet;
use super::channel::ChannelRealization;
use super::linalg::dot;
use super::PhyError;
use crate::delivery::{full_delivery_schedule, TransmissionSpec};
use crate::params::NetworkParams;
use crate::placement::PlacementMatrix;

/// Per-codeword gains |h_k^H u|^2 at unit transmit power, one sorted list
/// per user that must decode at least one codeword of the transmission.
///
/// Sorting ascending once is enough for any later power scaling: uniform
/// power multiplies every gain by the same factor.
pub(crate) fn transmission_gain_table(
    tx: &TransmissionSpec,
    h: &ChannelRealization,
) -> Result<Vec<Vec<f64>>, PhyError> {
    let beams = BeamformerSet::for_transmission(tx, h, tx.codewords.len() as f64)?;
    debug_assert!(tx.codewords.is_empty() || (beams.power() - 1.0).abs() < 1e-12);
    let mut table = Vec::new();
    for &k in &tx.subset {
        let gains: Vec<f64> = tx
            .codewords
            .iter()
            .enumerate()
            .filter(|(_, cw)| cw.part_for(k).is_some())
            .map(|(i, _)| dot(h.user_channel(k), beams.vector(i)).norm_sqr())
            .collect();
        if !gains.is_empty() {
            table.push(sorted(gains));
        }
    }
    Ok(table)
}

fn sorted(mut gains: Vec<f64>) -> Vec<f64> {
    gains.sort_by(|a, b| a.total_cmp(b));
    gains
}

/// Largest symmetric per-codeword rate allowed by one user's MAC region,
/// given that user's ascending unit-power gains and the power per codeword.
///
/// The binding constraint for j jointly decoded codewords uses the j
/// weakest ones, so scanning prefixes of the sorted list covers every
/// subset constraint.
pub(crate) fn mac_rate_from_sorted_gains(sorted_gains: &[f64], power: f64) -> f64 {
    let mut sum = 0.0;
    let mut best = f64::INFINITY;
    for (j, g) in sorted_gains.iter().enumerate() {
        sum += g * power;
        best = best.min(sum.ln_1p() / (j + 1) as f64);
    }
    best
}

pub(crate) fn rate_from_gain_table(table: &[Vec<f64>], power: f64) -> f64 {
    table
        .iter()
        .map(|gains| mac_rate_from_sorted_gains(gains, power))
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric per-codeword rate of one transmission at total power
/// `snr_linear` split uniformly across its codewords (noise power 1).
///
/// Every user decodes its useful codewords jointly; nulled codewords never
/// reach it and cache-removed ones are subtracted before decoding, so only
/// the useful gains enter the MAC region. Users with nothing to decode in
/// this slot are excluded; a transmission nobody decodes reports rate 0.
pub fn mac_symmetric_rate(
    tx: &TransmissionSpec,
    h: &ChannelRealization,
    snr_linear: f64,
) -> Result<f64, PhyError> {
    if tx.codewords.is_empty() {
        return Ok(0.0);
    }
    let table = transmission_gain_table(tx, h)?;
    if table.is_empty() {
        return Ok(0.0);
    }
    Ok(rate_from_gain_table(
        &table,
        snr_linear / tx.codewords.len() as f64,
    ))
}

/// End-to-end symmetric rate of the full schedule for `v` under channel
/// `h`: file size over total delivery time, in nats per channel use.
///
/// Each nonempty transmission ships one subpacket (1/(P*Q) of a file) per
/// codeword at its MAC rate, so R = P*Q / sum_S 1/r_S; the file size
/// cancels.
pub fn symmetric_rate(
    v: &PlacementMatrix,
    params: &NetworkParams,
    demands: &[usize],
    h: &ChannelRealization,
    snr_linear: f64,
) -> Result<f64, PhyError> {
    if h.antennas() != params.effective_antennas() {
        return Err(PhyError::AntennaMismatch {
            got: h.antennas(),
            expected: params.effective_antennas(),
        });
    }
    if h.users() != params.users {
        return Err(PhyError::UserMismatch {
            got: h.users(),
            expected: params.users,
        });
    }
    let schedule = full_delivery_schedule(v, params, demands)?;
    let mut inverse_sum = 0.0;
    let mut nonempty = 0usize;
    for tx in &schedule.transmissions {
        if tx.codewords.is_empty() {
            continue;
        }
        nonempty += 1;
        inverse_sum += 1.0 / mac_symmetric_rate(tx, h, snr_linear)?;
    }
    if nonempty == 0 {
        return Err(PhyError::EmptySchedule);
    }
    let subpackets = (v.packets() * params.subs_per_packet()) as f64;
    Ok(subpackets / inverse_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delivery::{Codeword, CodewordPart, SubpacketId};
    use crate::phy::channel::{sample_channel, RngSpec};
    use crate::phy::linalg::C64;
    use crate::placement::{canonical_full, placement_for_packet_count};

    fn single_user_tx(codewords: usize) -> TransmissionSpec {
        let cw = |i: usize| Codeword {
            target: vec![0],
            packet_set: vec![i],
            parts: vec![CodewordPart {
                user: 0,
                subpacket: SubpacketId {
                    file: 0,
                    packet: i,
                    sub: 0,
                },
            }],
        };
        TransmissionSpec {
            subset: vec![0],
            codewords: (0..codewords).map(cw).collect(),
        }
    }

    #[test]
    fn one_codeword_rate_is_ln_one_plus_gain() {
        let h = ChannelRealization::from_columns(vec![vec![C64::new(0.6, -0.8)]]);
        let tx = single_user_tx(1);
        let r = mac_symmetric_rate(&tx, &h, 4.0).unwrap();
        assert!((r - 5.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn equal_gain_pair_hits_the_sum_constraint() {
        // Two codewords, |h| = 1, total power 3: each gain is 1.5 and the
        // two-term constraint binds at (1/2) ln(1 + 3) = ln 2.
        let h = ChannelRealization::from_columns(vec![vec![C64::new(1.0, 0.0)]]);
        let tx = single_user_tx(2);
        let r = mac_symmetric_rate(&tx, &h, 3.0).unwrap();
        assert!((r - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(r < 2.5f64.ln());
    }

    #[test]
    fn empty_transmission_rates_zero() {
        let h = ChannelRealization::from_columns(vec![vec![C64::new(1.0, 0.0)]]);
        let tx = TransmissionSpec {
            subset: vec![0],
            codewords: Vec::new(),
        };
        assert_eq!(mac_symmetric_rate(&tx, &h, 10.0).unwrap(), 0.0);
    }

    fn k5_setup() -> (PlacementMatrix, NetworkParams, Vec<usize>) {
        let v = placement_for_packet_count(5, 2, 5).unwrap();
        let params = NetworkParams::symmetric(5, 2, 2).unwrap();
        let demands = (0..5).collect();
        (v, params, demands)
    }

    #[test]
    fn prefix_scan_matches_exhaustive_subset_minimum() {
        let (v, params, demands) = k5_setup();
        let schedule = full_delivery_schedule(&v, &params, &demands).unwrap();
        for seed in 0..25 {
            let h = sample_channel(&params, &mut RngSpec::new(seed).trial_rng(0));
            for tx in &schedule.transmissions {
                let snr = 40.0;
                let r = mac_symmetric_rate(tx, &h, snr).unwrap();

                let power = snr / tx.codewords.len() as f64;
                let beams = BeamformerSet::for_transmission(tx, &h, snr).unwrap();
                let mut exhaustive = f64::INFINITY;
                for &k in &tx.subset {
                    let gains: Vec<f64> = tx
                        .codewords
                        .iter()
                        .enumerate()
                        .filter(|(_, cw)| cw.part_for(k).is_some())
                        .map(|(i, _)| {
                            dot(h.user_channel(k), beams.vector(i)).norm_sqr() * power
                        })
                        .collect();
                    for mask in 1u32..1 << gains.len() {
                        let total: f64 = gains
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 1)
                            .map(|(_, g)| g)
                            .sum();
                        let bound = total.ln_1p() / mask.count_ones() as f64;
                        exhaustive = exhaustive.min(bound);
                    }
                }
                assert!((r - exhaustive).abs() < 1e-12 * exhaustive.max(1.0));
            }
        }
    }

    #[test]
    fn single_subset_networks_scale_as_packets_times_rate() {
        let v = canonical_full(4, 2);
        let params = NetworkParams::symmetric(4, 2, 2).unwrap();
        let demands: Vec<usize> = (0..4).collect();
        let schedule = full_delivery_schedule(&v, &params, &demands).unwrap();
        assert_eq!(schedule.transmissions.len(), 1);

        let h = sample_channel(&params, &mut RngSpec::new(11).trial_rng(0));
        let r = mac_symmetric_rate(&schedule.transmissions[0], &h, 100.0).unwrap();
        let big_r = symmetric_rate(&v, &params, &demands, &h, 100.0).unwrap();
        assert!((big_r - 6.0 * r).abs() < 1e-9, "R = {big_r}, P*r = {}", 6.0 * r);
    }

    #[test]
    fn wide_network_each_user_decodes_ten_codewords() {
        let v = canonical_full(6, 2);
        let params = NetworkParams::symmetric(6, 4, 2).unwrap();
        let schedule =
            full_delivery_schedule(&v, &params, &(0..6).collect::<Vec<_>>()).unwrap();
        assert_eq!(schedule.transmissions.len(), 1);
        let tx = &schedule.transmissions[0];
        for k in 0..6 {
            let decoded = tx
                .codewords
                .iter()
                .filter(|cw| cw.part_for(k).is_some())
                .count();
            assert_eq!(decoded, 10, "user {k}");
        }
    }

    #[test]
    fn rate_is_invariant_under_a_common_channel_phase() {
        let (v, params, demands) = k5_setup();
        let h = sample_channel(&params, &mut RngSpec::new(5).trial_rng(0));
        let base = symmetric_rate(&v, &params, &demands, &h, 50.0).unwrap();

        let phase = C64::from_polar(1.0, 0.7391);
        let rotated = ChannelRealization::from_columns(
            (0..h.users())
                .map(|k| h.user_channel(k).iter().map(|x| x * phase).collect())
                .collect(),
        );
        let turned = symmetric_rate(&v, &params, &demands, &rotated, 50.0).unwrap();
        assert!((base - turned).abs() < 1e-9, "{base} vs {turned}");
    }

    #[test]
    fn zero_power_means_zero_rate() {
        let (v, params, demands) = k5_setup();
        let h = sample_channel(&params, &mut RngSpec::new(2).trial_rng(0));
        assert_eq!(symmetric_rate(&v, &params, &demands, &h, 0.0).unwrap(), 0.0);
        let tiny = symmetric_rate(&v, &params, &demands, &h, 1e-9).unwrap();
        let small = symmetric_rate(&v, &params, &demands, &h, 1e-6).unwrap();
        assert!(0.0 < tiny && tiny < small && small < 1e-4);
    }

    #[test]
    fn channel_shape_is_checked() {
        let (v, params, demands) = k5_setup();
        let wrong = ChannelRealization::from_columns(vec![vec![C64::new(1.0, 0.0); 3]; 5]);
        assert!(matches!(
            symmetric_rate(&v, &params, &demands, &wrong, 1.0),
            Err(PhyError::AntennaMismatch {
                got: 3,
                expected: 2
            })
        ));
        let few = ChannelRealization::from_columns(vec![vec![C64::new(1.0, 0.0); 2]; 4]);
        assert!(matches!(
            symmetric_rate(&v, &params, &demands, &few, 1.0),
            Err(PhyError::UserMismatch { got: 4, expected: 5 })
        ));
    }
}
