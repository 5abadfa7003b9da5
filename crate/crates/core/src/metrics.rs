//! Term classification and the transmission-efficiency index.
//!
//! Every codeword of a transmission lands at each subset user in one of
//! three ways: zero-forced away (the user is outside the target), carrying
//! one of the user's own subpackets, or fully reconstructible from cache
//! and subtracted. The efficiency index charges a user for the third kind:
//! codewords it hears, occupies a beam towards it, yet contributes nothing
//! it did not already store.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delivery::{full_delivery_schedule, DeliveryError, TransmissionSpec};
use crate::params::NetworkParams;
use crate::placement::PlacementMatrix;

/// How one codeword arrives at one user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermClass {
    /// User outside the target: the beamformer suppresses the codeword.
    Nulled,
    /// User inside the target with a subpacket of its own in the XOR.
    Useful,
    /// User inside the target but every part belongs to someone else; the
    /// cache reconstructs the whole XOR, which is then discarded.
    CacheRemoved,
}

/// Classifies every codeword of `tx` as seen by `user`.
pub fn classify_terms(tx: &TransmissionSpec, user: usize) -> Vec<TermClass> {
    tx.codewords
        .iter()
        .map(|cw| {
            if !cw.target.contains(&user) {
                TermClass::Nulled
            } else if cw.part_for(user).is_some() {
                TermClass::Useful
            } else {
                TermClass::CacheRemoved
            }
        })
        .collect()
}

/// Efficiency index of a single-transmission network, per user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    /// Nonempty codewords in the transmission.
    pub phi: usize,
    /// Cache-removed terms per user.
    pub theta: Vec<usize>,
    /// 1 - theta/phi per user.
    pub gamma: Vec<f64>,
}

/// Per-transmission efficiency for networks with more users than a single
/// subset covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotEfficiency {
    pub subset: Vec<usize>,
    pub phi: usize,
    /// Cache-removed counts, aligned with `subset`.
    pub theta: Vec<usize>,
    /// Per-user index within this slot, aligned with `subset`.
    pub gamma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyProfile {
    /// One entry per nonempty transmission, in schedule order.
    pub slots: Vec<SlotEfficiency>,
    /// Mean slot index per user, over the nonempty slots serving them.
    pub mean_gamma: Vec<f64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error(
        "the efficiency index applies to single-transmission networks; \
         {users} users exceed the subset size {subset_size}"
    )]
    MultipleTransmissions { users: usize, subset_size: usize },
    #[error("no nonempty codewords to classify")]
    Degenerate,
    #[error(transparent)]
    Delivery(#[from] DeliveryError),
}

fn slot_counts(tx: &TransmissionSpec, users: impl Iterator<Item = usize>) -> Vec<usize> {
    users
        .map(|k| {
            classify_terms(tx, k)
                .iter()
                .filter(|c| **c == TermClass::CacheRemoved)
                .count()
        })
        .collect()
}

/// Placeholder demands for metrics: classification never reads the file
/// indices, only which user each part belongs to.
fn any_demands(params: &NetworkParams) -> Vec<usize> {
    (0..params.users).map(|k| k % params.library_size).collect()
}

/// Efficiency index for networks whose subset size reaches all users, so
/// delivery is a single transmission. Demand-independent.
pub fn efficiency_index(
    v: &PlacementMatrix,
    params: &NetworkParams,
) -> Result<EfficiencyReport, MetricsError> {
    if params.subset_size() != params.users {
        return Err(MetricsError::MultipleTransmissions {
            users: params.users,
            subset_size: params.subset_size(),
        });
    }
    let schedule = full_delivery_schedule(v, params, &any_demands(params))?;
    let tx = &schedule.transmissions[0];
    let phi = tx.codewords.len();
    if phi == 0 {
        return Err(MetricsError::Degenerate);
    }
    let theta = slot_counts(tx, 0..params.users);
    let gamma = theta
        .iter()
        .map(|&t| 1.0 - t as f64 / phi as f64)
        .collect();
    Ok(EfficiencyReport { phi, theta, gamma })
}

/// Per-slot efficiency for any network, with a per-user mean across the
/// slots that serve them. On single-transmission networks the mean equals
/// the plain index.
pub fn efficiency_profile(
    v: &PlacementMatrix,
    params: &NetworkParams,
) -> Result<EfficiencyProfile, MetricsError> {
    let schedule = full_delivery_schedule(v, params, &any_demands(params))?;
    let mut slots = Vec::new();
    for tx in &schedule.transmissions {
        let phi = tx.codewords.len();
        if phi == 0 {
            continue;
        }
        let theta = slot_counts(tx, tx.subset.iter().copied());
        let gamma = theta
            .iter()
            .map(|&t| 1.0 - t as f64 / phi as f64)
            .collect();
        slots.push(SlotEfficiency {
            subset: tx.subset.clone(),
            phi,
            theta,
            gamma,
        });
    }
    if slots.is_empty() {
        return Err(MetricsError::Degenerate);
    }
    let mut sums = vec![0.0; params.users];
    let mut counts = vec![0usize; params.users];
    for slot in &slots {
        for (pos, &k) in slot.subset.iter().enumerate() {
            sums[k] += slot.gamma[pos];
            counts[k] += 1;
        }
    }
    let mean_gamma = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c == 0 { 1.0 } else { s / c as f64 })
        .collect();
    Ok(EfficiencyProfile { slots, mean_gamma })
}

/// Total pieces each file splits into: P packets times Q subpackets.
pub fn subpacketization(params: &NetworkParams, packets: usize) -> usize {
    packets * params.subs_per_packet()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delivery::{subset_adjusted_matrix, build_transmission, SubpacketCounters};
    use crate::placement::{canonical_full, enumerate_blocks, placement_for_packet_count};

    fn matrix(strs: &[&str], t: usize) -> PlacementMatrix {
        let rows = strs
            .iter()
            .map(|s| s.chars().map(|c| c == '1').collect())
            .collect();
        PlacementMatrix::new(rows, t).unwrap()
    }

    fn single_transmission(v: &PlacementMatrix, params: &NetworkParams) -> TransmissionSpec {
        let demands = any_demands(params);
        let mut schedule = full_delivery_schedule(v, params, &demands).unwrap();
        assert_eq!(schedule.transmissions.len(), 1);
        schedule.transmissions.remove(0)
    }

    #[test]
    fn four_ring_rows_classify_as_the_worked_example() {
        use TermClass::*;
        let v = matrix(&["1100", "0110", "0011", "1001"], 2);
        let params = NetworkParams::symmetric(4, 2, 2).unwrap();
        let tx = single_transmission(&v, &params);

        // Lexicographic target order.
        assert_eq!(
            classify_terms(&tx, 0),
            vec![Useful, CacheRemoved, Useful, Nulled]
        );

        // The same classes read in complement order V_1..V_4, where V_i
        // drops user i: the usual way this example is written out.
        let complement_order: Vec<TermClass> = (0..4)
            .map(|i| {
                let target: Vec<usize> = (0..4).filter(|&k| k != i).collect();
                let pos = tx
                    .codewords
                    .iter()
                    .position(|cw| cw.target == target)
                    .unwrap();
                classify_terms(&tx, 0)[pos]
            })
            .collect();
        assert_eq!(
            complement_order,
            vec![Nulled, Useful, CacheRemoved, Useful]
        );
    }

    #[test]
    fn short_block_classification_counts() {
        use TermClass::*;
        let blocks = enumerate_blocks(6, 2);
        let v = blocks[2].as_matrix().clone();
        assert_eq!(v.packets(), 3);
        let params = NetworkParams::symmetric(6, 4, 2).unwrap();
        let tx = single_transmission(&v, &params);
        assert_eq!(tx.codewords.len(), 12);

        let classes = classify_terms(&tx, 0);
        assert_eq!(classes.len(), 12);
        let count = |c: TermClass| classes.iter().filter(|x| **x == c).count();
        assert_eq!(count(Useful), 2);
        assert_eq!(count(CacheRemoved), 4);
        assert_eq!(count(Nulled), 6);
    }

    #[test]
    fn full_matrix_members_are_always_useful() {
        let v = canonical_full(6, 2);
        let params = NetworkParams::symmetric(6, 4, 2).unwrap();
        let tx = single_transmission(&v, &params);
        for k in 0..6 {
            for (cw, class) in tx.codewords.iter().zip(classify_terms(&tx, k)) {
                if cw.target.contains(&k) {
                    assert_eq!(class, TermClass::Useful);
                } else {
                    assert_eq!(class, TermClass::Nulled);
                }
            }
        }
    }

    #[test]
    fn ring_placement_index_is_three_quarters() {
        let v = matrix(&["1100", "0110", "0011", "1001"], 2);
        let params = NetworkParams::symmetric(4, 2, 2).unwrap();
        let report = efficiency_index(&v, &params).unwrap();
        assert_eq!(report.phi, 4);
        assert_eq!(report.theta, vec![1, 1, 1, 1]);
        for g in &report.gamma {
            assert!((g - 0.75).abs() < 5e-4);
        }
    }

    #[test]
    fn interleaved_placement_index_is_one_half() {
        let v = matrix(&["1010", "0101"], 2);
        let params = NetworkParams::symmetric(4, 2, 2).unwrap();
        let report = efficiency_index(&v, &params).unwrap();
        assert_eq!(report.phi, 4);
        for g in &report.gamma {
            assert!((g - 0.5).abs() < 5e-4);
        }
    }

    #[test]
    fn index_matches_the_published_table_spot_checks() {
        // (K, t, L, P, expected), users all equal by circulant symmetry.
        let cases = [
            (6, 2, 4, 3, 0.667),
            (6, 2, 4, 9, 0.833),
            (6, 2, 4, 15, 1.0),
            (6, 3, 3, 6, 0.583),
            (6, 3, 3, 20, 1.0),
        ];
        for (k, t, l, p, expected) in cases {
            let v = placement_for_packet_count(k, t, p).unwrap();
            let params = NetworkParams::symmetric(k, l, t).unwrap();
            let report = efficiency_index(&v, &params).unwrap();
            for g in &report.gamma {
                assert!(
                    (g - expected).abs() < 1e-3,
                    "K={k} t={t} P={p}: gamma {g} != {expected}"
                );
            }
            assert!(report
                .gamma
                .windows(2)
                .all(|w| (w[0] - w[1]).abs() < 1e-12));
        }
    }

    #[test]
    fn classification_ignores_demanded_files() {
        let v = placement_for_packet_count(4, 2, 6).unwrap();
        let params = NetworkParams::symmetric(4, 2, 2).unwrap();
        let a = full_delivery_schedule(&v, &params, &[0, 1, 2, 3]).unwrap();
        let b = full_delivery_schedule(&v, &params, &[3, 3, 0, 1]).unwrap();
        for (ta, tb) in a.transmissions.iter().zip(&b.transmissions) {
            for k in 0..4 {
                assert_eq!(classify_terms(ta, k), classify_terms(tb, k));
            }
        }
    }

    #[test]
    fn wide_networks_are_rejected_by_the_plain_index() {
        let v = placement_for_packet_count(5, 2, 5).unwrap();
        let params = NetworkParams::symmetric(5, 2, 2).unwrap();
        assert_eq!(
            efficiency_index(&v, &params),
            Err(MetricsError::MultipleTransmissions {
                users: 5,
                subset_size: 4
            })
        );
    }

    #[test]
    fn all_cached_rows_have_nothing_to_classify() {
        let v = PlacementMatrix::new_unchecked(
            vec![vec![true; 4]],
            2,
        );
        let params = NetworkParams::symmetric(4, 2, 2).unwrap();
        assert_eq!(efficiency_index(&v, &params), Err(MetricsError::Degenerate));
    }

    #[test]
    fn five_user_profile_averages_slot_indices() {
        let v = placement_for_packet_count(5, 2, 5).unwrap();
        let params = NetworkParams::symmetric(5, 2, 2).unwrap();
        let profile = efficiency_profile(&v, &params).unwrap();
        assert_eq!(profile.slots.len(), 5);
        for slot in &profile.slots {
            assert_eq!(slot.phi, 4);
            assert_eq!(slot.subset.len(), 4);
        }
        for k in 0..5 {
            let mut per_slot: Vec<f64> = profile
                .slots
                .iter()
                .filter_map(|s| {
                    s.subset
                        .iter()
                        .position(|&u| u == k)
                        .map(|pos| s.gamma[pos])
                })
                .collect();
            per_slot.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(per_slot, vec![0.5, 0.5, 0.75, 0.75], "user {k}");
            assert!((profile.mean_gamma[k] - 0.625).abs() < 1e-12);
        }
    }

    #[test]
    fn profile_agrees_with_index_on_single_transmission_networks() {
        let v = placement_for_packet_count(6, 2, 9).unwrap();
        let params = NetworkParams::symmetric(6, 4, 2).unwrap();
        let report = efficiency_index(&v, &params).unwrap();
        let profile = efficiency_profile(&v, &params).unwrap();
        assert_eq!(profile.slots.len(), 1);
        assert_eq!(profile.mean_gamma, report.gamma);
    }

    #[test]
    fn subpacketization_multiplies_packets_by_subs() {
        let narrow = NetworkParams::symmetric(5, 2, 2).unwrap();
        assert_eq!(subpacketization(&narrow, 5), 10);
        assert_eq!(subpacketization(&narrow, 10), 20);
        let single = NetworkParams::symmetric(4, 2, 2).unwrap();
        assert_eq!(subpacketization(&single, 6), 6);
    }

    #[test]
    fn transmission_builders_classify_consistently() {
        // classify_terms only needs target membership and part ownership,
        // so a transmission built directly must classify like the one from
        // the full schedule.
        let v = placement_for_packet_count(6, 3, 8).unwrap();
        let params = NetworkParams::symmetric(6, 3, 3).unwrap();
        let subset: Vec<usize> = (0..6).collect();
        let adjusted = subset_adjusted_matrix(&v, &subset);
        let mut counters = SubpacketCounters::new();
        let demands = any_demands(&params);
        let direct =
            build_transmission(&subset, &v, &adjusted, &demands, &mut counters).unwrap();
        let from_schedule = single_transmission(&v, &params);
        for k in 0..6 {
            assert_eq!(classify_terms(&direct, k), classify_terms(&from_schedule, k));
        }
    }
}
