//! XOR codeword construction and full delivery schedules.
//!
//! Delivery serves user subsets S of size t + L'. Within a subset, every
//! (t+1)-sized target set V gets one codeword: the XOR, over the packets
//! cached exactly by the users outside the target's complement, of one
//! missing subpacket per target user that still needs it. Users outside the
//! target but inside S are protected by beamformer nulls; users outside S
//! never need protection because the subset-adjusted matrix marks
//! everything they'd overhear as already cached.
//!
//! Subpacket sub-indices count up per (user, packet) pair: across the whole
//! schedule each missing pair is served exactly Q times, once per
//! sub-index, which is what the decode check verifies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::NetworkParams;
use crate::placement::PlacementMatrix;

/// One subpacket: packet `packet` of `file`, sub-index `sub` out of Q.
///
/// All indices are zero-based in code; text exports render them one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubpacketId {
    pub file: usize,
    pub packet: usize,
    pub sub: usize,
}

/// One user's constituent of a codeword XOR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CodewordPart {
    pub user: usize,
    pub subpacket: SubpacketId,
}

/// A single XOR codeword: beamformed towards `target`, nulled at the rest
/// of the transmission subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    /// Target user set, ascending, |target| = t + 1.
    pub target: Vec<usize>,
    /// Corresponding packet set: packets cached by nobody outside `target`.
    pub packet_set: Vec<usize>,
    /// One entry per served user; empty-parts codewords are dropped before
    /// reaching this type.
    pub parts: Vec<CodewordPart>,
}

impl Codeword {
    /// The part aimed at `user`, if this codeword serves them.
    pub fn part_for(&self, user: usize) -> Option<&CodewordPart> {
        self.parts.iter().find(|p| p.user == user)
    }
}

/// All codewords sent to one user subset in one slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmissionSpec {
    /// Served subset S, ascending, |S| = t + L'.
    pub subset: Vec<usize>,
    /// Nonempty codewords, targets in lexicographic order.
    pub codewords: Vec<Codeword>,
}

/// Per-(user, packet) sub-index counters, shared across an entire schedule.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubpacketCounters {
    next: BTreeMap<(usize, usize), usize>,
}

impl SubpacketCounters {
    pub fn new() -> Self {
        Self::default()
    }

    fn take(&mut self, user: usize, packet: usize) -> usize {
        let slot = self.next.entry((user, packet)).or_insert(0);
        let sub = *slot;
        *slot += 1;
        sub
    }

    /// How many subpackets of `packet` have been issued to `user` so far.
    pub fn issued(&self, user: usize, packet: usize) -> usize {
        self.next.get(&(user, packet)).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        self.next.iter().map(|(&k, &v)| (k, v))
    }
}

/// A complete delivery schedule: one transmission per subset of size
/// t + L', in lexicographic subset order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliverySchedule {
    pub transmissions: Vec<TransmissionSpec>,
    /// File demanded by each user.
    pub demands: Vec<usize>,
    /// Final sub-index counters; Q for every served (user, packet) pair.
    pub counters: SubpacketCounters,
    /// Q, the number of subpackets each packet splits into.
    pub subs_per_packet: usize,
}

impl DeliverySchedule {
    /// Codewords across all transmissions, flattened.
    pub fn codeword_count(&self) -> usize {
        self.transmissions.iter().map(|t| t.codewords.len()).sum()
    }
}

/// Result of the cache-assisted decode simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeReport {
    /// True iff every user ends up with all P*Q subpackets of its demand.
    pub success: bool,
    /// Subpackets each user recovered over the air (cached ones excluded).
    pub recovered: Vec<BTreeSet<SubpacketId>>,
    /// Required subpackets still absent per user after cache + decode.
    pub missing: Vec<Vec<SubpacketId>>,
}

impl DecodeReport {
    /// First missing subpacket in (user, packet, sub) order, if any.
    pub fn first_failure(&self) -> Option<(usize, SubpacketId)> {
        self.missing
            .iter()
            .enumerate()
            .find(|(_, m)| !m.is_empty())
            .map(|(k, m)| (k, m[0]))
    }
}

impl fmt::Display for DecodeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.success {
            let total: usize = self.recovered.iter().map(BTreeSet::len).sum();
            write!(f, "decodable ({total} subpackets delivered over the air)")
        } else {
            let (k, id) = self.first_failure().expect("failed report has a gap");
            write!(
                f,
                "decode failure: user {} never receives file {} packet {} sub {}",
                k + 1,
                id.file + 1,
                id.packet + 1,
                id.sub + 1
            )
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DeliveryError {
    #[error("demand vector has {got} entries for {expected} users")]
    DemandLength { got: usize, expected: usize },
    #[error("user {user} demands file {file} outside the {library}-file library")]
    DemandOutOfRange {
        user: usize,
        file: usize,
        library: usize,
    },
    #[error("placement is {got} users wide but the network has {expected}")]
    UserMismatch { got: usize, expected: usize },
    #[error("placement replication {got} does not match network cache ratio {expected}")]
    ReplicationMismatch { got: usize, expected: usize },
    #[error(
        "user {user} would appear twice in the codeword for target {target:?}; \
         placement rows are not distinct enough to decode"
    )]
    RepeatedUserInCodeword { target: Vec<usize>, user: usize },
}

/// Packets cached by nobody outside `target`: the packet set a codeword for
/// `target` may draw from.
pub fn corresponding_packet_set(target: &[usize], v: &PlacementMatrix) -> Vec<usize> {
    let users = v.users();
    let mut inside = vec![false; users];
    for &k in target {
        inside[k] = true;
    }
    (0..v.packets())
        .filter(|&p| (0..users).all(|k| inside[k] || !v.cached(p, k)))
        .collect()
}

/// The subset-adjusted matrix V^S: rows fully cached by the complement of
/// `subset` are overwritten with ones, as are the complement's columns;
/// everything else is copied. Entries marked 1 are exactly what delivery to
/// `subset` may ignore. For S = [K] the complement is empty and V^S = V.
pub fn subset_adjusted_matrix(v: &PlacementMatrix, subset: &[usize]) -> Vec<Vec<bool>> {
    let users = v.users();
    let mut inside = vec![false; users];
    for &k in subset {
        inside[k] = true;
    }
    let complement: Vec<usize> = (0..users).filter(|&k| !inside[k]).collect();

    let mut adjusted: Vec<Vec<bool>> = v.rows().to_vec();
    if complement.is_empty() {
        return adjusted;
    }
    for row in adjusted.iter_mut() {
        if complement.iter().all(|&k| row[k]) {
            row.fill(true);
        } else {
            for &k in &complement {
                row[k] = true;
            }
        }
    }
    adjusted
}

/// Builds the codewords for one transmission subset.
///
/// Targets are enumerated in lexicographic order; packet sets come from the
/// original placement while the per-user part filter reads the
/// subset-adjusted matrix; sub-indices are drawn from `counters`, which the
/// caller shares across the schedule. Codewords that end up with no parts
/// are dropped.
pub fn build_transmission(
    subset: &[usize],
    v: &PlacementMatrix,
    adjusted: &[Vec<bool>],
    demands: &[usize],
    counters: &mut SubpacketCounters,
) -> Result<TransmissionSpec, DeliveryError> {
    let t = v.replication();
    let mut codewords = Vec::new();
    for target in subset.iter().copied().combinations(t + 1) {
        let packet_set = corresponding_packet_set(&target, v);
        let mut parts: Vec<CodewordPart> = Vec::new();
        for &p in &packet_set {
            for &k in &target {
                if adjusted[p][k] {
                    continue;
                }
                if parts.iter().any(|part| part.user == k) {
                    return Err(DeliveryError::RepeatedUserInCodeword { target, user: k });
                }
                let sub = counters.take(k, p);
                parts.push(CodewordPart {
                    user: k,
                    subpacket: SubpacketId {
                        file: demands[k],
                        packet: p,
                        sub,
                    },
                });
            }
        }
        if !parts.is_empty() {
            codewords.push(Codeword {
                target,
                packet_set,
                parts,
            });
        }
    }
    Ok(TransmissionSpec {
        subset: subset.to_vec(),
        codewords,
    })
}

/// Builds the complete schedule: one transmission per size-(t+L') subset in
/// lexicographic order, with sub-index counters threaded through.
pub fn full_delivery_schedule(
    v: &PlacementMatrix,
    params: &NetworkParams,
    demands: &[usize],
) -> Result<DeliverySchedule, DeliveryError> {
    if v.users() != params.users {
        return Err(DeliveryError::UserMismatch {
            got: v.users(),
            expected: params.users,
        });
    }
    if v.replication() != params.cache_ratio {
        return Err(DeliveryError::ReplicationMismatch {
            got: v.replication(),
            expected: params.cache_ratio,
        });
    }
    if demands.len() != params.users {
        return Err(DeliveryError::DemandLength {
            got: demands.len(),
            expected: params.users,
        });
    }
    if let Some((user, &file)) = demands
        .iter()
        .find_position(|&&file| file >= params.library_size)
    {
        return Err(DeliveryError::DemandOutOfRange {
            user,
            file,
            library: params.library_size,
        });
    }

    let mut counters = SubpacketCounters::new();
    let mut transmissions = Vec::new();
    for subset in (0..params.users).combinations(params.subset_size()) {
        let adjusted = subset_adjusted_matrix(v, &subset);
        transmissions.push(build_transmission(
            &subset,
            v,
            &adjusted,
            demands,
            &mut counters,
        )?);
    }
    Ok(DeliverySchedule {
        transmissions,
        demands: demands.to_vec(),
        counters,
        subs_per_packet: params.subs_per_packet(),
    })
}

/// Simulates cache-assisted decoding of a schedule.
///
/// For every codeword aimed at a user, the user cancels the parts of other
/// users whose packets it caches; if exactly its own part remains, that
/// subpacket is recovered. Success means every user assembles all P*Q
/// subpackets of its demanded file from cache plus recoveries.
pub fn verify_decodability(
    schedule: &DeliverySchedule,
    v: &PlacementMatrix,
    demands: &[usize],
) -> DecodeReport {
    let users = v.users();
    let q = schedule.subs_per_packet;
    let mut recovered: Vec<BTreeSet<SubpacketId>> = vec![BTreeSet::new(); users];

    for tx in &schedule.transmissions {
        for cw in &tx.codewords {
            for &k in &cw.target {
                let mut own: Option<SubpacketId> = None;
                let mut separable = true;
                for part in &cw.parts {
                    if part.user == k {
                        // Two own parts would be inseparable; the builder
                        // rejects that case, so at most one arrives here.
                        own = Some(part.subpacket);
                    } else if !v.cached(part.subpacket.packet, k) {
                        separable = false;
                    }
                }
                if separable {
                    if let Some(id) = own {
                        recovered[k].insert(id);
                    }
                }
            }
        }
    }

    let mut missing: Vec<Vec<SubpacketId>> = Vec::with_capacity(users);
    for k in 0..users {
        let mut gaps = Vec::new();
        for p in v.missing_packets(k) {
            for sub in 0..q {
                let id = SubpacketId {
                    file: demands[k],
                    packet: p,
                    sub,
                };
                if !recovered[k].contains(&id) {
                    gaps.push(id);
                }
            }
        }
        missing.push(gaps);
    }

    DecodeReport {
        success: missing.iter().all(Vec::is_empty),
        recovered,
        missing,
    }
}
