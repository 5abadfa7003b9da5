//! Zero-forcing beamformers for the multicast codewords of one transmission.

use super::channel::ChannelRealization;
use super::linalg::{
    canonical_phase, dot, hermitian_eigen, orthonormal_complement, singular_values, C64,
};
use super::PhyError;
use crate::delivery::TransmissionSpec;

const RANK_TOLERANCE: f64 = 1e-10;

/// Unit-norm beamformer for a codeword aimed at `target`, transmitted while
/// the users in `subset` are listening. The vector is forced to zero at every
/// user in `subset` outside `target`; within the remaining freedom it
/// maximizes the total received power over the target users.
///
/// The suppressed set needs at most `antennas - 1` users, and the suppressed
/// channels must be well conditioned; degenerate inputs return an error
/// rather than a garbage direction.
pub fn zf_beamformer(
    subset: &[usize],
    target: &[usize],
    h: &ChannelRealization,
) -> Result<Vec<C64>, PhyError> {
    for &k in target {
        if !subset.contains(&k) {
            return Err(PhyError::TargetNotInSubset {
                target: k,
                subset: subset.to_vec(),
            });
        }
    }
    let antennas = h.antennas();
    let suppressed: Vec<usize> = subset
        .iter()
        .copied()
        .filter(|k| !target.contains(k))
        .collect();
    if suppressed.len() >= antennas {
        return Err(PhyError::NullingBudget {
            needed: suppressed.len(),
            available: antennas - 1,
        });
    }

    let suppressed_channels: Vec<Vec<C64>> = suppressed
        .iter()
        .map(|&k| h.user_channel(k).to_vec())
        .collect();
    if !suppressed_channels.is_empty() {
        let sigma = singular_values(&suppressed_channels);
        let sigma_min = sigma.first().copied().unwrap_or(0.0);
        if sigma_min < RANK_TOLERANCE {
            return Err(PhyError::RankDeficient { sigma_min });
        }
    }

    let nullspace = orthonormal_complement(&suppressed_channels, antennas);
    debug_assert!(!nullspace.is_empty());
    if nullspace.len() == 1 && target.len() <= 1 {
        let mut u = nullspace.into_iter().next().unwrap();
        canonical_phase(&mut u);
        return Ok(u);
    }

    // Received power of u = sum_i alpha_i n_i over the target users is a
    // Hermitian quadratic form in alpha; the top eigenvector gives the best
    // direction inside the nullspace.
    let d = nullspace.len();
    let coupling: Vec<Vec<C64>> = nullspace
        .iter()
        .map(|n| target.iter().map(|&k| dot(n, h.user_channel(k))).collect())
        .collect();
    let mut quad = vec![vec![C64::new(0.0, 0.0); d]; d];
    for i in 0..d {
        for j in 0..d {
            quad[i][j] = coupling[i]
                .iter()
                .zip(&coupling[j])
                .map(|(x, y)| x * y.conj())
                .sum();
        }
    }
    let (values, vectors) = hermitian_eigen(&quad);
    let top = values.len() - 1;
    debug_assert!(values[top] >= -1e-12);
    let alpha = &vectors[top];
    let mut u = vec![C64::new(0.0, 0.0); antennas];
    for (i, n) in nullspace.iter().enumerate() {
        for (x, y) in u.iter_mut().zip(n) {
            *x += alpha[i] * y;
        }
    }
    canonical_phase(&mut u);
    Ok(u)
}

/// Beamformers and per-codeword powers for one transmission: one unit vector
/// per codeword, total power split uniformly across the codewords.
#[derive(Debug, Clone)]
pub struct BeamformerSet {
    vectors: Vec<Vec<C64>>,
    power_per_codeword: f64,
}

impl BeamformerSet {
    pub fn for_transmission(
        tx: &TransmissionSpec,
        h: &ChannelRealization,
        total_power: f64,
    ) -> Result<Self, PhyError> {
        let vectors = tx
            .codewords
            .iter()
            .map(|cw| zf_beamformer(&tx.subset, &cw.target, h))
            .collect::<Result<Vec<_>, _>>()?;
        let count = vectors.len().max(1);
        Ok(Self {
            vectors,
            power_per_codeword: total_power / count as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, codeword: usize) -> &[C64] {
        &self.vectors[codeword]
    }

    pub fn power(&self) -> f64 {
        self.power_per_codeword
    }

    /// Received power of codeword `codeword` at user `k`.
    pub fn received_power(&self, codeword: usize, k: usize, h: &ChannelRealization) -> f64 {
        self.power_per_codeword * dot(h.user_channel(k), &self.vectors[codeword]).norm_sqr()
    }
}
