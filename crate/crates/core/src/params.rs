//! Network dimensions and the quantities derived from them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dimensions of a cached broadcast network.
///
/// `cache_ratio` is the integer t = K*M/N: summed over the K users, every
/// packet of every file is cached t times. The per-user cache size M = t*N/K
/// is derived and must come out integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// Number of users K.
    pub users: usize,
    /// Number of transmit antennas L.
    pub antennas: usize,
    /// Global caching ratio t.
    pub cache_ratio: usize,
    /// Number of library files N.
    pub library_size: usize,
    /// File size F in symbols; only a normalization, defaults to 1.
    pub file_size: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("cache ratio t={t} must satisfy 1 <= t <= K-1 (K={k})")]
    CacheRatioRange { k: usize, t: usize },
    #[error("antenna count must be at least 1")]
    NoAntennas,
    #[error("library must hold at least one file")]
    EmptyLibrary,
    #[error("per-user cache t*N/K = {t}*{n}/{k} is not an integer")]
    FractionalCache { k: usize, t: usize, n: usize },
}

impl NetworkParams {
    pub fn new(
        users: usize,
        antennas: usize,
        cache_ratio: usize,
        library_size: usize,
    ) -> Result<Self, ParamError> {
        if cache_ratio < 1 || cache_ratio + 1 > users {
            return Err(ParamError::CacheRatioRange {
                k: users,
                t: cache_ratio,
            });
        }
        if antennas < 1 {
            return Err(ParamError::NoAntennas);
        }
        if library_size < 1 {
            return Err(ParamError::EmptyLibrary);
        }
        if !(cache_ratio * library_size).is_multiple_of(users) {
            return Err(ParamError::FractionalCache {
                k: users,
                t: cache_ratio,
                n: library_size,
            });
        }
        Ok(Self {
            users,
            antennas,
            cache_ratio,
            library_size,
            file_size: 1.0,
        })
    }

    /// Convenience constructor for the common N = K, F = 1 setup.
    pub fn symmetric(users: usize, antennas: usize, cache_ratio: usize) -> Result<Self, ParamError> {
        Self::new(users, antennas, cache_ratio, users)
    }

    pub fn with_file_size(mut self, file_size: f64) -> Self {
        self.file_size = file_size;
        self
    }

    /// Antennas the delivery scheme actually exploits: min(L, K - t).
    ///
    /// Surplus antennas beyond K - t change nothing structurally (any
    /// schedule for L' = K - t antennas runs unchanged on more), so the
    /// scheme is built for the capped value.
    pub fn effective_antennas(&self) -> usize {
        self.antennas.min(self.users - self.cache_ratio)
    }

    /// Size t + L' of the user subsets addressed by one transmission slot.
    pub fn subset_size(&self) -> usize {
        self.cache_ratio + self.effective_antennas()
    }

    /// Subpackets per packet, Q = C(K - t - 1, L' - 1).
    ///
    /// When K = t + L' this is 1 and the whole network is served in a
    /// single slot.
    pub fn subs_per_packet(&self) -> usize {
        binomial(
            self.users - self.cache_ratio - 1,
            self.effective_antennas() - 1,
        )
    }

    /// Per-user cache size M = t*N/K in files.
    pub fn per_user_cache(&self) -> usize {
        self.cache_ratio * self.library_size / self.users
    }
}

/// Binomial coefficient C(n, k) in usize arithmetic.
///
/// Sizes here stay tiny (n <= K <= a few dozen), far from overflow.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
