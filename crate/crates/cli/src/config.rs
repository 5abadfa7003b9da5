//! Line-oriented `key = value` scenario configuration.
//!
//! `#` starts a comment, lists are comma-separated, and unknown or
//! duplicated keys are rejected so typos surface instead of silently
//! falling back to defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use ccflex_core::phy::{Generator, RngSpec};
use ccflex_core::NetworkParams;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlacementSource {
    /// Resolve each requested packet count to a block combination.
    Auto,
    /// All weight-t rows, the largest construction.
    Full,
    /// Group-partition construction; `group` must divide K and t.
    Grouped { group: usize },
    /// Explicit 1-based indices into the enumerated block list.
    Blocks(Vec<usize>),
    /// Load a placement matrix from a text file.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DemandPolicy {
    /// User k requests file k; needs N >= K.
    Distinct,
    /// Explicit 1-based file index per user.
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub params: NetworkParams,
    pub placement: PlacementSource,
    /// Packet counts to run; may stay empty for sources that determine P.
    pub packet_counts: Vec<usize>,
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub rng: RngSpec,
    pub demands: DemandPolicy,
    pub output_dir: PathBuf,
    pub label: String,
    pub baseline: Option<usize>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut pairs = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("line {}: expected `key = value`", idx + 1)))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(config_err(format!("line {}: empty key or value", idx + 1)));
        }
        if pairs.insert(key.clone(), value).is_some() {
            return Err(config_err(format!("line {}: duplicate key `{key}`", idx + 1)));
        }
    }
    Ok(pairs)
}

fn parse_num<T: FromStr>(pairs: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    match pairs.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|_| config_err(format!("`{key} = {raw}` is not a valid number"))),
    }
}

fn require<T>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| config_err(format!("missing required key `{key}`")))
}

fn parse_list<T: FromStr>(raw: &str, key: &str) -> Result<Vec<T>, CliError> {
    raw.split(',')
        .map(|item| {
            item.trim()
                .parse()
                .map_err(|_| config_err(format!("`{key}` has invalid entry `{}`", item.trim())))
        })
        .collect()
}

fn parse_placement(raw: &str) -> Result<PlacementSource, CliError> {
    if raw == "auto" {
        return Ok(PlacementSource::Auto);
    }
    if raw == "full" {
        return Ok(PlacementSource::Full);
    }
    if raw == "grouped" {
        return Ok(PlacementSource::Grouped { group: 0 });
    }
    if let Some(list) = raw.strip_prefix("blocks:") {
        let indices: Vec<usize> = parse_list(list, "placement")?;
        if indices.is_empty() || indices.contains(&0) {
            return Err(config_err("placement blocks are 1-based indices"));
        }
        return Ok(PlacementSource::Blocks(indices));
    }
    if let Some(path) = raw.strip_prefix("file:") {
        return Ok(PlacementSource::File(PathBuf::from(path.trim())));
    }
    Err(config_err(format!(
        "placement `{raw}` is not one of auto | full | grouped | blocks:... | file:..."
    )))
}

impl SimConfig {
    /// Parses a config file body. `env_seed` (from CCFLEX_SEED) overrides
    /// the `seed` key when present.
    pub fn parse(text: &str, env_seed: Option<u64>) -> Result<Self, CliError> {
        let pairs = parse_pairs(text)?;
        for key in pairs.keys() {
            const KNOWN: [&str; 14] = [
                "K", "L", "t", "N", "placement", "group", "P", "snr_db", "trials", "seed",
                "generator", "demands", "output_dir", "label", // baseline_P checked below
            ];
            if !KNOWN.contains(&key.as_str()) && key != "baseline_P" {
                return Err(config_err(format!("unknown key `{key}`")));
            }
        }

        let users: usize = require(parse_num(&pairs, "K")?, "K")?;
        let antennas: usize = require(parse_num(&pairs, "L")?, "L")?;
        let cache_ratio: usize = require(parse_num(&pairs, "t")?, "t")?;
        let library: usize = parse_num(&pairs, "N")?.unwrap_or(users);
        let params = NetworkParams::new(users, antennas, cache_ratio, library)
            .map_err(|e| config_err(e.to_string()))?;

        let mut placement = match pairs.get("placement") {
            None => PlacementSource::Auto,
            Some(raw) => parse_placement(raw)?,
        };
        if let PlacementSource::Grouped { group } = &mut placement {
            *group = parse_num(&pairs, "group")?.unwrap_or(antennas);
            if *group == 0 {
                return Err(config_err("`group` must be positive"));
            }
        } else if pairs.contains_key("group") {
            return Err(config_err("`group` only applies to placement = grouped"));
        }

        let packet_counts = match pairs.get("P") {
            None => Vec::new(),
            Some(raw) => parse_list(raw, "P")?,
        };

        let snr_grid_db = match pairs.get("snr_db") {
            None => Vec::new(),
            Some(raw) => parse_list(raw, "snr_db")?,
        };

        let trials = parse_num(&pairs, "trials")?.unwrap_or(0);
        let seed = match env_seed {
            Some(seed) => seed,
            None => parse_num(&pairs, "seed")?.unwrap_or(0),
        };
        let generator = match pairs.get("generator") {
            None => Generator::ChaCha12,
            Some(raw) => raw
                .parse()
                .map_err(|_| config_err(format!("unknown generator `{raw}`")))?,
        };

        let demands = match pairs.get("demands") {
            None => DemandPolicy::Distinct,
            Some(raw) if raw == "distinct" => DemandPolicy::Distinct,
            Some(raw) => {
                let files: Vec<usize> = parse_list(raw, "demands")?;
                if files.len() != users {
                    return Err(config_err(format!(
                        "demands lists {} files for {} users",
                        files.len(),
                        users
                    )));
                }
                if files.iter().any(|&w| w == 0 || w > library) {
                    return Err(config_err(format!(
                        "demands must be 1-based file indices up to N = {library}"
                    )));
                }
                DemandPolicy::Explicit(files)
            }
        };
        if demands == DemandPolicy::Distinct && library < users {
            return Err(config_err(format!(
                "distinct demands need N >= K, got N = {library}, K = {users}"
            )));
        }

        let output_dir = PathBuf::from(pairs.get("output_dir").map(String::as_str).unwrap_or("."));
        let label = pairs
            .get("label")
            .cloned()
            .unwrap_or_else(|| format!("K{users}t{cache_ratio}L{antennas}"));
        let baseline = parse_num(&pairs, "baseline_P")?;

        Ok(Self {
            params,
            placement,
            packet_counts,
            snr_grid_db,
            trials,
            rng: RngSpec { seed, generator },
            demands,
            output_dir,
            label,
            baseline,
        })
    }

    /// Demand vector as 0-based file indices.
    pub fn demand_vector(&self) -> Vec<usize> {
        match &self.demands {
            DemandPolicy::Distinct => (0..self.params.users).collect(),
            DemandPolicy::Explicit(files) => files.iter().map(|w| w - 1).collect(),
        }
    }
}
