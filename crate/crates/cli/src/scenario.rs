//! Scenario orchestration: construct placements, schedule, verify, and
//! emit artifacts into the configured output directory.

use std::fs;
use std::path::{Path, PathBuf};

use ccflex_core::delivery::{full_delivery_schedule, verify_decodability, DeliverySchedule};
use ccflex_core::io::{
    efficiency_rows, parse_placement, profile_rows, render_advantage_csv, render_efficiency_csv,
    render_placement, render_rate_csv, render_schedule, EfficiencyRow,
};
use ccflex_core::metrics::{efficiency_index, efficiency_profile};
use ccflex_core::phy::{monte_carlo_rate, rate_advantage, SweepSpec};
use ccflex_core::placement::{
    achievable_packet_counts, canonical_full, canonical_grouped, concat_blocks, enumerate_blocks,
    placement_for_packet_count, PlacementMatrix,
};

use crate::config::{PlacementSource, SimConfig};
use crate::CliError;

pub struct ResolvedPlacement {
    pub packets: usize,
    pub matrix: PlacementMatrix,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Turns the placement source into concrete matrices, one per packet
/// count. Sources that determine their own size yield a single matrix;
/// a `P` list then only cross-checks it.
pub fn resolve_placements(
    cfg: &SimConfig,
    validate_files: bool,
) -> Result<Vec<ResolvedPlacement>, CliError> {
    let users = cfg.params.users;
    let weight = cfg.params.cache_ratio;

    let single = |matrix: PlacementMatrix| -> Result<Vec<ResolvedPlacement>, CliError> {
        let packets = matrix.packets();
        if !cfg.packet_counts.is_empty() && cfg.packet_counts != [packets] {
            return Err(config_err(format!(
                "placement source fixes P = {packets}, config lists P = {:?}",
                cfg.packet_counts
            )));
        }
        Ok(vec![ResolvedPlacement { packets, matrix }])
    };

    match &cfg.placement {
        PlacementSource::Auto => {
            if cfg.packet_counts.is_empty() {
                return Err(config_err("placement = auto needs a `P` list"));
            }
            cfg.packet_counts
                .iter()
                .map(|&packets| {
                    placement_for_packet_count(users, weight, packets)
                        .map(|matrix| ResolvedPlacement { packets, matrix })
                        .ok_or_else(|| {
                            let achievable: Vec<usize> =
                                achievable_packet_counts(users, weight).into_iter().collect();
                            config_err(format!(
                                "P = {packets} is not achievable for K = {users}, t = {weight}; \
                                 achievable values: {achievable:?}"
                            ))
                        })
                })
                .collect()
        }
        PlacementSource::Full => single(canonical_full(users, weight)),
        PlacementSource::Grouped { group } => {
            let matrix =
                canonical_grouped(users, weight, *group).map_err(|e| config_err(e.to_string()))?;
            single(matrix)
        }
        PlacementSource::Blocks(indices) => {
            let blocks = enumerate_blocks(users, weight);
            let chosen: Vec<_> = indices
                .iter()
                .map(|&i| {
                    blocks.get(i - 1).cloned().ok_or_else(|| {
                        config_err(format!(
                            "block index {i} out of range; K = {users}, t = {weight} has {} blocks",
                            blocks.len()
                        ))
                    })
                })
                .collect::<Result<_, _>>()?;
            let matrix = concat_blocks(&chosen).map_err(|e| config_err(e.to_string()))?;
            single(matrix)
        }
        PlacementSource::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let matrix = parse_placement(&text, validate_files)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            if matrix.users() != users || matrix.replication() != weight {
                return Err(CliError::Validation(format!(
                    "{}: matrix is K = {}, t = {}, config wants K = {users}, t = {weight}",
                    path.display(),
                    matrix.users(),
                    matrix.replication()
                )));
            }
            single(matrix)
        }
    }
}

fn write_artifact(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn out_path(cfg: &SimConfig, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}

fn ensure_output_dir(cfg: &SimConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", cfg.output_dir.display())))
}

/// Builds the delivery schedule and insists it decodes.
fn schedule_and_verify(
    cfg: &SimConfig,
    resolved: &ResolvedPlacement,
) -> Result<DeliverySchedule, CliError> {
    let demands = cfg.demand_vector();
    let schedule = full_delivery_schedule(&resolved.matrix, &cfg.params, &demands)
        .map_err(|e| config_err(e.to_string()))?;
    let report = verify_decodability(&schedule, &resolved.matrix, &demands);
    if !report.success {
        return Err(CliError::Decode(format!(
            "P = {}: {report}",
            resolved.packets
        )));
    }
    Ok(schedule)
}

fn write_placement_and_schedule(
    cfg: &SimConfig,
    resolved: &ResolvedPlacement,
) -> Result<(), CliError> {
    let schedule = schedule_and_verify(cfg, resolved)?;
    let p = resolved.packets;
    write_artifact(
        &out_path(cfg, &format!("placement_P{p}.txt")),
        &render_placement(&resolved.matrix),
    )?;
    write_artifact(
        &out_path(cfg, &format!("schedule_P{p}.json")),
        &render_schedule(&schedule, p),
    )?;
    println!(
        "P = {p}: {} codewords in {} transmissions, decode ok",
        schedule.codeword_count(),
        schedule.transmissions.len()
    );
    Ok(())
}

fn efficiency_table(
    cfg: &SimConfig,
    placements: &[ResolvedPlacement],
) -> Result<Vec<EfficiencyRow>, CliError> {
    let mut rows = Vec::new();
    for resolved in placements {
        if cfg.params.subset_size() == cfg.params.users {
            let report = efficiency_index(&resolved.matrix, &cfg.params)
                .map_err(|e| config_err(e.to_string()))?;
            rows.extend(efficiency_rows(&cfg.label, resolved.packets, &report));
        } else {
            let profile = efficiency_profile(&resolved.matrix, &cfg.params)
                .map_err(|e| config_err(e.to_string()))?;
            rows.extend(profile_rows(&cfg.label, resolved.packets, &profile));
        }
    }
    Ok(rows)
}

pub fn run_schedule(cfg: &SimConfig, validate_files: bool) -> Result<(), CliError> {
    let placements = resolve_placements(cfg, validate_files)?;
    ensure_output_dir(cfg)?;
    for resolved in &placements {
        write_placement_and_schedule(cfg, resolved)?;
    }
    Ok(())
}

pub fn run_efficiency(cfg: &SimConfig, validate_files: bool) -> Result<(), CliError> {
    let placements = resolve_placements(cfg, validate_files)?;
    for resolved in &placements {
        schedule_and_verify(cfg, resolved)?;
    }
    ensure_output_dir(cfg)?;
    let rows = efficiency_table(cfg, &placements)?;
    write_artifact(&out_path(cfg, "efficiency.csv"), &render_efficiency_csv(&rows))
}

pub fn run_simulate(cfg: &SimConfig, validate_files: bool) -> Result<(), CliError> {
    if cfg.snr_grid_db.is_empty() {
        return Err(config_err("simulate needs a nonempty `snr_db` grid"));
    }
    if cfg.trials == 0 {
        return Err(config_err("simulate needs `trials` >= 1"));
    }
    let placements = resolve_placements(cfg, validate_files)?;
    if let Some(baseline) = cfg.baseline {
        if !placements.iter().any(|r| r.packets == baseline) {
            return Err(config_err(format!(
                "baseline_P = {baseline} is not among the resolved packet counts"
            )));
        }
    }

    ensure_output_dir(cfg)?;
    for resolved in &placements {
        write_placement_and_schedule(cfg, resolved)?;
    }
    let rows = efficiency_table(cfg, &placements)?;
    write_artifact(&out_path(cfg, "efficiency.csv"), &render_efficiency_csv(&rows))?;

    let matrices: Vec<PlacementMatrix> =
        placements.iter().map(|r| r.matrix.clone()).collect();
    let sweep = SweepSpec {
        snr_grid_db: cfg.snr_grid_db.clone(),
        trials: cfg.trials,
        rng: cfg.rng,
    };
    let curves = monte_carlo_rate(&cfg.params, &matrices, &cfg.demand_vector(), &sweep)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    write_artifact(
        &out_path(cfg, "rates.csv"),
        &render_rate_csv(&curves, cfg.rng.seed),
    )?;

    if let Some(baseline) = cfg.baseline {
        let advantage =
            rate_advantage(&curves, baseline).map_err(|e| CliError::Runtime(e.to_string()))?;
        write_artifact(
            &out_path(cfg, "rate_advantage.csv"),
            &render_advantage_csv(&advantage),
        )?;
    }
    Ok(())
}
