//! Placement matrices and their block construction.
//!
//! A placement matrix V is a P x K binary matrix: v[p][k] = 1 means user k
//! caches packet p of every file. Validity requires every row sum to equal
//! the caching ratio t, every column sum to equal P*t/K, and all rows to be
//! pairwise distinct. Valid matrices are assembled from placement blocks:
//! the orbit of a weight-t row under circular shifting is always a valid
//! matrix on its own, and stacking blocks with disjoint row sets keeps
//! validity. This is what makes the packet count P a design knob instead of
//! the fixed C(K, t) of the canonical scheme.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::binomial;

/// Validated P x K binary placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementMatrix {
    rows: Vec<Vec<bool>>,
    replication: usize,
}

/// Circular-shift orbit of a single row; the atomic unit placements are
/// built from. Height always divides K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementBlock {
    matrix: PlacementMatrix,
}

/// Which validity rule a [`Violation`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationRule {
    /// Input is not a non-empty rectangular 0/1 matrix.
    Shape,
    /// A row sum differs from t.
    RowSum,
    /// A column sum differs from P*t/K.
    ColumnSum,
    /// Two or more rows are identical.
    DuplicateRows,
    /// K does not divide P*t, so no column sum can be right.
    Divisibility,
}

/// One violated rule, with the row/column it concerns where that applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: ValidationRule,
    /// Zero-based row index (RowSum) or column index (ColumnSum).
    pub index: Option<usize>,
    pub detail: String,
}

/// Outcome of [`validate_placement`]: empty violation list means valid.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, rule: ValidationRule, index: Option<usize>, detail: String) {
        self.violations.push(Violation {
            rule,
            index,
            detail,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {}", v.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlacementError {
    #[error("block seed row must contain at least one 1")]
    EmptySeedRow,
    #[error("cannot concatenate an empty block list")]
    NoBlocks,
    #[error("blocks disagree on dimensions: {0}")]
    MixedBlocks(String),
    #[error("duplicate row across blocks: {0}")]
    DuplicateRowAcrossBlocks(String),
    #[error("grouping requires L | K and L | t, got K={users}, t={weight}, L={group}")]
    GroupDivisibility {
        users: usize,
        weight: usize,
        group: usize,
    },
    #[error("assembled matrix failed validation: {0}")]
    Invalid(ValidationReport),
}

impl PlacementMatrix {
    /// Validates `rows` as a placement with caching ratio `replication` and
    /// wraps it. The full report is returned on failure.
    pub fn new(rows: Vec<Vec<bool>>, replication: usize) -> Result<Self, ValidationReport> {
        let report = validate_placement(&rows, replication);
        if report.is_valid() {
            Ok(Self { rows, replication })
        } else {
            Err(report)
        }
    }

    /// Wraps rows without validating. Needed to carry deliberately invalid
    /// matrices (e.g. a file loaded with validation disabled) into the
    /// delivery pipeline, which then reports its own failures.
    pub fn new_unchecked(rows: Vec<Vec<bool>>, replication: usize) -> Self {
        Self { rows, replication }
    }

    /// Packet count P.
    pub fn packets(&self) -> usize {
        self.rows.len()
    }

    /// User count K.
    pub fn users(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Caching ratio t the matrix was built for.
    pub fn replication(&self) -> usize {
        self.replication
    }

    /// Whether user `k` caches packet `p`.
    pub fn cached(&self, p: usize, k: usize) -> bool {
        self.rows[p][k]
    }

    pub fn row(&self, p: usize) -> &[bool] {
        &self.rows[p]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    /// Packets user `k` does not cache, ascending.
    pub fn missing_packets(&self, k: usize) -> Vec<usize> {
        (0..self.packets()).filter(|&p| !self.rows[p][k]).collect()
    }

    pub fn validation_report(&self) -> ValidationReport {
        validate_placement(&self.rows, self.replication)
    }
}

impl PlacementBlock {
    pub fn height(&self) -> usize {
        self.matrix.packets()
    }

    pub fn users(&self) -> usize {
        self.matrix.users()
    }

    pub fn as_matrix(&self) -> &PlacementMatrix {
        &self.matrix
    }

    /// Support of the block's first (lexicographically smallest) row.
    pub fn seed_support(&self) -> Vec<usize> {
        (0..self.users())
            .filter(|&k| self.matrix.cached(0, k))
            .collect()
    }
}

/// Checks the three validity conditions plus divisibility and reports every
/// violation found. Malformed input (ragged, empty) yields a shape
/// violation rather than an error.
pub fn validate_placement(rows: &[Vec<bool>], replication: usize) -> ValidationReport {
    let mut report = ValidationReport::default();

    if rows.is_empty() || rows[0].is_empty() {
        report.push(
            ValidationRule::Shape,
            None,
            "matrix must have at least one row and one column".into(),
        );
        return report;
    }
    let users = rows[0].len();
    if let Some((p, row)) = rows.iter().find_position(|r| r.len() != users) {
        report.push(
            ValidationRule::Shape,
            Some(p),
            format!(
                "row {} has {} entries, expected {}",
                p + 1,
                row.len(),
                users
            ),
        );
        return report;
    }

    let packets = rows.len();
    for (p, row) in rows.iter().enumerate() {
        let sum = row.iter().filter(|&&b| b).count();
        if sum != replication {
            report.push(
                ValidationRule::RowSum,
                Some(p),
                format!("row {} sums to {}, expected t = {}", p + 1, sum, replication),
            );
        }
    }

    if !(packets * replication).is_multiple_of(users) {
        report.push(
            ValidationRule::Divisibility,
            None,
            format!(
                "K = {} does not divide P*t = {}*{}",
                users, packets, replication
            ),
        );
    }
    // Compare K*colsum against P*t so the check stays exact even when the
    // target P*t/K is fractional.
    for k in 0..users {
        let sum = rows.iter().filter(|r| r[k]).count();
        if sum * users != packets * replication {
            report.push(
                ValidationRule::ColumnSum,
                Some(k),
                format!(
                    "column {} sums to {}, expected P*t/K = {}*{}/{}",
                    k + 1,
                    sum,
                    packets,
                    replication,
                    users
                ),
            );
        }
    }

    let mut seen: std::collections::BTreeMap<&[bool], Vec<usize>> = Default::default();
    for (p, row) in rows.iter().enumerate() {
        seen.entry(row.as_slice()).or_default().push(p);
    }
    for (row, indices) in seen {
        if indices.len() > 1 {
            report.push(
                ValidationRule::DuplicateRows,
                Some(indices[0]),
                format!(
                    "rows {} are identical ({})",
                    indices.iter().map(|p| (p + 1).to_string()).join(", "),
                    row_string(row)
                ),
            );
        }
    }

    report
}

fn row_string(row: &[bool]) -> String {
    row.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn rotate_right(row: &[bool]) -> Vec<bool> {
    let k = row.len();
    (0..k).map(|i| row[(i + k - 1) % k]).collect()
}

fn shift_orbit(seed: &[bool]) -> Vec<Vec<bool>> {
    let mut rows = vec![seed.to_vec()];
    loop {
        let next = rotate_right(rows.last().unwrap());
        if next == rows[0] {
            return rows;
        }
        rows.push(next);
    }
}

/// Builds the placement block containing `seed_row`: all distinct circular
/// shifts, listed in shift order starting from the lexicographically
/// smallest row of the orbit. The height is the orbit length, which always
/// divides K.
pub fn generate_block(seed_row: &[bool]) -> Result<PlacementBlock, PlacementError> {
    let weight = seed_row.iter().filter(|&&b| b).count();
    if weight == 0 {
        return Err(PlacementError::EmptySeedRow);
    }
    let orbit = shift_orbit(seed_row);
    let start = orbit.iter().min().cloned().unwrap();
    let rows = shift_orbit(&start);
    let matrix = PlacementMatrix::new(rows, weight)
        .expect("a circular-shift orbit always satisfies the validity conditions");
    Ok(PlacementBlock { matrix })
}

/// All placement blocks for weight-`weight` rows over `users` positions,
/// one per shift orbit, ordered by each orbit's lexicographically smallest
/// support. Every weight-t row appears in exactly one returned block.
pub fn enumerate_blocks(users: usize, weight: usize) -> Vec<PlacementBlock> {
    if weight == 0 || weight > users {
        return Vec::new();
    }
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut blocks = Vec::new();
    for support in (0..users).combinations(weight) {
        let mut row = vec![false; users];
        for k in support {
            row[k] = true;
        }
        if seen.contains(&row) {
            continue;
        }
        let block = generate_block(&row).expect("weight checked above");
        for r in block.as_matrix().rows() {
            seen.insert(r.clone());
        }
        blocks.push(block);
    }
    blocks
}

/// Stacks blocks into one placement matrix, in the order given. Fails if
/// dimensions disagree or any row appears in more than one block.
pub fn concat_blocks(blocks: &[PlacementBlock]) -> Result<PlacementMatrix, PlacementError> {
    let first = blocks.first().ok_or(PlacementError::NoBlocks)?;
    let users = first.users();
    let weight = first.as_matrix().replication();
    let mut rows: Vec<Vec<bool>> = Vec::new();
    let mut seen: BTreeSet<&[bool]> = BTreeSet::new();
    for block in blocks {
        if block.users() != users || block.as_matrix().replication() != weight {
            return Err(PlacementError::MixedBlocks(format!(
                "expected K={}, t={}, found K={}, t={}",
                users,
                weight,
                block.users(),
                block.as_matrix().replication()
            )));
        }
        for row in block.as_matrix().rows() {
            if !seen.insert(row.as_slice()) {
                return Err(PlacementError::DuplicateRowAcrossBlocks(row_string(row)));
            }
        }
    }
    for block in blocks {
        rows.extend(block.as_matrix().rows().iter().cloned());
    }
    PlacementMatrix::new(rows, weight).map_err(PlacementError::Invalid)
}

/// The canonical full placement with P = C(K, t): every weight-t row, in
/// lexicographic order of supports. Row p(T) for a t-subset T is cached
/// exactly by the users in T.
pub fn canonical_full(users: usize, weight: usize) -> PlacementMatrix {
    let rows: Vec<Vec<bool>> = (0..users)
        .combinations(weight)
        .map(|support| {
            let mut row = vec![false; users];
            for k in support {
                row[k] = true;
            }
            row
        })
        .collect();
    PlacementMatrix::new(rows, weight).expect("full combinatorial placement is valid")
}

/// The grouped placement with P = C(K/L, t/L): users are tiled into K/L
/// groups of L consecutive users sharing a cache column, over the full
/// placement of the reduced (K/L, t/L) network. Requires L | K and L | t.
pub fn canonical_grouped(
    users: usize,
    weight: usize,
    group: usize,
) -> Result<PlacementMatrix, PlacementError> {
    if group == 0 || !users.is_multiple_of(group) || !weight.is_multiple_of(group) {
        return Err(PlacementError::GroupDivisibility {
            users,
            weight,
            group,
        });
    }
    let base = canonical_full(users / group, weight / group);
    let rows: Vec<Vec<bool>> = base
        .rows()
        .iter()
        .map(|base_row| (0..users).map(|k| base_row[k / group]).collect())
        .collect();
    PlacementMatrix::new(rows, weight).map_err(PlacementError::Invalid)
}

/// Every packet count reachable by stacking a subset of the shift-orbit
/// blocks, found by exhaustive subset search.
pub fn achievable_packet_counts(users: usize, weight: usize) -> BTreeSet<usize> {
    let heights: Vec<usize> = enumerate_blocks(users, weight)
        .iter()
        .map(PlacementBlock::height)
        .collect();
    let mut counts = BTreeSet::new();
    for mask in 1_usize..(1 << heights.len()) {
        let total = heights
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, h)| h)
            .sum();
        counts.insert(total);
    }
    counts
}

/// Picks the default block subset for a requested packet count: the first
/// subset, scanning by subset size then lexicographic block indices, whose
/// heights sum to `packets`. Returns `None` when the count is unreachable.
pub fn select_blocks(users: usize, weight: usize, packets: usize) -> Option<Vec<PlacementBlock>> {
    let blocks = enumerate_blocks(users, weight);
    for size in 1..=blocks.len() {
        for indices in (0..blocks.len()).combinations(size) {
            let total: usize = indices.iter().map(|&i| blocks[i].height()).sum();
            if total == packets {
                return Some(indices.into_iter().map(|i| blocks[i].clone()).collect());
            }
        }
    }
    None
}

/// Default placement matrix for a requested packet count, via
/// [`select_blocks`].
pub fn placement_for_packet_count(
    users: usize,
    weight: usize,
    packets: usize,
) -> Option<PlacementMatrix> {
    let blocks = select_blocks(users, weight, packets)?;
    Some(concat_blocks(&blocks).expect("disjoint enumerated blocks always concatenate"))
}

/// C(K, t), the canonical full packet count, for reporting alongside the
/// flexible alternatives.
pub fn full_packet_count(users: usize, weight: usize) -> usize {
    binomial(users, weight)
}
