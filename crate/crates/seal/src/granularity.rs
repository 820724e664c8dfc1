//! Cost-model-driven selection of the uniform grid granularity.
//!
//! Levels of a grid tree partition the space into 2^l x 2^l cells. The
//! expected query cost of a level combines a filtering term (postings
//! retrieved, weighted by how likely each cell is to be probed) and a
//! verification term (candidates measured by actually running the grid
//! filter over a workload). Refinement stops when the benefit of the next
//! level drops below a configured floor.

use crate::error::{Result, SealError};
use crate::filter::{sig_filter_plus, PureIndex};
use crate::index::build_grid_index;
use crate::model::{intersection_area, Corpus, Query, Region};
use crate::signature::GridPartition;

/// Hierarchy of 2^l x 2^l uniform partitions of one space.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTree {
    pub space: Region,
    pub height: u32,
}

impl GridTree {
    pub fn new(space: Region, height: u32) -> Self {
        GridTree { space, height }
    }

    pub fn partition(&self, level: u32) -> Result<GridPartition> {
        if level > self.height {
            return Err(SealError::InvalidParameter(format!(
                "level {level} exceeds tree height {}",
                self.height
            )));
        }
        GridPartition::new(self.space, 1u32 << level)
    }
}

/// Per-posting and per-candidate cost constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub pi1: f64,
    pub pi2: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { pi1: 1.0, pi2: 10.0 }
    }
}

impl CostModel {
    pub fn new(pi1: f64, pi2: f64) -> Result<Self> {
        if pi1 <= 0.0 || pi2 <= 0.0 {
            return Err(SealError::InvalidParameter(
                "cost constants must be positive".into(),
            ));
        }
        Ok(CostModel { pi1, pi2 })
    }
}

/// Default refinement cap: level 13 is an 8192 x 8192 partition.
pub const DEFAULT_MAX_LEVEL: u32 = 13;

/// Fraction of workload queries whose region overlaps `cell` with positive
/// area.
pub fn grid_probability(cell: &Region, workload: &[Query]) -> f64 {
    if workload.is_empty() {
        return 0.0;
    }
    let hits = workload
        .iter()
        .filter(|q| intersection_area(cell, &q.region) > 0.0)
        .count();
    hits as f64 / workload.len() as f64
}

/// Cost of one level, split into its two terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelCost {
    pub level: u32,
    /// pi1 * sum over cells of P(g) * |I(g)|, with the worst-case assumption
    /// that a probe retrieves the full list.
    pub filter_term: f64,
    /// pi2 * mean candidate count of the grid filter over the workload.
    pub verify_term: f64,
    pub total: f64,
}

/// Expected query cost of the 2^level grid over a workload.
pub fn expected_cost(
    level: u32,
    workload: &[Query],
    corpus: &Corpus,
    model: &CostModel,
) -> Result<LevelCost> {
    if workload.is_empty() {
        return Err(SealError::InvalidParameter(
            "tuning requires a nonempty workload".into(),
        ));
    }
    let grid = GridPartition::new(corpus.space(), 1u32 << level)?;
    let index = build_grid_index(corpus, grid);

    // sum_g P(g) |I(g)| accumulated per query: each query contributes the
    // list lengths of the cells it overlaps, averaged over the workload
    let mut retrieved = 0u64;
    let mut candidates = 0u64;
    for q in workload {
        for (cell, _) in index.grid.cells_overlapping(&q.region) {
            if let Some(list) = index.lists.get(&cell) {
                retrieved += list.len() as u64;
            }
        }
        candidates += sig_filter_plus(q, PureIndex::Grid(&index), corpus).ids.len() as u64;
    }
    let n = workload.len() as f64;
    let filter_term = model.pi1 * retrieved as f64 / n;
    let verify_term = model.pi2 * candidates as f64 / n;
    Ok(LevelCost {
        level,
        filter_term,
        verify_term,
        total: filter_term + verify_term,
    })
}

/// One row of the tuning report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneRow {
    pub cost: LevelCost,
    /// Benefit of refining this level into the next, when evaluated.
    pub benefit: Option<f64>,
}

/// Outcome of the granularity walk: the chosen level and the cost table.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub level: u32,
    pub rows: Vec<TuneRow>,
}

/// Walk levels from 0 upward, refining while the benefit
/// `B(l, l+1) = cost(l) - cost(l+1)` stays at or above the floor. Returns the
/// first level whose refinement is not worth it, or the cap.
pub fn select_granularity(
    workload: &[Query],
    corpus: &Corpus,
    model: &CostModel,
    benefit_floor: f64,
    max_level: u32,
) -> Result<TuneResult> {
    if benefit_floor <= 0.0 {
        return Err(SealError::InvalidParameter(
            "benefit floor must be positive".into(),
        ));
    }
    if workload.is_empty() {
        return Err(SealError::InvalidParameter(
            "tuning requires a nonempty workload".into(),
        ));
    }
    let mut rows: Vec<TuneRow> = Vec::new();
    let mut current = expected_cost(0, workload, corpus, model)?;
    for level in 0..max_level {
        let next = expected_cost(level + 1, workload, corpus, model)?;
        let benefit = current.total - next.total;
        rows.push(TuneRow {
            cost: current,
            benefit: Some(benefit),
        });
        if benefit < benefit_floor {
            return Ok(TuneResult { level, rows });
        }
        current = next;
    }
    rows.push(TuneRow {
        cost: current,
        benefit: None,
    });
    Ok(TuneResult {
        level: max_level,
        rows,
    })
}
