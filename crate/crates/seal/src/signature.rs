//! Signature generation: textual signatures, uniform-grid spatial signatures,
//! their global orders, prefixes, and suffix bounds.
//!
//! A signature stands in for an object so that object similarity implies
//! signature similarity. Both kinds share one mechanism: elements carry
//! positive weights, are sorted by a fixed global order, and a prefix is
//! chosen so the omitted suffix weighs strictly less than the pruning
//! threshold. Suffix sums double as the per-posting threshold bounds stored
//! in the inverted indexes.

use std::collections::HashMap;

use crate::error::{Result, SealError};
use crate::model::{intersection_area, Corpus, Query, Region, TokenTable};

/// Comparison slack for threshold tests in the filtering path. Pruning only
/// happens when a value is clearly below the threshold, so rounding in
/// weight sums can admit extra candidates but never lose a true answer.
pub fn threshold_slack(c: f64) -> f64 {
    1e-9 + 1e-12 * c.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Token,
    Grid,
}

impl ElementKind {
    pub fn name(&self) -> &'static str {
        match self {
            ElementKind::Token => "token",
            ElementKind::Grid => "grid",
        }
    }
}

/// One signature element: a token id or grid cell id with a positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignatureElement {
    pub id: u64,
    pub weight: f64,
}

/// Elements sorted by the kind's global order.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSignature {
    pub kind: ElementKind,
    pub elements: Vec<SignatureElement>,
}

impl OrderedSignature {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        // summed back-to-front so it matches suffix_bounds[0] bit for bit
        self.elements.iter().rev().map(|e| e.weight).sum()
    }
}

/// Uniform p x p partition of a space MBR. Cell id = row * p + col,
/// rows indexed by y and columns by x. Cells tile the space and are
/// pairwise disjoint; shared edges do not count as overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPartition {
    pub space: Region,
    pub p: u32,
}

impl GridPartition {
    pub fn new(space: Region, p: u32) -> Result<Self> {
        if p == 0 {
            return Err(SealError::InvalidParameter(
                "grid granularity must be positive".into(),
            ));
        }
        Ok(GridPartition { space, p })
    }

    /// Partition covering the MBR of all corpus regions.
    pub fn over_corpus(corpus: &Corpus, p: u32) -> Result<Self> {
        Self::new(corpus.space(), p)
    }

    pub fn cell_count(&self) -> u64 {
        self.p as u64 * self.p as u64
    }

    pub fn cell_width(&self) -> f64 {
        (self.space.xmax - self.space.xmin) / self.p as f64
    }

    pub fn cell_height(&self) -> f64 {
        (self.space.ymax - self.space.ymin) / self.p as f64
    }

    pub fn cell_region(&self, cell: u64) -> Region {
        let p = self.p as u64;
        debug_assert!(cell < p * p);
        let row = (cell / p) as f64;
        let col = (cell % p) as f64;
        let w = self.cell_width();
        let h = self.cell_height();
        Region {
            xmin: self.space.xmin + col * w,
            ymin: self.space.ymin + row * h,
            xmax: self.space.xmin + (col + 1.0) * w,
            ymax: self.space.ymin + (row + 1.0) * h,
        }
    }

    /// Cells overlapping `r` with positive area, with the overlap areas.
    /// The input is clipped to the space first.
    pub fn cells_overlapping(&self, r: &Region) -> Vec<(u64, f64)> {
        let clipped = match r.clip(&self.space) {
            Some(c) => c,
            None => return Vec::new(),
        };
        let w = self.cell_width();
        let h = self.cell_height();
        if w <= 0.0 || h <= 0.0 {
            return Vec::new();
        }
        let p = self.p as i64;
        let col_lo = (((clipped.xmin - self.space.xmin) / w).floor() as i64).clamp(0, p - 1);
        let col_hi = (((clipped.xmax - self.space.xmin) / w).ceil() as i64).clamp(0, p - 1);
        let row_lo = (((clipped.ymin - self.space.ymin) / h).floor() as i64).clamp(0, p - 1);
        let row_hi = (((clipped.ymax - self.space.ymin) / h).ceil() as i64).clamp(0, p - 1);
        let mut out = Vec::new();
        for row in row_lo..=row_hi {
            for col in col_lo..=col_hi {
                let cell = (row * p + col) as u64;
                let area = intersection_area(&self.cell_region(cell), &clipped);
                if area > 0.0 {
                    out.push((cell, area));
                }
            }
        }
        out
    }
}

/// Global order over grid cells: ascending by the number of corpus regions
/// intersecting the cell, ties broken by ascending cell id. Cells no object
/// touches have count 0 and sort first; they only ever appear on the query
/// side and are harmless there.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridOrder {
    counts: HashMap<u64, u32>,
}

impl GridOrder {
    pub fn build(corpus: &Corpus, grid: &GridPartition) -> Self {
        let mut counts: HashMap<u64, u32> = HashMap::new();
        for o in corpus.objects() {
            for (cell, _) in grid.cells_overlapping(&o.region) {
                *counts.entry(cell).or_insert(0) += 1;
            }
        }
        GridOrder { counts }
    }

    /// Rebuild the order from posting-list lengths: `count(g)` equals the
    /// number of objects in `I(g)`, so a loaded index carries its own order.
    pub fn from_list_lengths<I: IntoIterator<Item = (u64, u32)>>(lengths: I) -> Self {
        GridOrder {
            counts: lengths.into_iter().collect(),
        }
    }

    pub fn count(&self, cell: u64) -> u32 {
        self.counts.get(&cell).copied().unwrap_or(0)
    }

    /// Nonzero cell counts, ascending by cell id (serialization order).
    pub fn entries(&self) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = self
            .counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&g, &c)| (g, c))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn sort_key(&self, cell: u64) -> (u32, u64) {
        (self.count(cell), cell)
    }

    /// Ranks over an explicit cell universe (small grids only, used by tests):
    /// a permutation ascending with `count(g)`, ties by cell id.
    pub fn ranks(&self, cell_count: u64) -> Vec<u64> {
        let mut cells: Vec<u64> = (0..cell_count).collect();
        cells.sort_by_key(|&c| self.sort_key(c));
        let mut ranks = vec![0u64; cell_count as usize];
        for (rank, cell) in cells.into_iter().enumerate() {
            ranks[cell as usize] = rank as u64;
        }
        ranks
    }
}

/// Textual signature: the token set with idf weights, sorted by descending
/// idf, ties by ascending token id. Zero-weight tokens are dropped.
pub fn textual_signature<'a, I>(tokens: I, table: &TokenTable) -> OrderedSignature
where
    I: IntoIterator<Item = &'a u32>,
{
    let mut elements: Vec<SignatureElement> = tokens
        .into_iter()
        .map(|&t| SignatureElement {
            id: t as u64,
            weight: table.weight(t),
        })
        .filter(|e| e.weight > 0.0)
        .collect();
    elements.sort_by(|a, b| {
        b.weight
            .partial_cmp(&a.weight)
            .unwrap()
            .then(a.id.cmp(&b.id))
    });
    OrderedSignature {
        kind: ElementKind::Token,
        elements,
    }
}

/// Grid signature: cells overlapping the region with positive area, weighted
/// by the overlap area and sorted by the global grid order.
pub fn grid_signature(r: &Region, grid: &GridPartition, order: &GridOrder) -> OrderedSignature {
    let mut elements: Vec<SignatureElement> = grid
        .cells_overlapping(r)
        .into_iter()
        .map(|(cell, area)| SignatureElement {
            id: cell,
            weight: area,
        })
        .collect();
    elements.sort_by_key(|e| order.sort_key(e.id));
    OrderedSignature {
        kind: ElementKind::Grid,
        elements,
    }
}

/// Suffix weight sums: `bounds[i]` is the total weight from position `i`
/// to the end, so the sequence is non-increasing and `bounds[0]` equals the
/// signature's total weight.
pub fn suffix_bounds(sig: &OrderedSignature) -> Vec<f64> {
    let mut bounds = vec![0.0; sig.elements.len()];
    let mut acc = 0.0;
    for (i, e) in sig.elements.iter().enumerate().rev() {
        acc += e.weight;
        bounds[i] = acc;
    }
    bounds
}

/// Smallest prefix length `p` such that the suffix weight after position `p`
/// is strictly below `c`. `p = 0` means the whole signature can be skipped;
/// `c = 0` forces the full signature.
pub fn select_prefix(sig: &OrderedSignature, c: f64) -> usize {
    let c_eff = c - threshold_slack(c);
    if 0.0 >= c_eff {
        // c = 0 within slack: no suffix is strictly below it, keep everything
        return sig.elements.len();
    }
    // suffix sums grow monotonically walking backward, so shrink the prefix
    // while the dropped tail stays below the threshold
    let mut tail = 0.0;
    let mut p = sig.elements.len();
    for e in sig.elements.iter().rev() {
        let next = tail + e.weight;
        if next < c_eff {
            tail = next;
            p -= 1;
        } else {
            break;
        }
    }
    p
}

/// Signature similarity: sum over common elements of the smaller weight.
/// For token signatures both sides carry identical idf weights, so this is
/// the shared-token weight sum.
pub fn signature_similarity(a: &OrderedSignature, b: &OrderedSignature) -> Result<f64> {
    if a.kind != b.kind {
        return Err(SealError::KindMismatch {
            expected: a.kind.name(),
            found: b.kind.name(),
        });
    }
    let weights_a: HashMap<u64, f64> = a.elements.iter().map(|e| (e.id, e.weight)).collect();
    let mut sim = 0.0;
    for e in &b.elements {
        if let Some(&wa) = weights_a.get(&e.id) {
            sim += wa.min(e.weight);
        }
    }
    Ok(sim)
}

/// Pruning thresholds for a query: `c_T` scales the query's total token
/// weight, `c_R` scales the unclipped query area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub c_t: f64,
    pub c_r: f64,
}

pub fn thresholds(query: &Query, table: &TokenTable) -> Thresholds {
    Thresholds {
        c_t: query.tau_t * query.token_weight_total(table),
        c_r: query.tau_r * query.region.area(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{fixture_corpus, fixture_query, fixture_space, region};

    fn fixture_grid() -> GridPartition {
        GridPartition::new(fixture_space(), 2).unwrap()
    }

    #[test]
    fn textual_signature_fixture_order() {
        let corpus = fixture_corpus();
        let q = fixture_query(&corpus);
        let sig = textual_signature(&q.tokens, corpus.tokens());
        let ids: Vec<u64> = sig.elements.iter().map(|e| e.id).collect();
        // t3 (ln 3) first, then t1 and t2 (ln 1.5 each, tie by id)
        assert_eq!(ids, vec![2, 0, 1]);
    }

    #[test]
    fn textual_signature_single_and_tie() {
        let corpus = fixture_corpus();
        let one = [2u32];
        let sig = textual_signature(&one, corpus.tokens());
        assert_eq!(sig.len(), 1);
        assert_eq!(select_prefix(&sig, sig.elements[0].weight), 1);

        // equal idf: ascending token id breaks the tie
        let two = [1u32, 0u32];
        let sig = textual_signature(&two, corpus.tokens());
        let ids: Vec<u64> = sig.elements.iter().map(|e| e.id).collect();
        assert_eq!(ids, vec![0, 1]);
    }

    #[test]
    fn empty_token_set_gives_empty_signature() {
        let corpus = fixture_corpus();
        let none: [u32; 0] = [];
        assert!(textual_signature(&none, corpus.tokens()).is_empty());
    }

    #[test]
    fn grid_signature_object_b() {
        let corpus = fixture_corpus();
        let grid = fixture_grid();
        let order = GridOrder::build(&corpus, &grid);
        // counts: cell0=2 (o1,o2), cell1=1 (o2), cell2=1 (o2), cell3=2 (o2,o3)
        assert_eq!(order.ranks(4), vec![2, 0, 1, 3]);
        let sig = grid_signature(&corpus.get(2).unwrap().region, &grid, &order);
        let got: Vec<(u64, f64)> = sig.elements.iter().map(|e| (e.id, e.weight)).collect();
        assert_eq!(got, vec![(1, 300.0), (2, 300.0), (0, 900.0), (3, 100.0)]);
    }

    #[test]
    fn grid_signature_single_cell_cases() {
        let corpus = fixture_corpus();
        let grid = fixture_grid();
        let order = GridOrder::build(&corpus, &grid);
        // a region equal to one cell: single element weighing the cell area
        let sig = grid_signature(&grid.cell_region(3), &grid, &order);
        assert_eq!(sig.len(), 1);
        assert_eq!(sig.elements[0].id, 3);
        assert_eq!(sig.elements[0].weight, 2500.0);
        // the fixture query touches cell edges at x=50 and y=50: one cell only
        let sig = grid_signature(&region(10.0, 10.0, 50.0, 50.0), &grid, &order);
        let got: Vec<(u64, f64)> = sig.elements.iter().map(|e| (e.id, e.weight)).collect();
        assert_eq!(got, vec![(0, 1600.0)]);
    }

    #[test]
    fn grid_signature_outside_space_is_empty() {
        let corpus = fixture_corpus();
        let grid = fixture_grid();
        let order = GridOrder::build(&corpus, &grid);
        let sig = grid_signature(&region(200.0, 200.0, 300.0, 300.0), &grid, &order);
        assert!(sig.is_empty());
    }

    #[test]
    fn grid_signature_clips_oversized_query() {
        let corpus = fixture_corpus();
        let grid = fixture_grid();
        let order = GridOrder::build(&corpus, &grid);
        let sig = grid_signature(&region(-50.0, -50.0, 150.0, 150.0), &grid, &order);
        assert_eq!(sig.len(), 4);
        assert!((sig.total_weight() - 10000.0).abs() < 1e-9);
    }

    #[test]
    fn select_prefix_fixture() {
        let corpus = fixture_corpus();
        let q = fixture_query(&corpus);
        let sig = textual_signature(&q.tokens, corpus.tokens());
        let th = thresholds(&q, corpus.tokens());
        assert!((th.c_t - 0.5729).abs() < 1e-4);
        let p = select_prefix(&sig, th.c_t);
        assert_eq!(p, 2);
        let prefix: Vec<u64> = sig.elements[..p].iter().map(|e| e.id).collect();
        assert_eq!(prefix, vec![2, 0]);
    }

    #[test]
    fn select_prefix_boundaries() {
        let corpus = fixture_corpus();
        let q = fixture_query(&corpus);
        let sig = textual_signature(&q.tokens, corpus.tokens());
        // c = 0: the suffix can never be strictly below zero
        assert_eq!(select_prefix(&sig, 0.0), sig.len());
        // c above the total weight: the object can be skipped entirely
        assert_eq!(select_prefix(&sig, sig.total_weight() + 1.0), 0);
    }

    #[test]
    fn suffix_bounds_fixture() {
        let corpus = fixture_corpus();
        let ob = corpus.get(2).unwrap();
        let sig = textual_signature(&ob.tokens, corpus.tokens());
        let bounds = suffix_bounds(&sig);
        assert!((bounds[0] - 1.9096).abs() < 1e-4);
        assert!((bounds[1] - 0.8109).abs() < 1e-4);
        assert!((bounds[2] - 0.4055).abs() < 1e-4);
        assert!(bounds.windows(2).all(|w| w[0] >= w[1]));
        assert!((bounds[0] - sig.total_weight()).abs() < 1e-12);
    }

    #[test]
    fn suffix_bounds_single_element() {
        let corpus = fixture_corpus();
        let one = [2u32];
        let sig = textual_signature(&one, corpus.tokens());
        assert_eq!(suffix_bounds(&sig), vec![3f64.ln()]);
    }

    #[test]
    fn signature_similarity_grid_fixture() {
        let corpus = fixture_corpus();
        let grid = fixture_grid();
        let order = GridOrder::build(&corpus, &grid);
        let q_sig = grid_signature(&region(10.0, 10.0, 50.0, 50.0), &grid, &order);
        let b_sig = grid_signature(&corpus.get(2).unwrap().region, &grid, &order);
        assert_eq!(signature_similarity(&q_sig, &b_sig).unwrap(), 900.0);
    }

    #[test]
    fn signature_similarity_disjoint_and_mismatch() {
        let corpus = fixture_corpus();
        let a = textual_signature(&[0u32], corpus.tokens());
        let b = textual_signature(&[2u32], corpus.tokens());
        assert_eq!(signature_similarity(&a, &b).unwrap(), 0.0);

        let grid = fixture_grid();
        let order = GridOrder::build(&corpus, &grid);
        let g = grid_signature(&fixture_space(), &grid, &order);
        assert!(matches!(
            signature_similarity(&a, &g),
            Err(SealError::KindMismatch { .. })
        ));
    }

    #[test]
    fn thresholds_fixture_values() {
        let corpus = fixture_corpus();
        let q = fixture_query(&corpus);
        let th = thresholds(&q, corpus.tokens());
        assert!((th.c_t - 0.3 * (2.0 * 1.5f64.ln() + 3f64.ln())).abs() < 1e-12);
        assert_eq!(th.c_r, 400.0);
    }

    #[test]
    fn partition_tiles_space() {
        for p in [1u32, 2, 3, 5, 8] {
            let grid = GridPartition::new(fixture_space(), p).unwrap();
            let total: f64 = (0..grid.cell_count())
                .map(|c| grid.cell_region(c).area())
                .sum();
            assert!((total - grid.space.area()).abs() < 1e-6);
            // pairwise disjoint (positive-area overlap)
            for a in 0..grid.cell_count() {
                for b in (a + 1)..grid.cell_count() {
                    let overlap =
                        intersection_area(&grid.cell_region(a), &grid.cell_region(b));
                    assert_eq!(overlap, 0.0, "cells {a} and {b} overlap at p={p}");
                }
            }
        }
    }

    #[test]
    fn zero_area_space_yields_no_cells() {
        let grid = GridPartition::new(region(5.0, 5.0, 5.0, 5.0), 4).unwrap();
        assert!(grid.cells_overlapping(&region(0.0, 0.0, 10.0, 10.0)).is_empty());
    }
}
