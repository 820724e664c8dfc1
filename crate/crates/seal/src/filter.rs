//! Candidate generation: the plain signature filter, its threshold-aware
//! refinement, the hybrid and hierarchical variants, and the two baselines.
//!
//! Every filter returns a superset of the true answer set; that is the
//! defining contract and the master property the test suites enforce. When a
//! query's pruning threshold is zero (tau = 0, an empty token set, or a
//! zero-area region), signatures have no pruning power at all: objects that
//! share nothing with the query may still qualify. The filters detect that
//! case and fall back to the full corpus rather than silently losing answers.

use std::collections::HashMap;

use crate::hss::HierarchicalIndex;
use crate::index::{probe, probe_hybrid, GridIndex, HybridIndex, TokenIndex};
use crate::model::{intersection_area, Corpus, Query};
use crate::signature::{
    grid_signature, select_prefix, textual_signature, threshold_slack, thresholds,
};

/// Deduplicated candidate ids plus probe statistics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateSet {
    /// Candidate object ids, ascending.
    pub ids: Vec<u64>,
    /// Inverted lists (or buckets) probed.
    pub lists_probed: u64,
    /// Posting entries read from probed lists.
    pub postings_scanned: u64,
    /// True when the filter had no pruning power and returned the corpus.
    pub full_scan: bool,
}

impl CandidateSet {
    fn from_ids(mut ids: Vec<u64>, lists_probed: u64, postings_scanned: u64) -> Self {
        ids.sort_unstable();
        ids.dedup();
        CandidateSet {
            ids,
            lists_probed,
            postings_scanned,
            full_scan: false,
        }
    }

    fn full_corpus(corpus: &Corpus) -> Self {
        let mut ids: Vec<u64> = corpus.objects().iter().map(|o| o.id).collect();
        ids.sort_unstable();
        CandidateSet {
            ids,
            lists_probed: 0,
            postings_scanned: 0,
            full_scan: true,
        }
    }
}

fn no_pruning_power(c: f64) -> bool {
    c <= threshold_slack(0.0)
}

/// Which signature kind a pure filter runs on.
#[derive(Debug, Clone, Copy)]
pub enum PureIndex<'a> {
    Token(&'a TokenIndex),
    Grid(&'a GridIndex),
}

/// Reference filter: probe the full list of every query signature element,
/// accumulate per-object signature similarity, keep objects reaching the
/// threshold. No prefixes, no bounds; exists as the baseline the pruned
/// filters are differentially tested against.
pub fn sig_filter(query: &Query, index: PureIndex, corpus: &Corpus) -> CandidateSet {
    let th = thresholds(query, corpus.tokens());
    let mut acc: HashMap<u64, f64> = HashMap::new();
    let mut lists = 0u64;
    let mut postings = 0u64;
    let c = match index {
        PureIndex::Token(_) => th.c_t,
        PureIndex::Grid(_) => th.c_r,
    };
    if no_pruning_power(c) {
        return CandidateSet::full_corpus(corpus);
    }
    match index {
        PureIndex::Token(idx) => {
            let sig = textual_signature(&query.tokens, corpus.tokens());
            for e in &sig.elements {
                let Some(list) = idx.lists.get(&e.id) else {
                    continue;
                };
                lists += 1;
                postings += list.len() as u64;
                for p in list {
                    // token weights coincide on both sides
                    *acc.entry(p.object).or_insert(0.0) += e.weight;
                }
            }
        }
        PureIndex::Grid(idx) => {
            let sig = grid_signature(&query.region, &idx.grid, &idx.order);
            for e in &sig.elements {
                let Some(list) = idx.lists.get(&e.id) else {
                    continue;
                };
                lists += 1;
                postings += list.len() as u64;
                let cell = idx.grid.cell_region(e.id);
                for p in list {
                    let obj = corpus.get(p.object).expect("indexed object in corpus");
                    let w_o = intersection_area(&cell, &obj.region);
                    *acc.entry(p.object).or_insert(0.0) += e.weight.min(w_o);
                }
            }
        }
    }
    let keep = c - threshold_slack(c);
    let ids = acc
        .into_iter()
        .filter_map(|(id, sim)| (sim >= keep).then_some(id))
        .collect();
    CandidateSet::from_ids(ids, lists, postings)
}

/// Threshold-aware filter: probe only the query's signature prefix, and in
/// each list retrieve only the postings whose stored bound still admits the
/// threshold. Membership alone makes a candidate.
pub fn sig_filter_plus(query: &Query, index: PureIndex, corpus: &Corpus) -> CandidateSet {
    let th = thresholds(query, corpus.tokens());
    let mut ids = Vec::new();
    let mut lists = 0u64;
    let mut postings = 0u64;
    match index {
        PureIndex::Token(idx) => {
            if no_pruning_power(th.c_t) {
                return CandidateSet::full_corpus(corpus);
            }
            let sig = textual_signature(&query.tokens, corpus.tokens());
            let p = select_prefix(&sig, th.c_t);
            for e in &sig.elements[..p] {
                let hits = probe(&idx.lists, e.id, th.c_t);
                lists += 1;
                postings += hits.len() as u64;
                ids.extend(hits.iter().map(|p| p.object));
            }
        }
        PureIndex::Grid(idx) => {
            if no_pruning_power(th.c_r) {
                return CandidateSet::full_corpus(corpus);
            }
            let sig = grid_signature(&query.region, &idx.grid, &idx.order);
            let p = select_prefix(&sig, th.c_r);
            for e in &sig.elements[..p] {
                let hits = probe(&idx.lists, e.id, th.c_r);
                lists += 1;
                postings += hits.len() as u64;
                ids.extend(hits.iter().map(|p| p.object));
            }
        }
    }
    CandidateSet::from_ids(ids, lists, postings)
}

/// Hybrid filter: probe the bucket of every (token, grid) pair drawn from the
/// two query prefixes, pruning on both bounds at once.
pub fn hybrid_filter_plus(query: &Query, index: &HybridIndex, corpus: &Corpus) -> CandidateSet {
    let th = thresholds(query, corpus.tokens());
    if no_pruning_power(th.c_t) || no_pruning_power(th.c_r) {
        return CandidateSet::full_corpus(corpus);
    }
    let t_sig = textual_signature(&query.tokens, corpus.tokens());
    let t_p = select_prefix(&t_sig, th.c_t);
    let r_sig = grid_signature(&query.region, &index.grid, &index.order);
    let r_p = select_prefix(&r_sig, th.c_r);
    let mut ids = Vec::new();
    let mut lists = 0u64;
    let mut postings = 0u64;
    for t in &t_sig.elements[..t_p] {
        for g in &r_sig.elements[..r_p] {
            let bucket = index.bucketer.bucket(t.id as u32, g.id);
            let hit = probe_hybrid(&index.lists, bucket, th.c_t, th.c_r);
            lists += 1;
            postings += hit.scanned;
            ids.extend(hit.objects);
        }
    }
    CandidateSet::from_ids(ids, lists, postings)
}

/// Hierarchical filter: for each prefix token, form the query's grid
/// signature over that token's stored grid set, select its spatial prefix,
/// and probe the (token, grid) buckets. Tokens without a stored grid set
/// (absent from the corpus) contribute nothing.
pub fn hierarchical_filter_plus(
    query: &Query,
    index: &HierarchicalIndex,
    corpus: &Corpus,
) -> CandidateSet {
    let th = thresholds(query, corpus.tokens());
    if no_pruning_power(th.c_t) || no_pruning_power(th.c_r) {
        return CandidateSet::full_corpus(corpus);
    }
    let t_sig = textual_signature(&query.tokens, corpus.tokens());
    let t_p = select_prefix(&t_sig, th.c_t);
    let mut ids = Vec::new();
    let mut lists = 0u64;
    let mut postings = 0u64;
    for t in &t_sig.elements[..t_p] {
        let Some(set) = index.token_grids.get(&(t.id as u32)) else {
            continue;
        };
        let q_sig = index.query_signature(set, &query.region);
        let r_p = select_prefix(&q_sig, th.c_r);
        for g in &q_sig.elements[..r_p] {
            let bucket = index.bucketer.bucket(t.id as u32, g.id);
            let hit = probe_hybrid(&index.lists, bucket, th.c_t, th.c_r);
            lists += 1;
            postings += hit.scanned;
            ids.extend(hit.objects);
        }
    }
    CandidateSet::from_ids(ids, lists, postings)
}

/// Keyword-first baseline: textual candidates from full inverted lists,
/// exact textual check, then exact spatial check.
pub fn keyword_first(query: &Query, index: &TokenIndex, corpus: &Corpus) -> BaselineRun {
    let th = thresholds(query, corpus.tokens());
    let mut set = if no_pruning_power(th.c_t) {
        CandidateSet::full_corpus(corpus)
    } else {
        let mut ids = Vec::new();
        let mut lists = 0u64;
        let mut postings = 0u64;
        for &t in &query.tokens {
            if let Some(list) = index.lists.get(&(t as u64)) {
                lists += 1;
                postings += list.len() as u64;
                ids.extend(list.iter().map(|p| p.object));
            }
        }
        CandidateSet::from_ids(ids, lists, postings)
    };
    // exact textual acceptance defines the candidate set of this method
    set.ids.retain(|&id| {
        let o = corpus.get(id).expect("indexed object in corpus");
        query.textual_similarity(o, corpus.tokens()) >= query.tau_t
    });
    BaselineRun { candidates: set }
}

/// Spatial-first baseline: grid candidates from full inverted lists, exact
/// spatial check, then exact textual check.
pub fn spatial_first(query: &Query, index: &GridIndex, corpus: &Corpus) -> BaselineRun {
    let th = thresholds(query, corpus.tokens());
    let mut set = if no_pruning_power(th.c_r) {
        CandidateSet::full_corpus(corpus)
    } else {
        let sig = grid_signature(&query.region, &index.grid, &index.order);
        let mut ids = Vec::new();
        let mut lists = 0u64;
        let mut postings = 0u64;
        for e in &sig.elements {
            if let Some(list) = index.lists.get(&e.id) {
                lists += 1;
                postings += list.len() as u64;
                ids.extend(list.iter().map(|p| p.object));
            }
        }
        CandidateSet::from_ids(ids, lists, postings)
    };
    set.ids.retain(|&id| {
        let o = corpus.get(id).expect("indexed object in corpus");
        query.spatial_similarity(o) >= query.tau_r
    });
    BaselineRun { candidates: set }
}

/// A baseline's candidate set after its exact first-dimension check; the
/// remaining dimension is verified by the engine.
#[derive(Debug, Clone)]
pub struct BaselineRun {
    pub candidates: CandidateSet,
}
