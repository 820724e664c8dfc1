//! Inverted indexes over signature elements, with per-posting threshold
//! bounds and hash-based hybrid bucketing.
//!
//! A posting stores an object id together with the suffix-weight bound of the
//! element in that object's ordered signature. Lists are sorted descending by
//! bound, so a probe with threshold `c` scans a prefix and stops at the first
//! posting that can no longer satisfy it.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Result, SealError};
use crate::model::Corpus;
use crate::signature::{
    grid_signature, suffix_bounds, textual_signature, threshold_slack, GridOrder, GridPartition,
};

/// Posting with a single threshold bound (token or grid index).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posting {
    pub object: u64,
    pub bound: f64,
}

/// Posting carrying both textual and spatial bounds (hybrid indexes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridPosting {
    pub object: u64,
    pub bound_t: f64,
    pub bound_r: f64,
}

/// Mixing constants for the hashed bucketer (splitmix64 finalizer). These are
/// part of the index file format: indexes are portable across platforms.
pub const MIX_CONST_1: u64 = 0xbf58_476d_1ce4_e5b9;
pub const MIX_CONST_2: u64 = 0x94d0_49bb_1331_11eb;

/// Default bucket count for hashed hybrid indexes.
pub const DEFAULT_BUCKETS: u64 = 1 << 20;

fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(MIX_CONST_1);
    x ^= x >> 27;
    x = x.wrapping_mul(MIX_CONST_2);
    x ^= x >> 31;
    x
}

/// Deterministic mapping of a (token, grid) pair to a bucket id.
///
/// The pair is packed into one u64 (token in the high half). Injective mode
/// uses the packed pair itself as the bucket id and exists for testing;
/// hashed mode mixes the pair and reduces modulo the bucket count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bucketer {
    Injective,
    Hashed { buckets: u64 },
}

impl Bucketer {
    pub fn hashed(buckets: u64) -> Result<Self> {
        if buckets == 0 {
            return Err(SealError::InvalidParameter(
                "bucket count must be positive".into(),
            ));
        }
        Ok(Bucketer::Hashed { buckets })
    }

    pub fn bucket(&self, token: u32, grid: u64) -> u64 {
        debug_assert!(grid < (1 << 32), "grid element id must fit in 32 bits");
        let pair = ((token as u64) << 32) | grid;
        match self {
            Bucketer::Injective => pair,
            Bucketer::Hashed { buckets } => mix64(pair) % buckets,
        }
    }
}

/// Inverted index over textual signatures: token id -> postings with the
/// token's textual suffix bound.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TokenIndex {
    pub lists: BTreeMap<u64, Vec<Posting>>,
}

/// Inverted index over grid signatures: cell id -> postings with the cell's
/// spatial suffix bound. Carries its partition and the global grid order;
/// the order is recoverable from list lengths since `count(g) = |I(g)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridIndex {
    pub grid: GridPartition,
    pub order: GridOrder,
    pub lists: BTreeMap<u64, Vec<Posting>>,
}

/// Inverted index over hashed (token, grid) buckets; postings carry both
/// bounds and are sorted by descending `bound_t`, then descending `bound_r`,
/// then ascending object id. The grid order cannot be recovered from
/// bucketed lists, so it travels with the index (and in its file format).
#[derive(Debug, Clone, PartialEq)]
pub struct HybridIndex {
    pub grid: GridPartition,
    pub order: GridOrder,
    pub bucketer: Bucketer,
    pub lists: BTreeMap<u64, Vec<HybridPosting>>,
}

impl GridIndex {
    pub fn from_lists(grid: GridPartition, lists: BTreeMap<u64, Vec<Posting>>) -> Self {
        let order =
            GridOrder::from_list_lengths(lists.iter().map(|(&g, l)| (g, l.len() as u32)));
        GridIndex { grid, order, lists }
    }
}

fn sort_posting_list(list: &mut [Posting]) {
    list.sort_by(|a, b| {
        b.bound
            .partial_cmp(&a.bound)
            .unwrap()
            .then(a.object.cmp(&b.object))
    });
}

fn sort_hybrid_list(list: &mut [HybridPosting]) {
    list.sort_by(|a, b| {
        b.bound_t
            .partial_cmp(&a.bound_t)
            .unwrap()
            .then(b.bound_r.partial_cmp(&a.bound_r).unwrap())
            .then(a.object.cmp(&b.object))
    });
}

/// Build the token index: one posting per (token, object), bound = the
/// token's suffix weight in the object's textual signature.
pub fn build_token_index(corpus: &Corpus) -> TokenIndex {
    let mut lists: BTreeMap<u64, Vec<Posting>> = BTreeMap::new();
    for o in corpus.objects() {
        let sig = textual_signature(&o.tokens, corpus.tokens());
        let bounds = suffix_bounds(&sig);
        for (e, &bound) in sig.elements.iter().zip(&bounds) {
            lists.entry(e.id).or_default().push(Posting {
                object: o.id,
                bound,
            });
        }
    }
    for list in lists.values_mut() {
        sort_posting_list(list);
    }
    TokenIndex { lists }
}

/// Build the grid index over the given partition.
pub fn build_grid_index(corpus: &Corpus, grid: GridPartition) -> GridIndex {
    let order = GridOrder::build(corpus, &grid);
    let mut lists: BTreeMap<u64, Vec<Posting>> = BTreeMap::new();
    for o in corpus.objects() {
        let sig = grid_signature(&o.region, &grid, &order);
        let bounds = suffix_bounds(&sig);
        for (e, &bound) in sig.elements.iter().zip(&bounds) {
            lists.entry(e.id).or_default().push(Posting {
                object: o.id,
                bound,
            });
        }
    }
    for list in lists.values_mut() {
        sort_posting_list(list);
    }
    GridIndex { grid, order, lists }
}

/// Merge a (bucket, object) contribution, keeping the per-dimension maximum
/// of the bounds. Colliding pairs of one object must merge conservatively or
/// completeness breaks.
pub(crate) fn merge_hybrid_posting(
    acc: &mut HashMap<(u64, u64), (f64, f64)>,
    bucket: u64,
    object: u64,
    bound_t: f64,
    bound_r: f64,
) {
    let entry = acc.entry((bucket, object)).or_insert((bound_t, bound_r));
    entry.0 = entry.0.max(bound_t);
    entry.1 = entry.1.max(bound_r);
}

pub(crate) fn collect_hybrid_lists(
    acc: HashMap<(u64, u64), (f64, f64)>,
) -> BTreeMap<u64, Vec<HybridPosting>> {
    let mut lists: BTreeMap<u64, Vec<HybridPosting>> = BTreeMap::new();
    for ((bucket, object), (bound_t, bound_r)) in acc {
        lists.entry(bucket).or_default().push(HybridPosting {
            object,
            bound_t,
            bound_r,
        });
    }
    for list in lists.values_mut() {
        sort_hybrid_list(list);
    }
    lists
}

/// Build the hash-based hybrid index: every (token, grid) pair of an object
/// produces a posting in the pair's bucket, carrying the token's textual
/// bound and the cell's spatial bound.
pub fn build_hybrid_index(corpus: &Corpus, grid: GridPartition, bucketer: Bucketer) -> HybridIndex {
    let order = GridOrder::build(corpus, &grid);
    let mut acc: HashMap<(u64, u64), (f64, f64)> = HashMap::new();
    for o in corpus.objects() {
        let t_sig = textual_signature(&o.tokens, corpus.tokens());
        let t_bounds = suffix_bounds(&t_sig);
        let r_sig = grid_signature(&o.region, &grid, &order);
        let r_bounds = suffix_bounds(&r_sig);
        for (t, &bt) in t_sig.elements.iter().zip(&t_bounds) {
            for (g, &br) in r_sig.elements.iter().zip(&r_bounds) {
                let bucket = bucketer.bucket(t.id as u32, g.id);
                merge_hybrid_posting(&mut acc, bucket, o.id, bt, br);
            }
        }
    }
    HybridIndex {
        grid,
        order,
        bucketer,
        lists: collect_hybrid_lists(acc),
    }
}

/// Bound-aware probe: the prefix of the descending-sorted list whose bounds
/// are still >= `c`. An unknown element yields an empty slice.
pub fn probe(lists: &BTreeMap<u64, Vec<Posting>>, element: u64, c: f64) -> &[Posting] {
    let Some(list) = lists.get(&element) else {
        return &[];
    };
    let keep = c - threshold_slack(c);
    let end = list.partition_point(|p| p.bound >= keep);
    &list[..end]
}

/// Result of a hybrid probe: qualifying object ids plus the number of
/// postings retrieved from the scanned prefix.
#[derive(Debug, Default, Clone)]
pub struct HybridProbe {
    pub objects: Vec<u64>,
    pub scanned: u64,
}

/// Probe a hybrid bucket with both thresholds: early-stop on the primary
/// sort key `bound_t`, then filter the prefix on `bound_r`.
pub fn probe_hybrid(
    lists: &BTreeMap<u64, Vec<HybridPosting>>,
    bucket: u64,
    c_t: f64,
    c_r: f64,
) -> HybridProbe {
    let Some(list) = lists.get(&bucket) else {
        return HybridProbe::default();
    };
    let keep_t = c_t - threshold_slack(c_t);
    let keep_r = c_r - threshold_slack(c_r);
    let end = list.partition_point(|p| p.bound_t >= keep_t);
    let objects = list[..end]
        .iter()
        .filter(|p| p.bound_r >= keep_r)
        .map(|p| p.object)
        .collect();
    HybridProbe {
        objects,
        scanned: end as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Region;
    use crate::signature::thresholds;
    use crate::testutil::{fixture_corpus, fixture_query, fixture_space};

    fn fixture_grid() -> GridPartition {
        GridPartition::new(fixture_space(), 2).unwrap()
    }

    #[test]
    fn token_index_fixture_lists() {
        let corpus = fixture_corpus();
        let idx = build_token_index(&corpus);
        // t3 occurs only in object 2, heading its signature
        let t3 = &idx.lists[&2];
        assert_eq!(t3.len(), 1);
        assert_eq!(t3[0].object, 2);
        assert!((t3[0].bound - 1.9096).abs() < 1e-4);
        // t1 occurs in objects 1 and 2 with equal suffix bounds; the tie
        // breaks by ascending object id
        let t1 = &idx.lists[&0];
        assert_eq!(t1.len(), 2);
        assert_eq!((t1[0].object, t1[1].object), (1, 2));
        assert!((t1[0].bound - 0.8109).abs() < 1e-4);
        assert!((t1[1].bound - 0.8109).abs() < 1e-4);
    }

    #[test]
    fn empty_corpus_builds_empty_index() {
        let corpus = Corpus::from_records(Vec::<(u64, Region, Vec<&str>)>::new()).unwrap();
        assert!(build_token_index(&corpus).lists.is_empty());
    }

    #[test]
    fn grid_index_fixture_lists() {
        let corpus = fixture_corpus();
        let idx = build_grid_index(&corpus, fixture_grid());
        // cell0 holds objects 1 and 2; object 1 covers only that cell so its
        // bound is its full area, object 2 reaches cell0 at rank 3 of its
        // order [cell1, cell2, cell0, cell3] giving bound 900 + 100
        let cell0 = &idx.lists[&0];
        assert_eq!(cell0.len(), 2);
        assert_eq!(cell0[0], Posting { object: 1, bound: 1600.0 });
        assert_eq!(cell0[1], Posting { object: 2, bound: 1000.0 });
        // an object covering exactly one cell: bound = its area
        let cell3 = &idx.lists[&3];
        assert!(cell3.contains(&Posting { object: 3, bound: 1600.0 }));
    }

    #[test]
    fn lists_are_sorted_descending() {
        let corpus = fixture_corpus();
        let idx = build_grid_index(&corpus, fixture_grid());
        for list in idx.lists.values() {
            assert!(list.windows(2).all(|w| w[0].bound >= w[1].bound));
        }
    }

    #[test]
    fn probe_early_stops_at_first_under_bound_posting() {
        // list with bounds [900, 550]; threshold 600 retrieves only the first
        let mut lists = BTreeMap::new();
        lists.insert(
            14u64,
            vec![
                Posting { object: 1, bound: 900.0 },
                Posting { object: 2, bound: 550.0 },
            ],
        );
        let hits = probe(&lists, 14, 600.0);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].object, 1);
    }

    #[test]
    fn probe_boundaries() {
        let corpus = fixture_corpus();
        let idx = build_grid_index(&corpus, fixture_grid());
        assert_eq!(probe(&idx.lists, 0, 0.0).len(), 2);
        assert!(probe(&idx.lists, 0, 1e9).is_empty());
        assert!(probe(&idx.lists, 999, 1.0).is_empty());
    }

    #[test]
    fn hybrid_injective_fixture_bucket() {
        let corpus = fixture_corpus();
        let idx = build_hybrid_index(&corpus, fixture_grid(), Bucketer::Injective);
        // bucket (t3=2, cell0): only object 2, textual bound = its total
        // token weight, spatial bound = cell0's suffix bound in its order
        let bucket = Bucketer::Injective.bucket(2, 0);
        let list = &idx.lists[&bucket];
        assert_eq!(list.len(), 1);
        assert_eq!(list[0].object, 2);
        assert!((list[0].bound_t - 1.9096).abs() < 1e-4);
        assert!((list[0].bound_r - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn hybrid_single_bucket_collapses_to_totals() {
        let corpus = fixture_corpus();
        let idx = build_hybrid_index(
            &corpus,
            fixture_grid(),
            Bucketer::hashed(1).unwrap(),
        );
        assert_eq!(idx.lists.len(), 1);
        let list = &idx.lists[&0];
        assert_eq!(list.len(), 3);
        for p in list {
            let o = corpus.get(p.object).unwrap();
            let t_sig = textual_signature(&o.tokens, corpus.tokens());
            let r_sig = grid_signature(&o.region, &idx.grid, &idx.order);
            assert!((p.bound_t - t_sig.total_weight()).abs() < 1e-9);
            assert!((p.bound_r - r_sig.total_weight()).abs() < 1e-9);
        }
    }

    #[test]
    fn hybrid_skips_tokenless_objects() {
        let corpus = Corpus::from_records(vec![
            (1, Region::new(0.0, 0.0, 10.0, 10.0).unwrap(), vec!["a"]),
            (2, Region::new(5.0, 5.0, 15.0, 15.0).unwrap(), Vec::<&str>::new()),
        ])
        .unwrap();
        let grid = GridPartition::over_corpus(&corpus, 2).unwrap();
        let idx = build_hybrid_index(&corpus, grid, Bucketer::Injective);
        assert!(idx
            .lists
            .values()
            .flatten()
            .all(|p| p.object != 2));
    }

    #[test]
    fn hybrid_merge_is_conservative() {
        // with a single bucket every pair of an object collides; the stored
        // bounds must dominate each contributing pair's bounds
        let corpus = fixture_corpus();
        let injective = build_hybrid_index(&corpus, fixture_grid(), Bucketer::Injective);
        let merged = build_hybrid_index(&corpus, fixture_grid(), Bucketer::hashed(1).unwrap());
        for list in injective.lists.values() {
            for p in list {
                let m = merged.lists[&0]
                    .iter()
                    .find(|mp| mp.object == p.object)
                    .unwrap();
                assert!(m.bound_t >= p.bound_t - 1e-12);
                assert!(m.bound_r >= p.bound_r - 1e-12);
            }
        }
    }

    #[test]
    fn probe_hybrid_fixture() {
        let corpus = fixture_corpus();
        let q = fixture_query(&corpus);
        let th = thresholds(&q, corpus.tokens());
        let idx = build_hybrid_index(&corpus, fixture_grid(), Bucketer::Injective);
        let bucket = Bucketer::Injective.bucket(0, 0); // (t1, cell0)
        let hit = probe_hybrid(&idx.lists, bucket, th.c_t, th.c_r);
        assert_eq!(hit.objects, vec![1, 2]);
        let all = probe_hybrid(&idx.lists, bucket, 0.0, 0.0);
        assert_eq!(all.objects.len(), 2);
        let none = probe_hybrid(&idx.lists, 0xdead_beef, th.c_t, th.c_r);
        assert!(none.objects.is_empty());
    }

    #[test]
    fn bucketer_is_deterministic() {
        let b = Bucketer::hashed(1 << 20).unwrap();
        // frozen values: any change to the mixing function breaks the format
        assert_eq!(b.bucket(1, 14), 34909);
        assert_eq!(b.bucket(2, 14), 951232);
        assert_eq!(b.bucket(1, 15), 341337);
        assert_eq!(Bucketer::Injective.bucket(3, 7), (3u64 << 32) | 7);
    }
}
