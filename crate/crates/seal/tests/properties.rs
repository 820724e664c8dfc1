//! Property-based and randomized invariant tests.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use common::{answer_ids, random_corpus, random_query, raster_intersection_area, region};
use seal::engine::{BuildParams, Engine, Method};
use seal::filter::{hybrid_filter_plus, sig_filter, sig_filter_plus, PureIndex};
use seal::format::{from_bytes, to_bytes, IndexFile};
use seal::index::{
    build_grid_index, build_hybrid_index, build_token_index, Bucketer,
};
use seal::model::{
    brute_force_search, intersection_area, spatial_jaccard, verify, Corpus, Region,
};
use seal::signature::{
    grid_signature, select_prefix, signature_similarity, suffix_bounds, textual_signature,
    threshold_slack, GridOrder, GridPartition,
};

fn arb_region() -> impl Strategy<Value = Region> {
    (
        -100.0f64..100.0,
        -100.0f64..100.0,
        0.0f64..150.0,
        0.0f64..150.0,
    )
        .prop_map(|(x, y, w, h)| region(x, y, x + w, y + h))
}

proptest! {
    #[test]
    fn intersection_is_symmetric_and_bounded(a in arb_region(), b in arb_region()) {
        let ab = intersection_area(&a, &b);
        let ba = intersection_area(&b, &a);
        prop_assert_eq!(ab, ba);
        prop_assert!(ab >= 0.0);
        prop_assert!(ab <= a.area().min(b.area()) + 1e-9);
    }

    #[test]
    fn spatial_jaccard_symmetric_in_range(a in arb_region(), b in arb_region()) {
        let s = spatial_jaccard(&a, &b);
        prop_assert_eq!(s, spatial_jaccard(&b, &a));
        prop_assert!((0.0..=1.0).contains(&s));
    }

    #[test]
    fn suffix_bounds_non_increasing(weights in prop::collection::vec(0.01f64..50.0, 0..20)) {
        // arbitrary positive weights in an already sorted carrier
        let corpus = Corpus::from_records(vec![(1, region(0.0,0.0,1.0,1.0), vec!["a"])]).unwrap();
        let mut sig = textual_signature(&[0u32], corpus.tokens());
        sig.elements.clear();
        for (i, w) in weights.iter().enumerate() {
            sig.elements.push(seal::signature::SignatureElement { id: i as u64, weight: *w });
        }
        let bounds = suffix_bounds(&sig);
        prop_assert!(bounds.windows(2).all(|w| w[0] >= w[1]));
        if let Some(first) = bounds.first() {
            prop_assert!((first - sig.total_weight()).abs() < 1e-9);
        }
    }
}

#[test]
fn intersection_matches_rasterization_oracle() {
    let mut rng = ChaCha12Rng::seed_from_u64(401);
    for _ in 0..40 {
        let a = common::random_region(&mut rng, 100.0);
        let b = common::random_region(&mut rng, 100.0);
        let exact = intersection_area(&a, &b);
        let approx = raster_intersection_area(&a, &b, 500);
        let scale = a.mbr_with(&b).area().max(1.0);
        assert!(
            (exact - approx).abs() <= 0.02 * scale,
            "raster {approx} vs exact {exact} for {a:?} {b:?}"
        );
    }
}

#[test]
fn textual_jaccard_symmetric_in_range() {
    let mut rng = ChaCha12Rng::seed_from_u64(402);
    for _ in 0..200 {
        let corpus = random_corpus(&mut rng, 30, 40, 100.0);
        let objects = corpus.objects();
        let a = &objects[rand::Rng::gen_range(&mut rng, 0..objects.len())];
        let b = &objects[rand::Rng::gen_range(&mut rng, 0..objects.len())];
        let ab = seal::textual_jaccard(&a.tokens, &b.tokens, corpus.tokens());
        let ba = seal::textual_jaccard(&b.tokens, &a.tokens, corpus.tokens());
        assert_eq!(ab, ba);
        assert!((0.0..=1.0).contains(&ab));
    }
}

#[test]
fn verify_all_ids_equals_brute_force() {
    let mut rng = ChaCha12Rng::seed_from_u64(403);
    for round in 0..120 {
        let n = [5usize, 30, 120, 1000][round % 4];
        let corpus = random_corpus(&mut rng, n, 30 + n / 4, 200.0);
        let q = random_query(&mut rng, &corpus, 30 + n / 4, 200.0);
        let all: Vec<u64> = corpus.objects().iter().map(|o| o.id).collect();
        let verified = verify(&q, &all, &corpus).unwrap();
        assert_eq!(verified, brute_force_search(&q, &corpus));
    }
}

#[test]
fn empty_corpus_is_harmless_everywhere() {
    let corpus = Corpus::from_records(Vec::<(u64, Region, Vec<&str>)>::new()).unwrap();
    let q = corpus
        .query(region(0.0, 0.0, 10.0, 10.0), &["a".into()], 0.4, 0.4)
        .unwrap();
    for method in Method::ALL {
        let engine = Engine::build(corpus.clone(), method, &BuildParams::default()).unwrap();
        let (answers, _) = engine.search(&q).unwrap();
        assert!(answers.is_empty());
    }
}

/// Prefix soundness, both kinds: if two full signatures are at least c
/// similar, their c-prefixes share an element (checked as the contrapositive
/// under the implementation's comparison slack).
#[test]
fn prefix_selection_is_sound() {
    let mut rng = ChaCha12Rng::seed_from_u64(404);
    let mut checked = 0u32;
    for round in 0..400 {
        let corpus = random_corpus(&mut rng, 40, 25, 100.0);
        let objects = corpus.objects();
        let a = &objects[rand::Rng::gen_range(&mut rng, 0..objects.len())];
        let b = &objects[rand::Rng::gen_range(&mut rng, 0..objects.len())];
        let (sig_a, sig_b) = if round % 2 == 0 {
            (
                textual_signature(&a.tokens, corpus.tokens()),
                textual_signature(&b.tokens, corpus.tokens()),
            )
        } else {
            let grid = GridPartition::over_corpus(&corpus, 8).unwrap();
            let order = GridOrder::build(&corpus, &grid);
            (
                grid_signature(&a.region, &grid, &order),
                grid_signature(&b.region, &grid, &order),
            )
        };
        let sim = signature_similarity(&sig_a, &sig_b).unwrap();
        if sim <= 0.0 {
            continue;
        }
        checked += 1;
        let c = sim * rand::Rng::gen_range(&mut rng, 0.05..1.0f64);
        let pa = select_prefix(&sig_a, c);
        let pb = select_prefix(&sig_b, c);
        let shared = sig_a.elements[..pa]
            .iter()
            .any(|ea| sig_b.elements[..pb].iter().any(|eb| eb.id == ea.id));
        assert!(
            shared || sim < c + threshold_slack(c),
            "prefixes lost a pair with sim {sim} >= c {c}"
        );
    }
    assert!(checked > 100, "too few informative pairs: {checked}");
}

/// Overlap sandwich: |q ∩ o| <= grid signature similarity <= min(|q ∩ space|, |o|).
#[test]
fn grid_similarity_sandwiches_overlap() {
    let mut rng = ChaCha12Rng::seed_from_u64(405);
    for _ in 0..300 {
        let corpus = random_corpus(&mut rng, 30, 20, 100.0);
        if corpus.is_empty() {
            continue;
        }
        let p = [1u32, 2, 4, 8, 16][rand::Rng::gen_range(&mut rng, 0..5)];
        let grid = GridPartition::over_corpus(&corpus, p).unwrap();
        let order = GridOrder::build(&corpus, &grid);
        let o = &corpus.objects()[rand::Rng::gen_range(&mut rng, 0..corpus.len())];
        let qr = common::random_region(&mut rng, 120.0);
        let sim = signature_similarity(
            &grid_signature(&qr, &grid, &order),
            &grid_signature(&o.region, &grid, &order),
        )
        .unwrap();
        let overlap = intersection_area(&qr, &o.region);
        let q_clipped = qr
            .clip(&grid.space)
            .map(|c| c.area())
            .unwrap_or(0.0);
        assert!(sim >= overlap - 1e-6, "sim {sim} below overlap {overlap}");
        assert!(
            sim <= q_clipped.min(o.region.area()) + 1e-6,
            "sim {sim} above min({q_clipped}, {})",
            o.region.area()
        );
    }
}

/// Candidate supersets: every filter contains every true answer, and the
/// pruned filter stays inside the reference filter's output universe.
#[test]
fn filters_are_supersets_of_answers() {
    let mut rng = ChaCha12Rng::seed_from_u64(406);
    for _ in 0..150 {
        let corpus = random_corpus(&mut rng, 60, 30, 150.0);
        let q = random_query(&mut rng, &corpus, 30, 150.0);
        let answers: Vec<u64> = answer_ids(&brute_force_search(&q, &corpus));

        let token_idx = build_token_index(&corpus);
        let grid = GridPartition::over_corpus(&corpus, 8).unwrap();
        let grid_idx = build_grid_index(&corpus, grid.clone());
        let hybrid_idx = build_hybrid_index(&corpus, grid.clone(), Bucketer::Injective);

        let c_ref_t = sig_filter(&q, PureIndex::Token(&token_idx), &corpus);
        let c_plus_t = sig_filter_plus(&q, PureIndex::Token(&token_idx), &corpus);
        let c_ref_r = sig_filter(&q, PureIndex::Grid(&grid_idx), &corpus);
        let c_plus_r = sig_filter_plus(&q, PureIndex::Grid(&grid_idx), &corpus);
        let c_hybrid = hybrid_filter_plus(&q, &hybrid_idx, &corpus);

        for (name, set) in [
            ("sig_filter token", &c_ref_t),
            ("sig_filter_plus token", &c_plus_t),
            ("sig_filter grid", &c_ref_r),
            ("sig_filter_plus grid", &c_plus_r),
            ("hybrid_filter_plus", &c_hybrid),
        ] {
            for id in &answers {
                assert!(
                    set.ids.binary_search(id).is_ok(),
                    "{name} lost answer {id} (tau_r={}, tau_t={})",
                    q.tau_r,
                    q.tau_t
                );
            }
        }
        // injective sharpening: when the hybrid filter actually probed (no
        // zero-threshold fallback), its candidates sit inside both pure sets
        if !c_hybrid.full_scan {
            for id in &c_hybrid.ids {
                assert!(c_plus_t.full_scan || c_plus_t.ids.binary_search(id).is_ok());
                assert!(c_plus_r.full_scan || c_plus_r.ids.binary_search(id).is_ok());
            }
        }
    }
}

/// With collisions (small bucket count) the bucket bounds dominate every
/// contributing pair, so candidates only grow relative to injective buckets.
#[test]
fn collision_merge_only_adds_candidates() {
    let mut rng = ChaCha12Rng::seed_from_u64(407);
    for _ in 0..80 {
        let corpus = random_corpus(&mut rng, 50, 20, 100.0);
        let q = random_query(&mut rng, &corpus, 20, 100.0);
        let grid = GridPartition::over_corpus(&corpus, 4).unwrap();
        let exact = build_hybrid_index(&corpus, grid.clone(), Bucketer::Injective);
        let coarse =
            build_hybrid_index(&corpus, grid.clone(), Bucketer::hashed(8).unwrap());
        let c_exact = hybrid_filter_plus(&q, &exact, &corpus);
        let c_coarse = hybrid_filter_plus(&q, &coarse, &corpus);
        // completeness for both (against brute force)
        let answers = answer_ids(&brute_force_search(&q, &corpus));
        for id in &answers {
            assert!(c_exact.ids.binary_search(id).is_ok());
            assert!(c_coarse.ids.binary_search(id).is_ok());
        }
    }
}

#[test]
fn search_is_deterministic_across_runs() {
    let mut rng = ChaCha12Rng::seed_from_u64(408);
    let corpus = random_corpus(&mut rng, 80, 25, 120.0);
    let q = random_query(&mut rng, &corpus, 25, 120.0);
    let params = BuildParams {
        granularity: 8,
        bucketer: Bucketer::hashed(64).unwrap(),
        mt: 4,
        tree_height: 5,
    };
    for method in Method::ALL {
        let e1 = Engine::build(corpus.clone(), method, &params).unwrap();
        let e2 = Engine::build(corpus.clone(), method, &params).unwrap();
        let (a1, s1) = e1.search(&q).unwrap();
        let (a2, s2) = e2.search(&q).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(
            (s1.candidates, s1.lists_probed, s1.postings_scanned),
            (s2.candidates, s2.lists_probed, s2.postings_scanned)
        );
    }
}

/// Small-scale version of the master completeness property; the acceptance
/// suite runs the full configuration matrix.
#[test]
fn all_methods_agree_with_brute_force() {
    let mut rng = ChaCha12Rng::seed_from_u64(409);
    for _ in 0..60 {
        let n = [8usize, 40, 150][rand::Rng::gen_range(&mut rng, 0..3)];
        let corpus = random_corpus(&mut rng, n, 25, 150.0);
        let params = BuildParams {
            granularity: 8,
            bucketer: Bucketer::hashed(32).unwrap(),
            mt: 4,
            tree_height: 5,
        };
        let engines: Vec<Engine> = Method::ALL
            .iter()
            .map(|&m| Engine::build(corpus.clone(), m, &params).unwrap())
            .collect();
        for _ in 0..10 {
            let q = random_query(&mut rng, &corpus, 25, 150.0);
            let want = brute_force_search(&q, &corpus);
            for engine in &engines {
                let (got, _) = engine.search(&q).unwrap();
                assert_eq!(
                    got,
                    want,
                    "method {} diverged (tau_r={}, tau_t={})",
                    engine.method(),
                    q.tau_r,
                    q.tau_t
                );
            }
        }
    }
}

/// Randomized persistence round trips on top of the format unit tests.
#[test]
fn random_indexes_round_trip() {
    let mut rng = ChaCha12Rng::seed_from_u64(410);
    for _ in 0..25 {
        let corpus = random_corpus(&mut rng, 40, 20, 100.0);
        let grid = GridPartition::over_corpus(&corpus, 4).unwrap();
        let files = vec![
            IndexFile::Token(build_token_index(&corpus)),
            IndexFile::Grid(build_grid_index(&corpus, grid.clone())),
            IndexFile::Hybrid(build_hybrid_index(
                &corpus,
                grid.clone(),
                Bucketer::hashed(16).unwrap(),
            )),
        ];
        for f in files {
            let bytes = to_bytes(&f);
            assert_eq!(from_bytes(&bytes).unwrap(), f);
        }
    }
}
