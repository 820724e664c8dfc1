//! Hash-based hybrid signatures: every (token, grid cell) pair of an object
//! becomes a bucket posting carrying both threshold bounds, so one probe
//! prunes spatially and textually at once.
//!
//! ```sh
//! cargo run --example hybrid_filter
//! ```

use seal::filter::{hybrid_filter_plus, sig_filter_plus, PureIndex};
use seal::index::{build_grid_index, build_hybrid_index, build_token_index, Bucketer};
use seal::model::{Corpus, Region};
use seal::signature::GridPartition;

fn main() -> seal::Result<()> {
    let r = |a, b, c, d| Region::new(a, b, c, d).unwrap();
    let corpus = Corpus::from_records(vec![
        (1, r(10.0, 10.0, 50.0, 50.0), vec!["coffee", "wifi"]),
        (2, r(20.0, 20.0, 60.0, 60.0), vec!["coffee", "wifi", "roastery"]),
        (3, r(60.0, 60.0, 100.0, 100.0), vec!["park", "playground"]),
        (4, r(0.0, 0.0, 45.0, 45.0), vec!["park", "coffee"]),
    ])?;
    let query = corpus.query(
        r(10.0, 10.0, 50.0, 50.0),
        &["coffee".into(), "wifi".into(), "roastery".into()],
        0.25,
        0.3,
    )?;
    let grid = || GridPartition::new(r(0.0, 0.0, 100.0, 100.0), 2);

    // pure filters for comparison
    let token_idx = build_token_index(&corpus);
    let grid_idx = build_grid_index(&corpus, grid()?);
    let c_t = sig_filter_plus(&query, PureIndex::Token(&token_idx), &corpus);
    let c_r = sig_filter_plus(&query, PureIndex::Grid(&grid_idx), &corpus);
    println!("textual candidates: {:?}", c_t.ids);
    println!("spatial candidates: {:?}", c_r.ids);

    // exact-pair buckets: the hybrid candidate set is their intersection
    let exact = build_hybrid_index(&corpus, grid()?, Bucketer::Injective);
    let c_h = hybrid_filter_plus(&query, &exact, &corpus);
    println!("hybrid (injective) candidates: {:?}", c_h.ids);

    // a tiny bucket count forces collisions; bounds merge conservatively,
    // so candidates can only grow, never vanish
    let coarse = build_hybrid_index(&corpus, grid()?, Bucketer::hashed(4)?);
    let c_c = hybrid_filter_plus(&query, &coarse, &corpus);
    println!(
        "hybrid (4 buckets)  candidates: {:?}  ({} lists in the index)",
        c_c.ids,
        coarse.lists.len()
    );
    Ok(())
}
