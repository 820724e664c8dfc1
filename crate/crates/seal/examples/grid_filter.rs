//! Grid signatures: partition the space, weight cells by overlap area,
//! order them by how many objects touch them, and prune with c_R.
//!
//! ```sh
//! cargo run --example grid_filter
//! ```

use seal::filter::{sig_filter_plus, PureIndex};
use seal::index::build_grid_index;
use seal::model::{Corpus, Region};
use seal::signature::{
    grid_signature, select_prefix, thresholds, GridOrder, GridPartition,
};

fn main() -> seal::Result<()> {
    let r = |a, b, c, d| Region::new(a, b, c, d).unwrap();
    let corpus = Corpus::from_records(vec![
        (1, r(10.0, 10.0, 50.0, 50.0), vec!["coffee", "wifi"]),
        (2, r(20.0, 20.0, 60.0, 60.0), vec!["coffee", "wifi", "roastery"]),
        (3, r(60.0, 60.0, 100.0, 100.0), vec!["park", "playground"]),
    ])?;
    let query = corpus.query(
        r(10.0, 10.0, 50.0, 50.0),
        &["coffee".into(), "wifi".into()],
        0.25,
        0.3,
    )?;

    let grid = GridPartition::new(r(0.0, 0.0, 100.0, 100.0), 2)?;
    let order = GridOrder::build(&corpus, &grid);
    println!("2x2 grid over [0,100]^2, cell ranks by (count, id): {:?}", order.ranks(4));

    for id in [1u64, 2, 3] {
        let sig = grid_signature(&corpus.get(id).unwrap().region, &grid, &order);
        let cells: Vec<(u64, f64)> = sig.elements.iter().map(|e| (e.id, e.weight)).collect();
        println!("object {id} grid signature: {cells:?}");
    }

    let th = thresholds(&query, corpus.tokens());
    let q_sig = grid_signature(&query.region, &grid, &order);
    let p = select_prefix(&q_sig, th.c_r);
    println!(
        "query covers {} cell(s); c_R = {:.0}; spatial prefix keeps {p}",
        q_sig.len(),
        th.c_r
    );

    let index = build_grid_index(&corpus, grid);
    let candidates = sig_filter_plus(&query, PureIndex::Grid(&index), &corpus);
    println!(
        "grid filter: candidates {:?} after reading {} postings from {} lists",
        candidates.ids, candidates.postings_scanned, candidates.lists_probed
    );
    Ok(())
}
