//! Textual signatures step by step: idf weighting, the global order
//! (descending idf), threshold and prefix selection, and the bound-aware
//! inverted-index probe.
//!
//! ```sh
//! cargo run --example token_filter
//! ```

use seal::filter::{sig_filter, sig_filter_plus, PureIndex};
use seal::index::{build_token_index, probe};
use seal::model::{Corpus, Region};
use seal::signature::{select_prefix, suffix_bounds, textual_signature, thresholds};

fn main() -> seal::Result<()> {
    let r = |a, b, c, d| Region::new(a, b, c, d).unwrap();
    let corpus = Corpus::from_records(vec![
        (1, r(10.0, 10.0, 50.0, 50.0), vec!["coffee", "wifi"]),
        (2, r(20.0, 20.0, 60.0, 60.0), vec!["coffee", "wifi", "roastery"]),
        (3, r(60.0, 60.0, 100.0, 100.0), vec!["park", "playground"]),
    ])?;
    let query = corpus.query(
        r(10.0, 10.0, 50.0, 50.0),
        &["coffee".into(), "wifi".into(), "roastery".into()],
        0.25,
        0.3,
    )?;

    let sig = textual_signature(&query.tokens, corpus.tokens());
    println!("query signature (descending idf):");
    for e in &sig.elements {
        println!("  {:<10} weight {:.4}", corpus.tokens().name(e.id as u32), e.weight);
    }

    let th = thresholds(&query, corpus.tokens());
    let p = select_prefix(&sig, th.c_t);
    println!("c_T = {:.4}; prefix keeps the first {p} of {} elements", th.c_t, sig.len());

    let index = build_token_index(&corpus);
    for e in &sig.elements[..p] {
        let hits = probe(&index.lists, e.id, th.c_t);
        println!(
            "  probe {:<10} -> {:?}",
            corpus.tokens().name(e.id as u32),
            hits.iter().map(|h| h.object).collect::<Vec<_>>()
        );
    }

    // suffix bounds of one object's signature: what the postings store
    let o2 = corpus.get(2).unwrap();
    let o2_sig = textual_signature(&o2.tokens, corpus.tokens());
    println!("object 2 suffix bounds: {:?}", suffix_bounds(&o2_sig));

    let reference = sig_filter(&query, PureIndex::Token(&index), &corpus);
    let pruned = sig_filter_plus(&query, PureIndex::Token(&index), &corpus);
    println!(
        "reference filter read {} postings, threshold-aware filter read {}",
        reference.postings_scanned, pruned.postings_scanned
    );
    println!("candidates: {:?} (both ways: {:?})", pruned.ids, reference.ids);
    Ok(())
}
