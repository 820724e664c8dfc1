//! Build a small corpus, run one query through the full engine, and print
//! the verified answers.
//!
//! ```sh
//! cargo run --example basic_search
//! ```

use seal::engine::{BuildParams, Engine, Method};
use seal::model::{Corpus, Region};

fn main() -> seal::Result<()> {
    let r = |a, b, c, d| Region::new(a, b, c, d).unwrap();
    // three places with regions and tag sets
    let corpus = Corpus::from_records(vec![
        (1, r(10.0, 10.0, 50.0, 50.0), vec!["coffee", "wifi"]),
        (2, r(20.0, 20.0, 60.0, 60.0), vec!["coffee", "wifi", "roastery"]),
        (3, r(60.0, 60.0, 100.0, 100.0), vec!["park", "playground"]),
    ])?;

    // find objects overlapping at least a quarter of the union with the
    // query region and sharing at least 30% of the token weight
    let query = corpus.query(
        r(10.0, 10.0, 50.0, 50.0),
        &["coffee".into(), "wifi".into(), "roastery".into()],
        0.25,
        0.3,
    )?;

    let engine = Engine::build(corpus, Method::Hybrid, &BuildParams::default())?;
    let (answers, stats) = engine.search(&query)?;

    println!("answers:");
    for a in &answers {
        println!("  object {:>2}  sim_r {:.4}  sim_t {:.4}", a.id, a.sim_r, a.sim_t);
    }
    println!(
        "stats: {} candidates, {} answers, filter {}us, verify {}us",
        stats.candidates, stats.answers, stats.filter_us, stats.verify_us
    );
    Ok(())
}
