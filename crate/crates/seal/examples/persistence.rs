//! Save an index to its binary file format and load it back: the round trip
//! is bit-exact and a loaded index answers queries identically.
//!
//! ```sh
//! cargo run --example persistence
//! ```

use seal::engine::{Engine, EngineIndex, Method};
use seal::format::{load, save, to_bytes, IndexFile};
use seal::index::{build_hybrid_index, Bucketer};
use seal::model::{Corpus, Region};
use seal::signature::GridPartition;

fn main() -> seal::Result<()> {
    let r = |a, b, c, d| Region::new(a, b, c, d).unwrap();
    let corpus = Corpus::from_records(vec![
        (1, r(10.0, 10.0, 50.0, 50.0), vec!["coffee", "wifi"]),
        (2, r(20.0, 20.0, 60.0, 60.0), vec!["coffee", "wifi", "roastery"]),
        (3, r(60.0, 60.0, 100.0, 100.0), vec!["park", "playground"]),
    ])?;
    let grid = GridPartition::over_corpus(&corpus, 4)?;
    let index = IndexFile::Hybrid(build_hybrid_index(&corpus, grid, Bucketer::hashed(1 << 10)?));

    let dir = std::env::temp_dir().join("seal-persistence-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("hybrid.seal");
    save(&index, &path)?;
    println!(
        "wrote {} index: {} bytes at {}",
        index.kind(),
        std::fs::metadata(&path)?.len(),
        path.display()
    );

    let loaded = load(&path)?;
    assert_eq!(loaded, index);
    assert_eq!(to_bytes(&loaded), to_bytes(&index));
    println!("round trip is bit-exact");

    let query = corpus.query(
        r(10.0, 10.0, 50.0, 50.0),
        &["coffee".into(), "wifi".into(), "roastery".into()],
        0.25,
        0.3,
    )?;
    let IndexFile::Hybrid(hybrid) = loaded else {
        unreachable!()
    };
    let engine = Engine::from_parts(corpus, Method::Hybrid, EngineIndex::Hybrid(hybrid))?;
    let (answers, _) = engine.search(&query)?;
    println!(
        "loaded index answers: {:?}",
        answers.iter().map(|a| a.id).collect::<Vec<_>>()
    );
    std::fs::remove_file(&path).ok();
    Ok(())
}
