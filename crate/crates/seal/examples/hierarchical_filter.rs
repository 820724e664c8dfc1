//! Hierarchical hybrid signatures: each token gets its own antichain cut of
//! the grid tree, sized by a budget m_t and chosen greedily by grid error,
//! so dense tokens get fine cells and sparse tokens stay coarse.
//!
//! ```sh
//! cargo run --example hierarchical_filter
//! ```

use seal::engine::{BuildParams, Engine, Method};
use seal::hss::{build_hierarchical_index, expected_list_size, Budgets};
use seal::index::Bucketer;
use seal::model::{Corpus, Region};

fn main() -> seal::Result<()> {
    let r = |a, b, c, d| Region::new(a, b, c, d).unwrap();
    let corpus = Corpus::from_records(vec![
        (1, r(10.0, 10.0, 50.0, 50.0), vec!["coffee", "wifi"]),
        (2, r(20.0, 20.0, 60.0, 60.0), vec!["coffee", "wifi", "roastery"]),
        (3, r(60.0, 60.0, 100.0, 100.0), vec!["park", "playground"]),
        (4, r(0.0, 55.0, 40.0, 100.0), vec!["park", "coffee"]),
    ])?;

    let index = build_hierarchical_index(&corpus, &Budgets::uniform(7), Bucketer::Injective, 3)?;
    println!("per-token grid sets (budget 7, tree height 3):");
    for set in index.token_grids.values() {
        let name = corpus.tokens().name(set.token);
        let cells: Vec<String> = set
            .grids
            .iter()
            .map(|g| format!("L{}#{}", g.level, g.cell))
            .collect();
        println!("  {:<10} -> {}", name, cells.join(" "));
    }

    // the error the greedy minimizes: expected list size deviation between
    // a node and its children
    let regions: Vec<Region> = corpus.objects().iter().map(|o| o.region).collect();
    let root_size = expected_list_size(&corpus.space(), &regions);
    println!("expected list size at the root: {root_size:.3}");

    let query = corpus.query(
        r(10.0, 10.0, 50.0, 50.0),
        &["coffee".into(), "wifi".into(), "roastery".into()],
        0.25,
        0.3,
    )?;
    let engine = Engine::build(
        corpus,
        Method::Hierarchical,
        &BuildParams {
            mt: 7,
            tree_height: 3,
            bucketer: Bucketer::Injective,
            ..BuildParams::default()
        },
    )?;
    let (answers, stats) = engine.search(&query)?;
    println!(
        "answers {:?} from {} candidates",
        answers.iter().map(|a| a.id).collect::<Vec<_>>(),
        stats.candidates
    );
    Ok(())
}
