//! Pick a grid granularity with the cost model: walk the levels of the grid
//! tree, weigh retrieval cost against verification cost over a workload, and
//! stop when refining stops paying.
//!
//! ```sh
//! cargo run --example granularity_tuning
//! ```

use seal::gen::{gen_queries, gen_synthetic, CorpusSpec, QueryMode, QuerySpec};
use seal::granularity::{select_granularity, CostModel};
use seal::io::corpus_from_records;
use seal::model::{Query, Region};

fn main() -> seal::Result<()> {
    let records = gen_synthetic(
        &CorpusSpec {
            count: 3000,
            space_side: 300.0,
            ..CorpusSpec::default()
        },
        21,
    )?;
    let query_records = gen_queries(
        &records,
        &QuerySpec {
            count: 50,
            mode: QueryMode::SmallRegion,
            tau_r: 0.4,
            tau_t: 0.4,
        },
        22,
    )?;
    let corpus = corpus_from_records(records)?;
    let workload: Vec<Query> = query_records
        .iter()
        .map(|q| {
            Query::from_tokens(
                Region::new(q.mbr[0], q.mbr[1], q.mbr[2], q.mbr[3]).unwrap(),
                &q.tokens,
                corpus.tokens(),
                q.tau_r.unwrap(),
                q.tau_t.unwrap(),
            )
            .unwrap()
        })
        .collect();

    let model = CostModel::default();
    let result = select_granularity(&workload, &corpus, &model, 5.0, 8)?;

    println!("level  cells      filter-term  verify-term  total        benefit");
    for row in &result.rows {
        let p = 1u64 << row.cost.level;
        println!(
            "{:<6} {:<10} {:<12.1} {:<12.1} {:<12.1} {}",
            row.cost.level,
            p * p,
            row.cost.filter_term,
            row.cost.verify_term,
            row.cost.total,
            row.benefit.map_or(String::from("-"), |b| format!("{b:.1}")),
        );
    }
    println!(
        "chosen level: {} (grid {p}x{p})",
        result.level,
        p = 1u32 << result.level
    );
    Ok(())
}
