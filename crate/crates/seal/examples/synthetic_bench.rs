//! Generate a synthetic corpus and query set, run every method over it with
//! oracle checking on, and print the per-method means.
//!
//! ```sh
//! cargo run --release --example synthetic_bench
//! ```

use seal::bench::{run_bench, write_csv, BenchConfig};
use seal::engine::{BuildParams, Method};
use seal::gen::{gen_queries, gen_synthetic, CorpusSpec, QueryMode, QuerySpec};
use seal::io::corpus_from_records;
use seal::model::{Query, Region};

fn main() -> seal::Result<()> {
    let records = gen_synthetic(
        &CorpusSpec {
            count: 5000,
            ..CorpusSpec::default()
        },
        1,
    )?;
    let query_records = gen_queries(
        &records,
        &QuerySpec {
            count: 60,
            mode: QueryMode::SmallRegion,
            tau_r: 0.4,
            tau_t: 0.4,
        },
        2,
    )?;
    let corpus = corpus_from_records(records)?;
    let queries: Vec<(u64, Query)> = query_records
        .iter()
        .map(|q| {
            (
                q.id,
                Query::from_tokens(
                    Region::new(q.mbr[0], q.mbr[1], q.mbr[2], q.mbr[3]).unwrap(),
                    &q.tokens,
                    corpus.tokens(),
                    q.tau_r.unwrap(),
                    q.tau_t.unwrap(),
                )
                .unwrap(),
            )
        })
        .collect();

    let config = BenchConfig {
        methods: vec![
            Method::Brute,
            Method::KeywordFirst,
            Method::SpatialFirst,
            Method::Token,
            Method::Grid,
            Method::Hybrid,
            Method::Hierarchical,
        ],
        params: BuildParams {
            granularity: 64,
            ..BuildParams::default()
        },
        check: true,
        serial: false,
    };
    let report = run_bench(&corpus, &queries, &config)?;
    println!("method          filter_us  verify_us  candidates  answers");
    for (method, m) in report.means() {
        println!(
            "{:<15} {:<10.1} {:<10.1} {:<11.2} {:.2}",
            method.name(),
            m.filter_us,
            m.verify_us,
            m.candidates,
            m.answers
        );
    }
    println!("oracle mismatches: {}", report.mismatches);

    // the same report as CSV, to stdout
    let mut csv = Vec::new();
    write_csv(&report, &mut csv)?;
    println!("\nfirst CSV lines:");
    for line in String::from_utf8_lossy(&csv).lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
