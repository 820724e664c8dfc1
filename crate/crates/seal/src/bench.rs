//! Benchmark runner: execute a query set under one or more methods, record
//! per-query timings and counts, and optionally check every answer against
//! the brute-force oracle.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::engine::{BuildParams, Engine, Method, SearchStats};
use crate::error::Result;
use crate::model::{brute_force_search, AnswerSet, Corpus, Query};

/// CSV schema tag written at the top of every report.
pub const CSV_SCHEMA: &str = "seal bench csv v1";

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub methods: Vec<Method>,
    pub params: BuildParams,
    /// Compare each answer set against brute force.
    pub check: bool,
    /// Run queries one at a time instead of across threads.
    pub serial: bool,
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub method: Method,
    pub query: u64,
    pub tau_r: f64,
    pub tau_t: f64,
    pub stats: SearchStats,
    /// Set only when checking: true if this answer diverged from the oracle.
    pub mismatch: bool,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub mismatches: u64,
}

impl BenchReport {
    /// Mean statistics per method, in the order the methods ran.
    pub fn means(&self) -> Vec<(Method, MeanStats)> {
        let mut out: Vec<(Method, MeanStats)> = Vec::new();
        for row in &self.rows {
            if out.last().map(|(m, _)| *m) != Some(row.method) {
                out.push((row.method, MeanStats::default()));
            }
            let (_, m) = out.last_mut().unwrap();
            m.queries += 1;
            m.filter_us += row.stats.filter_us as f64;
            m.verify_us += row.stats.verify_us as f64;
            m.candidates += row.stats.candidates as f64;
            m.answers += row.stats.answers as f64;
        }
        for (_, m) in &mut out {
            if m.queries > 0 {
                let n = m.queries as f64;
                m.filter_us /= n;
                m.verify_us /= n;
                m.candidates /= n;
                m.answers /= n;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MeanStats {
    pub queries: u64,
    pub filter_us: f64,
    pub verify_us: f64,
    pub candidates: f64,
    pub answers: f64,
}

fn run_one(
    engine: &Engine,
    qid: u64,
    query: &Query,
    oracle: Option<&AnswerSet>,
) -> Result<BenchRow> {
    let (answers, stats) = engine.search(query)?;
    let mismatch = oracle.map(|want| want != &answers).unwrap_or(false);
    Ok(BenchRow {
        method: engine.method(),
        query: qid,
        tau_r: query.tau_r,
        tau_t: query.tau_t,
        stats,
        mismatch,
    })
}

/// Run the benchmark. Row order is methods outer, queries inner, regardless
/// of parallelism, so reports are comparable across runs.
pub fn run_bench(
    corpus: &Corpus,
    queries: &[(u64, Query)],
    config: &BenchConfig,
) -> Result<BenchReport> {
    let oracle: Option<Vec<AnswerSet>> = config.check.then(|| {
        queries
            .iter()
            .map(|(_, q)| brute_force_search(q, corpus))
            .collect()
    });
    let mut report = BenchReport::default();
    for &method in &config.methods {
        let engine = Engine::build(corpus.clone(), method, &config.params)?;
        let rows: Result<Vec<BenchRow>> = if config.serial {
            queries
                .iter()
                .enumerate()
                .map(|(i, (qid, q))| run_one(&engine, *qid, q, oracle.as_ref().map(|o| &o[i])))
                .collect()
        } else {
            queries
                .par_iter()
                .enumerate()
                .map(|(i, (qid, q))| run_one(&engine, *qid, q, oracle.as_ref().map(|o| &o[i])))
                .collect()
        };
        for row in rows? {
            if row.mismatch {
                report.mismatches += 1;
            }
            report.rows.push(row);
        }
    }
    Ok(report)
}

/// Write the report as CSV: a schema comment, a header, one row per
/// (method, query), and per-method mean lines as trailing comments.
pub fn write_csv<W: Write>(report: &BenchReport, mut out: W) -> Result<()> {
    writeln!(out, "# {CSV_SCHEMA}")?;
    writeln!(
        out,
        "method,query,tau_r,tau_t,filter_us,verify_us,candidates,answers,postings_scanned,check"
    )?;
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.method,
            row.query,
            row.tau_r,
            row.tau_t,
            row.stats.filter_us,
            row.stats.verify_us,
            row.stats.candidates,
            row.stats.answers,
            row.stats.postings_scanned,
            if row.mismatch { "mismatch" } else { "ok" },
        )?;
    }
    for (method, m) in report.means() {
        writeln!(
            out,
            "# mean method={} queries={} filter_us={:.1} verify_us={:.1} candidates={:.2} answers={:.2}",
            method, m.queries, m.filter_us, m.verify_us, m.candidates, m.answers
        )?;
    }
    Ok(())
}

pub fn write_csv_file(report: &BenchReport, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(report, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::Bucketer;
    use crate::testutil::{fixture_corpus, fixture_query};

    fn config(methods: Vec<Method>, serial: bool) -> BenchConfig {
        BenchConfig {
            methods,
            params: BuildParams {
                granularity: 2,
                bucketer: Bucketer::Injective,
                mt: 4,
                tree_height: 3,
            },
            check: true,
            serial,
        }
    }

    #[test]
    fn bench_checks_out_on_the_fixture() {
        let corpus = fixture_corpus();
        let queries = vec![(0u64, fixture_query(&corpus))];
        let report = run_bench(
            &corpus,
            &queries,
            &config(vec![Method::Brute, Method::Token, Method::Hybrid], true),
        )
        .unwrap();
        assert_eq!(report.mismatches, 0);
        assert_eq!(report.rows.len(), 3);
        assert!(report.rows.iter().all(|r| r.stats.answers == 2));
    }

    #[test]
    fn parallel_and_serial_agree_on_counts() {
        let corpus = fixture_corpus();
        let queries: Vec<(u64, _)> = (0..8).map(|i| (i, fixture_query(&corpus))).collect();
        let serial = run_bench(&corpus, &queries, &config(vec![Method::Grid], true)).unwrap();
        let parallel = run_bench(&corpus, &queries, &config(vec![Method::Grid], false)).unwrap();
        let counts = |r: &BenchReport| {
            r.rows
                .iter()
                .map(|row| (row.query, row.stats.candidates, row.stats.answers))
                .collect::<Vec<_>>()
        };
        assert_eq!(counts(&serial), counts(&parallel));
    }

    #[test]
    fn csv_has_schema_and_rows() {
        let corpus = fixture_corpus();
        let queries = vec![(0u64, fixture_query(&corpus))];
        let report = run_bench(&corpus, &queries, &config(vec![Method::Token], true)).unwrap();
        let mut buf = Vec::new();
        write_csv(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# seal bench csv v1\n"));
        assert!(text.contains("method,query,tau_r"));
        assert!(text.contains("token,0,0.25,0.3"));
        assert!(text.contains("# mean method=token"));
    }
}
