//! Corpus and query files: one JSON object per line.
//!
//! Corpus line:  `{"id":1,"mbr":[0.0,0.0,2.0,2.0],"tokens":["cafe","park"]}`
//! Query line adds `"tau_r"` and `"tau_t"`. Malformed lines are reported
//! with their line number and skipped; callers decide whether that is fatal.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SealError};
use crate::model::{Corpus, Query, Region};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: u64,
    pub mbr: [f64; 4],
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    #[serde(default)]
    pub id: u64,
    pub mbr: [f64; 4],
    pub tokens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_t: Option<f64>,
}

/// Default similarity thresholds when neither the query line nor a flag
/// provides one.
pub const DEFAULT_TAU: f64 = 0.4;

pub fn write_corpus(path: &Path, records: &[CorpusRecord]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, r)
            .map_err(|e| SealError::InvalidParameter(format!("serialize corpus record: {e}")))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_queries(path: &Path, records: &[QueryRecord]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, r)
            .map_err(|e| SealError::InvalidParameter(format!("serialize query record: {e}")))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn region_of(mbr: [f64; 4]) -> Result<Region> {
    Region::new(mbr[0], mbr[1], mbr[2], mbr[3])
}

/// Parse corpus records, collecting per-line problems instead of failing on
/// the first.
pub fn read_corpus_records(path: &Path) -> Result<(Vec<CorpusRecord>, Vec<SealError>)> {
    let file = std::fs::File::open(path)?;
    let mut records = Vec::new();
    let mut problems = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CorpusRecord>(&line) {
            Ok(rec) => match region_of(rec.mbr) {
                Ok(_) => records.push(rec),
                Err(e) => problems.push(SealError::Malformed {
                    line: lineno + 1,
                    message: e.to_string(),
                }),
            },
            Err(e) => problems.push(SealError::Malformed {
                line: lineno + 1,
                message: e.to_string(),
            }),
        }
    }
    Ok((records, problems))
}

pub fn corpus_from_records(records: Vec<CorpusRecord>) -> Result<Corpus> {
    Corpus::from_records(
        records
            .into_iter()
            .map(|r| Ok((r.id, region_of(r.mbr)?, r.tokens)))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Read and build a corpus, failing if any line is malformed.
pub fn read_corpus(path: &Path) -> Result<Corpus> {
    let (records, problems) = read_corpus_records(path)?;
    if let Some(first) = problems.into_iter().next() {
        return Err(first);
    }
    corpus_from_records(records)
}

/// Queries parsed from a file, keyed by their record ids.
pub type ParsedQueries = Vec<(u64, Query)>;

/// Parsed queries with their record ids, plus per-line problems.
/// `tau_override` wins over the values stored on each line.
pub fn read_queries(
    path: &Path,
    corpus: &Corpus,
    tau_override: (Option<f64>, Option<f64>),
) -> Result<(ParsedQueries, Vec<SealError>)> {
    let file = std::fs::File::open(path)?;
    let mut queries = Vec::new();
    let mut problems = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: std::result::Result<QueryRecord, _> = serde_json::from_str(&line);
        let outcome = parsed
            .map_err(|e| SealError::Malformed {
                line: lineno + 1,
                message: e.to_string(),
            })
            .and_then(|rec| {
                let region = region_of(rec.mbr).map_err(|e| SealError::Malformed {
                    line: lineno + 1,
                    message: e.to_string(),
                })?;
                let tau_r = tau_override.0.or(rec.tau_r).unwrap_or(DEFAULT_TAU);
                let tau_t = tau_override.1.or(rec.tau_t).unwrap_or(DEFAULT_TAU);
                Query::from_tokens(region, &rec.tokens, corpus.tokens(), tau_r, tau_t)
                    .map(|q| (rec.id, q))
                    .map_err(|e| SealError::Malformed {
                        line: lineno + 1,
                        message: e.to_string(),
                    })
            });
        match outcome {
            Ok(q) => queries.push(q),
            Err(e) => problems.push(e),
        }
    }
    Ok((queries, problems))
}
