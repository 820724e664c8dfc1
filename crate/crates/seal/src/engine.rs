//! The search engine: one corpus, one method, one index, and a
//! filter-then-verify entry point with per-query statistics.

use std::str::FromStr;
use std::time::Instant;

use crate::error::{Result, SealError};
use crate::filter::{
    hierarchical_filter_plus, hybrid_filter_plus, keyword_first, sig_filter_plus, spatial_first,
    PureIndex,
};
use crate::hss::{build_hierarchical_index, Budgets, HierarchicalIndex, DEFAULT_TREE_HEIGHT};
use crate::index::{
    build_grid_index, build_hybrid_index, build_token_index, Bucketer, GridIndex, HybridIndex,
    TokenIndex, DEFAULT_BUCKETS,
};
use crate::model::{brute_force_search, verify, AnswerSet, Corpus, Query};
use crate::signature::GridPartition;

/// Search strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Brute,
    Token,
    Grid,
    Hybrid,
    Hierarchical,
    KeywordFirst,
    SpatialFirst,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Brute,
        Method::Token,
        Method::Grid,
        Method::Hybrid,
        Method::Hierarchical,
        Method::KeywordFirst,
        Method::SpatialFirst,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Token => "token",
            Method::Grid => "grid",
            Method::Hybrid => "hybrid",
            Method::Hierarchical => "hierarchical",
            Method::KeywordFirst => "keyword-first",
            Method::SpatialFirst => "spatial-first",
        }
    }

    /// The index kind this method runs on, if any.
    pub fn index_kind(&self) -> Option<&'static str> {
        match self {
            Method::Brute => None,
            Method::Token | Method::KeywordFirst => Some("token"),
            Method::Grid | Method::SpatialFirst => Some("grid"),
            Method::Hybrid => Some("hybrid"),
            Method::Hierarchical => Some("hierarchical"),
        }
    }
}

impl FromStr for Method {
    type Err = SealError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Method::Brute),
            "token" => Ok(Method::Token),
            "grid" => Ok(Method::Grid),
            "hybrid" => Ok(Method::Hybrid),
            "hierarchical" => Ok(Method::Hierarchical),
            "keyword-first" => Ok(Method::KeywordFirst),
            "spatial-first" => Ok(Method::SpatialFirst),
            other => Err(SealError::InvalidParameter(format!(
                "unknown method '{other}' (expected one of brute, token, grid, hybrid, hierarchical, keyword-first, spatial-first)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Build-time parameters for the index behind a method.
#[derive(Debug, Clone)]
pub struct BuildParams {
    pub granularity: u32,
    pub bucketer: Bucketer,
    pub mt: usize,
    pub tree_height: u32,
}

impl Default for BuildParams {
    fn default() -> Self {
        BuildParams {
            granularity: 64,
            bucketer: Bucketer::Hashed {
                buckets: DEFAULT_BUCKETS,
            },
            mt: 8,
            tree_height: DEFAULT_TREE_HEIGHT,
        }
    }
}

/// The index owned by an engine, matching its method.
#[derive(Debug, Clone, PartialEq)]
pub enum EngineIndex {
    None,
    Token(TokenIndex),
    Grid(GridIndex),
    Hybrid(HybridIndex),
    Hierarchical(HierarchicalIndex),
}

impl EngineIndex {
    pub fn kind(&self) -> Option<&'static str> {
        match self {
            EngineIndex::None => None,
            EngineIndex::Token(_) => Some("token"),
            EngineIndex::Grid(_) => Some("grid"),
            EngineIndex::Hybrid(_) => Some("hybrid"),
            EngineIndex::Hierarchical(_) => Some("hierarchical"),
        }
    }
}

/// Per-query execution statistics. Times are wall-clock microseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub filter_us: u64,
    pub verify_us: u64,
    pub candidates: u64,
    pub answers: u64,
    pub lists_probed: u64,
    pub postings_scanned: u64,
}

/// An immutable, concurrently usable search engine.
#[derive(Debug, Clone)]
pub struct Engine {
    corpus: Corpus,
    method: Method,
    index: EngineIndex,
}

impl Engine {
    /// Build the index a method needs and wrap it with the corpus.
    pub fn build(corpus: Corpus, method: Method, params: &BuildParams) -> Result<Engine> {
        let index = build_index(&corpus, method, params)?;
        Ok(Engine {
            corpus,
            method,
            index,
        })
    }

    /// Assemble from an already built (typically loaded) index; the index
    /// kind must match the method or the engine refuses to probe it.
    pub fn from_parts(corpus: Corpus, method: Method, index: EngineIndex) -> Result<Engine> {
        match (method.index_kind(), index.kind()) {
            (None, None) => {}
            (Some(want), Some(have)) if want == have => {}
            (want, have) => {
                return Err(SealError::IndexMismatch {
                    method: method.name(),
                    expected: want.unwrap_or("none"),
                    found: have.unwrap_or("none"),
                })
            }
        }
        Ok(Engine {
            corpus,
            method,
            index,
        })
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn index(&self) -> &EngineIndex {
        &self.index
    }

    /// Run one query: filter, then exact verification. Answers are identical
    /// to brute force for every method; only the statistics differ.
    pub fn search(&self, query: &Query) -> Result<(AnswerSet, SearchStats)> {
        let mut stats = SearchStats::default();
        let started = Instant::now();
        match (&self.method, &self.index) {
            (Method::Brute, _) => {
                let answers = brute_force_search(query, &self.corpus);
                stats.filter_us = started.elapsed().as_micros() as u64;
                stats.candidates = self.corpus.len() as u64;
                stats.answers = answers.len() as u64;
                Ok((answers, stats))
            }
            (Method::Token, EngineIndex::Token(idx)) => {
                let c = sig_filter_plus(query, PureIndex::Token(idx), &self.corpus);
                self.finish(query, c, started, stats)
            }
            (Method::Grid, EngineIndex::Grid(idx)) => {
                let c = sig_filter_plus(query, PureIndex::Grid(idx), &self.corpus);
                self.finish(query, c, started, stats)
            }
            (Method::Hybrid, EngineIndex::Hybrid(idx)) => {
                let c = hybrid_filter_plus(query, idx, &self.corpus);
                self.finish(query, c, started, stats)
            }
            (Method::Hierarchical, EngineIndex::Hierarchical(idx)) => {
                let c = hierarchical_filter_plus(query, idx, &self.corpus);
                self.finish(query, c, started, stats)
            }
            (Method::KeywordFirst, EngineIndex::Token(idx)) => {
                let run = keyword_first(query, idx, &self.corpus);
                self.finish(query, run.candidates, started, stats)
            }
            (Method::SpatialFirst, EngineIndex::Grid(idx)) => {
                let run = spatial_first(query, idx, &self.corpus);
                self.finish(query, run.candidates, started, stats)
            }
            (method, index) => Err(SealError::IndexMismatch {
                method: method.name(),
                expected: method.index_kind().unwrap_or("none"),
                found: index.kind().unwrap_or("none"),
            }),
        }
    }

    fn finish(
        &self,
        query: &Query,
        candidates: crate::filter::CandidateSet,
        started: Instant,
        mut stats: SearchStats,
    ) -> Result<(AnswerSet, SearchStats)> {
        stats.filter_us = started.elapsed().as_micros() as u64;
        stats.candidates = candidates.ids.len() as u64;
        stats.lists_probed = candidates.lists_probed;
        stats.postings_scanned = candidates.postings_scanned;
        let verifying = Instant::now();
        let answers = verify(query, &candidates.ids, &self.corpus)?;
        stats.verify_us = verifying.elapsed().as_micros() as u64;
        stats.answers = answers.len() as u64;
        Ok((answers, stats))
    }
}

fn build_index(corpus: &Corpus, method: Method, params: &BuildParams) -> Result<EngineIndex> {
    Ok(match method {
        Method::Brute => EngineIndex::None,
        Method::Token | Method::KeywordFirst => EngineIndex::Token(build_token_index(corpus)),
        Method::Grid | Method::SpatialFirst => {
            let grid = GridPartition::over_corpus(corpus, params.granularity)?;
            EngineIndex::Grid(build_grid_index(corpus, grid))
        }
        Method::Hybrid => {
            let grid = GridPartition::over_corpus(corpus, params.granularity)?;
            EngineIndex::Hybrid(build_hybrid_index(corpus, grid, params.bucketer))
        }
        Method::Hierarchical => EngineIndex::Hierarchical(build_hierarchical_index(
            corpus,
            &Budgets::uniform(params.mt),
            params.bucketer,
            params.tree_height,
        )?),
    })
}
