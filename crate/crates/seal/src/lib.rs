//! Spatio-textual similarity search over region-of-interest objects.
//!
//! An object pairs an axis-aligned region (MBR) with a weighted token set;
//! a query adds a spatial threshold `tau_r` and a textual threshold `tau_t`.
//! The engine returns exactly the objects whose spatial Jaccard and weighted
//! textual Jaccard similarities both reach their thresholds, using
//! signature-based filtering with threshold-aware pruning instead of a
//! corpus scan:
//!
//! - [`model`] — regions, token weighting, exact similarities, verification,
//!   and the brute-force oracle every method is checked against.
//! - [`signature`] — textual and uniform-grid signatures, global orders,
//!   prefix selection, and suffix bounds.
//! - [`index`] — inverted indexes with per-posting threshold bounds, plus
//!   hash-based hybrid (token, grid) buckets.
//! - [`filter`] — the candidate generators and the two baselines.
//! - [`granularity`] — cost-model selection of the grid granularity.
//! - [`hss`] — hierarchical per-token grid selection under a size budget.
//! - [`engine`] — method dispatch: filter, verify, stats.
//! - [`mod@format`] — the binary index file format (bit-exact round trip).
//! - [`gen`], [`io`], [`mod@bench`] — synthetic data, JSONL files, benchmark CSV.
//!
//! The `examples/` directory has one runnable program per capability; the
//! `seal` binary wraps the same entry points as subcommands.

pub mod bench;
pub mod engine;
pub mod error;
pub mod filter;
pub mod format;
pub mod gen;
pub mod granularity;
pub mod hss;
pub mod index;
pub mod io;
pub mod model;
pub mod signature;

#[cfg(test)]
pub(crate) mod testutil;

pub use engine::{BuildParams, Engine, EngineIndex, Method, SearchStats};
pub use error::{Result, SealError};
pub use model::{
    brute_force_search, intersection_area, spatial_jaccard, textual_jaccard, verify, Answer,
    AnswerSet, Corpus, Query, Region, STObject, TokenTable,
};
pub use signature::{
    grid_signature, select_prefix, signature_similarity, suffix_bounds, textual_signature,
    thresholds, GridOrder, GridPartition, OrderedSignature,
};
