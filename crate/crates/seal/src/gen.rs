//! Synthetic corpus and query generation.
//!
//! Everything is driven by a seeded ChaCha stream, so a fixed seed gives
//! byte-identical output across runs and platforms. Region centers are
//! uniform over a square space, extents log-uniform, and tokens Zipf-skewed
//! over a fixed vocabulary.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson, Zipf};

use crate::error::{Result, SealError};
use crate::io::{CorpusRecord, QueryRecord};
use crate::model::Region;

/// Shape of a synthetic corpus.
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub count: usize,
    /// Centers are uniform in [0, side]^2.
    pub space_side: f64,
    /// Widths and heights are log-uniform in this range.
    pub width_range: (f64, f64),
    pub vocab: usize,
    /// Mean tokens per object (Poisson, clamped to [1, vocab]).
    pub tokens_mean: f64,
    /// Zipf exponent for token ranks.
    pub zipf_exponent: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            count: 0,
            space_side: 1000.0,
            // mean extent ~2.3, mean area ~5.4 square units
            width_range: (0.2, 9.0),
            vocab: 5000,
            tokens_mean: 12.5,
            zipf_exponent: 1.0,
        }
    }
}

impl CorpusSpec {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.width_range;
        if self.space_side <= 0.0 {
            return Err(SealError::InvalidParameter("space side must be positive".into()));
        }
        if !(lo > 0.0 && hi >= lo) {
            return Err(SealError::InvalidParameter(format!(
                "width range must satisfy 0 < min <= max, got ({lo}, {hi})"
            )));
        }
        if self.vocab == 0 {
            return Err(SealError::InvalidParameter("vocabulary must be nonempty".into()));
        }
        if self.tokens_mean <= 0.0 {
            return Err(SealError::InvalidParameter("token mean must be positive".into()));
        }
        if self.zipf_exponent <= 0.0 {
            return Err(SealError::InvalidParameter("zipf exponent must be positive".into()));
        }
        Ok(())
    }
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Generate `spec.count` corpus records, deterministically from the seed.
pub fn gen_synthetic(spec: &CorpusSpec, seed: u64) -> Result<Vec<CorpusRecord>> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let zipf = Zipf::new(spec.vocab as u64, spec.zipf_exponent)
        .map_err(|e| SealError::InvalidParameter(format!("zipf: {e}")))?;
    let poisson = Poisson::new(spec.tokens_mean)
        .map_err(|e| SealError::InvalidParameter(format!("poisson: {e}")))?;
    let (lo, hi) = spec.width_range;

    let mut records = Vec::with_capacity(spec.count);
    for id in 0..spec.count {
        let cx = rng.gen_range(0.0..spec.space_side);
        let cy = rng.gen_range(0.0..spec.space_side);
        let w = log_uniform(&mut rng, lo, hi);
        let h = log_uniform(&mut rng, lo, hi);
        let region = Region::new(cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0)?;

        let want = (poisson.sample(&mut rng) as usize).clamp(1, spec.vocab);
        let mut ranks: BTreeSet<u64> = BTreeSet::new();
        let mut attempts = 0usize;
        while ranks.len() < want && attempts < want * 50 + 100 {
            ranks.insert(zipf.sample(&mut rng) as u64);
            attempts += 1;
        }
        let tokens = ranks.into_iter().map(|r| format!("w{r}")).collect();
        records.push(CorpusRecord {
            id: id as u64,
            mbr: [region.xmin, region.ymin, region.xmax, region.ymax],
            tokens,
        });
    }
    Ok(records)
}

/// Query-region regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryMode {
    SmallRegion,
    LargeRegion,
}

impl std::str::FromStr for QueryMode {
    type Err = SealError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small-region" => Ok(QueryMode::SmallRegion),
            "large-region" => Ok(QueryMode::LargeRegion),
            other => Err(SealError::InvalidParameter(format!(
                "unknown query mode '{other}' (expected small-region or large-region)"
            ))),
        }
    }
}

/// Shape of a synthetic query set.
#[derive(Debug, Clone)]
pub struct QuerySpec {
    pub count: usize,
    pub mode: QueryMode,
    pub tau_r: f64,
    pub tau_t: f64,
}

/// Area scale between the two regimes (large over small).
const LARGE_OVER_SMALL: f64 = 150.0;

/// Generate queries anchored on corpus objects: a query region follows the
/// density of the data (its center sits inside a random object's region) and
/// its tokens are drawn from that object. Small-region queries target a
/// quarter of the mean object area, large-region queries a couple of orders
/// of magnitude more.
pub fn gen_queries(
    corpus: &[CorpusRecord],
    spec: &QuerySpec,
    seed: u64,
) -> Result<Vec<QueryRecord>> {
    if corpus.is_empty() && spec.count > 0 {
        return Err(SealError::InvalidParameter(
            "cannot generate queries over an empty corpus".into(),
        ));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mean_area = corpus
        .iter()
        .map(|r| (r.mbr[2] - r.mbr[0]) * (r.mbr[3] - r.mbr[1]))
        .sum::<f64>()
        / corpus.len().max(1) as f64;
    let tokens_target = match spec.mode {
        QueryMode::SmallRegion => 12usize,
        QueryMode::LargeRegion => 7usize,
    };

    let mut out = Vec::with_capacity(spec.count);
    for id in 0..spec.count {
        let anchor = &corpus[rng.gen_range(0..corpus.len())];
        let cx = rng.gen_range(anchor.mbr[0]..=anchor.mbr[2]);
        let cy = rng.gen_range(anchor.mbr[1]..=anchor.mbr[3]);
        // scale to the anchor so small-region queries can actually reach
        // high spatial thresholds against their anchor; the jitter keeps the
        // two area regimes well separated
        let anchor_area = (anchor.mbr[2] - anchor.mbr[0]) * (anchor.mbr[3] - anchor.mbr[1]);
        let base = if anchor_area > 0.0 {
            anchor_area
        } else {
            mean_area.max(1e-6)
        };
        let target_area = match spec.mode {
            QueryMode::SmallRegion => base,
            QueryMode::LargeRegion => base * LARGE_OVER_SMALL,
        };
        let side = target_area.sqrt() * rng.gen_range(0.8..=1.2);
        let region = Region::new(
            cx - side / 2.0,
            cy - side / 2.0,
            cx + side / 2.0,
            cy + side / 2.0,
        )?;
        let mut tokens: Vec<String> = anchor.tokens.clone();
        // deterministic subset: drop random tokens until at most the target
        while tokens.len() > tokens_target {
            let drop = rng.gen_range(0..tokens.len());
            tokens.remove(drop);
        }
        out.push(QueryRecord {
            id: id as u64,
            mbr: [region.xmin, region.ymin, region.xmax, region.ymax],
            tokens,
            tau_r: Some(spec.tau_r),
            tau_t: Some(spec.tau_t),
        });
    }
    Ok(out)
}
