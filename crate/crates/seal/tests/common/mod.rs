//! Shared helpers for the integration suites: deterministic random worlds
//! (corpora and queries that deliberately include degenerate shapes) and an
//! independent rasterization oracle for areas.
//!
//! Each test binary compiles its own copy, so not every helper is used
//! everywhere.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use seal::model::{Corpus, Query, Region};

/// The threshold grid the randomized suites draw from.
pub const TAUS: [f64; 6] = [0.0, 0.1, 0.25, 0.4, 0.5, 1.0];

pub fn region(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Region {
    Region::new(xmin, ymin, xmax, ymax).unwrap()
}

/// Monte-Carlo area of `a ∩ b`: midpoint sampling over the joint bounding
/// box. Entirely independent of the interval arithmetic it cross-checks.
pub fn raster_intersection_area(a: &Region, b: &Region, res: usize) -> f64 {
    let bbox = a.mbr_with(b);
    let w = bbox.xmax - bbox.xmin;
    let h = bbox.ymax - bbox.ymin;
    if w <= 0.0 || h <= 0.0 {
        return 0.0;
    }
    let mut inside = 0usize;
    for i in 0..res {
        let x = bbox.xmin + (i as f64 + 0.5) / res as f64 * w;
        for j in 0..res {
            let y = bbox.ymin + (j as f64 + 0.5) / res as f64 * h;
            let in_a = x > a.xmin && x < a.xmax && y > a.ymin && y < a.ymax;
            let in_b = x > b.xmin && x < b.xmax && y > b.ymin && y < b.ymax;
            if in_a && in_b {
                inside += 1;
            }
        }
    }
    inside as f64 / (res * res) as f64 * w * h
}

/// A random region inside [0, side]^2; roughly one in twenty is degenerate
/// (a point, or a zero-width/zero-height segment).
pub fn random_region(rng: &mut ChaCha12Rng, side: f64) -> Region {
    let cx = rng.gen_range(0.0..side);
    let cy = rng.gen_range(0.0..side);
    let (w, h) = if rng.gen_bool(0.05) {
        match rng.gen_range(0..3) {
            0 => (0.0, 0.0),
            1 => (0.0, rng.gen_range(0.1..side / 10.0)),
            _ => (rng.gen_range(0.1..side / 10.0), 0.0),
        }
    } else {
        (
            rng.gen_range(0.1..side / 4.0),
            rng.gen_range(0.1..side / 4.0),
        )
    };
    region(cx, cy, cx + w, cy + h)
}

/// Random corpus of `n` objects over `[0, side]^2` with a `vocab`-token
/// universe. Some objects are degenerate, a few have no tokens at all.
pub fn random_corpus(rng: &mut ChaCha12Rng, n: usize, vocab: usize, side: f64) -> Corpus {
    let mut records = Vec::with_capacity(n);
    for id in 0..n {
        let r = random_region(rng, side);
        let count = if rng.gen_bool(0.04) {
            0
        } else {
            rng.gen_range(1..=8usize)
        };
        let tokens: Vec<String> = (0..count)
            .map(|_| format!("w{}", rng.gen_range(0..vocab)))
            .collect();
        records.push((id as u64, r, tokens));
    }
    Corpus::from_records(records).unwrap()
}

/// Random query over a corpus: usually anchored on an object (region and
/// tokens), sometimes wild, degenerate, out of space, token-free, or
/// carrying tokens the corpus has never seen. Thresholds come from [`TAUS`].
pub fn random_query(rng: &mut ChaCha12Rng, corpus: &Corpus, vocab: usize, side: f64) -> Query {
    let tau_r = TAUS[rng.gen_range(0..TAUS.len())];
    let tau_t = TAUS[rng.gen_range(0..TAUS.len())];

    // exact copy of an object: exercises tau = 1 and identical float sums
    if !corpus.is_empty() && rng.gen_bool(0.08) {
        let o = &corpus.objects()[rng.gen_range(0..corpus.len())];
        let names: Vec<String> = o
            .tokens
            .iter()
            .map(|&t| corpus.tokens().name(t).to_string())
            .collect();
        return corpus.query(o.region, &names, tau_r, tau_t).unwrap();
    }

    let r = match rng.gen_range(0..10) {
        // anchored near an object
        0..=5 if !corpus.is_empty() => {
            let o = &corpus.objects()[rng.gen_range(0..corpus.len())];
            let grow = rng.gen_range(0.0..side / 8.0);
            let dx = rng.gen_range(-side / 10.0..side / 10.0);
            let dy = rng.gen_range(-side / 10.0..side / 10.0);
            region(
                o.region.xmin + dx - grow,
                o.region.ymin + dy - grow,
                o.region.xmax + dx + grow,
                o.region.ymax + dy + grow,
            )
        }
        6 => {
            // covers everything, including space margins
            region(-side, -side, 2.0 * side, 2.0 * side)
        }
        7 => {
            // entirely outside the populated space
            region(side * 2.0, side * 2.0, side * 2.5, side * 2.5)
        }
        8 => {
            let x = rng.gen_range(0.0..side);
            let y = rng.gen_range(0.0..side);
            region(x, y, x, y)
        }
        _ => random_region(rng, side),
    };

    let mut tokens: BTreeSet<String> = BTreeSet::new();
    match rng.gen_range(0..10) {
        0 => {} // empty token set
        1..=6 if !corpus.is_empty() => {
            let o = &corpus.objects()[rng.gen_range(0..corpus.len())];
            let names: Vec<&str> = o.tokens.iter().map(|&t| corpus.tokens().name(t)).collect();
            let take = rng.gen_range(0..=names.len());
            for _ in 0..take {
                tokens.insert(names[rng.gen_range(0..names.len().max(1))].to_string());
            }
            if rng.gen_bool(0.3) {
                tokens.insert(format!("w{}", rng.gen_range(0..vocab)));
            }
        }
        _ => {
            for _ in 0..rng.gen_range(1..=6) {
                tokens.insert(format!("w{}", rng.gen_range(0..vocab)));
            }
        }
    }
    if rng.gen_bool(0.08) {
        tokens.insert(format!("never-indexed-{}", rng.gen_range(0..100)));
    }
    let tokens: Vec<String> = tokens.into_iter().collect();
    corpus.query(r, &tokens, tau_r, tau_t).unwrap()
}

pub fn answer_ids(answers: &[seal::model::Answer]) -> Vec<u64> {
    answers.iter().map(|a| a.id).collect()
}
