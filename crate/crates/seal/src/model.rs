//! Domain types and exact similarity functions.
//!
//! An object pairs an axis-aligned region (MBR) with a weighted token set;
//! a query adds two thresholds. Everything here is exact arithmetic: these
//! functions are both the verification step of the engine and the ground
//! truth that every filter is tested against.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Result, SealError};

/// Axis-aligned rectangle with `xmin <= xmax` and `ymin <= ymax`.
/// Zero-extent edges are permitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Region {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        if !(xmin <= xmax && ymin <= ymax)
            || !xmin.is_finite()
            || !ymin.is_finite()
            || !xmax.is_finite()
            || !ymax.is_finite()
        {
            return Err(SealError::InvalidRegion {
                xmin,
                ymin,
                xmax,
                ymax,
            });
        }
        Ok(Region {
            xmin,
            ymin,
            xmax,
            ymax,
        })
    }

    pub fn area(&self) -> f64 {
        (self.xmax - self.xmin) * (self.ymax - self.ymin)
    }

    /// Clamp to `other`, or `None` if the clipped region would be empty
    /// (edge contact collapses to a degenerate region and is kept).
    pub fn clip(&self, other: &Region) -> Option<Region> {
        let xmin = self.xmin.max(other.xmin);
        let ymin = self.ymin.max(other.ymin);
        let xmax = self.xmax.min(other.xmax);
        let ymax = self.ymax.min(other.ymax);
        if xmin <= xmax && ymin <= ymax {
            Some(Region {
                xmin,
                ymin,
                xmax,
                ymax,
            })
        } else {
            None
        }
    }

    /// Smallest region covering both.
    pub fn mbr_with(&self, other: &Region) -> Region {
        Region {
            xmin: self.xmin.min(other.xmin),
            ymin: self.ymin.min(other.ymin),
            xmax: self.xmax.max(other.xmax),
            ymax: self.ymax.max(other.ymax),
        }
    }
}

/// Overlap area of two regions. Edge-touching regions return 0.
pub fn intersection_area(a: &Region, b: &Region) -> f64 {
    let w = (a.xmax.min(b.xmax) - a.xmin.max(b.xmin)).max(0.0);
    let h = (a.ymax.min(b.ymax) - a.ymin.max(b.ymin)).max(0.0);
    w * h
}

/// Spatial Jaccard similarity: overlap area over union area.
///
/// When both areas and the intersection are zero the ratio is 0/0; the
/// degenerate-point rule applies: 1 for coordinate-identical regions, else 0.
pub fn spatial_jaccard(a: &Region, b: &Region) -> f64 {
    let inter = intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return if a == b { 1.0 } else { 0.0 };
    }
    inter / union
}

/// Dense token id assigned in first-seen corpus order.
pub type TokenId = u32;

#[derive(Debug, Clone)]
struct TokenEntry {
    name: String,
    count: u32,
    weight: f64,
}

/// Token dictionary with corpus counts and idf weights, frozen at build time.
///
/// `weight(t) = ln(|O| / count(t))`, so a token present in every object
/// weighs zero and a token unique to one object weighs `ln(|O|)`.
#[derive(Debug, Clone, Default)]
pub struct TokenTable {
    by_name: HashMap<String, TokenId>,
    entries: Vec<TokenEntry>,
    corpus_size: usize,
}

impl TokenTable {
    /// Build from per-object token lists, in corpus order. Ids are dense and
    /// stable across runs for identical input order.
    pub fn build<'a, I, J>(objects: I) -> Self
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = &'a str>,
    {
        let mut table = TokenTable::default();
        for tokens in objects {
            table.corpus_size += 1;
            let mut seen = BTreeSet::new();
            for tok in tokens {
                let id = *table.by_name.entry(tok.to_string()).or_insert_with(|| {
                    table.entries.push(TokenEntry {
                        name: tok.to_string(),
                        count: 0,
                        weight: 0.0,
                    });
                    (table.entries.len() - 1) as TokenId
                });
                // per-object de-duplication: count is document frequency
                if seen.insert(id) {
                    table.entries[id as usize].count += 1;
                }
            }
        }
        let n = table.corpus_size as f64;
        for e in &mut table.entries {
            debug_assert!(e.count >= 1);
            e.weight = (n / e.count as f64).ln();
        }
        table
    }

    pub fn lookup(&self, name: &str) -> Option<TokenId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: TokenId) -> &str {
        &self.entries[id as usize].name
    }

    pub fn weight(&self, id: TokenId) -> f64 {
        self.entries[id as usize].weight
    }

    pub fn count(&self, id: TokenId) -> u32 {
        self.entries[id as usize].count
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    /// Weight given to a query token absent from the corpus: the maximum
    /// idf `ln(|O| / 1)`. Such a token can only enlarge the union.
    pub fn unknown_weight(&self) -> f64 {
        if self.corpus_size == 0 {
            0.0
        } else {
            (self.corpus_size as f64).ln()
        }
    }

    pub fn total_weight(&self, ids: &BTreeSet<TokenId>) -> f64 {
        ids.iter().map(|&t| self.weight(t)).sum()
    }
}

/// A spatio-textual object: region plus duplicate-free token set.
#[derive(Debug, Clone, PartialEq)]
pub struct STObject {
    pub id: u64,
    pub region: Region,
    pub tokens: BTreeSet<TokenId>,
}

/// A search query: region, token set, and the two similarity thresholds.
///
/// Tokens that do not occur in the corpus are kept only as aggregate weight
/// (`unknown_weight`): they contribute to the Jaccard union and to the
/// textual threshold `c_T` but can never appear in an intersection.
#[derive(Debug, Clone)]
pub struct Query {
    pub region: Region,
    pub tokens: BTreeSet<TokenId>,
    pub unknown_count: u32,
    pub unknown_weight: f64,
    pub tau_r: f64,
    pub tau_t: f64,
}

impl Query {
    pub fn new(region: Region, tokens: BTreeSet<TokenId>, tau_r: f64, tau_t: f64) -> Result<Self> {
        Self::with_unknown(region, tokens, 0, 0.0, tau_r, tau_t)
    }

    pub fn with_unknown(
        region: Region,
        tokens: BTreeSet<TokenId>,
        unknown_count: u32,
        unknown_weight: f64,
        tau_r: f64,
        tau_t: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau_r) || !(0.0..=1.0).contains(&tau_t) {
            return Err(SealError::InvalidParameter(format!(
                "thresholds must lie in [0,1], got tau_r={tau_r}, tau_t={tau_t}"
            )));
        }
        Ok(Query {
            region,
            tokens,
            unknown_count,
            unknown_weight,
            tau_r,
            tau_t,
        })
    }

    /// Resolve token strings against the corpus table; unresolved tokens are
    /// folded into the unknown-weight mass.
    pub fn from_tokens(
        region: Region,
        tokens: &[String],
        table: &TokenTable,
        tau_r: f64,
        tau_t: f64,
    ) -> Result<Self> {
        let mut known = BTreeSet::new();
        let mut unknown = BTreeSet::new();
        for t in tokens {
            match table.lookup(t) {
                Some(id) => {
                    known.insert(id);
                }
                None => {
                    unknown.insert(t.as_str());
                }
            }
        }
        Self::with_unknown(
            region,
            known,
            unknown.len() as u32,
            unknown.len() as f64 * table.unknown_weight(),
            tau_r,
            tau_t,
        )
    }

    /// Total idf weight of the query's token set, unknown tokens included.
    pub fn token_weight_total(&self, table: &TokenTable) -> f64 {
        table.total_weight(&self.tokens) + self.unknown_weight
    }

    pub fn spatial_similarity(&self, o: &STObject) -> f64 {
        spatial_jaccard(&self.region, &o.region)
    }

    pub fn textual_similarity(&self, o: &STObject, table: &TokenTable) -> f64 {
        let mut inter = 0.0;
        let mut union = self.unknown_weight;
        for &t in self.tokens.union(&o.tokens) {
            union += table.weight(t);
        }
        for &t in self.tokens.intersection(&o.tokens) {
            inter += table.weight(t);
        }
        if union <= 0.0 {
            // 0/0: identical (or weightless-identical) sets count as a match,
            // anything else does not. Both-empty is the common case.
            return if self.tokens == o.tokens && self.unknown_count == 0 {
                1.0
            } else {
                0.0
            };
        }
        inter / union
    }

    pub fn matches(&self, o: &STObject, table: &TokenTable) -> Option<(f64, f64)> {
        let sim_r = self.spatial_similarity(o);
        if sim_r < self.tau_r {
            return None;
        }
        let sim_t = self.textual_similarity(o, table);
        if sim_t < self.tau_t {
            return None;
        }
        Some((sim_r, sim_t))
    }
}

/// Weighted Jaccard coefficient of two token-id sets.
pub fn textual_jaccard(a: &BTreeSet<TokenId>, b: &BTreeSet<TokenId>, table: &TokenTable) -> f64 {
    let inter: f64 = a.intersection(b).map(|&t| table.weight(t)).sum();
    let union: f64 = a.union(b).map(|&t| table.weight(t)).sum();
    if union <= 0.0 {
        return if a == b { 1.0 } else { 0.0 };
    }
    inter / union
}

/// One verified answer with its exact similarity values.
#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    pub id: u64,
    pub sim_r: f64,
    pub sim_t: f64,
}

/// Answers sorted by ascending object id; every member satisfies both thresholds.
pub type AnswerSet = Vec<Answer>;

/// Immutable corpus: objects, the frozen token table, and the space MBR.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    objects: Vec<STObject>,
    tokens: TokenTable,
    by_id: HashMap<u64, usize>,
    space: Option<Region>,
}

impl Corpus {
    /// Build from `(id, region, token strings)` records in input order.
    pub fn from_records<S: AsRef<str>>(records: Vec<(u64, Region, Vec<S>)>) -> Result<Self> {
        let table = TokenTable::build(
            records
                .iter()
                .map(|(_, _, toks)| toks.iter().map(|s| s.as_ref())),
        );
        let mut objects = Vec::with_capacity(records.len());
        let mut by_id = HashMap::with_capacity(records.len());
        let mut space: Option<Region> = None;
        for (id, region, toks) in &records {
            if by_id.insert(*id, objects.len()).is_some() {
                return Err(SealError::DuplicateObject(*id));
            }
            let tokens = toks
                .iter()
                .map(|s| table.lookup(s.as_ref()).expect("token was just indexed"))
                .collect();
            space = Some(match space {
                Some(s) => s.mbr_with(region),
                None => *region,
            });
            objects.push(STObject {
                id: *id,
                region: *region,
                tokens,
            });
        }
        Ok(Corpus {
            objects,
            tokens: table,
            by_id,
            space,
        })
    }

    pub fn objects(&self) -> &[STObject] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn tokens(&self) -> &TokenTable {
        &self.tokens
    }

    pub fn get(&self, id: u64) -> Option<&STObject> {
        self.by_id.get(&id).map(|&i| &self.objects[i])
    }

    /// MBR of all object regions; `[0,0]x[0,0]` for an empty corpus.
    pub fn space(&self) -> Region {
        self.space.unwrap_or(Region {
            xmin: 0.0,
            ymin: 0.0,
            xmax: 0.0,
            ymax: 0.0,
        })
    }

    pub fn query(&self, region: Region, tokens: &[String], tau_r: f64, tau_t: f64) -> Result<Query> {
        Query::from_tokens(region, tokens, &self.tokens, tau_r, tau_t)
    }
}

/// Exact verification: keep the candidates passing both thresholds.
/// Candidates are checked in ascending id order for reproducible output.
pub fn verify(query: &Query, candidates: &[u64], corpus: &Corpus) -> Result<AnswerSet> {
    let mut ids: Vec<u64> = candidates.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let mut answers = Vec::new();
    for id in ids {
        let obj = corpus.get(id).ok_or(SealError::UnknownObject(id))?;
        if let Some((sim_r, sim_t)) = query.matches(obj, &corpus.tokens) {
            answers.push(Answer { id, sim_r, sim_t });
        }
    }
    Ok(answers)
}

/// Linear scan applying the exact similarity definitions: the ground truth
/// for every filtering method.
pub fn brute_force_search(query: &Query, corpus: &Corpus) -> AnswerSet {
    let mut answers: Vec<Answer> = corpus
        .objects
        .iter()
        .filter_map(|o| {
            query
                .matches(o, &corpus.tokens)
                .map(|(sim_r, sim_t)| Answer {
                    id: o.id,
                    sim_r,
                    sim_t,
                })
        })
        .collect();
    answers.sort_by_key(|a| a.id);
    answers
}
