//! Hierarchical hybrid signature selection: per-token grid sets chosen from
//! a quadtree under a size budget, minimizing grid error.
//!
//! Each token gets its own antichain cut of the grid tree (pairwise disjoint
//! nodes whose cells tile the space). Objects containing the token index
//! their regions against that cut, so dense tokens can afford fine grids
//! while sparse tokens keep coarse ones.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use crate::error::{Result, SealError};
use crate::index::{collect_hybrid_lists, merge_hybrid_posting, Bucketer, HybridPosting};
use crate::model::{intersection_area, Corpus, Region};
use crate::signature::{suffix_bounds, textual_signature, ElementKind, OrderedSignature, SignatureElement};

/// Default grid-tree height cap (level `h` is a 2^h x 2^h partition).
pub const DEFAULT_TREE_HEIGHT: u32 = 13;

/// One node of the grid tree: a cell of the 2^level x 2^level partition.
/// Cell ids are row-major within a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridNode {
    pub level: u32,
    pub cell: u64,
}

impl GridNode {
    pub const ROOT: GridNode = GridNode { level: 0, cell: 0 };

    /// Level offset in the linear quadtree numbering: (4^level - 1) / 3.
    fn level_offset(level: u32) -> u64 {
        ((1u64 << (2 * level)) - 1) / 3
    }

    /// Id unique across levels, used as the grid half of a hybrid bucket key.
    pub fn linear_id(&self) -> u64 {
        Self::level_offset(self.level) + self.cell
    }

    pub fn children(&self) -> [GridNode; 4] {
        let side = 1u64 << self.level;
        let row = self.cell / side;
        let col = self.cell % side;
        let child = |dr: u64, dc: u64| GridNode {
            level: self.level + 1,
            cell: (2 * row + dr) * (2 * side) + (2 * col + dc),
        };
        [child(0, 0), child(0, 1), child(1, 0), child(1, 1)]
    }

    pub fn region(&self, space: &Region) -> Region {
        let side = 1u64 << self.level;
        let w = (space.xmax - space.xmin) / side as f64;
        let h = (space.ymax - space.ymin) / side as f64;
        let row = (self.cell / side) as f64;
        let col = (self.cell % side) as f64;
        Region {
            xmin: space.xmin + col * w,
            ymin: space.ymin + row * h,
            xmax: space.xmin + (col + 1.0) * w,
            ymax: space.ymin + (row + 1.0) * h,
        }
    }
}

/// Expected inverted-list size of a grid cell under the uniform assumption:
/// the sum over intersecting objects of `|g ∩ o.R| / |g|`.
pub fn expected_list_size(g: &Region, objects: &[Region]) -> f64 {
    let area = g.area();
    if area <= 0.0 {
        return 0.0;
    }
    objects
        .iter()
        .map(|o| intersection_area(g, o) / area)
        .sum()
}

/// Grid error of an internal node, approximated from its four children:
/// the sum of squared deviations of child expected list sizes from the
/// node's own. Leaves have error zero.
pub fn node_error(node: &GridNode, space: &Region, objects: &[Region], height: u32) -> f64 {
    if node.level >= height {
        return 0.0;
    }
    let own = expected_list_size(&node.region(space), objects);
    node.children()
        .iter()
        .map(|c| {
            let d = own - expected_list_size(&c.region(space), objects);
            d * d
        })
        .sum()
}

/// The grids selected for one token, in their hierarchical global order:
/// ascending level, then ascending count of intersecting object regions,
/// then cell id. The rank of a grid is its position in `grids`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenGridSet {
    pub token: u32,
    pub grids: Vec<GridNode>,
}

impl TokenGridSet {
    pub fn rank_of(&self) -> HashMap<GridNode, usize> {
        self.grids
            .iter()
            .enumerate()
            .map(|(i, &g)| (g, i))
            .collect()
    }
}

struct QueueEntry {
    error: f64,
    node: GridNode,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-error first; ties dequeue the shallower, lower-numbered node
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.node.cmp(&self.node))
    }
}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy selection of at most `m_t` hierarchical grids for one token.
///
/// Nodes leave a max-error priority queue; a leaf is selected outright, an
/// internal node is split into its four children only while the selection
/// can still fit the budget, otherwise it is kept undivided.
pub fn hss_greedy(
    token: u32,
    objects: &[Region],
    space: &Region,
    m_t: usize,
    height: u32,
) -> Result<TokenGridSet> {
    if m_t <= 1 {
        return Err(SealError::InvalidParameter(format!(
            "hierarchical grid budget must exceed 1, got {m_t}"
        )));
    }
    let mut selected: Vec<GridNode> = Vec::new();
    let mut queue = BinaryHeap::new();
    queue.push(QueueEntry {
        error: node_error(&GridNode::ROOT, space, objects, height),
        node: GridNode::ROOT,
    });
    while let Some(QueueEntry { node, .. }) = queue.pop() {
        if node.level >= height {
            selected.push(node);
            continue;
        }
        // splitting replaces this node by four children; refuse when the
        // eventual selection would overshoot the budget
        if selected.len() + queue.len() + 4 > m_t {
            selected.push(node);
            continue;
        }
        for child in node.children() {
            queue.push(QueueEntry {
                error: node_error(&child, space, objects, height),
                node: child,
            });
        }
    }
    debug_assert!(selected.len() <= m_t);
    sort_hierarchical(&mut selected, space, objects);
    Ok(TokenGridSet {
        token,
        grids: selected,
    })
}

fn sort_hierarchical(nodes: &mut [GridNode], space: &Region, objects: &[Region]) {
    let count = |n: &GridNode| {
        objects
            .iter()
            .filter(|o| intersection_area(&n.region(space), o) > 0.0)
            .count()
    };
    nodes.sort_by_key(|n| (n.level, count(n), n.cell));
}

/// Hybrid index whose grid half comes from per-token hierarchical grid sets.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchicalIndex {
    pub space: Region,
    pub height: u32,
    pub bucketer: Bucketer,
    pub token_grids: BTreeMap<u32, TokenGridSet>,
    pub lists: BTreeMap<u64, Vec<HybridPosting>>,
}

impl HierarchicalIndex {
    /// The query's grid signature over one token's grid set: intersecting
    /// nodes weighted by overlap area, in the stored hierarchical order.
    pub fn query_signature(&self, set: &TokenGridSet, region: &Region) -> OrderedSignature {
        let elements = set
            .grids
            .iter()
            .filter_map(|g| {
                let area = intersection_area(&g.region(&self.space), region);
                (area > 0.0).then(|| SignatureElement {
                    id: g.linear_id(),
                    weight: area,
                })
            })
            .collect();
        OrderedSignature {
            kind: ElementKind::Grid,
            elements,
        }
    }
}

/// Per-token grid budgets: one value for every token, or explicit overrides.
#[derive(Debug, Clone)]
pub struct Budgets {
    pub default: usize,
    pub per_token: HashMap<u32, usize>,
}

impl Budgets {
    pub fn uniform(m_t: usize) -> Self {
        Budgets {
            default: m_t,
            per_token: HashMap::new(),
        }
    }

    pub fn of(&self, token: u32) -> usize {
        self.per_token.get(&token).copied().unwrap_or(self.default)
    }
}

/// Build the hierarchical hybrid index: select a grid set per corpus token
/// (budget below 2 falls back to the root-only set), then index every
/// (object, token) pair against that token's grids.
pub fn build_hierarchical_index(
    corpus: &Corpus,
    budgets: &Budgets,
    bucketer: Bucketer,
    height: u32,
) -> Result<HierarchicalIndex> {
    let space = corpus.space();
    // objects per token, in corpus order
    let mut by_token: BTreeMap<u32, Vec<Region>> = BTreeMap::new();
    for o in corpus.objects() {
        for &t in &o.tokens {
            by_token.entry(t).or_default().push(o.region);
        }
    }
    let mut token_grids = BTreeMap::new();
    for (&t, regions) in &by_token {
        let m_t = budgets.of(t);
        let set = if m_t <= 1 {
            TokenGridSet {
                token: t,
                grids: vec![GridNode::ROOT],
            }
        } else {
            hss_greedy(t, regions, &space, m_t, height)?
        };
        token_grids.insert(t, set);
    }

    let mut acc: HashMap<(u64, u64), (f64, f64)> = HashMap::new();
    for o in corpus.objects() {
        let t_sig = textual_signature(&o.tokens, corpus.tokens());
        let t_bounds = suffix_bounds(&t_sig);
        for (t, &bt) in t_sig.elements.iter().zip(&t_bounds) {
            let set = &token_grids[&(t.id as u32)];
            // the object's grid signature over this token's cut
            let mut elems: Vec<(GridNode, f64)> = set
                .grids
                .iter()
                .filter_map(|g| {
                    let area = intersection_area(&g.region(&space), &o.region);
                    (area > 0.0).then_some((*g, area))
                })
                .collect();
            let rank = set.rank_of();
            elems.sort_by_key(|(g, _)| rank[g]);
            let mut tail = 0.0;
            let mut bounds = vec![0.0; elems.len()];
            for (i, (_, w)) in elems.iter().enumerate().rev() {
                tail += w;
                bounds[i] = tail;
            }
            for ((g, _), &br) in elems.iter().zip(&bounds) {
                let bucket = bucketer.bucket(t.id as u32, g.linear_id());
                merge_hybrid_posting(&mut acc, bucket, o.id, bt, br);
            }
        }
    }
    Ok(HierarchicalIndex {
        space,
        height,
        bucketer,
        token_grids,
        lists: collect_hybrid_lists(acc),
    })
}
