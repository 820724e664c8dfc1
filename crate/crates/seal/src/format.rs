//! Binary index files.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic    b"SEAL"
//! version  u16            (currently 1)
//! kind     u8             0 token | 1 grid | 2 hybrid | 3 hierarchical
//! flags    u8             reserved, 0
//! header   kind-specific:
//!   grid:          space as 4 x f64, granularity u32
//!   hybrid:        space as 4 x f64, granularity u32, bucket block,
//!                  grid-order table: count u64, then per nonzero cell
//!                  (cell u64, object count u32), ascending by cell id
//!                  (bucketed lists cannot reproduce the order, so the
//!                  hybrid file carries it; grid files rebuild it from
//!                  posting-list lengths)
//!   hierarchical:  space as 4 x f64, tree height u32, bucket block,
//!                  token-grid sets: count u64, then per token
//!                  (token u32, grid count u32, per grid level u32 + cell u64);
//!                  grids are stored in their hierarchical order, so the
//!                  order rank of a grid is its position
//!   bucket block:  mode u8 (0 injective | 1 hashed), bucket count u64,
//!                  mix constants 2 x u64 (must equal the built-in constants;
//!                  they pin the hash so index files are portable)
//! directory: list count u64, then per list
//!            (element id u64, byte offset into data u64, posting count u64),
//!            sorted by ascending element id
//! data:      packed postings; token/grid lists hold (object u64, bound f64),
//!            hybrid and hierarchical lists hold
//!            (object u64, bound_t f64, bound_r f64)
//! ```
//!
//! Saving the same index twice produces byte-identical files, and
//! `load(save(x)) == x` including sort order and bounds.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Result, SealError};
use crate::hss::{GridNode, HierarchicalIndex, TokenGridSet};
use crate::index::{
    Bucketer, GridIndex, HybridIndex, HybridPosting, Posting, TokenIndex, MIX_CONST_1, MIX_CONST_2,
};
use crate::model::Region;
use crate::signature::{GridOrder, GridPartition};

pub const MAGIC: &[u8; 4] = b"SEAL";
pub const FORMAT_VERSION: u16 = 1;

/// Any persistable index.
#[derive(Debug, Clone, PartialEq)]
pub enum IndexFile {
    Token(TokenIndex),
    Grid(GridIndex),
    Hybrid(HybridIndex),
    Hierarchical(HierarchicalIndex),
}

impl IndexFile {
    pub fn kind(&self) -> &'static str {
        match self {
            IndexFile::Token(_) => "token",
            IndexFile::Grid(_) => "grid",
            IndexFile::Hybrid(_) => "hybrid",
            IndexFile::Hierarchical(_) => "hierarchical",
        }
    }

    fn kind_byte(&self) -> u8 {
        match self {
            IndexFile::Token(_) => 0,
            IndexFile::Grid(_) => 1,
            IndexFile::Hybrid(_) => 2,
            IndexFile::Hierarchical(_) => 3,
        }
    }
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new() -> Self {
        Writer { buf: Vec::new() }
    }
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn region(&mut self, r: &Region) {
        self.f64(r.xmin);
        self.f64(r.ymin);
        self.f64(r.xmax);
        self.f64(r.ymax);
    }
    fn bucketer(&mut self, b: &Bucketer) {
        match b {
            Bucketer::Injective => {
                self.u8(0);
                self.u64(0);
            }
            Bucketer::Hashed { buckets } => {
                self.u8(1);
                self.u64(*buckets);
            }
        }
        self.u64(MIX_CONST_1);
        self.u64(MIX_CONST_2);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(SealError::Truncated(format!(
                "unexpected end of file while reading {what}"
            )));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }
    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }
    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn region(&mut self, what: &str) -> Result<Region> {
        let xmin = self.f64(what)?;
        let ymin = self.f64(what)?;
        let xmax = self.f64(what)?;
        let ymax = self.f64(what)?;
        Region::new(xmin, ymin, xmax, ymax)
    }

    fn bucketer(&mut self) -> Result<Bucketer> {
        let mode = self.u8("bucket mode")?;
        let buckets = self.u64("bucket count")?;
        let m1 = self.u64("mix constant")?;
        let m2 = self.u64("mix constant")?;
        if (m1, m2) != (MIX_CONST_1, MIX_CONST_2) {
            return Err(SealError::Truncated(
                "bucket mix constants do not match this build".into(),
            ));
        }
        match mode {
            0 => Ok(Bucketer::Injective),
            1 => Bucketer::hashed(buckets),
            other => Err(SealError::Truncated(format!(
                "unknown bucket mode {other}"
            ))),
        }
    }
}

fn write_pure_lists(w: &mut Writer, lists: &BTreeMap<u64, Vec<Posting>>) {
    w.u64(lists.len() as u64);
    let stride = 16u64; // object u64 + bound f64
    let mut offset = 0u64;
    for (&element, list) in lists {
        w.u64(element);
        w.u64(offset);
        w.u64(list.len() as u64);
        offset += stride * list.len() as u64;
    }
    for list in lists.values() {
        for p in list {
            w.u64(p.object);
            w.f64(p.bound);
        }
    }
}

fn write_hybrid_lists(w: &mut Writer, lists: &BTreeMap<u64, Vec<HybridPosting>>) {
    w.u64(lists.len() as u64);
    let stride = 24u64; // object u64 + two f64 bounds
    let mut offset = 0u64;
    for (&element, list) in lists {
        w.u64(element);
        w.u64(offset);
        w.u64(list.len() as u64);
        offset += stride * list.len() as u64;
    }
    for list in lists.values() {
        for p in list {
            w.u64(p.object);
            w.f64(p.bound_t);
            w.f64(p.bound_r);
        }
    }
}

fn read_directory(r: &mut Reader) -> Result<Vec<(u64, u64, u64)>> {
    let count = r.u64("directory size")?;
    let mut dir = Vec::with_capacity(count.min(1 << 20) as usize);
    for _ in 0..count {
        let element = r.u64("directory element")?;
        let offset = r.u64("directory offset")?;
        let len = r.u64("directory length")?;
        dir.push((element, offset, len));
    }
    Ok(dir)
}

fn read_pure_lists(r: &mut Reader) -> Result<BTreeMap<u64, Vec<Posting>>> {
    let dir = read_directory(r)?;
    let data_start = r.pos;
    let mut lists = BTreeMap::new();
    for (element, offset, len) in dir {
        r.pos = data_start
            .checked_add(offset as usize)
            .ok_or_else(|| SealError::Truncated("directory offset overflow".into()))?;
        let mut list = Vec::with_capacity(len as usize);
        for _ in 0..len {
            let object = r.u64("posting object")?;
            let bound = r.f64("posting bound")?;
            list.push(Posting { object, bound });
        }
        if lists.insert(element, list).is_some() {
            return Err(SealError::Truncated(format!(
                "duplicate directory entry for element {element}"
            )));
        }
    }
    Ok(lists)
}

fn read_hybrid_lists(r: &mut Reader) -> Result<BTreeMap<u64, Vec<HybridPosting>>> {
    let dir = read_directory(r)?;
    let data_start = r.pos;
    let mut lists = BTreeMap::new();
    for (element, offset, len) in dir {
        r.pos = data_start
            .checked_add(offset as usize)
            .ok_or_else(|| SealError::Truncated("directory offset overflow".into()))?;
        let mut list = Vec::with_capacity(len as usize);
        for _ in 0..len {
            let object = r.u64("posting object")?;
            let bound_t = r.f64("posting textual bound")?;
            let bound_r = r.f64("posting spatial bound")?;
            list.push(HybridPosting {
                object,
                bound_t,
                bound_r,
            });
        }
        if lists.insert(element, list).is_some() {
            return Err(SealError::Truncated(format!(
                "duplicate directory entry for element {element}"
            )));
        }
    }
    Ok(lists)
}

/// Serialize an index to bytes.
pub fn to_bytes(index: &IndexFile) -> Vec<u8> {
    let mut w = Writer::new();
    w.buf.extend_from_slice(MAGIC);
    w.u16(FORMAT_VERSION);
    w.u8(index.kind_byte());
    w.u8(0);
    match index {
        IndexFile::Token(idx) => {
            write_pure_lists(&mut w, &idx.lists);
        }
        IndexFile::Grid(idx) => {
            w.region(&idx.grid.space);
            w.u32(idx.grid.p);
            write_pure_lists(&mut w, &idx.lists);
        }
        IndexFile::Hybrid(idx) => {
            w.region(&idx.grid.space);
            w.u32(idx.grid.p);
            w.bucketer(&idx.bucketer);
            let entries = idx.order.entries();
            w.u64(entries.len() as u64);
            for (cell, count) in entries {
                w.u64(cell);
                w.u32(count);
            }
            write_hybrid_lists(&mut w, &idx.lists);
        }
        IndexFile::Hierarchical(idx) => {
            w.region(&idx.space);
            w.u32(idx.height);
            w.bucketer(&idx.bucketer);
            w.u64(idx.token_grids.len() as u64);
            for (&token, set) in &idx.token_grids {
                w.u32(token);
                w.u32(set.grids.len() as u32);
                for g in &set.grids {
                    w.u32(g.level);
                    w.u64(g.cell);
                }
            }
            write_hybrid_lists(&mut w, &idx.lists);
        }
    }
    w.buf
}

/// Parse an index from bytes.
pub fn from_bytes(bytes: &[u8]) -> Result<IndexFile> {
    let mut r = Reader::new(bytes);
    if r.take(4, "magic")? != MAGIC {
        return Err(SealError::BadMagic);
    }
    let version = r.u16("version")?;
    if version != FORMAT_VERSION {
        return Err(SealError::BadVersion(version));
    }
    let kind = r.u8("kind")?;
    let _flags = r.u8("flags")?;
    match kind {
        0 => Ok(IndexFile::Token(TokenIndex {
            lists: read_pure_lists(&mut r)?,
        })),
        1 => {
            let space = r.region("grid space")?;
            let p = r.u32("grid granularity")?;
            Ok(IndexFile::Grid(GridIndex::from_lists(
                GridPartition::new(space, p)?,
                read_pure_lists(&mut r)?,
            )))
        }
        2 => {
            let space = r.region("grid space")?;
            let p = r.u32("grid granularity")?;
            let bucketer = r.bucketer()?;
            let n = r.u64("grid order size")?;
            let mut entries = Vec::with_capacity(n.min(1 << 20) as usize);
            for _ in 0..n {
                let cell = r.u64("grid order cell")?;
                let count = r.u32("grid order count")?;
                entries.push((cell, count));
            }
            Ok(IndexFile::Hybrid(HybridIndex {
                grid: GridPartition::new(space, p)?,
                order: GridOrder::from_list_lengths(entries),
                bucketer,
                lists: read_hybrid_lists(&mut r)?,
            }))
        }
        3 => {
            let space = r.region("space")?;
            let height = r.u32("tree height")?;
            let bucketer = r.bucketer()?;
            let token_count = r.u64("token grid set count")?;
            let mut token_grids = BTreeMap::new();
            for _ in 0..token_count {
                let token = r.u32("token id")?;
                let n = r.u32("grid count")?;
                let mut grids = Vec::with_capacity(n as usize);
                for _ in 0..n {
                    let level = r.u32("grid level")?;
                    let cell = r.u64("grid cell")?;
                    grids.push(GridNode { level, cell });
                }
                token_grids.insert(token, TokenGridSet { token, grids });
            }
            Ok(IndexFile::Hierarchical(HierarchicalIndex {
                space,
                height,
                bucketer,
                token_grids,
                lists: read_hybrid_lists(&mut r)?,
            }))
        }
        other => Err(SealError::Truncated(format!("unknown index kind {other}"))),
    }
}

/// Write an index file. Identical indexes produce byte-identical files.
pub fn save(index: &IndexFile, path: &Path) -> Result<()> {
    std::fs::write(path, to_bytes(index))?;
    Ok(())
}

/// Read an index file back; the round trip is bit-exact.
pub fn load(path: &Path) -> Result<IndexFile> {
    let bytes = std::fs::read(path)?;
    from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hss::{build_hierarchical_index, Budgets};
    use crate::index::{build_grid_index, build_hybrid_index, build_token_index};
    use crate::testutil::{fixture_corpus, fixture_space};

    fn fixture_indexes() -> Vec<IndexFile> {
        let corpus = fixture_corpus();
        let grid = || GridPartition::new(fixture_space(), 2).unwrap();
        vec![
            IndexFile::Token(build_token_index(&corpus)),
            IndexFile::Grid(build_grid_index(&corpus, grid())),
            IndexFile::Hybrid(build_hybrid_index(&corpus, grid(), Bucketer::Injective)),
            IndexFile::Hybrid(build_hybrid_index(
                &corpus,
                grid(),
                Bucketer::hashed(16).unwrap(),
            )),
            IndexFile::Hierarchical(
                build_hierarchical_index(&corpus, &Budgets::uniform(4), Bucketer::Injective, 3)
                    .unwrap(),
            ),
        ]
    }

    #[test]
    fn round_trip_every_kind() {
        for idx in fixture_indexes() {
            let bytes = to_bytes(&idx);
            let back = from_bytes(&bytes).unwrap();
            assert_eq!(back, idx, "round trip changed a {} index", idx.kind());
            // saving again is byte-identical
            assert_eq!(to_bytes(&back), bytes);
        }
    }

    #[test]
    fn empty_index_round_trips() {
        let idx = IndexFile::Token(TokenIndex::default());
        let back = from_bytes(&to_bytes(&idx)).unwrap();
        assert_eq!(back, idx);
    }

    #[test]
    fn corrupted_magic_is_rejected() {
        let mut bytes = to_bytes(&fixture_indexes()[0]);
        bytes[0] = b'X';
        assert!(matches!(from_bytes(&bytes), Err(SealError::BadMagic)));
    }

    #[test]
    fn wrong_version_is_rejected() {
        let mut bytes = to_bytes(&fixture_indexes()[0]);
        bytes[4] = 0xFF;
        bytes[5] = 0xFF;
        assert!(matches!(
            from_bytes(&bytes),
            Err(SealError::BadVersion(0xFFFF))
        ));
    }

    #[test]
    fn truncation_is_rejected() {
        for idx in fixture_indexes() {
            let bytes = to_bytes(&idx);
            let cut = &bytes[..bytes.len() - 5];
            assert!(
                matches!(from_bytes(cut), Err(SealError::Truncated(_))),
                "truncated {} index was accepted",
                idx.kind()
            );
        }
    }

    #[test]
    fn save_load_files(){
        let dir = tempfile::tempdir().unwrap();
        for (i, idx) in fixture_indexes().into_iter().enumerate() {
            let path = dir.path().join(format!("idx{i}.seal"));
            save(&idx, &path).unwrap();
            assert_eq!(load(&path).unwrap(), idx);
        }
    }
}
