//! Shared vocabulary for every replacement policy: chunk identity, access
//! outcomes, capacity, and the id→slot directory used by the array-based
//! policies for O(1) lookup.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Identity of a cacheable chunk. Payload bytes are never modeled.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChunkId(pub u64);

impl fmt::Display for ChunkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Chunk-index bits in a flattened (content, chunk index) id.
pub const CHUNK_INDEX_BITS: u32 = 20;

/// Builds a chunk id from a (content, chunk index) pair. The low 20 bits
/// carry the chunk index, so contents up to 2^20 chunks (1.5 GB at 1.5 KB
/// chunks) flatten without collision.
pub fn chunk_of_content(content: u64, index: u64) -> ChunkId {
    debug_assert!(index < (1 << CHUNK_INDEX_BITS), "chunk index overflow");
    ChunkId((content << CHUNK_INDEX_BITS) | index)
}

/// One timestamped access. `virtual_time` is a 0-based request count; the
/// k-th request of a stream carries `virtual_time == k` after re-indexing.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Request {
    pub chunk: ChunkId,
    pub virtual_time: u64,
}

/// Classification of one access.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AccessKind {
    /// The chunk was resident.
    Hit,
    /// The chunk was neither resident nor in any history list.
    Miss,
    /// The chunk was found in a history (ghost) list. Counts as a miss for
    /// hit-rate purposes; reported separately so adaptation can be observed.
    GhostHit,
}

/// Result of driving one request through a policy.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct AccessOutcome {
    pub kind: AccessKind,
    /// Chunk dropped from the resident set by this access, if any.
    pub evicted: Option<ChunkId>,
    /// CLOCK hand rotations performed while selecting a victim. Zero for
    /// non-CLOCK policies and for hits.
    pub hand_movements: u64,
}

impl AccessOutcome {
    pub fn hit() -> Self {
        AccessOutcome { kind: AccessKind::Hit, evicted: None, hand_movements: 0 }
    }

    pub fn miss(evicted: Option<ChunkId>, hand_movements: u64) -> Self {
        AccessOutcome { kind: AccessKind::Miss, evicted, hand_movements }
    }

    pub fn ghost_hit(evicted: Option<ChunkId>, hand_movements: u64) -> Self {
        AccessOutcome { kind: AccessKind::GhostHit, evicted, hand_movements }
    }

    /// Hits are the only outcome that counts toward the hit rate.
    pub fn is_hit(&self) -> bool {
        self.kind == AccessKind::Hit
    }
}

/// Maximum number of resident chunks. Always at least one.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Capacity(usize);

impl Capacity {
    pub fn new(c: usize) -> Result<Self, KernelError> {
        if c == 0 {
            return Err(KernelError::ZeroCapacity);
        }
        Ok(Capacity(c))
    }

    pub fn get(&self) -> usize {
        self.0
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("cache capacity must be at least 1")]
    ZeroCapacity,
}

/// Region of a four-list directory entry.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Region {
    /// Recency top list (resident, seen once since admission).
    RecentTop,
    /// Frequency top list (resident, re-referenced).
    FrequentTop,
    /// History of chunks evicted from the recency list.
    RecentGhost,
    /// History of chunks evicted from the frequency list.
    FrequentGhost,
}

impl Region {
    pub fn is_resident(&self) -> bool {
        matches!(self, Region::RecentTop | Region::FrequentTop)
    }

    /// Short label used by diagnostic dumps: T1, T2, B1, B2.
    pub fn label(&self) -> &'static str {
        match self {
            Region::RecentTop => "T1",
            Region::FrequentTop => "T2",
            Region::RecentGhost => "B1",
            Region::FrequentGhost => "B2",
        }
    }
}

/// Id→(region, slot) index. Every swap, move, and evict updates the index
/// together with the owning array, so a lookup is always current.
#[derive(Clone, Debug, Default)]
pub struct Directory {
    map: HashMap<ChunkId, (Region, usize)>,
}

impl Directory {
    pub fn new() -> Self {
        Directory { map: HashMap::new() }
    }

    pub fn lookup(&self, chunk: ChunkId) -> Option<(Region, usize)> {
        self.map.get(&chunk).copied()
    }

    pub fn insert(&mut self, chunk: ChunkId, region: Region, slot: usize) {
        let prev = self.map.insert(chunk, (region, slot));
        debug_assert!(prev.is_none(), "chunk {chunk} already in directory");
    }

    pub fn relocate(&mut self, chunk: ChunkId, region: Region, slot: usize) {
        let entry = self.map.get_mut(&chunk).expect("relocate of untracked chunk");
        *entry = (region, slot);
    }

    pub fn remove(&mut self, chunk: ChunkId) {
        let prev = self.map.remove(&chunk);
        debug_assert!(prev.is_some(), "remove of untracked chunk");
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Uniform contract every policy implements. A policy instance is
/// single-threaded; instances are independent and may be driven in parallel.
pub trait ReplacementPolicy: Send {
    /// Drive one access. `position` is the 0-based index of the request in
    /// the stream the policy is replaying; only the offline policy uses it.
    ///
    /// Post-conditions: a resident chunk yields `Hit` and stays resident; a
    /// non-resident chunk yields `Miss` or `GhostHit` and becomes resident
    /// (offline OPT may decline insertion); at most one eviction per access;
    /// the resident count never exceeds the capacity.
    fn access(&mut self, chunk: ChunkId, position: u64) -> AccessOutcome;

    fn capacity(&self) -> usize;

    fn resident_count(&self) -> usize;

    fn contains(&self, chunk: ChunkId) -> bool;

    fn name(&self) -> &'static str;

    /// Current target ratio q = p/c for policies with an adaptive (or
    /// pinned) split point; `None` for everything else.
    fn target_ratio(&self) -> Option<f64> {
        None
    }
}
