//! Offline optimal replacement with a priori knowledge of the request
//! stream: the absolute upper bound on the achievable hit rate. On a miss
//! with a full cache the incoming chunk bypasses the cache entirely when
//! its next use lies beyond every resident's next use; otherwise the
//! resident with the farthest next use goes. A no-bypass toggle exists for
//! comparison.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use crate::kernel::{AccessOutcome, Capacity, ChunkId, ReplacementPolicy};

const NEVER: u64 = u64::MAX;

/// Per-position next-use index over a fixed stream, built in one backward
/// pass. `next_use[k]` is the position of the next request to the same
/// chunk after position k, or `NEVER`.
pub struct OptOracle {
    chunks: Vec<ChunkId>,
    next_use: Vec<u64>,
}

impl OptOracle {
    pub fn build(stream: &[ChunkId]) -> Self {
        let mut next_use = vec![NEVER; stream.len()];
        let mut last_seen: HashMap<ChunkId, u64> = HashMap::new();
        for (k, &chunk) in stream.iter().enumerate().rev() {
            if let Some(&pos) = last_seen.get(&chunk) {
                next_use[k] = pos;
            }
            last_seen.insert(chunk, k as u64);
        }
        OptOracle { chunks: stream.to_vec(), next_use }
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }
}

pub struct Opt {
    oracle: OptOracle,
    /// Fixed slot array; eviction ties at equal next use break toward the
    /// smaller slot index.
    slots: Vec<Option<ChunkId>>,
    free: BTreeSet<usize>,
    /// Residents ordered by (next use, slot): the last element is the
    /// farthest-future resident, smallest slot first among never-again.
    by_next: BTreeSet<(u64, Reverse<usize>)>,
    resident: HashMap<ChunkId, (usize, u64)>,
    bypass: bool,
    capacity: usize,
}

impl Opt {
    pub fn new(capacity: Capacity, oracle: OptOracle, bypass: bool) -> Self {
        let c = capacity.get();
        Opt {
            oracle,
            slots: vec![None; c],
            free: (0..c).collect(),
            by_next: BTreeSet::new(),
            resident: HashMap::new(),
            bypass,
            capacity: c,
        }
    }
}

impl ReplacementPolicy for Opt {
    fn access(&mut self, chunk: ChunkId, position: u64) -> AccessOutcome {
        let k = position as usize;
        assert!(k < self.oracle.len(), "access beyond the oracle's stream");
        debug_assert_eq!(self.oracle.chunks[k], chunk, "oracle built over a different stream");
        let next = self.oracle.next_use[k];

        if let Some(&(slot, old_next)) = self.resident.get(&chunk) {
            self.by_next.remove(&(old_next, Reverse(slot)));
            self.by_next.insert((next, Reverse(slot)));
            self.resident.insert(chunk, (slot, next));
            return AccessOutcome::hit();
        }

        if let Some(&slot) = self.free.iter().next() {
            self.free.remove(&slot);
            self.slots[slot] = Some(chunk);
            self.by_next.insert((next, Reverse(slot)));
            self.resident.insert(chunk, (slot, next));
            return AccessOutcome::miss(None, 0);
        }

        let &(far_next, Reverse(far_slot)) = self.by_next.iter().next_back().expect("full cache");
        if self.bypass && next > far_next {
            // Every resident is re-used sooner: caching x cannot pay off.
            return AccessOutcome::miss(None, 0);
        }
        let victim = self.slots[far_slot].expect("occupied slot");
        self.by_next.remove(&(far_next, Reverse(far_slot)));
        self.resident.remove(&victim);
        self.slots[far_slot] = Some(chunk);
        self.by_next.insert((next, Reverse(far_slot)));
        self.resident.insert(chunk, (far_slot, next));
        AccessOutcome::miss(Some(victim), 0)
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn resident_count(&self) -> usize {
        self.resident.len()
    }

    fn contains(&self, chunk: ChunkId) -> bool {
        self.resident.contains_key(&chunk)
    }

    fn name(&self) -> &'static str {
        if self.bypass {
            "opt"
        } else {
            "opt-no-bypass"
        }
    }
}
