//! First-in, first-out. Hits leave the queue untouched; a miss on a full
//! cache evicts the oldest insertion.

use std::collections::{HashSet, VecDeque};

use crate::kernel::{AccessOutcome, Capacity, ChunkId, ReplacementPolicy};

pub struct Fifo {
    queue: VecDeque<ChunkId>,
    resident: HashSet<ChunkId>,
    capacity: usize,
}

impl Fifo {
    pub fn new(capacity: Capacity) -> Self {
        let c = capacity.get();
        Fifo { queue: VecDeque::with_capacity(c), resident: HashSet::with_capacity(c), capacity: c }
    }
}

impl ReplacementPolicy for Fifo {
    fn access(&mut self, chunk: ChunkId, _position: u64) -> AccessOutcome {
        if self.resident.contains(&chunk) {
            return AccessOutcome::hit();
        }
        let mut evicted = None;
        if self.queue.len() == self.capacity {
            let victim = self.queue.pop_front().expect("full queue");
            self.resident.remove(&victim);
            evicted = Some(victim);
        }
        self.queue.push_back(chunk);
        self.resident.insert(chunk);
        AccessOutcome::miss(evicted, 0)
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn resident_count(&self) -> usize {
        self.queue.len()
    }

    fn contains(&self, chunk: ChunkId) -> bool {
        self.resident.contains(&chunk)
    }

    fn name(&self) -> &'static str {
        "fifo"
    }
}
