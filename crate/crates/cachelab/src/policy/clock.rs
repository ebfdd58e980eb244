//! CLOCK: a circular buffer with one reference bit per entry and a sweeping
//! hand. A hit only sets the entry's bit. A miss sweeps from the hand,
//! clearing set bits as it passes, and evicts at the first clear bit.

use std::collections::HashMap;

use crate::kernel::{AccessOutcome, Capacity, ChunkId, ReplacementPolicy};

pub struct Clock {
    entries: Vec<(ChunkId, bool)>,
    hand: usize,
    index: HashMap<ChunkId, usize>,
    capacity: usize,
}

impl Clock {
    pub fn new(capacity: Capacity) -> Self {
        let c = capacity.get();
        Clock {
            entries: Vec::with_capacity(c),
            hand: 0,
            index: HashMap::with_capacity(c),
            capacity: c,
        }
    }
}

impl ReplacementPolicy for Clock {
    fn access(&mut self, chunk: ChunkId, _position: u64) -> AccessOutcome {
        if let Some(&slot) = self.index.get(&chunk) {
            self.entries[slot].1 = true;
            return AccessOutcome::hit();
        }
        if self.entries.len() < self.capacity {
            self.index.insert(chunk, self.entries.len());
            self.entries.push((chunk, false));
            return AccessOutcome::miss(None, 0);
        }
        let mut movements = 0;
        loop {
            if self.entries[self.hand].1 {
                self.entries[self.hand].1 = false;
                self.hand = (self.hand + 1) % self.capacity;
                movements += 1;
            } else {
                let victim = self.entries[self.hand].0;
                self.index.remove(&victim);
                self.entries[self.hand] = (chunk, false);
                self.index.insert(chunk, self.hand);
                self.hand = (self.hand + 1) % self.capacity;
                movements += 1;
                return AccessOutcome::miss(Some(victim), movements);
            }
        }
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn resident_count(&self) -> usize {
        self.entries.len()
    }

    fn contains(&self, chunk: ChunkId) -> bool {
        self.index.contains_key(&chunk)
    }

    fn name(&self) -> &'static str {
        "clock"
    }
}
