//! Least frequently used with a lazy min-heap. Ties on the minimum count
//! evict the least-recently-inserted entry, which keeps golden tests
//! deterministic.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::kernel::{AccessOutcome, Capacity, ChunkId, ReplacementPolicy};

pub struct Lfu {
    // count and insertion sequence of each resident; the heap may hold
    // stale entries, validated on pop.
    residents: HashMap<ChunkId, (u64, u64)>,
    heap: BinaryHeap<Reverse<(u64, u64, ChunkId)>>,
    insert_seq: u64,
    capacity: usize,
}

impl Lfu {
    pub fn new(capacity: Capacity) -> Self {
        Lfu { residents: HashMap::new(), heap: BinaryHeap::new(), insert_seq: 0, capacity: capacity.get() }
    }

    fn evict_min(&mut self) -> ChunkId {
        loop {
            let Reverse((count, seq, chunk)) = self.heap.pop().expect("residents imply heap entries");
            if self.residents.get(&chunk) == Some(&(count, seq)) {
                self.residents.remove(&chunk);
                return chunk;
            }
        }
    }

    #[cfg(test)]
    pub fn count_of(&self, chunk: ChunkId) -> Option<u64> {
        self.residents.get(&chunk).map(|&(count, _)| count)
    }
}

impl ReplacementPolicy for Lfu {
    fn access(&mut self, chunk: ChunkId, _position: u64) -> AccessOutcome {
        if let Some(&(count, seq)) = self.residents.get(&chunk) {
            self.residents.insert(chunk, (count + 1, seq));
            self.heap.push(Reverse((count + 1, seq, chunk)));
            return AccessOutcome::hit();
        }
        let mut evicted = None;
        if self.residents.len() == self.capacity {
            evicted = Some(self.evict_min());
        }
        let seq = self.insert_seq;
        self.insert_seq += 1;
        self.residents.insert(chunk, (1, seq));
        self.heap.push(Reverse((1, seq, chunk)));
        AccessOutcome::miss(evicted, 0)
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn resident_count(&self) -> usize {
        self.residents.len()
    }

    fn contains(&self, chunk: ChunkId) -> bool {
        self.residents.contains_key(&chunk)
    }

    fn name(&self) -> &'static str {
        "lfu"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unique_minimum_is_evicted() {
        let mut p = Lfu::new(Capacity::new(2).unwrap());
        p.access(ChunkId(1), 0); // a: 1
        p.access(ChunkId(1), 1); // a: 2
        p.access(ChunkId(1), 2); // a: 3
        p.access(ChunkId(2), 3); // b: 1
        let out = p.access(ChunkId(3), 4);
        assert_eq!(out.evicted, Some(ChunkId(2)));
        assert_eq!(p.count_of(ChunkId(1)), Some(3));
    }

    #[test]
    fn minimum_tie_evicts_least_recently_inserted() {
        let mut p = Lfu::new(Capacity::new(2).unwrap());
        p.access(ChunkId(1), 0);
        p.access(ChunkId(2), 1);
        let out = p.access(ChunkId(3), 2);
        assert_eq!(out.evicted, Some(ChunkId(1)));
    }

    #[test]
    fn one_pass_scan_cannot_displace_hot_residents() {
        // Hot phase builds counts; the scan items only ever evict each other.
        let mut p = Lfu::new(Capacity::new(3).unwrap());
        for _ in 0..3 {
            p.access(ChunkId(1), 0);
            p.access(ChunkId(2), 0);
        }
        for s in 100..105 {
            p.access(ChunkId(s), 0);
        }
        assert!(p.contains(ChunkId(1)));
        assert!(p.contains(ChunkId(2)));
        assert_eq!(p.resident_count(), 3);
    }
}
