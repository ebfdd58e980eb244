//! Least recently used, canonical semantics: a hit moves the chunk to the
//! front; a miss on a full cache evicts the back. The three cost variants
//! the overhead model distinguishes are behaviorally identical.

use std::collections::HashMap;

use crate::kernel::{AccessOutcome, Capacity, ChunkId, ReplacementPolicy};
use crate::policy::list::ChunkList;

pub struct Lru {
    order: ChunkList,
    index: HashMap<ChunkId, usize>,
    capacity: usize,
}

impl Lru {
    pub fn new(capacity: Capacity) -> Self {
        Lru { order: ChunkList::new(), index: HashMap::new(), capacity: capacity.get() }
    }
}

impl ReplacementPolicy for Lru {
    fn access(&mut self, chunk: ChunkId, _position: u64) -> AccessOutcome {
        if let Some(&node) = self.index.get(&chunk) {
            self.order.remove(node);
            let fresh = self.order.push_front(chunk);
            self.index.insert(chunk, fresh);
            return AccessOutcome::hit();
        }
        let mut evicted = None;
        if self.order.len() == self.capacity {
            let (_, victim) = self.order.pop_back().expect("full list");
            self.index.remove(&victim);
            evicted = Some(victim);
        }
        let node = self.order.push_front(chunk);
        self.index.insert(chunk, node);
        AccessOutcome::miss(evicted, 0)
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn resident_count(&self) -> usize {
        self.order.len()
    }

    fn contains(&self, chunk: ChunkId) -> bool {
        self.index.contains_key(&chunk)
    }

    fn name(&self) -> &'static str {
        "lru"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hit_refreshes_position() {
        // c=2, a,b,a,c: the refreshed a survives, b is evicted.
        let mut p = Lru::new(Capacity::new(2).unwrap());
        p.access(ChunkId(1), 0);
        p.access(ChunkId(2), 1);
        assert!(p.access(ChunkId(1), 2).is_hit());
        let out = p.access(ChunkId(3), 3);
        assert_eq!(out.evicted, Some(ChunkId(2)));
        assert!(p.contains(ChunkId(1)));
    }

    #[test]
    fn inclusion_property_small_and_large() {
        // The resident set at capacity c is a subset of the set at c+1
        // after every prefix of any stream.
        let stream: Vec<u64> = vec![1, 2, 3, 1, 4, 2, 5, 1, 2, 3, 4, 5, 1, 1, 6, 7, 2];
        let alphabet: Vec<u64> = (1..=7).collect();
        for c in 1..6 {
            let mut small = Lru::new(Capacity::new(c).unwrap());
            let mut large = Lru::new(Capacity::new(c + 1).unwrap());
            for (i, &x) in stream.iter().enumerate() {
                small.access(ChunkId(x), i as u64);
                large.access(ChunkId(x), i as u64);
                for &a in &alphabet {
                    if small.contains(ChunkId(a)) {
                        assert!(large.contains(ChunkId(a)), "inclusion violated at c={c}");
                    }
                }
            }
        }
    }
}
