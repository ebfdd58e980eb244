//! Adaptive replacement cache: two LRU resident lists plus two LRU ghost
//! lists and a target size steering which resident list surrenders victims.
//! Follows the published formulation.

use std::collections::HashMap;

use crate::kernel::{AccessOutcome, Capacity, ChunkId, ReplacementPolicy};
use crate::policy::list::ChunkList;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum ArcList {
    T1,
    T2,
    B1,
    B2,
}

pub struct Arc {
    t1: ChunkList,
    t2: ChunkList,
    b1: ChunkList,
    b2: ChunkList,
    index: HashMap<ChunkId, (ArcList, usize)>,
    p: usize,
    capacity: usize,
}

impl Arc {
    pub fn new(capacity: Capacity) -> Self {
        Arc {
            t1: ChunkList::new(),
            t2: ChunkList::new(),
            b1: ChunkList::new(),
            b2: ChunkList::new(),
            index: HashMap::new(),
            p: 0,
            capacity: capacity.get(),
        }
    }

    pub fn target_size(&self) -> usize {
        self.p
    }

    /// Demotes the LRU entry of T1 or T2 into the matching ghost list.
    /// `from_b2_hit` breaks the |T1| == p tie toward T1, per the published
    /// REPLACE subroutine. Returns the demoted chunk.
    fn replace(&mut self, from_b2_hit: bool) -> ChunkId {
        let take_t1 = !self.t1.is_empty()
            && ((from_b2_hit && self.t1.len() == self.p) || self.t1.len() > self.p);
        if take_t1 {
            let (_, victim) = self.t1.pop_back().expect("non-empty T1");
            let node = self.b1.push_front(victim);
            self.index.insert(victim, (ArcList::B1, node));
            victim
        } else {
            let (_, victim) = self.t2.pop_back().expect("non-empty T2");
            let node = self.b2.push_front(victim);
            self.index.insert(victim, (ArcList::B2, node));
            victim
        }
    }
}

impl ReplacementPolicy for Arc {
    fn access(&mut self, chunk: ChunkId, _position: u64) -> AccessOutcome {
        let c = self.capacity;
        match self.index.get(&chunk).copied() {
            Some((ArcList::T1, node)) => {
                self.t1.remove(node);
                let fresh = self.t2.push_front(chunk);
                self.index.insert(chunk, (ArcList::T2, fresh));
                AccessOutcome::hit()
            }
            Some((ArcList::T2, node)) => {
                self.t2.remove(node);
                let fresh = self.t2.push_front(chunk);
                self.index.insert(chunk, (ArcList::T2, fresh));
                AccessOutcome::hit()
            }
            Some((ArcList::B1, node)) => {
                let delta = (self.b2.len() / self.b1.len()).max(1);
                self.p = (self.p + delta).min(c);
                let evicted = Some(self.replace(false));
                self.b1.remove(node);
                let fresh = self.t2.push_front(chunk);
                self.index.insert(chunk, (ArcList::T2, fresh));
                AccessOutcome::ghost_hit(evicted, 0)
            }
            Some((ArcList::B2, node)) => {
                let delta = (self.b1.len() / self.b2.len()).max(1);
                self.p = self.p.saturating_sub(delta);
                let evicted = Some(self.replace(true));
                self.b2.remove(node);
                let fresh = self.t2.push_front(chunk);
                self.index.insert(chunk, (ArcList::T2, fresh));
                AccessOutcome::ghost_hit(evicted, 0)
            }
            None => {
                let mut evicted = None;
                let l1 = self.t1.len() + self.b1.len();
                if l1 == c {
                    if self.t1.len() < c {
                        let (_, dropped) = self.b1.pop_back().expect("non-empty B1");
                        self.index.remove(&dropped);
                        evicted = Some(self.replace(false));
                    } else {
                        // B1 empty, T1 full: drop the LRU resident with no
                        // history record.
                        let (_, victim) = self.t1.pop_back().expect("non-empty T1");
                        self.index.remove(&victim);
                        evicted = Some(victim);
                    }
                } else {
                    let total = l1 + self.t2.len() + self.b2.len();
                    if total >= c {
                        if total == 2 * c {
                            let (_, dropped) = self.b2.pop_back().expect("non-empty B2");
                            self.index.remove(&dropped);
                        }
                        evicted = Some(self.replace(false));
                    }
                }
                let node = self.t1.push_front(chunk);
                self.index.insert(chunk, (ArcList::T1, node));
                AccessOutcome::miss(evicted, 0)
            }
        }
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn resident_count(&self) -> usize {
        self.t1.len() + self.t2.len()
    }

    fn contains(&self, chunk: ChunkId) -> bool {
        matches!(self.index.get(&chunk), Some((ArcList::T1 | ArcList::T2, _)))
    }

    fn name(&self) -> &'static str {
        "arc"
    }

    fn target_ratio(&self) -> Option<f64> {
        Some(self.p as f64 / self.capacity as f64)
    }
}
