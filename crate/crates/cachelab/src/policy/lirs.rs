//! LIRS: low inter-reference recency set. Hot (LIR) entries live in stack
//! S; cold (HIR) residents queue in Q; cold entries evicted from the buffer
//! may linger in S as ghosts so a re-reference can promote them. Stack
//! pruning keeps a hot entry at the bottom of S, and a configurable ghost
//! budget bounds the stack.

use std::collections::HashMap;

use crate::kernel::{AccessOutcome, Capacity, ChunkId, ReplacementPolicy};
use crate::policy::list::ChunkList;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Status {
    Lir,
    HirResident,
    HirGhost,
}

#[derive(Copy, Clone, Debug)]
struct Meta {
    status: Status,
    s_node: Option<usize>,
    q_node: Option<usize>,
}

pub struct Lirs {
    /// Recency stack, front = most recent.
    s: ChunkList,
    /// Resident cold entries, front = next eviction.
    q: ChunkList,
    index: HashMap<ChunkId, Meta>,
    lir_count: usize,
    ghost_count: usize,
    /// Hot capacity; cold residents get the remaining slots (1% of the
    /// buffer, at least one when the buffer has two or more slots).
    hot_capacity: usize,
    /// Maximum ghost entries retained in S.
    ghost_budget: usize,
    capacity: usize,
    /// (ghosts removed, ghosts before) for the most recent stack pruning.
    last_prune: Option<(usize, usize)>,
}

impl Lirs {
    /// Default ghost budget is 4x the capacity.
    pub fn new(capacity: Capacity) -> Self {
        let c = capacity.get();
        Self::with_ghost_budget(capacity, 4 * c)
    }

    pub fn with_ghost_budget(capacity: Capacity, ghost_budget: usize) -> Self {
        let c = capacity.get();
        let cold = if c == 1 { 0 } else { (c / 100).max(1) };
        Lirs {
            s: ChunkList::new(),
            q: ChunkList::new(),
            index: HashMap::new(),
            lir_count: 0,
            ghost_count: 0,
            hot_capacity: c - cold,
            ghost_budget,
            capacity: c,
            last_prune: None,
        }
    }

    pub fn last_prune_stats(&self) -> Option<(usize, usize)> {
        self.last_prune
    }

    pub fn ghost_count(&self) -> usize {
        self.ghost_count
    }

    fn residents(&self) -> usize {
        self.lir_count + self.q.len()
    }

    /// Removes trailing non-hot entries so a hot entry sits at the bottom
    /// of S again. Records how many ghosts one pruning pass dropped.
    fn prune(&mut self) {
        let ghosts_before = self.ghost_count;
        let mut removed_ghosts = 0;
        while let Some(bottom) = self.s.back() {
            let chunk = self.s.chunk(bottom);
            let meta = self.index.get_mut(&chunk).expect("stack entry tracked");
            if meta.status == Status::Lir {
                break;
            }
            let ghost = meta.status == Status::HirGhost;
            meta.s_node = None;
            self.s.remove(bottom);
            if ghost {
                removed_ghosts += 1;
                self.ghost_count -= 1;
                self.index.remove(&chunk);
            }
        }
        self.last_prune = Some((removed_ghosts, ghosts_before));
    }

    /// Drops the oldest (bottom-most) ghosts while over budget.
    fn enforce_ghost_budget(&mut self) {
        while self.ghost_count > self.ghost_budget {
            let mut cursor = self.s.back();
            let mut oldest_ghost = None;
            while let Some(node) = cursor {
                let chunk = self.s.chunk(node);
                if self.index[&chunk].status == Status::HirGhost {
                    oldest_ghost = Some((node, chunk));
                    break;
                }
                cursor = self.s.prev(node);
            }
            let (node, chunk) = oldest_ghost.expect("ghost count implies a ghost on the stack");
            self.s.remove(node);
            self.index.remove(&chunk);
            self.ghost_count -= 1;
        }
    }

    /// Frees one buffer slot. Normally the front of Q goes; the chunk keeps
    /// a ghost record if it is still on the stack. A buffer with no cold
    /// slots drops its coldest hot entry outright.
    fn evict_one(&mut self) -> ChunkId {
        if let Some((_, victim)) = self.q.pop_front() {
            let meta = self.index.get_mut(&victim).expect("resident tracked");
            meta.q_node = None;
            if meta.s_node.is_some() {
                meta.status = Status::HirGhost;
                self.ghost_count += 1;
            } else {
                self.index.remove(&victim);
            }
            return victim;
        }
        let bottom = self.s.back().expect("full cache has a hot entry");
        let victim = self.s.chunk(bottom);
        self.s.remove(bottom);
        self.index.remove(&victim);
        self.lir_count -= 1;
        self.prune();
        victim
    }

    /// Demotes the hot entry at the bottom of S to a cold resident at the
    /// end of Q, then prunes.
    fn demote_bottom(&mut self) {
        let bottom = self.s.back().expect("stack non-empty");
        let chunk = self.s.chunk(bottom);
        debug_assert_eq!(self.index[&chunk].status, Status::Lir);
        self.s.remove(bottom);
        let q_node = self.q.push_back(chunk);
        let meta = self.index.get_mut(&chunk).unwrap();
        meta.status = Status::HirResident;
        meta.s_node = None;
        meta.q_node = Some(q_node);
        self.lir_count -= 1;
        self.prune();
    }
}

impl ReplacementPolicy for Lirs {
    fn access(&mut self, chunk: ChunkId, _position: u64) -> AccessOutcome {
        match self.index.get(&chunk).copied() {
            Some(Meta { status: Status::Lir, s_node, .. }) => {
                let node = s_node.expect("hot entries always stacked");
                let was_bottom = self.s.back() == Some(node);
                self.s.remove(node);
                let fresh = self.s.push_front(chunk);
                self.index.get_mut(&chunk).unwrap().s_node = Some(fresh);
                if was_bottom {
                    self.prune();
                }
                AccessOutcome::hit()
            }
            Some(Meta { status: Status::HirResident, s_node, q_node }) => {
                match s_node {
                    Some(node) => {
                        // The reuse distance beat a hot entry: promote,
                        // demote the stack bottom, prune.
                        self.s.remove(node);
                        self.q.remove(q_node.expect("cold resident queued"));
                        let fresh = self.s.push_front(chunk);
                        let meta = self.index.get_mut(&chunk).unwrap();
                        meta.status = Status::Lir;
                        meta.s_node = Some(fresh);
                        meta.q_node = None;
                        self.lir_count += 1;
                        if self.lir_count > self.hot_capacity {
                            self.demote_bottom();
                        }
                    }
                    None => {
                        // Off-stack cold hit: restack on top and refresh the
                        // queue position; status unchanged.
                        let fresh = self.s.push_front(chunk);
                        self.q.remove(q_node.expect("cold resident queued"));
                        let q_fresh = self.q.push_back(chunk);
                        let meta = self.index.get_mut(&chunk).unwrap();
                        meta.s_node = Some(fresh);
                        meta.q_node = Some(q_fresh);
                    }
                }
                AccessOutcome::hit()
            }
            Some(Meta { status: Status::HirGhost, .. }) => {
                let mut evicted = None;
                if self.residents() == self.capacity {
                    evicted = Some(self.evict_one());
                }
                let node = self.index[&chunk].s_node.expect("ghosts live on the stack");
                self.s.remove(node);
                self.ghost_count -= 1;
                let fresh = self.s.push_front(chunk);
                let meta = self.index.get_mut(&chunk).unwrap();
                meta.status = Status::Lir;
                meta.s_node = Some(fresh);
                self.lir_count += 1;
                if self.lir_count > self.hot_capacity {
                    self.demote_bottom();
                }
                AccessOutcome::ghost_hit(evicted, 0)
            }
            None => {
                let mut evicted = None;
                if self.residents() == self.capacity {
                    evicted = Some(self.evict_one());
                }
                if self.lir_count < self.hot_capacity {
                    // Warmup: the hot set has room, admit directly.
                    let node = self.s.push_front(chunk);
                    self.index.insert(
                        chunk,
                        Meta { status: Status::Lir, s_node: Some(node), q_node: None },
                    );
                    self.lir_count += 1;
                    return AccessOutcome::miss(evicted, 0);
                }
                let s_fresh = self.s.push_front(chunk);
                let q_fresh = self.q.push_back(chunk);
                self.index.insert(
                    chunk,
                    Meta {
                        status: Status::HirResident,
                        s_node: Some(s_fresh),
                        q_node: Some(q_fresh),
                    },
                );
                self.enforce_ghost_budget();
                AccessOutcome::miss(evicted, 0)
            }
        }
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn resident_count(&self) -> usize {
        self.residents()
    }

    fn contains(&self, chunk: ChunkId) -> bool {
        matches!(
            self.index.get(&chunk),
            Some(Meta { status: Status::Lir | Status::HirResident, .. })
        )
    }

    fn name(&self) -> &'static str {
        "lirs"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::AccessKind::GhostHit;

    #[test]
    fn ghost_promotion_prunes_trailing_cold_entries() {
        // Hand-executed four-access stream at c=2 (one hot, one cold slot).
        let mut p = Lirs::new(Capacity::new(2).unwrap());
        let out: Vec<_> = [1u64, 2, 3, 2]
            .iter()
            .enumerate()
            .map(|(i, &x)| p.access(ChunkId(x), i as u64))
            .collect();
        assert_eq!(out[2].evicted, Some(ChunkId(2)));
        assert_eq!(out[3].kind, GhostHit);
        assert_eq!(out[3].evicted, Some(ChunkId(3)));
        // Promoting 2 demoted 1 and pruned the ghost of 3 off the stack.
        assert!(p.contains(ChunkId(1)));
        assert!(p.contains(ChunkId(2)));
        assert!(!p.contains(ChunkId(3)));
        assert_eq!(p.last_prune_stats(), Some((1, 1)));
    }

    #[test]
    fn residents_bounded_and_prunes_bounded_by_ghosts() {
        let mut p = Lirs::new(Capacity::new(8).unwrap());
        for i in 0..2000u64 {
            p.access(ChunkId(i % 23), i);
            assert!(p.resident_count() <= 8);
            if let Some((removed, before)) = p.last_prune_stats() {
                assert!(removed <= before, "prune removed more ghosts than existed");
            }
        }
    }

    #[test]
    fn ghost_budget_is_enforced() {
        let mut p = Lirs::with_ghost_budget(Capacity::new(4).unwrap(), 6);
        for i in 0..500u64 {
            p.access(ChunkId(i), i); // pure scan: ghosts pile up
            assert!(p.ghost_count() <= 6);
        }
    }

    #[test]
    fn capacity_one_degenerates_to_plain_misses() {
        let mut p = Lirs::new(Capacity::new(1).unwrap());
        for (i, x) in [1u64, 2, 1, 2].iter().enumerate() {
            let out = p.access(ChunkId(*x), i as u64);
            assert!(!out.is_hit());
            assert!(p.resident_count() <= 1);
        }
    }
}
