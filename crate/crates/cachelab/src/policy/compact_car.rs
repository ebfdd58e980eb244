//! Adaptive two-list CLOCK replacement over fixed contiguous buffers.
//!
//! Two resident CLOCK lists share one c-slot array: the recency list grows
//! rightward from slot 0 and the frequency list leftward from slot c-1, so
//! the free gap always sits between them. Two id-only history lists share a
//! second c-slot array the same way. Every structural change keeps each
//! list's occupied run contiguous by swapping the affected entry with the
//! list's edge entry (the one adjacent to the gap) before dropping or
//! migrating it; shifting the recency/frequency boundary by one then moves
//! a chunk between lists without touching any other slot.
//!
//! The target size `p` splits eviction pressure between the two resident
//! lists: a victim comes from the recency list while it holds at least
//! `max(p, 1)` chunks, otherwise from the frequency list. History hits move
//! `p` by the ratio of the opposite history length, so the split tracks
//! whether recency or frequency evidence dominates the workload. Fixing
//! `p = round(q*c)` and disabling the updates gives the CFR ablation.
//!
//! Hand cursors address slot positions, not chunks: after an edge swap the
//! hand stays put and therefore points at the swapped-in entry. The trace
//! equivalence suite pins the behavior this induces.

use crate::kernel::{
    AccessOutcome, Capacity, ChunkId, Directory, Region, ReplacementPolicy,
};

/// Which of the two list pairs an operation addresses.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Side {
    /// Lists 1: chunks seen once since admission (T1/B1).
    Recent,
    /// Lists 2: chunks with re-reference evidence (T2/B2).
    Frequent,
}

impl Side {
    fn idx(self) -> usize {
        match self {
            Side::Recent => 0,
            Side::Frequent => 1,
        }
    }

    fn other(self) -> Side {
        match self {
            Side::Recent => Side::Frequent,
            Side::Frequent => Side::Recent,
        }
    }

    fn top_region(self) -> Region {
        match self {
            Side::Recent => Region::RecentTop,
            Side::Frequent => Region::FrequentTop,
        }
    }

    fn ghost_region(self) -> Region {
        match self {
            Side::Recent => Region::RecentGhost,
            Side::Frequent => Region::FrequentGhost,
        }
    }
}

#[derive(Copy, Clone, Debug)]
struct TopEntry {
    chunk: ChunkId,
    rbit: bool,
}

/// Fixed-buffer adaptive CLOCK state. See the module docs for the layout.
pub struct CompactCar {
    /// c slots holding the two resident CLOCK lists.
    top: Vec<Option<TopEntry>>,
    /// c slots holding the two id-only history lists.
    bottom: Vec<Option<ChunkId>>,
    /// Occupied lengths, indexed by `Side::idx`.
    top_len: [usize; 2],
    ghost_len: [usize; 2],
    /// Hand cursors as logical offsets from each list's outer end. The
    /// recency hands sweep rightward in the arrays, the frequency hands
    /// leftward; both wrap within the occupied run only.
    top_hand: [usize; 2],
    ghost_hand: [usize; 2],
    /// Target size of the recency list, 0 ..= c.
    p: usize,
    /// When false, history hits leave `p` untouched (CFR).
    adaptive: bool,
    index: Directory,
    capacity: usize,
    name: &'static str,
}

impl CompactCar {
    /// Adaptive variant. The target starts at zero and moves only once
    /// history evidence accrues.
    pub fn new(capacity: Capacity) -> Self {
        Self::build(capacity, 0, true, "compact-car")
    }

    /// Fixed-ratio ablation: `p` is pinned to `round(q * c)` and never
    /// adapted. `q` is clamped to [0, 1].
    pub fn with_fixed_ratio(capacity: Capacity, q: f64) -> Self {
        let c = capacity.get();
        let q = q.clamp(0.0, 1.0);
        let p = ((q * c as f64) + 0.5).floor() as usize;
        Self::build(capacity, p.min(c), false, "cfr")
    }

    fn build(capacity: Capacity, p: usize, adaptive: bool, name: &'static str) -> Self {
        let c = capacity.get();
        CompactCar {
            top: vec![None; c],
            bottom: vec![None; c],
            top_len: [0, 0],
            ghost_len: [0, 0],
            top_hand: [0, 0],
            ghost_hand: [0, 0],
            p,
            adaptive,
            index: Directory::new(),
            capacity: c,
            name,
        }
    }

    /// Current target size of the recency list.
    pub fn target_size(&self) -> usize {
        self.p
    }

    /// Target ratio q = p/c.
    pub fn target_q(&self) -> f64 {
        self.p as f64 / self.capacity as f64
    }

    pub fn lookup(&self, chunk: ChunkId) -> Option<(Region, usize)> {
        self.index.lookup(chunk)
    }

    pub fn recent_len(&self) -> usize {
        self.top_len[0]
    }

    pub fn frequent_len(&self) -> usize {
        self.top_len[1]
    }

    pub fn recent_ghost_len(&self) -> usize {
        self.ghost_len[0]
    }

    pub fn frequent_ghost_len(&self) -> usize {
        self.ghost_len[1]
    }

    // ---- slot arithmetic -------------------------------------------------

    /// Physical slot of a logical offset. Recency lists count from the left
    /// end of their array, frequency lists from the right end.
    fn slot_of(&self, side: Side, logical: usize) -> usize {
        match side {
            Side::Recent => logical,
            Side::Frequent => self.capacity - 1 - logical,
        }
    }

    fn rotate_top_hand(&mut self, side: Side) {
        let len = self.top_len[side.idx()];
        let next = self.top_hand[side.idx()] + 1;
        self.top_hand[side.idx()] = if next >= len { 0 } else { next };
    }

    /// After a shrink without rotation, a hand past the run wraps to the start.
    fn clamp_ghost_hand(&mut self, side: Side) {
        if self.ghost_hand[side.idx()] >= self.ghost_len[side.idx()] {
            self.ghost_hand[side.idx()] = 0;
        }
    }

    // ---- edge swaps ------------------------------------------------------

    /// Exchanges a top entry with the list's edge entry (logical len-1) and
    /// keeps the directory current. A swap with itself is the identity.
    fn top_swap_with_edge(&mut self, side: Side, logical: usize) {
        let edge = self.top_len[side.idx()] - 1;
        if logical == edge {
            return;
        }
        let a = self.slot_of(side, logical);
        let b = self.slot_of(side, edge);
        self.top.swap(a, b);
        let region = side.top_region();
        self.index.relocate(self.top[a].as_ref().unwrap().chunk, region, a);
        self.index.relocate(self.top[b].as_ref().unwrap().chunk, region, b);
    }

    fn ghost_swap_with_edge(&mut self, side: Side, logical: usize) {
        let edge = self.ghost_len[side.idx()] - 1;
        if logical == edge {
            return;
        }
        let a = self.slot_of(side, logical);
        let b = self.slot_of(side, edge);
        self.bottom.swap(a, b);
        let region = side.ghost_region();
        self.index.relocate(self.bottom[a].unwrap(), region, a);
        self.index.relocate(self.bottom[b].unwrap(), region, b);
    }

    // ---- list growth -----------------------------------------------------

    /// Caches a chunk at the free address adjacent to the side's run.
    fn top_push(&mut self, side: Side, chunk: ChunkId) {
        let slot = self.slot_of(side, self.top_len[side.idx()]);
        debug_assert!(self.top[slot].is_none(), "insertion slot occupied");
        self.top[slot] = Some(TopEntry { chunk, rbit: false });
        self.index.insert(chunk, side.top_region(), slot);
        self.top_len[side.idx()] += 1;
    }

    /// Records an evicted chunk at the free address next to the history
    /// list's edge. The chunk must already be tracked (it is leaving the
    /// resident set).
    fn ghost_push(&mut self, side: Side, chunk: ChunkId) {
        let slot = self.slot_of(side, self.ghost_len[side.idx()]);
        debug_assert!(self.bottom[slot].is_none(), "history slot occupied");
        self.bottom[slot] = Some(chunk);
        self.index.relocate(chunk, side.ghost_region(), slot);
        self.ghost_len[side.idx()] += 1;
    }

    // ---- the four procedures ----------------------------------------------

    /// Drops a specific history entry: swap it to the edge, then discard,
    /// leaving the freed address adjacent to both history lists.
    fn discard_btm(&mut self, side: Side, chunk: ChunkId, logical: usize) {
        debug_assert_eq!(self.bottom[self.slot_of(side, logical)], Some(chunk));
        self.ghost_swap_with_edge(side, logical);
        let edge_slot = self.slot_of(side, self.ghost_len[side.idx()] - 1);
        self.bottom[edge_slot] = None;
        self.index.remove(chunk);
        self.ghost_len[side.idx()] -= 1;
        self.clamp_ghost_hand(side);
    }

    /// Evicts the history entry under the side's hand and rotates the hand.
    fn replace_btm(&mut self, side: Side) {
        debug_assert!(self.ghost_len[side.idx()] > 0, "replace_btm on empty history");
        let hand = self.ghost_hand[side.idx()];
        self.ghost_swap_with_edge(side, hand);
        let edge_slot = self.slot_of(side, self.ghost_len[side.idx()] - 1);
        let victim = self.bottom[edge_slot].take().expect("occupied edge");
        self.index.remove(victim);
        self.ghost_len[side.idx()] -= 1;
        let len = self.ghost_len[side.idx()];
        let next = hand + 1;
        self.ghost_hand[side.idx()] = if next >= len { 0 } else { next };
    }

    /// Sweeps the side's hand for a victim. Entries with the bit set get a
    /// second chance: the bit clears and, on the recency side, the entry
    /// migrates across the boundary into the frequency list. The victim's
    /// id moves to the side's history list and its top slot is freed at the
    /// boundary. Returns the victim.
    ///
    /// If the recency sweep migrates its entire list away, the sweep falls
    /// through to the frequency list (the buffers are full, so it cannot be
    /// empty too).
    fn replace_top(&mut self, mut side: Side, movements: &mut u64) -> ChunkId {
        loop {
            if self.top_len[side.idx()] == 0 {
                side = side.other();
                debug_assert!(self.top_len[side.idx()] > 0, "both top lists empty");
                continue;
            }
            let hand = self.top_hand[side.idx()];
            let slot = self.slot_of(side, hand);
            if self.top[slot].as_ref().unwrap().rbit {
                self.top[slot].as_mut().unwrap().rbit = false;
                if side == Side::Recent {
                    // Swap to the boundary, then hand the edge slot to the
                    // frequency list: the cleared entry becomes its newest
                    // edge chunk without moving anything else.
                    self.top_swap_with_edge(Side::Recent, hand);
                    let edge_slot = self.slot_of(Side::Recent, self.top_len[0] - 1);
                    let migrated = self.top[edge_slot].as_ref().unwrap().chunk;
                    self.top_len[0] -= 1;
                    self.top_len[1] += 1;
                    self.index.relocate(migrated, Region::FrequentTop, edge_slot);
                }
                self.rotate_top_hand(side);
                *movements += 1;
            } else {
                let victim = self.top[slot].as_ref().unwrap().chunk;
                self.top_swap_with_edge(side, hand);
                let edge_slot = self.slot_of(side, self.top_len[side.idx()] - 1);
                self.top[edge_slot] = None;
                self.top_len[side.idx()] -= 1;
                self.ghost_push(side, victim);
                self.rotate_top_hand(side);
                *movements += 1;
                return victim;
            }
        }
    }

    fn resident_total(&self) -> usize {
        self.top_len[0] + self.top_len[1]
    }

    fn ghost_total(&self) -> usize {
        self.ghost_len[0] + self.ghost_len[1]
    }

    // ---- diagnostics -------------------------------------------------------

    /// Text dump, one line per slot of both arrays, plus a summary line.
    /// `*T1`-style markers show where each hand points.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(
            out,
            "p={} t1={} t2={} b1={} b2={}",
            self.p, self.top_len[0], self.top_len[1], self.ghost_len[0], self.ghost_len[1]
        )
        .unwrap();
        let top_hands: Vec<Option<usize>> = [Side::Recent, Side::Frequent]
            .iter()
            .map(|&s| (self.top_len[s.idx()] > 0).then(|| self.slot_of(s, self.top_hand[s.idx()])))
            .collect();
        let ghost_hands: Vec<Option<usize>> = [Side::Recent, Side::Frequent]
            .iter()
            .map(|&s| {
                (self.ghost_len[s.idx()] > 0).then(|| self.slot_of(s, self.ghost_hand[s.idx()]))
            })
            .collect();
        for slot in 0..self.capacity {
            let mut line = match &self.top[slot] {
                Some(e) => {
                    let region = if slot < self.top_len[0] { "T1" } else { "T2" };
                    format!("top {slot} {region} {} r{}", e.chunk, u8::from(e.rbit))
                }
                None => format!("top {slot} -"),
            };
            if top_hands[0] == Some(slot) && self.top[slot].is_some() {
                line.push_str(" *T1");
            }
            if top_hands[1] == Some(slot) && self.top[slot].is_some() {
                line.push_str(" *T2");
            }
            out.push_str(&line);
            out.push('\n');
        }
        for slot in 0..self.capacity {
            let mut line = match &self.bottom[slot] {
                Some(chunk) => {
                    let region = if slot < self.ghost_len[0] { "B1" } else { "B2" };
                    format!("bottom {slot} {region} {chunk}")
                }
                None => format!("bottom {slot} -"),
            };
            if ghost_hands[0] == Some(slot) && self.bottom[slot].is_some() {
                line.push_str(" *B1");
            }
            if ghost_hands[1] == Some(slot) && self.bottom[slot].is_some() {
                line.push_str(" *B2");
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// Full structural validation: contiguity of all four runs, capacity
    /// bounds, target range, hand ranges, and directory agreement with the
    /// arrays. Intended for tests and fuzzing; cost is O(c).
    ///
    /// The recency pair may briefly hold c+1 entries: the literal check
    /// order discards history before the eviction that grows it, so a
    /// recency list filling the whole buffer with no history yet overshoots
    /// its pair bound by one until the next miss recycles a history slot.
    pub fn validate(&self) {
        let c = self.capacity;
        assert!(self.p <= c, "target out of range");
        assert!(self.top_len[0] + self.top_len[1] <= c, "resident overflow");
        assert!(self.ghost_len[0] + self.ghost_len[1] <= c, "history overflow");
        assert!(self.top_len[0] + self.ghost_len[0] <= c + 1, "recency pair overflow");
        assert!(
            self.resident_total() + self.ghost_total() <= 2 * c,
            "directory overflow"
        );
        assert_eq!(self.index.len(), self.resident_total() + self.ghost_total());

        for slot in 0..c {
            let in_t1 = slot < self.top_len[0];
            let in_t2 = slot >= c - self.top_len[1];
            assert!(!(in_t1 && in_t2));
            match &self.top[slot] {
                Some(e) => {
                    assert!(in_t1 || in_t2, "top slot {slot} outside both runs");
                    let region = if in_t1 { Region::RecentTop } else { Region::FrequentTop };
                    assert_eq!(self.index.lookup(e.chunk), Some((region, slot)));
                }
                None => assert!(!in_t1 && !in_t2, "hole in a top run at slot {slot}"),
            }
            let in_b1 = slot < self.ghost_len[0];
            let in_b2 = slot >= c - self.ghost_len[1];
            assert!(!(in_b1 && in_b2));
            match &self.bottom[slot] {
                Some(chunk) => {
                    assert!(in_b1 || in_b2, "bottom slot {slot} outside both runs");
                    let region = if in_b1 { Region::RecentGhost } else { Region::FrequentGhost };
                    assert_eq!(self.index.lookup(*chunk), Some((region, slot)));
                }
                None => assert!(!in_b1 && !in_b2, "hole in a bottom run at slot {slot}"),
            }
        }
        for (i, (&len, &hand)) in self.top_len.iter().zip(&self.top_hand).enumerate() {
            assert!(hand < len.max(1), "top hand {i} out of run");
        }
        for (i, (&len, &hand)) in self.ghost_len.iter().zip(&self.ghost_hand).enumerate() {
            assert!(hand < len.max(1), "ghost hand {i} out of run");
        }
    }
}

impl ReplacementPolicy for CompactCar {
    fn access(&mut self, chunk: ChunkId, _position: u64) -> AccessOutcome {
        let c = self.capacity;
        let mut ghost = false;
        let mut insert_side = Side::Recent;

        match self.index.lookup(chunk) {
            Some((Region::RecentTop, slot)) | Some((Region::FrequentTop, slot)) => {
                self.top[slot].as_mut().unwrap().rbit = true;
                return AccessOutcome::hit();
            }
            Some((Region::RecentGhost, slot)) => {
                ghost = true;
                insert_side = Side::Frequent;
                if self.adaptive {
                    let delta = (self.ghost_len[1] / self.ghost_len[0]).max(1);
                    self.p = (self.p + delta).min(c);
                }
                let logical = slot;
                self.discard_btm(Side::Recent, chunk, logical);
            }
            Some((Region::FrequentGhost, slot)) => {
                ghost = true;
                insert_side = Side::Frequent;
                if self.adaptive {
                    let delta = (self.ghost_len[0] / self.ghost_len[1]).max(1);
                    self.p = self.p.saturating_sub(delta);
                }
                let logical = c - 1 - slot;
                self.discard_btm(Side::Frequent, chunk, logical);
            }
            None => {
                // Plain miss: make room in history before any eviction can
                // grow it. "Full" is at-or-above the pair budget so the
                // recency-saturated corner (no history yet) recovers on the
                // following miss.
                if self.top_len[0] + self.ghost_len[0] >= c && self.ghost_len[0] > 0 {
                    self.replace_btm(Side::Recent);
                } else if self.resident_total() + self.ghost_total() >= 2 * c
                    && self.ghost_len[1] > 0
                {
                    self.replace_btm(Side::Frequent);
                }
            }
        }

        let mut movements = 0;
        let mut evicted = None;
        if self.resident_total() >= c {
            let victim_side =
                if self.top_len[0] >= self.p.max(1) { Side::Recent } else { Side::Frequent };
            evicted = Some(self.replace_top(victim_side, &mut movements));
        }
        self.top_push(insert_side, chunk);

        if ghost {
            AccessOutcome::ghost_hit(evicted, movements)
        } else {
            AccessOutcome::miss(evicted, movements)
        }
    }

    fn capacity(&self) -> usize {
        self.capacity
    }

    fn resident_count(&self) -> usize {
        self.resident_total()
    }

    fn contains(&self, chunk: ChunkId) -> bool {
        matches!(self.index.lookup(chunk), Some((r, _)) if r.is_resident())
    }

    fn name(&self) -> &'static str {
        self.name
    }

    fn target_ratio(&self) -> Option<f64> {
        Some(self.target_q())
    }
}
