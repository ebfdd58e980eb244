//! Test-side oracles, independent of the library's implementations:
//! a literal transcription of the adaptive fixed-buffer CLOCK over plain
//! growable lists, an exhaustive-search offline optimum, a brute-force
//! reuse-distance scan, and seeded stream helpers.

#![allow(dead_code)]

use cachelab::kernel::{AccessKind, ChunkId};
use cachelab::workload::RequestStream;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Outcome triple compared against the optimized implementation.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct RefOutcome {
    pub kind: AccessKind,
    pub evicted: Option<u64>,
    pub movements: u64,
}

/// Literal list-based transcription of the replacement procedure: four
/// growable vectors (index 0 at each list's outer end, the last element at
/// the boundary edge), position hands, and the same at-or-above fullness
/// checks. No packed arrays, no directory.
pub struct ReferenceCompactCar {
    /// Resident lists with reference bits: [recency, frequency].
    pub t: [Vec<(u64, bool)>; 2],
    /// History lists: [recency, frequency].
    pub b: [Vec<u64>; 2],
    pub th: [usize; 2],
    pub bh: [usize; 2],
    pub p: usize,
    pub c: usize,
    pub adaptive: bool,
}

impl ReferenceCompactCar {
    pub fn new(c: usize) -> Self {
        assert!(c >= 1);
        ReferenceCompactCar {
            t: [Vec::new(), Vec::new()],
            b: [Vec::new(), Vec::new()],
            th: [0, 0],
            bh: [0, 0],
            p: 0,
            c,
            adaptive: true,
        }
    }

    pub fn fixed(c: usize, q: f64) -> Self {
        let mut s = Self::new(c);
        s.adaptive = false;
        s.p = (((q.clamp(0.0, 1.0)) * c as f64) + 0.5).floor() as usize;
        s.p = s.p.min(c);
        s
    }

    fn rotate_top(&mut self, side: usize) {
        let next = self.th[side] + 1;
        self.th[side] = if next >= self.t[side].len() { 0 } else { next };
    }

    pub fn discard_btm(&mut self, side: usize, x: u64) {
        let pos = self.b[side].iter().position(|&g| g == x).expect("ghost present");
        let edge = self.b[side].len() - 1;
        self.b[side].swap(pos, edge);
        self.b[side].pop();
        if self.bh[side] >= self.b[side].len() {
            self.bh[side] = 0;
        }
    }

    pub fn replace_btm(&mut self, side: usize) -> u64 {
        assert!(!self.b[side].is_empty());
        let hand = self.bh[side];
        let edge = self.b[side].len() - 1;
        self.b[side].swap(hand, edge);
        let victim = self.b[side].pop().unwrap();
        let next = hand + 1;
        self.bh[side] = if next >= self.b[side].len() { 0 } else { next };
        victim
    }

    pub fn replace_top(&mut self, mut side: usize, movements: &mut u64) -> u64 {
        loop {
            if self.t[side].is_empty() {
                side = 1 - side;
                assert!(!self.t[side].is_empty(), "both resident lists empty");
                continue;
            }
            let hand = self.th[side];
            if self.t[side][hand].1 {
                self.t[side][hand].1 = false;
                if side == 0 {
                    let edge = self.t[0].len() - 1;
                    self.t[0].swap(hand, edge);
                    let migrated = self.t[0].pop().unwrap();
                    self.t[1].push(migrated);
                }
                self.rotate_top(side);
                *movements += 1;
            } else {
                let victim = self.t[side][hand].0;
                self.b[side].push(victim);
                let edge = self.t[side].len() - 1;
                self.t[side].swap(hand, edge);
                self.t[side].pop();
                self.rotate_top(side);
                *movements += 1;
                return victim;
            }
        }
    }

    pub fn access(&mut self, x: u64) -> RefOutcome {
        // Cache hit: set the bit, done.
        for side in 0..2 {
            if let Some(pos) = self.t[side].iter().position(|&(id, _)| id == x) {
                self.t[side][pos].1 = true;
                return RefOutcome { kind: AccessKind::Hit, evicted: None, movements: 0 };
            }
        }
        let mut ghost = false;
        let mut insert_side = 0;
        if self.b[0].contains(&x) {
            ghost = true;
            insert_side = 1;
            if self.adaptive {
                let delta = (self.b[1].len() / self.b[0].len()).max(1);
                self.p = (self.p + delta).min(self.c);
            }
            self.discard_btm(0, x);
        } else if self.b[1].contains(&x) {
            ghost = true;
            insert_side = 1;
            if self.adaptive {
                let delta = (self.b[0].len() / self.b[1].len()).max(1);
                self.p = self.p.saturating_sub(delta);
            }
            self.discard_btm(1, x);
        } else {
            if self.t[0].len() + self.b[0].len() >= self.c && !self.b[0].is_empty() {
                self.replace_btm(0);
            } else if self.t[0].len() + self.t[1].len() + self.b[0].len() + self.b[1].len()
                >= 2 * self.c
                && !self.b[1].is_empty()
            {
                self.replace_btm(1);
            }
        }

        let mut movements = 0;
        let mut evicted = None;
        if self.t[0].len() + self.t[1].len() >= self.c {
            let side = if self.t[0].len() >= self.p.max(1) { 0 } else { 1 };
            evicted = Some(self.replace_top(side, &mut movements));
        }
        self.t[insert_side].push((x, false));

        let kind = if ghost { AccessKind::GhostHit } else { AccessKind::Miss };
        RefOutcome { kind, evicted, movements }
    }

    /// Sanity bounds on the transcription itself.
    pub fn check(&self) {
        assert!(self.t[0].len() + self.t[1].len() <= self.c);
        assert!(self.b[0].len() + self.b[1].len() <= self.c);
        assert!(self.t[0].len() + self.b[0].len() <= self.c + 1);
        assert!(self.p <= self.c);
        let mut all: Vec<u64> = self
            .t
            .iter()
            .flat_map(|l| l.iter().map(|&(id, _)| id))
            .chain(self.b.iter().flatten().copied())
            .collect();
        let n = all.len();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), n, "a chunk appears in two lists");
    }

    pub fn set_bits(&self) -> usize {
        self.t.iter().flatten().filter(|&&(_, bit)| bit).count()
    }
}

/// Maximum achievable hits on a small stream by exhaustive search over
/// every eviction/bypass choice. Alphabet must be <= 16 ids in 0..16.
pub fn optimal_hits_exhaustive(stream: &[u64], c: usize) -> u64 {
    use std::collections::HashMap;
    fn go(
        stream: &[u64],
        c: usize,
        k: usize,
        resident: u16,
        memo: &mut HashMap<(usize, u16), u64>,
    ) -> u64 {
        if k == stream.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(k, resident)) {
            return v;
        }
        let x = stream[k] as u16;
        let bit = 1u16 << x;
        let best = if resident & bit != 0 {
            1 + go(stream, c, k + 1, resident, memo)
        } else {
            // Bypass is always an option.
            let mut best = go(stream, c, k + 1, resident, memo);
            if (resident.count_ones() as usize) < c {
                best = best.max(go(stream, c, k + 1, resident | bit, memo));
            } else {
                for y in 0..16 {
                    if resident & (1 << y) != 0 {
                        let next = (resident & !(1 << y)) | bit;
                        best = best.max(go(stream, c, k + 1, next, memo));
                    }
                }
            }
            best
        };
        memo.insert((k, resident), best);
        best
    }
    let mut memo = HashMap::new();
    go(stream, c, 0, 0, &mut memo)
}

/// Reuse distance by a backward scan per request: the oracle for the
/// tree-based implementation.
pub fn rd_brute_force(ids: &[u64], distinct: bool) -> Vec<Option<u64>> {
    let mut out = Vec::with_capacity(ids.len());
    for k in 0..ids.len() {
        let mut seen = std::collections::HashSet::new();
        let mut found = None;
        for (raw, j) in (0..k).rev().enumerate() {
            if ids[j] == ids[k] {
                found = Some(if distinct { seen.len() as u64 } else { raw as u64 });
                break;
            }
            seen.insert(ids[j]);
        }
        out.push(found);
    }
    out
}

pub fn random_ids(rng: &mut ChaCha8Rng, len: usize, alphabet: u64) -> Vec<u64> {
    (0..len).map(|_| rng.random_range(0..alphabet)).collect()
}

pub fn stream_of(ids: &[u64]) -> RequestStream {
    RequestStream::from_ids(ids.iter().copied())
}

pub fn chunks_of(ids: &[u64]) -> Vec<ChunkId> {
    ids.iter().map(|&id| ChunkId(id)).collect()
}
