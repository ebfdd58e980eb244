//! Offline analytics over request streams: reuse-distance profiles,
//! rank-frequency tables, windowed h1/h2/h3 statistics with their derived
//! beta/gamma ratios, the CLOCK-family hand-movement bounds, and the
//! per-policy space/time overhead model.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::kernel::ChunkId;
use crate::workload::RequestStream;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AnalysisError {
    #[error("window length must be positive")]
    ZeroWindow,
    #[error("hand-movement bound is undefined at beta >= 1")]
    BetaOutOfRange,
    #[error("beta/gamma must satisfy 0 <= gamma <= beta")]
    BadRatios,
    #[error("pointer width {pointer_bits} cannot address {entries} entries")]
    PointerTooNarrow { pointer_bits: u32, entries: u64 },
}

// ---- reuse distance -----------------------------------------------------------

/// How to count the gap between consecutive accesses to the same chunk.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RdMode {
    /// Distinct intervening chunks (stack distance). Under this definition
    /// an LRU cache of capacity c hits exactly when the distance is < c.
    Distinct,
    /// Total intervening requests.
    Raw,
}

/// Per-request reuse distances (`None` for first accesses) and the CDF over
/// the finite values.
#[derive(Clone, Debug, PartialEq)]
pub struct ReuseDistanceProfile {
    pub distances: Vec<Option<u64>>,
    pub mode: RdMode,
}

impl ReuseDistanceProfile {
    /// (distance, cumulative fraction) pairs over finite distances,
    /// non-decreasing to 1. Empty when no request has a finite distance.
    pub fn cdf(&self) -> Vec<(u64, f64)> {
        let mut finite: Vec<u64> = self.distances.iter().flatten().copied().collect();
        finite.sort_unstable();
        let total = finite.len() as f64;
        let mut out: Vec<(u64, f64)> = Vec::new();
        for (i, rd) in finite.iter().enumerate() {
            let frac = (i + 1) as f64 / total;
            match out.last_mut() {
                Some(last) if last.0 == *rd => last.1 = frac,
                _ => out.push((*rd, frac)),
            }
        }
        out
    }

    pub fn finite_count(&self) -> usize {
        self.distances.iter().flatten().count()
    }
}

/// Fenwick tree over request positions; marks carry "chunk last seen here".
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick { tree: vec![0; n + 1] }
    }

    fn add(&mut self, mut i: usize, delta: i64) {
        i += 1;
        while i < self.tree.len() {
            self.tree[i] = (self.tree[i] as i64 + delta) as u64;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over positions [0, i].
    fn prefix(&self, mut i: usize) -> u64 {
        i += 1;
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }
}

/// Reuse distance of every request in one pass: O(n log n) in distinct
/// mode via a Fenwick tree over last-access positions.
pub fn reuse_distance(stream: &RequestStream, mode: RdMode) -> ReuseDistanceProfile {
    let n = stream.len();
    let mut distances = Vec::with_capacity(n);
    let mut last_pos: HashMap<ChunkId, usize> = HashMap::new();
    let mut marks = Fenwick::new(n);
    for (k, chunk) in stream.chunks().enumerate() {
        match last_pos.get(&chunk).copied() {
            Some(prev) => {
                let rd = match mode {
                    // Chunks whose most recent access falls strictly
                    // between the two accesses, each counted once.
                    RdMode::Distinct => marks.prefix(k.saturating_sub(1)) - marks.prefix(prev),
                    RdMode::Raw => (k - prev - 1) as u64,
                };
                distances.push(Some(rd));
                marks.add(prev, -1);
            }
            None => distances.push(None),
        }
        marks.add(k, 1);
        last_pos.insert(chunk, k);
    }
    ReuseDistanceProfile { distances, mode }
}

// ---- popularity ----------------------------------------------------------------

/// Access counts per chunk, sorted descending (rank order). Ties sort by
/// chunk id for determinism.
pub fn popularity_histogram(stream: &RequestStream) -> Vec<(ChunkId, u64)> {
    let mut counts: HashMap<ChunkId, u64> = HashMap::new();
    for chunk in stream.chunks() {
        *counts.entry(chunk).or_default() += 1;
    }
    let mut table: Vec<(ChunkId, u64)> = counts.into_iter().collect();
    table.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    table
}

/// Least-squares slope of log(count) against log(rank) over the first
/// `max_rank` ranks. A sample drawn from Zipf(alpha) regresses to -alpha.
pub fn loglog_slope(table: &[(ChunkId, u64)], max_rank: usize) -> f64 {
    let points: Vec<(f64, f64)> = table
        .iter()
        .take(max_rank)
        .enumerate()
        .filter(|(_, (_, count))| *count > 0)
        .map(|(i, (_, count))| (((i + 1) as f64).ln(), (*count as f64).ln()))
        .collect();
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

// ---- window statistics -----------------------------------------------------------

/// Counts over one window: h_i = chunks accessed at least i times, and the
/// ratios beta = h2/h1, gamma = h3/h1 governing average hand movement.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrafficCounts {
    pub window_start: u64,
    pub window_len: u64,
    pub h1: u64,
    pub h2: u64,
    pub h3: u64,
    pub beta: f64,
    pub gamma: f64,
}

/// Per-window counts plus request-weighted pooled ratios.
#[derive(Clone, Debug, PartialEq)]
pub struct TrafficProfile {
    pub windows: Vec<TrafficCounts>,
    pub pooled_beta: f64,
    pub pooled_gamma: f64,
}

/// Tumbling-window h1/h2/h3 statistics. The trailing partial window, when
/// any, is included and weighted by its length in the pooled ratios.
pub fn traffic_counts(stream: &RequestStream, window: usize) -> Result<TrafficProfile, AnalysisError> {
    if window == 0 {
        return Err(AnalysisError::ZeroWindow);
    }
    let chunks = stream.chunk_vec();
    let mut windows = Vec::new();
    let mut weighted_beta = 0.0;
    let mut weighted_gamma = 0.0;
    let mut total_weight = 0u64;
    for (w, slice) in chunks.chunks(window).enumerate() {
        let mut counts: HashMap<ChunkId, u64> = HashMap::new();
        for &c in slice {
            *counts.entry(c).or_default() += 1;
        }
        let h1 = counts.len() as u64;
        let h2 = counts.values().filter(|&&n| n >= 2).count() as u64;
        let h3 = counts.values().filter(|&&n| n >= 3).count() as u64;
        let beta = if h1 > 0 { h2 as f64 / h1 as f64 } else { 0.0 };
        let gamma = if h1 > 0 { h3 as f64 / h1 as f64 } else { 0.0 };
        windows.push(TrafficCounts {
            window_start: (w * window) as u64,
            window_len: slice.len() as u64,
            h1,
            h2,
            h3,
            beta,
            gamma,
        });
        weighted_beta += beta * slice.len() as f64;
        weighted_gamma += gamma * slice.len() as f64;
        total_weight += slice.len() as u64;
    }
    let (pooled_beta, pooled_gamma) = if total_weight > 0 {
        (weighted_beta / total_weight as f64, weighted_gamma / total_weight as f64)
    } else {
        (0.0, 0.0)
    };
    Ok(TrafficProfile { windows, pooled_beta, pooled_gamma })
}

// ---- hand-movement bounds ----------------------------------------------------------

/// Steady-state bound on average hand movements per miss for the two-list
/// CLOCK: (1 + beta + gamma) / (1 - beta).
pub fn hand_bound(beta: f64, gamma: f64) -> Result<f64, AnalysisError> {
    if !(0.0..1.0).contains(&beta) {
        return Err(AnalysisError::BetaOutOfRange);
    }
    if gamma < 0.0 || gamma > beta {
        return Err(AnalysisError::BadRatios);
    }
    Ok((1.0 + beta + gamma) / (1.0 - beta))
}

/// Plain-CLOCK bound: (1 + beta) / (1 - beta).
pub fn clock_hand_bound(beta: f64) -> Result<f64, AnalysisError> {
    if !(0.0..1.0).contains(&beta) {
        return Err(AnalysisError::BetaOutOfRange);
    }
    Ok((1.0 + beta) / (1.0 - beta))
}

// ---- space overhead ----------------------------------------------------------------

/// Policies the overhead model distinguishes; the three LRU rows differ
/// only in implementation cost, never in behavior.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum OverheadPolicy {
    Fifo,
    LruDll,
    LruStack,
    LruCounter,
    LfuHeap,
    Arc,
    Lirs,
    Clock,
    Car,
    CompactCar,
}

impl OverheadPolicy {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "fifo" => Self::Fifo,
            "lru-dll" => Self::LruDll,
            "lru-stack" => Self::LruStack,
            "lru-counter" => Self::LruCounter,
            "lfu" | "lfu-heap" => Self::LfuHeap,
            "arc" => Self::Arc,
            "lirs" => Self::Lirs,
            "clock" => Self::Clock,
            "car" => Self::Car,
            "compact-car" => Self::CompactCar,
            _ => return None,
        })
    }
}

/// Control-state cost in bits for `entries` cache entries, `pointer_bits`
/// wide pointers, `counter_bits` wide counters, and `ghosts` history
/// entries (LIRS only). Payload storage is excluded; so is the lookup
/// structure, which every policy needs alike.
pub fn space_overhead(
    policy: OverheadPolicy,
    entries: u64,
    pointer_bits: u32,
    counter_bits: u32,
    ghosts: u64,
) -> Result<u128, AnalysisError> {
    let min_bits = if entries <= 1 { 0 } else { 64 - (entries - 1).leading_zeros() };
    if pointer_bits < min_bits {
        return Err(AnalysisError::PointerTooNarrow { pointer_bits, entries });
    }
    let n = entries as u128;
    let p = pointer_bits as u128;
    let c = counter_bits as u128;
    let m = ghosts as u128;
    Ok(match policy {
        OverheadPolicy::Fifo => p,
        OverheadPolicy::LruDll => 2 * n * p + 2 * p,
        OverheadPolicy::LruStack => 0,
        OverheadPolicy::LruCounter => n * c + c,
        OverheadPolicy::LfuHeap => n * c,
        OverheadPolicy::Arc => 4 * n * p + 7 * p,
        OverheadPolicy::Lirs => 4 * n * p + 2 * n + 2 * m * p + 4 * p,
        OverheadPolicy::Clock => n + p,
        OverheadPolicy::Car => 4 * n * p + n + 9 * p,
        OverheadPolicy::CompactCar => n + 9 * p,
    })
}

// ---- time classes --------------------------------------------------------------------

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum AccessCase {
    Hit,
    Miss,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CostCase {
    Worst,
    Average,
}

/// Symbolic per-access cost: either an exact count of memory reads/writes
/// (plus the negligible remainder) or an asymptotic class. Never evaluated
/// numerically.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TimeClass {
    /// reads * t_r + writes * t_w + delta.
    MemAccess { reads: u32, writes: u32 },
    O1,
    OLogN,
    ON,
    OM,
    OInvBeta,
    OInvOneMinusBeta,
}

impl std::fmt::Display for TimeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeClass::MemAccess { reads, writes } => {
                let mut terms = Vec::new();
                match reads {
                    0 => {}
                    1 => terms.push("t_r".to_string()),
                    r => terms.push(format!("{r}t_r")),
                }
                match writes {
                    0 => {}
                    1 => terms.push("t_w".to_string()),
                    w => terms.push(format!("{w}t_w")),
                }
                terms.push("delta".to_string());
                write!(f, "{}", terms.join(" + "))
            }
            TimeClass::O1 => write!(f, "O(1)"),
            TimeClass::OLogN => write!(f, "O(log n)"),
            TimeClass::ON => write!(f, "O(n)"),
            TimeClass::OM => write!(f, "O(m)"),
            TimeClass::OInvBeta => write!(f, "O(1/beta)"),
            TimeClass::OInvOneMinusBeta => write!(f, "O(1/(1-beta))"),
        }
    }
}

/// Per-policy time class table.
pub fn time_class(policy: OverheadPolicy, access: AccessCase, cost: CostCase) -> TimeClass {
    use AccessCase::*;
    use CostCase::*;
    use TimeClass::*;
    match (policy, access, cost) {
        (OverheadPolicy::Fifo, Hit, _) => MemAccess { reads: 0, writes: 0 },
        (OverheadPolicy::Fifo, Miss, _) => MemAccess { reads: 1, writes: 1 },
        (OverheadPolicy::LruDll, _, _) => MemAccess { reads: 3, writes: 6 },
        (OverheadPolicy::LruStack, _, _) => ON,
        (OverheadPolicy::LruCounter, Hit, _) => O1,
        (OverheadPolicy::LruCounter, Miss, _) => ON,
        (OverheadPolicy::LfuHeap, _, _) => OLogN,
        (OverheadPolicy::Arc, _, _) => O1,
        (OverheadPolicy::Lirs, _, Worst) => OM,
        (OverheadPolicy::Lirs, _, Average) => OInvBeta,
        (OverheadPolicy::Clock | OverheadPolicy::Car | OverheadPolicy::CompactCar, Hit, _) => {
            MemAccess { reads: 0, writes: 1 }
        }
        (OverheadPolicy::Clock | OverheadPolicy::Car | OverheadPolicy::CompactCar, Miss, Worst) => ON,
        (OverheadPolicy::Clock | OverheadPolicy::Car | OverheadPolicy::CompactCar, Miss, Average) => {
            OInvOneMinusBeta
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::{pattern_stream, PatternSpec, RequestStream};

    #[test]
    fn rd_modes_split_on_duplicates() {
        // a,b,c,a: both modes give 2. a,b,b,a: distinct 1, raw 2.
        let s = RequestStream::from_ids([1, 2, 3, 1]);
        assert_eq!(reuse_distance(&s, RdMode::Distinct).distances[3], Some(2));
        assert_eq!(reuse_distance(&s, RdMode::Raw).distances[3], Some(2));

        let s = RequestStream::from_ids([1, 2, 2, 1]);
        assert_eq!(reuse_distance(&s, RdMode::Distinct).distances[3], Some(1));
        assert_eq!(reuse_distance(&s, RdMode::Raw).distances[3], Some(2));
    }

    #[test]
    fn scan_has_no_finite_distances() {
        let s = pattern_stream(&PatternSpec::Scan { length: 32 });
        let profile = reuse_distance(&s, RdMode::Distinct);
        assert_eq!(profile.finite_count(), 0);
        assert!(profile.cdf().is_empty());
    }

    #[test]
    fn cdf_is_monotone_to_one() {
        let s = RequestStream::from_ids([1, 2, 1, 3, 2, 1, 4, 4]);
        let cdf = reuse_distance(&s, RdMode::Distinct).cdf();
        assert!(cdf.windows(2).all(|w| w[0].1 <= w[1].1 && w[0].0 < w[1].0));
        assert!((cdf.last().unwrap().1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn popularity_counts_loop_and_scan() {
        let lp = pattern_stream(&PatternSpec::Loop { period: 3, reps: 2 });
        let table = popularity_histogram(&lp);
        assert_eq!(table.len(), 3);
        assert!(table.iter().all(|&(_, n)| n == 2));

        let sc = pattern_stream(&PatternSpec::Scan { length: 7 });
        let table = popularity_histogram(&sc);
        assert_eq!(table.len(), 7);
        assert!(table.iter().all(|&(_, n)| n == 1));
    }

    #[test]
    fn window_statistics_match_definitions() {
        // Pure scan: beta = gamma = 0.
        let sc = pattern_stream(&PatternSpec::Scan { length: 12 });
        let profile = traffic_counts(&sc, 4).unwrap();
        assert!(profile.windows.iter().all(|w| w.beta == 0.0 && w.gamma == 0.0));

        // a,a,a in one window: h = (1,1,1).
        let s = RequestStream::from_ids([9, 9, 9]);
        let profile = traffic_counts(&s, 3).unwrap();
        assert_eq!(profile.windows.len(), 1);
        let w = &profile.windows[0];
        assert_eq!((w.h1, w.h2, w.h3), (1, 1, 1));
        assert_eq!((w.beta, w.gamma), (1.0, 1.0));

        assert_eq!(traffic_counts(&s, 0), Err(AnalysisError::ZeroWindow));
    }

    #[test]
    fn h_counts_are_monotone() {
        let s = RequestStream::from_ids([1, 2, 1, 3, 1, 2, 4, 5, 1, 2, 3]);
        let profile = traffic_counts(&s, 5).unwrap();
        for w in &profile.windows {
            assert!(w.h1 >= w.h2 && w.h2 >= w.h3);
            assert!(w.gamma <= w.beta && w.beta <= 1.0);
        }
    }

    #[test]
    fn content_level_beta_exceeds_chunk_level_beta() {
        // Expanding content requests into chunk sessions stretches reuse,
        // so the repeat ratio inside a fixed request window drops.
        use crate::workload::{chunkify, zipf_stream, ChunkifySpec, ZipfSpec};
        let content = zipf_stream(&ZipfSpec {
            n_contents: 1_000,
            alpha: 1.0,
            n_requests: 20_000,
            seed: 9,
        })
        .unwrap();
        let chunked =
            chunkify(&content, &ChunkifySpec::new(15_000, 600_000, 60_000)).unwrap().reindexed();
        let window = 1_000;
        let content_beta = traffic_counts(&content, window).unwrap().pooled_beta;
        let chunk_beta = traffic_counts(&chunked, window).unwrap().pooled_beta;
        assert!(
            content_beta > chunk_beta,
            "content beta {content_beta} should exceed chunk beta {chunk_beta}"
        );
    }

    #[test]
    fn hand_bounds_reproduce_reported_values() {
        assert_eq!(hand_bound(0.0, 0.0).unwrap(), 1.0);
        assert!((hand_bound(0.2, 0.2).unwrap() - 1.75).abs() < 1e-12);
        assert!((hand_bound(0.625, 0.625).unwrap() - 6.0).abs() < 1e-12);
        assert!(hand_bound(1.0, 0.5).is_err());
        assert!(hand_bound(0.5, 0.6).is_err());

        assert_eq!(clock_hand_bound(0.0).unwrap(), 1.0);
        assert_eq!(clock_hand_bound(0.5).unwrap(), 3.0);
        assert!(clock_hand_bound(1.0).is_err());
    }

    #[test]
    fn space_overhead_reference_points() {
        let bits = space_overhead(OverheadPolicy::CompactCar, 20_000_000, 25, 32, 0).unwrap();
        assert_eq!(bits, 20_000_225);
        let bits = space_overhead(OverheadPolicy::Car, 20_000_000, 25, 32, 0).unwrap();
        assert_eq!(bits, 2_020_000_225);
        let bits = space_overhead(OverheadPolicy::Clock, 1024, 10, 32, 0).unwrap();
        assert_eq!(bits, 1034);
        assert!(space_overhead(OverheadPolicy::Fifo, 1024, 5, 32, 0).is_err());
    }

    #[test]
    fn space_overhead_monotone_in_parameters() {
        let base = space_overhead(OverheadPolicy::Lirs, 1000, 16, 32, 4000).unwrap();
        assert!(space_overhead(OverheadPolicy::Lirs, 2000, 16, 32, 4000).unwrap() >= base);
        assert!(space_overhead(OverheadPolicy::Lirs, 1000, 17, 32, 4000).unwrap() >= base);
        assert!(space_overhead(OverheadPolicy::Lirs, 1000, 16, 33, 4000).unwrap() >= base);
        assert!(space_overhead(OverheadPolicy::Lirs, 1000, 16, 32, 5000).unwrap() >= base);
    }

    #[test]
    fn time_classes_match_table() {
        use AccessCase::*;
        use CostCase::*;
        assert_eq!(
            time_class(OverheadPolicy::CompactCar, Hit, Worst),
            TimeClass::MemAccess { reads: 0, writes: 1 }
        );
        assert_eq!(time_class(OverheadPolicy::CompactCar, Hit, Worst).to_string(), "t_w + delta");
        assert_eq!(time_class(OverheadPolicy::Clock, Miss, Average), TimeClass::OInvOneMinusBeta);
        assert_eq!(time_class(OverheadPolicy::Lirs, Miss, Average), TimeClass::OInvBeta);
        assert_eq!(time_class(OverheadPolicy::Lirs, Hit, Worst), TimeClass::OM);
        assert_eq!(
            time_class(OverheadPolicy::LruDll, Miss, Worst).to_string(),
            "3t_r + 6t_w + delta"
        );
        assert_eq!(time_class(OverheadPolicy::Fifo, Hit, Average).to_string(), "delta");
    }
}
