//! Request stream synthesis and ingestion: Zipf popularity draws, the
//! canonical access patterns (scan, loop, correlated bursts, fickle working
//! sets), chunk-level expansion of content requests at fixed rates, stream
//! superimposition, and a profile generator that reproduces the shape of a
//! real VoD trace (total/unique/repeated counts) at any scale.
//!
//! Everything random is driven by ChaCha8 keyed with an explicit seed;
//! per-session substreams use the generator's stream feature, so a spec
//! plus a seed reproduces the same bytes on any platform.

pub mod trace;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernel::{chunk_of_content, ChunkId, Request, CHUNK_INDEX_BITS};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WorkloadError {
    #[error("a workload needs at least one content")]
    ZeroContents,
    #[error("the popularity exponent must be non-negative")]
    NegativeAlpha,
    #[error("chunk size must be positive")]
    ZeroChunkSize,
    #[error("bitrate must be positive")]
    ZeroBitrate,
    #[error("content arrival rate must be positive")]
    ZeroArrivalRate,
    #[error("content of {content_bytes} bytes needs more than 2^{CHUNK_INDEX_BITS} chunks")]
    TooManyChunks { content_bytes: u64 },
    #[error("profile needs repeated <= unique <= total and total >= unique + repeated")]
    BadProfile,
    #[error("request times must be non-decreasing")]
    NonMonotoneTime,
}

/// Ordered request sequence. `sizes`, when present, carries a per-request
/// content size in bytes (parallel to `requests`), as loaded from a trace.
#[derive(Clone, Debug, PartialEq)]
pub struct RequestStream {
    requests: Vec<Request>,
    sizes: Option<Vec<u64>>,
}

impl RequestStream {
    pub fn empty() -> Self {
        RequestStream { requests: Vec::new(), sizes: None }
    }

    /// Stream over the given ids with virtual times 0..n.
    pub fn from_ids<I: IntoIterator<Item = u64>>(ids: I) -> Self {
        let requests = ids
            .into_iter()
            .enumerate()
            .map(|(k, id)| Request { chunk: ChunkId(id), virtual_time: k as u64 })
            .collect();
        RequestStream { requests, sizes: None }
    }

    pub fn from_requests(requests: Vec<Request>) -> Result<Self, WorkloadError> {
        if requests.windows(2).any(|w| w[1].virtual_time < w[0].virtual_time) {
            return Err(WorkloadError::NonMonotoneTime);
        }
        Ok(RequestStream { requests, sizes: None })
    }

    pub(crate) fn with_sizes(requests: Vec<Request>, sizes: Option<Vec<u64>>) -> Self {
        if let Some(s) = &sizes {
            debug_assert_eq!(s.len(), requests.len());
        }
        // An empty stream has no size records to remember.
        let sizes = sizes.filter(|_| !requests.is_empty());
        RequestStream { requests, sizes }
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn sizes(&self) -> Option<&[u64]> {
        self.sizes.as_deref()
    }

    pub fn chunks(&self) -> impl Iterator<Item = ChunkId> + '_ {
        self.requests.iter().map(|r| r.chunk)
    }

    pub fn chunk_vec(&self) -> Vec<ChunkId> {
        self.chunks().collect()
    }

    /// Same requests with virtual times rewritten to 0..n.
    pub fn reindexed(&self) -> RequestStream {
        let requests = self
            .requests
            .iter()
            .enumerate()
            .map(|(k, r)| Request { chunk: r.chunk, virtual_time: k as u64 })
            .collect();
        RequestStream { requests, sizes: self.sizes.clone() }
    }

    /// Affine time transform, for composing phase streams before a merge.
    pub fn with_times(&self, scale: u64, offset: u64) -> RequestStream {
        let requests = self
            .requests
            .iter()
            .map(|r| Request { chunk: r.chunk, virtual_time: r.virtual_time * scale + offset })
            .collect();
        RequestStream { requests, sizes: self.sizes.clone() }
    }

    /// Appends `other` after this stream, re-indexing the result.
    pub fn concat(&self, other: &RequestStream) -> RequestStream {
        let mut requests = self.requests.clone();
        requests.extend_from_slice(&other.requests);
        RequestStream { requests, sizes: None }.reindexed()
    }
}

// ---- Zipf -------------------------------------------------------------------

/// Zipf draw specification: p(i) proportional to i^-alpha over ranks 1..=n.
#[derive(Clone, Debug, PartialEq)]
pub struct ZipfSpec {
    pub n_contents: u64,
    pub alpha: f64,
    pub n_requests: u64,
    pub seed: u64,
}

/// Normalized probability mass over ranks 1..=n.
pub fn zipf_pmf(n_contents: u64, alpha: f64) -> Vec<f64> {
    let mut weights: Vec<f64> = (1..=n_contents).map(|i| (i as f64).powf(-alpha)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// I.i.d. draws by inverse-CDF binary search. Ids are 0-based ranks, so
/// id 0 is the most popular content.
pub fn zipf_stream(spec: &ZipfSpec) -> Result<RequestStream, WorkloadError> {
    if spec.n_contents == 0 {
        return Err(WorkloadError::ZeroContents);
    }
    if spec.alpha.is_nan() || spec.alpha < 0.0 {
        return Err(WorkloadError::NegativeAlpha);
    }
    let pmf = zipf_pmf(spec.n_contents, spec.alpha);
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for p in &pmf {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = seeded_rng(spec.seed);
    let ids = (0..spec.n_requests).map(|_| {
        let u: f64 = rng.random();
        // First rank whose cumulative mass exceeds u.
        cdf.partition_point(|&c| c <= u).min(pmf.len() - 1) as u64
    });
    Ok(RequestStream::from_ids(ids))
}

// ---- canonical access patterns ----------------------------------------------

/// The four canonical access-pattern generators. All are deterministic.
#[derive(Clone, Debug, PartialEq)]
pub enum PatternSpec {
    /// Every chunk exactly once.
    Scan { length: u64 },
    /// A repeated scan over a fixed period.
    Loop { period: u64, reps: u64 },
    /// Short bursts, each re-referencing a fresh small set.
    Correlated { set_size: u64, burst_len: u64, bursts: u64 },
    /// Rapidly shifting working sets: each phase cycles a set shifted by
    /// `shift` ids from the previous one.
    Fickle { working_set: u64, phase_len: u64, phases: u64, shift: u64 },
}

pub fn pattern_stream(spec: &PatternSpec) -> RequestStream {
    let ids: Vec<u64> = match *spec {
        PatternSpec::Scan { length } => (0..length).collect(),
        PatternSpec::Loop { period, reps } => {
            (0..reps).flat_map(|_| 0..period).collect()
        }
        PatternSpec::Correlated { set_size, burst_len, bursts } => {
            let mut ids = Vec::with_capacity((burst_len * bursts) as usize);
            for b in 0..bursts {
                for k in 0..burst_len {
                    ids.push(b * set_size + (k % set_size.max(1)));
                }
            }
            ids
        }
        PatternSpec::Fickle { working_set, phase_len, phases, shift } => {
            let mut ids = Vec::with_capacity((phase_len * phases) as usize);
            for ph in 0..phases {
                for k in 0..phase_len {
                    ids.push(ph * shift + (k % working_set.max(1)));
                }
            }
            ids
        }
    };
    RequestStream::from_ids(ids)
}

// ---- chunk-level expansion ---------------------------------------------------

/// Expansion of content requests into paced chunk requests.
///
/// A content request arriving at (integer) time t expands into
/// `ceil(content_bytes / chunk_bytes)` chunk requests spaced by
/// `1 / chunks_per_second` virtual seconds, where `chunks_per_second =
/// bitrate / (8 * chunk_bytes)`. Times are kept exact as integer ticks
/// (`seconds * bitrate * arrivals_per_sec`), so merge order never depends
/// on floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct ChunkifySpec {
    pub chunk_bytes: u64,
    pub bitrate_bits_per_sec: u64,
    /// Content size when the input stream carries none.
    pub content_bytes: u64,
    /// Content request arrivals per virtual second.
    pub arrivals_per_sec: u64,
}

impl ChunkifySpec {
    pub fn new(chunk_bytes: u64, bitrate_bits_per_sec: u64, content_bytes: u64) -> Self {
        ChunkifySpec { chunk_bytes, bitrate_bits_per_sec, content_bytes, arrivals_per_sec: 1 }
    }

    pub fn chunks_per_second(&self) -> f64 {
        self.bitrate_bits_per_sec as f64 / (8.0 * self.chunk_bytes as f64)
    }
}

/// Expands every content request into its paced chunk requests and merges
/// the sessions by time; ties break by content-request order. The output
/// carries tick times (not re-indexed), so it can be superimposed with
/// other streams built from the same spec.
pub fn chunkify(
    content_stream: &RequestStream,
    spec: &ChunkifySpec,
) -> Result<RequestStream, WorkloadError> {
    if spec.chunk_bytes == 0 {
        return Err(WorkloadError::ZeroChunkSize);
    }
    if spec.bitrate_bits_per_sec == 0 {
        return Err(WorkloadError::ZeroBitrate);
    }
    if spec.arrivals_per_sec == 0 {
        return Err(WorkloadError::ZeroArrivalRate);
    }
    let sizes = content_stream.sizes();
    let mut expanded: Vec<(u64, usize, u64)> = Vec::new();
    for (k, req) in content_stream.requests().iter().enumerate() {
        let content_bytes = sizes.map_or(spec.content_bytes, |s| s[k]);
        let n_chunks = content_bytes.div_ceil(spec.chunk_bytes).max(1);
        if n_chunks >= (1 << CHUNK_INDEX_BITS) {
            return Err(WorkloadError::TooManyChunks { content_bytes });
        }
        // tick = seconds * bitrate * arrivals: arrival contributes
        // t * bitrate, the j-th chunk adds j * 8 * chunk_bytes * arrivals.
        let arrival = (req.virtual_time as u128) * (spec.bitrate_bits_per_sec as u128);
        for j in 0..n_chunks {
            let tick = arrival
                + (j as u128) * 8 * (spec.chunk_bytes as u128) * (spec.arrivals_per_sec as u128);
            let tick = u64::try_from(tick).expect("tick overflow");
            expanded.push((tick, k, j));
        }
    }
    expanded.sort_by_key(|&(tick, k, j)| (tick, k, j));
    let requests = expanded
        .into_iter()
        .map(|(tick, k, j)| Request {
            chunk: chunk_of_content(content_stream.requests()[k].chunk.0, j),
            virtual_time: tick,
        })
        .collect();
    Ok(RequestStream::with_sizes(requests, None))
}

// ---- superimposition ---------------------------------------------------------

/// Global merge of time-sorted streams; ties break by input stream index,
/// then by sequence within the stream. The output is re-indexed to a
/// single request-count clock.
pub fn superimpose(streams: &[RequestStream]) -> RequestStream {
    let mut tagged: Vec<(u64, usize, usize)> = Vec::new();
    for (s, stream) in streams.iter().enumerate() {
        for (k, req) in stream.requests().iter().enumerate() {
            tagged.push((req.virtual_time, s, k));
        }
    }
    tagged.sort();
    let requests = tagged
        .iter()
        .enumerate()
        .map(|(t, &(_, s, k))| Request {
            chunk: streams[s].requests()[k].chunk,
            virtual_time: t as u64,
        })
        .collect();
    RequestStream::with_sizes(requests, None)
}

// ---- trace-shaped profile ----------------------------------------------------

/// Counts shaping a synthetic stand-in for a real trace: total accesses,
/// distinct chunks, and chunks requested at least twice.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSpec {
    pub total: u64,
    pub unique: u64,
    pub repeated: u64,
    pub seed: u64,
}

/// Builds a stream matching the profile counts exactly: `unique - repeated`
/// one-timers, `repeated` chunks with at least two accesses, surplus
/// accesses spread over the repeated set by a Zipf(1) draw, all shuffled.
pub fn profile_stream(spec: &ProfileSpec) -> Result<RequestStream, WorkloadError> {
    if spec.repeated > spec.unique
        || spec.unique > spec.total
        || spec.total < spec.unique + spec.repeated
        || spec.unique == 0
    {
        return Err(WorkloadError::BadProfile);
    }
    let one_timers = spec.unique - spec.repeated;
    let mut accesses: Vec<u64> = Vec::with_capacity(spec.total as usize);
    accesses.extend(0..one_timers);
    for r in 0..spec.repeated {
        accesses.push(one_timers + r);
        accesses.push(one_timers + r);
    }
    let surplus = spec.total - spec.unique - spec.repeated;
    if surplus > 0 && spec.repeated > 0 {
        let pmf = zipf_pmf(spec.repeated, 1.0);
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for p in &pmf {
            acc += p;
            cdf.push(acc);
        }
        let mut rng = seeded_rng(spec.seed);
        for _ in 0..surplus {
            let u: f64 = rng.random();
            let rank = cdf.partition_point(|&c| c <= u).min(pmf.len() - 1) as u64;
            accesses.push(one_timers + rank);
        }
    }
    // Fisher-Yates on a second generator stream keeps the draw and the
    // shuffle independently reproducible.
    let mut rng = seeded_rng(spec.seed);
    rng.set_stream(1);
    for i in (1..accesses.len()).rev() {
        let j = rng.random_range(0..=i);
        accesses.swap(i, j);
    }
    Ok(RequestStream::from_ids(accesses))
}
