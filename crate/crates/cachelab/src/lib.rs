//! Cache replacement laboratory for chunk-level caching.
//!
//! The crate bundles everything needed to study replacement policies on
//! router-style chunk workloads at desk scale:
//!
//! - [`kernel`]: chunk identity, the policy contract, and the id→slot
//!   directory shared by the array-based policies.
//! - [`policy`]: the fixed-buffer adaptive CLOCK policy ([`policy::CompactCar`])
//!   with its fixed-ratio ablation, plus the comparison
//!   suite: FIFO, CLOCK, LRU, LFU, ARC, LIRS, reference CAR, and offline OPT.
//! - [`workload`]: Zipf and canonical access-pattern generators, chunk-level
//!   expansion of content requests, stream superimposition, and the
//!   line-oriented trace format.
//! - [`sim`]: single-node runs, capacity sweeps, the line topology with
//!   on-path caching, the ideal-cooperation bound, and parameter-dynamics
//!   logging.
//! - [`analysis`]: reuse-distance profiles, popularity tables, window
//!   statistics (h1/h2/h3, beta, gamma), hand-movement bounds, and the
//!   per-policy space/time overhead model.
//!
//! Everything is deterministic: generators take explicit seeds (ChaCha8),
//! simulations replay streams sequentially, and reports serialize with
//! stable field order.

pub mod analysis;
pub mod kernel;
pub mod policy;
pub mod sim;
pub mod workload;

pub use kernel::{AccessKind, AccessOutcome, Capacity, ChunkId, ReplacementPolicy, Request};
pub use policy::PolicySpec;
pub use workload::RequestStream;
