#![no_main]
use cachelab::kernel::{Capacity, ChunkId, ReplacementPolicy};
use cachelab::policy::CompactCar;
use libfuzzer_sys::fuzz_target;

// Byte-driven request stream against a debug-checked policy instance:
// the first byte picks the capacity, the rest are chunk ids.
fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let c = (data[0] as usize % 32) + 1;
    let mut policy = CompactCar::new(Capacity::new(c).unwrap());
    for (k, &b) in data[1..].iter().enumerate() {
        policy.access(ChunkId(u64::from(b & 0x3f)), k as u64);
        policy.validate();
    }
});
