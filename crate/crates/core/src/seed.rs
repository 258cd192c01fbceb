//! Seeded, splittable random streams.
//!
//! Every randomized routine draws from a ChaCha8 generator keyed by the user
//! seed, with the 64-bit stream id selecting an independent sub-stream. Work
//! that is split across threads derives one stream per unit of work, so the
//! output never depends on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream-id namespaces, kept disjoint so different constructions sharing a
/// seed never reuse randomness.
pub mod domain {
    pub const EIL_LAYER: u64 = 1;
    pub const HITTING_LAYER: u64 = 2;
    pub const MONTE_CARLO: u64 = 3;
    pub const LAGRANGIAN: u64 = 4;
}

/// Packs `(domain, major, minor)` into a stream id.
pub fn stream_id(domain: u64, major: u64, minor: u64) -> u64 {
    debug_assert!(domain < 1 << 8 && major < 1 << 24 && minor < 1 << 32);
    (domain << 56) | (major << 32) | minor
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
