//! Named random streams.
//!
//! Every consumer of randomness (class centers, sample noise, scheme keys, GA
//! runs) draws from its own stream. A stream is identified by the master seed
//! and a label such as `"data/centers"` or `"attack/ga/17"`; the stream seed is
//!
//! ```text
//! splitmix64(master ^ fnv1a64(label))
//! ```
//!
//! and the generator is ChaCha8 seeded from that value. Re-running any single
//! stage with the same master seed reproduces its randomness exactly, no matter
//! which other stages ran before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, label: &str) -> u64 {
    splitmix64(master ^ fnv1a64(label.as_bytes()))
}

pub fn stream(master: u64, label: &str) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(master, label))
}
