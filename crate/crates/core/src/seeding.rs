//! Deterministic stream derivation.
//!
//! Every random quantity in the crate is drawn from a [`Stream`], a ChaCha8
//! generator. Streams are derived from a 64-bit master seed as follows; the
//! procedure is stated bit-exactly so other implementations can reproduce it.
//!
//! ```text
//! splitmix64(x):
//!     z = x + 0x9E3779B97F4A7C15            (wrapping)
//!     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!     return z ^ (z >> 31)
//!
//! replica_seed(master, r) = splitmix64(master ^ splitmix64(r))
//!
//! stream(seed):
//!     s0 = splitmix64(seed); s1 = splitmix64(s0); s2 = splitmix64(s1); s3 = splitmix64(s2)
//!     key = little-endian bytes of s0 || s1 || s2 || s3   (32 bytes)
//!     ChaCha8 with that key, stream id 0, word position 0
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replica `replica` under master seed `master`.
pub fn replica_seed(master: u64, replica: u64) -> u64 {
    splitmix64(master ^ splitmix64(replica))
}

/// Generator keyed by four chained splitmix64 outputs of `seed`.
pub fn stream(seed: u64) -> Stream {
    let mut key = [0u8; 32];
    let mut s = seed;
    for chunk in key.chunks_exact_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Stream of a given replica.
pub fn replica_stream(master: u64, replica: u64) -> Stream {
    stream(replica_seed(master, replica))
}
