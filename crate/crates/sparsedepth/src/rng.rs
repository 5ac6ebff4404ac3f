//! Deterministic keyed RNG streams.
//!
//! Every random decision in the crate draws from a ChaCha8 stream keyed by
//! (user seed, domain tag) with the per-pixel linear index as the stream
//! number. Results are therefore bit-exact for a given seed and independent
//! of evaluation order, and the sampling and noise domains never share
//! randomness even under the same seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const DOMAIN_SAMPLE_WEIGHTED: [u8; 8] = *b"smpwght\0";
pub(crate) const DOMAIN_SAMPLE_UNIFORM: [u8; 8] = *b"smpunif\0";
pub(crate) const DOMAIN_NOISE: [u8; 8] = *b"noise\0\0\0";

pub(crate) fn keyed_rng(seed: u64, domain: [u8; 8], stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain);
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}
