//! Seeded counter-based streams: one independent ChaCha stream per `(seed, index)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Environment variable holding the default global seed.
pub const SEED_ENV: &str = "OCYCLE_SEED";

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Sub-stream of trial `trial`, purpose `lane` (e.g. partition vs sprinkle).
pub fn trial_rng(seed: u64, trial: u64, lane: u64) -> StreamRng {
    stream_rng(seed, trial.wrapping_mul(64).wrapping_add(lane))
}

pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}
