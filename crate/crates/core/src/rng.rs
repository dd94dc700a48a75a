//! Deterministic per-task random streams.
//!
//! Every stochastic task (one sequence, one shot batch, one bootstrap
//! resample) draws from its own ChaCha8 stream. The stream id is
//! `(domain << 48) | index` under the master seed, so results do not depend
//! on the order in which tasks are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TaskRng = ChaCha8Rng;

pub const DOMAIN_SEQUENCES: u16 = 1;
pub const DOMAIN_SHOTS: u16 = 2;
pub const DOMAIN_FOCUS: u16 = 3;
pub const DOMAIN_BOOTSTRAP: u16 = 4;
pub const DOMAIN_DEPUMP: u16 = 5;
pub const DOMAIN_TRIALS: u16 = 6;

pub fn task_rng(seed: u64, domain: u16, index: u64) -> TaskRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << 48) | (index & 0xFFFF_FFFF_FFFF));
    rng
}

/// Derives a child seed, used when a whole sub-pipeline needs its own master seed.
pub fn derive_seed(seed: u64, domain: u16, index: u64) -> u64 {
    use rand::RngCore;
    task_rng(seed, domain, index).next_u64()
}
