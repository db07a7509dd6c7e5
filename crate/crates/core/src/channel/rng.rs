//! Counter-addressed random streams.
//!
//! Every random quantity in a run is addressed by `(seed, purpose, frame,
//! block)`, so any frame can be regenerated on its own and results do not
//! depend on evaluation order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Disjoint key spaces for the different consumers of randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Fading,
    SubsetDraw,
    Trace,
}

impl Purpose {
    fn salt(self) -> u64 {
        match self {
            Purpose::Fading => 0x6a09_e667_f3bc_c908,
            Purpose::SubsetDraw => 0xbb67_ae85_84ca_a73b,
            Purpose::Trace => 0x3c6e_f372_fe94_f82b,
        }
    }
}

/// Words reserved per block; far more than a channel block ever consumes.
const BLOCK_STRIDE: u128 = 1 << 40;

/// ChaCha stream for `(seed, purpose, frame)`, positioned at `block`.
pub fn stream(seed: u64, purpose: Purpose, frame: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ purpose.salt());
    rng.set_stream(frame);
    rng.set_word_pos(u128::from(block) * BLOCK_STRIDE);
    rng
}
