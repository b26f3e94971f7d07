//! Deterministic per-stage random streams derived from one master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pipeline stage owning an independent stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Objective = 1,
    Tabu = 2,
    Insertion = 3,
}

/// Stream for `stage`: the master seed with the stage as ChaCha stream id.
pub fn stage_rng(seed: u64, stage: Stage) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage as u64);
    rng
}
