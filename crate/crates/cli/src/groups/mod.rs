//! Check groups. Each group derives its own random stream from the run seed
//! and a fixed group tag, so groups can run in any order or in parallel.

pub mod classify;
pub mod fock;
pub mod lattice;
pub mod modular;
pub mod seqmodel;
pub mod skeleton;
pub mod tower;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn group_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}
