//! Seeded policy randomness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifier of the generator behind every policy stream, recorded in reports.
pub const PRNG_ALGORITHM: &str = "chacha8";

pub type PolicyRng = ChaCha8Rng;

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn policy_rng(seed: u64, stream: u64) -> PolicyRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Deterministic child seed for `index` under `base` (splitmix64 finalizer).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform index in `0..n`.
pub fn uniform_index<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    rng.gen_range(0..n)
}

/// `m` distinct indices from `0..n`, uniformly, via a partial Fisher-Yates
/// shuffle over a virtual identity permutation. Draw `i` is
/// `gen_range(i..n)`, so `m == 1` consumes the generator exactly like
/// [`uniform_index`].
pub fn sample_indices<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Vec<usize> {
    let m = m.min(n);
    // (position, value) overrides of the identity permutation
    let mut swapped: Vec<(usize, usize)> = Vec::with_capacity(2 * m);
    let lookup = |swapped: &[(usize, usize)], pos: usize| {
        swapped.iter().rev().find(|&&(p, _)| p == pos).map_or(pos, |&(_, v)| v)
    };
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let j = rng.gen_range(i..n);
        let vi = lookup(&swapped, i);
        let vj = lookup(&swapped, j);
        out.push(vj);
        swapped.push((j, vi));
        swapped.push((i, vj));
    }
    out
}
