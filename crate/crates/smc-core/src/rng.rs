//! Replayable random streams.
//!
//! Every stochastic routine takes an explicit generator. Independent
//! substreams are obtained by counter-based splitting: the key comes from the
//! master seed, the ChaCha stream id from a hash of the substream path, so
//! the generator handed to a worker never depends on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every substream in the workspace.
pub type Stream = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for `path` under `seed`. Distinct paths give distinct ChaCha
/// stream ids (up to 64-bit hash collisions).
pub fn substream(seed: u64, path: &[u64]) -> Stream {
    let mut id = splitmix64(path.len() as u64);
    for &p in path {
        id = splitmix64(id ^ splitmix64(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_path_same_stream() {
        let a: Vec<u64> = substream(7, &[1, 2]).random_iter().take(4).collect();
        let b: Vec<u64> = substream(7, &[1, 2]).random_iter().take(4).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_paths_diverge() {
        let a: u64 = substream(7, &[1, 2]).random();
        let b: u64 = substream(7, &[2, 1]).random();
        let c: u64 = substream(7, &[1]).random();
        let d: u64 = substream(8, &[1, 2]).random();
        assert!(a != b && a != c && a != d);
    }
}
