//! Seed derivation. Every random choice is a pure function of a 64-bit seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `index` of `seed`: the seed xor a mixed counter.
#[inline]
pub fn derive(seed: u64, index: u64) -> u64 {
    seed ^ splitmix64(index)
}

/// Child seed keyed by a label as well as an index, for independent streams
/// drawn from one master seed.
pub fn derive_tagged(seed: u64, tag: &str, index: u64) -> u64 {
    let t = tag.bytes().fold(0xCBF2_9CE4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    });
    derive(splitmix64(seed ^ t), index)
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_differ() {
        assert_ne!(derive(1, 0), derive(1, 1));
        assert_ne!(derive(1, 0), derive(2, 0));
        assert_ne!(derive_tagged(1, "a", 0), derive_tagged(1, "b", 0));
        assert_eq!(derive_tagged(9, "x", 3), derive_tagged(9, "x", 3));
    }
}
