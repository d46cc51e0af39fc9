use super::Algorithm;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn absorb(state: u64, value: u64) -> u64 {
    splitmix64(state ^ splitmix64(value))
}

/// Seed of one restart, a pure function of its coordinates in the sweep.
pub fn run_seed(base_seed: u64, algorithm: Algorithm, k: usize, restart: usize) -> u64 {
    let tag = match algorithm {
        Algorithm::KMeans => 1,
        Algorithm::Clara => 2,
    };
    let mut h = splitmix64(base_seed);
    h = absorb(h, tag);
    h = absorb(h, k as u64);
    absorb(h, restart as u64)
}
