//! Counter-based Gaussian draws.
//!
//! Every draw is a pure function of `(seed, counter)`, so noise sequences and
//! Monte Carlo trials are reproducible bit for bit and parallelize without
//! shared generator state.

/// SplitMix64 finalizer.
fn finalize(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `index`-th output of the SplitMix64 stream started at `seed`.
pub(crate) fn stream(seed: u64, index: u64) -> u64 {
    finalize(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Maps a word to the open interval (0, 1).
fn to_open_unit(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

/// Standard normal draw for counter `index` under `seed` (Box-Muller).
pub(crate) fn standard_normal(seed: u64, index: u64) -> f64 {
    let u1 = to_open_unit(stream(seed, 2 * index));
    let u2 = to_open_unit(stream(seed, 2 * index + 1));
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Derives the seed for an independent substream, e.g. one Monte Carlo trial.
pub(crate) fn substream_seed(seed: u64, index: u64) -> u64 {
    finalize(stream(seed, index) ^ 0xA076_1D64_78BD_642F)
}
