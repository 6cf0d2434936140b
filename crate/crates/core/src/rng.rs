//! Counter-based random number streams.
//!
//! Every draw is a pure function of (seed, stream, index), so batches are
//! reproducible bit-for-bit and chunks can be generated in any order and
//! concatenated deterministically. The mixer is the splitmix64 finalizer
//! applied twice, which is plenty for Monte Carlo work.

/// Named sub-streams, one per simulated variable. Keeping the assignment
/// fixed here means changing one sampler never perturbs another's draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    /// Primary heavy-tailed coordinate (X in the examples).
    X,
    /// Secondary independent heavy-tailed variable (Z).
    Z,
    /// Mixing variable xi with distribution G.
    Xi,
    /// Angular component Theta0.
    Theta,
    /// Radial component R0.
    R,
}

impl Stream {
    fn salt(self) -> u64 {
        match self {
            Stream::X => 0x8f0c_95a3_3c57_0d2b,
            Stream::Z => 0x1b87_3f0a_9d4e_6c15,
            Stream::Xi => 0x6e2d_aa43_f10b_8837,
            Stream::Theta => 0xc4ff_1d09_72e8_5b61,
            Stream::R => 0x35d1_e6b7_08a9_4fd3,
        }
    }
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The i-th 64-bit word of the given stream.
#[inline]
pub fn counter_u64(seed: u64, stream: Stream, index: u64) -> u64 {
    let mut z = splitmix(seed ^ stream.salt());
    z ^= index.wrapping_mul(0xd605_1dcc_a6bf_e5c7);
    splitmix(splitmix(z))
}

/// Uniform draw in the open interval (0, 1).
///
/// The open interval matters: inverse-transform maps send u -> 0 or 1 to
/// infinities for heavy-tailed laws.
#[inline]
pub fn counter_uniform(seed: u64, stream: Stream, index: u64) -> f64 {
    // 53 mantissa bits, offset by half a step to avoid both endpoints.
    ((counter_u64(seed, stream, index) >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}
