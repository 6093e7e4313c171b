//! Counter-based random streams keyed by `(master_seed, realization, draw)`.
//!
//! Each realization owns an independent ChaCha20 stream: the 256-bit key is
//! the little-endian master seed padded with zeros, the 64-bit stream id is
//! the realization index and draw `i` is the `i`-th 64-bit output word of
//! that stream. ChaCha20 is a fixed, platform-independent algorithm, so a
//! given key always reproduces the same sequence no matter which worker
//! thread evaluates it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone)]
pub struct DrawStream {
    rng: ChaCha20Rng,
}

impl DrawStream {
    pub fn new(master_seed: u64, realization: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&master_seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(realization);
        Self { rng }
    }

    /// Positions the stream so that the next output is draw `draw_index`.
    pub fn seek(&mut self, draw_index: u64) {
        // two 32-bit words per 64-bit draw
        self.rng.set_word_pos(2 * draw_index as u128);
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `(0, 1]`: `1 - k 2^-53` for the top 53 bits `k` of a draw.
    pub fn uniform_open_closed(&mut self) -> f64 {
        let k = self.next_u64() >> 11;
        1.0 - (k as f64) * (1.0 / (1u64 << 53) as f64)
    }
}
