//! Keyed, counter-based random streams.
//!
//! A stream is ChaCha20 keyed with `SHA-256(domain || seed_le || label)`.
//! ChaCha20 is a counter-mode generator with a fixed, documented output, so a
//! `(seed, label)` pair yields the same sequence on every platform. Child
//! streams are keyed from the parent key and a label, independent of how far
//! the parent has been advanced.

use rand::{Error as RandError, Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

const STREAM_DOMAIN: &[u8] = b"mdreduce/stream/v1\0";
const SPLIT_DOMAIN: &[u8] = b"mdreduce/split/v1\0";

#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha20Rng,
}

/// Opens the stream named `label` under `seed`.
pub fn derive_rng(seed: u64, label: &str) -> StreamRng {
    let mut h = Sha256::new();
    h.update(STREAM_DOMAIN);
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    StreamRng::from_key(h.finalize().into())
}

impl StreamRng {
    fn from_key(key: [u8; 32]) -> StreamRng {
        StreamRng {
            inner: ChaCha20Rng::from_seed(key),
        }
    }

    /// An independent child stream.
    pub fn split(&self, label: &str) -> StreamRng {
        let mut h = Sha256::new();
        h.update(SPLIT_DOMAIN);
        h.update(self.inner.get_seed());
        h.update(label.as_bytes());
        StreamRng::from_key(h.finalize().into())
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn unit(&mut self) -> f64 {
        self.gen::<f64>()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform index in `0..n`. Sampled through `u64` so the result does not
    /// depend on the platform's pointer width.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be non-empty");
        self.gen_range(0..n as u64) as usize
    }

    /// Standard normal deviate (Box-Muller, one value per call).
    pub fn normal(&mut self) -> f64 {
        // 1 - [0, 1) keeps the logarithm finite.
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        (-2.0 * libm::log(u1)).sqrt() * libm::cos(std::f64::consts::TAU * u2)
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), RandError> {
        self.inner.try_fill_bytes(dest)
    }
}
