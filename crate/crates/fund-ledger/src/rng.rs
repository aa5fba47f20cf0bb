//! Counter-based deterministic randomness.
//!
//! Draw i of stream (seed, label) is SHA-256(key || i) where
//! key = SHA-256(seed || label); identical (seed, stream, index) triples give
//! identical output on every platform, and adding a consumer with its own
//! stream label never perturbs any other stream.

use sha2::{Digest, Sha256};

use crate::dec::{Dec18, SCALE};

#[derive(Clone, Debug)]
pub struct DetRng {
    key: [u8; 32],
    counter: u64,
}

impl DetRng {
    pub fn new(seed: u64, stream: &str) -> DetRng {
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        hasher.update([0x1f]);
        hasher.update(stream.as_bytes());
        DetRng { key: hasher.finalize().into(), counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut hasher = Sha256::new();
        hasher.update(self.key);
        hasher.update(self.counter.to_be_bytes());
        self.counter += 1;
        let block: [u8; 32] = hasher.finalize().into();
        u64::from_be_bytes(block[..8].try_into().expect("8 bytes"))
    }

    /// Uniform draw on the Dec18 grid in [0, 1): floor(u * 10^18 / 2^64).
    pub fn next_unit(&mut self) -> Dec18 {
        let u = self.next_u64() as u128;
        Dec18::from_raw(((u * SCALE as u128) >> 64) as i128)
    }

    /// Approximate standard normal via the sum of 12 uniforms minus 6
    /// (mean 0, variance 1, support [-6, 6]). Entirely integer arithmetic.
    pub fn next_std_normal(&mut self) -> Dec18 {
        let mut acc: i128 = 0;
        for _ in 0..12 {
            acc += self.next_unit().raw();
        }
        Dec18::from_raw(acc - 6 * SCALE)
    }

    /// Draws consumed so far; part of the replay digest surface.
    pub fn draws(&self) -> u64 {
        self.counter
    }
}
