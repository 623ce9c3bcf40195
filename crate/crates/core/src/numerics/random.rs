//! Reproducible random streams keyed by `(seed, labels)`.
//!
//! A stream's generator is seeded from a hash of its master seed and its
//! ordered label path, so any unit of work can derive its own stream without
//! coordinating with other units. Results never depend on scheduling order.

use super::linalg::ComplexVector;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    labels: Vec<u64>,
    rng: ChaCha12Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_key(seed: u64, labels: &[u64]) -> [u8; 32] {
    let mut state = seed;
    let mut acc = splitmix64(&mut state);
    for (depth, &label) in labels.iter().enumerate() {
        // Mix depth in so that [a, b] and [a ^ x, ...] paths cannot alias.
        state ^= acc ^ label.rotate_left(17) ^ (depth as u64).wrapping_mul(0xA24B_AED4_963E_E407);
        acc = splitmix64(&mut state);
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    key
}

impl RandomStream {
    pub fn new(seed: u64, labels: &[u64]) -> Self {
        Self {
            seed,
            labels: labels.to_vec(),
            rng: ChaCha12Rng::from_seed(derive_key(seed, labels)),
        }
    }

    /// A fresh child stream at path `labels ++ [label]`.
    ///
    /// The child depends only on the parent's seed and path, never on how many
    /// values the parent has already produced.
    pub fn fork(&self, label: u64) -> Self {
        let mut labels = self.labels.clone();
        labels.push(label);
        Self::new(self.seed, &labels)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// One draw from CN(0, 1).
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// `n` uniformly random bits as `0`/`1` bytes.
    pub fn bits(&mut self, n: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let word = self.rng.next_u64();
            let take = (n - out.len()).min(64);
            out.extend((0..take).map(|b| ((word >> b) & 1) as u8));
        }
        out
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// `n` i.i.d. CN(0, 1) samples.
pub fn sample_complex_gaussian(stream: &mut RandomStream, n: usize) -> ComplexVector {
    (0..n).map(|_| stream.complex_gaussian()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_path_same_sequence() {
        let a = sample_complex_gaussian(&mut RandomStream::new(7, &[1, 2]), 16);
        let b = sample_complex_gaussian(&mut RandomStream::new(7, &[1, 2]), 16);
        assert_eq!(a, b);
    }

    #[test]
    fn different_paths_differ() {
        let a = sample_complex_gaussian(&mut RandomStream::new(7, &[1, 2]), 4);
        let b = sample_complex_gaussian(&mut RandomStream::new(7, &[2, 1]), 4);
        let c = sample_complex_gaussian(&mut RandomStream::new(8, &[1, 2]), 4);
        let d = sample_complex_gaussian(&mut RandomStream::new(7, &[1]), 4);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn fork_ignores_parent_consumption() {
        let mut parent = RandomStream::new(3, &[9]);
        let before = sample_complex_gaussian(&mut parent.fork(4), 8);
        parent.bits(1000);
        let after = sample_complex_gaussian(&mut parent.fork(4), 8);
        assert_eq!(before, after);
        assert_eq!(parent.fork(4).labels(), &[9, 4]);
    }

    #[test]
    fn bits_are_binary_and_balanced() {
        let bits = RandomStream::new(1, &[]).bits(100_001);
        assert_eq!(bits.len(), 100_001);
        assert!(bits.iter().all(|&b| b <= 1));
        let ones = bits.iter().map(|&b| b as usize).sum::<usize>() as f64;
        assert!((ones / 100_001.0 - 0.5).abs() < 0.01);
    }
}
