//! Fixed-length binary search points, packed 64 bits to a word.
//!
//! Bit `i` lives at bit `i % 64` of word `i / 64`; all bits past the logical
//! length are kept at zero so whole-word population counts stay valid.

use crate::error::{Error, Result};
use crate::rng::RandomSource;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Uniformly random point of `{0,1}^n`: every bit is an independent
    /// fair coin.
    pub fn random(len: usize, rng: &mut RandomSource) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidDimension(
                "bit string length must be at least 1".into(),
            ));
        }
        let mut words: Vec<u64> = (0..len.div_ceil(64)).map(|_| rng.next_u64()).collect();
        mask_tail(&mut words, len);
        Ok(BitString { words, len })
    }

    /// Builds from a slice of 0/1 byte values, index order.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidDimension(
                "bit string length must be at least 1".into(),
            ));
        }
        let mut out = BitString::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => out.set(i, true),
                other => {
                    return Err(Error::InvalidInput(format!(
                        "bit value must be 0 or 1, got {other} at index {i}"
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len);
        self.words[index / 64] >> (index % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len);
        let mask = 1u64 << (index % 64);
        if value {
            self.words[index / 64] |= mask;
        } else {
            self.words[index / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, index: usize) {
        assert!(index < self.len);
        self.words[index / 64] ^= 1u64 << (index % 64);
    }

    /// Population count over the whole string, O(n/64).
    #[inline]
    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Population count over the half-open bit range `[start, end)`.
    pub fn count_ones_range(&self, start: usize, end: usize) -> u64 {
        assert!(start <= end && end <= self.len);
        if start == end {
            return 0;
        }
        let first = start / 64;
        let last = (end - 1) / 64;
        let lo_mask = u64::MAX << (start % 64);
        let hi_mask = u64::MAX >> (63 - (end - 1) % 64);
        if first == last {
            return (self.words[first] & lo_mask & hi_mask).count_ones() as u64;
        }
        let mut total = (self.words[first] & lo_mask).count_ones() as u64;
        for w in &self.words[first + 1..last] {
            total += w.count_ones() as u64;
        }
        total + (self.words[last] & hi_mask).count_ones() as u64
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming(&self, other: &BitString) -> u64 {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum()
    }

    /// Overwrites `self` with `other` without reallocating.
    pub fn copy_from(&mut self, other: &BitString) {
        assert_eq!(self.len, other.len);
        self.words.copy_from_slice(&other.words);
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

fn mask_tail(words: &mut [u64], len: usize) {
    let rem = len % 64;
    if rem != 0 {
        *words.last_mut().expect("non-empty") &= (1u64 << rem) - 1;
    }
}

impl std::fmt::Debug for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.len <= 128 {
            for i in 0..self.len {
                write!(f, "{}", self.get(i) as u8)?;
            }
            Ok(())
        } else {
            write!(f, "BitString(len={}, ones={})", self.len, self.count_ones())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_length() {
        let mut rng = RandomSource::new(1);
        assert!(matches!(
            BitString::random(0, &mut rng),
            Err(Error::InvalidDimension(_))
        ));
        assert!(BitString::from_bits(&[]).is_err());
    }

    #[test]
    fn single_bit_draw() {
        let mut rng = RandomSource::new(11);
        let x = BitString::random(1, &mut rng).unwrap();
        assert_eq!(x.len(), 1);
        assert!(x.count_ones() <= 1);
    }

    #[test]
    fn random_is_reproducible() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        for n in [1, 63, 64, 65, 1000] {
            assert_eq!(
                BitString::random(n, &mut a).unwrap(),
                BitString::random(n, &mut b).unwrap()
            );
        }
    }

    #[test]
    fn tail_bits_stay_zero() {
        let mut rng = RandomSource::new(5);
        for n in [1, 13, 63, 65, 130] {
            let mut x = BitString::random(n, &mut rng).unwrap();
            let naive: u64 = x.to_bits().iter().map(|&b| b as u64).sum();
            assert_eq!(x.count_ones(), naive);
            for i in 0..n {
                x.set(i, true);
            }
            assert_eq!(x.count_ones(), n as u64);
        }
    }

    #[test]
    fn get_set_flip_round_trip() {
        let mut x = BitString::zeros(130);
        x.set(0, true);
        x.set(64, true);
        x.set(129, true);
        assert!(x.get(0) && x.get(64) && x.get(129));
        assert_eq!(x.count_ones(), 3);
        x.flip(64);
        assert!(!x.get(64));
        assert_eq!(x.count_ones(), 2);
    }

    #[test]
    fn range_count_matches_naive() {
        let mut rng = RandomSource::new(77);
        let x = BitString::random(200, &mut rng).unwrap();
        for start in [0, 1, 63, 64, 65, 127, 128, 199] {
            for end in [start, start + 1, 64, 130, 200] {
                if end < start || end > 200 {
                    continue;
                }
                let naive = (start..end).filter(|&i| x.get(i)).count() as u64;
                assert_eq!(x.count_ones_range(start, end), naive, "[{start}, {end})");
            }
        }
    }

    #[test]
    fn from_bits_round_trip() {
        let bits = [1u8, 0, 1, 1, 0, 0, 1];
        let x = BitString::from_bits(&bits).unwrap();
        assert_eq!(x.to_bits(), bits);
        assert!(BitString::from_bits(&[0, 2]).is_err());
    }

    #[test]
    fn hamming_distance() {
        let a = BitString::from_bits(&[1, 0, 1, 0]).unwrap();
        let b = BitString::from_bits(&[1, 1, 0, 0]).unwrap();
        assert_eq!(a.hamming(&b), 2);
        assert_eq!(a.hamming(&a), 0);
    }

    // Monte-Carlo check against Bernoulli(1/2): per-position frequency of
    // ones over 10^5 draws at n = 100.
    #[test]
    fn positions_are_fair_coins() {
        let mut rng = RandomSource::new(314);
        let n = 100;
        let draws = 100_000u32;
        let mut ones = vec![0u32; n];
        for _ in 0..draws {
            let x = BitString::random(n, &mut rng).unwrap();
            for (i, slot) in ones.iter_mut().enumerate() {
                *slot += x.get(i) as u32;
            }
        }
        for (i, &count) in ones.iter().enumerate() {
            let freq = count as f64 / draws as f64;
            assert!((0.48..=0.52).contains(&freq), "position {i}: {freq}");
        }
    }
}
