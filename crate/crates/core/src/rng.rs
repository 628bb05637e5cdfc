//! Deterministic pseudo-random source shared by every stochastic operation.
//!
//! The generator is xoshiro256++ seeded through SplitMix64, chosen so that
//! every table this crate emits is reproducible bit-for-bit across platforms
//! and releases. All derived quantities (uniform reals, bounded integers,
//! Bernoulli and binomial samples) are computed with fixed algorithms on top
//! of the raw 64-bit stream; none of them call into platform math libraries.

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. Bijective on `u64`, used for seed expansion and
/// child-seed derivation.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a stream index.
///
/// For a fixed `parent` the map `index -> child_seed(parent, index)` is
/// injective (both mixing steps are bijections), so sibling streams never
/// collide.
pub fn child_seed(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index.wrapping_add(GOLDEN_GAMMA)))
}

/// xoshiro256++ generator with a fixed 64-bit seeding procedure.
///
/// One instance drives one run (or one sub-stream of a run); instances are
/// never shared across threads.
#[derive(Clone, Debug)]
pub struct RandomSource {
    state: [u64; 4],
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let mut next = || {
            sm = sm.wrapping_add(GOLDEN_GAMMA);
            mix64(sm)
        };
        let mut state = [next(), next(), next(), next()];
        if state == [0; 4] {
            state = [GOLDEN_GAMMA, 0, 0, 0];
        }
        RandomSource { state }
    }

    /// Child generator for stream `index`, independent of this generator's
    /// position in its own stream.
    pub fn child(seed: u64, index: u64) -> Self {
        RandomSource::new(child_seed(seed, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform real in `[0, 1)` with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)` via bitmask rejection (unbiased).
    ///
    /// `bound` must be positive. `bound == 1` returns 0 without consuming
    /// generator output.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below() requires a positive bound");
        if bound == 1 {
            return 0;
        }
        let mask = u64::MAX >> (bound - 1).leading_zeros();
        loop {
            let candidate = self.next_u64() & mask;
            if candidate < bound {
                return candidate;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Exact sample from Binomial(n, p).
    ///
    /// `p = 1/2` counts fair bits word-wise; moderate means use CDF
    /// inversion over the pmf recurrence; the rest falls back to summing
    /// `n` Bernoulli trials, which is exact by definition. Probabilities
    /// above 1/2 are handled by mirroring. Branch selection uses only
    /// arithmetic that is identical on every platform.
    pub fn binomial(&mut self, n: u64, p: f64) -> Result<u64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(format!(
                "binomial probability must be in [0, 1], got {p}"
            )));
        }
        if n == 0 || p == 0.0 {
            return Ok(0);
        }
        if p == 1.0 {
            return Ok(n);
        }
        if p == 0.5 {
            return Ok(self.binomial_half(n));
        }
        let mirrored = p > 0.5;
        let q = if mirrored { 1.0 - p } else { p };
        let zero_mass = pow_f64(1.0 - q, n);
        let sample = if n as f64 * q <= 500.0 && zero_mass > 0.0 {
            self.binomial_inversion(n, q, zero_mass)
        } else {
            self.binomial_trials(n, q)
        };
        Ok(if mirrored { n - sample } else { sample })
    }

    /// Binomial(n, 1/2) as the population count of `n` fair bits.
    fn binomial_half(&mut self, n: u64) -> u64 {
        let mut count = 0u64;
        let mut remaining = n;
        while remaining >= 64 {
            count += self.next_u64().count_ones() as u64;
            remaining -= 64;
        }
        if remaining > 0 {
            let mask = (1u64 << remaining) - 1;
            count += (self.next_u64() & mask).count_ones() as u64;
        }
        count
    }

    fn binomial_inversion(&mut self, n: u64, p: f64, zero_mass: f64) -> u64 {
        let ratio = p / (1.0 - p);
        let mut pmf = zero_mass;
        let mut remaining = self.next_f64();
        let mut k = 0u64;
        while remaining >= pmf && k < n {
            remaining -= pmf;
            k += 1;
            pmf *= (n - k + 1) as f64 / k as f64 * ratio;
        }
        k
    }

    /// Sum of `n` Bernoulli(p) trials, 64 lanes at a time: each lane's
    /// uniform bit stream is compared against the binary expansion of `p`
    /// until decided, so the expected cost is a handful of words per 64
    /// trials. All arithmetic is exact doubling/subtraction on `p`.
    fn binomial_trials(&mut self, n: u64, p: f64) -> u64 {
        let mut count = 0u64;
        let mut remaining = n;
        while remaining > 0 {
            let lanes = remaining.min(64);
            let lane_mask = if lanes == 64 {
                u64::MAX
            } else {
                (1u64 << lanes) - 1
            };
            let mut undecided = lane_mask;
            let mut success = 0u64;
            let mut expansion = p;
            while undecided != 0 && expansion > 0.0 {
                expansion *= 2.0;
                let bit = expansion >= 1.0;
                if bit {
                    expansion -= 1.0;
                }
                let draw = self.next_u64();
                if bit {
                    success |= undecided & !draw;
                    undecided &= draw;
                } else {
                    undecided &= !draw;
                }
            }
            // Lanes still undecided match p's full expansion and are >= p.
            count += success.count_ones() as u64;
            remaining -= lanes;
        }
        count
    }
}

/// `base^exp` by binary exponentiation; plain IEEE multiplications only, so
/// the result is identical on every platform (unlike `powf`).
fn pow_f64(base: f64, mut exp: u64) -> f64 {
    let mut base = base;
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::new(12345);
        let mut b = RandomSource::new(12345);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn different_seeds_diverge() {
        let mut a = RandomSource::new(1);
        let mut b = RandomSource::new(2);
        let same = (0..64).filter(|_| a.next_u64() == b.next_u64()).count();
        assert!(same < 4);
    }

    #[test]
    fn unit_interval() {
        let mut rng = RandomSource::new(7);
        for _ in 0..10_000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn below_is_bounded_and_roughly_uniform() {
        let mut rng = RandomSource::new(99);
        let mut counts = [0u32; 7];
        for _ in 0..70_000 {
            counts[rng.below(7) as usize] += 1;
        }
        for &c in &counts {
            assert!((9_000..11_000).contains(&c), "counts {counts:?}");
        }
        assert_eq!(rng.below(1), 0);
    }

    #[test]
    fn binomial_edge_probabilities() {
        let mut rng = RandomSource::new(3);
        assert_eq!(rng.binomial(10, 0.0).unwrap(), 0);
        assert_eq!(rng.binomial(10, 1.0).unwrap(), 10);
        assert_eq!(rng.binomial(0, 0.3).unwrap(), 0);
        assert!(rng.binomial(10, -0.1).is_err());
        assert!(rng.binomial(10, 1.5).is_err());
        assert!(rng.binomial(10, f64::NAN).is_err());
    }

    // Monte-Carlo check against the Binomial mean np = 1 at n = 10^4,
    // p = 1/10^4.
    #[test]
    fn binomial_tiny_rate_mean() {
        let mut rng = RandomSource::new(2024);
        let draws = 100_000;
        let total: u64 = (0..draws)
            .map(|_| rng.binomial(10_000, 1e-4).unwrap())
            .sum();
        let mean = total as f64 / draws as f64;
        assert!((0.97..=1.03).contains(&mean), "mean {mean}");
    }

    #[test]
    fn binomial_large_mean_matches_expectation() {
        // Inversion branch at a moderate mean.
        let mut rng = RandomSource::new(5);
        let draws = 2_000;
        let total: u64 = (0..draws).map(|_| rng.binomial(1000, 0.25).unwrap()).sum();
        let mean = total as f64 / draws as f64;
        assert!((245.0..=255.0).contains(&mean), "mean {mean}");
        // Mirrored branch.
        let total: u64 = (0..draws).map(|_| rng.binomial(1000, 0.75).unwrap()).sum();
        let mean = total as f64 / draws as f64;
        assert!((745.0..=755.0).contains(&mean), "mean {mean}");
        // Bernoulli-trials branch (n*q > 500).
        let total: u64 = (0..200).map(|_| rng.binomial(10_000, 0.2).unwrap()).sum();
        let mean = total as f64 / 200.0;
        assert!((1985.0..=2015.0).contains(&mean), "mean {mean}");
    }

    #[test]
    fn binomial_half_uses_popcount_and_stays_fair() {
        let mut rng = RandomSource::new(6);
        let draws = 20_000;
        let mut total = 0u64;
        for _ in 0..draws {
            let k = rng.binomial(1000, 0.5).unwrap();
            assert!(k <= 1000);
            total += k;
        }
        let mean = total as f64 / draws as f64;
        assert!((498.0..=502.0).contains(&mean), "mean {mean}");
        // Odd lengths exercise the tail mask.
        let total: u64 = (0..draws).map(|_| rng.binomial(67, 0.5).unwrap()).sum();
        let mean = total as f64 / draws as f64;
        assert!((33.0..=34.0).contains(&mean), "mean {mean}");
    }

    #[test]
    fn child_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for cell in 0..64u64 {
            let cell_seed = child_seed(0xDEAD_BEEF, cell);
            for run in 0..256u64 {
                assert!(seen.insert(child_seed(cell_seed, run)));
            }
        }
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        assert_eq!(pow_f64(0.9993, 0), 1.0);
        assert_eq!(pow_f64(0.9993, 1), 0.9993);
        assert_eq!(pow_f64(0.9993, 2), 0.9993 * 0.9993);
        let mut acc = 1.0;
        for exp in 0..60u64 {
            let pow = pow_f64(0.9993, exp);
            assert!((pow - acc).abs() <= 1e-14 * acc, "exp {exp}: {pow} vs {acc}");
            acc *= 0.9993;
        }
    }
}
