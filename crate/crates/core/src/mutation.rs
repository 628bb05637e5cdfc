//! Shift standard-bit mutation and mutation-rate bound handling.
//!
//! Standard bit mutation flips each bit independently with probability `p`;
//! the shift variant replaces the useless zero-flip outcome with a single
//! uniformly chosen flip, so an offspring never equals its parent.

use crate::bitstring::BitString;
use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// A per-bit flip probability, guaranteed to lie in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MutationRate(f64);

impl MutationRate {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidProbability(format!(
                "mutation rate must be in (0, 1], got {p}"
            )));
        }
        Ok(MutationRate(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Lower and upper caps for the mutation rate: `0 < min <= max <= 1/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateBounds {
    min: f64,
    max: f64,
}

impl RateBounds {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && min <= max && max <= 0.5) {
            return Err(Error::InvalidConfig(format!(
                "rate bounds must satisfy 0 < min <= max <= 1/2, got [{min}, {max}]"
            )));
        }
        Ok(RateBounds { min, max })
    }

    /// The standard bounds `[p_min, 1/2]`.
    pub fn with_min(min: f64) -> Result<Self> {
        RateBounds::new(min, 0.5)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    /// `min(max(p_min, p), p_max)`.
    pub fn clamp(&self, p: f64) -> MutationRate {
        MutationRate(p.max(self.min).min(self.max))
    }
}

/// Shift mutation with reusable scratch space for the position sampler.
///
/// Flip count is drawn from Binomial(n, p), flip positions by partial
/// Fisher-Yates over a persistent index array, so the cost per offspring is
/// O(expected flips) instead of O(n).
pub struct Mutator {
    indices: Vec<u32>,
    swaps: Vec<u32>,
}

impl Mutator {
    pub fn new(dimension: usize) -> Self {
        Mutator {
            indices: (0..dimension as u32).collect(),
            swaps: Vec::new(),
        }
    }

    /// Writes the mutated copy of `parent` into `out`.
    pub fn mutate_into(
        &mut self,
        parent: &BitString,
        rate: MutationRate,
        rng: &mut RandomSource,
        out: &mut BitString,
    ) {
        let n = parent.len();
        debug_assert_eq!(self.indices.len(), n);
        out.copy_from(parent);
        let flips = rng
            .binomial(n as u64, rate.value())
            .expect("rate validated by MutationRate") as usize;
        if flips == 0 {
            out.flip(rng.below(n as u64) as usize);
            return;
        }
        self.swaps.clear();
        for i in 0..flips {
            let j = i + rng.below((n - i) as u64) as usize;
            self.swaps.push(j as u32);
            self.indices.swap(i, j);
            out.flip(self.indices[i] as usize);
        }
        // Undo the swaps in reverse order so the next call starts from the
        // identity ordering again.
        for i in (0..flips).rev() {
            self.indices.swap(i, self.swaps[i] as usize);
        }
    }
}

/// Shift standard-bit mutation: each bit of a copy of `x` flips independently
/// with probability `rate`; a zero-flip outcome flips one uniform bit instead.
pub fn shift_mutate(x: &BitString, rate: MutationRate, rng: &mut RandomSource) -> BitString {
    let mut out = BitString::zeros(x.len());
    Mutator::new(x.len()).mutate_into(x, rate, rng, &mut out);
    out
}

/// Caps `p` into `bounds`; idempotent.
pub fn clamp_rate(p: f64, bounds: &RateBounds) -> MutationRate {
    bounds.clamp(p)
}
