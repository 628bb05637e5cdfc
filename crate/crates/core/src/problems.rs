//! Benchmark fitness functions: OneMax, LeadingOnes, and the block-majority,
//! plateau and ruggedness transforms superposed on OneMax.
//!
//! Every evaluator is integer-valued and pure; each problem knows its optimum
//! so the runtime loop can detect the first evaluation of an optimal point.

use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::error::{Error, Result};
use crate::rng::RandomSource;

pub type Fitness = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    OneMax,
    LeadingOnes,
    Neutrality,
    Plateau,
    Ruggedness,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::OneMax => "onemax",
            ProblemKind::LeadingOnes => "leadingones",
            ProblemKind::Neutrality => "neutrality",
            ProblemKind::Plateau => "plateau",
            ProblemKind::Ruggedness => "ruggedness",
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onemax" => Ok(ProblemKind::OneMax),
            "leadingones" => Ok(ProblemKind::LeadingOnes),
            "neutrality" => Ok(ProblemKind::Neutrality),
            "plateau" => Ok(ProblemKind::Plateau),
            "ruggedness" => Ok(ProblemKind::Ruggedness),
            other => Err(Error::InvalidConfig(format!("unknown problem '{other}'"))),
        }
    }
}

/// A fully parameterized, immutable fitness evaluator.
#[derive(Clone, Debug)]
pub struct Problem {
    kind: ProblemKind,
    n: usize,
    block: Option<u64>,
    target: Option<BitString>,
    permutation: Option<Vec<u32>>,
    instance_seed: Option<u64>,
    optimum: Fitness,
}

impl Problem {
    pub fn one_max(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Problem {
            kind: ProblemKind::OneMax,
            n,
            block: None,
            target: None,
            permutation: None,
            instance_seed: None,
            optimum: n as Fitness,
        })
    }

    /// Classic LeadingOnes: all-ones target, identity index order.
    pub fn leading_ones(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Problem {
            kind: ProblemKind::LeadingOnes,
            n,
            block: None,
            target: None,
            permutation: None,
            instance_seed: None,
            optimum: n as Fitness,
        })
    }

    /// LeadingOnes instance with target and index permutation drawn from
    /// `instance_seed`; the instance is fully reconstructable from the seed.
    pub fn leading_ones_random_instance(n: usize, instance_seed: u64) -> Result<Self> {
        check_dimension(n)?;
        let mut target_rng = RandomSource::child(instance_seed, 0);
        let target = BitString::random(n, &mut target_rng)?;
        let mut perm_rng = RandomSource::child(instance_seed, 1);
        let mut permutation: Vec<u32> = (0..n as u32).collect();
        for i in (1..n).rev() {
            let j = perm_rng.below(i as u64 + 1) as usize;
            permutation.swap(i, j);
        }
        Ok(Problem {
            kind: ProblemKind::LeadingOnes,
            n,
            block: None,
            target: Some(target),
            permutation: Some(permutation),
            instance_seed: Some(instance_seed),
            optimum: n as Fitness,
        })
    }

    /// Block-majority transform of OneMax; `k` must be odd so every block has
    /// a majority, and trailing `n mod k` bits are ignored.
    pub fn neutrality(n: usize, k: u64) -> Result<Self> {
        check_dimension(n)?;
        check_block_size(k, n)?;
        if k.is_multiple_of(2) {
            return Err(Error::UnsupportedParameter(format!(
                "neutrality block size must be odd (majority undefined), got {k}"
            )));
        }
        Ok(Problem {
            kind: ProblemKind::Neutrality,
            n,
            block: Some(k),
            target: None,
            permutation: None,
            instance_seed: None,
            optimum: n as u64 / k,
        })
    }

    /// Plateau transform of OneMax: `floor(f/k) + 1`.
    pub fn plateau(n: usize, k: u64) -> Result<Self> {
        check_dimension(n)?;
        check_block_size(k, n)?;
        Ok(Problem {
            kind: ProblemKind::Plateau,
            n,
            block: Some(k),
            target: None,
            permutation: None,
            instance_seed: None,
            optimum: n as u64 / k + 1,
        })
    }

    /// Ruggedness transform of OneMax: swaps adjacent fitness levels below
    /// the optimum, adding local optima.
    pub fn ruggedness(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Problem {
            kind: ProblemKind::Ruggedness,
            n,
            block: None,
            target: None,
            permutation: None,
            instance_seed: None,
            optimum: n as Fitness,
        })
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Largest attainable fitness value; the run terminates when any
    /// evaluated point reaches it.
    pub fn optimum(&self) -> Fitness {
        self.optimum
    }

    pub fn evaluate(&self, x: &BitString) -> Fitness {
        assert_eq!(x.len(), self.n, "bit string length must match dimension");
        match self.kind {
            ProblemKind::OneMax => x.count_ones(),
            ProblemKind::LeadingOnes => match (&self.target, &self.permutation) {
                (None, None) => leading_ones_identity(x, None),
                (target, None) => leading_ones_identity(x, target.as_ref()),
                (target, Some(perm)) => {
                    let mut prefix = 0;
                    for &idx in perm {
                        let i = idx as usize;
                        let want = target.as_ref().is_none_or(|z| z.get(i));
                        if x.get(i) != want {
                            break;
                        }
                        prefix += 1;
                    }
                    prefix
                }
            },
            ProblemKind::Neutrality => {
                let k = self.block.expect("validated at construction");
                block_majority(x, k)
            }
            ProblemKind::Plateau => {
                let k = self.block.expect("validated at construction");
                plateau_value(x.count_ones(), k)
            }
            ProblemKind::Ruggedness => ruggedness_value(x.count_ones(), self.n as u64)
                .expect("OneMax value is bounded by n"),
        }
    }

    pub fn descriptor(&self) -> ProblemDescriptor {
        ProblemDescriptor {
            kind: self.kind,
            n: self.n,
            k: self.block,
            permutation: self.permutation.clone(),
            target: self.target.as_ref().map(BitString::to_bits),
            instance_seed: self.instance_seed,
        }
    }

    pub fn from_descriptor(d: &ProblemDescriptor) -> Result<Self> {
        let mut problem = match d.kind {
            ProblemKind::OneMax => Problem::one_max(d.n)?,
            ProblemKind::LeadingOnes => Problem::leading_ones(d.n)?,
            ProblemKind::Neutrality => Problem::neutrality(
                d.n,
                d.k.ok_or_else(|| Error::InvalidConfig("neutrality requires k".into()))?,
            )?,
            ProblemKind::Plateau => Problem::plateau(
                d.n,
                d.k.ok_or_else(|| Error::InvalidConfig("plateau requires k".into()))?,
            )?,
            ProblemKind::Ruggedness => Problem::ruggedness(d.n)?,
        };
        if d.kind == ProblemKind::LeadingOnes {
            if let Some(bits) = &d.target {
                let target = BitString::from_bits(bits)?;
                if target.len() != d.n {
                    return Err(Error::InvalidInput(format!(
                        "target length {} does not match dimension {}",
                        target.len(),
                        d.n
                    )));
                }
                problem.target = Some(target);
            }
            if let Some(perm) = &d.permutation {
                check_permutation(perm, d.n)?;
                problem.permutation = Some(perm.clone());
            }
            problem.instance_seed = d.instance_seed;
        }
        Ok(problem)
    }
}

/// Serializable description of a problem instance (JSON: kind, n, k,
/// permutation as integer array, target as bit array).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemDescriptor {
    pub kind: ProblemKind,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub permutation: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub instance_seed: Option<u64>,
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "problem dimension must be at least 1".into(),
        ));
    }
    Ok(())
}

fn check_block_size(k: u64, n: usize) -> Result<()> {
    if k == 0 || k > n as u64 {
        return Err(Error::InvalidInput(format!(
            "block size must satisfy 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    Ok(())
}

fn check_permutation(perm: &[u32], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidInput(format!(
            "permutation length {} does not match dimension {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &idx in perm {
        let slot = seen
            .get_mut(idx as usize)
            .ok_or_else(|| Error::InvalidInput(format!("permutation entry {idx} out of range")))?;
        if *slot {
            return Err(Error::InvalidInput(format!(
                "permutation entry {idx} repeated"
            )));
        }
        *slot = true;
    }
    Ok(())
}

/// Word-wise prefix scan for identity index order. `target == None` means
/// the all-ones target.
fn leading_ones_identity(x: &BitString, target: Option<&BitString>) -> Fitness {
    let n = x.len();
    let mut prefix = 0usize;
    for (w, &xw) in x.words().iter().enumerate() {
        let zw = match target {
            Some(z) => z.words()[w],
            None => {
                let bits_here = (n - w * 64).min(64);
                if bits_here == 64 {
                    u64::MAX
                } else {
                    (1u64 << bits_here) - 1
                }
            }
        };
        let diff = xw ^ zw;
        if diff != 0 {
            prefix = (w * 64 + diff.trailing_zeros() as usize).min(n);
            return prefix as Fitness;
        }
        prefix = ((w + 1) * 64).min(n);
    }
    prefix as Fitness
}

fn block_majority(x: &BitString, k: u64) -> Fitness {
    let k = k as usize;
    let blocks = x.len() / k;
    let mut value = 0;
    for b in 0..blocks {
        let ones = x.count_ones_range(b * k, b * k + k);
        if 2 * ones > k as u64 {
            value += 1;
        }
    }
    value
}

/// Number of one-bits in `x`.
pub fn one_max_value(x: &BitString) -> Fitness {
    x.count_ones()
}

/// Length of the longest prefix `i` such that `x` agrees with `target` at
/// positions `permutation[0..i]`.
pub fn leading_ones_value(
    x: &BitString,
    target: &BitString,
    permutation: &[u32],
) -> Result<Fitness> {
    let n = x.len();
    if target.len() != n || permutation.len() != n {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: x={n}, target={}, permutation={}",
            target.len(),
            permutation.len()
        )));
    }
    let mut prefix = 0;
    for &idx in permutation {
        let i = idx as usize;
        if i >= n {
            return Err(Error::InvalidInput(format!(
                "permutation entry {idx} out of range for dimension {n}"
            )));
        }
        if x.get(i) != target.get(i) {
            break;
        }
        prefix += 1;
    }
    Ok(prefix)
}

/// Majority vote per block of `k` consecutive bits; trailing `n mod k` bits
/// are ignored.
pub fn neutrality_value(x: &BitString, k: u64) -> Result<Fitness> {
    check_block_size(k, x.len())?;
    if k.is_multiple_of(2) {
        return Err(Error::UnsupportedParameter(format!(
            "neutrality block size must be odd (majority undefined), got {k}"
        )));
    }
    Ok(block_majority(x, k))
}

/// Plateau transform `floor(f/k) + 1`.
pub fn plateau_value(f: Fitness, k: u64) -> Fitness {
    debug_assert!(k >= 1);
    f / k + 1
}

/// Ruggedness transform: `f+1` when `f` has the parity of `n` (and `f < n`),
/// `max(f-1, 0)` when it has the opposite parity (and `f < n`), fixed point
/// at `n`.
pub fn ruggedness_value(f: Fitness, n: u64) -> Result<Fitness> {
    if f > n {
        return Err(Error::InvalidInput(format!(
            "fitness {f} exceeds dimension {n}"
        )));
    }
    if f == n {
        Ok(n)
    } else if f % 2 == n % 2 {
        Ok(f + 1)
    } else {
        Ok(f.saturating_sub(1))
    }
}
