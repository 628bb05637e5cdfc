//! Per-generation mutation-rate update policies and the controller contract
//! the generation loop drives.
//!
//! Three policies live here: the static rate, the multiplicative success
//! rule (increase by `A` on success, decrease by `b` otherwise), and the
//! two-rate scheme that samples half the offspring at half the current rate
//! and half at twice the current rate. The Q-learning policies implement the
//! same contract in the `qlearning` module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mutation::{MutationRate, RateBounds};
use crate::problems::Fitness;
use crate::qlearning::QTraceSnapshot;
use crate::rng::RandomSource;

/// Whether "success"/"improvement" requires strictly greater fitness or
/// allows equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateRule {
    Strict,
    NonStrict,
}

impl UpdateRule {
    pub fn improves(self, candidate: Fitness, reference: Fitness) -> bool {
        match self {
            UpdateRule::Strict => candidate > reference,
            UpdateRule::NonStrict => candidate >= reference,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UpdateRule::Strict => "strict",
            UpdateRule::NonStrict => "nonstrict",
        }
    }
}

impl std::fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for UpdateRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(UpdateRule::Strict),
            "nonstrict" | "non-strict" => Ok(UpdateRule::NonStrict),
            other => Err(Error::InvalidConfig(format!("unknown update rule '{other}'"))),
        }
    }
}

/// Configuration shared by the multiplicative controllers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControllerConfig {
    /// Multiplicative increase factor, `> 1`. Default 2.
    pub up: f64,
    /// Multiplicative decrease factor, in `(0, 1)`. Default 1/2.
    pub down: f64,
    pub rule: UpdateRule,
    pub bounds: RateBounds,
}

impl ControllerConfig {
    pub fn new(up: f64, down: f64, rule: UpdateRule, bounds: RateBounds) -> Result<Self> {
        let valid = up > 1.0 && down > 0.0 && down < 1.0;
        if !valid {
            return Err(Error::InvalidConfig(format!(
                "rate factors must satisfy up > 1 and 0 < down < 1, got up={up}, down={down}"
            )));
        }
        Ok(ControllerConfig {
            up,
            down,
            rule,
            bounds,
        })
    }
}

/// Which of the two sub-rates produced an offspring (two-rate policy only).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateTag {
    Low,
    High,
}

impl RateTag {
    fn other(self) -> RateTag {
        match self {
            RateTag::Low => RateTag::High,
            RateTag::High => RateTag::Low,
        }
    }
}

/// Everything a controller may inspect about the generation that just ran.
#[derive(Clone, Debug)]
pub struct GenerationFeedback {
    /// Parent fitness before any replacement this generation.
    pub parent_fitness_before: Fitness,
    /// Fitness of the best offspring (maximum of `offspring_fitnesses`).
    pub best_offspring_fitness: Fitness,
    pub offspring_fitnesses: Vec<Fitness>,
    /// Sub-rate of the uniformly chosen best offspring; present only when
    /// the generation was sampled from a split plan.
    pub winning_rate_tag: Option<RateTag>,
}

/// Mutation rates to use for one generation's offspring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RatePlan {
    /// Every offspring is sampled at the same rate.
    Uniform(MutationRate),
    /// Offspring with index `< low_count` use `low`, the rest `high`.
    Split {
        low: MutationRate,
        high: MutationRate,
        low_count: u64,
    },
}

impl RatePlan {
    pub fn rate_for(&self, offspring_index: u64) -> (MutationRate, Option<RateTag>) {
        match *self {
            RatePlan::Uniform(rate) => (rate, None),
            RatePlan::Split {
                low,
                high,
                low_count,
            } => {
                if offspring_index < low_count {
                    (low, Some(RateTag::Low))
                } else {
                    (high, Some(RateTag::High))
                }
            }
        }
    }
}

/// The contract the generation loop drives: produce the rates for the next
/// generation's offspring, then digest the observed feedback.
pub trait RateController {
    fn plan(&mut self, lambda: u64, rng: &mut RandomSource) -> RatePlan;
    fn observe(&mut self, feedback: &GenerationFeedback, rng: &mut RandomSource);
    /// Current nominal rate, for tracing.
    fn rate(&self) -> f64;
    /// Snapshot of the latest Q-learning decision, if this controller learns.
    fn q_trace(&self) -> Option<QTraceSnapshot> {
        None
    }
}

/// Returns `p` unchanged; the static policy never reacts to feedback.
pub fn static_update(p: MutationRate, _feedback: &GenerationFeedback) -> MutationRate {
    p
}

/// Success-rule update: multiply by `up` when the best offspring improves on
/// the parent (per the configured rule), by `down` otherwise, then cap.
pub fn one_fifth_update(
    p: MutationRate,
    feedback: &GenerationFeedback,
    cfg: &ControllerConfig,
) -> MutationRate {
    let success = cfg.rule.improves(
        feedback.best_offspring_fitness,
        feedback.parent_fitness_before,
    );
    let factor = if success { cfg.up } else { cfg.down };
    cfg.bounds.clamp(factor * p.value())
}

/// State of the two-rate policy: the mutation rate is parameterized as
/// `r/n` and offspring are sampled at `r/(2n)` and `2r/n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoRateState {
    /// Rate numerator; the nominal mutation rate is `r/n`.
    pub r: f64,
    pub n: u64,
    pub bounds: RateBounds,
}

impl TwoRateState {
    /// Starts from `r = 1`, i.e. the same `p = 1/n` initial rate as the
    /// other policies.
    pub fn new(n: u64, bounds: RateBounds) -> Self {
        TwoRateState { r: 1.0, n, bounds }
    }

    pub fn low_rate(&self) -> MutationRate {
        self.bounds.clamp(self.r / (2.0 * self.n as f64))
    }

    pub fn high_rate(&self) -> MutationRate {
        self.bounds.clamp(2.0 * self.r / self.n as f64)
    }
}

/// Assigns each offspring to a sub-rate: the first `ceil(lambda/2)` use the
/// clamped `r/(2n)`, the rest the clamped `2r/n`. A lone offspring
/// (`lambda = 1`) picks its sub-rate by a fair coin.
pub fn two_rate_sample_rates(
    state: &TwoRateState,
    lambda: u64,
    rng: &mut RandomSource,
) -> RatePlan {
    let low_count = if lambda == 1 {
        1 - rng.below(2)
    } else {
        lambda.div_ceil(2)
    };
    RatePlan::Split {
        low: state.low_rate(),
        high: state.high_rate(),
        low_count,
    }
}

/// Adopts the winning half's rate with probability 3/4 and the other with
/// probability 1/4, then caps `r` so that `r/n` stays inside the bounds.
pub fn two_rate_update(
    state: &TwoRateState,
    feedback: &GenerationFeedback,
    rng: &mut RandomSource,
) -> Result<TwoRateState> {
    let winner = feedback.winning_rate_tag.ok_or_else(|| {
        Error::MissingFeedback("two-rate update requires the winning rate tag".into())
    })?;
    let adopted = if rng.below(4) < 3 {
        winner
    } else {
        winner.other()
    };
    let r = match adopted {
        RateTag::Low => state.r / 2.0,
        RateTag::High => state.r * 2.0,
    };
    let n = state.n as f64;
    let r = r.max(state.bounds.min() * n).min(state.bounds.max() * n);
    Ok(TwoRateState { r, ..*state })
}

pub struct StaticController {
    rate: MutationRate,
}

impl StaticController {
    pub fn new(rate: MutationRate) -> Self {
        StaticController { rate }
    }
}

impl RateController for StaticController {
    fn plan(&mut self, _lambda: u64, _rng: &mut RandomSource) -> RatePlan {
        RatePlan::Uniform(self.rate)
    }

    fn observe(&mut self, feedback: &GenerationFeedback, _rng: &mut RandomSource) {
        self.rate = static_update(self.rate, feedback);
    }

    fn rate(&self) -> f64 {
        self.rate.value()
    }
}

pub struct SuccessRuleController {
    rate: MutationRate,
    cfg: ControllerConfig,
}

impl SuccessRuleController {
    pub fn new(initial: MutationRate, cfg: ControllerConfig) -> Self {
        SuccessRuleController { rate: initial, cfg }
    }
}

impl RateController for SuccessRuleController {
    fn plan(&mut self, _lambda: u64, _rng: &mut RandomSource) -> RatePlan {
        RatePlan::Uniform(self.rate)
    }

    fn observe(&mut self, feedback: &GenerationFeedback, _rng: &mut RandomSource) {
        self.rate = one_fifth_update(self.rate, feedback, &self.cfg);
    }

    fn rate(&self) -> f64 {
        self.rate.value()
    }
}

pub struct TwoRateController {
    state: TwoRateState,
}

impl TwoRateController {
    pub fn new(n: u64, bounds: RateBounds) -> Self {
        TwoRateController {
            state: TwoRateState::new(n, bounds),
        }
    }
}

impl RateController for TwoRateController {
    fn plan(&mut self, lambda: u64, rng: &mut RandomSource) -> RatePlan {
        two_rate_sample_rates(&self.state, lambda, rng)
    }

    fn observe(&mut self, feedback: &GenerationFeedback, rng: &mut RandomSource) {
        self.state = two_rate_update(&self.state, feedback, rng)
            .expect("generation loop always tags split-plan feedback");
    }

    fn rate(&self) -> f64 {
        self.state.r / self.state.n as f64
    }
}
