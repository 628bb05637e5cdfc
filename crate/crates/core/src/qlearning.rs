//! Tabular Q-learning control of the mutation rate.
//!
//! The state observed after a generation is the number of offspring that
//! improve on the parent (so states range over `[0..lambda]`); the two
//! actions multiply or halve the current rate. The plain learner breaks
//! value ties uniformly at random; the hybrid learner falls back to the
//! success rule in exactly those tie situations (first visits included).

use crate::controllers::{GenerationFeedback, RateController, RatePlan, UpdateRule};
use crate::error::{Error, Result};
use crate::mutation::{MutationRate, RateBounds};
use crate::problems::Fitness;
use crate::rng::RandomSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Multiply,
    Divide,
}

impl Action {
    pub fn symbol(self) -> char {
        match self {
            Action::Multiply => 'm',
            Action::Divide => 'd',
        }
    }

    fn index(self) -> usize {
        match self {
            Action::Multiply => 0,
            Action::Divide => 1,
        }
    }
}

/// Action-value estimates, one row per state `s` in `[0..lambda]`, columns
/// for the multiply and divide actions. All entries start at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    rows: Vec<[f64; 2]>,
}

impl QTable {
    pub fn new(lambda: u64) -> Self {
        QTable {
            rows: vec![[0.0; 2]; lambda as usize + 1],
        }
    }

    pub fn states(&self) -> u64 {
        self.rows.len() as u64
    }

    pub fn get(&self, state: u64, action: Action) -> f64 {
        self.rows[state as usize][action.index()]
    }

    pub fn row(&self, state: u64) -> [f64; 2] {
        self.rows[state as usize]
    }

    fn set(&mut self, state: u64, action: Action, value: f64) {
        self.rows[state as usize][action.index()] = value;
    }

    fn max_value(&self, state: u64) -> f64 {
        let [m, d] = self.rows[state as usize];
        m.max(d)
    }
}

/// Learner state: the table plus the previous (state, action) pair and the
/// hyperparameters of the update rule.
#[derive(Clone, Debug)]
pub struct QLearnerState {
    pub table: QTable,
    prev_state: Option<u64>,
    prev_action: Option<Action>,
    /// Learning rate; default 0.8.
    pub alpha: f64,
    /// Discount factor; default 0.2.
    pub gamma: f64,
    /// Rate factor applied by the multiply action; default 2.
    pub up_factor: f64,
    /// Rate factor applied by the divide action; default 1/2.
    pub down_factor: f64,
}

impl QLearnerState {
    pub fn new(lambda: u64, alpha: f64, gamma: f64, up_factor: f64, down_factor: f64) -> Self {
        QLearnerState {
            table: QTable::new(lambda),
            prev_state: None,
            prev_action: None,
            alpha,
            gamma,
            up_factor,
            down_factor,
        }
    }

    /// Standard defaults: alpha = 0.8, gamma = 0.2, factors 2 and 1/2.
    pub fn with_defaults(lambda: u64) -> Self {
        QLearnerState::new(lambda, 0.8, 0.2, 2.0, 0.5)
    }

    pub fn previous(&self) -> Option<(u64, Action)> {
        self.prev_state.zip(self.prev_action)
    }

    /// Records the action chosen for the upcoming generation.
    pub fn set_action(&mut self, action: Action) {
        self.prev_action = Some(action);
    }
}

/// Relative fitness gain of the best offspring over the parent. A parent at
/// fitness zero divides by one instead (smallest positive value of the
/// integer-valued benchmarks); the result is signed.
pub fn compute_reward(parent_before: Fitness, best_offspring: Fitness) -> f64 {
    best_offspring as f64 / parent_before.max(1) as f64 - 1.0
}

/// Number of offspring that improve on the parent under `rule`; this is the
/// learner's state observation, in `[0..lambda]`.
pub fn compute_state(offspring: &[Fitness], parent_before: Fitness, rule: UpdateRule) -> u64 {
    offspring
        .iter()
        .filter(|&&f| rule.improves(f, parent_before))
        .count() as u64
}

/// Standard Q-update toward `reward + gamma * max_a Q(new_state, a)`,
/// skipped on the first generation when no previous (state, action) pair
/// exists. Afterwards the previous state becomes `new_state`; the action is
/// recorded separately once selected.
pub fn q_update(learner: &mut QLearnerState, reward: f64, new_state: u64) -> Result<()> {
    if new_state >= learner.table.states() {
        return Err(Error::InvalidState(format!(
            "state {new_state} outside [0..{}]",
            learner.table.states() - 1
        )));
    }
    if let Some((state, action)) = learner.previous() {
        let old = learner.table.get(state, action);
        let target = reward + learner.gamma * learner.table.max_value(new_state);
        learner
            .table
            .set(state, action, old + learner.alpha * (target - old));
    }
    learner.prev_state = Some(new_state);
    Ok(())
}

/// Greedy action for `state`; exact value ties are broken by a fair coin.
pub fn select_action_qea(table: &QTable, state: u64, rng: &mut RandomSource) -> Action {
    let [mult, div] = table.row(state);
    if mult == div {
        if rng.below(2) == 0 {
            Action::Multiply
        } else {
            Action::Divide
        }
    } else if mult > div {
        Action::Multiply
    } else {
        Action::Divide
    }
}

/// Greedy action for `state`; exact value ties fall back to the success
/// rule: multiply when the best offspring improves on the parent, divide
/// otherwise. No randomness on the tie path.
pub fn select_action_hqea(
    table: &QTable,
    state: u64,
    best_offspring: Fitness,
    parent_before: Fitness,
    rule: UpdateRule,
) -> Action {
    let [mult, div] = table.row(state);
    if mult == div {
        if rule.improves(best_offspring, parent_before) {
            Action::Multiply
        } else {
            Action::Divide
        }
    } else if mult > div {
        Action::Multiply
    } else {
        Action::Divide
    }
}

/// Applies the chosen action's factor to the rate and caps the result.
pub fn apply_action(
    p: MutationRate,
    action: Action,
    learner: &QLearnerState,
    bounds: &RateBounds,
) -> MutationRate {
    let factor = match action {
        Action::Multiply => learner.up_factor,
        Action::Divide => learner.down_factor,
    };
    bounds.clamp(factor * p.value())
}

/// How a learning controller resolves equal action values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TiePolicy {
    /// Fair coin (the plain Q-learning EA).
    Random,
    /// Success-rule fallback (the hybrid EA).
    SuccessRule,
}

/// Snapshot of one learning decision, for per-generation traces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QTraceSnapshot {
    pub state: u64,
    pub action: Action,
    pub reward: f64,
    pub q_row: [f64; 2],
}

/// Mutation-rate controller backed by the tabular learner.
pub struct QController {
    learner: QLearnerState,
    rate: MutationRate,
    rule: UpdateRule,
    tie_policy: TiePolicy,
    bounds: RateBounds,
    last: Option<QTraceSnapshot>,
}

impl QController {
    pub fn new(
        learner: QLearnerState,
        initial: MutationRate,
        rule: UpdateRule,
        tie_policy: TiePolicy,
        bounds: RateBounds,
    ) -> Self {
        QController {
            learner,
            rate: initial,
            rule,
            tie_policy,
            bounds,
            last: None,
        }
    }

    pub fn learner(&self) -> &QLearnerState {
        &self.learner
    }
}

impl RateController for QController {
    fn plan(&mut self, _lambda: u64, _rng: &mut RandomSource) -> RatePlan {
        RatePlan::Uniform(self.rate)
    }

    fn observe(&mut self, feedback: &GenerationFeedback, rng: &mut RandomSource) {
        let reward = compute_reward(
            feedback.parent_fitness_before,
            feedback.best_offspring_fitness,
        );
        let state = compute_state(
            &feedback.offspring_fitnesses,
            feedback.parent_fitness_before,
            self.rule,
        );
        q_update(&mut self.learner, reward, state)
            .expect("offspring count never exceeds the table size");
        let action = match self.tie_policy {
            TiePolicy::Random => select_action_qea(&self.learner.table, state, rng),
            TiePolicy::SuccessRule => select_action_hqea(
                &self.learner.table,
                state,
                feedback.best_offspring_fitness,
                feedback.parent_fitness_before,
                self.rule,
            ),
        };
        self.learner.set_action(action);
        self.rate = apply_action(self.rate, action, &self.learner, &self.bounds);
        self.last = Some(QTraceSnapshot {
            state,
            action,
            reward,
            q_row: self.learner.table.row(state),
        });
    }

    fn rate(&self) -> f64 {
        self.rate.value()
    }

    fn q_trace(&self) -> Option<QTraceSnapshot> {
        self.last
    }
}
