//! Tabular multi-objective MDPs: representation, validation, exact policy
//! evaluation, scalarized planning and instance generators.

mod eval;
mod generate;
mod policy;

pub use eval::{
    bellman_residual, evaluate_policy, induced_reward, induced_transition, long_term_return,
    scalarized_q, solve_scalarized, Policy,
};
pub use generate::{gen_gridworld, gen_random_mdp, GridAction};
pub use policy::{
    enumerate_deterministic, hamming_distance, mix_policies, neighbors_one, policy_count,
    DeterministicPolicy, PolicyEnumerator, StochasticPolicy,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::PROB_TOL;

/// A finite discounted MDP with a `D`-dimensional reward and an initial
/// state distribution.
///
/// Transition probabilities are stored flat in `[s][a][s']` order and
/// rewards in `[s][a][d]` order.
#[derive(Debug, Clone, PartialEq)]
pub struct Mdp {
    states: usize,
    actions: usize,
    objectives: usize,
    transition: Vec<f64>,
    reward: Vec<f64>,
    gamma: f64,
    mu: Vec<f64>,
}

impl Mdp {
    /// Builds an MDP from flat arrays. Only shapes are checked here; use
    /// [`Mdp::validate`] for the probabilistic invariants.
    pub fn new(
        states: usize,
        actions: usize,
        objectives: usize,
        transition: Vec<f64>,
        reward: Vec<f64>,
        gamma: f64,
        mu: Vec<f64>,
    ) -> Result<Self> {
        if states == 0 || actions == 0 || objectives == 0 {
            return Err(Error::Dimension(format!(
                "states, actions and objectives must be positive (got {states}, {actions}, {objectives})"
            )));
        }
        if transition.len() != states * actions * states {
            return Err(Error::Dimension(format!(
                "transition has {} entries, expected {}",
                transition.len(),
                states * actions * states
            )));
        }
        if reward.len() != states * actions * objectives {
            return Err(Error::Dimension(format!(
                "reward has {} entries, expected {}",
                reward.len(),
                states * actions * objectives
            )));
        }
        if mu.len() != states {
            return Err(Error::Dimension(format!(
                "mu has {} entries, expected {states}",
                mu.len()
            )));
        }
        Ok(Self {
            states,
            actions,
            objectives,
            transition,
            reward,
            gamma,
            mu,
        })
    }

    /// Builds an MDP from nested `P[s][a][s']` and `r[s][a][d]` arrays.
    pub fn from_nested(
        transition: &[Vec<Vec<f64>>],
        reward: &[Vec<Vec<f64>>],
        gamma: f64,
        mu: Vec<f64>,
    ) -> Result<Self> {
        let states = transition.len();
        let actions = transition.first().map_or(0, Vec::len);
        let objectives = reward
            .first()
            .and_then(|row| row.first())
            .map_or(0, Vec::len);
        if reward.len() != states {
            return Err(Error::Dimension(format!(
                "r has {} states, P has {states}",
                reward.len()
            )));
        }
        let mut flat_p = Vec::with_capacity(states * actions * states);
        for (s, rows) in transition.iter().enumerate() {
            if rows.len() != actions {
                return Err(Error::Dimension(format!("P[{s}] has {} actions", rows.len())));
            }
            for (a, row) in rows.iter().enumerate() {
                if row.len() != states {
                    return Err(Error::Dimension(format!("P[{s}][{a}] has {} entries", row.len())));
                }
                flat_p.extend_from_slice(row);
            }
        }
        let mut flat_r = Vec::with_capacity(states * actions * objectives);
        for (s, rows) in reward.iter().enumerate() {
            if rows.len() != actions {
                return Err(Error::Dimension(format!("r[{s}] has {} actions", rows.len())));
            }
            for (a, row) in rows.iter().enumerate() {
                if row.len() != objectives {
                    return Err(Error::Dimension(format!("r[{s}][{a}] has {} entries", row.len())));
                }
                flat_r.extend_from_slice(row);
            }
        }
        Self::new(states, actions, objectives, flat_p, flat_r, gamma, mu)
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn num_actions(&self) -> usize {
        self.actions
    }

    pub fn num_objectives(&self) -> usize {
        self.objectives
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Next-state distribution `P(.|s, a)`.
    pub fn transition_row(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.actions + a) * self.states;
        &self.transition[start..start + self.states]
    }

    /// Reward vector `r(s, a)`.
    pub fn reward_vec(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.actions + a) * self.objectives;
        &self.reward[start..start + self.objectives]
    }

    pub fn transition_flat(&self) -> &[f64] {
        &self.transition
    }

    pub fn reward_flat(&self) -> &[f64] {
        &self.reward
    }

    /// Largest absolute reward entry.
    pub fn max_abs_reward(&self) -> f64 {
        self.reward.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    /// Factor mapping returns into the unit box: `(1 - gamma) / max(1, max|r|)`.
    pub fn return_scale(&self) -> f64 {
        (1.0 - self.gamma) / self.max_abs_reward().max(1.0)
    }

    /// Checks every MDP invariant and lists all violations.
    pub fn validate(&self) -> ValidationReport {
        validate_mdp(self)
    }
}

/// One failed invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub index: Vec<usize>,
    pub magnitude: f64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidMdp(
                self.violations.into_iter().map(|v| v.message).collect(),
            ))
        }
    }
}

pub fn validate_mdp(mdp: &Mdp) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push = |field: &str, index: Vec<usize>, magnitude: f64, message: String| {
        violations.push(Violation {
            field: field.to_string(),
            index,
            magnitude,
            message,
        });
    };

    for s in 0..mdp.states {
        for a in 0..mdp.actions {
            let row = mdp.transition_row(s, a);
            for (next, &p) in row.iter().enumerate() {
                if !p.is_finite() || p < 0.0 {
                    push(
                        "P",
                        vec![s, a, next],
                        p,
                        format!("P[{s}][{a}][{next}] = {p} is not a probability"),
                    );
                }
            }
            let sum: f64 = row.iter().sum();
            if !((sum - 1.0).abs() <= PROB_TOL) {
                push(
                    "P",
                    vec![s, a],
                    (sum - 1.0).abs(),
                    format!("P[{s}][{a}] sums to {sum}, off by {:e}", (sum - 1.0).abs()),
                );
            }
            for (d, &r) in mdp.reward_vec(s, a).iter().enumerate() {
                if !r.is_finite() {
                    push("r", vec![s, a, d], r, format!("r[{s}][{a}][{d}] = {r} is not finite"));
                }
            }
        }
    }

    for (s, &m) in mdp.mu.iter().enumerate() {
        if !(m > 0.0) {
            push("mu", vec![s], m, format!("mu[{s}] not > 0 (got {m})"));
        }
    }
    let mu_sum: f64 = mdp.mu.iter().sum();
    if !((mu_sum - 1.0).abs() <= PROB_TOL) {
        push(
            "mu",
            vec![],
            (mu_sum - 1.0).abs(),
            format!("mu sums to {mu_sum}, off by {:e}", (mu_sum - 1.0).abs()),
        );
    }

    if !(0.0..1.0).contains(&mdp.gamma) {
        push(
            "gamma",
            vec![],
            mdp.gamma,
            format!("gamma = {} outside [0, 1)", mdp.gamma),
        );
    }

    ValidationReport { violations }
}

/// Expected discounted return vector `J^pi(mu)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReturnPoint(pub Vec<f64>);

impl ReturnPoint {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn scaled(&self, factor: f64) -> Vec<f64> {
        self.0.iter().map(|x| x * factor).collect()
    }
}

/// Per-state value vectors, `S x D`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction {
    pub states: usize,
    pub objectives: usize,
    pub values: Vec<f64>,
}

impl ValueFunction {
    pub fn state(&self, s: usize) -> &[f64] {
        &self.values[s * self.objectives..(s + 1) * self.objectives]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(mu: Vec<f64>, row: Vec<f64>) -> Mdp {
        Mdp::from_nested(
            &[vec![row.clone(), vec![0.0, 1.0]], vec![vec![1.0, 0.0], vec![0.5, 0.5]]],
            &[vec![vec![1.0], vec![0.0]], vec![vec![0.5], vec![2.0]]],
            0.9,
            mu,
        )
        .unwrap()
    }

    #[test]
    fn well_formed_is_ok() {
        let mdp = two_state(vec![0.5, 0.5], vec![0.25, 0.75]);
        assert!(mdp.validate().is_ok());
    }

    #[test]
    fn zero_initial_mass_is_reported() {
        let mdp = two_state(vec![1.0, 0.0], vec![0.25, 0.75]);
        let report = mdp.validate();
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.field, "mu");
        assert_eq!(v.index, vec![1]);
        assert!(v.message.contains("mu[1] not > 0"));
    }

    #[test]
    fn short_row_names_state_action() {
        let mdp = two_state(vec![0.5, 0.5], vec![0.2, 0.7]);
        let report = mdp.validate();
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!((v.field.as_str(), v.index.clone()), ("P", vec![0, 0]));
        assert!((v.magnitude - 0.1).abs() < 1e-12);
    }

    #[test]
    fn bad_gamma_and_negative_entries() {
        let mut mdp = two_state(vec![0.5, 0.5], vec![-0.5, 1.5]);
        mdp.gamma = 1.0;
        let report = mdp.validate();
        assert!(report.violations.iter().any(|v| v.field == "gamma"));
        assert!(report.violations.iter().any(|v| v.index == vec![0, 0, 0]));
        assert!(report.into_result().is_err());
    }

    #[test]
    fn shape_errors() {
        assert!(Mdp::new(1, 1, 1, vec![1.0], vec![], 0.5, vec![1.0]).is_err());
        assert!(Mdp::new(0, 1, 1, vec![], vec![], 0.5, vec![]).is_err());
    }
}
