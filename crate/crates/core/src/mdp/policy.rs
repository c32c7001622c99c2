use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::PROB_TOL;

/// One action index per state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeterministicPolicy(Vec<usize>);

impl DeterministicPolicy {
    pub fn new(actions: Vec<usize>, num_actions: usize) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::Dimension("policy must cover at least one state".into()));
        }
        if let Some((s, a)) = actions.iter().enumerate().find(|(_, &a)| a >= num_actions) {
            return Err(Error::InvalidArgument(format!(
                "action {a} at state {s} is out of range for {num_actions} actions"
            )));
        }
        Ok(Self(actions))
    }

    /// Policy taking action 0 everywhere.
    pub fn zeros(states: usize) -> Self {
        Self(vec![0; states])
    }

    pub fn actions(&self) -> &[usize] {
        &self.0
    }

    pub fn action(&self, s: usize) -> usize {
        self.0[s]
    }

    pub fn num_states(&self) -> usize {
        self.0.len()
    }

    pub fn with_action(&self, s: usize, a: usize) -> Self {
        let mut next = self.0.clone();
        next[s] = a;
        Self(next)
    }

    /// Indicator stochastic policy.
    pub fn to_stochastic(&self, num_actions: usize) -> StochasticPolicy {
        let mut probs = vec![0.0; self.0.len() * num_actions];
        for (s, &a) in self.0.iter().enumerate() {
            probs[s * num_actions + a] = 1.0;
        }
        StochasticPolicy {
            states: self.0.len(),
            actions: num_actions,
            probs,
        }
    }
}

/// `pi(a|s)` as an `S x A` row-stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticPolicy {
    states: usize,
    actions: usize,
    probs: Vec<f64>,
}

impl StochasticPolicy {
    pub fn new(states: usize, actions: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != states * actions {
            return Err(Error::Dimension(format!(
                "policy has {} entries, expected {}",
                probs.len(),
                states * actions
            )));
        }
        for s in 0..states {
            let row = &probs[s * actions..(s + 1) * actions];
            if row.iter().any(|&p| !(p >= 0.0)) {
                return Err(Error::InvalidArgument(format!("negative probability in row {s}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidArgument(format!("row {s} sums to {sum}")));
            }
        }
        Ok(Self {
            states,
            actions,
            probs,
        })
    }

    pub fn uniform(states: usize, actions: usize) -> Self {
        Self {
            states,
            actions,
            probs: vec![1.0 / actions as f64; states * actions],
        }
    }

    pub fn num_states(&self) -> usize {
        self.states
    }

    pub fn num_actions(&self) -> usize {
        self.actions
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.probs[s * self.actions..(s + 1) * self.actions]
    }

    pub fn prob(&self, s: usize, a: usize) -> f64 {
        self.probs[s * self.actions + a]
    }
}

/// Number of deterministic policies, `A^S`, or `None` on overflow.
pub fn policy_count(states: usize, actions: usize) -> Option<u128> {
    let exp = u32::try_from(states).ok()?;
    (actions as u128).checked_pow(exp)
}

/// The `S * (A - 1)` policies that differ from `policy` in exactly one
/// state, ordered state-major then by ascending action.
pub fn neighbors_one(policy: &DeterministicPolicy, num_actions: usize) -> Vec<DeterministicPolicy> {
    let mut out = Vec::with_capacity(policy.num_states() * num_actions.saturating_sub(1));
    for s in 0..policy.num_states() {
        let current = policy.action(s);
        for a in (0..num_actions).filter(|&a| a != current) {
            out.push(policy.with_action(s, a));
        }
    }
    out
}

pub fn hamming_distance(p1: &DeterministicPolicy, p2: &DeterministicPolicy) -> Result<usize> {
    if p1.num_states() != p2.num_states() {
        return Err(Error::Dimension(format!(
            "policies cover {} and {} states",
            p1.num_states(),
            p2.num_states()
        )));
    }
    Ok(p1
        .actions()
        .iter()
        .zip(p2.actions())
        .filter(|(a, b)| a != b)
        .count())
}

/// `pi(a|s) = sum_i weights[i] * pi_i(a|s)`.
pub fn mix_policies(
    policies: &[DeterministicPolicy],
    weights: &[f64],
    num_actions: usize,
) -> Result<StochasticPolicy> {
    let first = policies
        .first()
        .ok_or_else(|| Error::InvalidArgument("cannot mix an empty policy list".into()))?;
    if weights.len() != policies.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} policies",
            weights.len(),
            policies.len()
        )));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::InvalidArgument("mixture weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidArgument(format!("mixture weights sum to {total}")));
    }
    let states = first.num_states();
    if policies.iter().any(|p| p.num_states() != states) {
        return Err(Error::Dimension("mixed policies cover different state counts".into()));
    }
    if let Some(bad) = policies.iter().flat_map(|p| p.actions()).find(|&&a| a >= num_actions) {
        return Err(Error::InvalidArgument(format!("action {bad} out of range")));
    }

    let mut probs = vec![0.0; states * num_actions];
    for (policy, &w) in policies.iter().zip(weights) {
        for (s, &a) in policy.actions().iter().enumerate() {
            probs[s * num_actions + a] += w;
        }
    }
    Ok(StochasticPolicy {
        states,
        actions: num_actions,
        probs,
    })
}

/// Streams all `A^S` deterministic policies in lexicographic order.
#[derive(Debug, Clone)]
pub struct PolicyEnumerator {
    actions: usize,
    next: Option<Vec<usize>>,
    total: u128,
}

impl PolicyEnumerator {
    pub fn total(&self) -> u128 {
        self.total
    }

    /// Policy at lexicographic rank `index`.
    pub fn unrank(index: u128, states: usize, actions: usize) -> DeterministicPolicy {
        let mut rest = index;
        let mut out = vec![0; states];
        for slot in out.iter_mut().rev() {
            *slot = (rest % actions as u128) as usize;
            rest /= actions as u128;
        }
        DeterministicPolicy(out)
    }
}

impl Iterator for PolicyEnumerator {
    type Item = DeterministicPolicy;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried = true;
        for slot in succ.iter_mut().rev() {
            if *slot + 1 < self.actions {
                *slot += 1;
                carried = false;
                break;
            }
            *slot = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(DeterministicPolicy(current))
    }
}

pub fn enumerate_deterministic(states: usize, actions: usize) -> Result<PolicyEnumerator> {
    if states == 0 || actions == 0 {
        return Err(Error::Dimension("states and actions must be positive".into()));
    }
    let total = policy_count(states, actions).ok_or(Error::CountOverflow { states, actions })?;
    Ok(PolicyEnumerator {
        actions,
        next: Some(vec![0; states]),
        total,
    })
}
