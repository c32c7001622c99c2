use nalgebra::DMatrix;

use super::{DeterministicPolicy, Mdp, ReturnPoint, StochasticPolicy, ValueFunction};
use crate::error::{Error, Result};
use crate::tolerance::ACTION_TIE_TOL;

/// Anything that assigns action probabilities per state.
pub trait Policy {
    fn num_states(&self) -> usize;

    /// Calls `f(a, pi(a|s))` for every action with nonzero probability.
    fn for_each_action(&self, s: usize, f: &mut dyn FnMut(usize, f64));

    fn check_dims(&self, mdp: &Mdp) -> Result<()>;
}

impl Policy for DeterministicPolicy {
    fn num_states(&self) -> usize {
        DeterministicPolicy::num_states(self)
    }

    fn for_each_action(&self, s: usize, f: &mut dyn FnMut(usize, f64)) {
        f(self.action(s), 1.0);
    }

    fn check_dims(&self, mdp: &Mdp) -> Result<()> {
        if self.num_states() != mdp.num_states() {
            return Err(Error::Dimension(format!(
                "policy covers {} states, MDP has {}",
                self.num_states(),
                mdp.num_states()
            )));
        }
        match self.actions().iter().find(|&&a| a >= mdp.num_actions()) {
            Some(a) => Err(Error::Dimension(format!(
                "action {a} out of range for {} actions",
                mdp.num_actions()
            ))),
            None => Ok(()),
        }
    }
}

impl Policy for StochasticPolicy {
    fn num_states(&self) -> usize {
        StochasticPolicy::num_states(self)
    }

    fn for_each_action(&self, s: usize, f: &mut dyn FnMut(usize, f64)) {
        for (a, &p) in self.row(s).iter().enumerate() {
            if p != 0.0 {
                f(a, p);
            }
        }
    }

    fn check_dims(&self, mdp: &Mdp) -> Result<()> {
        if self.num_states() != mdp.num_states() || self.num_actions() != mdp.num_actions() {
            return Err(Error::Dimension(format!(
                "policy is {}x{}, MDP is {}x{}",
                self.num_states(),
                self.num_actions(),
                mdp.num_states(),
                mdp.num_actions()
            )));
        }
        Ok(())
    }
}

/// `P^pi(s, s') = sum_a P(s'|s, a) pi(a|s)`.
pub fn induced_transition(mdp: &Mdp, policy: &impl Policy) -> Result<DMatrix<f64>> {
    policy.check_dims(mdp)?;
    let n = mdp.num_states();
    let mut out = DMatrix::zeros(n, n);
    for s in 0..n {
        policy.for_each_action(s, &mut |a, p| {
            for (next, &q) in mdp.transition_row(s, a).iter().enumerate() {
                out[(s, next)] += p * q;
            }
        });
    }
    Ok(out)
}

/// `r^pi(s) = sum_a r(s, a) pi(a|s)`, as an `S x D` matrix.
pub fn induced_reward(mdp: &Mdp, policy: &impl Policy) -> Result<DMatrix<f64>> {
    policy.check_dims(mdp)?;
    let mut out = DMatrix::zeros(mdp.num_states(), mdp.num_objectives());
    for s in 0..mdp.num_states() {
        policy.for_each_action(s, &mut |a, p| {
            for (d, &r) in mdp.reward_vec(s, a).iter().enumerate() {
                out[(s, d)] += p * r;
            }
        });
    }
    Ok(out)
}

/// Solves `(I - gamma P^pi) V = rhs` by LU with partial pivoting.
fn solve_bellman(mdp: &Mdp, transition: &DMatrix<f64>, rhs: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = mdp.num_states();
    let system = DMatrix::identity(n, n) - transition * mdp.gamma();
    system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("singular Bellman system".into()))
}

/// Exact value function of `policy`, one linear solve for all objectives.
pub fn evaluate_policy(mdp: &Mdp, policy: &impl Policy) -> Result<ValueFunction> {
    let transition = induced_transition(mdp, policy)?;
    let reward = induced_reward(mdp, policy)?;
    let v = solve_bellman(mdp, &transition, reward)?;
    let (states, objectives) = v.shape();
    let mut values = Vec::with_capacity(states * objectives);
    for s in 0..states {
        values.extend(v.row(s).iter());
    }
    Ok(ValueFunction {
        states,
        objectives,
        values,
    })
}

/// `J^pi(mu) = mu^T V^pi`.
pub fn long_term_return(mdp: &Mdp, policy: &impl Policy) -> Result<ReturnPoint> {
    let v = evaluate_policy(mdp, policy)?;
    let mut j = vec![0.0; mdp.num_objectives()];
    for (s, &m) in mdp.mu().iter().enumerate() {
        for (acc, &x) in j.iter_mut().zip(v.state(s)) {
            *acc += m * x;
        }
    }
    Ok(ReturnPoint(j))
}

fn check_weights(mdp: &Mdp, w: &[f64]) -> Result<()> {
    if w.len() != mdp.num_objectives() {
        return Err(Error::Dimension(format!(
            "{} weights for {} objectives",
            w.len(),
            mdp.num_objectives()
        )));
    }
    if w.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "scalarization weights must be strictly positive".into(),
        ));
    }
    Ok(())
}

fn scalar_reward(mdp: &Mdp, w: &[f64], s: usize, a: usize) -> f64 {
    mdp.reward_vec(s, a).iter().zip(w).map(|(r, w)| r * w).sum()
}

/// Action values of the scalarized MDP for a given scalar state value.
pub fn scalarized_q(mdp: &Mdp, w: &[f64], values: &[f64]) -> Vec<f64> {
    let (n, m) = (mdp.num_states(), mdp.num_actions());
    let mut q = vec![0.0; n * m];
    for s in 0..n {
        for a in 0..m {
            let next: f64 = mdp
                .transition_row(s, a)
                .iter()
                .zip(values)
                .map(|(p, v)| p * v)
                .sum();
            q[s * m + a] = scalar_reward(mdp, w, s, a) + mdp.gamma() * next;
        }
    }
    q
}

fn scalar_values(mdp: &Mdp, w: &[f64], policy: &DeterministicPolicy) -> Result<Vec<f64>> {
    let transition = induced_transition(mdp, policy)?;
    let n = mdp.num_states();
    let rhs = DMatrix::from_fn(n, 1, |s, _| scalar_reward(mdp, w, s, policy.action(s)));
    let v = solve_bellman(mdp, &transition, rhs)?;
    Ok(v.iter().copied().collect())
}

/// Lowest action index whose value is within the tie window of the row max.
fn greedy_action(row: &[f64]) -> usize {
    let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    row.iter()
        .position(|&q| q >= best - ACTION_TIE_TOL)
        .unwrap_or(0)
}

/// Optimal deterministic policy for the reward `w^T r`, by exact policy
/// iteration starting from the all-zeros policy.
pub fn solve_scalarized(mdp: &Mdp, w: &[f64]) -> Result<DeterministicPolicy> {
    check_weights(mdp, w)?;
    let (n, m) = (mdp.num_states(), mdp.num_actions());
    let mut policy = DeterministicPolicy::zeros(n);
    loop {
        let values = scalar_values(mdp, w, &policy)?;
        let q = scalarized_q(mdp, w, &values);
        let mut changed = false;
        let mut next = policy.actions().to_vec();
        for (s, slot) in next.iter_mut().enumerate() {
            let row = &q[s * m..(s + 1) * m];
            let candidate = greedy_action(row);
            // switch only on strict improvement so ties cannot cycle
            if row[candidate] > row[*slot] + ACTION_TIE_TOL {
                *slot = candidate;
                changed = true;
            }
        }
        if !changed {
            return Ok(policy);
        }
        policy = DeterministicPolicy::new(next, m)?;
    }
}

/// `max_s |max_a Q(s, a) - V(s)|` for the scalarized MDP under `policy`.
pub fn bellman_residual(mdp: &Mdp, w: &[f64], policy: &DeterministicPolicy) -> Result<f64> {
    check_weights(mdp, w)?;
    policy.check_dims(mdp)?;
    let values = scalar_values(mdp, w, policy)?;
    let q = scalarized_q(mdp, w, &values);
    let m = mdp.num_actions();
    Ok(values
        .iter()
        .enumerate()
        .map(|(s, v)| {
            let best = q[s * m..(s + 1) * m]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            (best - v).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{enumerate_deterministic, gen_random_mdp, mix_policies};

    fn single_state(rewards: &[f64], gamma: f64) -> Mdp {
        Mdp::from_nested(&[vec![vec![1.0]]], &[vec![rewards.to_vec()]], gamma, vec![1.0]).unwrap()
    }

    #[test]
    fn one_action_transition_is_the_action_row() {
        let mdp = gen_random_mdp(3, 3, 1, 2, 0.9).unwrap();
        let pol = DeterministicPolicy::zeros(3);
        let t = induced_transition(&mdp, &pol).unwrap();
        for s in 0..3 {
            for next in 0..3 {
                assert_eq!(t[(s, next)], mdp.transition_row(s, 0)[next]);
            }
        }
    }

    #[test]
    fn uniform_policy_averages_rows() {
        let mdp = gen_random_mdp(5, 3, 2, 2, 0.9).unwrap();
        let t = induced_transition(&mdp, &StochasticPolicy::uniform(3, 2)).unwrap();
        for s in 0..3 {
            for next in 0..3 {
                let avg = 0.5 * (mdp.transition_row(s, 0)[next] + mdp.transition_row(s, 1)[next]);
                assert!((t[(s, next)] - avg).abs() < 1e-15);
            }
            let sum: f64 = t.row(s).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_policy_matches_triple_loop() {
        let mdp = gen_random_mdp(11, 3, 2, 2, 0.9).unwrap();
        let a = DeterministicPolicy::new(vec![0, 1, 0], 2).unwrap();
        let b = DeterministicPolicy::new(vec![1, 1, 1], 2).unwrap();
        let mix = mix_policies(&[a, b], &[0.3, 0.7], 2).unwrap();
        let t = induced_transition(&mdp, &mix).unwrap();
        for s in 0..3 {
            for next in 0..3 {
                let mut naive = 0.0;
                for act in 0..2 {
                    naive += mdp.transition_row(s, act)[next] * mix.prob(s, act);
                }
                assert!((t[(s, next)] - naive).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let mdp = gen_random_mdp(1, 3, 2, 2, 0.9).unwrap();
        assert!(induced_transition(&mdp, &DeterministicPolicy::zeros(2)).is_err());
        assert!(induced_transition(&mdp, &StochasticPolicy::uniform(3, 3)).is_err());
    }

    #[test]
    fn geometric_series() {
        let mdp = single_state(&[1.0, -2.0, 0.5], 0.8);
        let v = evaluate_policy(&mdp, &DeterministicPolicy::zeros(1)).unwrap();
        for (got, c) in v.state(0).iter().zip([1.0, -2.0, 0.5]) {
            assert!((got - c / 0.2).abs() < 1e-12);
        }
        let j = long_term_return(&mdp, &DeterministicPolicy::zeros(1)).unwrap();
        assert_eq!(j.0.as_slice(), v.state(0));
    }

    #[test]
    fn myopic_values() {
        let mdp = gen_random_mdp(2, 4, 3, 2, 0.0).unwrap();
        let pol = DeterministicPolicy::new(vec![2, 0, 1, 1], 3).unwrap();
        let v = evaluate_policy(&mdp, &pol).unwrap();
        for s in 0..4 {
            assert_eq!(v.state(s), mdp.reward_vec(s, pol.action(s)));
        }
    }

    #[test]
    fn two_cycle_closed_form() {
        let gamma = 0.7;
        let mdp = Mdp::from_nested(
            &[vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]],
            &[vec![vec![1.0, 3.0]], vec![vec![2.0, -1.0]]],
            gamma,
            vec![0.5, 0.5],
        )
        .unwrap();
        let v = evaluate_policy(&mdp, &DeterministicPolicy::zeros(2)).unwrap();
        for d in 0..2 {
            let r0 = [1.0, 3.0][d];
            let r1 = [2.0, -1.0][d];
            assert!((v.state(0)[d] - (r0 + gamma * r1) / (1.0 - gamma * gamma)).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_objectives_give_equal_components() {
        let base = gen_random_mdp(4, 3, 2, 1, 0.9).unwrap();
        let reward: Vec<f64> = base.reward_flat().iter().flat_map(|&r| [r, r, r]).collect();
        let mdp = Mdp::new(3, 2, 3, base.transition_flat().to_vec(), reward, 0.9, base.mu().to_vec())
            .unwrap();
        let j = long_term_return(&mdp, &StochasticPolicy::uniform(3, 2)).unwrap();
        assert_eq!(j.0[0], j.0[1]);
        assert_eq!(j.0[1], j.0[2]);
    }

    #[test]
    fn residual_is_small() {
        let mdp = gen_random_mdp(9, 6, 3, 3, 0.95).unwrap();
        let mix = StochasticPolicy::uniform(6, 3);
        let v = evaluate_policy(&mdp, &mix).unwrap();
        let t = induced_transition(&mdp, &mix).unwrap();
        let r = induced_reward(&mdp, &mix).unwrap();
        let vm = DMatrix::from_row_slice(6, 3, &v.values);
        let resid = (DMatrix::identity(6, 6) - t * 0.95) * vm - &r;
        let scale = r.amax().max(1.0);
        assert!(resid.amax() <= 1e-10 * scale);
    }

    #[test]
    fn scalarized_myopic_ties_to_lowest_index() {
        let mdp = Mdp::from_nested(
            &[vec![vec![1.0], vec![1.0], vec![1.0]]],
            &[vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.0]]],
            0.0,
            vec![1.0],
        )
        .unwrap();
        let pol = solve_scalarized(&mdp, &[1.0, 1.0]).unwrap();
        assert_eq!(pol.actions(), &[0]);

        let mdp = gen_random_mdp(12, 4, 3, 3, 0.0).unwrap();
        let pol = solve_scalarized(&mdp, &[1.0, 1.0, 1.0]).unwrap();
        for s in 0..4 {
            let sums: Vec<f64> = (0..3).map(|a| mdp.reward_vec(s, a).iter().sum()).collect();
            assert_eq!(pol.action(s), greedy_action(&sums));
        }
    }

    #[test]
    fn scalarized_beats_every_deterministic_policy() {
        let mdp = gen_random_mdp(21, 3, 3, 1, 0.9).unwrap();
        let best = solve_scalarized(&mdp, &[1.0]).unwrap();
        let j_best = long_term_return(&mdp, &best).unwrap().0[0];
        for pol in enumerate_deterministic(3, 3).unwrap() {
            let j = long_term_return(&mdp, &pol).unwrap().0[0];
            assert!(j_best >= j - 1e-9);
        }
        assert!(bellman_residual(&mdp, &[1.0], &best).unwrap() <= 1e-9);
    }

    #[test]
    fn weight_scaling_is_invariant() {
        let mdp = gen_random_mdp(8, 4, 3, 3, 0.9).unwrap();
        let w = [0.3, 1.2, 0.7];
        let w2: Vec<f64> = w.iter().map(|x| 2.0 * x).collect();
        assert_eq!(
            solve_scalarized(&mdp, &w).unwrap(),
            solve_scalarized(&mdp, &w2).unwrap()
        );
    }

    #[test]
    fn rejects_nonpositive_weights() {
        let mdp = gen_random_mdp(8, 2, 2, 2, 0.9).unwrap();
        assert!(solve_scalarized(&mdp, &[1.0, 0.0]).is_err());
        assert!(solve_scalarized(&mdp, &[1.0]).is_err());
    }
}
