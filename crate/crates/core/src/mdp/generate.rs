use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use super::Mdp;
use crate::error::{Error, Result};

fn check_gamma(gamma: f64) -> Result<()> {
    if (0.0..1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("gamma = {gamma} outside [0, 1)")))
    }
}

/// Random MDP with flat-Dirichlet transition rows, rewards uniform on
/// `[0, 1)` and a uniform initial distribution.
pub fn gen_random_mdp(
    seed: u64,
    states: usize,
    actions: usize,
    objectives: usize,
    gamma: f64,
) -> Result<Mdp> {
    if states == 0 || actions == 0 || objectives == 0 {
        return Err(Error::InvalidArgument(
            "states, actions and objectives must be at least 1".into(),
        ));
    }
    check_gamma(gamma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut transition = Vec::with_capacity(states * actions * states);
    for _ in 0..states * actions {
        // Dirichlet(1, ..., 1) as normalized Exp(1) draws
        let draws: Vec<f64> = (0..states).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = draws.iter().sum();
        let mut row: Vec<f64> = draws.iter().map(|x| x / total).collect();
        // put the rounding error on the largest entry so the row sums to 1
        let drift = 1.0 - row.iter().sum::<f64>();
        let (imax, _) = row
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
        row[imax] += drift;
        transition.extend(row);
    }
    let reward: Vec<f64> = (0..states * actions * objectives)
        .map(|_| rng.random::<f64>())
        .collect();
    let mu = vec![1.0 / states as f64; states];
    Mdp::new(states, actions, objectives, transition, reward, gamma, mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridAction {
    Up = 0,
    Down = 1,
    Left = 2,
    Right = 3,
}

impl GridAction {
    pub const ALL: [GridAction; 4] = [Self::Up, Self::Down, Self::Left, Self::Right];

    /// Target cell of a move, clamped at the walls.
    pub fn apply(self, row: usize, col: usize, rows: usize, cols: usize) -> (usize, usize) {
        match self {
            Self::Up => (row.saturating_sub(1), col),
            Self::Down => ((row + 1).min(rows - 1), col),
            Self::Left => (row, col.saturating_sub(1)),
            Self::Right => (row, (col + 1).min(cols - 1)),
        }
    }
}

/// Deep-sea-treasure style grid: deterministic moves with wall clamping and
/// a uniform random reward per (cell, action, objective).
pub fn gen_gridworld(seed: u64, rows: usize, cols: usize, objectives: usize, gamma: f64) -> Result<Mdp> {
    if rows == 0 || cols == 0 || objectives == 0 {
        return Err(Error::InvalidArgument(
            "rows, cols and objectives must be at least 1".into(),
        ));
    }
    check_gamma(gamma)?;
    let states = rows * cols;
    let actions = GridAction::ALL.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut transition = vec![0.0; states * actions * states];
    for r in 0..rows {
        for c in 0..cols {
            let s = r * cols + c;
            for (a, act) in GridAction::ALL.iter().enumerate() {
                let (nr, nc) = act.apply(r, c, rows, cols);
                transition[(s * actions + a) * states + nr * cols + nc] = 1.0;
            }
        }
    }
    let reward: Vec<f64> = (0..states * actions * objectives)
        .map(|_| rng.random::<f64>())
        .collect();
    let mu = vec![1.0 / states as f64; states];
    Mdp::new(states, actions, objectives, transition, reward, gamma, mu)
}
