//! Exact Pareto front enumeration for finite discounted multi-objective MDPs.
//!
//! The front is found by walking the return polytope from one scalarized
//! optimum: every deterministic Pareto-optimal policy is expanded by
//! evaluating the policies that differ from it in a single state, building
//! the convex hull of the non-dominated ones, and keeping the hull faces
//! through the current vertex whose normal cone contains a strictly positive
//! direction. [`oracle::brute_force_front`] enumerates every deterministic
//! policy instead and serves as ground truth.
//!
//! ```
//! use mopf::{mdp::gen_random_mdp, search::{search, SearchConfig}};
//!
//! let mdp = gen_random_mdp(0, 3, 2, 2, 0.9).unwrap();
//! let front = search(&mdp, &SearchConfig::default()).unwrap();
//! assert!(!front.vertices.is_empty());
//! assert_eq!(front.stats.planner_calls, 1);
//! ```

pub mod error;
pub mod geometry;
pub mod io;
pub mod mdp;
pub mod oracle;
pub mod search;
pub mod tolerance;

pub use error::{Error, Result};
pub use mdp::{DeterministicPolicy, Mdp, ReturnPoint, StochasticPolicy, ValueFunction};

pub use search::{FaceRecord, ParetoFront, SearchConfig, SearchStats, VertexRecord};
pub use tolerance::Tolerances;
