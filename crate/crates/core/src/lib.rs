//! Budget-constrained multi-armed bandits with random, possibly correlated
//! and heavy-tailed cost/reward pairs.
//!
//! Each pull of arm `k` yields a pair `(X, R)`; an episode runs until the
//! cumulative cost first exceeds the budget `B`. Policies rank arms by an
//! upper confidence bound on the reward rate `E[R]/E[X]`.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod model;
pub mod policies;
pub mod simulator;

pub use error::{Error, Result};
pub use model::{
    build_instance, ArmSpec, BanditInstance, CostRewardSample, EpisodeResult, Moments,
};
pub use policies::{PolicyConfig, PolicyKind, PolicyState};
pub use simulator::{run_monte_carlo, Execution, RegretCurve, TrialPlan};
