//! Budgeted episodes, Monte Carlo regret curves and log-regret fits.
//!
//! An episode pulls arms until the cumulative cost first exceeds the budget;
//! the crossing pull's reward is kept. Trial `t` at budget index `j` draws
//! from ChaCha8 seeded with `master_seed` on stream `(j << 32) | t`, so a
//! plan's output does not depend on thread count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::distributions::ArmSampler;
use crate::error::{Error, Result};
use crate::model::{BanditInstance, EpisodeResult};
use crate::policies::{PolicyConfig, PolicyKind, PolicyState};

/// Episode cap as a multiple of `B / μ_*`.
pub const CAP_FACTOR: f64 = 100.0;

#[derive(Debug, Clone)]
pub struct TrialPlan {
    pub instance: BanditInstance,
    pub kind: PolicyKind,
    pub config: PolicyConfig,
    /// Strictly positive, ascending.
    pub budgets: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
}

impl TrialPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.budgets.is_empty() {
            return Err(Error::InvalidParameter("no budgets".into()));
        }
        if self.budgets.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::InvalidParameter("budgets must be positive".into()));
        }
        if self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "budgets must be strictly ascending".into(),
            ));
        }
        self.config.validate()
    }
}

/// How trials of one budget point are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

/// The random stream for trial `t` at budget index `j`.
pub fn trial_rng(master_seed: u64, budget_index: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((budget_index as u64) << 32) | (trial as u64 & 0xffff_ffff));
    rng
}

/// Hard pull cap `⌈100 B / μ_*⌉`.
pub fn episode_cap(budget: f64, mu_star: f64) -> u64 {
    ((CAP_FACTOR * budget / mu_star).ceil() as u64).max(1)
}

/// Runs one episode of `policy` at budget `budget`.
pub fn run_episode<R: Rng + ?Sized>(
    instance: &BanditInstance,
    policy: PolicyState,
    budget: f64,
    rng: &mut R,
) -> Result<EpisodeResult> {
    let samplers: Vec<ArmSampler> = instance.arms().iter().map(ArmSampler::new).collect();
    episode(instance, &samplers, policy, budget, rng)
}

fn episode<R: Rng + ?Sized>(
    instance: &BanditInstance,
    samplers: &[ArmSampler],
    mut policy: PolicyState,
    budget: f64,
    rng: &mut R,
) -> Result<EpisodeResult> {
    if !(budget > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "budget must be positive, got {budget}"
        )));
    }
    let cap = episode_cap(budget, instance.mu_star());
    let mut spent = 0.0;
    let mut prior = 0.0;
    let mut reward = 0.0;
    let mut pulls = 0u64;
    while spent <= budget {
        if pulls >= cap {
            return Err(Error::EpisodeCapExceeded { cap, budget });
        }
        let k = policy.select_arm();
        let s = samplers[k].sample(rng);
        prior = spent;
        spent += s.cost;
        reward += s.reward;
        pulls += 1;
        policy.observe(k, s);
    }
    let result = EpisodeResult {
        pulls,
        pulls_per_arm: policy.arms().iter().map(|a| a.count() as u64).collect(),
        total_cost: spent,
        prior_cost: prior,
        total_reward: reward,
        budget,
    };
    if !result.satisfies_stopping_rule() {
        return Err(Error::StoppingRule {
            prior,
            budget,
            total: spent,
        });
    }
    Ok(result)
}

/// All trials of budget index `j`, in trial order.
pub fn run_trials(plan: &TrialPlan, j: usize, exec: Execution) -> Result<Vec<EpisodeResult>> {
    let samplers: Vec<ArmSampler> = plan.instance.arms().iter().map(ArmSampler::new).collect();
    let budget = plan.budgets[j];
    let one = |t: usize| -> Result<EpisodeResult> {
        let policy = PolicyState::new(plan.kind, plan.config.clone(), &plan.instance)?;
        let mut rng = trial_rng(plan.master_seed, j, t);
        episode(&plan.instance, &samplers, policy, budget, &mut rng).map_err(|e| Error::Trial {
            budget_index: j,
            trial: t,
            source: Box::new(e),
        })
    };
    match exec {
        Execution::Sequential => (0..plan.trials).map(one).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..plan.trials).into_par_iter().map(one).collect(),
    }
}

/// Monte Carlo summary at one budget.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetPoint {
    pub budget: f64,
    pub trials: usize,
    pub mean_reward: f64,
    pub stderr_reward: f64,
    pub mean_pulls: f64,
    pub mean_pulls_per_arm: Vec<f64>,
    pub pseudo_regret: f64,
    pub pseudo_regret_stderr: f64,
    /// Mean of `S_N - B`.
    pub overshoot: f64,
    pub overshoot_stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub kind: PolicyKind,
    pub points: Vec<BudgetPoint>,
}

impl RegretCurve {
    pub fn budgets(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.budget).collect()
    }
}

/// Sample mean and standard error (`sd / sqrt(n)`, `sd` with `n - 1`).
pub fn mean_and_stderr(xs: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt())
}

/// Per-episode `Σ_k T_k Δ_k E[X_k]`.
fn episode_pseudo_regret(r: &EpisodeResult, instance: &BanditInstance) -> f64 {
    r.pulls_per_arm
        .iter()
        .enumerate()
        .map(|(k, &t)| t as f64 * instance.gaps()[k] * instance.moments(k).mean_cost)
        .sum()
}

/// Mean over trials of `Σ_k T_k Δ_k E[X_k]`.
pub fn pseudo_regret(results: &[EpisodeResult], instance: &BanditInstance) -> Result<f64> {
    if results.is_empty() {
        return Err(Error::NoSamples);
    }
    Ok(results
        .iter()
        .map(|r| episode_pseudo_regret(r, instance))
        .sum::<f64>()
        / results.len() as f64)
}

pub fn summarize(results: &[EpisodeResult], instance: &BanditInstance) -> BudgetPoint {
    let (mean_reward, stderr_reward) = mean_and_stderr(results.iter().map(|r| r.total_reward));
    let (mean_pulls, _) = mean_and_stderr(results.iter().map(|r| r.pulls as f64));
    let (pseudo, pseudo_se) =
        mean_and_stderr(results.iter().map(|r| episode_pseudo_regret(r, instance)));
    let (overshoot, overshoot_se) = mean_and_stderr(results.iter().map(|r| r.overshoot()));
    let n = results.len() as f64;
    let mean_pulls_per_arm = (0..instance.num_arms())
        .map(|k| {
            results
                .iter()
                .map(|r| r.pulls_per_arm[k] as f64)
                .sum::<f64>()
                / n
        })
        .collect();
    BudgetPoint {
        budget: results.first().map_or(f64::NAN, |r| r.budget),
        trials: results.len(),
        mean_reward,
        stderr_reward,
        mean_pulls,
        mean_pulls_per_arm,
        pseudo_regret: pseudo,
        pseudo_regret_stderr: pseudo_se,
        overshoot,
        overshoot_stderr: overshoot_se,
    }
}

pub fn run_monte_carlo(plan: &TrialPlan) -> Result<RegretCurve> {
    run_monte_carlo_with(plan, Execution::default())
}

/// Runs every budget of the plan. Budgets are processed in order and trial
/// results reduced in trial order.
pub fn run_monte_carlo_with(plan: &TrialPlan, exec: Execution) -> Result<RegretCurve> {
    plan.validate()?;
    let points = (0..plan.budgets.len())
        .map(|j| run_trials(plan, j, exec).map(|rs| summarize(&rs, &plan.instance)))
        .collect::<Result<_>>()?;
    Ok(RegretCurve {
        kind: plan.kind,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretPoint {
    pub budget: f64,
    pub regret: f64,
    /// Root-sum-square of the two reward standard errors.
    pub halfwidth: f64,
}

/// `oracle mean reward - policy mean reward` at each budget.
pub fn empirical_regret(policy: &RegretCurve, oracle: &RegretCurve) -> Result<Vec<RegretPoint>> {
    if policy.points.len() != oracle.points.len()
        || policy
            .points
            .iter()
            .zip(&oracle.points)
            .any(|(a, b)| a.budget != b.budget)
    {
        return Err(Error::BudgetMismatch);
    }
    Ok(policy
        .points
        .iter()
        .zip(&oracle.points)
        .map(|(p, o)| RegretPoint {
            budget: p.budget,
            regret: o.mean_reward - p.mean_reward,
            halfwidth: p.stderr_reward.hypot(o.stderr_reward),
        })
        .collect())
}

/// Least-squares fit `regret ≈ slope · ln B + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual sum of squares.
    pub residual: f64,
    pub r_squared: f64,
}

pub fn log_fit(points: &[(f64, f64)]) -> Result<LogFit> {
    if points.len() < 3 || points.iter().any(|(b, _)| !(*b > 0.0)) {
        return Err(Error::TooFewPoints(points.len()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(b, _)| b.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewPoints(1));
    }
    let sxy: f64 = xs
        .iter()
        .zip(points)
        .map(|(x, p)| (x - mx) * (p.1 - my))
        .sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual: f64 = xs
        .iter()
        .zip(points)
        .map(|(x, p)| (p.1 - slope * x - intercept).powi(2))
        .sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - residual / syy } else { 1.0 };
    Ok(LogFit {
        slope,
        intercept,
        residual,
        r_squared,
    })
}
