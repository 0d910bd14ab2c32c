//! Admissible policies: the optimal static oracle and the UCB family.
//!
//! Each UCB variant ranks arms by `rate estimate + confidence width`, where
//! the width has the common shape
//!
//! ```text
//! factor * (ε + (rate - ω) η) / (θ̂₁)⁺      if 0 < η < θ̂₁ (λ - 1) / λ
//! +∞                                        otherwise
//! ```
//!
//! with `ε`, `η` the reward and cost deviation radii and `θ̂₁` the cost-mean
//! estimate. Arms with no samples are pulled first, in index order; argmax
//! ties go to the lowest index.

use std::fmt;
use std::str::FromStr;

use crate::distributions::lmmse_weight;
use crate::error::{Error, Result};
use crate::estimators::{
    self, empirical_lmmse, empirical_rate, group_count, sample_variance, stability_ok, ArmStats,
    Dimension, GroupedMeans,
};
use crate::model::{BanditInstance, CostRewardSample};

/// Floor for `(x)⁺` in index denominators.
const POS_FLOOR: f64 = 1e-12;
/// Width multiplier of the empirical-mean policies.
const EMPIRICAL_FACTOR: f64 = 1.4;
/// Width multiplier of the median-of-means policy.
const MEDIAN_FACTOR: f64 = 2.0 * std::f64::consts::SQRT_2;
/// Deviation multiplier in `ε^M`, `η^M`.
const MEDIAN_RADIUS: f64 = 11.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    StaticOracle,
    UcbB1,
    /// UCB-B1 with `ω = 0` and `V = Var(R)`: ignores the correlation.
    UcbB1Uncorrelated,
    UcbM1,
    UcbB2,
    UcbB2C,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::StaticOracle,
        PolicyKind::UcbB1,
        PolicyKind::UcbB1Uncorrelated,
        PolicyKind::UcbM1,
        PolicyKind::UcbB2,
        PolicyKind::UcbB2C,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::StaticOracle => "static-oracle",
            PolicyKind::UcbB1 => "ucb-b1",
            PolicyKind::UcbB1Uncorrelated => "ucb-b1-uncorrelated",
            PolicyKind::UcbM1 => "ucb-m1",
            PolicyKind::UcbB2 => "ucb-b2",
            PolicyKind::UcbB2C => "ucb-b2c",
        }
    }

    /// Whether the policy is handed the true second moments.
    pub fn uses_known_moments(self) -> bool {
        matches!(
            self,
            PolicyKind::UcbB1 | PolicyKind::UcbB1Uncorrelated | PolicyKind::UcbM1
        )
    }

    /// Whether the policy reads the per-sample log (for regrouping).
    pub fn needs_sample_log(self) -> bool {
        self == PolicyKind::UcbM1
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown policy kind `{s}`")))
    }
}

/// Second-moment knowledge handed to UCB-B1 / UCB-M1 for one arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmKnowledge {
    pub omega: f64,
    /// `V(X, R) = min_ω Var(R - ωX)`.
    pub v_min: f64,
    pub var_cost: f64,
    pub var_reward: f64,
}

impl ArmKnowledge {
    /// The same arm seen by a policy that ignores correlation.
    pub fn uncorrelated(self) -> Self {
        Self {
            omega: 0.0,
            v_min: self.var_reward,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConfig {
    pub alpha: f64,
    /// `L`: 2 for bounded arms, 1/2 for Gaussian arms.
    pub confidence_scale: f64,
    pub lambda: f64,
    /// Known lower bound on cost means (`b <= min_k E[X]/2`).
    pub b: f64,
    /// `M_X`.
    pub max_cost: f64,
    /// `M_R`.
    pub max_reward: f64,
    /// `ω̄ > max_k ω_k`, used by UCB-B2C only.
    pub omega_bar: f64,
    pub known: Vec<ArmKnowledge>,
}

pub const DEFAULT_ALPHA: f64 = 2.5;
pub const DEFAULT_LAMBDA: f64 = 1.28;

impl PolicyConfig {
    /// Gaussian-mode defaults (`α = 2.5`, `L = 1/2`, `λ = 1.28`, `M = 0`,
    /// `b = μ_*/2`) with the instance's true moments attached.
    pub fn with_known_moments(instance: &BanditInstance) -> Self {
        let known = instance
            .arms()
            .iter()
            .map(|a| {
                let m = a.moments();
                let l = lmmse_weight(m);
                ArmKnowledge {
                    omega: l.omega,
                    v_min: l.v_min,
                    var_cost: m.var_cost,
                    var_reward: m.var_reward,
                }
            })
            .collect();
        Self {
            alpha: DEFAULT_ALPHA,
            confidence_scale: 0.5,
            lambda: DEFAULT_LAMBDA,
            b: instance.mu_star() / 2.0,
            max_cost: 0.0,
            max_reward: 0.0,
            omega_bar: 0.0,
            known,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.alpha > 2.0) {
            return bad("alpha must exceed 2");
        }
        if !(self.lambda > 1.0) {
            return bad("lambda must exceed 1");
        }
        if !(self.b > 0.0) {
            return bad("b must be positive");
        }
        if !(self.confidence_scale > 0.0) {
            return bad("confidence scale L must be positive");
        }
        if !(self.max_cost >= 0.0 && self.max_reward >= 0.0) {
            return bad("support bounds must be non-negative");
        }
        if !self.omega_bar.is_finite() {
            return bad("omega_bar must be finite");
        }
        Ok(())
    }

    /// `M_Z = M_R + ω̄ M_X`.
    pub fn max_z(&self) -> f64 {
        self.max_reward + self.omega_bar * self.max_cost
    }
}

#[inline]
fn positive(x: f64) -> f64 {
    x.max(POS_FLOOR)
}

/// Stability gate. A zero cost radius means the cost mean is known exactly
/// (deterministic cost), which is stable whenever the mean is positive.
#[inline]
fn gate(eta: f64, theta1: f64, lambda: f64) -> bool {
    if eta == 0.0 {
        theta1 > 0.0
    } else {
        stability_ok(eta, theta1, lambda)
    }
}

/// `rate + factor (ε + correction η) / (θ̂₁)⁺` if the gate passes, else `+∞`.
/// `correction` is `rate - ω` (or its positive part for UCB-B2C).
pub fn gated_index(
    rate: f64,
    correction: f64,
    eps: f64,
    eta: f64,
    theta1: f64,
    factor: f64,
    lambda: f64,
) -> f64 {
    if gate(eta, theta1, lambda) {
        rate + factor * (eps + correction * eta) / positive(theta1)
    } else {
        f64::INFINITY
    }
}

/// UCB-B1 index at global stage `n` (`log_n = ln n`) with known moments.
pub fn ucb_b1_index(stats: &ArmStats, log_n: f64, cfg: &PolicyConfig, know: &ArmKnowledge) -> f64 {
    let Ok(rate) = empirical_rate(stats, cfg.b) else {
        return f64::INFINITY;
    };
    let t = stats.count() as f64;
    let al = cfg.alpha * log_n;
    let eps =
        2.0 * al * cfg.max_reward / (3.0 * t) + (cfg.confidence_scale * al * know.v_min / t).sqrt();
    let eta = 2.0 * al * cfg.max_cost / (3.0 * t)
        + (cfg.confidence_scale * al * know.var_cost / t).sqrt();
    gated_index(
        rate.value,
        rate.value - know.omega,
        eps,
        eta,
        stats.mean_cost(),
        EMPIRICAL_FACTOR,
        cfg.lambda,
    )
}

/// `(ε^M, η^M)` for `T` samples.
fn median_radii(t: f64, log_n: f64, cfg: &PolicyConfig, know: &ArmKnowledge) -> (f64, f64) {
    let al = cfg.alpha * log_n;
    (
        MEDIAN_RADIUS * (al * know.v_min / t).sqrt(),
        MEDIAN_RADIUS * (al * know.var_cost / t).sqrt(),
    )
}

/// UCB-M1 index from a median-of-means estimate `(r̄, median cost mean)`.
pub fn ucb_m1_index_from(
    r_bar: f64,
    median_cost: f64,
    count: usize,
    log_n: f64,
    cfg: &PolicyConfig,
    know: &ArmKnowledge,
) -> f64 {
    let (eps, eta) = median_radii(count as f64, log_n, cfg, know);
    gated_index(
        r_bar,
        r_bar - know.omega,
        eps,
        eta,
        median_cost,
        MEDIAN_FACTOR,
        cfg.lambda,
    )
}

/// UCB-M1 index, regrouping the sample log from scratch. `+∞` while the arm
/// has fewer samples than groups.
pub fn ucb_m1_index(
    stats: &ArmStats,
    n: u64,
    cfg: &PolicyConfig,
    know: &ArmKnowledge,
) -> Result<f64> {
    let m = group_count(n, cfg.alpha);
    if stats.count() < m {
        return Ok(f64::INFINITY);
    }
    let (r_bar, med_x) = estimators::median_of_means_rate(stats, m, cfg.b)?;
    Ok(ucb_m1_index_from(
        r_bar,
        med_x,
        stats.count(),
        (n as f64).ln(),
        cfg,
        know,
    ))
}

/// Empirical-Bernstein radius `sqrt(2 V̂ α ln n / T) + 3 M α ln n / T`.
fn bernstein(var: f64, bound: f64, al_over_t: f64) -> f64 {
    (2.0 * var * al_over_t).sqrt() + 3.0 * bound * al_over_t
}

/// UCB-B2 index: sample variances, no correlation term.
pub fn ucb_b2_index(stats: &ArmStats, log_n: f64, cfg: &PolicyConfig) -> f64 {
    let Ok(rate) = empirical_rate(stats, cfg.b) else {
        return f64::INFINITY;
    };
    let al_t = cfg.alpha * log_n / stats.count() as f64;
    let vx = sample_variance(stats, Dimension::Cost).unwrap_or(0.0);
    let vr = sample_variance(stats, Dimension::Reward).unwrap_or(0.0);
    let eps = bernstein(vr, cfg.max_reward, al_t);
    let eta = bernstein(vx, cfg.max_cost, al_t);
    gated_index(
        rate.value,
        rate.value,
        eps,
        eta,
        stats.mean_cost(),
        EMPIRICAL_FACTOR,
        cfg.lambda,
    )
}

/// UCB-B2C index: empirical LMMSE residual in `ε`, `(r̂ - ω̂)⁺` correction.
/// `+∞` below two samples.
pub fn ucb_b2c_index(stats: &ArmStats, n: u64, cfg: &PolicyConfig) -> f64 {
    let Ok(rate) = empirical_rate(stats, cfg.b) else {
        return f64::INFINITY;
    };
    let max_z = cfg.max_z();
    let Ok(fit) = empirical_lmmse(stats, cfg.max_cost, max_z, n, cfg.alpha) else {
        return f64::INFINITY;
    };
    let al_t = cfg.alpha * (n as f64).ln() / stats.count() as f64;
    let vx = sample_variance(stats, Dimension::Cost).unwrap_or(0.0);
    let eps = bernstein(fit.loss_hat, max_z, al_t);
    let eta = bernstein(vx, cfg.max_cost, al_t);
    gated_index(
        rate.value,
        (rate.value - fit.omega_hat).max(0.0),
        eps,
        eta,
        stats.mean_cost(),
        EMPIRICAL_FACTOR,
        cfg.lambda,
    )
}

/// Everything a policy may condition on: its own past observations.
#[derive(Debug, Clone)]
pub struct PolicyState {
    kind: PolicyKind,
    cfg: PolicyConfig,
    arms: Vec<ArmStats>,
    n: u64,
    k_star: usize,
    groups: Vec<GroupedMeans>,
    m: usize,
}

impl PolicyState {
    pub fn new(kind: PolicyKind, cfg: PolicyConfig, instance: &BanditInstance) -> Result<Self> {
        cfg.validate()?;
        let k = instance.num_arms();
        if kind.uses_known_moments() && cfg.known.len() != k {
            return Err(Error::InvalidParameter(format!(
                "{kind} needs known moments for {k} arms, got {}",
                cfg.known.len()
            )));
        }
        let keep_log = kind.needs_sample_log();
        Ok(Self {
            kind,
            cfg,
            arms: (0..k).map(|_| ArmStats::with_log(keep_log)).collect(),
            n: 0,
            k_star: instance.k_star(),
            groups: if keep_log {
                vec![GroupedMeans::default(); k]
            } else {
                Vec::new()
            },
            m: 0,
        })
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.cfg
    }

    pub fn stage(&self) -> u64 {
        self.n
    }

    pub fn arms(&self) -> &[ArmStats] {
        &self.arms
    }

    /// Current index of arm `k` at the current stage.
    pub fn index(&mut self, k: usize) -> f64 {
        let stats = &self.arms[k];
        if stats.count() == 0 {
            return f64::INFINITY;
        }
        let log_n = (self.n as f64).ln();
        match self.kind {
            PolicyKind::StaticOracle => {
                if k == self.k_star {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            }
            PolicyKind::UcbB1 => ucb_b1_index(stats, log_n, &self.cfg, &self.cfg.known[k]),
            PolicyKind::UcbB1Uncorrelated => {
                ucb_b1_index(stats, log_n, &self.cfg, &self.cfg.known[k].uncorrelated())
            }
            PolicyKind::UcbM1 => {
                if stats.count() < self.m {
                    return f64::INFINITY;
                }
                let (r_bar, med_x) = self.groups[k].estimate(self.cfg.b);
                ucb_m1_index_from(
                    r_bar,
                    med_x,
                    stats.count(),
                    log_n,
                    &self.cfg,
                    &self.cfg.known[k],
                )
            }
            PolicyKind::UcbB2 => ucb_b2_index(stats, log_n, &self.cfg),
            PolicyKind::UcbB2C => ucb_b2c_index(stats, self.n, &self.cfg),
        }
    }

    /// Next arm to pull. Depends only on the observations recorded so far.
    pub fn select_arm(&mut self) -> usize {
        if self.kind == PolicyKind::StaticOracle {
            return self.k_star;
        }
        if let Some(k) = self.arms.iter().position(|a| a.count() == 0) {
            return k;
        }
        let mut best = 0;
        let mut best_index = self.index(0);
        for k in 1..self.arms.len() {
            let v = self.index(k);
            if v > best_index {
                best = k;
                best_index = v;
            }
        }
        best
    }

    /// Records the outcome of pulling arm `k`.
    pub fn observe(&mut self, k: usize, sample: CostRewardSample) {
        self.arms[k].update(sample);
        self.n += 1;
        if self.kind == PolicyKind::UcbM1 {
            let m = group_count(self.n, self.cfg.alpha);
            if m != self.m {
                self.m = m;
                for (g, a) in self.groups.iter_mut().zip(&self.arms) {
                    g.rebuild(a.samples().unwrap_or(&[]), m);
                }
            } else if let Some(log) = self.arms[k].samples() {
                self.groups[k].sync(log);
            }
        }
    }
}

/// Arm chosen by the optimal static policy: always `k*`.
pub fn static_oracle(instance: &BanditInstance) -> usize {
    instance.k_star()
}
