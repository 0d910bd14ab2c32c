//! Bandit instance model: arm definitions, the oracle quantities derived
//! from their analytic moments, and episode bookkeeping.
//!
//! Every quantity here is exact. Moments come from the closed forms of each
//! arm family rather than from sampling, so `r_star`, the gaps and `mu_star`
//! are the true values a policy is measured against.

use std::fmt;

use crate::distributions::{self, ArmFamily};
use crate::error::{Error, Result};
use crate::policies::{PolicyConfig, PolicyKind};

/// One observed `(cost, reward)` pair from an arm pull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostRewardSample {
    pub cost: f64,
    pub reward: f64,
}

impl CostRewardSample {
    pub fn new(cost: f64, reward: f64) -> Result<Self> {
        if !cost.is_finite() || !reward.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sample must be finite, got ({cost}, {reward})"
            )));
        }
        Ok(Self { cost, reward })
    }
}

/// First and second moments of one arm's cost/reward pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_cost: f64,
    pub mean_reward: f64,
    pub var_cost: f64,
    pub var_reward: f64,
    pub cov: f64,
}

impl Moments {
    pub fn new(mean_cost: f64, mean_reward: f64, var_cost: f64, var_reward: f64, cov: f64) -> Self {
        Self {
            mean_cost,
            mean_reward,
            var_cost,
            var_reward,
            cov,
        }
    }

    /// Reward rate `E[R] / E[X]`.
    pub fn rate(&self) -> f64 {
        self.mean_reward / self.mean_cost
    }

    fn check(&self) -> Result<()> {
        let all = [
            self.mean_cost,
            self.mean_reward,
            self.var_cost,
            self.var_reward,
            self.cov,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance(format!(
                "non-finite moments {self:?}"
            )));
        }
        if self.mean_cost <= 0.0 {
            return Err(Error::InvalidInstance(format!(
                "mean cost must be positive, got {}",
                self.mean_cost
            )));
        }
        if self.var_cost < 0.0 || self.var_reward < 0.0 {
            return Err(Error::InvalidInstance("negative variance".into()));
        }
        let bound = self.var_cost * self.var_reward;
        if self.cov * self.cov > bound * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::InvalidInstance(format!(
                "cov^2 = {} exceeds var_cost * var_reward = {bound}",
                self.cov * self.cov
            )));
        }
        Ok(())
    }
}

/// Almost-sure support bounds: `|X| <= max_cost`, `|R| <= max_reward`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportBounds {
    pub max_cost: f64,
    pub max_reward: f64,
}

/// One arm: its distribution family, analytic moments and optional support bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSpec {
    family: ArmFamily,
    moments: Moments,
    bounds: Option<SupportBounds>,
}

impl ArmSpec {
    /// Validates the family parameters and attaches the implied moments.
    pub fn new(family: ArmFamily) -> Result<Self> {
        let moments = distributions::analytic_moments(&family)?;
        let bounds = distributions::support_bounds(&family);
        Ok(Self {
            family,
            moments,
            bounds,
        })
    }

    pub fn family(&self) -> &ArmFamily {
        &self.family
    }

    pub fn moments(&self) -> &Moments {
        &self.moments
    }

    pub fn bounds(&self) -> Option<SupportBounds> {
        self.bounds
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.family, ArmFamily::JointGaussian(_))
    }
}

/// A set of arms and the oracle quantities derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    arms: Vec<ArmSpec>,
    rates: Vec<f64>,
    r_star: f64,
    k_star: usize,
    gaps: Vec<f64>,
    mu_star: f64,
}

impl BanditInstance {
    pub fn arms(&self) -> &[ArmSpec] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn moments(&self, k: usize) -> &Moments {
        self.arms[k].moments()
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn r_star(&self) -> f64 {
        self.r_star
    }

    pub fn k_star(&self) -> usize {
        self.k_star
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn mu_star(&self) -> f64 {
        self.mu_star
    }

    pub fn all_gaussian(&self) -> bool {
        self.arms.iter().all(ArmSpec::is_gaussian)
    }
}

/// Builds an instance, computing `r*`, `k*` (lowest index on ties), the gaps
/// `r* - r_k` and `mu_* = min_k E[X_k]`.
pub fn build_instance(arms: Vec<ArmSpec>) -> Result<BanditInstance> {
    if arms.len() < 2 {
        return Err(Error::InvalidInstance(format!(
            "need at least 2 arms, got {}",
            arms.len()
        )));
    }
    for (k, arm) in arms.iter().enumerate() {
        arm.moments
            .check()
            .map_err(|e| Error::InvalidInstance(format!("arm {k}: {e}")))?;
    }
    let rates: Vec<f64> = arms.iter().map(|a| a.moments.rate()).collect();
    let mut k_star = 0;
    for (k, &r) in rates.iter().enumerate() {
        if r > rates[k_star] {
            k_star = k;
        }
    }
    let r_star = rates[k_star];
    let gaps = rates.iter().map(|&r| r_star - r).collect();
    let mu_star = arms
        .iter()
        .map(|a| a.moments.mean_cost)
        .fold(f64::INFINITY, f64::min);
    Ok(BanditInstance {
        arms,
        rates,
        r_star,
        k_star,
        gaps,
        mu_star,
    })
}

/// A mismatch between a policy's assumptions and the instance it runs on.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    MissingSupportBounds {
        arm: usize,
    },
    BoundsExceedConfig {
        arm: usize,
    },
    NotJointlyGaussian {
        arm: usize,
    },
    OmegaExceedsRate {
        arm: usize,
        omega: f64,
        rate: f64,
    },
    CorrelatedArm {
        arm: usize,
        cov: f64,
    },
    OmegaBarTooSmall {
        arm: usize,
        omega: f64,
        omega_bar: f64,
    },
    CostFloorTooLarge {
        b: f64,
        limit: f64,
    },
    KnowledgeMismatch {
        expected: usize,
        got: usize,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::MissingSupportBounds { arm } => {
                write!(f, "arm {arm}: missing support bounds")
            }
            Diagnostic::BoundsExceedConfig { arm } => {
                write!(f, "arm {arm}: support bounds exceed configured M_X/M_R")
            }
            Diagnostic::NotJointlyGaussian { arm } => {
                write!(
                    f,
                    "arm {arm}: not jointly Gaussian (Gaussian-mode confidence widths)"
                )
            }
            Diagnostic::OmegaExceedsRate { arm, omega, rate } => {
                write!(f, "arm {arm}: ω exceeds reward rate ({omega} > {rate})")
            }
            Diagnostic::CorrelatedArm { arm, cov } => {
                write!(f, "arm {arm}: correlated cost/reward (cov = {cov}) under an uncorrelated algorithm")
            }
            Diagnostic::OmegaBarTooSmall {
                arm,
                omega,
                omega_bar,
            } => write!(
                f,
                "arm {arm}: omega_bar {omega_bar} does not exceed ω = {omega}"
            ),
            Diagnostic::CostFloorTooLarge { b, limit } => {
                write!(f, "b = {b} exceeds min_k E[X]/2 = {limit}")
            }
            Diagnostic::KnowledgeMismatch { expected, got } => {
                write!(
                    f,
                    "known moments given for {got} arms, instance has {expected}"
                )
            }
        }
    }
}

/// Lists every assumption of `kind` (under `cfg`) the instance does not meet.
/// Never fails; an empty list means no violations were found.
pub fn validate_assumptions(
    instance: &BanditInstance,
    kind: PolicyKind,
    cfg: &PolicyConfig,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if kind == PolicyKind::StaticOracle {
        return out;
    }
    let limit = instance.mu_star() / 2.0;
    if cfg.b > limit {
        out.push(Diagnostic::CostFloorTooLarge { b: cfg.b, limit });
    }
    let bounded_mode = cfg.max_cost > 0.0 || cfg.max_reward > 0.0;
    let needs_bounds = match kind {
        PolicyKind::UcbB1 | PolicyKind::UcbB1Uncorrelated => bounded_mode,
        PolicyKind::UcbB2 | PolicyKind::UcbB2C => true,
        PolicyKind::UcbM1 | PolicyKind::StaticOracle => false,
    };
    if kind.uses_known_moments() && cfg.known.len() != instance.num_arms() {
        out.push(Diagnostic::KnowledgeMismatch {
            expected: instance.num_arms(),
            got: cfg.known.len(),
        });
    }
    for (k, arm) in instance.arms().iter().enumerate() {
        let m = arm.moments();
        let lmmse = distributions::lmmse_weight(m);
        if needs_bounds {
            match arm.bounds() {
                None => out.push(Diagnostic::MissingSupportBounds { arm: k }),
                Some(bd) => {
                    if bd.max_cost > cfg.max_cost || bd.max_reward > cfg.max_reward {
                        out.push(Diagnostic::BoundsExceedConfig { arm: k });
                    }
                }
            }
        }
        let gaussian_mode =
            matches!(kind, PolicyKind::UcbB1 | PolicyKind::UcbB1Uncorrelated) && !bounded_mode;
        if gaussian_mode
            && !arm.is_gaussian()
            && !matches!(arm.family(), ArmFamily::DeterministicCost(_))
        {
            out.push(Diagnostic::NotJointlyGaussian { arm: k });
        }
        if matches!(kind, PolicyKind::UcbB1 | PolicyKind::UcbM1) && lmmse.omega > m.rate() {
            out.push(Diagnostic::OmegaExceedsRate {
                arm: k,
                omega: lmmse.omega,
                rate: m.rate(),
            });
        }
        if kind == PolicyKind::UcbB2 && m.cov != 0.0 {
            out.push(Diagnostic::CorrelatedArm { arm: k, cov: m.cov });
        }
        if kind == PolicyKind::UcbB2C && !(cfg.omega_bar > lmmse.omega) {
            out.push(Diagnostic::OmegaBarTooSmall {
                arm: k,
                omega: lmmse.omega,
                omega_bar: cfg.omega_bar,
            });
        }
    }
    out
}

/// Outcome of one budgeted episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    /// Stopping time `N`.
    pub pulls: u64,
    pub pulls_per_arm: Vec<u64>,
    /// `S_N`.
    pub total_cost: f64,
    /// `S_(N-1)`, the spend before the crossing pull.
    pub prior_cost: f64,
    pub total_reward: f64,
    pub budget: f64,
}

impl EpisodeResult {
    pub fn overshoot(&self) -> f64 {
        self.total_cost - self.budget
    }

    /// `S_(N-1) <= B < S_N` and the per-arm counts add up.
    pub fn satisfies_stopping_rule(&self) -> bool {
        self.prior_cost <= self.budget
            && self.total_cost > self.budget
            && self.pulls_per_arm.iter().sum::<u64>() == self.pulls
    }
}
