//! Closed-form regret coefficients.
//!
//! Upper-bound coefficients multiply `α ln(2B/μ_*)`; the Gaussian lower
//! bound coefficient multiplies `ln B`. Additive `O(1)` terms are not
//! reported.

use crate::distributions::{lmmse_weight, sigma_squared};
use crate::error::{Error, Result};
use crate::model::{BanditInstance, Moments};
use crate::policies::{PolicyConfig, PolicyKind};

/// Provenance of the UCB-M1 constant, shown wherever the number is reported.
pub const M1_CONSTANT_LABEL: &str = "C = 484*lambda^2 (median-of-means pull-count lemma)";

fn suboptimal(instance: &BanditInstance, k: usize) -> Result<(f64, &Moments)> {
    let gap = instance.gaps()[k];
    if gap <= 0.0 {
        return Err(Error::OptimalArm(k));
    }
    Ok((gap, instance.moments(k)))
}

/// `σ_k²` computed as if cost and reward were uncorrelated (`ω = 0`, `V = Var R`).
pub fn sigma_squared_uncorrelated(m: &Moments, r_star: f64) -> f64 {
    m.var_reward + r_star * r_star * m.var_cost
}

fn b1_bounded_with_sigma(
    instance: &BanditInstance,
    k: usize,
    sigma2: f64,
    max_cost: f64,
    max_reward: f64,
) -> Result<f64> {
    let (gap, m) = suboptimal(instance, k)?;
    let m_k = max_reward + instance.rates()[k] * max_cost;
    Ok(42.0 * sigma2 / (gap * m.mean_cost) + 42.0 * m_k + 21.0 * max_cost * gap)
}

/// `C_k^B1 = 42σ²/(Δ E[X]) + 42 M_k + 21 M_X Δ` with `M_k = M_R + r_k M_X`.
pub fn coeff_ucb_b1_bounded(
    instance: &BanditInstance,
    k: usize,
    max_cost: f64,
    max_reward: f64,
) -> Result<f64> {
    let sigma2 = sigma_squared(instance.moments(k), instance.r_star());
    b1_bounded_with_sigma(instance, k, sigma2, max_cost, max_reward)
}

/// `11 σ² / (Δ E[X])`.
pub fn coeff_ucb_b1_gaussian(instance: &BanditInstance, k: usize) -> Result<f64> {
    let (gap, m) = suboptimal(instance, k)?;
    Ok(11.0 * sigma_squared(m, instance.r_star()) / (gap * m.mean_cost))
}

/// Gaussian-mode coefficient of the correlation-ignoring ablation.
pub fn coeff_ucb_b1_gaussian_uncorrelated(instance: &BanditInstance, k: usize) -> Result<f64> {
    let (gap, m) = suboptimal(instance, k)?;
    Ok(11.0 * sigma_squared_uncorrelated(m, instance.r_star()) / (gap * m.mean_cost))
}

/// Pull bound times per-pull regret `Δ E[X]`:
/// `484λ²σ²/(Δ E[X]) + 135 (λ/(λ-1))² Var(X) Δ / E[X]`.
pub fn coeff_ucb_m1(instance: &BanditInstance, k: usize, lambda: f64) -> Result<f64> {
    let (gap, m) = suboptimal(instance, k)?;
    let mu = m.mean_cost;
    let sigma2 = sigma_squared(m, instance.r_star());
    let ratio = lambda / (lambda - 1.0);
    let pulls_gap = 484.0 * lambda * lambda * sigma2 / (gap * gap * mu * mu);
    let pulls_stab = 135.0 * ratio * ratio * m.var_cost / (mu * mu);
    Ok((pulls_gap + pulls_stab) * gap * mu)
}

/// `δC_k = 21 (M_X⁴ Δ μ / Var²(X) + Var(X) Δ / μ)`.
pub fn coeff_extra_b2(instance: &BanditInstance, k: usize, max_cost: f64) -> Result<f64> {
    let (gap, m) = suboptimal(instance, k)?;
    if m.var_cost <= 0.0 {
        return Err(Error::ZeroCostVariance(k));
    }
    let mu = m.mean_cost;
    Ok(21.0 * (max_cost.powi(4) * gap * mu / m.var_cost.powi(2) + m.var_cost * gap / mu))
}

/// `δC'_k = δC_k + 42 (M_Z M_X / sqrt(Var X) + M_X⁴ Δ μ / Var²(X))`,
/// `M_Z = M_R + ω̄ M_X`.
pub fn coeff_extra_b2c(
    instance: &BanditInstance,
    k: usize,
    max_cost: f64,
    max_reward: f64,
    omega_bar: f64,
) -> Result<f64> {
    let base = coeff_extra_b2(instance, k, max_cost)?;
    let (gap, m) = suboptimal(instance, k)?;
    let max_z = max_reward + omega_bar * max_cost;
    Ok(base
        + 42.0
            * (max_z * max_cost / m.var_cost.sqrt()
                + max_cost.powi(4) * gap * m.mean_cost / m.var_cost.powi(2)))
}

/// Per-arm Gaussian lower-bound term `σ² / (E[X] Δ)`.
pub fn lower_coeff_arm(instance: &BanditInstance, k: usize) -> Result<f64> {
    let (gap, m) = suboptimal(instance, k)?;
    Ok(sigma_squared(m, instance.r_star()) / (m.mean_cost * gap))
}

/// `Σ_{k: Δ>0} σ²/(E[X] Δ)` and `D_k* = (E[X] Δ)² / (2σ²)` per arm
/// (zero for arms with `Δ = 0`).
pub fn gaussian_lower_bound(instance: &BanditInstance) -> Result<(f64, Vec<f64>)> {
    if let Some(k) = instance.arms().iter().position(|a| !a.is_gaussian()) {
        return Err(Error::NotGaussian(k));
    }
    let mut total = 0.0;
    let mut d_star = Vec::with_capacity(instance.num_arms());
    for k in 0..instance.num_arms() {
        let gap = instance.gaps()[k];
        if gap > 0.0 {
            let m = instance.moments(k);
            let sigma2 = sigma_squared(m, instance.r_star());
            total += sigma2 / (m.mean_cost * gap);
            d_star.push((m.mean_cost * gap).powi(2) / (2.0 * sigma2));
        } else {
            d_star.push(0.0);
        }
    }
    Ok((total, d_star))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmBound {
    pub arm: usize,
    pub gap: f64,
    pub sigma2: f64,
    pub omega: f64,
    /// Multiplier of `α ln(2B/μ_*)`; `None` for the optimal arm or where the
    /// formula is undefined.
    pub upper_coeff: Option<f64>,
    pub d_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: PolicyKind,
    pub arms: Vec<ArmBound>,
    /// `Σ_k` of the per-arm upper coefficients; `None` if any is undefined.
    pub upper_coeff: Option<f64>,
    /// Gaussian lower-bound coefficient of `ln B`; `None` for non-Gaussian instances.
    pub lower_coeff: Option<f64>,
    pub mu_star: f64,
    pub alpha: f64,
    pub label: Option<&'static str>,
}

impl BoundReport {
    /// `α · upper_coeff · ln(2B/μ_*)`.
    pub fn upper_bound_at(&self, budget: f64) -> Option<f64> {
        self.upper_coeff
            .map(|c| self.alpha * c * (2.0 * budget / self.mu_star).ln())
    }

    /// The slope window `[lower_coeff, α · upper_coeff]` a log-fit should land in.
    pub fn brackets(&self, slope: f64) -> Option<bool> {
        if self.kind == PolicyKind::StaticOracle {
            return None;
        }
        if self.lower_coeff.is_none() && self.upper_coeff.is_none() {
            return None;
        }
        let lo = self.lower_coeff.is_none_or(|l| slope >= l);
        let hi = self.upper_coeff.is_none_or(|u| slope <= self.alpha * u);
        Some(lo && hi)
    }
}

fn arm_upper(
    instance: &BanditInstance,
    k: usize,
    kind: PolicyKind,
    cfg: &PolicyConfig,
) -> Result<f64> {
    let bounded = cfg.max_cost > 0.0 || cfg.max_reward > 0.0;
    match kind {
        PolicyKind::StaticOracle => Ok(0.0),
        PolicyKind::UcbB1 if bounded => {
            coeff_ucb_b1_bounded(instance, k, cfg.max_cost, cfg.max_reward)
        }
        PolicyKind::UcbB1 => coeff_ucb_b1_gaussian(instance, k),
        PolicyKind::UcbB1Uncorrelated if bounded => {
            let s = sigma_squared_uncorrelated(instance.moments(k), instance.r_star());
            b1_bounded_with_sigma(instance, k, s, cfg.max_cost, cfg.max_reward)
        }
        PolicyKind::UcbB1Uncorrelated => coeff_ucb_b1_gaussian_uncorrelated(instance, k),
        PolicyKind::UcbM1 => coeff_ucb_m1(instance, k, cfg.lambda),
        PolicyKind::UcbB2 => Ok(
            coeff_ucb_b1_bounded(instance, k, cfg.max_cost, cfg.max_reward)?
                + coeff_extra_b2(instance, k, cfg.max_cost)?,
        ),
        PolicyKind::UcbB2C => Ok(
            coeff_ucb_b1_bounded(instance, k, cfg.max_cost, cfg.max_reward)?
                + coeff_extra_b2c(instance, k, cfg.max_cost, cfg.max_reward, cfg.omega_bar)?,
        ),
    }
}

/// Evaluates every coefficient that applies to `kind` under `cfg`.
pub fn bound_report(
    instance: &BanditInstance,
    kind: PolicyKind,
    cfg: &PolicyConfig,
) -> BoundReport {
    let lower = gaussian_lower_bound(instance).ok();
    let mut arms = Vec::with_capacity(instance.num_arms());
    let mut total = Some(0.0);
    for k in 0..instance.num_arms() {
        let m = instance.moments(k);
        let gap = instance.gaps()[k];
        let upper = if gap > 0.0 {
            arm_upper(instance, k, kind, cfg).ok()
        } else {
            None
        };
        if gap > 0.0 {
            total = match (total, upper) {
                (Some(t), Some(u)) => Some(t + u),
                _ => None,
            };
        }
        arms.push(ArmBound {
            arm: k,
            gap,
            sigma2: sigma_squared(m, instance.r_star()),
            omega: lmmse_weight(m).omega,
            upper_coeff: upper,
            d_star: lower.as_ref().map(|(_, d)| d[k]),
        });
    }
    BoundReport {
        kind,
        arms,
        upper_coeff: total,
        lower_coeff: lower.map(|(c, _)| c),
        mu_star: instance.mu_star(),
        alpha: cfg.alpha,
        label: (kind == PolicyKind::UcbM1).then_some(M1_CONSTANT_LABEL),
    }
}
