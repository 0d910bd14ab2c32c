//! Estimators used inside the policies.
//!
//! All variances are population-style (divide by `T`). Logarithms are natural;
//! `log(n^α)` is always evaluated as `α ln n`.

use crate::error::{Error, Result};
use crate::model::CostRewardSample;

/// Floor applied to the sample cost variance in the `ν_ω` radius.
pub const VAR_FLOOR: f64 = 1e-6;

/// Running sufficient statistics for one arm.
///
/// Alongside the raw sums the struct keeps sums shifted by the first sample,
/// which is what the variance estimates are computed from. Constant data then
/// gives an exact zero variance.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmStats {
    count: usize,
    sum_cost: f64,
    sum_reward: f64,
    sum_cost_sq: f64,
    sum_reward_sq: f64,
    sum_cross: f64,
    origin: (f64, f64),
    shifted: [f64; 5],
    samples: Option<Vec<CostRewardSample>>,
}

impl Default for ArmStats {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Cost,
    Reward,
}

impl ArmStats {
    /// Empty statistics that retain the full sample log.
    pub fn new() -> Self {
        Self::with_log(true)
    }

    /// Empty statistics; `keep_log = false` drops the per-sample log and keeps
    /// only the sums.
    pub fn with_log(keep_log: bool) -> Self {
        Self {
            count: 0,
            sum_cost: 0.0,
            sum_reward: 0.0,
            sum_cost_sq: 0.0,
            sum_reward_sq: 0.0,
            sum_cross: 0.0,
            origin: (0.0, 0.0),
            shifted: [0.0; 5],
            samples: keep_log.then(Vec::new),
        }
    }

    pub fn from_samples(samples: &[CostRewardSample]) -> Self {
        let mut s = Self::new();
        for &x in samples {
            s.update(x);
        }
        s
    }

    #[inline]
    pub fn update(&mut self, s: CostRewardSample) {
        if self.count == 0 {
            self.origin = (s.cost, s.reward);
        }
        self.count += 1;
        self.sum_cost += s.cost;
        self.sum_reward += s.reward;
        self.sum_cost_sq += s.cost * s.cost;
        self.sum_reward_sq += s.reward * s.reward;
        self.sum_cross += s.cost * s.reward;
        let dx = s.cost - self.origin.0;
        let dr = s.reward - self.origin.1;
        self.shifted[0] += dx;
        self.shifted[1] += dr;
        self.shifted[2] += dx * dx;
        self.shifted[3] += dr * dr;
        self.shifted[4] += dx * dr;
        if let Some(log) = self.samples.as_mut() {
            log.push(s);
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn sum_cost(&self) -> f64 {
        self.sum_cost
    }

    pub fn sum_reward(&self) -> f64 {
        self.sum_reward
    }

    pub fn sum_cost_sq(&self) -> f64 {
        self.sum_cost_sq
    }

    pub fn sum_reward_sq(&self) -> f64 {
        self.sum_reward_sq
    }

    pub fn sum_cross(&self) -> f64 {
        self.sum_cross
    }

    /// The sample log in pull order, or `None` if it is not retained.
    pub fn samples(&self) -> Option<&[CostRewardSample]> {
        self.samples.as_deref()
    }

    pub fn mean_cost(&self) -> f64 {
        self.sum_cost / self.count as f64
    }

    pub fn mean_reward(&self) -> f64 {
        self.sum_reward / self.count as f64
    }

    fn central(&self) -> (f64, f64, f64) {
        let t = self.count as f64;
        let [dx, dr, dxx, drr, dxr] = self.shifted;
        let (mx, mr) = (dx / t, dr / t);
        (
            (dxx / t - mx * mx).max(0.0),
            (drr / t - mr * mr).max(0.0),
            dxr / t - mx * mr,
        )
    }
}

/// `r̂ = max{0, Ê[R]} / max{b, Ê[X]}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub value: f64,
    /// The denominator `max{b, Ê[X]}` actually used.
    pub denom: f64,
    /// `true` when `Ê[X] >= b`, i.e. the floor did not bind.
    pub stable: bool,
}

pub fn empirical_rate(stats: &ArmStats, b: f64) -> Result<RateEstimate> {
    if stats.count == 0 {
        return Err(Error::NoSamples);
    }
    let mean_x = stats.mean_cost();
    let denom = mean_x.max(b);
    Ok(RateEstimate {
        value: stats.mean_reward().max(0.0) / denom,
        denom,
        stable: mean_x >= b,
    })
}

/// `0 < η < θ̂₁ (λ - 1) / λ`.
pub fn stability_ok(eta: f64, theta1_estimate: f64, lambda: f64) -> bool {
    eta > 0.0 && eta < theta1_estimate * (lambda - 1.0) / lambda
}

pub fn sample_variance(stats: &ArmStats, dim: Dimension) -> Result<f64> {
    if stats.count == 0 {
        return Err(Error::NoSamples);
    }
    let (vx, vr, _) = stats.central();
    Ok(match dim {
        Dimension::Cost => vx,
        Dimension::Reward => vr,
    })
}

/// Population-style sample covariance of cost and reward.
pub fn sample_covariance(stats: &ArmStats) -> Result<f64> {
    if stats.count == 0 {
        return Err(Error::NoSamples);
    }
    Ok(stats.central().2)
}

/// Empirical LMMSE fit `ω̂ = argmin_ω L̂(ω)` with its concentration radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmmseFit {
    pub omega_hat: f64,
    /// `L̂(ω̂)`.
    pub loss_hat: f64,
    pub nu_omega: f64,
    pub nu_loss: f64,
}

/// Closed-form minimizer of `L̂(ω) = V̂(R) - 2ω Ĉov + ω² V̂(X)`.
pub fn empirical_lmmse(
    stats: &ArmStats,
    max_cost: f64,
    max_z: f64,
    n: u64,
    alpha: f64,
) -> Result<LmmseFit> {
    if stats.count < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            have: stats.count,
        });
    }
    let (vx, vr, cov) = stats.central();
    let (omega_hat, loss_hat) = if vx > 0.0 {
        let w = cov / vx;
        (w, (vr - w * cov).max(0.0))
    } else {
        (0.0, vr)
    };
    let t = stats.count as f64;
    let log_term = alpha * (n.max(1) as f64).ln() / t;
    Ok(LmmseFit {
        omega_hat,
        loss_hat,
        nu_omega: 1.36 * max_cost * max_z / vx.max(VAR_FLOOR) * log_term.sqrt(),
        nu_loss: max_z * max_z * (2.0 * log_term).sqrt(),
    })
}

/// `m = ⌊3.5 α ln n⌋ + 1`.
pub fn group_count(n: u64, alpha: f64) -> usize {
    group_count_from_log((n.max(1) as f64).ln(), alpha)
}

/// [`group_count`] evaluated at a given `ln n`.
pub fn group_count_from_log(log_n: f64, alpha: f64) -> usize {
    (3.5 * alpha * log_n).floor() as usize + 1
}

fn lower_median(v: &mut [f64]) -> f64 {
    let k = (v.len() - 1) / 2;
    let (_, mid, _) = v.select_nth_unstable_by(k, f64::total_cmp);
    *mid
}

/// Median-of-means rate estimate with `m` groups.
///
/// Sample `i` (pull order, 0-based) goes to group `i mod m`; only the first
/// `⌊T/m⌋·m` samples are used so every group has `⌊T/m⌋` members. Returns
/// `(median of group rates, median of group cost means)`; even-length medians
/// take the lower middle element.
pub fn median_of_means_rate(stats: &ArmStats, m: usize, b: f64) -> Result<(f64, f64)> {
    if m == 0 || stats.count < m {
        return Err(Error::InsufficientForGrouping {
            groups: m,
            have: stats.count,
        });
    }
    let log = stats
        .samples()
        .ok_or_else(|| Error::InvalidParameter("sample log not retained".into()))?;
    let mut g = GroupedMeans::default();
    g.rebuild(log, m);
    Ok(g.estimate(b))
}

/// Incrementally maintained group sums for median-of-means.
///
/// Groups only change when a full row of `m` samples completes or when `m`
/// changes, so the median is cached between those events. Sums are
/// accumulated in the same order as a from-scratch regrouping, which makes
/// the two bit-identical.
#[derive(Debug, Clone, Default)]
pub struct GroupedMeans {
    m: usize,
    rows: usize,
    sums: Vec<(f64, f64)>,
    cached: Option<(f64, f64)>,
    scratch: Vec<f64>,
}

impl GroupedMeans {
    pub fn groups(&self) -> usize {
        self.m
    }

    /// Regroups `log` into `m` groups from scratch.
    pub fn rebuild(&mut self, log: &[CostRewardSample], m: usize) {
        self.m = m;
        self.rows = 0;
        self.sums.clear();
        self.sums.resize(m, (0.0, 0.0));
        self.cached = None;
        self.sync(log);
    }

    /// Folds in any rows completed since the last call.
    pub fn sync(&mut self, log: &[CostRewardSample]) {
        if self.m == 0 {
            return;
        }
        let full = log.len() / self.m;
        while self.rows < full {
            let row = &log[self.rows * self.m..(self.rows + 1) * self.m];
            for (acc, s) in self.sums.iter_mut().zip(row) {
                acc.0 += s.cost;
                acc.1 += s.reward;
            }
            self.rows += 1;
            self.cached = None;
        }
    }

    /// `(r̄, median cost mean)`; requires at least one complete row.
    pub fn estimate(&mut self, b: f64) -> (f64, f64) {
        if let Some(c) = self.cached {
            return c;
        }
        let s = self.rows as f64;
        self.scratch.clear();
        self.scratch.extend(
            self.sums
                .iter()
                .map(|&(sx, sr)| (sr / s).max(0.0) / (sx / s).max(b)),
        );
        let r_bar = lower_median(&mut self.scratch);
        self.scratch.clear();
        self.scratch.extend(self.sums.iter().map(|&(sx, _)| sx / s));
        let med_x = lower_median(&mut self.scratch);
        self.cached = Some((r_bar, med_x));
        (r_bar, med_x)
    }
}
