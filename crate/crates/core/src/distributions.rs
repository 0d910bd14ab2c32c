//! Arm families, their samplers and closed-form moments, and the LMMSE
//! quantities derived from second moments.
//!
//! Four families cover the regimes of interest:
//!
//! * `JointGaussian`: correlated Gaussian pair, costs may be negative.
//! * `BoundedCorrelated`: a finite grid of atoms inside `[0, M_X] x [0, M_R]`.
//! * `ParetoCost`: Pareto cost with tail index `a > 2` and reward
//!   `rho * cost + U`, `U` uniform, centered, of variance `s^2`.
//! * `DeterministicCost`: a point mass.
//!
//! Sampling is a pure function of the random stream. Gaussian pairs use two
//! standard normals pushed through the lower Cholesky factor of the covariance;
//! Pareto costs use the inverse CDF `x_m * U^(-1/a)`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{ArmSpec, CostRewardSample, Moments, SupportBounds};

/// Diagonal tolerance below which a Cholesky pivot is treated as zero.
const CHOLESKY_JITTER: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParams {
    /// `(E[X], E[R])`.
    pub mean: [f64; 2],
    /// `[[Var X, Cov], [Cov, Var R]]`.
    pub covariance: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub cost: f64,
    pub reward: f64,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundedCorrelatedParams {
    pub max_cost: f64,
    pub max_reward: f64,
    pub atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoCostParams {
    pub tail_index: f64,
    pub scale: f64,
    /// `rho` in `reward = rho * cost + noise`.
    pub reward_slope: f64,
    /// Standard deviation of the uniform reward noise.
    pub noise_std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterministicParams {
    pub cost: f64,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArmFamily {
    JointGaussian(GaussianParams),
    BoundedCorrelated(BoundedCorrelatedParams),
    ParetoCost(ParetoCostParams),
    DeterministicCost(DeterministicParams),
}

/// LMMSE weight `ω = Cov/Var(X)` and residual variance `V = min_ω Var(R - ωX)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmmseSummary {
    pub omega: f64,
    pub v_min: f64,
}

fn finite(vals: &[f64], what: &str) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArm(format!(
            "{what}: parameters must be finite"
        )))
    }
}

/// Exact first and second moments for a family; also validates its parameters.
pub fn analytic_moments(family: &ArmFamily) -> Result<Moments> {
    match family {
        ArmFamily::JointGaussian(p) => {
            let [[vx, c01], [c10, vr]] = p.covariance;
            finite(&[p.mean[0], p.mean[1], vx, c01, c10, vr], "gaussian")?;
            if (c01 - c10).abs() > 1e-12 * (1.0 + c01.abs()) {
                return Err(Error::InvalidArm(
                    "gaussian: covariance not symmetric".into(),
                ));
            }
            if vx < 0.0 || vr < 0.0 || c01 * c01 > vx * vr * (1.0 + 1e-12) + CHOLESKY_JITTER {
                return Err(Error::InvalidArm(
                    "gaussian: covariance not positive semi-definite".into(),
                ));
            }
            if p.mean[0] <= 0.0 {
                return Err(Error::InvalidArm(
                    "gaussian: mean cost must be positive".into(),
                ));
            }
            Ok(Moments::new(p.mean[0], p.mean[1], vx, vr, c01))
        }
        ArmFamily::BoundedCorrelated(p) => {
            finite(&[p.max_cost, p.max_reward], "bounded")?;
            if p.atoms.is_empty() {
                return Err(Error::InvalidArm("bounded: no atoms".into()));
            }
            let mut total = 0.0;
            for a in &p.atoms {
                finite(&[a.cost, a.reward, a.prob], "bounded")?;
                if a.prob < 0.0 {
                    return Err(Error::InvalidArm("bounded: negative probability".into()));
                }
                if a.cost < 0.0 || a.cost > p.max_cost || a.reward < 0.0 || a.reward > p.max_reward
                {
                    return Err(Error::InvalidArm(format!(
                        "bounded: atom ({}, {}) outside [0, {}] x [0, {}]",
                        a.cost, a.reward, p.max_cost, p.max_reward
                    )));
                }
                total += a.prob;
            }
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArm(format!(
                    "bounded: probabilities sum to {total}, not 1"
                )));
            }
            let mx: f64 = p.atoms.iter().map(|a| a.prob * a.cost).sum();
            let mr: f64 = p.atoms.iter().map(|a| a.prob * a.reward).sum();
            if mx <= 0.0 {
                return Err(Error::InvalidArm(
                    "bounded: mean cost must be positive".into(),
                ));
            }
            let vx = p.atoms.iter().map(|a| a.prob * (a.cost - mx).powi(2)).sum();
            let vr = p
                .atoms
                .iter()
                .map(|a| a.prob * (a.reward - mr).powi(2))
                .sum();
            let cov = p
                .atoms
                .iter()
                .map(|a| a.prob * (a.cost - mx) * (a.reward - mr))
                .sum();
            Ok(Moments::new(mx, mr, vx, vr, cov))
        }
        ArmFamily::ParetoCost(p) => {
            finite(
                &[p.tail_index, p.scale, p.reward_slope, p.noise_std],
                "pareto",
            )?;
            if p.tail_index <= 2.0 {
                return Err(Error::InvalidArm(format!(
                    "pareto: tail index must exceed 2, got {}",
                    p.tail_index
                )));
            }
            if p.scale <= 0.0 || p.noise_std < 0.0 {
                return Err(Error::InvalidArm("pareto: scale must be positive".into()));
            }
            let a = p.tail_index;
            let mx = a * p.scale / (a - 1.0);
            let vx = a * p.scale * p.scale / ((a - 1.0).powi(2) * (a - 2.0));
            let rho = p.reward_slope;
            Ok(Moments::new(
                mx,
                rho * mx,
                vx,
                rho * rho * vx + p.noise_std * p.noise_std,
                rho * vx,
            ))
        }
        ArmFamily::DeterministicCost(p) => {
            finite(&[p.cost, p.reward], "deterministic")?;
            if p.cost <= 0.0 {
                return Err(Error::InvalidArm(
                    "deterministic: cost must be positive".into(),
                ));
            }
            Ok(Moments::new(p.cost, p.reward, 0.0, 0.0, 0.0))
        }
    }
}

pub(crate) fn support_bounds(family: &ArmFamily) -> Option<SupportBounds> {
    match family {
        ArmFamily::BoundedCorrelated(p) => Some(SupportBounds {
            max_cost: p.max_cost,
            max_reward: p.max_reward,
        }),
        ArmFamily::DeterministicCost(p) => Some(SupportBounds {
            max_cost: p.cost.abs(),
            max_reward: p.reward.abs(),
        }),
        ArmFamily::JointGaussian(_) | ArmFamily::ParetoCost(_) => None,
    }
}

pub fn lmmse_weight(m: &Moments) -> LmmseSummary {
    if m.var_cost > 0.0 {
        let omega = m.cov / m.var_cost;
        let v_min = (m.var_reward - omega * omega * m.var_cost).max(0.0);
        LmmseSummary { omega, v_min }
    } else {
        LmmseSummary {
            omega: 0.0,
            v_min: m.var_reward,
        }
    }
}

/// `σ² = V + (r* - ω)² Var(X)`, the variance of `R - r* X`.
pub fn sigma_squared(m: &Moments, r_star: f64) -> f64 {
    let l = lmmse_weight(m);
    if m.var_cost > 0.0 {
        l.v_min + (r_star - l.omega).powi(2) * m.var_cost
    } else {
        m.var_reward
    }
}

/// Precomputed sampler for one arm.
#[derive(Debug, Clone)]
pub enum ArmSampler {
    Gaussian {
        mean: [f64; 2],
        l11: f64,
        l21: f64,
        l22: f64,
    },
    Grid {
        cumulative: Vec<f64>,
        atoms: Vec<(f64, f64)>,
    },
    Pareto {
        scale: f64,
        inv_tail: f64,
        slope: f64,
        half_width: f64,
    },
    Point(f64, f64),
}

impl ArmSampler {
    pub fn new(spec: &ArmSpec) -> Self {
        match spec.family() {
            ArmFamily::JointGaussian(p) => {
                let [[vx, c], [_, vr]] = p.covariance;
                let (l11, l21, l22) = if vx > CHOLESKY_JITTER {
                    let l11 = vx.sqrt();
                    let l21 = c / l11;
                    (l11, l21, (vr - l21 * l21).max(0.0).sqrt())
                } else {
                    (0.0, 0.0, vr.max(0.0).sqrt())
                };
                ArmSampler::Gaussian {
                    mean: p.mean,
                    l11,
                    l21,
                    l22,
                }
            }
            ArmFamily::BoundedCorrelated(p) => {
                let mut acc = 0.0;
                let mut cumulative: Vec<f64> = p
                    .atoms
                    .iter()
                    .map(|a| {
                        acc += a.prob;
                        acc
                    })
                    .collect();
                if let Some(last) = cumulative.last_mut() {
                    *last = f64::INFINITY;
                }
                ArmSampler::Grid {
                    cumulative,
                    atoms: p.atoms.iter().map(|a| (a.cost, a.reward)).collect(),
                }
            }
            ArmFamily::ParetoCost(p) => ArmSampler::Pareto {
                scale: p.scale,
                inv_tail: 1.0 / p.tail_index,
                slope: p.reward_slope,
                half_width: 3f64.sqrt() * p.noise_std,
            },
            ArmFamily::DeterministicCost(p) => ArmSampler::Point(p.cost, p.reward),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CostRewardSample {
        match self {
            ArmSampler::Gaussian {
                mean,
                l11,
                l21,
                l22,
            } => {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                CostRewardSample {
                    cost: mean[0] + l11 * z1,
                    reward: mean[1] + l21 * z1 + l22 * z2,
                }
            }
            ArmSampler::Grid { cumulative, atoms } => {
                let u: f64 = rng.random();
                let i = cumulative.partition_point(|&c| c <= u);
                let (cost, reward) = atoms[i.min(atoms.len() - 1)];
                CostRewardSample { cost, reward }
            }
            ArmSampler::Pareto {
                scale,
                inv_tail,
                slope,
                half_width,
            } => {
                // 1 - U lies in (0, 1], keeping the transform finite.
                let u: f64 = 1.0 - rng.random::<f64>();
                let cost = scale * u.powf(-inv_tail);
                let v: f64 = rng.random();
                CostRewardSample {
                    cost,
                    reward: slope * cost + (2.0 * v - 1.0) * half_width,
                }
            }
            ArmSampler::Point(c, r) => CostRewardSample {
                cost: *c,
                reward: *r,
            },
        }
    }
}

/// One draw from `spec`. Builds the sampler on every call; loops should hold
/// an [`ArmSampler`] instead.
pub fn sample<R: Rng + ?Sized>(spec: &ArmSpec, rng: &mut R) -> CostRewardSample {
    ArmSampler::new(spec).sample(rng)
}
