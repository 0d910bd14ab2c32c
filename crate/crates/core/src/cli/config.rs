//! TOML experiment schema and its resolution into validated plans.

use std::collections::HashSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::distributions::{
    ArmFamily, Atom, BoundedCorrelatedParams, DeterministicParams, GaussianParams, ParetoCostParams,
};
use crate::model::{build_instance, ArmSpec, BanditInstance};
use crate::policies::{PolicyConfig, PolicyKind, DEFAULT_ALPHA, DEFAULT_LAMBDA};

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_SEED: u64 = 0;
/// Reserved name of the baseline rows in `curves.csv`.
pub const ORACLE_NAME: &str = "oracle";

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    instance: RawInstance,
    policies: Vec<RawPolicy>,
    #[serde(default)]
    run: RawRun,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    arms: Vec<RawArm>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
enum RawArm {
    Gaussian(RawGaussian),
    Bounded(RawBounded),
    Pareto(RawPareto),
    Deterministic(RawDeterministic),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawGaussian {
    mean: [f64; 2],
    covariance: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    cost: f64,
    reward: f64,
    prob: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawBounded {
    max_cost: f64,
    max_reward: f64,
    atoms: Vec<RawAtom>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPareto {
    tail_index: f64,
    scale: f64,
    reward_slope: f64,
    noise_std: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawDeterministic {
    cost: f64,
    reward: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    name: String,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    confidence_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_reward: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_bar: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum RawBudgets {
    List(Vec<f64>),
    Geometric(RawGeometric),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawGeometric {
    min: f64,
    max: f64,
    points: usize,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(skip_serializing_if = "Option::is_none")]
    budgets: Option<RawBudgets>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output_dir: Option<PathBuf>,
}

/// One requested policy with every default resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyEntry {
    pub name: String,
    pub kind: PolicyKind,
    pub config: PolicyConfig,
}

/// A fully validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub instance: BanditInstance,
    pub policies: Vec<PolicyEntry>,
    pub budgets: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    arms: Vec<RawArm>,
}

fn config_err(path: impl AsRef<str>, msg: impl AsRef<str>) -> CliError {
    CliError::Config(format!("{}: {}", path.as_ref(), msg.as_ref()))
}

fn arm_family(raw: &RawArm) -> ArmFamily {
    match raw {
        RawArm::Gaussian(g) => ArmFamily::JointGaussian(GaussianParams {
            mean: g.mean,
            covariance: g.covariance,
        }),
        RawArm::Bounded(b) => ArmFamily::BoundedCorrelated(BoundedCorrelatedParams {
            max_cost: b.max_cost,
            max_reward: b.max_reward,
            atoms: b
                .atoms
                .iter()
                .map(|a| Atom {
                    cost: a.cost,
                    reward: a.reward,
                    prob: a.prob,
                })
                .collect(),
        }),
        RawArm::Pareto(p) => ArmFamily::ParetoCost(ParetoCostParams {
            tail_index: p.tail_index,
            scale: p.scale,
            reward_slope: p.reward_slope,
            noise_std: p.noise_std,
        }),
        RawArm::Deterministic(d) => ArmFamily::DeterministicCost(DeterministicParams {
            cost: d.cost,
            reward: d.reward,
        }),
    }
}

/// Log-spaced grid from `min` to `max` inclusive.
pub fn geometric_budgets(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let ratio = (max / min).ln() / (points - 1) as f64;
    (0..points)
        .map(|i| match i {
            0 => min,
            i if i + 1 == points => max,
            i => min * (ratio * i as f64).exp(),
        })
        .collect()
}

fn resolve_budgets(raw: Option<&RawBudgets>) -> Result<Vec<f64>, CliError> {
    let budgets = match raw {
        None => return Err(config_err("run.budgets", "missing required key")),
        Some(RawBudgets::List(v)) => v.clone(),
        Some(RawBudgets::Geometric(g)) => {
            if !(g.min > 0.0 && g.max > g.min && g.points >= 1) {
                return Err(config_err(
                    "run.budgets",
                    "geometric grid needs 0 < min < max and points >= 1",
                ));
            }
            geometric_budgets(g.min, g.max, g.points)
        }
    };
    if budgets.is_empty() {
        return Err(config_err("run.budgets", "at least one budget required"));
    }
    if budgets.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(config_err(
            "run.budgets",
            "budgets must be positive and finite",
        ));
    }
    if budgets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config_err(
            "run.budgets",
            "budgets must be strictly ascending",
        ));
    }
    Ok(budgets)
}

fn resolve_policy(
    i: usize,
    raw: &RawPolicy,
    instance: &BanditInstance,
) -> Result<PolicyEntry, CliError> {
    let path = format!("policies[{i}]");
    let kind: PolicyKind = raw
        .kind
        .parse()
        .map_err(|e: crate::error::Error| config_err(format!("{path}.kind"), e.to_string()))?;
    let mut cfg = PolicyConfig::with_known_moments(instance);
    let max_cost = raw.max_cost.unwrap_or(0.0);
    let max_reward = raw.max_reward.unwrap_or(0.0);
    let bounded = max_cost > 0.0 || max_reward > 0.0;
    cfg.alpha = raw.alpha.unwrap_or(DEFAULT_ALPHA);
    cfg.lambda = raw.lambda.unwrap_or(DEFAULT_LAMBDA);
    cfg.confidence_scale = raw
        .confidence_scale
        .unwrap_or(if bounded { 2.0 } else { 0.5 });
    cfg.b = raw.b.unwrap_or(instance.mu_star() / 2.0);
    cfg.max_cost = max_cost;
    cfg.max_reward = max_reward;
    if kind == PolicyKind::UcbB2C {
        cfg.omega_bar = raw.omega_bar.ok_or_else(|| {
            config_err(
                format!("{path}.omega_bar"),
                "missing required key for ucb-b2c",
            )
        })?;
    } else {
        cfg.omega_bar = raw.omega_bar.unwrap_or(0.0);
    }
    if matches!(kind, PolicyKind::UcbB2 | PolicyKind::UcbB2C)
        && !(max_cost > 0.0 && max_reward > 0.0)
    {
        return Err(config_err(
            &path,
            format!("{kind} needs positive max_cost and max_reward"),
        ));
    }
    for (key, ok) in [
        ("alpha", cfg.alpha > 2.0),
        ("lambda", cfg.lambda > 1.0),
        ("b", cfg.b > 0.0),
        ("confidence_scale", cfg.confidence_scale > 0.0),
        ("max_cost", cfg.max_cost >= 0.0),
        ("max_reward", cfg.max_reward >= 0.0),
    ] {
        if !ok {
            let msg = match key {
                "alpha" => "alpha must exceed 2",
                "lambda" => "lambda must exceed 1",
                "b" => "b must be positive",
                _ => "must be non-negative",
            };
            return Err(config_err(format!("{path}.{key}"), msg));
        }
    }
    cfg.validate()
        .map_err(|e| config_err(&path, e.to_string()))?;
    Ok(PolicyEntry {
        name: raw.name.clone(),
        kind,
        config: cfg,
    })
}

/// Parses and validates a TOML experiment description.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))?;

    let specs = raw
        .instance
        .arms
        .iter()
        .enumerate()
        .map(|(k, a)| {
            ArmSpec::new(arm_family(a))
                .map_err(|e| config_err(format!("instance.arms[{k}]"), e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let instance = build_instance(specs).map_err(|e| config_err("instance.arms", e.to_string()))?;

    if raw.policies.is_empty() {
        return Err(config_err("policies", "at least one policy required"));
    }
    let mut names = HashSet::new();
    for (i, p) in raw.policies.iter().enumerate() {
        if p.name == ORACLE_NAME {
            return Err(config_err(
                format!("policies[{i}].name"),
                format!("`{ORACLE_NAME}` is reserved for the baseline"),
            ));
        }
        if !names.insert(p.name.as_str()) {
            return Err(config_err(
                format!("policies[{i}].name"),
                format!("duplicate policy name `{}`", p.name),
            ));
        }
    }
    let policies = raw
        .policies
        .iter()
        .enumerate()
        .map(|(i, p)| resolve_policy(i, p, &instance))
        .collect::<Result<Vec<_>, _>>()?;

    let budgets = resolve_budgets(raw.run.budgets.as_ref())?;
    let trials = raw.run.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(config_err("run.trials", "must be at least 1"));
    }
    Ok(ExperimentConfig {
        instance,
        policies,
        budgets,
        trials,
        master_seed: raw.run.seed.unwrap_or(DEFAULT_SEED),
        output_dir: raw
            .run
            .output_dir
            .unwrap_or_else(|| PathBuf::from("results")),
        arms: raw.instance.arms,
    })
}

impl ExperimentConfig {
    /// The resolved configuration, every default filled in, as TOML.
    pub fn echo(&self) -> String {
        let raw = RawConfig {
            instance: RawInstance {
                arms: self.arms.clone(),
            },
            policies: self
                .policies
                .iter()
                .map(|p| RawPolicy {
                    name: p.name.clone(),
                    kind: p.kind.name().to_string(),
                    alpha: Some(p.config.alpha),
                    confidence_scale: Some(p.config.confidence_scale),
                    lambda: Some(p.config.lambda),
                    b: Some(p.config.b),
                    max_cost: Some(p.config.max_cost),
                    max_reward: Some(p.config.max_reward),
                    omega_bar: Some(p.config.omega_bar),
                })
                .collect(),
            run: RawRun {
                budgets: Some(RawBudgets::List(self.budgets.clone())),
                trials: Some(self.trials),
                seed: Some(self.master_seed),
                output_dir: Some(self.output_dir.clone()),
            },
        };
        toml::to_string(&raw).expect("resolved config serializes")
    }
}
