use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::config::{ExperimentConfig, ORACLE_NAME};
use super::CliError;
use crate::bounds::{bound_report, BoundReport};
use crate::error::Error;
use crate::model::{validate_assumptions, Diagnostic};
use crate::policies::{PolicyConfig, PolicyKind};
use crate::simulator::{
    empirical_regret, log_fit, run_monte_carlo, LogFit, RegretCurve, RegretPoint, TrialPlan,
};

#[derive(Debug, Clone)]
pub struct PolicyResult {
    pub name: String,
    pub kind: PolicyKind,
    pub curve: RegretCurve,
    pub regret: Vec<RegretPoint>,
    /// `None` with fewer than three budgets.
    pub fit: Option<LogFit>,
    pub bounds: BoundReport,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub oracle: RegretCurve,
    pub policies: Vec<PolicyResult>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of run `index` (0 is the oracle baseline, `i + 1` is policy `i`).
pub(crate) fn derived_seed(master: u64, index: usize) -> u64 {
    splitmix64(master ^ splitmix64(index as u64))
}

fn run_plan(
    cfg: &ExperimentConfig,
    name: &str,
    kind: PolicyKind,
    config: PolicyConfig,
    index: usize,
) -> Result<RegretCurve, CliError> {
    let plan = TrialPlan {
        instance: cfg.instance.clone(),
        kind,
        config,
        budgets: cfg.budgets.clone(),
        trials: cfg.trials,
        master_seed: derived_seed(cfg.master_seed, index),
    };
    run_monte_carlo(&plan).map_err(|e| match e {
        Error::Trial {
            budget_index,
            trial,
            source,
        } => CliError::Runtime(format!(
            "policy `{name}`, B = {}, trial {trial}: {source}",
            cfg.budgets[budget_index]
        )),
        e => CliError::Runtime(format!("policy `{name}`: {e}")),
    })
}

/// Runs the oracle baseline and every configured policy over the budget grid.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, CliError> {
    let oracle = run_plan(
        cfg,
        ORACLE_NAME,
        PolicyKind::StaticOracle,
        PolicyConfig::with_known_moments(&cfg.instance),
        0,
    )?;
    let mut policies = Vec::with_capacity(cfg.policies.len());
    for (i, p) in cfg.policies.iter().enumerate() {
        let curve = run_plan(cfg, &p.name, p.kind, p.config.clone(), i + 1)?;
        let regret =
            empirical_regret(&curve, &oracle).map_err(|e| CliError::Runtime(e.to_string()))?;
        let pts: Vec<(f64, f64)> = regret.iter().map(|r| (r.budget, r.regret)).collect();
        policies.push(PolicyResult {
            name: p.name.clone(),
            kind: p.kind,
            regret,
            fit: log_fit(&pts).ok(),
            bounds: bound_report(&cfg.instance, p.kind, &p.config),
            curve,
        });
    }
    Ok(ExperimentOutput { oracle, policies })
}

/// 17 significant digits, round-trip exact.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn curve_rows(
    w: &mut csv::Writer<Vec<u8>>,
    name: &str,
    curve: &RegretCurve,
    regret: Option<&[RegretPoint]>,
) -> Result<(), CliError> {
    for (j, p) in curve.points.iter().enumerate() {
        let (r, hw) = regret.map_or((0.0, 0.0), |r| (r[j].regret, r[j].halfwidth));
        let mut row = vec![
            name.to_string(),
            num(p.budget),
            p.trials.to_string(),
            num(p.mean_reward),
            num(p.stderr_reward),
            num(p.mean_pulls),
            num(p.overshoot),
            num(r),
            num(hw),
            num(p.pseudo_regret),
        ];
        row.extend(p.mean_pulls_per_arm.iter().map(|&x| num(x)));
        w.write_record(&row)?;
    }
    Ok(())
}

/// `curves.csv` contents: the oracle baseline first, then each policy.
pub fn curves_csv(cfg: &ExperimentConfig, out: &ExperimentOutput) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = [
        "policy",
        "B",
        "trials",
        "mean_reward",
        "stderr_reward",
        "mean_pulls",
        "overshoot",
        "regret",
        "regret_halfwidth",
        "pseudo_regret",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((0..cfg.instance.num_arms()).map(|k| format!("pulls_arm_{k}")));
    w.write_record(&header)?;
    curve_rows(&mut w, ORACLE_NAME, &out.oracle, None)?;
    for p in &out.policies {
        curve_rows(&mut w, &p.name, &p.curve, Some(&p.regret))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn summary_csv(out: &ExperimentOutput) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "policy",
        "kind",
        "logfit_slope",
        "logfit_intercept",
        "logfit_r_squared",
        "upper_bound_coeff",
        "lower_bound_coeff",
        "brackets",
    ])?;
    for p in &out.policies {
        let bracket = p
            .fit
            .and_then(|f| p.bounds.brackets(f.slope))
            .map(|b| if b { "pass" } else { "fail" }.to_string())
            .unwrap_or_default();
        w.write_record([
            p.name.clone(),
            p.kind.name().to_string(),
            opt_num(p.fit.map(|f| f.slope)),
            opt_num(p.fit.map(|f| f.intercept)),
            opt_num(p.fit.map(|f| f.r_squared)),
            opt_num(p.bounds.upper_coeff.map(|c| c * p.bounds.alpha)),
            opt_num(p.bounds.lower_coeff),
            bracket,
        ])?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

/// Writes `curves.csv`, `summary.csv` and `config_echo.toml` into `dir`.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    out: &ExperimentOutput,
    dir: &Path,
) -> Result<(), CliError> {
    let curves = curves_csv(cfg, out)?;
    let summary = summary_csv(out)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("curves.csv"), curves)?;
    fs::write(dir.join("summary.csv"), summary)?;
    fs::write(dir.join("config_echo.toml"), cfg.echo())?;
    Ok(())
}

/// Modelling-assumption warnings per policy.
pub fn diagnostics(cfg: &ExperimentConfig) -> Vec<(String, Diagnostic)> {
    cfg.policies
        .iter()
        .flat_map(|p| {
            validate_assumptions(&cfg.instance, p.kind, &p.config)
                .into_iter()
                .map(move |d| (p.name.clone(), d))
        })
        .collect()
}

/// Plain-text bound report: instance constants, per-arm terms, then one
/// line per policy.
pub fn format_bounds(cfg: &ExperimentConfig) -> String {
    let inst = &cfg.instance;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "r_star={} k_star={} mu_star={}",
        inst.r_star(),
        inst.k_star(),
        inst.mu_star()
    );
    let first = cfg
        .policies
        .first()
        .map(|p| bound_report(inst, p.kind, &p.config));
    if let Some(r) = &first {
        for a in &r.arms {
            let _ = write!(
                s,
                "arm={} rate={} gap={} sigma2={} omega={}",
                a.arm,
                inst.rates()[a.arm],
                a.gap,
                a.sigma2,
                a.omega
            );
            if let Some(d) = a.d_star {
                let _ = write!(s, " d_star={d}");
            }
            s.push('\n');
        }
        match r.lower_coeff {
            Some(c) => {
                let _ = writeln!(s, "lower_coeff={c}");
            }
            None => s.push_str("lower_coeff=undefined (non-Gaussian instance)\n"),
        }
    }
    for p in &cfg.policies {
        let r = bound_report(inst, p.kind, &p.config);
        let upper = r
            .upper_coeff
            .map_or_else(|| "undefined".to_string(), |c| c.to_string());
        let _ = write!(
            s,
            "policy={} kind={} alpha={} upper_coeff={}",
            p.name, p.kind, r.alpha, upper
        );
        if let Some(label) = r.label {
            let _ = write!(s, " constant=\"{label}\"");
        }
        s.push('\n');
    }
    s
}
