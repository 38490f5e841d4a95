//! Executes a resolved experiment and writes its CSV and manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use tamed_euler::checker::{
    check_hess_rho_bound, check_inv_poly_lipschitz, check_lj_kernel, check_one_sided_lipschitz,
    check_push_away, log_uniform_grid, radial_points, CheckReport, PairSampler, SampleBox,
};
use tamed_euler::estimators::{
    divergence_probe, inverse_moment_curve, stopping_probability, strong_error_curve,
    tamed_control_probe,
};
use tamed_euler::output;
use tamed_euler::SingularProblem;

use crate::config::{CommandKind, ExperimentConfig, ProblemKey, ResolvedExperiment};
use crate::{CheckArgs, Cli, CliError, Command, RunArgs};

/// What a finished run produced: the CSV text and a one-line summary.
pub struct RunOutput {
    pub csv: String,
    pub summary: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    #[serde(flatten)]
    config: &'a ExperimentConfig,
    version: &'static str,
    wall_time_seconds: f64,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Merges the config file (if any) with flags into a configuration.
pub fn build_config(cli: &Cli) -> Result<(ExperimentConfig, Option<usize>), CliError> {
    let (kind, common) = match &cli.command {
        Command::Convergence(a) => (CommandKind::Convergence, &a.common),
        Command::Moments(a) => (CommandKind::Moments, &a.common),
        Command::Stopping(a) => (CommandKind::Stopping, &a.common),
        Command::Diverge(a) => (CommandKind::Diverge, &a.common),
        Command::Check(a) => (CommandKind::Check, &a.common),
    };
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::new(kind),
    };
    cfg.command = kind;
    common.apply(&mut cfg);
    match &cli.command {
        Command::Check(CheckArgs { p, q, pairs, .. }) => {
            if let Some(p) = p {
                cfg.problem.p_exp = *p;
            }
            if let Some(q) = q {
                cfg.problem.q_exp = *q;
            }
            if let Some(pairs) = pairs {
                cfg.check.pairs = *pairs;
            }
        }
        Command::Convergence(RunArgs { p, .. })
        | Command::Moments(RunArgs { p, .. })
        | Command::Stopping(RunArgs { p, .. })
        | Command::Diverge(RunArgs { p, .. }) => {
            if let Some(p) = p {
                cfg.estimator.p = *p;
            }
        }
    }
    Ok((cfg, common.threads))
}

pub fn execute(exp: &ResolvedExperiment) -> Result<RunOutput, CliError> {
    let cfg = &exp.config;
    let problem: &dyn SingularProblem = &exp.problem;
    let plan = cfg.plan();
    let p = cfg.estimator.p;
    match cfg.command {
        CommandKind::Convergence => {
            let curve = strong_error_curve(problem, &exp.settings, &plan, p)?;
            // An all-zero curve (additive noise with no drift) has no slope to fit.
            let fit = curve.rate_fit().ok();
            let summary = match &fit {
                Some(f) => format!("slope {:.4}, r^2 {:.4}", f.slope, f.r_squared),
                None => "no rate fit (fewer than three usable levels)".to_string(),
            };
            Ok(RunOutput {
                csv: output::error_curve_csv(&curve, fit.as_ref()),
                summary,
            })
        }
        CommandKind::Moments => {
            let curve = inverse_moment_curve(problem, &exp.settings, &plan, p)?;
            let summary = format!("max mean sup rho^-p {:.6e}", curve.max_mean);
            Ok(RunOutput {
                csv: output::inverse_moment_csv(&curve),
                summary,
            })
        }
        CommandKind::Stopping => {
            let curve = stopping_probability(problem, &exp.settings, &plan)?;
            let last = curve.levels.last().map_or(f64::NAN, |l| l.hit_fraction);
            let summary = format!("hit fraction at finest level {last:.4}");
            Ok(RunOutput {
                csv: output::stopping_csv(&curve),
                summary,
            })
        }
        CommandKind::Diverge => {
            let mut rows = Vec::new();
            for &n in &plan.levels {
                let plain = exp.settings.at_steps(n);
                let plain = tamed_euler::SchemeConfig {
                    taming: false,
                    ..plain
                };
                let tamed = tamed_euler::SchemeConfig {
                    taming: true,
                    ..plain
                };
                rows.push((
                    "plain",
                    divergence_probe(problem, &plain, plan.samples, plan.master_seed)?,
                ));
                rows.push((
                    "tamed",
                    tamed_control_probe(problem, &tamed, plan.samples, plan.master_seed)?,
                ));
            }
            let worst = rows
                .iter()
                .filter(|(s, _)| *s == "plain")
                .map(|(_, r)| r.fraction_left_domain + r.fraction_non_finite)
                .fold(0.0, f64::max);
            let summary = format!("plain Euler worst divergence fraction {worst:.4}");
            Ok(RunOutput {
                csv: output::divergence_csv(&rows),
                summary,
            })
        }
        CommandKind::Check => {
            let reports = run_checks(exp)?;
            let failed = reports.iter().filter(|r| !r.passed).count();
            let summary = format!("{} checks, {failed} failed", reports.len());
            Ok(RunOutput {
                csv: output::check_reports_csv(&reports),
                summary,
            })
        }
    }
}

fn run_checks(exp: &ResolvedExperiment) -> Result<Vec<CheckReport>, CliError> {
    let cfg = &exp.config;
    let problem: &dyn SingularProblem = &exp.problem;
    let Some(constants) = problem.constants() else {
        return Err(CliError::Validation(format!(
            "{} declares no structural constants to check",
            problem.name()
        )));
    };
    let keys = &cfg.check;
    if !(keys.rho_min > 0.0 && keys.rho_max > keys.rho_min)
        || keys.grid_points < 2
        || keys.pairs == 0
    {
        return Err(CliError::Validation(
            "check needs 0 < rho_min < rho_max, grid_points >= 2, pairs >= 1".into(),
        ));
    }
    let seed = cfg.estimator.seed;
    let d = problem.dimension();
    let sample_box = match cfg.problem.key {
        ProblemKey::PowerLaw => SampleBox::log_uniform(vec![keys.rho_min], vec![keys.rho_max]),
        _ => SampleBox::uniform(vec![-keys.rho_max; d], vec![keys.rho_max; d]),
    };
    let sampler = PairSampler::new(sample_box, seed);
    let grid = log_uniform_grid(keys.rho_min, keys.rho_max, keys.grid_points);
    let radial = radial_points(problem, &grid)?;

    let mut reports = vec![
        check_one_sided_lipschitz(problem, &sampler, keys.pairs, constants.c)?,
        check_push_away(problem, &radial, constants)?,
    ];
    if problem.hess_rho(&radial[0]).is_some() {
        reports.push(check_hess_rho_bound(problem, &radial, constants)?);
    }
    reports.push(check_inv_poly_lipschitz(
        problem, &sampler, keys.pairs, constants,
    )?);
    if cfg.problem.key == ProblemKey::LjPair {
        reports.extend(check_lj_kernel(
            &cfg.problem.lj_params(),
            &grid,
            keys.pairs,
            seed,
        )?);
    }
    Ok(reports)
}

/// Runs the experiment and writes `<out>` and `<out>.manifest.json`.
pub fn run_and_write(exp: &ResolvedExperiment) -> Result<String, CliError> {
    let start = Instant::now();
    let result = execute(exp)?;
    let wall_time_seconds = start.elapsed().as_secs_f64();
    let out = exp
        .config
        .out
        .clone()
        .expect("resolved config has an output path");
    write(&out, result.csv.as_bytes())?;
    let manifest = Manifest {
        config: &exp.config,
        version: env!("CARGO_PKG_VERSION"),
        wall_time_seconds,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(&manifest_path(&out), text.as_bytes())?;
    Ok(result.summary)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("a/b.csv")),
            PathBuf::from("a/b.csv.manifest.json")
        );
    }

    #[test]
    fn smooth_problems_cannot_be_checked() {
        let mut cfg = ExperimentConfig::new(CommandKind::Check);
        cfg.problem.key = ProblemKey::Brownian;
        let exp = cfg.resolve().unwrap();
        assert!(matches!(execute(&exp), Err(CliError::Validation(_))));
    }

    #[test]
    fn power_law_checks_pass() {
        let mut cfg = ExperimentConfig::new(CommandKind::Check);
        cfg.check.pairs = 2000;
        cfg.check.grid_points = 200;
        let exp = cfg.resolve().unwrap();
        let reports = run_checks(&exp).unwrap();
        assert_eq!(reports.len(), 4);
        assert!(reports.iter().all(|r| r.passed), "{reports:?}");
    }
}
