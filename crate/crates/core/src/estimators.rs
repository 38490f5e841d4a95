//! Monte Carlo estimators over coupled paths.
//!
//! Every estimator samples path `m` from the fabric keyed by `(master_seed, m)`
//! at the plan's reference resolution `n_ref = n_ref_multiplier * max(levels)`
//! and runs all levels on aggregations of that one fabric. Paths are simulated
//! in parallel, collected in path order, and reduced sequentially, so results
//! are bit-identical for any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brownian::BrownianFabric;
use crate::error::{invalid, Error, Result};
use crate::problems::SingularProblem;
use crate::schemes::{audit_tamed_path, simulate, SchemeConfig, SchemeSettings, TamingAudit};

/// Levels whose step count is within this factor of `n_ref` are left out of rate fits.
pub const REFERENCE_SEPARATION: usize = 4;

/// Which levels to run, how many paths, and how the reference grid is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloPlan {
    pub levels: Vec<usize>,
    pub samples: usize,
    pub master_seed: u64,
    pub n_ref_multiplier: usize,
}

impl MonteCarloPlan {
    pub fn reference_steps(&self) -> usize {
        self.levels.iter().copied().max().unwrap_or(0) * self.n_ref_multiplier
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(invalid("at least one level is required"));
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!(
                "levels must be strictly ascending: {:?}",
                self.levels
            )));
        }
        if self.levels[0] == 0 {
            return Err(invalid("levels must be positive"));
        }
        if self.samples == 0 {
            return Err(invalid("at least one sample path is required"));
        }
        if self.n_ref_multiplier == 0 {
            return Err(invalid("n_ref_multiplier must be positive"));
        }
        let n_ref = self.reference_steps();
        if let Some(bad) = self.levels.iter().find(|&&n| n_ref % n != 0) {
            return Err(Error::Config(format!(
                "level {bad} does not divide n_ref = {n_ref}"
            )));
        }
        Ok(())
    }

    fn fabric(
        &self,
        problem: &dyn SingularProblem,
        horizon: f64,
        path: u64,
    ) -> Result<BrownianFabric> {
        BrownianFabric::sample(
            self.master_seed,
            path,
            horizon,
            self.reference_steps(),
            problem.dimension(),
        )
    }
}

/// Runs `per_path` for every path index in parallel and returns results in path order.
fn collect_paths<T, F>(samples: usize, per_path: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..samples as u64).into_par_iter().map(per_path).collect()
}

fn tamed_simulate(
    problem: &dyn SingularProblem,
    config: &SchemeConfig,
    fabric: &BrownianFabric,
    path: u64,
    audit: &mut TamingAudit,
) -> Result<crate::schemes::TrajectoryRecord> {
    let rec = simulate(problem, config, fabric)?;
    if config.taming {
        if rec.anomaly.non_finite {
            return Err(Error::NonFiniteTamedPath {
                path_index: path,
                steps: config.steps,
            });
        }
        audit.merge(&audit_tamed_path(problem, config, &rec));
    }
    Ok(rec)
}

/// Mean and standard error (sample standard deviation over `sqrt(count)`),
/// accumulated in slice order.
fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let count = values.len();
    if count == 0 {
        return (f64::NAN, f64::NAN);
    }
    let n = count as f64;
    let mean = values.iter().sum::<f64>() / n;
    if count < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub steps: usize,
    pub p_order: f64,
    /// Monte Carlo mean of `(max_j |X^n_j - X^ref_j|)^p`.
    pub mean_sup_error_p: f64,
    /// `mean_sup_error_p^(1/p)`.
    pub root_error: f64,
    pub std_error: f64,
    pub samples: usize,
    pub discarded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub estimates: Vec<ErrorEstimate>,
    pub reference_steps: usize,
    pub audit: TamingAudit,
}

impl ErrorCurve {
    /// Rate fit over levels at least [`REFERENCE_SEPARATION`] times coarser than the reference.
    pub fn rate_fit(&self) -> Result<RateFit> {
        let usable: Vec<ErrorEstimate> = self
            .estimates
            .iter()
            .filter(|e| e.steps * REFERENCE_SEPARATION <= self.reference_steps)
            .copied()
            .collect();
        fit_rate(&usable)
    }
}

/// Strong `L^p` error of each level against the tamed reference on the same fabric.
///
/// The error of a path is the largest distance over the level's grid times. Paths
/// where an untamed level goes non-finite are discarded at every level; a
/// non-finite tamed path is an error.
pub fn strong_error_curve(
    problem: &dyn SingularProblem,
    settings: &SchemeSettings,
    plan: &MonteCarloPlan,
    p_order: f64,
) -> Result<ErrorCurve> {
    plan.validate()?;
    if !(p_order > 0.0) || !p_order.is_finite() {
        return Err(invalid(format!(
            "moment order p must be positive, got {p_order}"
        )));
    }
    settings.validate(problem)?;
    let n_ref = plan.reference_steps();
    let reference = SchemeSettings {
        taming: true,
        ..*settings
    }
    .at_steps(n_ref);
    reference.validate(problem)?;

    let per_path = collect_paths(plan.samples, |m| {
        let fabric = plan.fabric(problem, settings.horizon, m)?;
        let mut audit = TamingAudit::default();
        let ref_path = tamed_simulate(problem, &reference, &fabric, m, &mut audit)?;
        let mut errors = Vec::with_capacity(plan.levels.len());
        for &n in &plan.levels {
            let config = settings.at_steps(n);
            let rec = tamed_simulate(problem, &config, &fabric, m, &mut audit)?;
            if rec.anomaly.non_finite {
                return Ok((None, audit));
            }
            let stride = n_ref / n;
            let err = rec
                .points()
                .enumerate()
                .map(|(j, x)| {
                    x.iter()
                        .zip(ref_path.point(j * stride))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(0.0, f64::max);
            errors.push(err);
        }
        Ok((Some(errors), audit))
    })?;

    let mut audit = TamingAudit::default();
    for (_, a) in &per_path {
        audit.merge(a);
    }
    let kept: Vec<&Vec<f64>> = per_path.iter().filter_map(|(e, _)| e.as_ref()).collect();
    let discarded = plan.samples - kept.len();
    let estimates = plan
        .levels
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let powers: Vec<f64> = kept.iter().map(|e| e[i].powf(p_order)).collect();
            let (mean, std_error) = mean_and_std_error(&powers);
            ErrorEstimate {
                steps: n,
                p_order,
                mean_sup_error_p: mean,
                root_error: mean.powf(1.0 / p_order),
                std_error,
                samples: plan.samples,
                discarded,
            }
        })
        .collect();
    Ok(ErrorCurve {
        estimates,
        reference_steps: n_ref,
        audit,
    })
}

/// Least-squares line through `(ln n, ln root_error)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub levels_used: Vec<usize>,
}

/// Fits `ln root_error = intercept + slope ln n`. Levels with zero (or
/// non-finite) error are skipped; fewer than three remaining is an error.
pub fn fit_rate(estimates: &[ErrorEstimate]) -> Result<RateFit> {
    let points: Vec<(usize, f64, f64)> = estimates
        .iter()
        .filter(|e| e.root_error > 0.0 && e.root_error.is_finite())
        .map(|e| (e.steps, (e.steps as f64).ln(), e.root_error.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::DegenerateFit {
            usable: points.len(),
        });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.2).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.1 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.1 - mean_x) * (p.2 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.2 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit { usable: 1 });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.2 - intercept - slope * p.1).powi(2))
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        levels_used: points.iter().map(|p| p.0).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseMomentLevel {
    pub steps: usize,
    pub p_order: f64,
    /// Mean over paths of `max_{j <= tau} rho(X^n_j)^(-p)`.
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseMomentCurve {
    pub levels: Vec<InverseMomentLevel>,
    pub max_mean: f64,
    pub audit: TamingAudit,
}

fn require_singular(problem: &dyn SingularProblem) -> Result<()> {
    if problem.has_singularity() {
        Ok(())
    } else {
        Err(Error::UnsupportedProblem(format!(
            "{} has no singular set; distance statistics are undefined",
            problem.name()
        )))
    }
}

/// Per level, the Monte Carlo mean of the pre-stopping grid supremum of `rho^(-p)`.
pub fn inverse_moment_curve(
    problem: &dyn SingularProblem,
    settings: &SchemeSettings,
    plan: &MonteCarloPlan,
    p_order: f64,
) -> Result<InverseMomentCurve> {
    require_singular(problem)?;
    plan.validate()?;
    settings.validate(problem)?;
    if !(p_order > 0.0) || !p_order.is_finite() {
        return Err(invalid(format!(
            "moment order p must be positive, got {p_order}"
        )));
    }
    let per_path = collect_paths(plan.samples, |m| {
        let fabric = plan.fabric(problem, settings.horizon, m)?;
        let mut audit = TamingAudit::default();
        let mut stats = Vec::with_capacity(plan.levels.len());
        for &n in &plan.levels {
            let rec = tamed_simulate(problem, &settings.at_steps(n), &fabric, m, &mut audit)?;
            stats.push(rec.sup_inv_rho.powf(p_order));
        }
        Ok((stats, audit))
    })?;
    let mut audit = TamingAudit::default();
    for (_, a) in &per_path {
        audit.merge(a);
    }
    let levels: Vec<InverseMomentLevel> = plan
        .levels
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let values: Vec<f64> = per_path.iter().map(|(s, _)| s[i]).collect();
            let (mean, std_error) = mean_and_std_error(&values);
            InverseMomentLevel {
                steps: n,
                p_order,
                mean,
                std_error,
                samples: plan.samples,
            }
        })
        .collect();
    let max_mean = levels
        .iter()
        .map(|l| l.mean)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(InverseMomentCurve {
        levels,
        max_mean,
        audit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingLevel {
    pub steps: usize,
    /// Fraction of paths whose discrete stopping index exists.
    pub hit_fraction: f64,
    /// Binomial standard error `sqrt(f (1 - f) / M)`.
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppingCurve {
    pub levels: Vec<StoppingLevel>,
    pub audit: TamingAudit,
}

/// Per level, the fraction of paths that reach the taming threshold (or leave `D`)
/// before the horizon.
pub fn stopping_probability(
    problem: &dyn SingularProblem,
    settings: &SchemeSettings,
    plan: &MonteCarloPlan,
) -> Result<StoppingCurve> {
    require_singular(problem)?;
    plan.validate()?;
    settings.validate(problem)?;
    let per_path = collect_paths(plan.samples, |m| {
        let fabric = plan.fabric(problem, settings.horizon, m)?;
        let mut audit = TamingAudit::default();
        let mut hits = Vec::with_capacity(plan.levels.len());
        for &n in &plan.levels {
            let rec = tamed_simulate(problem, &settings.at_steps(n), &fabric, m, &mut audit)?;
            hits.push(rec.tau_hit_index.is_some());
        }
        Ok((hits, audit))
    })?;
    let mut audit = TamingAudit::default();
    for (_, a) in &per_path {
        audit.merge(a);
    }
    let total = plan.samples as f64;
    let levels = plan
        .levels
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let count = per_path.iter().filter(|(h, _)| h[i]).count();
            let f = count as f64 / total;
            StoppingLevel {
                steps: n,
                hit_fraction: f,
                std_error: (f * (1.0 - f) / total).sqrt(),
                samples: plan.samples,
            }
        })
        .collect();
    Ok(StoppingCurve { levels, audit })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub steps: usize,
    pub samples: usize,
    pub fraction_left_domain: f64,
    pub fraction_non_finite: f64,
    /// Largest finite `|X|` seen on any grid point of any path.
    pub max_observed_norm: f64,
}

/// Runs the scheme `samples` times on fabrics at its own resolution and counts
/// paths that leave `D` or overflow.
fn probe(
    problem: &dyn SingularProblem,
    config: &SchemeConfig,
    samples: usize,
    master_seed: u64,
) -> Result<DivergenceReport> {
    config.validate(problem)?;
    if samples == 0 {
        return Err(invalid("at least one sample path is required"));
    }
    let per_path = collect_paths(samples, |m| {
        let fabric = BrownianFabric::sample(
            master_seed,
            m,
            config.horizon,
            config.steps,
            problem.dimension(),
        )?;
        let rec = simulate(problem, config, &fabric)?;
        Ok((rec.anomaly, rec.sup_norm))
    })?;
    let total = samples as f64;
    let left = per_path.iter().filter(|(a, _)| a.left_domain).count();
    let non_finite = per_path.iter().filter(|(a, _)| a.non_finite).count();
    let max_observed_norm = per_path.iter().map(|(_, s)| *s).fold(0.0, f64::max);
    Ok(DivergenceReport {
        steps: config.steps,
        samples,
        fraction_left_domain: left as f64 / total,
        fraction_non_finite: non_finite as f64 / total,
        max_observed_norm,
    })
}

/// Plain Euler divergence statistics. A tamed configuration is a precondition error.
pub fn divergence_probe(
    problem: &dyn SingularProblem,
    config: &SchemeConfig,
    samples: usize,
    master_seed: u64,
) -> Result<DivergenceReport> {
    if config.taming {
        return Err(Error::Precondition(
            "divergence probe runs the plain Euler scheme; pass taming = false".into(),
        ));
    }
    probe(problem, config, samples, master_seed)
}

/// The same statistics for the tamed scheme, as a control for [`divergence_probe`].
pub fn tamed_control_probe(
    problem: &dyn SingularProblem,
    config: &SchemeConfig,
    samples: usize,
    master_seed: u64,
) -> Result<DivergenceReport> {
    if !config.taming {
        return Err(Error::Precondition(
            "control probe expects taming = true".into(),
        ));
    }
    probe(problem, config, samples, master_seed)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "spearman needs paired samples");
    let (rx, ry) = (ranks(xs), ranks(ys));
    pearson(&rx, &ry)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}
