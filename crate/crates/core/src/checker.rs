//! Sampling auditor for the structural assumptions on a problem's drift.
//!
//! Each check evaluates an inequality at sampled points or pairs, keeps the most
//! adverse slack (`worst_margin`) with its witness, and reports the constant the
//! samples imply. A report with `passed = true` means no violation was found on
//! the samples; it is not a proof.
//!
//! A sample passes when its margin is at least `-RELATIVE_TOLERANCE * (1 + |lhs| + |rhs|)`,
//! which absorbs round-off on near-equality cases. Samplers reject points outside
//! `D`, so drift and distance are never evaluated there.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::problems::{LennardJonesPairParams, SingularProblem, StructuralConstants};

pub const RELATIVE_TOLERANCE: f64 = 1e-9;

/// Lower-order push-away slack used for the kernel check (`h3 = h4`).
pub const KERNEL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionId {
    OneSidedLipschitz,
    PushAway,
    HessRhoBound,
    InvPolyLipschitz,
    KMonotone,
    KInvLipschitz,
    KPushAway,
}

impl AssumptionId {
    pub fn as_str(&self) -> &'static str {
        match self {
            AssumptionId::OneSidedLipschitz => "one_sided_lipschitz",
            AssumptionId::PushAway => "push_away",
            AssumptionId::HessRhoBound => "hess_rho_bound",
            AssumptionId::InvPolyLipschitz => "inv_poly_lipschitz",
            AssumptionId::KMonotone => "K_monotone",
            AssumptionId::KInvLipschitz => "K_inv_lipschitz",
            AssumptionId::KPushAway => "K_push_away",
        }
    }
}

impl fmt::Display for AssumptionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub assumption: AssumptionId,
    pub worst_margin: f64,
    /// The sample attaining `worst_margin` (a point, or a pair concatenated).
    pub witness: Vec<f64>,
    pub implied_constant: Option<f64>,
    /// Smallest admissible exponent found by grid search, where the check does one.
    pub implied_exponent: Option<f64>,
    pub samples: usize,
    pub passed: bool,
}

/// One evaluated inequality `lhs >= rhs` (margin `lhs - rhs`) with its witness.
struct Sample {
    margin: f64,
    scale: f64,
    witness: Vec<f64>,
}

struct Reduction {
    worst_margin: f64,
    witness: Vec<f64>,
    passed: bool,
    samples: usize,
}

/// Deterministic reduction in sample order.
fn reduce(samples: Vec<Sample>) -> Reduction {
    let mut out = Reduction {
        worst_margin: f64::INFINITY,
        witness: Vec::new(),
        passed: true,
        samples: samples.len(),
    };
    for s in samples {
        if !(s.margin >= -RELATIVE_TOLERANCE * (1.0 + s.scale)) {
            out.passed = false;
        }
        if s.margin < out.worst_margin || s.margin.is_nan() && !out.worst_margin.is_nan() {
            out.worst_margin = s.margin;
            out.witness = s.witness;
        }
    }
    out
}

fn report(assumption: AssumptionId, r: Reduction, implied_constant: Option<f64>) -> CheckReport {
    CheckReport {
        assumption,
        worst_margin: r.worst_margin,
        witness: r.witness,
        implied_constant,
        implied_exponent: None,
        samples: r.samples,
        passed: r.passed,
    }
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Uniform,
    /// Log-uniform per coordinate; the box must lie in the positive orthant.
    LogUniform,
}

/// Axis-aligned sampling box with per-coordinate spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub spacing: Spacing,
}

impl SampleBox {
    pub fn uniform(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self {
            lower,
            upper,
            spacing: Spacing::Uniform,
        }
    }

    pub fn log_uniform(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self {
            lower,
            upper,
            spacing: Spacing::LogUniform,
        }
    }

    fn validate(&self, dimension: usize) -> Result<()> {
        if self.lower.len() != dimension || self.upper.len() != dimension {
            return Err(invalid(format!(
                "sample box must have {dimension} coordinates"
            )));
        }
        for (lo, hi) in self.lower.iter().zip(&self.upper) {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(invalid(format!("bad sample box interval [{lo}, {hi}]")));
            }
            if self.spacing == Spacing::LogUniform && !(*lo > 0.0) {
                return Err(invalid("log-uniform sampling needs positive bounds"));
            }
        }
        Ok(())
    }
}

fn unit_uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn sample_in_box(bx: &SampleBox, rng: &mut ChaCha8Rng) -> Vec<f64> {
    bx.lower
        .iter()
        .zip(&bx.upper)
        .map(|(&lo, &hi)| {
            let u = unit_uniform(rng);
            match bx.spacing {
                Spacing::Uniform => lo + u * (hi - lo),
                Spacing::LogUniform => (lo.ln() + u * (hi.ln() - lo.ln())).exp(),
            }
        })
        .collect()
}

/// Reproducible pairs of points of `D` drawn from a box. The first `k` pairs of a
/// request for `2k` are the pairs of a request for `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSampler {
    pub sample_box: SampleBox,
    pub seed: u64,
}

const MAX_REJECTIONS_PER_POINT: usize = 10_000;

impl PairSampler {
    pub fn new(sample_box: SampleBox, seed: u64) -> Self {
        Self { sample_box, seed }
    }

    pub fn sample_points(
        &self,
        problem: &dyn SingularProblem,
        count: usize,
    ) -> Result<Vec<Vec<f64>>> {
        self.sample_box.validate(problem.dimension())?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let mut tries = 0;
            let point = loop {
                let x = sample_in_box(&self.sample_box, &mut rng);
                if problem.in_domain(&x) {
                    break x;
                }
                tries += 1;
                if tries >= MAX_REJECTIONS_PER_POINT {
                    return Err(Error::Precondition(
                        "sample box barely intersects the domain".into(),
                    ));
                }
            };
            out.push(point);
        }
        Ok(out)
    }

    pub fn sample_pairs(
        &self,
        problem: &dyn SingularProblem,
        count: usize,
    ) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        let mut points = self.sample_points(problem, 2 * count)?.into_iter();
        Ok((0..count)
            .map(|_| (points.next().unwrap(), points.next().unwrap()))
            .collect())
    }
}

/// `count` points geometrically spaced on `[lo, hi]`.
pub fn log_uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(
        lo > 0.0 && hi > lo && count >= 2,
        "need 0 < lo < hi and count >= 2"
    );
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Points of `D` at the given distances from the singular set.
pub fn radial_points(problem: &dyn SingularProblem, distances: &[f64]) -> Result<Vec<Vec<f64>>> {
    distances
        .iter()
        .map(|&r| {
            problem.point_at_distance(r).ok_or_else(|| {
                Error::UnsupportedProblem(format!(
                    "{} has no radial parametrisation",
                    problem.name()
                ))
            })
        })
        .collect()
}

fn require_in_domain(problem: &dyn SingularProblem, points: &[Vec<f64>]) -> Result<()> {
    if points.is_empty() {
        return Err(invalid("no sample points"));
    }
    match points.iter().find(|x| !problem.in_domain(x)) {
        Some(x) => Err(Error::Precondition(format!(
            "grid point {x:?} lies outside the domain"
        ))),
        None => Ok(()),
    }
}

fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn concat(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().chain(y).copied().collect()
}

/// `<b(x) - b(y), x - y> <= c |x - y|^2` on sampled pairs.
pub fn check_one_sided_lipschitz(
    problem: &dyn SingularProblem,
    sampler: &PairSampler,
    pairs: usize,
    c_declared: f64,
) -> Result<CheckReport> {
    let pairs = sampler.sample_pairs(problem, pairs)?;
    let evals: Vec<(Sample, f64)> = pairs
        .par_iter()
        .map(|(x, y)| {
            let db = sub(&problem.drift(x), &problem.drift(y));
            let dx = sub(x, y);
            let inner = dot(&db, &dx);
            let dist2 = dot(&dx, &dx);
            let bound = c_declared * dist2;
            let ratio = if dist2 > 0.0 {
                inner / dist2
            } else {
                f64::NEG_INFINITY
            };
            let sample = Sample {
                margin: bound - inner,
                scale: bound.abs() + inner.abs(),
                witness: concat(x, y),
            };
            (sample, ratio)
        })
        .collect();
    let implied = max_of(evals.iter().map(|e| e.1)).max(0.0);
    let r = reduce(evals.into_iter().map(|e| e.0).collect());
    Ok(report(AssumptionId::OneSidedLipschitz, r, Some(implied)))
}

/// `<grad rho(x), b(x)> >= h1 rho^-alpha - h2 rho^-beta - h3 - h4 rho` on grid points.
/// The implied constant is the largest `h1` the samples support with the other
/// constants held fixed.
pub fn check_push_away(
    problem: &dyn SingularProblem,
    points: &[Vec<f64>],
    constants: &StructuralConstants,
) -> Result<CheckReport> {
    require_in_domain(problem, points)?;
    let StructuralConstants {
        alpha,
        beta,
        h1,
        h2,
        h3,
        h4,
        ..
    } = *constants;
    let evals: Vec<(Sample, f64)> = points
        .par_iter()
        .map(|x| {
            let rho = problem.rho(x);
            let lhs = dot(&problem.grad_rho(x), &problem.drift(x));
            let lower_order = h2 * rho.powf(-beta) + h3 + h4 * rho;
            let rhs = h1 * rho.powf(-alpha) - lower_order;
            let h1_supported = (lhs + lower_order) * rho.powf(alpha);
            let sample = Sample {
                margin: lhs - rhs,
                scale: lhs.abs() + h1 * rho.powf(-alpha) + lower_order.abs(),
                witness: x.clone(),
            };
            (sample, h1_supported)
        })
        .collect();
    let implied = evals.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let r = reduce(evals.into_iter().map(|e| e.0).collect());
    Ok(report(AssumptionId::PushAway, r, Some(implied)))
}

/// `|hess rho(x)|_F <= c (1 + rho^-beta)` on grid points.
pub fn check_hess_rho_bound(
    problem: &dyn SingularProblem,
    points: &[Vec<f64>],
    constants: &StructuralConstants,
) -> Result<CheckReport> {
    require_in_domain(problem, points)?;
    if problem.hess_rho(&points[0]).is_none() {
        return Err(Error::Precondition(format!(
            "{} provides no Hessian of rho",
            problem.name()
        )));
    }
    let evals: Vec<(Sample, f64)> = points
        .par_iter()
        .map(|x| {
            let hess = problem.hess_rho(x).unwrap_or_default();
            let frob = hess.iter().map(|h| h * h).sum::<f64>().sqrt();
            let weight = 1.0 + problem.rho(x).powf(-constants.beta);
            let bound = constants.c * weight;
            let sample = Sample {
                margin: bound - frob,
                scale: bound.abs() + frob,
                witness: x.clone(),
            };
            (sample, frob / weight)
        })
        .collect();
    let implied = max_of(evals.iter().map(|e| e.1)).max(0.0);
    let r = reduce(evals.into_iter().map(|e| e.0).collect());
    Ok(report(AssumptionId::HessRhoBound, r, Some(implied)))
}

/// Exponents tried when searching for the smallest admissible `l`: `0.5, 1.0, ..., 2 l`.
pub fn exponent_grid(declared_l: f64) -> Vec<f64> {
    let top = (4.0 * declared_l).floor().max(1.0) as usize;
    (1..=top).map(|k| 0.5 * k as f64).collect()
}

/// `|b(x) - b(y)| <= c (1 + rho(x)^-l + rho(y)^-l) |x - y|` on sampled pairs.
///
/// Reports the smallest `c` for the declared `l`, and the smallest `l` on
/// [`exponent_grid`] for which the declared `c` suffices.
pub fn check_inv_poly_lipschitz(
    problem: &dyn SingularProblem,
    sampler: &PairSampler,
    pairs: usize,
    constants: &StructuralConstants,
) -> Result<CheckReport> {
    let pairs = sampler.sample_pairs(problem, pairs)?;
    let (c, l) = (constants.c, constants.l);
    // Per pair: |b(x) - b(y)|, |x - y|, rho(x), rho(y).
    let raw: Vec<(f64, f64, f64, f64)> = pairs
        .par_iter()
        .map(|(x, y)| {
            let db = sub(&problem.drift(x), &problem.drift(y));
            let dx = sub(x, y);
            (
                dot(&db, &db).sqrt(),
                dot(&dx, &dx).sqrt(),
                problem.rho(x),
                problem.rho(y),
            )
        })
        .collect();
    let ratio_at = |exp: f64| {
        max_of(
            raw.iter()
                .filter(|r| r.1 > 0.0)
                .map(|&(db, dx, rx, ry)| db / ((1.0 + rx.powf(-exp) + ry.powf(-exp)) * dx)),
        )
        .max(0.0)
    };
    let samples = pairs
        .iter()
        .zip(&raw)
        .map(|((x, y), &(db, dx, rx, ry))| {
            let bound = c * (1.0 + rx.powf(-l) + ry.powf(-l)) * dx;
            Sample {
                margin: bound - db,
                scale: bound.abs() + db,
                witness: concat(x, y),
            }
        })
        .collect();
    let implied_exponent = exponent_grid(l)
        .into_iter()
        .find(|&e| ratio_at(e) <= c * (1.0 + RELATIVE_TOLERANCE));
    let mut out = report(
        AssumptionId::InvPolyLipschitz,
        reduce(samples),
        Some(ratio_at(l)),
    );
    out.implied_exponent = implied_exponent;
    Ok(out)
}

/// Analytic constants the kernel checks are audited against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConstants {
    /// `sup max(K', 0)`.
    pub monotone_c: f64,
    /// `p(p+1) a1 + q(q+1) a2`, valid with exponent `p + 2`.
    pub lipschitz_c: f64,
    pub lipschitz_l: f64,
    pub h1: f64,
    pub h2: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl KernelConstants {
    pub fn for_params(params: &LennardJonesPairParams) -> Self {
        Self {
            monotone_c: params.kernel_derivative_sup(),
            lipschitz_c: params.kernel_lipschitz_constant(),
            lipschitz_l: params.kernel_lipschitz_exponent(),
            h1: params.p_exp * params.a1,
            h2: params.q_exp * params.a2,
            alpha: params.alpha(),
            beta: params.beta(),
        }
    }
}

/// The three scalar kernel conditions: one-sided Lipschitz, inverse-polynomial
/// Lipschitz with `l = p + 2`, and push-away with `h1 = p a1`, `h2 = q a2`,
/// `alpha = p + 1`, `beta = q + 1`. Pairs are drawn log-uniformly over the span
/// of `radial_grid`; the push-away condition is checked on the grid itself.
pub fn check_lj_kernel(
    params: &LennardJonesPairParams,
    radial_grid: &[f64],
    pairs: usize,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    params.validate()?;
    if radial_grid.is_empty() || radial_grid.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::Precondition(
            "radial grid must lie in (0, inf)".into(),
        ));
    }
    let k = KernelConstants::for_params(params);
    let lo = radial_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = radial_grid.iter().copied().fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = SampleBox::log_uniform(vec![lo], vec![hi.max(lo * (1.0 + 1e-9))]);
    let pair_list: Vec<(f64, f64)> = (0..pairs)
        .map(|_| {
            (
                sample_in_box(&span, &mut rng)[0],
                sample_in_box(&span, &mut rng)[0],
            )
        })
        .collect();

    let monotone: Vec<(Sample, f64)> = pair_list
        .par_iter()
        .map(|&(x, y)| {
            let lhs = (params.kernel(x) - params.kernel(y)) * (x - y);
            let bound = k.monotone_c * (x - y) * (x - y);
            let ratio = if x != y {
                lhs / ((x - y) * (x - y))
            } else {
                f64::NEG_INFINITY
            };
            let s = Sample {
                margin: bound - lhs,
                scale: bound + lhs.abs(),
                witness: vec![x, y],
            };
            (s, ratio)
        })
        .collect();
    let implied = max_of(monotone.iter().map(|e| e.1)).max(0.0);
    let mut monotone_report = report(
        AssumptionId::KMonotone,
        reduce(monotone.into_iter().map(|e| e.0).collect()),
        Some(implied),
    );

    let lipschitz: Vec<(Sample, f64)> = pair_list
        .par_iter()
        .map(|&(x, y)| {
            let diff = (params.kernel(x) - params.kernel(y)).abs();
            let weight = (1.0 + x.powf(-k.lipschitz_l) + y.powf(-k.lipschitz_l)) * (x - y).abs();
            let bound = k.lipschitz_c * weight;
            let ratio = if weight > 0.0 { diff / weight } else { 0.0 };
            let s = Sample {
                margin: bound - diff,
                scale: bound + diff,
                witness: vec![x, y],
            };
            (s, ratio)
        })
        .collect();
    let implied = max_of(lipschitz.iter().map(|e| e.1)).max(0.0);
    let mut lipschitz_report = report(
        AssumptionId::KInvLipschitz,
        reduce(lipschitz.into_iter().map(|e| e.0).collect()),
        Some(implied),
    );
    lipschitz_report.implied_exponent = Some(k.lipschitz_l);

    let push: Vec<(Sample, f64)> = radial_grid
        .par_iter()
        .map(|&r| {
            let lhs = params.kernel(r);
            let lower_order = k.h2 * r.powf(-k.beta) + KERNEL_SLACK + KERNEL_SLACK * r;
            let rhs = k.h1 * r.powf(-k.alpha) - lower_order;
            let h1_supported = (lhs + lower_order) * r.powf(k.alpha);
            let s = Sample {
                margin: lhs - rhs,
                scale: lhs.abs() + k.h1 * r.powf(-k.alpha) + lower_order,
                witness: vec![r],
            };
            (s, h1_supported)
        })
        .collect();
    let implied = push.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let mut push_report = report(
        AssumptionId::KPushAway,
        reduce(push.into_iter().map(|e| e.0).collect()),
        Some(implied),
    );

    for r in [
        &mut monotone_report,
        &mut lipschitz_report,
        &mut push_report,
    ] {
        r.passed &= r.implied_constant.is_some_and(f64::is_finite);
    }
    Ok(vec![monotone_report, lipschitz_report, push_report])
}
