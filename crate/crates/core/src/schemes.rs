//! Tamed and plain Euler schemes.
//!
//! The tamed scheme replaces the drift by
//! `b_n(x) = b(x) 1{x in D, rho(x) >= delta n^(-w)}` and steps
//! `X_{j+1} = X_j + b_n(X_j) T/n + dW_j`. The truncated drift is defined on all of
//! `R^d`, so a tamed path runs to the horizon even after it crosses the threshold
//! or leaves `D`; the first such grid index is recorded as the discrete stopping
//! time. Plain Euler uses `b` itself and halts when the state leaves `D`.

use serde::{Deserialize, Serialize};

use crate::brownian::BrownianFabric;
use crate::error::{invalid, Error, Result};
use crate::problems::SingularProblem;

/// Relative slack when comparing `w` against `1 / (3 l)`, so that a `w` computed
/// as `1.0 / 12.0` is accepted for `l = 4`.
const EXPONENT_SLACK: f64 = 1e-12;

/// Scheme parameters shared across levels: everything but the step count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeSettings {
    pub horizon: f64,
    pub delta: f64,
    pub w_exp: f64,
    pub taming: bool,
}

impl SchemeSettings {
    /// Tamed settings with `w = 1 / (3 l)` from the problem's declared `l`
    /// (`w = 0` when the problem declares no constants).
    pub fn tamed_for(problem: &dyn SingularProblem, horizon: f64, delta: f64) -> Self {
        let w_exp = problem.constants().map_or(0.0, |c| c.max_taming_exponent());
        Self {
            horizon,
            delta,
            w_exp,
            taming: true,
        }
    }

    pub fn at_steps(&self, steps: usize) -> SchemeConfig {
        SchemeConfig {
            horizon: self.horizon,
            steps,
            delta: self.delta,
            w_exp: self.w_exp,
            taming: self.taming,
        }
    }

    pub fn validate(&self, problem: &dyn SingularProblem) -> Result<()> {
        self.at_steps(1).validate(problem)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub horizon: f64,
    pub steps: usize,
    pub delta: f64,
    pub w_exp: f64,
    pub taming: bool,
}

impl SchemeConfig {
    pub fn settings(&self) -> SchemeSettings {
        SchemeSettings {
            horizon: self.horizon,
            delta: self.delta,
            w_exp: self.w_exp,
            taming: self.taming,
        }
    }

    pub fn step_size(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// `delta * n^(-w)`.
    pub fn taming_threshold(&self) -> f64 {
        self.delta * (self.steps as f64).powf(-self.w_exp)
    }

    pub fn validate(&self, problem: &dyn SingularProblem) -> Result<()> {
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(invalid(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.steps == 0 {
            return Err(invalid("step count must be at least 1"));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(invalid(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if !(self.w_exp >= 0.0) || !self.w_exp.is_finite() {
            return Err(invalid(format!(
                "w must be non-negative, got {}",
                self.w_exp
            )));
        }
        if self.taming {
            if let Some(constants) = problem.constants() {
                let w_max = constants.max_taming_exponent();
                if self.w_exp > w_max * (1.0 + EXPONENT_SLACK) {
                    return Err(invalid(format!(
                        "w = {} exceeds 1/(3l) = {w_max} for declared l = {}",
                        self.w_exp, constants.l
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Which branch the truncated drift took at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftBranch {
    /// `x` in `D` above the threshold (or plain Euler inside `D`): `b(x)`.
    Raw,
    /// Tamed scheme, indicator off: zero.
    Truncated,
}

/// Writes the scheme's drift at `x` into `out`. `None` for plain Euler outside `D`,
/// where the drift is undefined.
pub fn truncated_drift_into(
    problem: &dyn SingularProblem,
    config: &SchemeConfig,
    threshold: f64,
    x: &[f64],
    out: &mut [f64],
) -> Option<DriftBranch> {
    if !problem.in_domain(x) {
        if config.taming {
            out.fill(0.0);
            return Some(DriftBranch::Truncated);
        }
        return None;
    }
    if config.taming && !(problem.rho(x) >= threshold) {
        out.fill(0.0);
        return Some(DriftBranch::Truncated);
    }
    problem.drift_into(x, out);
    Some(DriftBranch::Raw)
}

/// The scheme's drift `b_n(x)` (tamed) or `b(x)` (plain Euler, `x` in `D`).
pub fn truncated_drift(
    problem: &dyn SingularProblem,
    config: &SchemeConfig,
    x: &[f64],
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; problem.dimension()];
    truncated_drift_into(problem, config, config.taming_threshold(), x, &mut out)
        .ok_or(Error::LeftDomain { index: 0 })?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anomaly {
    pub left_domain: bool,
    pub non_finite: bool,
}

/// A simulated grid path with its running statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    dimension: usize,
    /// Row-major, `(steps + 1) x dimension`.
    grid_values: Vec<f64>,
    /// Largest Euclidean norm over the grid.
    pub sup_norm: f64,
    /// Largest `1 / rho` over grid indices up to and including the stopping index;
    /// `+inf` if the stopping index lies outside `D`.
    pub sup_inv_rho: f64,
    /// First grid index outside `D` or with `rho <= delta n^(-w)`.
    pub tau_hit_index: Option<usize>,
    pub anomaly: Anomaly,
}

impl TrajectoryRecord {
    pub fn steps(&self) -> usize {
        self.grid_values.len() / self.dimension - 1
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.grid_values[j * self.dimension..(j + 1) * self.dimension]
    }

    pub fn grid_values(&self) -> &[f64] {
        &self.grid_values
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.grid_values.chunks_exact(self.dimension)
    }

    /// Grid indices strictly before the stopping index (all of them if never hit).
    pub fn pre_stop_len(&self) -> usize {
        self.tau_hit_index.unwrap_or(self.steps() + 1)
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

struct RunningStats<'a> {
    problem: &'a dyn SingularProblem,
    threshold: f64,
    sup_norm: f64,
    sup_inv_rho: f64,
    tau: Option<usize>,
}

impl RunningStats<'_> {
    /// Updates the statistics with grid point `j`; returns whether it lies in `D`.
    fn observe(&mut self, j: usize, x: &[f64]) -> bool {
        self.sup_norm = self.sup_norm.max(norm(x));
        let inside = self.problem.in_domain(x);
        if self.tau.is_some() {
            return inside;
        }
        if inside {
            let rho = self.problem.rho(x);
            self.sup_inv_rho = self.sup_inv_rho.max(1.0 / rho);
            if rho <= self.threshold {
                self.tau = Some(j);
            }
        } else {
            self.sup_inv_rho = f64::INFINITY;
            self.tau = Some(j);
        }
        inside
    }
}

/// Runs the scheme on the fabric aggregated to `config.steps` increments.
///
/// A non-finite state freezes the path at its last finite value and sets
/// `anomaly.non_finite`; plain Euler freezes on leaving `D` and sets
/// `anomaly.left_domain`.
pub fn simulate(
    problem: &dyn SingularProblem,
    config: &SchemeConfig,
    fabric: &BrownianFabric,
) -> Result<TrajectoryRecord> {
    config.validate(problem)?;
    let d = problem.dimension();
    if fabric.dimension() != d {
        return Err(Error::Config(format!(
            "fabric dimension {} does not match problem dimension {d}",
            fabric.dimension()
        )));
    }
    let horizon_gap = (fabric.horizon() - config.horizon).abs();
    if horizon_gap > 1e-12 * config.horizon {
        return Err(Error::Config(format!(
            "fabric horizon {} differs from scheme horizon {}",
            fabric.horizon(),
            config.horizon
        )));
    }
    let increments = fabric.coarsen(config.steps)?;
    let n = config.steps;
    let h = config.step_size();
    let threshold = config.taming_threshold();

    let mut grid = Vec::with_capacity((n + 1) * d);
    grid.extend_from_slice(problem.initial_point());
    let mut stats = RunningStats {
        problem,
        threshold,
        sup_norm: 0.0,
        sup_inv_rho: 0.0,
        tau: None,
    };
    let mut anomaly = Anomaly::default();
    let mut drift = vec![0.0; d];
    let mut next = vec![0.0; d];

    let mut inside = stats.observe(0, problem.initial_point());
    let mut j = 0;
    while j < n {
        let x = &grid[j * d..(j + 1) * d];
        if truncated_drift_into(problem, config, threshold, x, &mut drift).is_none() {
            debug_assert!(!inside);
            break;
        }
        for k in 0..d {
            next[k] = x[k] + drift[k] * h + increments[j * d + k];
        }
        if !next.iter().all(|v| v.is_finite()) {
            anomaly.non_finite = true;
            break;
        }
        grid.extend_from_slice(&next);
        j += 1;
        inside = stats.observe(j, &next);
        if !inside {
            anomaly.left_domain = true;
        }
    }
    if j < n {
        // Frozen: repeat the last state to the end of the grid.
        if !inside {
            anomaly.left_domain = true;
        }
        let last = grid[j * d..(j + 1) * d].to_vec();
        for _ in j..n {
            grid.extend_from_slice(&last);
        }
    }

    Ok(TrajectoryRecord {
        dimension: d,
        grid_values: grid,
        sup_norm: stats.sup_norm,
        sup_inv_rho: stats.sup_inv_rho,
        tau_hit_index: stats.tau,
        anomaly,
    })
}

/// Counts of pre-stopping grid points inspected by [`audit_tamed_path`] and how
/// many violated the taming identity or the threshold lower bound.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TamingAudit {
    pub checked: u64,
    pub identity_violations: u64,
    pub lower_bound_violations: u64,
}

impl TamingAudit {
    pub fn merge(&mut self, other: &TamingAudit) {
        self.checked += other.checked;
        self.identity_violations += other.identity_violations;
        self.lower_bound_violations += other.lower_bound_violations;
    }

    pub fn is_clean(&self) -> bool {
        self.identity_violations == 0 && self.lower_bound_violations == 0
    }
}

/// Re-evaluates a tamed path at every grid index before its stopping index:
/// the truncated drift must equal the raw drift bit for bit, and `rho` must stay
/// at or above `min(rho(x0), delta n^(-w))`.
pub fn audit_tamed_path(
    problem: &dyn SingularProblem,
    config: &SchemeConfig,
    record: &TrajectoryRecord,
) -> TamingAudit {
    let threshold = config.taming_threshold();
    let floor = problem.rho(problem.initial_point()).min(threshold);
    let d = problem.dimension();
    let mut tamed = vec![0.0; d];
    let mut raw = vec![0.0; d];
    let mut audit = TamingAudit::default();
    for x in record.points().take(record.pre_stop_len()) {
        audit.checked += 1;
        let branch = truncated_drift_into(problem, config, threshold, x, &mut tamed);
        problem.drift_into(x, &mut raw);
        let same = branch == Some(DriftBranch::Raw)
            && tamed
                .iter()
                .zip(&raw)
                .all(|(a, b)| a.to_bits() == b.to_bits());
        if !same {
            audit.identity_violations += 1;
        }
        if !(problem.rho(x) >= floor) {
            audit.lower_bound_violations += 1;
        }
    }
    audit
}
