//! Singular SDE problems `dX = b(X) dt + dW` on an open set `D`.
//!
//! A problem bundles the drift `b`, membership in `D`, the distance `rho` to the
//! singular set together with its derivatives, and the structural constants the
//! user asserts for the drift (one-sided Lipschitz constant, push-away exponents,
//! inverse-polynomial Lipschitz exponent). The constants are declarative: the
//! stepper only reads `l` to pick the taming exponent, and the [`checker`]
//! audits the rest on samples.
//!
//! Drift and `rho` are only meaningful inside `D`; callers must test
//! [`SingularProblem::in_domain`] first.
//!
//! [`checker`]: crate::checker

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::error::{invalid, Result};

/// Distance reported by problems without a singular set. Finite so that threshold
/// comparisons stay well defined; large enough that no taming threshold reaches it.
pub const SMOOTH_RHO_SENTINEL: f64 = 1.0e308;

/// Declared constants `c, alpha, beta, l, h1..h4` of the structural assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralConstants {
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub l: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
}

impl StructuralConstants {
    /// Largest taming exponent `w` admitted by the declared `l`.
    pub fn max_taming_exponent(&self) -> f64 {
        1.0 / (3.0 * self.l)
    }
}

/// An SDE with additive unit noise whose drift may blow up near a singular set.
///
/// Implementations are immutable and all methods are pure, so one problem can be
/// shared by any number of worker threads.
pub trait SingularProblem: Send + Sync {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    fn initial_point(&self) -> &[f64];

    /// Membership in the open set `D`.
    fn in_domain(&self, x: &[f64]) -> bool;

    /// Writes `b(x)` into `out`. Only defined for `x` in `D`.
    fn drift_into(&self, x: &[f64], out: &mut [f64]);

    /// Distance from `x` to the singular set. Only defined for `x` in `D`.
    fn rho(&self, x: &[f64]) -> f64;

    fn grad_rho_into(&self, x: &[f64], out: &mut [f64]);

    /// Row-major `d x d` Hessian of `rho`, when the problem provides one.
    fn hess_rho(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn constants(&self) -> Option<&StructuralConstants>;

    fn has_singularity(&self) -> bool;

    /// A point of `D` at the given distance from the singular set, used by the
    /// checker to build radial grids. `None` if the problem has no such map.
    fn point_at_distance(&self, _rho: f64) -> Option<Vec<f64>> {
        None
    }

    fn drift(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        self.drift_into(x, &mut out);
        out
    }

    fn grad_rho(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        self.grad_rho_into(x, &mut out);
        out
    }
}

/// Scalar drift `b(x) = x^(-alpha)` on `D = (0, inf)` with `rho(x) = x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLaw {
    alpha: f64,
    x0: [f64; 1],
    constants: StructuralConstants,
}

/// Slack used for the lower-order push-away terms of the power law, which need to
/// be strictly positive but play no role.
const POWER_LAW_SLACK: f64 = 1.0e-6;

impl PowerLaw {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(invalid(format!("power law needs alpha > 1, got {alpha}")));
        }
        Ok(Self {
            alpha,
            x0: [1.0],
            constants: StructuralConstants {
                // |b'(xi)| = alpha xi^(-alpha-1), so the mean value theorem gives c = alpha
                // with l = alpha + 1. The drift is decreasing, so any c >= 0 works for the
                // one-sided condition, and rho has zero Hessian.
                c: alpha,
                alpha,
                beta: 0.0,
                l: alpha + 1.0,
                h1: 1.0,
                h2: POWER_LAW_SLACK,
                h3: POWER_LAW_SLACK,
                h4: POWER_LAW_SLACK,
            },
        })
    }

    pub fn with_initial_point(mut self, x0: f64) -> Result<Self> {
        if !(x0 > 0.0) || !x0.is_finite() {
            return Err(invalid(format!(
                "power law initial point must lie in (0, inf), got {x0}"
            )));
        }
        self.x0 = [x0];
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl SingularProblem for PowerLaw {
    fn name(&self) -> &str {
        "power_law"
    }

    fn dimension(&self) -> usize {
        1
    }

    fn initial_point(&self) -> &[f64] {
        &self.x0
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x[0] > 0.0 && x[0].is_finite()
    }

    fn drift_into(&self, x: &[f64], out: &mut [f64]) {
        out[0] = x[0].powf(-self.alpha);
    }

    fn rho(&self, x: &[f64]) -> f64 {
        x[0]
    }

    fn grad_rho_into(&self, _x: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
    }

    fn hess_rho(&self, _x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0])
    }

    fn constants(&self) -> Option<&StructuralConstants> {
        Some(&self.constants)
    }

    fn has_singularity(&self) -> bool {
        true
    }

    fn point_at_distance(&self, rho: f64) -> Option<Vec<f64>> {
        Some(vec![rho])
    }
}

/// Lennard-Jones type kernel `K(r) = p a1 r^(-p-1) - q a2 r^(-q-1)` plus the
/// linear confinement `Q(x) = -lambda x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LennardJonesPairParams {
    pub a1: f64,
    pub a2: f64,
    pub p_exp: f64,
    pub q_exp: f64,
    pub lambda: f64,
}

impl Default for LennardJonesPairParams {
    fn default() -> Self {
        Self {
            a1: 1.0,
            a2: 1.0,
            p_exp: 12.0,
            q_exp: 6.0,
            lambda: 1.0,
        }
    }
}

impl LennardJonesPairParams {
    pub fn validate(&self) -> Result<()> {
        let Self {
            a1,
            a2,
            p_exp,
            q_exp,
            lambda,
        } = *self;
        let all_finite = [a1, a2, p_exp, q_exp, lambda].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(invalid("Lennard-Jones parameters must be finite"));
        }
        if !(a1 > 0.0 && a2 > 0.0) {
            return Err(invalid(format!(
                "need a1, a2 > 0, got a1 = {a1}, a2 = {a2}"
            )));
        }
        if !(p_exp > 1.0) {
            return Err(invalid(format!("need p > 1, got {p_exp}")));
        }
        if !(q_exp > 0.0 && q_exp < p_exp) {
            return Err(invalid(format!(
                "need 0 < q < p, got q = {q_exp}, p = {p_exp}"
            )));
        }
        if !(lambda >= 0.0) {
            return Err(invalid(format!("need lambda >= 0, got {lambda}")));
        }
        let (alpha, beta) = (self.alpha(), self.beta());
        if !(beta < alpha - 1.0) {
            return Err(invalid(format!(
                "push-away exponents alpha = {alpha}, beta = {beta} violate beta < alpha - 1"
            )));
        }
        Ok(())
    }

    /// Repulsive exponent `p + 1` of the kernel.
    pub fn alpha(&self) -> f64 {
        self.p_exp + 1.0
    }

    /// Attractive exponent `q + 1` of the kernel.
    pub fn beta(&self) -> f64 {
        self.q_exp + 1.0
    }

    /// Local Lipschitz blow-up exponent of the kernel, `p + 2`.
    pub fn kernel_lipschitz_exponent(&self) -> f64 {
        self.p_exp + 2.0
    }

    pub fn kernel(&self, r: f64) -> f64 {
        self.p_exp * self.a1 * r.powf(-self.p_exp - 1.0)
            - self.q_exp * self.a2 * r.powf(-self.q_exp - 1.0)
    }

    pub fn kernel_derivative(&self, r: f64) -> f64 {
        let (p, q) = (self.p_exp, self.q_exp);
        -p * (p + 1.0) * self.a1 * r.powf(-p - 2.0) + q * (q + 1.0) * self.a2 * r.powf(-q - 2.0)
    }

    pub fn confinement(&self, x: f64) -> f64 {
        -self.lambda * x
    }

    /// `sup_{r > 0} max(K'(r), 0)`, attained where `K''` vanishes.
    pub fn kernel_derivative_sup(&self) -> f64 {
        let (p, q) = (self.p_exp, self.q_exp);
        let ratio = (p * (p + 1.0) * (p + 2.0) * self.a1) / (q * (q + 1.0) * (q + 2.0) * self.a2);
        let r_star = ratio.powf(1.0 / (p - q));
        self.kernel_derivative(r_star).max(0.0)
    }

    /// `p(p+1) a1 + q(q+1) a2`: bounds `|K'(r)| / (1 + r^(-p-2))` for all `r > 0`.
    pub fn kernel_lipschitz_constant(&self) -> f64 {
        let (p, q) = (self.p_exp, self.q_exp);
        p * (p + 1.0) * self.a1 + q * (q + 1.0) * self.a2
    }
}

/// Two scalar particles with pair interaction `K` and confinement `Q`:
/// `b(x) = (Q(x1) - K(x2 - x1), Q(x2) + K(x2 - x1))` on `D = {x1 < x2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LennardJonesPair {
    params: LennardJonesPairParams,
    x0: [f64; 2],
    constants: StructuralConstants,
}

impl LennardJonesPair {
    pub fn new(params: LennardJonesPairParams, x0: [f64; 2]) -> Result<Self> {
        params.validate()?;
        if !(x0[0] < x0[1]) || !x0.iter().all(|v| v.is_finite()) {
            return Err(invalid(format!(
                "pair initial point must satisfy x1 < x2, got ({}, {})",
                x0[0], x0[1]
            )));
        }
        let LennardJonesPairParams {
            a1,
            a2,
            p_exp: p,
            q_exp: q,
            lambda,
        } = params;
        // With rho = r / sqrt(2): <b, grad rho> = sqrt(2) K(sqrt(2) rho) - lambda rho
        //   = p a1 2^(-p/2) rho^(-p-1) - q a2 2^(-q/2) rho^(-q-1) - lambda rho.
        let constants = StructuralConstants {
            c: lambda + 2.0 * params.kernel_lipschitz_constant(),
            alpha: params.alpha(),
            beta: params.beta(),
            l: params.kernel_lipschitz_exponent(),
            h1: p * a1 * 2f64.powf(-p / 2.0),
            h2: q * a2 * 2f64.powf(-q / 2.0),
            h3: 1.0e-9,
            h4: lambda.max(1.0e-9),
        };
        Ok(Self {
            params,
            x0,
            constants,
        })
    }

    pub fn params(&self) -> &LennardJonesPairParams {
        &self.params
    }
}

impl SingularProblem for LennardJonesPair {
    fn name(&self) -> &str {
        "lj_pair"
    }

    fn dimension(&self) -> usize {
        2
    }

    fn initial_point(&self) -> &[f64] {
        &self.x0
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x[0] < x[1] && x[0].is_finite() && x[1].is_finite()
    }

    fn drift_into(&self, x: &[f64], out: &mut [f64]) {
        let k = self.params.kernel(x[1] - x[0]);
        out[0] = self.params.confinement(x[0]) - k;
        out[1] = self.params.confinement(x[1]) + k;
    }

    fn rho(&self, x: &[f64]) -> f64 {
        (x[1] - x[0]) * FRAC_1_SQRT_2
    }

    fn grad_rho_into(&self, _x: &[f64], out: &mut [f64]) {
        out[0] = -FRAC_1_SQRT_2;
        out[1] = FRAC_1_SQRT_2;
    }

    fn hess_rho(&self, _x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; 4])
    }

    fn constants(&self) -> Option<&StructuralConstants> {
        Some(&self.constants)
    }

    fn has_singularity(&self) -> bool {
        true
    }

    fn point_at_distance(&self, rho: f64) -> Option<Vec<f64>> {
        let half = 0.5 * SQRT_2 * rho;
        Some(vec![-half, half])
    }
}

/// Smooth oracle problems on all of `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothKind {
    Brownian,
    OrnsteinUhlenbeck { lambda: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothSanity {
    kind: SmoothKind,
    x0: Vec<f64>,
}

impl SmoothSanity {
    pub fn new(kind: SmoothKind, dimension: usize, x0: Vec<f64>) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if x0.len() != dimension {
            return Err(invalid(format!(
                "initial point has {} coordinates, expected {dimension}",
                x0.len()
            )));
        }
        if !x0.iter().all(|v| v.is_finite()) {
            return Err(invalid("initial point must be finite"));
        }
        if let SmoothKind::OrnsteinUhlenbeck { lambda } = kind {
            if !(lambda > 0.0) || !lambda.is_finite() {
                return Err(invalid(format!(
                    "Ornstein-Uhlenbeck needs lambda > 0, got {lambda}"
                )));
            }
        }
        Ok(Self { kind, x0 })
    }

    pub fn brownian(dimension: usize) -> Result<Self> {
        Self::new(SmoothKind::Brownian, dimension, vec![0.0; dimension])
    }

    pub fn kind(&self) -> SmoothKind {
        self.kind
    }
}

impl SingularProblem for SmoothSanity {
    fn name(&self) -> &str {
        match self.kind {
            SmoothKind::Brownian => "brownian",
            SmoothKind::OrnsteinUhlenbeck { .. } => "ou",
        }
    }

    fn dimension(&self) -> usize {
        self.x0.len()
    }

    fn initial_point(&self) -> &[f64] {
        &self.x0
    }

    fn in_domain(&self, _x: &[f64]) -> bool {
        true
    }

    fn drift_into(&self, x: &[f64], out: &mut [f64]) {
        match self.kind {
            SmoothKind::Brownian => out.fill(0.0),
            SmoothKind::OrnsteinUhlenbeck { lambda } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = -lambda * xi;
                }
            }
        }
    }

    fn rho(&self, _x: &[f64]) -> f64 {
        SMOOTH_RHO_SENTINEL
    }

    fn grad_rho_into(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn hess_rho(&self, _x: &[f64]) -> Option<Vec<f64>> {
        let d = self.dimension();
        Some(vec![0.0; d * d])
    }

    fn constants(&self) -> Option<&StructuralConstants> {
        None
    }

    fn has_singularity(&self) -> bool {
        false
    }
}

/// The built-in problems, selectable by key from configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinProblem {
    PowerLaw(PowerLaw),
    LennardJonesPair(LennardJonesPair),
    Smooth(SmoothSanity),
}

impl BuiltinProblem {
    fn inner(&self) -> &dyn SingularProblem {
        match self {
            BuiltinProblem::PowerLaw(p) => p,
            BuiltinProblem::LennardJonesPair(p) => p,
            BuiltinProblem::Smooth(p) => p,
        }
    }
}

impl SingularProblem for BuiltinProblem {
    fn name(&self) -> &str {
        self.inner().name()
    }
    fn dimension(&self) -> usize {
        self.inner().dimension()
    }
    fn initial_point(&self) -> &[f64] {
        self.inner().initial_point()
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        self.inner().in_domain(x)
    }
    fn drift_into(&self, x: &[f64], out: &mut [f64]) {
        self.inner().drift_into(x, out)
    }
    fn rho(&self, x: &[f64]) -> f64 {
        self.inner().rho(x)
    }
    fn grad_rho_into(&self, x: &[f64], out: &mut [f64]) {
        self.inner().grad_rho_into(x, out)
    }
    fn hess_rho(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.inner().hess_rho(x)
    }
    fn constants(&self) -> Option<&StructuralConstants> {
        self.inner().constants()
    }
    fn has_singularity(&self) -> bool {
        self.inner().has_singularity()
    }
    fn point_at_distance(&self, rho: f64) -> Option<Vec<f64>> {
        self.inner().point_at_distance(rho)
    }
}

impl From<PowerLaw> for BuiltinProblem {
    fn from(p: PowerLaw) -> Self {
        BuiltinProblem::PowerLaw(p)
    }
}

impl From<LennardJonesPair> for BuiltinProblem {
    fn from(p: LennardJonesPair) -> Self {
        BuiltinProblem::LennardJonesPair(p)
    }
}

impl From<SmoothSanity> for BuiltinProblem {
    fn from(p: SmoothSanity) -> Self {
        BuiltinProblem::Smooth(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn lj() -> LennardJonesPair {
        LennardJonesPair::new(LennardJonesPairParams::default(), [0.0, 1.0]).unwrap()
    }

    #[test]
    fn power_law_values() {
        let p = PowerLaw::new(3.0).unwrap();
        assert_eq!(p.drift(&[2.0]), vec![0.125]);
        assert_eq!(p.constants().unwrap().l, 4.0);
        assert_eq!(p.rho(&[1.0]), 1.0);
        assert_eq!(p.grad_rho(&[1.0]), vec![1.0]);
        assert_eq!(p.hess_rho(&[1.0]), Some(vec![0.0]));
        assert_eq!(p.initial_point(), &[1.0]);
        assert_eq!(p.with_initial_point(2.5).unwrap().initial_point(), &[2.5]);
    }

    #[test]
    fn power_law_rejects_small_alpha() {
        assert!(PowerLaw::new(1.0).is_err());
        assert!(PowerLaw::new(0.5).is_err());
        assert!(PowerLaw::new(f64::NAN).is_err());
        assert!(PowerLaw::new(3.0).unwrap().with_initial_point(0.0).is_err());
    }

    #[test]
    fn lj_drift_at_unit_separation() {
        let p = lj();
        // K(1) = 12 - 6 = 6, Q(0) = 0, Q(1) = -1
        assert_eq!(p.drift(&[0.0, 1.0]), vec![-6.0, 5.0]);
        assert_relative_eq!(
            p.rho(&[0.0, 1.0]),
            std::f64::consts::FRAC_1_SQRT_2,
            max_relative = 1e-15
        );
        let g = p.grad_rho(&[0.3, 2.0]);
        assert_relative_eq!(g[0].hypot(g[1]), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn lj_rejects_bad_input() {
        let params = LennardJonesPairParams::default();
        assert!(LennardJonesPair::new(params, [1.0, 0.0]).is_err());
        assert!(LennardJonesPair::new(params, [1.0, 1.0]).is_err());
        let close = LennardJonesPairParams {
            q_exp: 11.5,
            ..params
        };
        assert!(
            close.validate().is_err(),
            "beta < alpha - 1 needs q < p - 1"
        );
        let swapped = LennardJonesPairParams {
            q_exp: 12.0,
            ..params
        };
        assert!(LennardJonesPair::new(swapped, [0.0, 1.0]).is_err());
    }

    #[test]
    fn lj_constants_follow_kernel_exponents() {
        let c = *lj().constants().unwrap();
        assert_eq!((c.alpha, c.beta, c.l), (13.0, 7.0, 14.0));
        assert!(c.beta < c.alpha - 1.0);
    }

    #[test]
    fn kernel_derivative_sup_is_the_maximum() {
        let params = LennardJonesPairParams::default();
        let sup = params.kernel_derivative_sup();
        let brute = (1..200_000)
            .map(|i| params.kernel_derivative(0.5 + i as f64 * 2.5e-5))
            .fold(0.0f64, f64::max);
        assert!(sup >= brute - 1e-12);
        assert_relative_eq!(sup, brute, max_relative = 1e-6);
    }

    #[test]
    fn smooth_problems() {
        let b = SmoothSanity::brownian(3).unwrap();
        assert_eq!(b.drift(&[1.0, -4.0, 9.0]), vec![0.0; 3]);
        assert_eq!(b.rho(&[0.0; 3]), SMOOTH_RHO_SENTINEL);
        assert!(!b.has_singularity());
        let ou = SmoothSanity::new(
            SmoothKind::OrnsteinUhlenbeck { lambda: 2.0 },
            2,
            vec![0.0, 0.0],
        )
        .unwrap();
        assert_eq!(ou.drift(&[1.0, -1.0]), vec![-2.0, 2.0]);
        assert!(
            SmoothSanity::new(SmoothKind::OrnsteinUhlenbeck { lambda: 0.0 }, 1, vec![0.0]).is_err()
        );
        assert!(SmoothSanity::new(SmoothKind::Brownian, 0, vec![]).is_err());
    }

    #[test]
    fn point_at_distance_inverts_rho() {
        for rho in [1e-4, 0.3, 2.0] {
            let p = lj();
            let x = p.point_at_distance(rho).unwrap();
            assert!(p.in_domain(&x));
            assert_relative_eq!(p.rho(&x), rho, max_relative = 1e-14);
        }
    }

    fn finite_difference_gradient(problem: &dyn SingularProblem, x: &[f64], h: f64) -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let mut plus = x.to_vec();
                let mut minus = x.to_vec();
                plus[i] += h;
                minus[i] -= h;
                (problem.rho(&plus) - problem.rho(&minus)) / (2.0 * h)
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn rho_is_one_lipschitz_lj(x1 in -3.0..3.0f64, dx in 1e-3..3.0f64, y1 in -3.0..3.0f64, dy in 1e-3..3.0f64) {
            let p = lj();
            let (x, y) = ([x1, x1 + dx], [y1, y1 + dy]);
            let dist = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
            prop_assert!((p.rho(&x) - p.rho(&y)).abs() <= dist + 1e-12);
            prop_assert!(p.rho(&x) > 0.0);
        }

        #[test]
        fn rho_is_one_lipschitz_power_law(x in 1e-4..10.0f64, y in 1e-4..10.0f64) {
            let p = PowerLaw::new(3.0).unwrap();
            prop_assert!((p.rho(&[x]) - p.rho(&[y])).abs() <= (x - y).abs() + 1e-12);
        }

        #[test]
        fn grad_rho_matches_finite_differences(x1 in -3.0..3.0f64, gap in 1e-2..3.0f64, x in 1e-2..10.0f64) {
            let pair = lj();
            let point = [x1, x1 + gap];
            let fd = finite_difference_gradient(&pair, &point, 1e-5);
            for (a, b) in fd.iter().zip(pair.grad_rho(&point)) {
                prop_assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0));
            }
            let pl = PowerLaw::new(3.0).unwrap();
            let fd = finite_difference_gradient(&pl, &[x], 1e-5);
            prop_assert!((fd[0] - 1.0).abs() <= 1e-6);
        }

        #[test]
        fn power_law_drift_is_decreasing(x in 1e-3..50.0f64, y in 1e-3..50.0f64, alpha in 1.01..6.0f64) {
            let p = PowerLaw::new(alpha).unwrap();
            let lhs = (p.drift(&[x])[0] - p.drift(&[y])[0]) * (x - y);
            prop_assert!(lhs <= 0.0);
        }
    }
}
