//! Tamed Euler simulation of SDEs whose drift blows up non-integrably near a
//! singular set, with Monte Carlo estimators for strong error, inverse moments,
//! stopping probabilities and plain-Euler divergence, and a sampling auditor for
//! the structural assumptions on the drift.

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brownian;
pub mod checker;
pub mod error;
pub mod estimators;
pub mod output;
pub mod problems;
pub mod schemes;

pub use brownian::BrownianFabric;
pub use checker::{AssumptionId, CheckReport, PairSampler, SampleBox};
pub use error::{Error, Result};
pub use estimators::{
    divergence_probe, fit_rate, inverse_moment_curve, stopping_probability, strong_error_curve,
    DivergenceReport, ErrorCurve, ErrorEstimate, MonteCarloPlan, RateFit,
};
pub use problems::{
    BuiltinProblem, LennardJonesPair, LennardJonesPairParams, PowerLaw, SingularProblem,
    SmoothKind, SmoothSanity, StructuralConstants,
};
pub use schemes::{simulate, truncated_drift, SchemeConfig, SchemeSettings, TrajectoryRecord};
