//! Experiment configuration: JSON file keys, command-line overrides, and the
//! resolution step that fills problem-dependent defaults.

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use tamed_euler::estimators::MonteCarloPlan;
use tamed_euler::problems::{
    BuiltinProblem, LennardJonesPair, LennardJonesPairParams, PowerLaw, SmoothKind, SmoothSanity,
};
use tamed_euler::{SchemeSettings, SingularProblem};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Convergence,
    Moments,
    Stopping,
    Diverge,
    Check,
}

impl CommandKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Convergence => "convergence",
            CommandKind::Moments => "moments",
            CommandKind::Stopping => "stopping",
            CommandKind::Diverge => "diverge",
            CommandKind::Check => "check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum ProblemKey {
    #[serde(rename = "power_law")]
    #[value(name = "power_law")]
    PowerLaw,
    #[serde(rename = "lj_pair")]
    #[value(name = "lj_pair")]
    LjPair,
    #[serde(rename = "brownian")]
    #[value(name = "brownian")]
    Brownian,
    #[serde(rename = "ou")]
    #[value(name = "ou")]
    Ou,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProblemKeys {
    pub key: ProblemKey,
    pub alpha: f64,
    pub a1: f64,
    pub a2: f64,
    pub p_exp: f64,
    pub q_exp: f64,
    /// Confinement strength for `lj_pair`, mean reversion for `ou`.
    pub lambda: f64,
    pub dim: usize,
    pub x0: Option<Vec<f64>>,
}

impl Default for ProblemKeys {
    fn default() -> Self {
        let lj = LennardJonesPairParams::default();
        Self {
            key: ProblemKey::PowerLaw,
            alpha: 3.0,
            a1: lj.a1,
            a2: lj.a2,
            p_exp: lj.p_exp,
            q_exp: lj.q_exp,
            lambda: lj.lambda,
            dim: 1,
            x0: None,
        }
    }
}

impl ProblemKeys {
    fn default_x0(&self) -> Vec<f64> {
        match self.key {
            ProblemKey::PowerLaw => vec![1.0],
            ProblemKey::LjPair => vec![0.0, 1.0],
            ProblemKey::Brownian | ProblemKey::Ou => vec![0.0; self.dim],
        }
    }

    pub fn lj_params(&self) -> LennardJonesPairParams {
        LennardJonesPairParams {
            a1: self.a1,
            a2: self.a2,
            p_exp: self.p_exp,
            q_exp: self.q_exp,
            lambda: self.lambda,
        }
    }

    pub fn build(&self) -> Result<BuiltinProblem, CliError> {
        let x0 = self.x0.clone().unwrap_or_else(|| self.default_x0());
        let problem: BuiltinProblem = match self.key {
            ProblemKey::PowerLaw => {
                let [x] = x0[..] else {
                    return Err(CliError::Validation("power_law takes a single x0".into()));
                };
                PowerLaw::new(self.alpha)?.with_initial_point(x)?.into()
            }
            ProblemKey::LjPair => {
                let [x1, x2] = x0[..] else {
                    return Err(CliError::Validation("lj_pair takes x0 = x1,x2".into()));
                };
                LennardJonesPair::new(self.lj_params(), [x1, x2])?.into()
            }
            ProblemKey::Brownian => SmoothSanity::new(SmoothKind::Brownian, x0.len(), x0)?.into(),
            ProblemKey::Ou => SmoothSanity::new(
                SmoothKind::OrnsteinUhlenbeck {
                    lambda: self.lambda,
                },
                x0.len(),
                x0,
            )?
            .into(),
        };
        Ok(problem)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemeKeys {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub delta: f64,
    /// Defaults to `1 / (3 l)` for the problem's declared `l`.
    pub w: Option<f64>,
    pub taming: bool,
}

impl Default for SchemeKeys {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            delta: 1.0,
            w: None,
            taming: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorKeys {
    pub levels: Vec<usize>,
    pub p: f64,
    pub samples: usize,
    pub seed: u64,
    pub n_ref_multiplier: usize,
}

impl Default for EstimatorKeys {
    fn default() -> Self {
        Self {
            levels: (6..=12).map(|k| 1usize << k).collect(),
            p: 2.0,
            samples: 1000,
            seed: 0,
            n_ref_multiplier: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckKeys {
    pub pairs: usize,
    pub rho_min: f64,
    pub rho_max: f64,
    pub grid_points: usize,
}

impl Default for CheckKeys {
    fn default() -> Self {
        Self {
            pairs: 100_000,
            rho_min: 1e-4,
            rho_max: 10.0,
            grid_points: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    #[serde(default)]
    pub problem: ProblemKeys,
    #[serde(default)]
    pub scheme: SchemeKeys,
    #[serde(default)]
    pub estimator: EstimatorKeys,
    #[serde(default)]
    pub check: CheckKeys,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            problem: ProblemKeys::default(),
            scheme: SchemeKeys::default(),
            estimator: EstimatorKeys::default(),
            check: CheckKeys::default(),
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("bad config: {e}")))
    }

    /// Fills problem-dependent defaults (`x0`, `w`, output path) and validates
    /// everything that can be checked before running.
    pub fn resolve(mut self) -> Result<ResolvedExperiment, CliError> {
        let problem = self.problem.build()?;
        self.problem.x0 = Some(problem.initial_point().to_vec());
        let w = match self.scheme.w {
            Some(w) => w,
            None => problem.constants().map_or(0.0, |c| c.max_taming_exponent()),
        };
        self.scheme.w = Some(w);
        if self.out.is_none() {
            self.out = Some(PathBuf::from(format!("{}.csv", self.command.as_str())));
        }
        let settings = SchemeSettings {
            horizon: self.scheme.horizon,
            delta: self.scheme.delta,
            w_exp: w,
            taming: self.scheme.taming,
        };
        if self.command != CommandKind::Check {
            settings.validate(&problem)?;
            self.plan().validate()?;
            if self.command == CommandKind::Diverge {
                // The probe runs both schemes; w must also be admissible for the tamed one.
                SchemeSettings {
                    taming: true,
                    ..settings
                }
                .validate(&problem)?;
            }
        }
        Ok(ResolvedExperiment {
            config: self,
            problem,
            settings,
        })
    }

    pub fn plan(&self) -> MonteCarloPlan {
        MonteCarloPlan {
            levels: self.estimator.levels.clone(),
            samples: self.estimator.samples,
            master_seed: self.estimator.seed,
            n_ref_multiplier: self.estimator.n_ref_multiplier,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedExperiment {
    pub config: ExperimentConfig,
    pub problem: BuiltinProblem,
    pub settings: SchemeSettings,
}

/// `64..4096` (powers of two between the bounds) or a comma-separated list.
pub fn parse_levels(text: &str) -> Result<Vec<usize>, String> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo
            .trim()
            .parse()
            .map_err(|e| format!("bad level bound {lo:?}: {e}"))?;
        let hi: usize = hi
            .trim()
            .parse()
            .map_err(|e| format!("bad level bound {hi:?}: {e}"))?;
        if !lo.is_power_of_two() || !hi.is_power_of_two() || lo > hi {
            return Err(format!(
                "level range {text} needs powers of two with lo <= hi"
            ));
        }
        let mut levels = Vec::new();
        let mut n = lo;
        while n <= hi {
            levels.push(n);
            n *= 2;
        }
        return Ok(levels);
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad level {s:?}: {e}"))
        })
        .collect()
}

fn parse_vector(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad coordinate {s:?}: {e}"))
        })
        .collect()
}

// Aliases keep clap from treating these as repeated flags.
type Coordinates = Vec<f64>;
type Levels = Vec<usize>;

/// Flags shared by every command. Unset flags leave config-file values alone.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub problem: Option<ProblemKey>,

    /// Power-law exponent.
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Initial point, comma separated.
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    pub x0: Option<Coordinates>,

    #[arg(long)]
    pub a1: Option<f64>,

    #[arg(long)]
    pub a2: Option<f64>,

    /// Repulsive Lennard-Jones exponent (`--p` in `check`).
    #[arg(long = "lj-p")]
    pub lj_p: Option<f64>,

    /// Attractive Lennard-Jones exponent (`--q` in `check`).
    #[arg(long = "lj-q")]
    pub lj_q: Option<f64>,

    #[arg(long)]
    pub lambda: Option<f64>,

    /// Dimension of the smooth problems.
    #[arg(long)]
    pub dim: Option<usize>,

    /// Time horizon.
    #[arg(long = "T")]
    pub horizon: Option<f64>,

    #[arg(long)]
    pub delta: Option<f64>,

    /// Taming exponent; defaults to 1/(3l).
    #[arg(long)]
    pub w: Option<f64>,

    #[arg(long, action = clap::ArgAction::Set)]
    pub taming: Option<bool>,

    /// Step counts, e.g. `64..4096` or `64,256,1024`.
    #[arg(long, value_parser = parse_levels)]
    pub levels: Option<Levels>,

    #[arg(long)]
    pub samples: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long = "n-ref-multiplier")]
    pub n_ref_multiplier: Option<usize>,

    /// Output CSV path; the manifest goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

impl CommonArgs {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        let p = &mut cfg.problem;
        set(&mut p.key, self.problem);
        set(&mut p.alpha, self.alpha);
        if let Some(x0) = &self.x0 {
            p.x0 = Some(x0.clone());
        }
        set(&mut p.a1, self.a1);
        set(&mut p.a2, self.a2);
        set(&mut p.p_exp, self.lj_p);
        set(&mut p.q_exp, self.lj_q);
        set(&mut p.lambda, self.lambda);
        set(&mut p.dim, self.dim);
        let s = &mut cfg.scheme;
        set(&mut s.horizon, self.horizon);
        set(&mut s.delta, self.delta);
        if self.w.is_some() {
            s.w = self.w;
        }
        set(&mut s.taming, self.taming);
        let e = &mut cfg.estimator;
        if let Some(levels) = &self.levels {
            e.levels = levels.clone();
        }
        set(&mut e.samples, self.samples);
        set(&mut e.seed, self.seed);
        set(&mut e.n_ref_multiplier, self.n_ref_multiplier);
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}
