//! Experiment configuration in `key = value` form.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::schedule::{ScheduleKind, SolverParams, StepSchedule};
use crate::solvers::Method;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Illustrative,
    CompressedSensing,
    CustomQp,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Illustrative => "illustrative",
            Experiment::CompressedSensing => "compressed_sensing",
            Experiment::CustomQp => "custom_qp",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "illustrative" => Ok(Experiment::Illustrative),
            "compressed_sensing" | "cs" => Ok(Experiment::CompressedSensing),
            "custom_qp" | "qp" => Ok(Experiment::CustomQp),
            other => Err(Error::InvalidParameter(format!("unknown experiment '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodName {
    Cgd,
    AgdLocal,
    AgdGlobal,
    Alg4,
    Alg5,
    Pgd,
    Apgd,
}

impl MethodName {
    pub const CS_METHODS: [MethodName; 4] = [MethodName::Alg4, MethodName::Alg5, MethodName::Apgd, MethodName::Pgd];

    pub fn name(&self) -> &'static str {
        match self {
            MethodName::Cgd => "cgd",
            MethodName::AgdLocal => "agd_local",
            MethodName::AgdGlobal => "agd_global",
            MethodName::Alg4 => "alg4",
            MethodName::Alg5 => "alg5",
            MethodName::Pgd => "pgd",
            MethodName::Apgd => "apgd",
        }
    }

    /// The generic solver behind this name, if any.
    pub fn solver(&self) -> Option<Method> {
        match self {
            MethodName::Cgd => Some(Method::Cgd),
            MethodName::AgdLocal => Some(Method::AgdLocal),
            MethodName::AgdGlobal => Some(Method::AgdGlobal),
            _ => None,
        }
    }

    pub fn compatible_with(&self, experiment: Experiment) -> bool {
        match experiment {
            Experiment::CompressedSensing => Self::CS_METHODS.contains(self),
            Experiment::Illustrative | Experiment::CustomQp => self.solver().is_some(),
        }
    }
}

impl FromStr for MethodName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cgd" => Ok(MethodName::Cgd),
            "agd_local" => Ok(MethodName::AgdLocal),
            "agd_global" => Ok(MethodName::AgdGlobal),
            "alg4" => Ok(MethodName::Alg4),
            "alg5" => Ok(MethodName::Alg5),
            "pgd" => Ok(MethodName::Pgd),
            "apgd" => Ok(MethodName::Apgd),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

/// Instance description shared by the experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceConfig {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub spikes: usize,
    pub noise: f64,
    pub nu: f64,
    pub p: f64,
    /// Smoothing threshold; `None` picks 1e-6 for p = 1 and 1e-3 below.
    pub smoothing: Option<f64>,
    pub n_g: usize,
    pub kappa: f64,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        Self { seed: 1, m: 100, n: 1000, spikes: 13, noise: 0.5, nu: 13.0, p: 1.0, smoothing: None, n_g: 30, kappa: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub method: MethodName,
    pub params: SolverParams,
    /// Step size (or `T_0` of a diminishing schedule); `None` picks the
    /// experiment default.
    pub step: Option<f64>,
    /// Exponent of the diminishing schedule; `None` keeps a constant step.
    pub decay: Option<f64>,
    pub mu: f64,
    pub instance: InstanceConfig,
    pub iters: usize,
    pub out: Option<PathBuf>,
    /// Every `stride`-th record is written (the last one always is).
    pub stride: usize,
    pub kkt_every: usize,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        let (method, kind, iters) = match experiment {
            Experiment::CompressedSensing => (MethodName::Alg4, ScheduleKind::NesterovVarying, 400),
            Experiment::Illustrative => (MethodName::AgdLocal, ScheduleKind::Manual, 200),
            Experiment::CustomQp => (MethodName::AgdLocal, ScheduleKind::NesterovConstant { mu: 0.1 }, 10_000),
        };
        let instance = match experiment {
            Experiment::CustomQp => InstanceConfig { n: 20, ..InstanceConfig::default() },
            _ => InstanceConfig::default(),
        };
        Self {
            experiment,
            method,
            params: SolverParams { kind, ..SolverParams::default() },
            step: None,
            decay: None,
            mu: 0.1,
            instance,
            iters,
            out: None,
            stride: 1,
            kkt_every: 10,
        }
    }

    /// Parses `key = value` lines; `#` starts a comment. The `experiment` key
    /// is applied first wherever it appears.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("line {}: expected key = value", lineno + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let experiment = match pairs.iter().find(|(k, _)| k == "experiment") {
            Some((_, v)) => v.parse()?,
            None => Experiment::CompressedSensing,
        };
        let mut cfg = Self::new(experiment);
        for (k, v) in pairs.iter().filter(|(k, _)| k != "experiment") {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| Error::InvalidParameter(format!("bad value '{value}' for {key}")))
        }
        match key {
            "experiment" => {
                let e: Experiment = value.parse()?;
                if e != self.experiment {
                    return Err(Error::InvalidParameter("experiment cannot change after creation".into()));
                }
            }
            "method" => self.method = value.parse()?,
            "alpha" => self.params.alpha = num(key, value)?,
            "delta" => self.params.delta = num(key, value)?,
            "beta" => self.params.beta = num(key, value)?,
            "eps" | "restitution" => self.params.restitution = num(key, value)?,
            "eps_const" => self.params.eps_const = num(key, value)?,
            "T" | "step" => self.step = Some(num(key, value)?),
            "s" | "decay" => self.decay = Some(num(key, value)?),
            "mu" => self.mu = num(key, value)?,
            "schedule" => match value {
                "constant" => self.decay = None,
                "diminishing" => {
                    self.decay.get_or_insert(0.75);
                }
                other => self.params.kind = parse_kind(other, self.mu)?,
            },
            "kind" => self.params.kind = parse_kind(value, self.mu)?,
            "seed" => self.instance.seed = num(key, value)?,
            "m" => self.instance.m = num(key, value)?,
            "n" => self.instance.n = num(key, value)?,
            "n_g" => self.instance.n_g = num(key, value)?,
            "kappa" => self.instance.kappa = num(key, value)?,
            "spikes" => self.instance.spikes = num(key, value)?,
            "noise" => self.instance.noise = num(key, value)?,
            "nu" => self.instance.nu = num(key, value)?,
            "p" => self.instance.p = num(key, value)?,
            "Delta" | "smoothing" => self.instance.smoothing = Some(num(key, value)?),
            "iters" => self.iters = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "stride" => self.stride = num(key, value)?,
            "kkt_every" => self.kkt_every = num(key, value)?,
            other => return Err(Error::InvalidParameter(format!("unknown key '{other}'"))),
        }
        // keep mu-dependent rows in sync
        match &mut self.params.kind {
            ScheduleKind::HeavyBall { mu } | ScheduleKind::NesterovConstant { mu } => *mu = self.mu,
            _ => {}
        }
        Ok(())
    }

    /// Step size after defaults: 1.8 (alg4) and 2 (alg5) for p = 1, 1 for
    /// p < 1 and for the baselines (in units of `1/L`), 0.1 otherwise.
    pub fn resolved_step(&self) -> f64 {
        if let Some(t) = self.step {
            return t;
        }
        match (self.experiment, self.method) {
            (Experiment::CompressedSensing, MethodName::Alg4) if self.instance.p == 1.0 => 1.8,
            (Experiment::CompressedSensing, MethodName::Alg5) if self.instance.p == 1.0 => 2.0,
            (Experiment::CompressedSensing, _) => 1.0,
            _ => 0.1,
        }
    }

    pub fn resolved_smoothing(&self) -> f64 {
        self.instance.smoothing.unwrap_or(if self.instance.p < 1.0 { 1e-3 } else { crate::lpcs::DEFAULT_DELTA })
    }

    /// Solver parameters with the resolved step schedule.
    pub fn solver_params(&self) -> SolverParams {
        let t = self.resolved_step();
        let schedule = match self.decay {
            Some(s) => StepSchedule::Diminishing { t0: t, s },
            None => StepSchedule::Constant(t),
        };
        SolverParams { schedule, ..self.params.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.method.compatible_with(self.experiment) {
            return Err(Error::InvalidParameter(format!(
                "method {} cannot run the {} experiment",
                self.method.name(),
                self.experiment.name()
            )));
        }
        if matches!(self.method, MethodName::Pgd | MethodName::Apgd) && self.instance.p != 1.0 {
            return Err(Error::InvalidParameter("projection baselines need p = 1".into()));
        }
        if self.stride == 0 || self.kkt_every == 0 {
            return Err(Error::InvalidParameter("stride and kkt_every must be at least 1".into()));
        }
        let params = self.solver_params();
        match self.method.solver() {
            Some(m) => params.validate(m.requires_alpha_step())?,
            None => params.schedule.validate()?,
        }
        if self.experiment == Experiment::CompressedSensing {
            crate::lpcs::LpBall::new(self.instance.p, self.instance.nu, self.resolved_smoothing())?;
        }
        Ok(())
    }

    /// Canonical text of every setting that influences the numbers.
    pub fn canonical(&self) -> String {
        let p = self.solver_params();
        let i = &self.instance;
        let mut s = String::new();
        let _ = writeln!(s, "experiment={}", self.experiment.name());
        let _ = writeln!(s, "method={}", self.method.name());
        let _ = writeln!(s, "alpha={:e} delta={:e} beta={:e} eps={:e} eps_const={:e}", p.alpha, p.delta, p.beta, p.restitution, p.eps_const);
        let _ = writeln!(s, "schedule={:?} kind={:?} mu={:e}", p.schedule, p.kind, self.mu);
        let _ = writeln!(s, "seed={} m={} n={} spikes={} noise={:e} nu={:e} p={:e} Delta={:e} n_g={} kappa={:e}",
            i.seed, i.m, i.n, i.spikes, i.noise, i.nu, i.p, self.resolved_smoothing(), i.n_g, i.kappa);
        let _ = writeln!(s, "iters={} stride={} kkt_every={}", self.iters, self.stride, self.kkt_every);
        s
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        hex::encode(&digest[..8])
    }
}

fn parse_kind(value: &str, mu: f64) -> Result<ScheduleKind> {
    match value {
        "manual" => Ok(ScheduleKind::Manual),
        "heavy_ball" => Ok(ScheduleKind::HeavyBall { mu }),
        "nesterov_constant" => Ok(ScheduleKind::NesterovConstant { mu }),
        "nesterov_varying" => Ok(ScheduleKind::NesterovVarying),
        other => Err(Error::InvalidParameter(format!("unknown schedule '{other}'"))),
    }
}
