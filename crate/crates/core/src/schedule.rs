//! Damping, extrapolation and step-size schedules.
//!
//! All constant-parameter rows assume `f` has been normalized so that its
//! gradient is 1-Lipschitz: pass `mu` already divided by `L`. Nothing here
//! rescales the objective.

use crate::{Error, Result};

/// How `(alpha, delta, beta)` evolve with the iteration counter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    /// `(sqrt(mu), sqrt(mu), 0)`.
    HeavyBall { mu: f64 },
    /// `(sqrt(mu) - mu/2, sqrt(mu)/(1+sqrt(mu)), (1-sqrt(mu))/(1+sqrt(mu)))`.
    NesterovConstant { mu: f64 },
    /// `(2/(t+3), 3/(2(t+3)), t/(t+3))` with `t = k T`.
    NesterovVarying,
    /// Use the fixed `alpha`, `delta`, `beta` stored in [`SolverParams`].
    Manual,
}

/// Step-size sequence `T_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// `T_k = t0 / k^s`, counted from `k = 1` so the first step is `t0`.
    Diminishing { t0: f64, s: f64 },
}

impl StepSchedule {
    /// Step used by the iteration that starts from iterate `k` (0-based).
    pub fn step(&self, k: usize) -> f64 {
        match *self {
            StepSchedule::Constant(t) => t,
            StepSchedule::Diminishing { t0, s } => t0 / ((k + 1) as f64).powf(s),
        }
    }

    /// Largest step the schedule ever produces.
    pub fn max_step(&self) -> f64 {
        match *self {
            StepSchedule::Constant(t) => t,
            StepSchedule::Diminishing { t0, .. } => t0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StepSchedule::Constant(t) if !(t > 0.0 && t.is_finite()) => {
                Err(Error::InvalidParameter(format!("step size must be positive, got {t}")))
            }
            StepSchedule::Diminishing { t0, s } => {
                if !(t0 > 0.0 && t0.is_finite()) {
                    return Err(Error::InvalidParameter(format!("t0 must be positive, got {t0}")));
                }
                // s = 1 is accepted; the convergence guarantee only covers s < 1
                if !(s > 0.5 && s <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "diminishing exponent must lie in (1/2, 1], got {s}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Table values `(alpha, delta, beta)` for the given row at iteration `k`.
///
/// `beta` is the continuous-time table entry; see [`discrete_beta`] for the
/// value used by the discrete schemes.
pub fn schedule_params(kind: ScheduleKind, k: usize, step: f64) -> Result<(f64, f64, f64)> {
    match kind {
        ScheduleKind::HeavyBall { mu } => {
            check_mu(mu)?;
            let s = mu.sqrt();
            Ok((s, s, 0.0))
        }
        ScheduleKind::NesterovConstant { mu } => {
            check_mu(mu)?;
            let s = mu.sqrt();
            Ok((s - mu / 2.0, s / (1.0 + s), (1.0 - s) / (1.0 + s)))
        }
        ScheduleKind::NesterovVarying => {
            let t = k as f64 * step;
            Ok((2.0 / (t + 3.0), 3.0 / (2.0 * (t + 3.0)), t / (t + 3.0)))
        }
        ScheduleKind::Manual => Err(Error::InvalidParameter(
            "manual schedule has no table entry".into(),
        )),
    }
}

/// Extrapolation used by the discrete momentum schemes: `T (1 - 2 delta T)`.
pub fn discrete_beta(delta: f64, step: f64) -> f64 {
    step * (1.0 - 2.0 * delta * step)
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "mu must lie in (0, 1] after normalization by L, got {mu}"
        )))
    }
}

/// Per-iteration coefficients actually applied by a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub alpha: f64,
    pub delta: f64,
    pub beta: f64,
    pub step: f64,
}

/// Parameters shared by the velocity-projection schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub alpha: f64,
    pub delta: f64,
    pub beta: f64,
    /// Restitution coefficient in `[0, 1)`.
    pub restitution: f64,
    /// Constraints with `g_i(x) <= eps_const` enter the local cone.
    pub eps_const: f64,
    pub schedule: StepSchedule,
    pub kind: ScheduleKind,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            delta: 0.1,
            beta: 0.0,
            restitution: 0.0,
            eps_const: 0.0,
            schedule: StepSchedule::Constant(0.1),
            kind: ScheduleKind::Manual,
        }
    }
}

impl SolverParams {
    pub fn manual(alpha: f64, delta: f64, beta: f64, step: f64) -> Self {
        Self {
            alpha,
            delta,
            beta,
            schedule: StepSchedule::Constant(step),
            ..Self::default()
        }
    }

    /// Coefficients at iteration `k` with step `step`. Table rows with
    /// momentum extrapolation use `beta = T (1 - 2 delta T)`.
    pub fn coefficients(&self, k: usize, step: f64) -> Coefficients {
        let (alpha, delta, beta) = match self.kind {
            ScheduleKind::Manual => (self.alpha, self.delta, self.beta),
            ScheduleKind::HeavyBall { .. } => {
                let (a, d, _) = schedule_params(self.kind, k, step).expect("validated");
                (a, d, 0.0)
            }
            kind => {
                let (a, d, _) = schedule_params(kind, k, step).expect("validated");
                (a, d, discrete_beta(d, step))
            }
        };
        Coefficients { alpha, delta, beta, step }
    }

    /// Checks parameter ranges. `require_alpha_step` enforces `alpha T <= 1`
    /// over the whole schedule (needed by the local and gradient schemes).
    pub fn validate(&self, require_alpha_step: bool) -> Result<()> {
        self.schedule.validate()?;
        if !(0.0..1.0).contains(&self.restitution) {
            return Err(Error::InvalidParameter(format!(
                "restitution must lie in [0, 1), got {}",
                self.restitution
            )));
        }
        if !(self.eps_const >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps_const must be nonnegative, got {}",
                self.eps_const
            )));
        }
        match self.kind {
            ScheduleKind::HeavyBall { mu } | ScheduleKind::NesterovConstant { mu } => check_mu(mu)?,
            ScheduleKind::Manual => {
                if !(self.alpha > 0.0) || !(self.delta >= 0.0) || !(self.beta >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "need alpha > 0, delta >= 0, beta >= 0; got ({}, {}, {})",
                        self.alpha, self.delta, self.beta
                    )));
                }
            }
            ScheduleKind::NesterovVarying => {}
        }
        if require_alpha_step {
            // alpha is nonincreasing in k for every row, and T_k is nonincreasing
            let c = self.coefficients(0, self.schedule.max_step());
            if c.alpha * c.step > 1.0 + 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "alpha * T = {} exceeds 1",
                    c.alpha * c.step
                )));
            }
        }
        Ok(())
    }
}
