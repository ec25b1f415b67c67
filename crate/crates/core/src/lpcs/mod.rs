//! Least squares under a smoothed l^p-ball constraint, `min |Ax - b|^2 / 2`
//! s.t. `sum_i (|x_i|)^p_Delta <= nu`, solved in the slack form
//! `x + xbar >= 0`, `xbar - x >= 0`, `nu - sum_i (xbar_i)^p_Delta >= 0`.

mod alg;
mod instance;
mod operator;

pub use alg::{alg4_step, alg4_step_stats, alg5_step, alg5_step_stats, cs_coefficients, CsProblem, CsState, CsStepStats, SlackProblem};
pub use instance::{gen_compressed_sensing, read_instance, write_instance, CsInstance};
pub use operator::{CountingOperator, LinearOperator};

use crate::{Error, Result};

/// Smoothed l^p ball `{x : sum_i (|x_i|)^p_Delta <= nu}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpBall {
    pub p: f64,
    pub nu: f64,
    pub delta: f64,
}

pub const DEFAULT_DELTA: f64 = 1e-6;

impl LpBall {
    pub fn new(p: f64, nu: f64, delta: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (0, 1], got {p}")));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter(format!("nu must be positive, got {nu}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
        Ok(Self { p, nu, delta })
    }

    /// `sum_i (v_i)^p_Delta`.
    pub fn total(&self, v: &[f64]) -> f64 {
        v.iter().map(|&x| power_approx(x, self)).sum()
    }

    /// `nu - sum_i (v_i)^p_Delta`.
    pub fn slack(&self, v: &[f64]) -> f64 {
        self.nu - self.total(v)
    }

    /// `max(0, sum_i (|x_i|)^p_Delta - nu)`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let s: f64 = x.iter().map(|v| power_approx(v.abs(), self)).sum();
        (s - self.nu).max(0.0)
    }
}

/// `x^p - Delta^p (1 - p)` for `x >= Delta`, `p Delta^(p-1) x` below.
pub fn power_approx(x: f64, ball: &LpBall) -> f64 {
    let (p, d) = (ball.p, ball.delta);
    if p == 1.0 {
        x
    } else if x >= d {
        (x.powf(p) - d.powf(p)) + p * d.powf(p - 1.0) * d
    } else {
        p * d.powf(p - 1.0) * x
    }
}

/// Derivative of [`power_approx`]: `p x^(p-1)` for `x >= Delta`, `p Delta^(p-1)` below.
pub fn power_approx_grad(x: f64, ball: &LpBall) -> f64 {
    let (p, d) = (ball.p, ball.delta);
    if p == 1.0 {
        1.0
    } else if x >= d {
        p * x.powf(p - 1.0)
    } else {
        p * d.powf(p - 1.0)
    }
}
