use std::fmt;
use std::str::FromStr;

use crate::cone::{build_full_cone, global_cone, local_cone, VelocityCone};
use crate::linalg::axpy;
use crate::polyproj::{project, ProjectionResult, DEFAULT_TOL};
use crate::problem::Problem;
use crate::schedule::{Coefficients, SolverParams};
use crate::state::IterateState;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Gradient flow with velocity projection onto the cone of all constraints.
    Cgd,
    /// Momentum scheme with the cone of violated constraints at `x_k`.
    AgdLocal,
    /// Momentum scheme with all constraints linearized at `x_k + beta u_k`.
    AgdGlobal,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Cgd => "cgd",
            Method::AgdLocal => "agd_local",
            Method::AgdGlobal => "agd_global",
        }
    }

    /// Whether the scheme needs `alpha T <= 1`.
    pub fn requires_alpha_step(&self) -> bool {
        !matches!(self, Method::AgdGlobal)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cgd" => Ok(Method::Cgd),
            "agd_local" => Ok(Method::AgdLocal),
            "agd_global" => Ok(Method::AgdGlobal),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

/// Everything a single iteration produced.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub before: IterateState,
    pub after: IterateState,
    pub coefficients: Coefficients,
    /// Unconstrained velocity that was projected.
    pub r: Vec<f64>,
    pub cone: VelocityCone,
    pub projection: ProjectionResult,
}

/// Runs one iteration of `method` from `state`, using `state.step` as `T_k`.
pub fn step_report(
    problem: &dyn Problem,
    method: Method,
    state: &IterateState,
    params: &SolverParams,
) -> Result<StepReport> {
    crate::error::check_len(problem.dim(), state.x.len())?;
    crate::error::check_len(problem.dim(), state.u.len())?;
    let c = params.coefficients(state.k, state.step);
    let t = c.step;
    let (r, cone) = match method {
        Method::Cgd => {
            let mut r = problem.gradient(&state.x);
            r.iter_mut().for_each(|v| *v = -*v);
            (r, build_full_cone(problem, &state.x, c.alpha))
        }
        Method::AgdLocal | Method::AgdGlobal => {
            let mut y = state.x.clone();
            axpy(c.beta, &state.u, &mut y);
            let grad = problem.gradient(&y);
            let mut r: Vec<f64> = state.u.iter().map(|u| u - 2.0 * c.delta * t * u).collect();
            axpy(-t, &grad, &mut r);
            let cone = if method == Method::AgdLocal {
                local_cone(problem, &state.x, &state.u, c.alpha, params.restitution, params.eps_const)
            } else {
                global_cone(problem, &state.x, &state.u, c.alpha, c.beta, t)
            };
            (r, cone)
        }
    };
    let projection = project(&r, &cone, DEFAULT_TOL)?;
    let mut x = state.x.clone();
    axpy(t, &projection.v, &mut x);
    let after = IterateState { x, u: projection.v.clone(), k: state.k + 1, step: t };
    Ok(StepReport { before: state.clone(), after, coefficients: c, r, cone, projection })
}

/// `x_{k+1} = x_k + T v` with `v` the projection of `-grad f(x_k)` onto the
/// cone of all constraints; the returned `u` holds `v`.
pub fn cgd_step(problem: &dyn Problem, state: &IterateState, params: &SolverParams) -> Result<IterateState> {
    step_report(problem, Method::Cgd, state, params).map(|r| r.after)
}

/// `u_{k+1} = proj(u_k - 2 delta T u_k - T grad f(x_k + beta u_k))` onto the
/// cone of constraints with `g_i(x_k) <= eps_const`, then `x_{k+1} = x_k + T u_{k+1}`.
pub fn agd_local_step(problem: &dyn Problem, state: &IterateState, params: &SolverParams) -> Result<IterateState> {
    step_report(problem, Method::AgdLocal, state, params).map(|r| r.after)
}

/// As [`agd_local_step`] but projecting onto the curvature-corrected cone of
/// all constraints linearized at `x_k + beta u_k`.
pub fn agd_global_step(problem: &dyn Problem, state: &IterateState, params: &SolverParams) -> Result<IterateState> {
    step_report(problem, Method::AgdGlobal, state, params).map(|r| r.after)
}
