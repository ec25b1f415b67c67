use std::time::Instant;

use crate::linalg::norm;
use crate::problem::Problem;
use crate::schedule::SolverParams;
use crate::state::IterateState;
use crate::stationarity::stationarity_residual;
use crate::{Error, Result};

use super::step::{step_report, Method, StepReport};

#[derive(Debug, Clone, PartialEq)]
pub struct StoppingRule {
    pub max_iter: usize,
    pub u_tol: f64,
    pub kkt_tol: f64,
    /// The stationarity residual is recorded every `kkt_every` iterations
    /// and whenever `|u_k| <= u_tol`.
    pub kkt_every: usize,
    /// Constraints with `g_i(x) <= kkt_active_tol` may carry multipliers in
    /// the residual; convergence also needs `min_i g_i(x) >= -kkt_active_tol`.
    pub kkt_active_tol: f64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self { max_iter: 100_000, u_tol: 1e-9, kkt_tol: 1e-7, kkt_every: 10, kkt_active_tol: 1e-6 }
    }
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 || self.kkt_every == 0 {
            return Err(Error::InvalidParameter("max_iter and kkt_every must be at least 1".into()));
        }
        if !(self.u_tol >= 0.0 && self.kkt_tol >= 0.0 && self.kkt_active_tol >= 0.0) {
            return Err(Error::InvalidParameter("stopping tolerances must be nonnegative".into()));
        }
        Ok(())
    }
}

/// One row of a trace, describing the iterate `x_k` and the step leaving it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub step: f64,
    pub fx: f64,
    pub min_g: f64,
    pub unorm: f64,
    /// Stationarity residual, NaN when not evaluated at this iteration.
    pub kkt: f64,
    /// Rows in the projection active set of the step from `x_k` (0 when no step was taken).
    pub active: usize,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIter,
    InfeasibleCone,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIter => "max_iter",
            Status::InfeasibleCone => "infeasible_cone",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub status: Status,
    pub last: IterateState,
}

impl Trace {
    pub fn final_record(&self) -> &TraceRecord {
        self.records.last().expect("a trace holds at least one record")
    }
}

pub fn run(
    problem: &dyn Problem,
    method: Method,
    params: &SolverParams,
    stop: &StoppingRule,
    x0: &[f64],
    u0: &[f64],
) -> Result<Trace> {
    run_observed(problem, method, params, stop, x0, u0, &mut |_| {})
}

/// [`run`] with a callback invoked after every successful step.
pub fn run_observed(
    problem: &dyn Problem,
    method: Method,
    params: &SolverParams,
    stop: &StoppingRule,
    x0: &[f64],
    u0: &[f64],
    observer: &mut dyn FnMut(&StepReport),
) -> Result<Trace> {
    crate::error::check_len(problem.dim(), x0.len())?;
    crate::error::check_len(problem.dim(), u0.len())?;
    params.validate(method.requires_alpha_step())?;
    stop.validate()?;

    let start = Instant::now();
    let mut state = IterateState::new(x0.to_vec(), u0.to_vec(), params.schedule.step(0))?;
    let mut records = Vec::new();
    let mut g = vec![0.0; problem.num_constraints()];

    let status = loop {
        let k = state.k;
        state.step = params.schedule.step(k);
        problem.constraints(&state.x, &mut g);
        let unorm = norm(&state.u);
        let mut rec = TraceRecord {
            k,
            step: state.step,
            fx: problem.objective(&state.x),
            min_g: g.iter().copied().fold(f64::INFINITY, f64::min),
            unorm,
            kkt: f64::NAN,
            active: 0,
            elapsed_s: 0.0,
        };
        if k % stop.kkt_every == 0 || unorm <= stop.u_tol {
            rec.kkt = stationarity_residual(problem, &state.x, stop.kkt_active_tol)?.residual;
        }
        let feasible = rec.min_g >= -stop.kkt_active_tol;
        if feasible && unorm <= stop.u_tol && rec.kkt <= stop.kkt_tol {
            rec.elapsed_s = start.elapsed().as_secs_f64();
            records.push(rec);
            break Status::Converged;
        }
        if k >= stop.max_iter {
            rec.elapsed_s = start.elapsed().as_secs_f64();
            records.push(rec);
            break Status::MaxIter;
        }
        match step_report(problem, method, &state, params) {
            Ok(report) => {
                rec.active = report.projection.active.len();
                observer(&report);
                state = report.after;
            }
            Err(Error::InfeasibleCone { .. }) => {
                rec.elapsed_s = start.elapsed().as_secs_f64();
                records.push(rec);
                break Status::InfeasibleCone;
            }
            Err(e) => return Err(e),
        }
        rec.elapsed_s = start.elapsed().as_secs_f64();
        records.push(rec);
    };
    Ok(Trace { records, status, last: state })
}
