//! Compressed-sensing experiment: seeded instance, one of the specialized
//! schemes or a projection baseline, per-iteration records.

use std::time::Instant;

use crate::linalg::{dist, norm};
use crate::lpcs::{
    alg4_step_stats, alg5_step_stats, gen_compressed_sensing, CsInstance, CsProblem, CsState, CsStepStats, LinearOperator,
    LpBall,
};
use crate::schedule::SolverParams;
use crate::solvers::{loglog_slope, Status};
use crate::{Error, Result};

use super::baselines::{apgd_step, pgd_step, ApgdState, ProjectableSet};
use super::config::{ExperimentConfig, MethodName};
use super::csv::CsvRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsRecord {
    pub k: usize,
    /// `|Ax_k - b|^2 / 2`.
    pub fx: f64,
    /// `nu - sum_i (xbar_i)^p_Delta`; baselines use `|x_i|` for `xbar_i`.
    pub constraint: f64,
    /// `max(0, sum_i (|x_i|)^p_Delta - nu)`.
    pub violation: f64,
    /// `|(u_k, ubar_k)|` for the velocity schemes, `|x_k - x_{k-1}|` for the baselines.
    pub unorm: f64,
    pub elapsed_s: f64,
}

impl From<&CsRecord> for CsvRecord {
    fn from(r: &CsRecord) -> Self {
        Self { k: r.k, fx: r.fx, min_g: r.constraint, unorm: r.unorm, kkt: f64::NAN, elapsed_s: r.elapsed_s }
    }
}

#[derive(Debug, Clone)]
pub struct CsRun {
    pub method: MethodName,
    pub records: Vec<CsRecord>,
    pub status: Status,
    pub x: Vec<f64>,
}

impl CsRun {
    pub fn final_objective(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.fx)
    }

    /// Log-log slope of the violation over `k` in `[k_lo, k_hi]`.
    pub fn violation_slope(&self, k_lo: usize, k_hi: usize) -> Option<f64> {
        let (k, v): (Vec<f64>, Vec<f64>) = self
            .records
            .iter()
            .filter(|r| r.k >= k_lo && r.k <= k_hi)
            .map(|r| (r.k as f64, r.violation))
            .unzip();
        loglog_slope(&k, &v)
    }
}

/// Runs `iters` iterations of `method` from `x0 = 0`. For the velocity
/// schemes `observer` sees every `(before, after, stats)` triple.
pub fn run_cs_method<O: LinearOperator>(
    cs: &CsProblem<O>,
    ball: &LpBall,
    method: MethodName,
    params: &SolverParams,
    iters: usize,
    observer: &mut dyn FnMut(&CsState, &CsState, &CsStepStats),
) -> Result<CsRun> {
    let n = cs.dim();
    let start = Instant::now();
    let mut records = Vec::with_capacity(iters + 1);
    let mut status = Status::MaxIter;
    let record = |k: usize, x: &[f64], constraint: f64, unorm: f64| CsRecord {
        k,
        fx: cs.objective(x),
        constraint,
        violation: ball.violation(x),
        unorm,
        elapsed_s: start.elapsed().as_secs_f64(),
    };
    let abs_slack = |x: &[f64]| ball.nu - x.iter().map(|v| crate::lpcs::power_approx(v.abs(), ball)).sum::<f64>();

    let x = match method {
        MethodName::Alg4 | MethodName::Alg5 => {
            let mut state = CsState::new(vec![0.0; n]);
            loop {
                let unorm = norm(&state.velocity());
                records.push(record(state.k, &state.x, ball.slack(&state.xbar), unorm));
                if state.k >= iters {
                    break;
                }
                let step = if method == MethodName::Alg4 {
                    alg4_step_stats(cs, &state, ball, params)
                } else {
                    alg5_step_stats(cs, &state, ball, params)
                };
                match step {
                    Ok((next, stats)) => {
                        observer(&state, &next, &stats);
                        state = next;
                    }
                    Err(Error::InfeasibleCone { .. }) => {
                        status = Status::InfeasibleCone;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            state.x
        }
        MethodName::Pgd | MethodName::Apgd => {
            if ball.p != 1.0 {
                return Err(Error::InvalidParameter("projection baselines need p = 1".into()));
            }
            let set = ProjectableSet::L1Ball { nu: ball.nu };
            let l = cs.lipschitz;
            let step = params.schedule.step(0) / l;
            let mut state = ApgdState::new(vec![0.0; n], l);
            let mut prev = state.x.clone();
            loop {
                let unorm = dist(&state.x, &prev);
                records.push(record(state.k, &state.x, abs_slack(&state.x), unorm));
                if state.k >= iters {
                    break;
                }
                prev = state.x.clone();
                state = if method == MethodName::Pgd {
                    let x = pgd_step(cs, &set, &state.x, step)?;
                    ApgdState { v: x.clone(), x, gamma: l, k: state.k + 1 }
                } else {
                    apgd_step(cs, &set, &state, 0.0, l)?
                };
            }
            state.x
        }
        other => return Err(Error::InvalidParameter(format!("{} is not a compressed-sensing method", other.name()))),
    };
    Ok(CsRun { method, records, status, x })
}

/// The seeded instance, problem and ball described by `cfg`.
pub fn cs_setup(cfg: &ExperimentConfig) -> Result<(CsInstance, CsProblem, LpBall)> {
    let i = &cfg.instance;
    let inst = gen_compressed_sensing(i.m, i.n, i.spikes, i.noise, i.seed)?;
    let cs = CsProblem::new(inst.a.clone(), inst.b.clone())?;
    let ball = LpBall::new(i.p, i.nu, cfg.resolved_smoothing())?;
    Ok((inst, cs, ball))
}

pub fn run_compressed_sensing(cfg: &ExperimentConfig) -> Result<CsRun> {
    cfg.validate()?;
    let (_, cs, ball) = cs_setup(cfg)?;
    run_cs_method(&cs, &ball, cfg.method, &cfg.solver_params(), cfg.iters, &mut |_, _, _| {})
}

/// Runs each method on the same instance, one thread per method. Every
/// method uses its own default step unless `cfg` fixes one.
pub fn sweep_compressed_sensing(cfg: &ExperimentConfig, methods: &[MethodName]) -> Result<Vec<CsRun>> {
    let configs: Vec<ExperimentConfig> = methods
        .iter()
        .map(|m| {
            let mut c = cfg.clone();
            c.method = *m;
            c.validate().map(|_| c)
        })
        .collect::<Result<_>>()?;
    let (_, cs, ball) = cs_setup(cfg)?;
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| {
                let (cs, ball) = (&cs, &ball);
                scope.spawn(move || run_cs_method(cs, ball, c.method, &c.solver_params(), c.iters, &mut |_, _, _| {}))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}
