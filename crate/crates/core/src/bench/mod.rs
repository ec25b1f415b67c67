//! Experiment harness: projection baselines, the one-dimensional phase
//! portraits, the compressed-sensing runs, configuration and CSV output.

pub mod baselines;
pub mod config;
pub mod cs;
pub mod csv;
pub mod illustrative;

pub use baselines::{apgd_step, pgd_step, ApgdState, Objective, ProjectableSet};
pub use config::{Experiment, ExperimentConfig, MethodName};
pub use cs::{run_compressed_sensing, run_cs_method, sweep_compressed_sensing, CsRecord, CsRun};
pub use csv::{write_trace_csv, CsvRecord};
pub use illustrative::{run_illustrative, Trajectory};

use crate::problem::{random_qp, Illustrative, Problem};
use crate::solvers::{run, StoppingRule, Trace};
use crate::{Error, Result};

/// Runs a generic solver on the illustrative problem (from `x0 = 1`) or on a
/// seeded random QP (from the origin).
pub fn solve(cfg: &ExperimentConfig) -> Result<Trace> {
    cfg.validate()?;
    let method = cfg.method.solver().ok_or_else(|| {
        Error::InvalidParameter(format!("{} needs the compressed-sensing harness", cfg.method.name()))
    })?;
    let stop = StoppingRule { max_iter: cfg.iters, kkt_every: cfg.kkt_every, ..StoppingRule::default() };
    let params = cfg.solver_params();
    match cfg.experiment {
        Experiment::Illustrative => run(&Illustrative, method, &params, &stop, &[1.0], &[0.0]),
        Experiment::CustomQp => {
            let i = &cfg.instance;
            let qp = random_qp(i.n, i.n_g, i.kappa, i.seed);
            let x0 = vec![0.0; qp.problem.dim()];
            run(&qp.problem, method, &params, &stop, &x0, &x0)
        }
        Experiment::CompressedSensing => Err(Error::InvalidParameter("use the compressed-sensing harness".into())),
    }
}
