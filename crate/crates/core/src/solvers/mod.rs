//! The velocity-projection iterations, the run loop and rate helpers.

pub mod checks;
pub mod rates;
pub mod run;
pub mod step;

pub use rates::{effective_smoothness, loglog_slope, quadratic_box_gradient_bound};
pub use run::{run, run_observed, Status, StoppingRule, Trace, TraceRecord};
pub use step::{agd_global_step, agd_local_step, cgd_step, step_report, Method, StepReport};
