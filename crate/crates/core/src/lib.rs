//! Accelerated first-order methods for inequality-constrained problems
//! `min f(x) s.t. g(x) >= 0` in which constraints act on the velocity of the
//! iterates through a local polyhedral cone instead of through projections
//! onto the feasible set.
//!
//! Objectives passed to the momentum schedules are expected to be normalized
//! so that their smoothness constant is one; strong-convexity parameters `mu`
//! are therefore given relative to `L`.

pub mod bench;
pub mod cone;
pub mod error;
pub mod linalg;
pub mod lpcs;
pub mod polyproj;
pub mod problem;
pub mod rng;
pub mod schedule;
pub mod solvers;
pub mod state;
pub mod stationarity;
pub mod wsimplex;

pub use cone::{build_global_cone, build_local_cone, constraint_velocity, VelocityCone};
pub use error::{Error, Result};
pub use polyproj::{project, project_halfspace, ProjectionResult};
pub use problem::Problem;
pub use schedule::{schedule_params, ScheduleKind, SolverParams, StepSchedule};
pub use state::IterateState;
pub use stationarity::{stationarity_residual, Stationarity};
pub use wsimplex::{project_l1_ball, project_weighted_simplex, WeightedSimplexInstance};
