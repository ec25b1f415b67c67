//! Per-step inequalities that every trace must satisfy. Each function returns
//! the largest violation (positive means violated, `<= 0` means satisfied).

use crate::cone::constraint_velocity;
use crate::linalg::dot;
use crate::problem::Problem;

use super::step::{Method, StepReport};

/// Impact law `gamma_i(x_k, u_{k+1}) >= -eps min(gamma_i(x_k, u_k), 0)` over
/// the constraints `rows`, evaluated from the problem oracles.
pub fn impact_law_violation(
    problem: &dyn Problem,
    x: &[f64],
    u_prev: &[f64],
    u_next: &[f64],
    rows: &[usize],
    alpha: f64,
    restitution: f64,
) -> f64 {
    rows.iter()
        .map(|&i| {
            let before = constraint_velocity(problem, x, u_prev, i, alpha);
            let after = constraint_velocity(problem, x, u_next, i, alpha);
            -restitution * before.min(0.0) - after
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Velocity constraint of the global scheme,
/// `grad g_i(y)^T u_{k+1} >= -alpha g_i(x) - (g_i(y) - g_i(x) - beta grad g_i(y)^T u_k) / T`
/// with `y = x + beta u_k`, over all constraints.
pub fn global_row_violation(
    problem: &dyn Problem,
    x: &[f64],
    u_prev: &[f64],
    u_next: &[f64],
    alpha: f64,
    beta: f64,
    step: f64,
) -> f64 {
    let y: Vec<f64> = x.iter().zip(u_prev).map(|(a, b)| a + beta * b).collect();
    let gx = problem.constraint_values(x);
    let gy = problem.constraint_values(&y);
    (0..problem.num_constraints())
        .map(|i| {
            let row = problem.constraint_row(&y, i);
            let rhs = -alpha * gx[i] - (gy[i] - gx[i] - beta * dot(&row, u_prev)) / step;
            rhs - dot(&row, u_next)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Feasibility decay `g_i(x_{k+1}) >= (1 - alpha T) g_i(x_k) - T^2 L_i c_u^2 / 2`
/// for every violated constraint with a known lower curvature `L_i`.
/// Relative slack `1e-9 (1 + |g_i(x_k)|)` absorbs rounding.
pub fn feasibility_decay_violation(
    problem: &dyn Problem,
    x_prev: &[f64],
    x_next: &[f64],
    alpha: f64,
    step: f64,
    c_u: f64,
) -> f64 {
    let g0 = problem.constraint_values(x_prev);
    let g1 = problem.constraint_values(x_next);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..g0.len() {
        if g0[i] >= 0.0 {
            continue;
        }
        let Some(curv) = problem.constraint_lower_curvature(i) else { continue };
        let bound = (1.0 - alpha * step) * g0[i] - step * step * curv * c_u * c_u / 2.0;
        worst = worst.max(bound - g1[i] - 1e-9 * (1.0 + g0[i].abs()));
    }
    worst
}

/// Tracks the step-level invariants along a run; feed it every [`StepReport`].
#[derive(Debug, Clone, Default)]
pub struct InvariantMonitor {
    pub steps: usize,
    /// Largest velocity-constraint violation seen.
    pub worst_impact: f64,
    /// Largest feasibility-decay violation seen.
    pub worst_decay: f64,
    /// Running maximum of `|u_{k+1}|`.
    pub c_u: f64,
}

impl InvariantMonitor {
    pub fn new() -> Self {
        Self { steps: 0, worst_impact: f64::NEG_INFINITY, worst_decay: f64::NEG_INFINITY, c_u: 0.0 }
    }

    pub fn observe(&mut self, problem: &dyn Problem, method: Method, report: &StepReport, restitution: f64) {
        let c = report.coefficients;
        let x = &report.before.x;
        let u_prev = &report.before.u;
        let u_next = &report.after.u;
        self.c_u = self.c_u.max(crate::linalg::norm(u_next));
        let impact = match method {
            Method::Cgd => impact_law_violation(problem, x, u_prev, u_next, &report.cone.source, c.alpha, 0.0),
            Method::AgdLocal => {
                impact_law_violation(problem, x, u_prev, u_next, &report.cone.source, c.alpha, restitution)
            }
            Method::AgdGlobal => global_row_violation(problem, x, u_prev, u_next, c.alpha, c.beta, c.step),
        };
        let decay = feasibility_decay_violation(problem, x, &report.after.x, c.alpha, c.step, self.c_u);
        self.record(impact, decay);
    }

    pub fn record(&mut self, impact: f64, decay: f64) {
        self.steps += 1;
        self.worst_impact = self.worst_impact.max(impact);
        self.worst_decay = self.worst_decay.max(decay);
    }

    /// Both inequalities held at every observed step, the impact law up to `impact_tol`.
    pub fn holds(&self, impact_tol: f64) -> bool {
        self.worst_impact <= impact_tol && self.worst_decay <= 0.0
    }
}
