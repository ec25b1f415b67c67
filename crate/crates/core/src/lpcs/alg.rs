use crate::linalg::{dot, norm, DenseMatrix};
use crate::problem::Problem;
use crate::rng::SplitMix64;
use crate::schedule::{discrete_beta, schedule_params, Coefficients, ScheduleKind, SolverParams};
use crate::wsimplex::{project_weighted_simplex_with_stats, WeightedSimplexInstance};
use crate::{Error, Result};

use super::operator::LinearOperator;
use super::{power_approx_grad, LpBall};

const POWER_ITERATIONS: usize = 30;
const POWER_TOL: f64 = 1e-6;
const POWER_SEED: u64 = 0x00C0_FFEE;

/// `|Ax - b|^2 / 2` with `L = |A|^2` estimated once by power iteration.
#[derive(Debug)]
pub struct CsProblem<O = DenseMatrix> {
    pub op: O,
    pub b: Vec<f64>,
    pub lipschitz: f64,
}

impl<O: LinearOperator> CsProblem<O> {
    pub fn new(op: O, b: Vec<f64>) -> Result<Self> {
        crate::error::check_len(op.rows(), b.len())?;
        let lipschitz = spectral_norm_sq(&op);
        if !(lipschitz > 0.0) {
            return Err(Error::InvalidParameter("operator is zero".into()));
        }
        Ok(Self { op, b, lipschitz })
    }

    pub fn with_lipschitz(op: O, b: Vec<f64>, lipschitz: f64) -> Result<Self> {
        crate::error::check_len(op.rows(), b.len())?;
        if !(lipschitz > 0.0) {
            return Err(Error::InvalidParameter(format!("L must be positive, got {lipschitz}")));
        }
        Ok(Self { op, b, lipschitz })
    }

    pub fn dim(&self) -> usize {
        self.op.cols()
    }

    /// `|Ax - b|^2 / 2`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let mut res = vec![0.0; self.op.rows()];
        self.op.apply(x, &mut res);
        res.iter().zip(&self.b).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / 2.0
    }

    /// `A^T (Ax - b) / L`, one forward and one adjoint application.
    pub fn scaled_gradient(&self, x: &[f64], out: &mut [f64]) {
        let mut res = vec![0.0; self.op.rows()];
        self.op.apply(x, &mut res);
        res.iter_mut().zip(&self.b).for_each(|(r, b)| *r -= b);
        self.op.apply_transpose(&res, out);
        out.iter_mut().for_each(|g| *g /= self.lipschitz);
    }

    /// The slack formulation as a generic [`Problem`] in `(x, xbar)` with the
    /// objective scaled by `1/L`.
    pub fn slack_problem(&self, ball: LpBall) -> SlackProblem<'_, O> {
        SlackProblem { cs: self, ball }
    }
}

/// Largest eigenvalue of `A^T A` by power iteration from a seeded start.
fn spectral_norm_sq<O: LinearOperator>(op: &O) -> f64 {
    let mut rng = SplitMix64::new(POWER_SEED);
    let mut v = rng.normal_vec(op.cols());
    let mut av = vec![0.0; op.rows()];
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let nv = norm(&v);
        if nv == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        op.apply(&v, &mut av);
        let next = dot(&av, &av);
        op.apply_transpose(&av, &mut v);
        let done = (next - estimate).abs() <= POWER_TOL * next;
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

/// Iterate of the slack formulation.
#[derive(Debug, Clone, PartialEq)]
pub struct CsState {
    pub x: Vec<f64>,
    pub xbar: Vec<f64>,
    pub u: Vec<f64>,
    pub ubar: Vec<f64>,
    pub k: usize,
}

impl CsState {
    /// `xbar = |x0|`, both velocities zero.
    pub fn new(x0: Vec<f64>) -> Self {
        let n = x0.len();
        let xbar = x0.iter().map(|v| v.abs()).collect();
        Self { x: x0, xbar, u: vec![0.0; n], ubar: vec![0.0; n], k: 0 }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `(x, xbar)` stacked.
    pub fn position(&self) -> Vec<f64> {
        [self.x.as_slice(), self.xbar.as_slice()].concat()
    }

    /// `(u, ubar)` stacked.
    pub fn velocity(&self) -> Vec<f64> {
        [self.u.as_slice(), self.ubar.as_slice()].concat()
    }

    fn check(&self, n: usize) -> Result<()> {
        crate::error::check_len(n, self.x.len())?;
        crate::error::check_len(n, self.xbar.len())?;
        crate::error::check_len(n, self.u.len())?;
        crate::error::check_len(n, self.ubar.len())
    }
}

/// Coefficients for iteration `k`. The varying Nesterov row is indexed by the
/// iteration count, `alpha_k = 2/(k+3)`, `delta_k = 3/(2(k+3))`, with
/// `beta_k = T (1 - 2 delta_k T)`; other rows follow [`SolverParams::coefficients`].
pub fn cs_coefficients(params: &SolverParams, k: usize) -> Coefficients {
    let step = params.schedule.step(k);
    match params.kind {
        ScheduleKind::NesterovVarying => {
            let (alpha, delta, _) = schedule_params(ScheduleKind::NesterovVarying, k, 1.0).expect("no parameters to check");
            Coefficients { alpha, delta, beta: discrete_beta(delta, step), step }
        }
        _ => params.coefficients(k, step),
    }
}

/// Work done by one specialized step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsStepStats {
    pub coefficients: Coefficients,
    /// Number of sign-constrained coordinates of the simplex projection.
    pub active: usize,
    pub budget_active: bool,
    /// Ratios sorted by the simplex projection (at most `2n`).
    pub sorted: usize,
}

struct Transformed {
    g1: Vec<f64>,
    g2: Vec<f64>,
    g3: f64,
    w: Vec<f64>,
    nonneg: Vec<bool>,
}

fn momentum_parts<O: LinearOperator>(
    cs: &CsProblem<O>,
    state: &CsState,
    c: &Coefficients,
) -> (Vec<f64>, Vec<f64>) {
    let n = state.dim();
    let t = c.step;
    let y: Vec<f64> = state.x.iter().zip(&state.u).map(|(x, u)| x + c.beta * u).collect();
    let mut grad = vec![0.0; n];
    cs.scaled_gradient(&y, &mut grad);
    let r: Vec<f64> = (0..n).map(|i| state.u[i] - 2.0 * c.delta * t * state.u[i] - t * grad[i]).collect();
    let rbar: Vec<f64> = state.ubar.iter().map(|u| u - 2.0 * c.delta * t * u).collect();
    (r, rbar)
}

/// Solves the velocity QP through the weighted simplex and advances the state.
fn finish(state: &CsState, c: Coefficients, r: &[f64], rbar: &[f64], tr: Transformed) -> Result<(CsState, CsStepStats)> {
    let n = state.dim();
    let mut q = Vec::with_capacity(2 * n);
    q.extend((0..n).map(|i| tr.g1[i] / 2.0 + (r[i] + rbar[i]) / 2.0));
    q.extend((0..n).map(|i| tr.g2[i] / 2.0 + (rbar[i] - r[i]) / 2.0));
    let budget = tr.g3 + (0..n).map(|i| tr.w[i] * (tr.g1[i] + tr.g2[i])).sum::<f64>() / 2.0;
    let weights = [tr.w.as_slice(), tr.w.as_slice()].concat();
    let active = tr.nonneg.iter().filter(|b| **b).count();
    let inst = WeightedSimplexInstance::new(q, tr.nonneg, weights, budget)?;
    let (xi, stats) = project_weighted_simplex_with_stats(&inst)?;

    let t = c.step;
    let mut next = state.clone();
    for i in 0..n {
        let (a, b) = (xi[i], xi[n + i]);
        next.u[i] = a - b - (tr.g1[i] - tr.g2[i]) / 2.0;
        next.ubar[i] = a + b - (tr.g1[i] + tr.g2[i]) / 2.0;
        next.x[i] += t * next.u[i];
        next.xbar[i] += t * next.ubar[i];
    }
    next.k += 1;
    Ok((next, CsStepStats { coefficients: c, active, budget_active: stats.budget_active, sorted: stats.sorted }))
}

/// One iteration of the local momentum scheme on the slack formulation,
/// solved in closed form by the weighted-simplex projection.
pub fn alg4_step<O: LinearOperator>(cs: &CsProblem<O>, state: &CsState, ball: &LpBall, params: &SolverParams) -> Result<CsState> {
    alg4_step_stats(cs, state, ball, params).map(|(s, _)| s)
}

pub fn alg4_step_stats<O: LinearOperator>(
    cs: &CsProblem<O>,
    state: &CsState,
    ball: &LpBall,
    params: &SolverParams,
) -> Result<(CsState, CsStepStats)> {
    state.check(cs.dim())?;
    let n = state.dim();
    let c = cs_coefficients(params, state.k);
    let (r, rbar) = momentum_parts(cs, state, &c);

    let g1: Vec<f64> = (0..n).map(|i| c.alpha * (state.x[i] + state.xbar[i])).collect();
    let g2: Vec<f64> = (0..n).map(|i| c.alpha * (state.xbar[i] - state.x[i])).collect();
    let g3 = c.alpha * ball.slack(&state.xbar);
    let w = if g3 > 0.0 { vec![0.0; n] } else { state.xbar.iter().map(|&v| power_approx_grad(v, ball)).collect() };
    let nonneg = g1.iter().chain(&g2).map(|g| *g <= 0.0).collect();
    finish(state, c, &r, &rbar, Transformed { g1, g2, g3, w, nonneg })
}

/// One iteration of the global momentum scheme on the slack formulation.
pub fn alg5_step<O: LinearOperator>(cs: &CsProblem<O>, state: &CsState, ball: &LpBall, params: &SolverParams) -> Result<CsState> {
    alg5_step_stats(cs, state, ball, params).map(|(s, _)| s)
}

pub fn alg5_step_stats<O: LinearOperator>(
    cs: &CsProblem<O>,
    state: &CsState,
    ball: &LpBall,
    params: &SolverParams,
) -> Result<(CsState, CsStepStats)> {
    state.check(cs.dim())?;
    let n = state.dim();
    let c = cs_coefficients(params, state.k);
    let (t, beta) = (c.step, c.beta);
    let (r, rbar) = momentum_parts(cs, state, &c);

    let ybar: Vec<f64> = (0..n).map(|i| state.xbar[i] + beta * state.ubar[i]).collect();
    let w: Vec<f64> = ybar.iter().map(|&v| power_approx_grad(v, ball)).collect();
    let mut g1 = vec![0.0; n];
    let mut g2 = vec![0.0; n];
    for i in 0..n {
        let (x, xb, u, ub) = (state.x[i], state.xbar[i], state.u[i], state.ubar[i]);
        let y = x + beta * u;
        let (a1, a2) = (x + xb, -x + xb);
        let (b1, b2) = (y + ybar[i], -y + ybar[i]);
        g1[i] = c.alpha * a1 + (b1 - a1 - beta * (u + ub)) / t;
        g2[i] = c.alpha * a2 + (b2 - a2 - beta * (-u + ub)) / t;
    }
    let g3x = ball.slack(&state.xbar);
    let g3y = ball.slack(&ybar);
    let g3 = c.alpha * g3x + (g3y - g3x + beta * dot(&w, &state.ubar)) / t;
    finish(state, c, &r, &rbar, Transformed { g1, g2, g3, w, nonneg: vec![true; 2 * n] })
}

/// The slack formulation over `z = (x, xbar)`: objective `|Ax - b|^2 / (2L)`,
/// constraints `x + xbar` (n rows), `xbar - x` (n rows) and
/// `nu - sum_i (xbar_i)^p_Delta`.
pub struct SlackProblem<'a, O> {
    cs: &'a CsProblem<O>,
    ball: LpBall,
}

impl<O: LinearOperator> Problem for SlackProblem<'_, O> {
    fn dim(&self) -> usize {
        2 * self.cs.dim()
    }

    fn num_constraints(&self) -> usize {
        2 * self.cs.dim() + 1
    }

    fn objective(&self, z: &[f64]) -> f64 {
        self.cs.objective(&z[..self.cs.dim()]) / self.cs.lipschitz
    }

    fn objective_grad(&self, z: &[f64], grad: &mut [f64]) {
        let n = self.cs.dim();
        self.cs.scaled_gradient(&z[..n], &mut grad[..n]);
        grad[n..].iter_mut().for_each(|g| *g = 0.0);
    }

    fn constraints(&self, z: &[f64], out: &mut [f64]) {
        let n = self.cs.dim();
        let (x, xbar) = z.split_at(n);
        for i in 0..n {
            out[i] = x[i] + xbar[i];
            out[n + i] = xbar[i] - x[i];
        }
        out[2 * n] = self.ball.slack(xbar);
    }

    fn constraint_grad(&self, z: &[f64], i: usize, row: &mut [f64]) {
        let n = self.cs.dim();
        row.iter_mut().for_each(|r| *r = 0.0);
        if i < n {
            row[i] = 1.0;
            row[n + i] = 1.0;
        } else if i < 2 * n {
            row[i - n] = -1.0;
            row[i] = 1.0;
        } else {
            for j in 0..n {
                row[n + j] = -power_approx_grad(z[n + j], &self.ball);
            }
        }
    }

    /// All constraints are affine or convex.
    fn constraint_lower_curvature(&self, _i: usize) -> Option<f64> {
        Some(0.0)
    }
}
