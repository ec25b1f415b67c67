//! Velocity cones `{v : W v >= w}` built from constraint linearizations.

use crate::linalg::dot;
use crate::problem::Problem;
use crate::schedule::SolverParams;
use crate::state::IterateState;

/// Polyhedron `{v : W v >= w}` in velocity space. Row `j` stems from
/// constraint `source[j]` of the underlying problem.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityCone {
    n: usize,
    rows: Vec<f64>,
    pub rhs: Vec<f64>,
    pub source: Vec<usize>,
}

impl VelocityCone {
    pub fn empty(n: usize) -> Self {
        Self { n, rows: Vec::new(), rhs: Vec::new(), source: Vec::new() }
    }

    pub fn push(&mut self, row: &[f64], rhs: f64, source: usize) {
        assert_eq!(row.len(), self.n, "cone row has wrong length");
        self.rows.extend_from_slice(row);
        self.rhs.push(rhs);
        self.source.push(source);
    }

    /// Builds a cone from explicit rows; sources are `0..m`.
    pub fn from_rows(n: usize, rows: &[Vec<f64>], rhs: &[f64]) -> Self {
        let mut cone = Self::empty(n);
        for (j, (r, b)) in rows.iter().zip(rhs).enumerate() {
            cone.push(r, *b, j);
        }
        cone
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of rows `m`.
    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.rows[j * self.n..(j + 1) * self.n]
    }

    /// `W_j v - w_j`.
    pub fn slack(&self, j: usize, v: &[f64]) -> f64 {
        dot(self.row(j), v) - self.rhs[j]
    }

    /// Smallest slack over all rows (`+inf` for an empty cone).
    pub fn min_slack(&self, v: &[f64]) -> f64 {
        (0..self.len()).map(|j| self.slack(j, v)).fold(f64::INFINITY, f64::min)
    }

    /// `W^T lambda`.
    pub fn transpose_apply(&self, lambda: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (j, l) in lambda.iter().enumerate() {
            if *l != 0.0 {
                crate::linalg::axpy(*l, self.row(j), &mut out);
            }
        }
        out
    }
}

/// `gamma_i(x, u) = grad g_i(x)^T u + alpha g_i(x)`.
pub fn constraint_velocity(problem: &dyn Problem, x: &[f64], u: &[f64], i: usize, alpha: f64) -> f64 {
    assert!(i < problem.num_constraints(), "constraint index out of range");
    let row = problem.constraint_row(x, i);
    let g = problem.constraint_values(x)[i];
    dot(&row, u) + alpha * g
}

/// Cone of the local momentum scheme: one row per constraint with
/// `g_i(x_k) <= eps_const`, right-hand side
/// `-alpha g_i(x_k) - eps * min(gamma_i(x_k, u_k), 0)`. Gradient rows of
/// inactive constraints are never requested.
pub fn build_local_cone(problem: &dyn Problem, state: &IterateState, params: &SolverParams) -> VelocityCone {
    let alpha = params.coefficients(state.k, state.step).alpha;
    local_cone(problem, &state.x, &state.u, alpha, params.restitution, params.eps_const)
}

pub(crate) fn local_cone(
    problem: &dyn Problem,
    x: &[f64],
    u: &[f64],
    alpha: f64,
    restitution: f64,
    eps_const: f64,
) -> VelocityCone {
    let n = problem.dim();
    let g = problem.constraint_values(x);
    let mut cone = VelocityCone::empty(n);
    let mut row = vec![0.0; n];
    for (i, gi) in g.iter().enumerate() {
        if *gi <= eps_const {
            problem.constraint_grad(x, i, &mut row);
            let gamma = dot(&row, u) + alpha * gi;
            cone.push(&row, -alpha * gi - restitution * gamma.min(0.0), i);
        }
    }
    cone
}

/// Cone of the constrained gradient scheme: every constraint, right-hand side
/// `-alpha g_i(x)`.
pub fn build_full_cone(problem: &dyn Problem, x: &[f64], alpha: f64) -> VelocityCone {
    let n = problem.dim();
    let g = problem.constraint_values(x);
    let mut cone = VelocityCone::empty(n);
    let mut row = vec![0.0; n];
    for (i, gi) in g.iter().enumerate() {
        problem.constraint_grad(x, i, &mut row);
        cone.push(&row, -alpha * gi, i);
    }
    cone
}

/// Cone of the global momentum scheme: every constraint linearized at
/// `y_k = x_k + beta u_k` with the curvature-corrected right-hand side
/// `-alpha g_i(x_k) - (g_i(y_k) - g_i(x_k) - grad g_i(y_k)^T beta u_k) / T_k`.
pub fn build_global_cone(problem: &dyn Problem, state: &IterateState, params: &SolverParams) -> VelocityCone {
    let c = params.coefficients(state.k, state.step);
    global_cone(problem, &state.x, &state.u, c.alpha, c.beta, c.step)
}

pub(crate) fn global_cone(
    problem: &dyn Problem,
    x: &[f64],
    u: &[f64],
    alpha: f64,
    beta: f64,
    step: f64,
) -> VelocityCone {
    let n = problem.dim();
    let y: Vec<f64> = x.iter().zip(u).map(|(xi, ui)| xi + beta * ui).collect();
    let gx = problem.constraint_values(x);
    let gy = problem.constraint_values(&y);
    let mut cone = VelocityCone::empty(n);
    let mut row = vec![0.0; n];
    for i in 0..gx.len() {
        problem.constraint_grad(&y, i, &mut row);
        let remainder = gy[i] - gx[i] - beta * dot(&row, u);
        cone.push(&row, -alpha * gx[i] - remainder / step, i);
    }
    cone
}
