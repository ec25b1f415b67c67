//! KKT residual `min_{lambda >= 0} |grad f(x) - sum_i lambda_i grad g_i(x)|`
//! over the constraints with `g_i(x) <= eps_const`.

use crate::cone::VelocityCone;
use crate::linalg::norm;
use crate::polyproj::{project, DEFAULT_TOL};
use crate::problem::Problem;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Stationarity {
    pub residual: f64,
    /// Constraint indices admitted to the multiplier support.
    pub active: Vec<usize>,
    /// One multiplier per constraint of the problem; zero off `active`.
    pub multipliers: Vec<f64>,
}

/// Nonnegative least squares over the active gradients, solved as the
/// projection of `-grad f` onto `{v : grad g_i^T v >= 0}`: the projection
/// equals `-grad f + sum_i lambda_i grad g_i` with the optimal `lambda`.
pub fn stationarity_residual(problem: &dyn Problem, x: &[f64], eps_const: f64) -> Result<Stationarity> {
    crate::error::check_len(problem.dim(), x.len())?;
    let n = problem.dim();
    let n_g = problem.num_constraints();
    let mut r = problem.gradient(x);
    r.iter_mut().for_each(|v| *v = -*v);
    let g = problem.constraint_values(x);

    let mut cone = VelocityCone::empty(n);
    let mut row = vec![0.0; n];
    for (i, gi) in g.iter().enumerate() {
        if *gi <= eps_const {
            problem.constraint_grad(x, i, &mut row);
            cone.push(&row, 0.0, i);
        }
    }
    let res = project(&r, &cone, DEFAULT_TOL)?;
    let mut multipliers = vec![0.0; n_g];
    for (j, l) in res.multipliers.iter().enumerate() {
        multipliers[cone.source[j]] = *l;
    }
    Ok(Stationarity { residual: norm(&res.v), active: cone.source, multipliers })
}
