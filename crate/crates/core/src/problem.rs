//! Problem model: minimize f(x) subject to g(x) >= 0.

use crate::linalg::{axpy, dot, DenseMatrix};
use crate::rng::SplitMix64;

/// Oracles for `min f(x) s.t. g(x) >= 0`.
///
/// Implementations must be deterministic and safe to call from several
/// threads at once. Constraint gradient rows are requested one at a time so
/// that callers touching only violated constraints pay only for those.
pub trait Problem: Sync {
    /// Decision dimension `n`.
    fn dim(&self) -> usize;

    /// Constraint count `n_g`.
    fn num_constraints(&self) -> usize;

    fn objective(&self, x: &[f64]) -> f64;

    fn objective_grad(&self, x: &[f64], grad: &mut [f64]);

    /// Writes all `n_g` constraint values.
    fn constraints(&self, x: &[f64], out: &mut [f64]);

    /// Writes the gradient of constraint `i` (0-based) into `row`.
    fn constraint_grad(&self, x: &[f64], i: usize, row: &mut [f64]);

    /// Bound `L` with `g_i(x + d) >= g_i(x) + grad g_i(x)^T d - L |d|^2 / 2`.
    /// Zero for affine or convex constraints; `None` when unknown.
    fn constraint_lower_curvature(&self, _i: usize) -> Option<f64> {
        None
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.objective_grad(x, &mut g);
        g
    }

    fn constraint_values(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.num_constraints()];
        self.constraints(x, &mut g);
        g
    }

    fn constraint_row(&self, x: &[f64], i: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.dim()];
        self.constraint_grad(x, i, &mut row);
        row
    }
}

/// `f(x) = x^T Q x / 2 + c^T x` with affine constraints `G x - h >= 0`.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    pub q: DenseMatrix,
    pub c: Vec<f64>,
    pub g: DenseMatrix,
    pub h: Vec<f64>,
}

impl QuadraticProblem {
    pub fn new(q: DenseMatrix, c: Vec<f64>, g: DenseMatrix, h: Vec<f64>) -> crate::Result<Self> {
        let n = c.len();
        crate::error::check_len(n, q.rows())?;
        crate::error::check_len(n, q.cols())?;
        crate::error::check_len(h.len(), g.rows())?;
        if g.rows() > 0 {
            crate::error::check_len(n, g.cols())?;
        }
        Ok(Self { q, c, g, h })
    }
}

impl Problem for QuadraticProblem {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn num_constraints(&self) -> usize {
        self.h.len()
    }

    fn objective(&self, x: &[f64]) -> f64 {
        let qx = self.q.apply(x);
        0.5 * dot(x, &qx) + dot(&self.c, x)
    }

    fn objective_grad(&self, x: &[f64], grad: &mut [f64]) {
        self.q.apply_into(x, grad);
        axpy(1.0, &self.c, grad);
    }

    fn constraints(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.g.row(i), x) - self.h[i];
        }
    }

    fn constraint_grad(&self, _x: &[f64], i: usize, row: &mut [f64]) {
        row.copy_from_slice(self.g.row(i));
    }

    fn constraint_lower_curvature(&self, _i: usize) -> Option<f64> {
        Some(0.0)
    }
}

/// A seeded strongly convex QP with known spectrum.
#[derive(Debug, Clone)]
pub struct RandomQp {
    pub problem: QuadraticProblem,
    /// Strong convexity constant (smallest eigenvalue of Q).
    pub mu: f64,
    /// Smoothness constant (largest eigenvalue of Q).
    pub lipschitz: f64,
    /// A strictly feasible point.
    pub feasible_point: Vec<f64>,
}

/// Builds `Q = U diag(d) U^T` with `d` log-spaced in `[1, kappa]` and `U`
/// orthonormalized from a Gaussian matrix; `n_g` Gaussian constraint rows are
/// made strictly feasible at a random point, and the unconstrained minimizer is
/// pushed outside the feasible set so that several constraints bind.
pub fn random_qp(n: usize, n_g: usize, kappa: f64, seed: u64) -> RandomQp {
    let mut rng = SplitMix64::new(seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    while basis.len() < n {
        let mut v = rng.normal_vec(n);
        for b in &basis {
            let p = dot(&v, b);
            axpy(-p, b, &mut v);
        }
        let nv = crate::linalg::norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|vi| *vi /= nv);
            basis.push(v);
        }
    }
    let eig: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                1.0
            } else {
                kappa.powf(i as f64 / (n - 1) as f64)
            }
        })
        .collect();
    let mut q = DenseMatrix::zeros(n, n);
    for (d, b) in eig.iter().zip(&basis) {
        for i in 0..n {
            for j in 0..n {
                q[(i, j)] += d * b[i] * b[j];
            }
        }
    }
    // symmetrize against rounding
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (q[(i, j)] + q[(j, i)]);
            q[(i, j)] = s;
            q[(j, i)] = s;
        }
    }

    let feasible_point = rng.normal_vec(n);
    let mut g = DenseMatrix::zeros(n_g, n);
    let mut h = vec![0.0; n_g];
    for i in 0..n_g {
        let row = rng.normal_vec(n);
        let slack = rng.uniform_range(0.1, 1.0);
        h[i] = dot(&row, &feasible_point) - slack;
        g.row_mut(i).copy_from_slice(&row);
    }
    let mut target = feasible_point.clone();
    let push = rng.normal_vec(n);
    axpy(3.0, &push, &mut target);
    let mut c = q.apply(&target);
    c.iter_mut().for_each(|ci| *ci = -*ci);

    RandomQp {
        problem: QuadraticProblem { q, c, g, h },
        mu: eig[0],
        lipschitz: eig[n - 1],
        feasible_point,
    }
}

/// The one-dimensional example `f(x) = (x + 2)^2 / 2`, `g(x) = (x, 2 - x)`.
/// Its minimizer is `x* = 0` with multiplier `(2, 0)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Illustrative;

impl Problem for Illustrative {
    fn dim(&self) -> usize {
        1
    }

    fn num_constraints(&self) -> usize {
        2
    }

    fn objective(&self, x: &[f64]) -> f64 {
        0.5 * (x[0] + 2.0).powi(2)
    }

    fn objective_grad(&self, x: &[f64], grad: &mut [f64]) {
        grad[0] = x[0] + 2.0;
    }

    fn constraints(&self, x: &[f64], out: &mut [f64]) {
        out[0] = x[0];
        out[1] = 2.0 - x[0];
    }

    fn constraint_grad(&self, _x: &[f64], i: usize, row: &mut [f64]) {
        row[0] = if i == 0 { 1.0 } else { -1.0 };
    }

    fn constraint_lower_curvature(&self, _i: usize) -> Option<f64> {
        Some(0.0)
    }
}

type ObjFn = dyn Fn(&[f64], &mut [f64]) -> f64 + Send + Sync;
type ConFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;
type ConGradFn = dyn Fn(&[f64], usize, &mut [f64]) + Send + Sync;

/// Problem assembled from closures. The objective closure returns the value
/// and writes the gradient.
pub struct FnProblem {
    n: usize,
    n_g: usize,
    objective: Box<ObjFn>,
    constraints: Box<ConFn>,
    constraint_grad: Box<ConGradFn>,
}

impl FnProblem {
    pub fn new(
        n: usize,
        n_g: usize,
        objective: impl Fn(&[f64], &mut [f64]) -> f64 + Send + Sync + 'static,
        constraints: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        constraint_grad: impl Fn(&[f64], usize, &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            n,
            n_g,
            objective: Box::new(objective),
            constraints: Box::new(constraints),
            constraint_grad: Box::new(constraint_grad),
        }
    }
}

impl Problem for FnProblem {
    fn dim(&self) -> usize {
        self.n
    }

    fn num_constraints(&self) -> usize {
        self.n_g
    }

    fn objective(&self, x: &[f64]) -> f64 {
        let mut scratch = vec![0.0; self.n];
        (self.objective)(x, &mut scratch)
    }

    fn objective_grad(&self, x: &[f64], grad: &mut [f64]) {
        (self.objective)(x, grad);
    }

    fn constraints(&self, x: &[f64], out: &mut [f64]) {
        (self.constraints)(x, out);
    }

    fn constraint_grad(&self, x: &[f64], i: usize, row: &mut [f64]) {
        (self.constraint_grad)(x, i, row);
    }
}

/// `f(x) - lambda^T g(x)`.
pub fn lagrangian(problem: &dyn Problem, x: &[f64], lambda: &[f64]) -> f64 {
    let g = problem.constraint_values(x);
    problem.objective(x) - dot(lambda, &g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_qp_has_prescribed_spectrum() {
        let qp = random_qp(6, 4, 25.0, 11);
        assert_eq!(qp.mu, 1.0);
        assert!((qp.lipschitz - 25.0).abs() < 1e-12);
        // Rayleigh quotients stay inside [mu, L]
        let mut rng = SplitMix64::new(5);
        for _ in 0..50 {
            let v = rng.normal_vec(6);
            let rq = dot(&v, &qp.problem.q.apply(&v)) / dot(&v, &v);
            assert!(rq >= 1.0 - 1e-10 && rq <= 25.0 + 1e-10);
        }
        let g = qp.problem.constraint_values(&qp.feasible_point);
        assert!(g.iter().all(|&gi| gi > 0.0));
    }

    #[test]
    fn illustrative_values() {
        let p = Illustrative;
        assert_eq!(p.objective(&[0.0]), 2.0);
        assert_eq!(p.gradient(&[0.0]), vec![2.0]);
        assert_eq!(p.constraint_values(&[0.5]), vec![0.5, 1.5]);
        assert_eq!(p.constraint_row(&[0.5], 1), vec![-1.0]);
    }

    #[test]
    fn fn_problem_matches_illustrative() {
        let p = FnProblem::new(
            1,
            2,
            |x, g| {
                g[0] = x[0] + 2.0;
                0.5 * (x[0] + 2.0).powi(2)
            },
            |x, out| {
                out[0] = x[0];
                out[1] = 2.0 - x[0];
            },
            |_, i, row| row[0] = if i == 0 { 1.0 } else { -1.0 },
        );
        for x in [-1.0, 0.0, 0.7] {
            assert_eq!(p.objective(&[x]), Illustrative.objective(&[x]));
            assert_eq!(p.gradient(&[x]), Illustrative.gradient(&[x]));
            assert_eq!(p.constraint_values(&[x]), Illustrative.constraint_values(&[x]));
        }
    }
}
