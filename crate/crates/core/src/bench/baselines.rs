//! Projection-based baselines: projected gradient and Nesterov's constant
//! step scheme with gradient mapping.

use crate::linalg::{DenseMatrix, axpy};
use crate::lpcs::{CsProblem, LinearOperator};
use crate::problem::Problem;
use crate::wsimplex::project_l1_ball;
use crate::{Error, Result};

/// Smooth objective with gradient.
pub trait Objective {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
}

/// `|Ax - b|^2 / 2` (unscaled).
impl<O: LinearOperator> Objective for CsProblem<O> {
    fn dim(&self) -> usize {
        CsProblem::dim(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.objective(x)
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        self.scaled_gradient(x, out);
        out.iter_mut().for_each(|g| *g *= self.lipschitz);
    }
}

/// The objective part of a [`Problem`]; its constraints are ignored.
pub struct ObjectiveOf<'a>(pub &'a dyn Problem);

impl Objective for ObjectiveOf<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.0.objective(x)
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        self.0.objective_grad(x, out)
    }
}

/// `x^T Q x / 2 + c^T x`.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    pub q: DenseMatrix,
    pub c: Vec<f64>,
}

impl Objective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let qx = self.q.apply(x);
        0.5 * crate::linalg::dot(x, &qx) + crate::linalg::dot(&self.c, x)
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        self.q.apply_into(x, out);
        out.iter_mut().zip(&self.c).for_each(|(g, c)| *g += c);
    }
}

/// A set with a cheap Euclidean projection.
#[derive(Debug, Clone, PartialEq)]
pub enum ProjectableSet {
    Whole,
    L1Ball { nu: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl ProjectableSet {
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            ProjectableSet::Whole => Ok(x.to_vec()),
            ProjectableSet::L1Ball { nu } => project_l1_ball(x, *nu),
            ProjectableSet::Box { lo, hi } => {
                crate::error::check_len(lo.len(), x.len())?;
                crate::error::check_len(hi.len(), x.len())?;
                if lo.iter().zip(hi).any(|(l, h)| l > h) {
                    return Err(Error::InvalidParameter("box with lo > hi".into()));
                }
                Ok(x.iter().zip(lo.iter().zip(hi)).map(|(v, (l, h))| v.clamp(*l, *h)).collect())
            }
        }
    }
}

/// `x_{k+1} = Proj(x_k - T grad f(x_k))`.
pub fn pgd_step(obj: &dyn Objective, set: &ProjectableSet, x: &[f64], step: f64) -> Result<Vec<f64>> {
    crate::error::check_len(obj.dim(), x.len())?;
    let mut g = vec![0.0; x.len()];
    obj.gradient(x, &mut g);
    let mut y = x.to_vec();
    axpy(-step, &g, &mut y);
    set.project(&y)
}

/// Iterate of the accelerated scheme: point `x`, estimate-sequence center `v`
/// and its curvature `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApgdState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub gamma: f64,
    pub k: usize,
}

impl ApgdState {
    /// `v_0 = x_0`, `gamma_0 = L`.
    pub fn new(x0: Vec<f64>, lipschitz: f64) -> Self {
        Self { v: x0.clone(), x: x0, gamma: lipschitz, k: 0 }
    }
}

/// One step of the constant step scheme:
/// `L a^2 = (1 - a) gamma + a mu`, `gamma' = (1 - a) gamma + a mu`,
/// `y = (a gamma v + gamma' x) / (gamma + a mu)`, `x' = Proj(y - grad f(y) / L)`,
/// `v' = ((1 - a) gamma v + a mu y - a L (y - x')) / gamma'`.
pub fn apgd_step(obj: &dyn Objective, set: &ProjectableSet, state: &ApgdState, mu: f64, lipschitz: f64) -> Result<ApgdState> {
    crate::error::check_len(obj.dim(), state.x.len())?;
    if !(lipschitz > 0.0) || !(mu >= 0.0) || mu > lipschitz {
        return Err(Error::InvalidParameter(format!("need 0 <= mu <= L, L > 0; got mu={mu}, L={lipschitz}")));
    }
    let gamma = state.gamma;
    // positive root of L a^2 + (gamma - mu) a - gamma = 0
    let bq = gamma - mu;
    let a = (-bq + (bq * bq + 4.0 * lipschitz * gamma).sqrt()) / (2.0 * lipschitz);
    let gamma_next = (1.0 - a) * gamma + a * mu;
    let n = state.x.len();
    let y: Vec<f64> = (0..n)
        .map(|i| (a * gamma * state.v[i] + gamma_next * state.x[i]) / (gamma + a * mu))
        .collect();
    let mut g = vec![0.0; n];
    obj.gradient(&y, &mut g);
    let mut z = y.clone();
    axpy(-1.0 / lipschitz, &g, &mut z);
    let x = set.project(&z)?;
    let v = (0..n)
        .map(|i| ((1.0 - a) * gamma * state.v[i] + a * mu * y[i] - a * lipschitz * (y[i] - x[i])) / gamma_next)
        .collect();
    Ok(ApgdState { x, v, gamma: gamma_next, k: state.k + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_projection_clamps() {
        let set = ProjectableSet::Box { lo: vec![0.0, -1.0], hi: vec![1.0, 1.0] };
        assert_eq!(set.project(&[2.0, -3.0]).unwrap(), vec![1.0, -1.0]);
        let bad = ProjectableSet::Box { lo: vec![1.0], hi: vec![0.0] };
        assert!(bad.project(&[0.5]).is_err());
    }

    #[test]
    fn pgd_on_unconstrained_quadratic_contracts() {
        let obj = QuadraticObjective { q: DenseMatrix::identity(2), c: vec![0.0, 0.0] };
        let x = pgd_step(&obj, &ProjectableSet::Whole, &[2.0, -4.0], 0.5).unwrap();
        assert_eq!(x, vec![1.0, -2.0]);
    }

    #[test]
    fn pgd_stays_on_l1_sphere() {
        let obj = QuadraticObjective { q: DenseMatrix::identity(2), c: vec![-10.0, 0.0] };
        let set = ProjectableSet::L1Ball { nu: 1.0 };
        let x = pgd_step(&obj, &set, &[0.5, 0.5], 0.5).unwrap();
        assert!((x[0].abs() + x[1].abs() - 1.0).abs() < 1e-14);
    }
}
