//! Euclidean projection onto a polyhedron `{v : W v >= w}`.
//!
//! Solves `min |v - r|^2 / 2  s.t.  W v >= w` with a dual active-set method
//! (Goldfarb-Idnani with identity Hessian). Starting from the unconstrained
//! minimizer `v = r`, the most violated row is added; the primal step moves
//! along the component of that row orthogonal to the active rows, and active
//! rows whose multipliers would turn negative are dropped on the way. The
//! Cholesky factor of the active-row Gram matrix is extended on every add and
//! rebuilt on every drop.
//!
//! The result carries the multipliers `Lambda >= 0` with
//! `v = r + W^T Lambda`, so `W^T Lambda` is the constraint force.

use log::warn;

use crate::cone::VelocityCone;
use crate::linalg::{axpy, dot, GrowingCholesky};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Rows whose orthogonal complement to the active rows has squared norm below
/// this fraction of their own squared norm count as linearly dependent.
const DEPENDENCE_PIVOT: f64 = 1e-12;

/// Multiplier norm above which the cone is declared empty.
const DUAL_BLOWUP: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub v: Vec<f64>,
    /// One multiplier per cone row.
    pub multipliers: Vec<f64>,
    /// Rows in the final active set, in the order they were added.
    pub active: Vec<usize>,
    pub iterations: usize,
    /// Number of times a linearly dependent row forced a pure dual step.
    pub dependent_rows: usize,
}

impl ProjectionResult {
    fn unconstrained(r: &[f64], m: usize) -> Self {
        Self {
            v: r.to_vec(),
            multipliers: vec![0.0; m],
            active: Vec::new(),
            iterations: 0,
            dependent_rows: 0,
        }
    }

    /// `W^T Lambda`.
    pub fn force(&self, cone: &VelocityCone) -> Vec<f64> {
        cone.transpose_apply(&self.multipliers)
    }
}

struct ActiveSet<'a> {
    cone: &'a VelocityCone,
    rows: Vec<usize>,
    lambda: Vec<f64>,
    chol: GrowingCholesky,
}

impl<'a> ActiveSet<'a> {
    fn new(cone: &'a VelocityCone) -> Self {
        Self { cone, rows: Vec::new(), lambda: Vec::new(), chol: GrowingCholesky::default() }
    }

    /// Inner products of the active rows with `row`.
    fn cross(&self, row: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|&j| dot(self.cone.row(j), row)).collect()
    }

    fn push(&mut self, p: usize, lambda: f64) {
        let row = self.cone.row(p);
        let cross = self.cross(row);
        let pivot = self.chol.push(&cross, dot(row, row));
        debug_assert!(pivot > 0.0);
        self.rows.push(p);
        self.lambda.push(lambda);
    }

    fn remove(&mut self, pos: usize) {
        self.rows.remove(pos);
        self.lambda.remove(pos);
        self.refactor();
    }

    fn refactor(&mut self) {
        self.chol.clear();
        for idx in 0..self.rows.len() {
            let row = self.cone.row(self.rows[idx]);
            let cross: Vec<f64> = self.rows[..idx].iter().map(|&j| dot(self.cone.row(j), row)).collect();
            self.chol.push(&cross, dot(row, row));
        }
        debug_assert_eq!(self.chol.len(), self.rows.len());
    }
}

/// Projects `r` onto `{v : W v >= w}`.
///
/// `tol` is the feasibility tolerance: a row counts as violated when
/// `W_j v - w_j < -tol (1 + |w_j|)`.
pub fn project(r: &[f64], cone: &VelocityCone, tol: f64) -> Result<ProjectionResult> {
    crate::error::check_len(cone.dim(), r.len())?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let m = cone.len();
    let n = r.len();
    if m == 0 {
        return Ok(ProjectionResult::unconstrained(r, 0));
    }

    let mut v = r.to_vec();
    let mut active = ActiveSet::new(cone);
    let mut in_active = vec![false; m];
    let mut iterations = 0usize;
    let mut dependent_rows = 0usize;
    let max_iterations = 10 * (m + n) + 100;

    loop {
        // most violated row; strict comparison keeps the smallest index on ties
        let mut choice: Option<(usize, f64)> = None;
        for j in 0..m {
            if in_active[j] {
                continue;
            }
            let s = cone.slack(j, &v);
            if s < -tol * (1.0 + cone.rhs[j].abs()) && choice.map_or(true, |(_, best)| s < best) {
                choice = Some((j, s));
            }
        }
        let Some((p, _)) = choice else { break };

        let row_p = cone.row(p);
        let row_norm2 = dot(row_p, row_p);
        if row_norm2 == 0.0 {
            return Err(Error::InfeasibleCone { row: p });
        }
        let mut lambda_p = 0.0;

        loop {
            iterations += 1;
            if iterations > max_iterations {
                return Err(Error::MaxIterations { iterations });
            }
            // dual direction d = G^{-1} N n_p, primal direction z = n_p - N^T d
            let mut d = active.cross(row_p);
            active.chol.solve(&mut d);
            let mut z = row_p.to_vec();
            for (&j, dj) in active.rows.iter().zip(&d) {
                axpy(-dj, cone.row(j), &mut z);
            }
            let zz = dot(&z, &z);
            let dependent = zz <= DEPENDENCE_PIVOT * row_norm2;
            let slack = cone.slack(p, &v);
            let full_step = if dependent { f64::INFINITY } else { -slack / dot(&z, row_p) };

            let mut partial_step = f64::INFINITY;
            let mut blocking = None;
            for (pos, (&dj, &lj)) in d.iter().zip(&active.lambda).enumerate() {
                if dj > 0.0 {
                    let t = lj / dj;
                    if t < partial_step {
                        partial_step = t;
                        blocking = Some(pos);
                    }
                }
            }

            if full_step.is_infinite() && partial_step.is_infinite() {
                return Err(Error::InfeasibleCone { row: p });
            }

            let step = full_step.min(partial_step);
            if !dependent {
                axpy(step, &z, &mut v);
            } else {
                dependent_rows += 1;
            }
            for (l, dj) in active.lambda.iter_mut().zip(&d) {
                *l -= step * dj;
            }
            lambda_p += step;

            let dual_norm = (dot(&active.lambda, &active.lambda) + lambda_p * lambda_p).sqrt();
            if !(dual_norm <= DUAL_BLOWUP) {
                return Err(Error::InfeasibleCone { row: p });
            }

            if full_step <= partial_step {
                active.push(p, lambda_p);
                in_active[p] = true;
                break;
            }
            let pos = blocking.expect("finite partial step has a blocking row");
            in_active[active.rows[pos]] = false;
            active.remove(pos);
        }
    }

    if dependent_rows > 0 {
        warn!("velocity projection met {dependent_rows} linearly dependent rows");
    }

    let mut multipliers = vec![0.0; m];
    for (&j, &l) in active.rows.iter().zip(&active.lambda) {
        multipliers[j] = l.max(0.0);
    }
    Ok(ProjectionResult { v, multipliers, active: active.rows, iterations, dependent_rows })
}

/// Closed-form projection onto a single halfspace `row^T v >= rhs`.
pub fn project_halfspace(r: &[f64], row: &[f64], rhs: f64) -> Result<ProjectionResult> {
    crate::error::check_len(row.len(), r.len())?;
    let nn = dot(row, row);
    if nn == 0.0 {
        return Err(Error::DegenerateRow { row: 0 });
    }
    let gap = rhs - dot(row, r);
    if gap <= 0.0 {
        return Ok(ProjectionResult::unconstrained(r, 1));
    }
    let lambda = gap / nn;
    let mut v = r.to_vec();
    axpy(lambda, row, &mut v);
    Ok(ProjectionResult {
        v,
        multipliers: vec![lambda],
        active: vec![0],
        iterations: 1,
        dependent_rows: 0,
    })
}

/// Largest violation of the KKT conditions of a projection result:
/// primal feasibility, dual feasibility, stationarity `v - r - W^T Lambda`
/// and complementarity.
pub fn kkt_violation(r: &[f64], cone: &VelocityCone, res: &ProjectionResult) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..cone.len() {
        let s = cone.slack(j, &res.v);
        worst = worst.max(-s);
        worst = worst.max(-res.multipliers[j]);
        worst = worst.max((res.multipliers[j] * s).abs());
    }
    let force = res.force(cone);
    for i in 0..r.len() {
        worst = worst.max((res.v[i] - r[i] - force[i]).abs());
    }
    worst
}
