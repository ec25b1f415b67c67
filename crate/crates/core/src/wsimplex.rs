//! Projection onto the weighted simplex `{xi : xi_i >= 0 (i in I), w^T xi <= nu}`
//! by sorted thresholding, and the l1 ball as its sign-split special case.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSimplexInstance {
    pub q: Vec<f64>,
    /// `nonneg[i]` marks `i` as a member of the sign-constrained set `I`.
    pub nonneg: Vec<bool>,
    pub weights: Vec<f64>,
    pub budget: f64,
}

impl WeightedSimplexInstance {
    pub fn new(q: Vec<f64>, nonneg: Vec<bool>, weights: Vec<f64>, budget: f64) -> Result<Self> {
        crate::error::check_len(q.len(), nonneg.len())?;
        crate::error::check_len(q.len(), weights.len())?;
        if let Some(i) = weights.iter().position(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter(format!("weight {i} is {}", weights[i])));
        }
        if !budget.is_finite() {
            return Err(Error::InvalidParameter(format!("budget is {budget}")));
        }
        Ok(Self { q, nonneg, weights, budget })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Every coordinate sign-constrained.
    pub fn all_nonneg(q: Vec<f64>, weights: Vec<f64>, budget: f64) -> Result<Self> {
        let n = q.len();
        Self::new(q, vec![true; n], weights, budget)
    }

    pub fn is_feasible(&self, xi: &[f64], tol: f64) -> bool {
        let wx: f64 = self.weights.iter().zip(xi).map(|(w, x)| w * x).sum();
        wx <= self.budget + tol && xi.iter().zip(&self.nonneg).all(|(x, &c)| !c || *x >= -tol)
    }
}

/// Work counters of one projection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimplexStats {
    /// Number of ratios handed to the sort (0 when the budget is slack).
    pub sorted: usize,
    /// Number of ratios inspected by the threshold scan.
    pub scanned: usize,
    pub budget_active: bool,
}

pub fn project_weighted_simplex(inst: &WeightedSimplexInstance) -> Result<Vec<f64>> {
    project_weighted_simplex_with_stats(inst).map(|(xi, _)| xi)
}

/// As [`project_weighted_simplex`], also reporting work counters.
///
/// A negative budget is accepted; when no point satisfies the constraints
/// the call fails with [`Error::InfeasibleCone`].
pub fn project_weighted_simplex_with_stats(
    inst: &WeightedSimplexInstance,
) -> Result<(Vec<f64>, SimplexStats)> {
    let q = &inst.q;
    let w = &inst.weights;
    let inside = &inst.nonneg;
    let mut stats = SimplexStats::default();

    let mut xi: Vec<f64> = q.iter().zip(inside).map(|(&qi, &c)| if c && qi < 0.0 { 0.0 } else { qi }).collect();
    let load: f64 = w.iter().zip(&xi).map(|(a, b)| a * b).sum();
    if !(load > inst.budget) {
        return Ok((xi, stats));
    }
    stats.budget_active = true;

    let mut s_free = 0.0;
    let mut w2_free = 0.0;
    let mut order = Vec::new();
    for i in 0..q.len() {
        if !inside[i] {
            s_free += w[i] * q[i];
            w2_free += w[i] * w[i];
        } else if w[i] > 0.0 {
            order.push(i);
        }
    }
    stats.sorted = order.len();
    // stable: equal ratios keep ascending index order
    order.sort_by(|&a, &b| (q[b] / w[b]).total_cmp(&(q[a] / w[a])));

    let mut s = s_free;
    let mut w2 = w2_free;
    for &i in &order {
        stats.scanned += 1;
        if s - w2 * (q[i] / w[i]) > inst.budget {
            break;
        }
        s += w[i] * q[i];
        w2 += w[i] * w[i];
    }
    if !(w2 > 0.0) {
        return Err(Error::InfeasibleCone { row: q.len() });
    }
    let lambda = (s - inst.budget) / w2;
    if lambda < 0.0 {
        stats.budget_active = false;
        return Ok((xi, stats));
    }
    for i in 0..q.len() {
        let v = q[i] - w[i] * lambda;
        xi[i] = if inside[i] && v < 0.0 { 0.0 } else { v };
    }
    Ok((xi, stats))
}

/// Projection onto `{x : |x|_1 <= nu}`.
pub fn project_l1_ball(q: &[f64], nu: f64) -> Result<Vec<f64>> {
    if !(nu >= 0.0) {
        return Err(Error::InvalidParameter(format!("l1 radius must be nonnegative, got {nu}")));
    }
    let n = q.len();
    let mut split = Vec::with_capacity(2 * n);
    split.extend(q.iter().map(|v| v.max(0.0)));
    split.extend(q.iter().map(|v| (-v).max(0.0)));
    let inst = WeightedSimplexInstance::all_nonneg(split, vec![1.0; 2 * n], nu)?;
    let xi = project_weighted_simplex(&inst)?;
    Ok((0..n).map(|i| xi[i] - xi[n + i]).collect())
}
