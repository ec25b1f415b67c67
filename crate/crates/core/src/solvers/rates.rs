use crate::linalg::{dot, DenseMatrix};
use crate::{Error, Result};

/// Smoothness surrogate `L + B L_g / eps` of the Lagrangian when no bound on
/// the multipliers is known.
pub fn effective_smoothness(l: f64, b: f64, l_g: f64, eps: f64) -> Result<f64> {
    if !(l > 0.0) || !(b >= 0.0) || !(l_g >= 0.0) {
        return Err(Error::InvalidParameter(format!("need L > 0, B >= 0, L_g >= 0; got ({l}, {b}, {l_g})")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    Ok(l + b * l_g / eps)
}

/// `max_{lo <= x <= hi} |Q x + c|^2 / (2 mu)`. The maximum of a convex
/// function over a box sits at a vertex, so all `2^n` vertices are scanned.
pub fn quadratic_box_gradient_bound(q: &DenseMatrix, c: &[f64], lo: &[f64], hi: &[f64], mu: f64) -> Result<f64> {
    let n = c.len();
    crate::error::check_len(n, q.rows())?;
    crate::error::check_len(n, q.cols())?;
    crate::error::check_len(n, lo.len())?;
    crate::error::check_len(n, hi.len())?;
    if n > 24 {
        return Err(Error::InvalidParameter(format!("vertex scan limited to n <= 24, got {n}")));
    }
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
    }
    let mut x = vec![0.0; n];
    let mut best: f64 = 0.0;
    for mask in 0u32..(1u32 << n) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = if mask >> i & 1 == 1 { hi[i] } else { lo[i] };
        }
        let mut grad = q.apply(&x);
        grad.iter_mut().zip(c).for_each(|(g, ci)| *g += ci);
        best = best.max(dot(&grad, &grad));
    }
    Ok(best / (2.0 * mu))
}

/// Least-squares slope of `log(value)` against `log(k)`. Pairs with
/// nonpositive `k` or value are skipped; `None` if fewer than two remain.
pub fn loglog_slope(k: &[f64], value: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = k
        .iter()
        .zip(value)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothness_examples() {
        assert_eq!(effective_smoothness(3.0, 7.0, 0.0, 0.1).unwrap(), 3.0);
        assert_eq!(effective_smoothness(1.0, 2.0, 1.0, 0.5).unwrap(), 5.0);
        assert!(effective_smoothness(1.0, 2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let k: Vec<f64> = (1..50).map(|v| v as f64).collect();
        let v: Vec<f64> = k.iter().map(|x| 3.0 * x.powf(-2.0)).collect();
        assert!((loglog_slope(&k, &v).unwrap() + 2.0).abs() < 1e-12);
        assert!(loglog_slope(&[1.0], &[1.0]).is_none());
    }
}
