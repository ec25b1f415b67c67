#![allow(dead_code)]

use velopt::linalg::{dist, dot};

/// Gaussian elimination with partial pivoting; `None` for (near-)singular systems.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-11 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            if f != 0.0 {
                for j in col..n {
                    a[i][j] -= f * a[col][j];
                }
                b[i] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Projection of `r` onto `{v : rows v >= rhs}` by trying every subset of
/// rows as equalities and keeping the closest feasible candidate.
pub fn enumerate_projection(r: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let m = rows.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1u32 << m) {
        let s: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
        let gram: Vec<Vec<f64>> = s.iter().map(|&a| s.iter().map(|&b| dot(&rows[a], &rows[b])).collect()).collect();
        let b: Vec<f64> = s.iter().map(|&a| rhs[a] - dot(&rows[a], r)).collect();
        let mu = if s.is_empty() { Vec::new() } else { match solve_dense(gram, b) { Some(mu) => mu, None => continue } };
        let mut v = r.to_vec();
        for (&a, mu_a) in s.iter().zip(&mu) {
            for (vi, wi) in v.iter_mut().zip(&rows[a]) {
                *vi += mu_a * wi;
            }
        }
        let feasible = rows.iter().zip(rhs).all(|(w, b)| dot(w, &v) >= b - 1e-9 * (1.0 + b.abs()));
        if feasible {
            let d = dist(&v, r);
            if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                best = Some((d, v));
            }
        }
    }
    best.map(|(_, v)| v)
}

/// The weighted simplex as an explicit polyhedron: `xi_i >= 0` for `i` in `I`
/// and `-w^T xi >= -budget`.
pub fn simplex_rows(nonneg: &[bool], w: &[f64], budget: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = w.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..n {
        if nonneg[i] {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            rows.push(e);
            rhs.push(0.0);
        }
    }
    rows.push(w.iter().map(|v| -v).collect());
    rhs.push(-budget);
    (rows, rhs)
}

/// Minimum of `|a - sum_j lambda_j c_j|` over a grid of `lambda >= 0`.
pub fn grid_nnls(a: &[f64], cols: &[Vec<f64>], hi: f64, steps: usize) -> f64 {
    let m = cols.len();
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; m];
    loop {
        let mut res = a.to_vec();
        for (c, &k) in cols.iter().zip(&idx) {
            let l = hi * k as f64 / steps as f64;
            for (ri, ci) in res.iter_mut().zip(c) {
                *ri -= l * ci;
            }
        }
        best = best.min(dot(&res, &res).sqrt());
        let mut p = 0;
        while p < m {
            idx[p] += 1;
            if idx[p] <= steps {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
        if p == m {
            break;
        }
    }
    best
}
