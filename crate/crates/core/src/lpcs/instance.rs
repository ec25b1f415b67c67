use std::io::{BufRead, Write};

use crate::linalg::DenseMatrix;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// A sensing matrix, measurements and the planted signal.
#[derive(Debug, Clone, PartialEq)]
pub struct CsInstance {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub x_true: Vec<f64>,
}

/// Draws `A` (row-major, standard normal), then `spikes` distinct positions by
/// a partial Fisher-Yates shuffle, then the noise `eta`;
/// `b = A x_true + noise_scale * eta`.
pub fn gen_compressed_sensing(m: usize, n: usize, spikes: usize, noise_scale: f64, seed: u64) -> Result<CsInstance> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!("dimensions must be positive, got {m}x{n}")));
    }
    if spikes > n {
        return Err(Error::InvalidParameter(format!("{spikes} spikes do not fit into {n} entries")));
    }
    if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise scale must be nonnegative, got {noise_scale}")));
    }
    let mut rng = SplitMix64::new(seed);
    let a = DenseMatrix::from_row_major(m, n, rng.normal_vec(m * n))?;

    let mut perm: Vec<usize> = (0..n).collect();
    for i in 0..spikes {
        let j = i + rng.below((n - i) as u64) as usize;
        perm.swap(i, j);
    }
    let mut x_true = vec![0.0; n];
    for &p in &perm[..spikes] {
        x_true[p] = 1.0;
    }

    let eta = rng.normal_vec(m);
    let mut b = a.apply(&x_true);
    for (bi, e) in b.iter_mut().zip(&eta) {
        *bi += noise_scale * e;
    }
    Ok(CsInstance { a, b, x_true })
}

/// Text format:
///
/// ```text
/// cs-instance <rows> <cols>
/// <row 0 of A>
/// ...
/// <row rows-1 of A>
/// <b>
/// <x_true>
/// ```
///
/// Values are whitespace separated in shortest round-trip form.
pub fn write_instance<W: Write>(mut w: W, inst: &CsInstance) -> std::io::Result<()> {
    writeln!(w, "cs-instance {} {}", inst.a.rows(), inst.a.cols())?;
    let line = |w: &mut W, v: &[f64]| -> std::io::Result<()> {
        let s: Vec<String> = v.iter().map(|x| format!("{x:e}")).collect();
        writeln!(w, "{}", s.join(" "))
    };
    for i in 0..inst.a.rows() {
        line(&mut w, inst.a.row(i))?;
    }
    line(&mut w, &inst.b)?;
    line(&mut w, &inst.x_true)
}

pub fn read_instance<R: BufRead>(r: R) -> Result<CsInstance> {
    let bad = |msg: String| Error::InvalidParameter(format!("malformed instance: {msg}"));
    let mut lines = r.lines();
    let mut next = || -> Result<String> {
        lines.next().ok_or_else(|| bad("unexpected end of input".into()))?.map_err(|e| bad(e.to_string()))
    };
    let header = next()?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != "cs-instance" {
        return Err(bad(format!("header '{header}'")));
    }
    let rows: usize = parts[1].parse().map_err(|_| bad(format!("rows '{}'", parts[1])))?;
    let cols: usize = parts[2].parse().map_err(|_| bad(format!("cols '{}'", parts[2])))?;
    let parse = |s: String, len: usize| -> Result<Vec<f64>> {
        let v: Vec<f64> = s
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| bad(format!("value '{t}'"))))
            .collect::<Result<_>>()?;
        if v.len() != len {
            return Err(bad(format!("expected {len} values, found {}", v.len())));
        }
        Ok(v)
    };
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        data.extend(parse(next()?, cols)?);
    }
    let a = DenseMatrix::from_row_major(rows, cols, data)?;
    let b = parse(next()?, rows)?;
    let x_true = parse(next()?, cols)?;
    Ok(CsInstance { a, b, x_true })
}
