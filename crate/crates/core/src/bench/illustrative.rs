//! Phase portraits of the one-dimensional example
//! `f(x) = (x + 2)^2 / 2`, `g(x) = (x, 2 - x)`.

use std::io::Write;

use crate::problem::Illustrative;
use crate::solvers::{Method, Status, StoppingRule};
use crate::Result;

use super::config::ExperimentConfig;

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub x0: f64,
    pub u0: f64,
    /// `(t, x, u)` with `t` the accumulated step size.
    pub points: Vec<(f64, f64, f64)>,
    pub status: Status,
}

impl Trajectory {
    pub fn final_x(&self) -> f64 {
        self.points.last().map_or(f64::NAN, |p| p.1)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,u")?;
        for (t, x, u) in &self.points {
            writeln!(w, "{t:.16e},{x:.16e},{u:.16e}")?;
        }
        Ok(())
    }
}

/// Default grid of starting points: `x0` in `{-1, 0, 1, 2, 3}`, `u0` in `{-2, -1, 0, 1, 2}`.
pub fn default_grid() -> Vec<(f64, f64)> {
    let mut grid = Vec::new();
    for x in [-1.0, 0.0, 1.0, 2.0, 3.0] {
        for u in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            grid.push((x, u));
        }
    }
    grid
}

pub fn trajectory(method: Method, cfg: &ExperimentConfig, x0: f64, u0: f64) -> Result<Trajectory> {
    let params = cfg.solver_params();
    let stop = StoppingRule { max_iter: cfg.iters, u_tol: 0.0, kkt_tol: 0.0, kkt_every: cfg.iters.max(1), ..StoppingRule::default() };
    let mut points = vec![(0.0, x0, u0)];
    let mut t = 0.0;
    let trace = crate::solvers::run_observed(&Illustrative, method, &params, &stop, &[x0], &[u0], &mut |rep| {
        t += rep.coefficients.step;
        points.push((t, rep.after.x[0], rep.after.u[0]));
    })?;
    Ok(Trajectory { x0, u0, points, status: trace.status })
}

pub fn run_illustrative(cfg: &ExperimentConfig, grid: &[(f64, f64)]) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    let method = cfg.method.solver().expect("validated");
    grid.iter().map(|&(x0, u0)| trajectory(method, cfg, x0, u0)).collect()
}

/// Boundaries of the regions `{g_i <= 0, gamma_i <= 0}` for `x` in
/// `[x_lo, x_hi]`, as `(region, x, u)` polyline vertices.
/// Region 1 is `x <= 0, u <= -alpha x`; region 2 is `x >= 2, u >= alpha (2 - x)`.
pub fn region_boundaries(alpha: f64, x_lo: f64, x_hi: f64, u_lo: f64, u_hi: f64) -> Vec<(usize, f64, f64)> {
    let mut pts = Vec::new();
    if x_lo < 0.0 {
        pts.push((1, x_lo, -alpha * x_lo));
        pts.push((1, 0.0, 0.0));
        pts.push((1, 0.0, u_lo));
    }
    if x_hi > 2.0 {
        pts.push((2, 2.0, u_hi));
        pts.push((2, 2.0, 0.0));
        pts.push((2, x_hi, alpha * (2.0 - x_hi)));
    }
    pts
}

pub fn write_regions<W: Write>(mut w: W, pts: &[(usize, f64, f64)]) -> std::io::Result<()> {
    writeln!(w, "region,x,u")?;
    for (r, x, u) in pts {
        writeln!(w, "{r},{x:.16e},{u:.16e}")?;
    }
    Ok(())
}

/// Starting from `x0`, runs the method until `|x_k| <= tol` holds for good
/// or `max_iter` passes; returns the first iteration from which it stays.
pub fn settle_iteration(method: Method, cfg: &ExperimentConfig, x0: f64, tol: f64, max_iter: usize) -> Result<Option<usize>> {
    let mut c = cfg.clone();
    c.iters = max_iter;
    let traj = trajectory(method, &c, x0, 0.0)?;
    if traj.status == Status::InfeasibleCone {
        return Ok(None);
    }
    let last_out = traj.points.iter().rposition(|p| p.1.abs() > tol);
    Ok(match last_out {
        None => Some(0),
        Some(i) if i + 1 < traj.points.len() => Some(i + 1),
        Some(_) => None,
    })
}

