use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::gallery::PointFunction;
use crate::grid::{Grid, Norm, Point};

pub const LSC_NOTE: &str =
    "one-sided falsifier: sampled evidence can refute lower semicontinuity, never prove it";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LscVerdict {
    /// "consistent with lsc at x_bar"
    Consistent,
    /// "lsc violated at x_bar"
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct LscLevel {
    pub radius: f64,
    /// Minimum of f over the sampled points of the punctured sphere;
    /// `None` when every sample fell outside the box.
    pub min_sample: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LscProbeReport {
    pub x_bar: Vec<f64>,
    pub f_at_x_bar: String,
    pub levels: Vec<LscLevel>,
    pub tol: f64,
    pub verdict: LscVerdict,
    pub note: &'static str,
}

fn sphere_samples(grid: &Grid, x_bar: &Point, r: f64) -> Vec<Point> {
    let mut out = Vec::new();
    if grid.dim() == 1 {
        for p in [Point::d1(x_bar.x() - r), Point::d1(x_bar.x() + r)] {
            if grid.contains(&p) {
                out.push(p);
            }
        }
        return out;
    }
    // 16 directions rescaled to the grid norm's unit sphere.
    let m = 16;
    for k in 0..m {
        let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        let (ux, uy) = (th.cos(), th.sin());
        let len = match grid.norm() {
            Norm::L1 => ux.abs() + uy.abs(),
            Norm::L2 => 1.0,
            Norm::LInf => ux.abs().max(uy.abs()),
        };
        let p = Point::d2(x_bar.x() + r * ux / len, x_bar.y() + r * uy / len);
        if grid.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Estimates liminf of f on shrinking punctured neighborhoods of `x_bar` and
/// compares it with `f(x_bar)`. This can only refute lower semicontinuity.
pub fn lsc_probe(
    f: &dyn PointFunction,
    grid: &Grid,
    x_bar: &Point,
    levels: usize,
    r0: Option<f64>,
    tol: f64,
) -> Result<LscProbeReport> {
    if levels < 2 {
        return Err(Error::precondition("lsc probe: need at least 2 refinement levels"));
    }
    if !grid.contains(x_bar) {
        return Err(Error::domain(format!("lsc probe: {x_bar} outside the grid box")));
    }
    let r0 = r0.unwrap_or_else(|| {
        (0..grid.dim())
            .map(|a| (grid.upper()[a] - grid.lower()[a]) / 4.0)
            .fold(f64::INFINITY, f64::min)
    });
    let f_at = f.eval(x_bar);

    let mut report_levels = Vec::with_capacity(levels);
    let mut mins = Vec::with_capacity(levels);
    for j in 0..levels {
        let r = r0 * 0.5f64.powi(j as i32);
        let samples = sphere_samples(grid, x_bar, r);
        let min_sample = samples
            .iter()
            .map(|p| f.eval(p))
            .min()
            .map(|v| v.to_f64());
        if let Some(m) = min_sample {
            mins.push(m);
        }
        report_levels.push(LscLevel { radius: r, min_sample });
    }

    // Sampled liminf estimates cannot prove semicontinuity, and a continuous
    // function with unbounded local slope legitimately undershoots f(x_bar)
    // at every finite radius. The falsifier therefore flags only a STALLED
    // undershoot: the gap below f(x_bar) stops shrinking as radii halve.
    let verdict = match (mins.last(), mins.len()) {
        (Some(&last), n) if n >= 2 => {
            let prev = mins[n - 2];
            match f_at {
                ExtReal::PosInf => {
                    if last.is_finite() && last <= prev {
                        LscVerdict::Violated
                    } else {
                        LscVerdict::Consistent
                    }
                }
                other => {
                    let gap_last = other.to_f64() - last;
                    let gap_prev = other.to_f64() - prev;
                    if gap_last > tol && gap_last > 0.95 * gap_prev {
                        LscVerdict::Violated
                    } else {
                        LscVerdict::Consistent
                    }
                }
            }
        }
        _ => LscVerdict::Consistent,
    };

    Ok(LscProbeReport {
        x_bar: x_bar.coords().to_vec(),
        f_at_x_bar: f_at.to_string(),
        levels: report_levels,
        tol,
        verdict,
        note: LSC_NOTE,
    })
}
