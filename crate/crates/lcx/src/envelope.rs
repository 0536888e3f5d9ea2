use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::gallery::PointFunction;
use crate::grid::{Grid, Point};
use crate::probes::{lsc_probe, LscProbeReport, LscVerdict};
use crate::sampled::{sample, SampledFunction};

fn require_no_neg_inf(f: &SampledFunction, op: &str) -> Result<()> {
    if f.has_neg_inf() {
        return Err(Error::precondition(format!(
            "{op}: input takes the value -inf; Lipschitz-concave support sets force f > -inf"
        )));
    }
    Ok(())
}

fn require_nonneg_k(k: f64, op: &str) -> Result<()> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::precondition(format!("{op}: slope bound k must be finite and >= 0, got {k}")));
    }
    Ok(())
}

/// Least k-Lipschitz majorant on the grid:
/// `E+_k f(x) = max over finite nodes y of f(y) - k*d(x, y)`.
pub fn lipschitz_upper_envelope(f: &SampledFunction, k: f64) -> Result<SampledFunction> {
    require_no_neg_inf(f, "upper envelope")?;
    require_nonneg_k(k, "upper envelope")?;
    if !f.is_proper() {
        return Err(Error::precondition("upper envelope: all values are +inf (improper input)"));
    }
    let g = f.grid();
    let n = g.node_count();
    let vals = f.values_f64();
    let mut out = Vec::with_capacity(n);
    for x in 0..n {
        let px = g.node_coord(x);
        let mut best = f64::NEG_INFINITY;
        for y in 0..n {
            if !vals[y].is_finite() {
                continue;
            }
            let cand = vals[y] - k * g.dist(&px, &g.node_coord(y));
            if cand > best {
                best = cand;
            }
        }
        out.push(ExtReal::finite(best));
    }
    SampledFunction::new(g.clone(), out, None)
}

/// Greatest k-Lipschitz minorant on the grid (the inf-convolution with
/// `k*||.||`): `E-_k f(x) = min over finite nodes y of f(y) + k*d(x, y)`.
pub fn lipschitz_lower_envelope(f: &SampledFunction, k: f64) -> Result<SampledFunction> {
    require_no_neg_inf(f, "lower envelope")?;
    require_nonneg_k(k, "lower envelope")?;
    if !f.is_proper() {
        return Err(Error::precondition("lower envelope: improper input (no finite value)"));
    }
    let g = f.grid();
    let n = g.node_count();
    let vals = f.values_f64();
    let mut out = Vec::with_capacity(n);
    for x in 0..n {
        let px = g.node_coord(x);
        let mut best = f64::INFINITY;
        for y in 0..n {
            if !vals[y].is_finite() {
                continue;
            }
            let cand = vals[y] + k * g.dist(&px, &g.node_coord(y));
            if cand < best {
                best = cand;
            }
        }
        out.push(ExtReal::finite(best));
    }
    SampledFunction::new(g.clone(), out, None)
}

/// Grid Lipschitz modulus: max of |f(x)-f(y)| / d(x,y) over node pairs with
/// both values finite. Zero when fewer than two finite nodes.
pub fn lipschitz_modulus(f: &SampledFunction) -> f64 {
    let g = f.grid();
    let n = g.node_count();
    let vals = f.values_f64();
    let mut best = 0.0f64;
    for x in 0..n {
        if !vals[x].is_finite() {
            continue;
        }
        let px = g.node_coord(x);
        for y in (x + 1)..n {
            if !vals[y].is_finite() {
                continue;
            }
            let q = (vals[x] - vals[y]).abs() / g.dist(&px, &g.node_coord(y));
            if q > best {
                best = q;
            }
        }
    }
    best
}

/// Outcome of the combined grid evidence for Lipschitz-concave convexity:
/// a finite Lipschitz lower bound witness plus semicontinuity probes.
#[derive(Debug, Clone, Serialize)]
pub struct LcConvexityReport {
    /// First slope bound in the schedule whose lower envelope is finite
    /// everywhere on the grid.
    pub witness_k: Option<f64>,
    /// Lower-envelope values of the witness (omitted from JSON summaries).
    #[serde(skip)]
    pub witness: Option<SampledFunction>,
    /// True when some node's envelope argmin is attained only at a box
    /// boundary node other than itself: the bound leans on the box edge.
    pub boundary_attained: bool,
    pub lsc_reports: Vec<LscProbeReport>,
    pub verdict: String,
}

/// Searches the slope schedule for a finite Lipschitz lower-bound witness and
/// combines it with semicontinuity probes at the given points.
pub fn lc_convexity_test(
    f: &dyn PointFunction,
    grid: &Grid,
    k_schedule: &[f64],
    probe_points: &[Point],
    probe_levels: usize,
    tol: f64,
) -> Result<LcConvexityReport> {
    if k_schedule.is_empty() {
        return Err(Error::precondition("lc test: empty slope schedule"));
    }
    if k_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("lc test: slope schedule must be strictly increasing"));
    }
    let sf = sample(f, grid, None)?;
    require_no_neg_inf(&sf, "lc test")?;
    if !sf.is_proper() {
        return Err(Error::precondition("lc test: improper input"));
    }

    let mut witness_k = None;
    let mut witness = None;
    let mut boundary = false;
    for &k in k_schedule {
        let env = lipschitz_lower_envelope(&sf, k)?;
        if env.values().iter().all(|v| v.is_finite()) {
            boundary = envelope_leans_on_boundary(&sf, k);
            witness_k = Some(k);
            witness = Some(env);
            break;
        }
    }

    let mut lsc_reports = Vec::new();
    for p in probe_points {
        lsc_reports.push(lsc_probe(f, grid, p, probe_levels, None, tol)?);
    }

    let witness_found = witness_k.is_some();
    let lsc_ok = lsc_reports.iter().all(|r| r.verdict == LscVerdict::Consistent);
    let verdict = if witness_found && lsc_ok {
        "Lipschitz-concave convex (grid evidence)".to_string()
    } else if !witness_found {
        "no finite Lipschitz lower-bound witness in schedule".to_string()
    } else {
        "lower semicontinuity probe failed".to_string()
    };

    Ok(LcConvexityReport { witness_k, witness, boundary_attained: boundary, lsc_reports, verdict })
}

/// True when for some node x the lower-envelope argmin is attained strictly
/// at a boundary node different from x.
fn envelope_leans_on_boundary(f: &SampledFunction, k: f64) -> bool {
    let g = f.grid();
    let n = g.node_count();
    let vals = f.values_f64();
    for x in 0..n {
        let px = g.node_coord(x);
        let mut best = f64::INFINITY;
        let mut best_y = usize::MAX;
        for y in 0..n {
            if !vals[y].is_finite() {
                continue;
            }
            let cand = vals[y] + k * g.dist(&px, &g.node_coord(y));
            if cand < best {
                best = cand;
                best_y = y;
            }
        }
        if best_y != usize::MAX && best_y != x && g.is_boundary(best_y) {
            // Strict: no non-boundary node ties with the boundary minimum.
            let tied_interior = (0..n).any(|y| {
                vals[y].is_finite()
                    && !g.is_boundary(y)
                    && vals[y] + k * g.dist(&px, &g.node_coord(y)) == best
            });
            if !tied_interior {
                return true;
            }
        }
    }
    false
}
