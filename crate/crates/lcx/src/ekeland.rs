use serde::Serialize;

use crate::envelope::{lipschitz_lower_envelope, lipschitz_modulus};
use crate::error::{Error, Result};
use crate::grid::NodeIndex;
use crate::minorant::{ConeFunction, GridMinorant};
use crate::sampled::SampledFunction;

/// The minorant input of the refinement: a grid minorant or an elementary cone.
pub enum MinorantInput<'a> {
    Grid(&'a GridMinorant),
    Cone(&'a ConeFunction),
}

impl MinorantInput<'_> {
    fn values(&self, f: &SampledFunction) -> Vec<f64> {
        match self {
            MinorantInput::Grid(m) => m.values().to_vec(),
            MinorantInput::Cone(c) => c.sample(f.grid()),
        }
    }

    fn lipschitz(&self) -> f64 {
        match self {
            MinorantInput::Grid(m) => m.lipschitz_budget(),
            MinorantInput::Cone(c) => c.slope,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EkelandResiduals {
    /// g(x_bar) - g(x_delta) - (eps/delta)*d(x_delta, x_bar); >= 0 within tol.
    pub descent_slack: f64,
    /// d(x_delta, x_bar); <= delta.
    pub distance: f64,
    /// min over x != x_delta of g(x) + (eps/delta)*d(x, x_delta) - g(x_delta);
    /// the grid version of the strict minimality is non-strict, so this can
    /// legitimately be zero (and +inf when x_delta is the only finite node).
    #[serde(with = "crate::serde_util::ext_f64")]
    pub strict_min_slack: f64,
    /// |h_bar(x_delta) - f(x_delta)| after construction.
    pub support_touch_error: f64,
    /// min over nodes of f - h_bar; >= 0 within tol.
    #[serde(with = "crate::serde_util::ext_f64")]
    pub support_min_slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EkelandResult {
    pub x_delta: NodeIndex,
    pub x_delta_coords: Vec<f64>,
    pub epsilon: f64,
    pub delta: f64,
    pub iterations: usize,
    pub residuals: EkelandResiduals,
    /// The supporting minorant h_bar = h - (eps/delta)*||. - x_delta|| + gap,
    /// touching f at x_delta. Budget: Lipschitz(h) + eps/delta.
    #[serde(skip)]
    pub support: GridMinorant,
}

/// The constructive refinement: starting from an eps-approximate supporting
/// minorant at x_bar, walk the penalized argmin until it fixes, then tilt the
/// minorant into an exact support at the fixed point.
pub fn ekeland_refine(
    f: &SampledFunction,
    h: MinorantInput<'_>,
    x_bar: NodeIndex,
    epsilon: f64,
    delta: f64,
    tol_feas: f64,
) -> Result<EkelandResult> {
    let g = f.grid();
    let n = g.node_count();
    if x_bar >= n {
        return Err(Error::precondition("ekeland: x_bar out of range"));
    }
    if !(epsilon > 0.0) || !(delta > 0.0) {
        return Err(Error::precondition("ekeland: epsilon and delta must be positive"));
    }
    let fv = f.values_f64();
    if !fv[x_bar].is_finite() {
        return Err(Error::domain("ekeland: f(x_bar) is not finite"));
    }
    if f.has_neg_inf() {
        return Err(Error::precondition("ekeland: f takes -inf"));
    }
    let hv = h.values(f);

    // h must minorize f, and the eps-gap must hold at x_bar.
    for i in 0..n {
        if fv[i].is_finite() && hv[i] > fv[i] + tol_feas {
            return Err(Error::precondition(format!(
                "ekeland: h is not a minorant of f (h - f = {:.3e} at node {i})",
                hv[i] - fv[i]
            )));
        }
    }
    if hv[x_bar] + epsilon < fv[x_bar] - tol_feas {
        return Err(Error::precondition(format!(
            "ekeland: eps-gap violated: h(x_bar) + eps = {} < f(x_bar) = {}",
            hv[x_bar] + epsilon,
            fv[x_bar]
        )));
    }

    // g = f - h, nonnegative, +inf outside dom f
    let gv: Vec<f64> =
        (0..n).map(|i| if fv[i].is_finite() { fv[i] - hv[i] } else { f64::INFINITY }).collect();
    let pen = epsilon / delta;

    let mut current = x_bar;
    let mut iterations = 0usize;
    loop {
        let pc = g.node_coord(current);
        let mut best = current;
        let mut best_q = gv[current];
        for x in 0..n {
            if !gv[x].is_finite() {
                continue;
            }
            let q = gv[x] + pen * g.dist(&g.node_coord(x), &pc);
            if q < best_q || (q == best_q && x < best) {
                best_q = q;
                best = x;
            }
        }
        if best == current {
            break;
        }
        current = best;
        iterations += 1;
        if iterations > n {
            return Err(Error::Lp(
                "ekeland: iteration exceeded the node count; the descent argument is violated"
                    .into(),
            ));
        }
    }
    let x_delta = current;
    let pd = g.node_coord(x_delta);

    // h_bar(x) = h(x) - pen*d(x, x_delta) + (f - h)(x_delta); exact at x_delta.
    let gap = fv[x_delta] - hv[x_delta];
    let mut support_values: Vec<f64> = (0..n)
        .map(|i| hv[i] - pen * g.dist(&g.node_coord(i), &pd) + gap)
        .collect();
    support_values[x_delta] = fv[x_delta];
    let support = GridMinorant::new(g.clone(), support_values, h.lipschitz() + pen)?;

    let distance = g.dist(&pd, &g.node_coord(x_bar));
    let descent_slack = gv[x_bar] - gv[x_delta] - pen * distance;
    let mut strict_min_slack = f64::INFINITY;
    for x in 0..n {
        if x == x_delta || !gv[x].is_finite() {
            continue;
        }
        let s = gv[x] + pen * g.dist(&g.node_coord(x), &pd) - gv[x_delta];
        if s < strict_min_slack {
            strict_min_slack = s;
        }
    }
    let support_min_slack = (0..n)
        .filter(|&i| fv[i].is_finite())
        .map(|i| fv[i] - support.value(i))
        .fold(f64::INFINITY, f64::min);

    Ok(EkelandResult {
        x_delta,
        x_delta_coords: pd.coords().to_vec(),
        epsilon,
        delta,
        iterations,
        residuals: EkelandResiduals {
            descent_slack,
            distance,
            strict_min_slack,
            support_touch_error: (support.value(x_delta) - fv[x_delta]).abs(),
            support_min_slack,
        },
        support,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityPoint {
    pub anchor: NodeIndex,
    pub anchor_coords: Vec<f64>,
    pub x_delta: NodeIndex,
    pub epsilon_used: f64,
    pub distance: f64,
    pub invariants_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityScan {
    pub stride: usize,
    pub delta: f64,
    pub k_for_minorant: f64,
    pub points: Vec<DensityPoint>,
    /// max over finite nodes of the distance to the nearest certified point.
    #[serde(with = "crate::serde_util::ext_f64")]
    pub covering_radius: f64,
    pub certified_nodes: Vec<NodeIndex>,
}

/// Sweeps the effective domain with the refinement, anchoring at every
/// stride-th finite node. The base minorant is the k-Lipschitz lower
/// envelope, shifted down where needed so the requested eps-gap is exact.
/// Points whose gap exceeds eps use the gap itself (recorded per point).
pub fn density_scan(
    f: &SampledFunction,
    epsilon: f64,
    delta: f64,
    k_for_minorant: f64,
    stride: usize,
    tol_feas: f64,
) -> Result<DensityScan> {
    if stride == 0 {
        return Err(Error::precondition("density scan: stride must be >= 1"));
    }
    if !(epsilon > 0.0) || !(delta > 0.0) {
        return Err(Error::precondition("density scan: epsilon and delta must be positive"));
    }
    let env = lipschitz_lower_envelope(f, k_for_minorant)?;
    let env_values: Vec<f64> = env.values_f64();
    let env_lip = lipschitz_modulus(&env);
    let g = f.grid();
    let fv = f.values_f64();

    let domain: Vec<NodeIndex> = f.effective_domain();
    let mut points = Vec::new();
    let mut certified = Vec::new();
    for (pos, &anchor) in domain.iter().enumerate() {
        if pos % stride != 0 {
            continue;
        }
        let gap = fv[anchor] - env_values[anchor];
        let eps_used = epsilon.max(gap);
        let shift = (eps_used - gap).max(0.0);
        let h = GridMinorant::new(
            g.clone(),
            env_values.iter().map(|v| v - shift).collect(),
            env_lip,
        )?;
        let r = ekeland_refine(f, MinorantInput::Grid(&h), anchor, eps_used, delta, tol_feas)?;
        let ok = r.residuals.descent_slack >= -tol_feas
            && r.residuals.distance <= delta + tol_feas
            && r.residuals.strict_min_slack >= -tol_feas
            && r.residuals.support_min_slack >= -tol_feas;
        if ok && !certified.contains(&r.x_delta) {
            certified.push(r.x_delta);
        }
        points.push(DensityPoint {
            anchor,
            anchor_coords: g.node_coord(anchor).coords().to_vec(),
            x_delta: r.x_delta,
            epsilon_used: eps_used,
            distance: r.residuals.distance,
            invariants_ok: ok,
        });
    }

    let covering_radius = domain
        .iter()
        .map(|&i| {
            let p = g.node_coord(i);
            certified
                .iter()
                .map(|&c| g.dist(&p, &g.node_coord(c)))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0f64, f64::max);

    certified.sort_unstable();
    Ok(DensityScan {
        stride,
        delta,
        k_for_minorant,
        points,
        covering_radius,
        certified_nodes: certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::GalleryFunction;
    use crate::grid::{Grid, Norm, Point};
    use crate::sampled::sample;

    #[test]
    fn refine_on_neg_sqrt_finds_support_point() {
        let g = Grid::new_1d(-1.0, 1.0, 1001, Norm::L2).unwrap();
        let f = sample(&GalleryFunction::NegSqrtAbs, &g, None).unwrap();
        let x_bar = g.node_at(&Point::d1(0.0)).unwrap();
        // h(x) = -0.5 - 0.5|x| minorizes -sqrt(|x|) with gap 0.5 at 0
        let cone = ConeFunction::new(&Point::d1(0.0), 0.5, -0.5).unwrap();
        let r =
            ekeland_refine(&f, MinorantInput::Cone(&cone), x_bar, 0.5, 0.5, 1e-12).unwrap();
        assert!(r.iterations <= 1001);
        assert!(r.residuals.distance <= 0.5 + 1e-12);
        assert!(r.residuals.descent_slack >= -1e-9);
        assert!(r.residuals.strict_min_slack >= -1e-9);
        assert!(r.residuals.support_min_slack >= -1e-9);
        assert_eq!(r.residuals.support_touch_error, 0.0);
        // the support certifies subdifferentiability away from the cusp
        assert_ne!(r.x_delta, x_bar);
    }

    #[test]
    fn refine_on_abs_from_constant_minorant() {
        let g = Grid::new_1d(-2.0, 2.0, 201, Norm::L2).unwrap();
        let f = sample(&GalleryFunction::Abs1d, &g, None).unwrap();
        let x_bar = g.node_at(&Point::d1(0.0)).unwrap();
        let h = GridMinorant::constant(g.clone(), -1.0, 0.0).unwrap();
        let r = ekeland_refine(&f, MinorantInput::Grid(&h), x_bar, 1.0, 1.0, 1e-12).unwrap();
        assert!(r.residuals.distance <= 1.0 + 1e-12);
        assert!(r.residuals.descent_slack >= -1e-9);
        assert!(r.residuals.strict_min_slack >= -1e-9);
        assert!(r.residuals.support_min_slack >= -1e-9);
    }

    #[test]
    fn eps_gap_precondition() {
        let g = Grid::new_1d(-1.0, 1.0, 101, Norm::L2).unwrap();
        let f = sample(&GalleryFunction::NegSqrtAbs, &g, None).unwrap();
        let x_bar = g.node_at(&Point::d1(0.0)).unwrap();
        let cone = ConeFunction::new(&Point::d1(0.0), 0.5, -0.5).unwrap();
        // gap at 0 is 0.5; eps = 0.1 is too small
        assert!(matches!(
            ekeland_refine(&f, MinorantInput::Cone(&cone), x_bar, 0.1, 0.5, 1e-12),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn non_minorant_rejected() {
        let g = Grid::new_1d(-1.0, 1.0, 101, Norm::L2).unwrap();
        let f = sample(&GalleryFunction::NegSqrtAbs, &g, None).unwrap();
        let h = GridMinorant::constant(g.clone(), 0.5, 0.0).unwrap();
        assert!(ekeland_refine(&f, MinorantInput::Grid(&h), 50, 1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn scan_skips_infinite_nodes() {
        let g = Grid::new_1d(-1.0, 1.0, 41, Norm::L2).unwrap();
        let mut vals: Vec<crate::ext_real::ExtReal> = (0..41)
            .map(|i| crate::ext_real::ExtReal::finite(g.node_coord(i).x().abs()))
            .collect();
        vals[3] = crate::ext_real::ExtReal::PosInf;
        let f = SampledFunction::new(g, vals, None).unwrap();
        let scan = density_scan(&f, 0.25, 0.25, 1.0, 5, 1e-12).unwrap();
        assert!(scan.points.iter().all(|p| p.anchor != 3));
        assert!(scan.covering_radius.is_finite());
    }

    #[test]
    fn scan_on_convex_function_certifies_in_place() {
        let g = Grid::new_1d(-1.0, 1.0, 101, Norm::L2).unwrap();
        let f = sample(&GalleryFunction::Square, &g, None).unwrap();
        let scan = density_scan(&f, 0.1, 0.05, 2.0, 10, 1e-12).unwrap();
        for p in &scan.points {
            assert!(p.invariants_ok);
            // x^2 is grid-2-Lipschitz on [-1,1], so the envelope touches
            // everywhere and each anchor certifies at itself
            assert_eq!(p.x_delta, p.anchor);
        }
    }
}
