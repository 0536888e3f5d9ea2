use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, NodeIndex};
use crate::minorant::GridMinorant;
use crate::sampled::SampledFunction;

/// Discrete Legendre-Fenchel transform on a slope grid.
#[derive(Debug, Clone)]
pub struct ConjugateResult {
    /// f*(s) for each slope node s, on the slope grid.
    pub values: SampledFunction,
    /// Per slope: the sup was attained only at a boundary node of the x-grid,
    /// which signals truncation by the box.
    pub boundary_attained: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugateAt {
    pub slope: f64,
    pub value: f64,
    pub argmax: NodeIndex,
    pub boundary_attained: bool,
}

fn check_conjugate_input(f: &SampledFunction, op: &str) -> Result<()> {
    if f.grid().dim() != 1 {
        return Err(Error::precondition(format!("{op}: 1-D grids only")));
    }
    if f.has_neg_inf() {
        return Err(Error::precondition(format!("{op}: f takes -inf")));
    }
    if !f.is_proper() {
        return Err(Error::precondition(format!("{op}: improper f")));
    }
    Ok(())
}

/// `f*(s) = max over finite nodes x of s*x - f(x)`, with the argmax reported
/// and flagged when it is attained strictly at the box edge.
pub fn conjugate_at(f: &SampledFunction, s: f64) -> Result<ConjugateAt> {
    check_conjugate_input(f, "conjugate")?;
    let g = f.grid();
    let vals = f.values_f64();
    let n = g.node_count();
    let mut best = f64::NEG_INFINITY;
    let mut best_x = usize::MAX;
    let mut best_interior = f64::NEG_INFINITY;
    for x in 0..n {
        if !vals[x].is_finite() {
            continue;
        }
        let cand = s * g.node_coord(x).x() - vals[x];
        if cand > best {
            best = cand;
            best_x = x;
        }
        if !g.is_boundary(x) && cand > best_interior {
            best_interior = cand;
        }
    }
    Ok(ConjugateAt {
        slope: s,
        value: best,
        argmax: best_x,
        boundary_attained: best > best_interior,
    })
}

/// The transform over a whole slope grid.
pub fn legendre_fenchel(f: &SampledFunction, slopes: &Grid) -> Result<ConjugateResult> {
    check_conjugate_input(f, "conjugate")?;
    if slopes.dim() != 1 {
        return Err(Error::precondition("conjugate: slope grid must be 1-D"));
    }
    let m = slopes.node_count();
    let mut values = Vec::with_capacity(m);
    let mut flags = Vec::with_capacity(m);
    for i in 0..m {
        let at = conjugate_at(f, slopes.node_coord(i).x())?;
        values.push(at.value);
        flags.push(at.boundary_attained);
    }
    Ok(ConjugateResult {
        values: SampledFunction::from_finite(slopes.clone(), values, None)?,
        boundary_attained: flags,
    })
}

/// For discretely convex f, the affine maximal minorant with slope s:
/// `x -> s*x - f*(s)`. It touches f where the conjugate sup is attained.
pub fn affine_maximal_minorant(f: &SampledFunction, s: f64, tol_feas: f64) -> Result<GridMinorant> {
    check_conjugate_input(f, "affine maximal minorant")?;
    let g = f.grid();
    let vals = f.values_f64();
    let n = g.node_count();
    // discrete convexity: second differences over consecutive finite triples
    for j in 1..n - 1 {
        if vals[j - 1].is_finite() && vals[j].is_finite() && vals[j + 1].is_finite() {
            let sd = vals[j - 1] - 2.0 * vals[j] + vals[j + 1];
            if sd < -tol_feas {
                return Err(Error::precondition(format!(
                    "affine maximal minorant: f is not discretely convex at node {j} \
                     (second difference {sd:.3e})"
                )));
            }
        }
    }
    let c = conjugate_at(f, s)?;
    let values = (0..n).map(|j| s * g.node_coord(j).x() - c.value).collect();
    GridMinorant::new(g.clone(), values, s.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::GalleryFunction;
    use crate::grid::{Norm, Point};
    use crate::sampled::sample;

    fn square_on(lo: f64, hi: f64, n: usize) -> SampledFunction {
        let g = Grid::new_1d(lo, hi, n, Norm::L2).unwrap();
        sample(&GalleryFunction::Square, &g, None).unwrap()
    }

    #[test]
    fn conjugate_of_square_is_quarter_square() {
        let f = square_on(-4.0, 4.0, 801);
        let slopes = Grid::new_1d(-2.0, 2.0, 81, Norm::L2).unwrap();
        let h = 8.0 / 800.0;
        let c = legendre_fenchel(&f, &slopes).unwrap();
        for i in 0..81 {
            let s = slopes.node_coord(i).x();
            let err = (c.values.values()[i].to_f64() - s * s / 4.0).abs();
            assert!(err <= h * s.abs() / 2.0 + h * h / 4.0 + 1e-12, "s={s} err={err}");
            assert!(!c.boundary_attained[i], "s={s} leaned on the box");
        }
    }

    #[test]
    fn conjugate_of_abs_is_zero_inside_unit_slopes() {
        let f = {
            let g = Grid::new_1d(-2.0, 2.0, 161, Norm::L2).unwrap();
            sample(&GalleryFunction::Abs1d, &g, None).unwrap()
        };
        let slopes = Grid::new_1d(-0.9, 0.9, 19, Norm::L2).unwrap();
        let c = legendre_fenchel(&f, &slopes).unwrap();
        for v in c.values.values() {
            assert!(v.to_f64().abs() <= 1e-12);
        }
    }

    #[test]
    fn conjugate_of_affine_flags_box_truncation() {
        let g = Grid::new_1d(-2.0, 2.0, 41, Norm::L2).unwrap();
        let f = sample(&GalleryFunction::affine(1.5, 0.5).unwrap(), &g, None).unwrap();
        // at s = a, f*(a) = -b and every node attains it: not boundary-flagged
        let at_a = conjugate_at(&f, 1.5).unwrap();
        assert!((at_a.value - (-0.5)).abs() <= 1e-12);
        assert!(!at_a.boundary_attained);
        // away from a the sup runs to the box edge
        let off = conjugate_at(&f, 2.0).unwrap();
        assert!(off.boundary_attained);
    }

    #[test]
    fn affine_minorant_touches_square() {
        let f = square_on(-2.0, 2.0, 161);
        let m = affine_maximal_minorant(&f, 2.0, 1e-9).unwrap();
        let check = m.check_against(&f, 1e-9);
        assert!(check.ok(), "{}", check.describe());
        // 2x - 1 touches at x = 1
        let at_1 = f.grid().node_at(&Point::d1(1.0)).unwrap();
        assert!((m.value(at_1) - 1.0).abs() <= 1e-12);
        // s = 0: minorant is identically 0, touching at the vertex
        let m0 = affine_maximal_minorant(&f, 0.0, 1e-9).unwrap();
        assert!(m0.values().iter().all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn affine_minorant_rejects_nonconvex() {
        let g = Grid::new_1d(-1.0, 1.0, 41, Norm::L2).unwrap();
        let f = sample(&GalleryFunction::NegSqrtAbs, &g, None).unwrap();
        assert!(affine_maximal_minorant(&f, 0.5, 1e-9).is_err());
    }

    #[test]
    fn biconjugate_recovers_convex_f_with_dense_slopes() {
        // Coarse x-grid so slope intervals are wide, dense slope grid so one
        // lands inside every interval: f** = f at the nodes.
        let f = square_on(-2.0, 2.0, 41);
        let slopes = Grid::new_1d(-4.2, 4.2, 841, Norm::L2).unwrap();
        let c = legendre_fenchel(&f, &slopes).unwrap();
        let back = legendre_fenchel(&c.values, f.grid()).unwrap();
        for (b, v) in back.values.values().iter().zip(f.values()) {
            assert!(b.to_f64() <= v.to_f64() + 1e-12);
            assert!((b.to_f64() - v.to_f64()).abs() <= 1e-9);
        }
    }
}
