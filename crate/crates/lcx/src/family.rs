use crate::envelope::{lipschitz_lower_envelope, lipschitz_upper_envelope};
use crate::error::{Error, Result};
use crate::grid::{Grid, Point};
use crate::minorant::ConeFunction;
use crate::sampled::SampledFunction;

/// A family of elementary functions used to take hulls. Every member is
/// real-valued on the whole grid.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementaryFamily {
    /// Cones `x -> c - slope * ||x - y||` with apexes at grid nodes and free
    /// levels c. Members are concave and slope-Lipschitz.
    Cones { slope: f64 },
    /// Affine functions `x -> s . x + b` with slopes from a finite set and
    /// free intercepts b.
    Affine { slopes: Vec<Vec<f64>> },
}

/// A concrete member of a family, used by the membership predicate.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyMember {
    Cone(ConeFunction),
    Affine { slope: Vec<f64>, intercept: f64 },
}

impl ElementaryFamily {
    pub fn cones(slope: f64) -> Result<ElementaryFamily> {
        if !(slope >= 0.0) || !slope.is_finite() {
            return Err(Error::precondition("cone family slope must be finite and >= 0"));
        }
        Ok(ElementaryFamily::Cones { slope })
    }

    pub fn affine(slopes: Vec<Vec<f64>>) -> ElementaryFamily {
        ElementaryFamily::Affine { slopes }
    }

    pub fn contains(&self, member: &FamilyMember, grid: &Grid) -> bool {
        match (self, member) {
            (ElementaryFamily::Cones { slope }, FamilyMember::Cone(c)) => {
                c.slope == *slope && grid.node_at(&c.apex_point()).is_some()
            }
            (ElementaryFamily::Affine { slopes }, FamilyMember::Affine { slope, .. }) => {
                slopes.iter().any(|s| s == slope)
            }
            _ => false,
        }
    }

    pub fn eval_member(member: &FamilyMember, grid: &Grid, p: &Point) -> f64 {
        match member {
            FamilyMember::Cone(c) => c.eval(grid, p),
            FamilyMember::Affine { slope, intercept } => {
                dot(slope, p.coords()) + intercept
            }
        }
    }
}

fn dot(s: &[f64], x: &[f64]) -> f64 {
    s.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Hull of f with respect to a family: the pointwise sup of the members that
/// minorize f on every node, or `NotConvexifiable` when no member does.
#[derive(Debug, Clone)]
pub enum HullOutcome {
    Hull(SampledFunction),
    /// No member of the family minorizes f: f is not fam-convexifiable.
    NotConvexifiable,
}

impl HullOutcome {
    pub fn unwrap_hull(self) -> SampledFunction {
        match self {
            HullOutcome::Hull(h) => h,
            HullOutcome::NotConvexifiable => panic!("hull is empty"),
        }
    }
}

/// `family_hull(f, fam)(x) = sup { h(x) : h in fam, h <= f on all nodes }`.
///
/// For the cone family this is the Lipschitz lower envelope: the best level
/// for the apex y is `E-_k f(y)`, so the hull is `E+_k (E-_k f)`, which
/// coincides with `E-_k f` since the lower envelope is itself k-Lipschitz.
pub fn family_hull(f: &SampledFunction, fam: &ElementaryFamily) -> Result<HullOutcome> {
    if f.has_neg_inf() {
        return Err(Error::precondition(
            "family hull: f takes -inf; a nonempty support set forces f > -inf",
        ));
    }
    if !f.is_proper() {
        return Err(Error::precondition("family hull: improper input"));
    }
    match fam {
        ElementaryFamily::Cones { slope } => {
            let lower = lipschitz_lower_envelope(f, *slope)?;
            let hull = lipschitz_upper_envelope(&lower, *slope)?;
            Ok(HullOutcome::Hull(hull))
        }
        ElementaryFamily::Affine { slopes } => {
            if slopes.is_empty() {
                return Ok(HullOutcome::NotConvexifiable);
            }
            let g = f.grid();
            let vals = f.values_f64();
            let n = g.node_count();
            for s in slopes {
                if s.len() != g.dim() {
                    return Err(Error::usage("affine family slope dimension mismatch"));
                }
            }
            // best intercept per slope: b_s = min over finite nodes of f(x) - s.x
            let mut lines = Vec::with_capacity(slopes.len());
            for s in slopes {
                let mut b = f64::INFINITY;
                for i in 0..n {
                    if vals[i].is_finite() {
                        b = b.min(vals[i] - dot(s, g.node_coord(i).coords()));
                    }
                }
                if b.is_finite() {
                    lines.push((s.clone(), b));
                }
            }
            if lines.is_empty() {
                return Ok(HullOutcome::NotConvexifiable);
            }
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                let x = g.node_coord(i);
                let v = lines
                    .iter()
                    .map(|(s, b)| dot(s, x.coords()) + b)
                    .fold(f64::NEG_INFINITY, f64::max);
                out.push(v);
            }
            Ok(HullOutcome::Hull(SampledFunction::from_finite(g.clone(), out, None)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext_real::ExtReal;
    use crate::gallery::GalleryFunction;
    use crate::grid::Norm;
    use crate::sampled::sample;

    #[test]
    fn cone_hull_recovers_lipschitz_function() {
        let g = Grid::new_1d(-2.0, 2.0, 9, Norm::L2).unwrap();
        let f = sample(&GalleryFunction::Abs1d, &g, None).unwrap();
        let hull = family_hull(&f, &ElementaryFamily::cones(1.0).unwrap())
            .unwrap()
            .unwrap_hull();
        for (a, b) in hull.values().iter().zip(f.values()) {
            assert!((a.to_f64() - b.to_f64()).abs() <= 1e-12);
        }
    }

    #[test]
    fn zero_slope_cones_give_best_constant() {
        let g = Grid::new_1d(-1.0, 1.0, 21, Norm::L2).unwrap();
        let f = sample(&GalleryFunction::Square, &g, None).unwrap();
        let hull = family_hull(&f, &ElementaryFamily::cones(0.0).unwrap())
            .unwrap()
            .unwrap_hull();
        assert!(hull.values().iter().all(|v| v.to_f64() == 0.0));
    }

    #[test]
    fn neg_inf_rejected() {
        let g = Grid::new_1d(0.0, 1.0, 3, Norm::L2).unwrap();
        let f = SampledFunction::new(
            g,
            vec![ExtReal::finite(0.0), ExtReal::NegInf, ExtReal::finite(1.0)],
            None,
        )
        .unwrap();
        assert!(family_hull(&f, &ElementaryFamily::cones(1.0).unwrap()).is_err());
    }

    #[test]
    fn empty_affine_family_is_not_convexifiable() {
        let g = Grid::new_1d(0.0, 1.0, 3, Norm::L2).unwrap();
        let f = sample(&GalleryFunction::Square, &g, None).unwrap();
        let out = family_hull(&f, &ElementaryFamily::affine(vec![])).unwrap();
        assert!(matches!(out, HullOutcome::NotConvexifiable));
    }

    #[test]
    fn affine_hull_is_dominated_minorant() {
        let g = Grid::new_1d(-2.0, 2.0, 41, Norm::L2).unwrap();
        let f = sample(&GalleryFunction::Square, &g, None).unwrap();
        let fam = ElementaryFamily::affine(vec![vec![-2.0], vec![0.0], vec![2.0]]);
        let hull = family_hull(&f, &fam).unwrap().unwrap_hull();
        for (h, v) in hull.values().iter().zip(f.values()) {
            assert!(h.to_f64() <= v.to_f64() + 1e-12);
        }
        // the slope-2 line with best intercept is 2x - 1, touching at x = 1
        let at_1 = g.node_at(&Point::d1(1.0)).unwrap();
        assert!((hull.values()[at_1].to_f64() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn membership_predicate() {
        let g = Grid::new_1d(-1.0, 1.0, 5, Norm::L2).unwrap();
        let fam = ElementaryFamily::cones(2.0).unwrap();
        let inside = FamilyMember::Cone(ConeFunction::new(&Point::d1(0.5), 2.0, 3.0).unwrap());
        let wrong_slope = FamilyMember::Cone(ConeFunction::new(&Point::d1(0.5), 1.0, 3.0).unwrap());
        let off_grid = FamilyMember::Cone(ConeFunction::new(&Point::d1(0.3), 2.0, 3.0).unwrap());
        assert!(fam.contains(&inside, &g));
        assert!(!fam.contains(&wrong_slope, &g));
        assert!(!fam.contains(&off_grid, &g));
    }
}
