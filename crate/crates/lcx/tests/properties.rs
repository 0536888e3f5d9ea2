//! Property suites for the invariants the operators promise: envelope
//! sandwiches, idempotence, hull consistency, calmness monotonicity, the
//! subgradient calculus and the Ekeland residuals.

use proptest::prelude::*;

use lcx::envelope::{lipschitz_lower_envelope, lipschitz_modulus, lipschitz_upper_envelope};
use lcx::ekeland::{ekeland_refine, MinorantInput};
use lcx::family::{family_hull, ElementaryFamily};
use lcx::gallery::GalleryFunction;
use lcx::grid::{Grid, Norm, Point};
use lcx::maximal::{default_tol_feas, maximal_minorant, MaximalOptions};
use lcx::minorant::GridMinorant;
use lcx::randfn::{random_piecewise_linear, random_with_infinities, rng_for};
use lcx::sampled::{norm_dist, sample, SampledFunction};
use lcx::subdiff::{calmness_modulus, candidate_combination, check_subgradient, cone_subgradient};
use lcx::PointFunction;

fn grid_1d(n: usize) -> Grid {
    Grid::new_1d(-2.0, 2.0, n, Norm::L2).unwrap()
}

fn values_of(f: &SampledFunction) -> Vec<f64> {
    f.values_f64()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn envelope_sandwich_and_monotonicity(seed in 0u64..1000, n in 17usize..80,
                                          k1 in 0.1f64..2.0, dk in 0.0f64..3.0) {
        let g = grid_1d(n);
        let mut rng = rng_for(seed);
        let f = random_piecewise_linear(&g, &mut rng, 4.0, (-2.0, 2.0)).unwrap();
        let k2 = k1 + dk;
        let lo1 = values_of(&lipschitz_lower_envelope(&f, k1).unwrap());
        let lo2 = values_of(&lipschitz_lower_envelope(&f, k2).unwrap());
        let up1 = values_of(&lipschitz_upper_envelope(&f, k1).unwrap());
        let up2 = values_of(&lipschitz_upper_envelope(&f, k2).unwrap());
        let fv = values_of(&f);
        for i in 0..fv.len() {
            // sandwich
            prop_assert!(lo1[i] <= fv[i] + 1e-12);
            prop_assert!(up1[i] >= fv[i] - 1e-12);
            // monotone in k: lower envelopes rise, upper envelopes fall
            prop_assert!(lo1[i] <= lo2[i] + 1e-12);
            prop_assert!(up1[i] >= up2[i] - 1e-12);
        }
    }

    #[test]
    fn envelope_idempotence(seed in 0u64..1000, n in 17usize..80, k in 0.1f64..4.0) {
        let g = grid_1d(n);
        let mut rng = rng_for(seed);
        let f = random_piecewise_linear(&g, &mut rng, 4.0, (-2.0, 2.0)).unwrap();
        let lo = lipschitz_lower_envelope(&f, k).unwrap();
        let lo2 = lipschitz_lower_envelope(&lo, k).unwrap();
        let up = lipschitz_upper_envelope(&f, k).unwrap();
        let up2 = lipschitz_upper_envelope(&up, k).unwrap();
        for i in 0..g.node_count() {
            prop_assert!((lo.value(i).to_f64() - lo2.value(i).to_f64()).abs() <= 1e-12);
            prop_assert!((up.value(i).to_f64() - up2.value(i).to_f64()).abs() <= 1e-12);
        }
    }

    #[test]
    fn reapplication_is_bitwise_reproducible(seed in 0u64..1000, k in 0.1f64..4.0) {
        let g = grid_1d(41);
        let mut rng = rng_for(seed);
        let f = random_piecewise_linear(&g, &mut rng, 4.0, (-2.0, 2.0)).unwrap();
        let a = lipschitz_lower_envelope(&f, k).unwrap();
        let b = lipschitz_lower_envelope(&f, k).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn upper_envelope_fixes_exactly_the_k_lipschitz_functions(
        seed in 0u64..1000, n in 17usize..60, k in 0.2f64..3.0
    ) {
        let g = grid_1d(n);
        let mut rng = rng_for(seed);
        let f = random_piecewise_linear(&g, &mut rng, 4.0, (-2.0, 2.0)).unwrap();
        let modulus = lipschitz_modulus(&f);
        let up = lipschitz_upper_envelope(&f, k).unwrap();
        let max_err = values_of(&up)
            .iter()
            .zip(values_of(&f).iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if modulus <= k {
            prop_assert!(max_err <= 1e-12, "k-Lipschitz f must be fixed, err {max_err}");
        } else {
            prop_assert!(max_err > 1e-12, "non-k-Lipschitz f cannot be fixed");
        }
    }

    #[test]
    fn greatest_minorant_dominates_random_feasible_minorants(
        seed in 0u64..1000, n in 17usize..60, k in 0.2f64..3.0
    ) {
        let g = grid_1d(n);
        let mut rng = rng_for(seed);
        let f = random_piecewise_linear(&g, &mut rng, 4.0, (-2.0, 2.0)).unwrap();
        // random k-Lipschitz minorant: envelope of a random function pushed
        // under f
        let under = SampledFunction::from_finite(
            g.clone(),
            values_of(&f)
                .iter()
                .map(|v| v - rand::Rng::gen_range(&mut rng, 0.0..1.5))
                .collect(),
            None,
        )
        .unwrap();
        let w = lipschitz_lower_envelope(&under, k).unwrap();
        let env = lipschitz_lower_envelope(&f, k).unwrap();
        for i in 0..g.node_count() {
            prop_assert!(w.value(i).to_f64() <= env.value(i).to_f64() + 1e-12);
        }
    }

    #[test]
    fn cone_hull_is_the_lower_envelope(seed in 0u64..1000, k in 0.2f64..3.0) {
        let g = grid_1d(41);
        let mut rng = rng_for(seed);
        let f = random_piecewise_linear(&g, &mut rng, 4.0, (-2.0, 2.0)).unwrap();
        let hull = family_hull(&f, &ElementaryFamily::cones(k).unwrap())
            .unwrap()
            .unwrap_hull();
        let env = lipschitz_lower_envelope(&f, k).unwrap();
        for i in 0..g.node_count() {
            prop_assert!((hull.value(i).to_f64() - env.value(i).to_f64()).abs() <= 1e-12);
        }
    }

    #[test]
    fn family_hull_is_monotone_dominated_idempotent(seed in 0u64..1000, k in 0.2f64..3.0) {
        let g = grid_1d(33);
        let mut rng = rng_for(seed);
        let f = random_piecewise_linear(&g, &mut rng, 4.0, (-2.0, 2.0)).unwrap();
        let shift = rand::Rng::gen_range(&mut rng, 0.0..1.0);
        let above = SampledFunction::from_finite(
            g.clone(),
            values_of(&f).iter().map(|v| v + shift).collect(),
            None,
        )
        .unwrap();
        let fam = ElementaryFamily::cones(k).unwrap();
        let hull_f = family_hull(&f, &fam).unwrap().unwrap_hull();
        let hull_above = family_hull(&above, &fam).unwrap().unwrap_hull();
        let hull_hull = family_hull(&hull_f, &fam).unwrap().unwrap_hull();
        for i in 0..g.node_count() {
            prop_assert!(hull_f.value(i).to_f64() <= f.value(i).to_f64() + 1e-12);
            prop_assert!(hull_f.value(i).to_f64() <= hull_above.value(i).to_f64() + 1e-12);
            prop_assert!(
                (hull_hull.value(i).to_f64() - hull_f.value(i).to_f64()).abs() <= 1e-12
            );
        }
    }

    #[test]
    fn affine_hull_is_monotone_dominated_idempotent(seed in 0u64..500) {
        let g = grid_1d(33);
        let mut rng = rng_for(seed);
        let f = random_piecewise_linear(&g, &mut rng, 4.0, (-2.0, 2.0)).unwrap();
        let shift = rand::Rng::gen_range(&mut rng, 0.0..1.0);
        let above = SampledFunction::from_finite(
            g.clone(),
            values_of(&f).iter().map(|v| v + shift).collect(),
            None,
        )
        .unwrap();
        let fam = ElementaryFamily::affine(vec![vec![-2.0], vec![-0.5], vec![0.0], vec![1.0], vec![3.0]]);
        let hull_f = family_hull(&f, &fam).unwrap().unwrap_hull();
        let hull_above = family_hull(&above, &fam).unwrap().unwrap_hull();
        let hull_hull = family_hull(&hull_f, &fam).unwrap().unwrap_hull();
        for i in 0..g.node_count() {
            prop_assert!(hull_f.value(i).to_f64() <= f.value(i).to_f64() + 1e-12);
            prop_assert!(hull_f.value(i).to_f64() <= hull_above.value(i).to_f64() + 1e-12);
            prop_assert!(
                (hull_hull.value(i).to_f64() - hull_f.value(i).to_f64()).abs() <= 1e-12
            );
        }
    }

    #[test]
    fn calmness_modulus_grows_under_refinement(seed in 0u64..500) {
        // refinement monotonicity: finer grids only add competitors to the
        // max. Random piecewise-linear functions with off-grid breakpoints
        // exercise genuinely new nodes at each level.
        let g = Grid::new_1d(-1.0, 1.0, 51, Norm::L2).unwrap();
        let mut rng = rng_for(seed);
        let node = rand::Rng::gen_range(&mut rng, 0..51usize);
        let mut breaks = vec![(-1.0, rand::Rng::gen_range(&mut rng, -1.0..1.0))];
        let mut x = -1.0f64;
        while x < 1.0 {
            x += rand::Rng::gen_range(&mut rng, 0.05..0.4);
            breaks.push((x.min(1.0001), rand::Rng::gen_range(&mut rng, -1.0..1.0)));
        }
        let pwl = GalleryFunction::piecewise(breaks).unwrap();
        let f = sample(&pwl, &g, None).unwrap();
        let k1 = calmness_modulus(&f, node).unwrap();
        let fine = g.refined();
        let f2 = sample(&pwl, &fine, None).unwrap();
        let k2 = calmness_modulus(&f2, 2 * node).unwrap();
        prop_assert!(k2 >= k1 - 1e-12, "refinement shrank the modulus: {k1} -> {k2}");

        let gal = sample(&GalleryFunction::NegSqrtAbs, &g, None).unwrap();
        let gal2 = sample(&GalleryFunction::NegSqrtAbs, &fine, None).unwrap();
        let m1 = calmness_modulus(&gal, node).unwrap();
        let m2 = calmness_modulus(&gal2, 2 * node).unwrap();
        prop_assert!(m2 >= m1 - 1e-12);
    }

    #[test]
    fn cone_subgradient_supports_and_touches(seed in 0u64..1000, n in 17usize..60) {
        let g = grid_1d(n);
        let mut rng = rng_for(seed);
        let f = random_piecewise_linear(&g, &mut rng, 4.0, (-2.0, 2.0)).unwrap();
        let node = rand::Rng::gen_range(&mut rng, 0..n);
        let cand = cone_subgradient(&f, node).unwrap();
        let check = check_subgradient(&f, &cand, 1e-12 * (1.0 + f.sup_norm())).unwrap();
        prop_assert!(check.passes, "worst slack {}", check.worst_slack);
        let support = cand.support_values(&g);
        prop_assert_eq!(support[node], f.value(node).to_f64());
    }

    #[test]
    fn subgradient_combinations_stay_subgradients(seed in 0u64..500, n in 17usize..50) {
        // convexity of the subdifferential: combinations of passing
        // candidates pass
        let g = grid_1d(n);
        let mut rng = rng_for(seed);
        let f = random_piecewise_linear(&g, &mut rng, 4.0, (-2.0, 2.0)).unwrap();
        let node = rand::Rng::gen_range(&mut rng, 0..n);
        let tol = default_tol_feas(&f);
        let c1 = cone_subgradient(&f, node).unwrap();
        // a second, steeper candidate
        let k2 = match c1.form {
            lcx::subdiff::CandidateForm::Cone { slope } => slope + 1.0,
            _ => unreachable!(),
        };
        let c2 = lcx::subdiff::SubgradientCandidate::cone(
            k2, node, f.value(node).as_finite().unwrap()).unwrap();
        for t in [0.25, 0.5, 0.75] {
            let combo = candidate_combination(&c1, &c2, t, &g).unwrap();
            let check = check_subgradient(&f, &combo, tol).unwrap();
            prop_assert!(check.passes, "t={t} slack {}", check.worst_slack);
        }
    }

    #[test]
    fn ekeland_residuals_hold_for_random_inputs(seed in 0u64..300, n in 21usize..60) {
        let g = grid_1d(n);
        let mut rng = rng_for(seed);
        let f = random_with_infinities(&g, &mut rng, 3.0, (-1.0, 1.0), 0.1).unwrap();
        let domain = f.effective_domain();
        let x_bar = domain[rand::Rng::gen_range(&mut rng, 0..domain.len())];
        let k = rand::Rng::gen_range(&mut rng, 0.5..3.0);
        let env = lipschitz_lower_envelope(&f, k).unwrap();
        let h = GridMinorant::new(g.clone(), env.values_f64(), k).unwrap();
        let gap = f.value(x_bar).to_f64() - h.value(x_bar);
        let eps = (gap + rand::Rng::gen_range(&mut rng, 0.0..0.5)).max(1e-6);
        let h = h.shifted_down(eps - gap);
        let delta = rand::Rng::gen_range(&mut rng, 0.05..1.0);
        let tol = default_tol_feas(&f);
        let r = ekeland_refine(&f, MinorantInput::Grid(&h), x_bar, eps, delta, tol).unwrap();
        prop_assert!(r.iterations <= n);
        prop_assert!(r.residuals.descent_slack >= -tol);
        prop_assert!(r.residuals.distance <= delta + tol);
        prop_assert!(r.residuals.strict_min_slack >= -tol);
        prop_assert!(r.residuals.support_min_slack >= -tol);
        prop_assert!(r.residuals.support_touch_error == 0.0);
    }

    #[test]
    fn maximal_output_passes_class_invariants(seed in 0u64..200) {
        let g = grid_1d(33);
        let mut rng = rng_for(seed);
        let f = random_piecewise_linear(&g, &mut rng, 2.0, (-1.0, 1.0)).unwrap();
        let k = 2.0 * lipschitz_modulus(&f);
        let min = values_of(&f).iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let seed_m = GridMinorant::constant(g.clone(), min - 0.25, k).unwrap();
        let (out, cert) = maximal_minorant(&f, &seed_m, k, &MaximalOptions::default()).unwrap();
        let check = out.check_against(&f, cert.tol_feas);
        prop_assert!(check.ok(), "{}", check.describe());
        prop_assert!(cert.lp_resolve_gap <= cert.tol_lp, "resolve gap {}", cert.lp_resolve_gap);
        for i in 0..g.node_count() {
            prop_assert!(out.value(i) >= seed_m.value(i) - cert.tol_feas);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn two_dimensional_envelopes_match_brute_force(seed in 0u64..500, k in 0.2f64..2.0,
                                                   norm_pick in 0usize..3) {
        let norm = [Norm::L1, Norm::L2, Norm::LInf][norm_pick];
        let g = Grid::new_2d([-1.0, -1.0], [1.0, 1.0], [9, 11], norm).unwrap();
        let mut rng = rng_for(seed);
        let vals: Vec<f64> =
            (0..g.node_count()).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let f = SampledFunction::from_finite(g.clone(), vals.clone(), None).unwrap();
        let lower = lipschitz_lower_envelope(&f, k).unwrap();
        let upper = lipschitz_upper_envelope(&f, k).unwrap();
        for x in 0..g.node_count() {
            let mut lo = f64::INFINITY;
            let mut up = f64::NEG_INFINITY;
            for y in 0..g.node_count() {
                let d = g.node_dist(x, y);
                lo = lo.min(vals[y] + k * d);
                up = up.max(vals[y] - k * d);
            }
            prop_assert!((lower.value(x).to_f64() - lo).abs() <= 1e-12);
            prop_assert!((upper.value(x).to_f64() - up).abs() <= 1e-12);
            // sandwich
            prop_assert!(lower.value(x).to_f64() <= vals[x] + 1e-12);
            prop_assert!(upper.value(x).to_f64() >= vals[x] - 1e-12);
        }
        // both envelopes are k-Lipschitz in the grid norm, pairwise
        for x in 0..g.node_count() {
            for y in (x + 1)..g.node_count() {
                let d = g.node_dist(x, y);
                let dl = (lower.value(x).to_f64() - lower.value(y).to_f64()).abs();
                let du = (upper.value(x).to_f64() - upper.value(y).to_f64()).abs();
                prop_assert!(dl <= k * d + 1e-12);
                prop_assert!(du <= k * d + 1e-12);
            }
        }
    }

    #[test]
    fn two_dimensional_cone_hull_consistency(seed in 0u64..200, k in 0.2f64..2.0) {
        let g = Grid::new_2d([-1.0, -1.0], [1.0, 1.0], [9, 9], Norm::L1).unwrap();
        let mut rng = rng_for(seed);
        let vals: Vec<f64> =
            (0..g.node_count()).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let f = SampledFunction::from_finite(g.clone(), vals, None).unwrap();
        let hull = family_hull(&f, &ElementaryFamily::cones(k).unwrap())
            .unwrap()
            .unwrap_hull();
        let env = lipschitz_lower_envelope(&f, k).unwrap();
        for i in 0..g.node_count() {
            prop_assert!((hull.value(i).to_f64() - env.value(i).to_f64()).abs() <= 1e-12);
        }
    }
}

#[test]
fn two_dimensional_affine_hull_minorizes_and_touches() {
    // hull of |x|-|y| over the slope set {(-1,-1),(1,-1)} on [-1,1]^2: the
    // planes +-x - y need intercept -2 to clear the nodes with y < 0 (worst
    // at (0,-1)), so the hull is |x| - y - 2, touching f on the edge y = -1.
    let g = Grid::new_2d([-1.0, -1.0], [1.0, 1.0], [11, 11], Norm::L1).unwrap();
    let f = sample(&GalleryFunction::AbsDiff2d, &g, None).unwrap();
    let fam = ElementaryFamily::affine(vec![vec![-1.0, -1.0], vec![1.0, -1.0]]);
    let hull = family_hull(&f, &fam).unwrap().unwrap_hull();
    for i in 0..g.node_count() {
        let p = g.node_coord(i);
        let expect = p.x().abs() - p.y() - 2.0;
        assert!(hull.value(i).to_f64() <= f.value(i).to_f64() + 1e-12);
        assert!((hull.value(i).to_f64() - expect).abs() <= 1e-12);
        if p.y() == -1.0 {
            assert!((hull.value(i).to_f64() - f.value(i).to_f64()).abs() <= 1e-12);
        }
    }
}

#[test]
fn sum_candidates_lift_to_maximal_elements() {
    // chain: c1 + c2 is a subgradient of f1 + f2, and the pinned LP lifts it
    // to a maximal one dominating it
    let g = grid_1d(65);
    for seed in 0..10u64 {
        let mut rng = rng_for(seed);
        let f1 = random_piecewise_linear(&g, &mut rng, 2.0, (-1.0, 1.0)).unwrap();
        let f2 = random_piecewise_linear(&g, &mut rng, 2.0, (-1.0, 1.0)).unwrap();
        let x_bar = rand::Rng::gen_range(&mut rng, 0..g.node_count());
        let c1 = cone_subgradient(&f1, x_bar).unwrap();
        let c2 = cone_subgradient(&f2, x_bar).unwrap();
        let sum = f1.try_add(&f2).unwrap();
        let c = lcx::subdiff::candidate_sum(&c1, &c2, &g).unwrap();
        let tol = default_tol_feas(&sum);
        assert!(check_subgradient(&sum, &c, tol).unwrap().passes);

        let k = 2.0 * lipschitz_modulus(&sum);
        let cert = lcx::subdiff::check_maximality(&sum, &c, k, Some(tol), None).unwrap();
        // whatever the verdict on c itself, a maximal dominating element
        // exists: either c (maximal) or the lifted improvement
        if let Some(lifted) = &cert.improvement {
            let support = c.support_values(&g);
            for i in 0..g.node_count() {
                assert!(lifted.value(i) >= support[i] - tol);
            }
            let check = lifted.check_against(&sum, tol);
            assert!(check.ok(), "{}", check.describe());
        }
        assert!(cert.lp_resolve_gap <= cert.tol_lp);
    }
}

#[test]
fn ekeland_support_keeps_its_lipschitz_budget_in_two_dimensions() {
    let g = Grid::new_2d([-1.0, -1.0], [1.0, 1.0], [13, 13], Norm::L1).unwrap();
    let f = sample(&GalleryFunction::AbsDiff2d, &g, None).unwrap();
    let k = 1.0;
    let env = lipschitz_lower_envelope(&f, k).unwrap();
    let x_bar = g.node_at(&lcx::grid::Point::d2(0.0, 0.0)).unwrap();
    let h = GridMinorant::new(g.clone(), env.values_f64(), k).unwrap();
    let gap = f.value(x_bar).to_f64() - h.value(x_bar);
    let eps = gap.max(0.25);
    let h = h.shifted_down(eps - gap);
    let r = ekeland_refine(&f, MinorantInput::Grid(&h), x_bar, eps, 0.5, 1e-9).unwrap();
    // pairwise Lipschitz check with the inherited budget k + eps/delta
    let budget = k + eps / 0.5;
    for i in 0..g.node_count() {
        for j in (i + 1)..g.node_count() {
            let dv = (r.support.value(i) - r.support.value(j)).abs();
            assert!(
                dv <= budget * g.node_dist(i, j) + 1e-9,
                "support breaks the budget at ({i},{j})"
            );
        }
    }
    assert!(r.residuals.support_min_slack >= -1e-9);
}

#[test]
fn oracle_inconclusive_on_capped_constant_modulus() {
    // a line of slope 10 probed mid-ramp on a binary-exact grid: the modulus
    // is exactly 10 at every refinement, neither within a cap of 5 nor
    // strictly increasing
    let g = Grid::new_1d(-1.0, 1.0, 33, Norm::L2).unwrap();
    let steep = GalleryFunction::piecewise(vec![(-1.0, 0.0), (1.0, 20.0)]).unwrap();
    let cert = lcx::subdiff::subdifferentiability_oracle(
        &steep,
        &g,
        &lcx::grid::Point::d1(0.0),
        3,
        5.0,
    )
    .unwrap();
    assert_eq!(cert.verdict, lcx::subdiff::OracleVerdict::Inconclusive);
    for m in &cert.modulus_sequence {
        assert!((m - 10.0).abs() <= 1e-9);
    }
}

#[test]
fn triangle_inequality_for_all_norms() {
    for norm in [Norm::L1, Norm::L2, Norm::LInf] {
        let g = Grid::new_2d([-5.0, -5.0], [5.0, 5.0], [11, 11], norm).unwrap();
        let mut rng = rng_for(99);
        for _ in 0..1000 {
            let p: Vec<Point> = (0..3)
                .map(|_| {
                    Point::d2(
                        rand::Rng::gen_range(&mut rng, -5.0..5.0),
                        rand::Rng::gen_range(&mut rng, -5.0..5.0),
                    )
                })
                .collect();
            let ab = norm_dist(&g, &p[0], &p[1]).unwrap();
            let bc = norm_dist(&g, &p[1], &p[2]).unwrap();
            let ac = norm_dist(&g, &p[0], &p[2]).unwrap();
            let scale = ab + bc;
            assert!(ac <= scale * (1.0 + 1e-12) + 1e-300, "triangle fails for {norm}");
            // symmetry and identity
            assert_eq!(ab, norm_dist(&g, &p[1], &p[0]).unwrap());
            assert_eq!(norm_dist(&g, &p[0], &p[0]).unwrap(), 0.0);
        }
    }
}

#[test]
fn sample_eval_round_trip_is_exact() {
    let g = Grid::new_1d(-1.5, 2.5, 97, Norm::L2).unwrap();
    for gallery in [
        GalleryFunction::Square,
        GalleryFunction::NegSqrtAbs,
        GalleryFunction::Abs1d,
        GalleryFunction::Sqrt2Abs,
        GalleryFunction::affine(0.7, -0.3).unwrap(),
    ] {
        let f = sample(&gallery, &g, None).unwrap();
        for i in 0..g.node_count() {
            assert_eq!(f.value(i), gallery.eval(&g.node_coord(i)));
        }
    }
}

#[test]
fn mirror_involutions_are_bitwise() {
    let g = grid_1d(33);
    let mut rng = rng_for(3);
    let f = random_piecewise_linear(&g, &mut rng, 2.0, (-1.0, 1.0)).unwrap();
    assert_eq!(f.negated().negated(), f);
    let c = cone_subgradient(&f, 7).unwrap();
    assert_eq!(c.mirrored().mirrored(), c);
}

#[test]
fn upper_envelope_fixpoint_characterizes_lipschitz_bound() {
    // modulus <= k iff the upper envelope fixes f
    let g = Grid::new_1d(-2.0, 2.0, 201, Norm::L2).unwrap();
    let abs = sample(&GalleryFunction::Abs1d, &g, None).unwrap();
    assert!(lipschitz_modulus(&abs) <= 1.0 + 1e-12);
    let fixed = lipschitz_upper_envelope(&abs, 1.0).unwrap();
    for i in 0..g.node_count() {
        assert!((fixed.value(i).to_f64() - abs.value(i).to_f64()).abs() <= 1e-12);
    }

    let sq = sample(&GalleryFunction::Square, &g, None).unwrap();
    assert!(lipschitz_modulus(&sq) > 1.0);
    let moved = lipschitz_upper_envelope(&sq, 1.0).unwrap();
    let max_err = moved
        .values_f64()
        .iter()
        .zip(sq.values_f64())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(max_err > 1e-6);
}
