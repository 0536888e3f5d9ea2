//! Closed-form cross-checks. Every expected value below is derived by hand
//! from the defining formulas, independently of the library code paths:
//!
//! * inf-convolution of x^2 with k|.|:  x^2 on |x| <= k/2, k|x| - k^2/4 beyond
//! * sup-deconvolution of |x| with k|.| on [-2,2], k < 1: attained at the box
//!   edge, giving 2 - 2k + k|x|
//! * conjugate of |x| for |s| > 1 on [-2,2]: 2(|s| - 1), attained at the edge
//! * the greatest K-Lipschitz concave minorant of a concave K-Lipschitz f
//!   is f itself, so the unpinned lift from any feasible seed returns f

use lcx::conjugate::conjugate_at;
use lcx::envelope::{lipschitz_lower_envelope, lipschitz_upper_envelope};
use lcx::gallery::GalleryFunction;
use lcx::grid::{Grid, Norm};
use lcx::maximal::{maximal_minorant, MaximalOptions};
use lcx::minorant::GridMinorant;
use lcx::sampled::{sample, SampledFunction};

#[test]
fn lower_envelope_of_square_matches_the_inf_convolution_formula() {
    let g = Grid::new_1d(-1.0, 1.0, 401, Norm::L2).unwrap();
    let h = 2.0 / 400.0;
    let f = sample(&GalleryFunction::Square, &g, None).unwrap();
    for k in [0.5, 1.0, 1.5] {
        let env = lipschitz_lower_envelope(&f, k).unwrap();
        for i in 0..g.node_count() {
            let x = g.node_coord(i).x();
            let expect = if x.abs() <= k / 2.0 { x * x } else { k * x.abs() - k * k / 4.0 };
            // the grid argmin sits within h/2 of the continuum one; the
            // parabola's curvature turns that into an h^2/4 value error
            let err = (env.value(i).to_f64() - expect).abs();
            assert!(err <= h * h / 4.0 + 1e-12, "k={k}, x={x}: err {err}");
        }
    }
}

#[test]
fn upper_envelope_of_abs_peaks_at_the_box_edge() {
    let g = Grid::new_1d(-2.0, 2.0, 161, Norm::L2).unwrap();
    let f = sample(&GalleryFunction::Abs1d, &g, None).unwrap();
    for k in [0.25, 0.5, 0.75] {
        let env = lipschitz_upper_envelope(&f, k).unwrap();
        for i in 0..g.node_count() {
            let x = g.node_coord(i).x();
            // max_y |y| - k|x-y| is attained at y = +-2, both grid nodes,
            // so the formula is exact
            let expect = 2.0 - 2.0 * k + k * x.abs();
            assert!(
                (env.value(i).to_f64() - expect).abs() <= 1e-12,
                "k={k}, x={x}"
            );
        }
    }
}

#[test]
fn conjugate_of_abs_beyond_unit_slope_hits_the_box() {
    let g = Grid::new_1d(-2.0, 2.0, 161, Norm::L2).unwrap();
    let f = sample(&GalleryFunction::Abs1d, &g, None).unwrap();
    for s in [1.25, 1.5, 2.0, -1.5] {
        let c = conjugate_at(&f, s).unwrap();
        let expect = 2.0 * (s.abs() - 1.0);
        assert!((c.value - expect).abs() <= 1e-12, "s={s}: got {}", c.value);
        assert!(c.boundary_attained, "s={s} must lean on the box");
    }
    // inside the unit slopes the conjugate vanishes and stays interior-tied
    let inside = conjugate_at(&f, 0.5).unwrap();
    assert!(inside.value.abs() <= 1e-12);
}

#[test]
fn lift_under_a_concave_function_recovers_the_function() {
    // concave 2-Lipschitz input: its greatest concave 2-Lipschitz minorant
    // is itself, so the unpinned lift from any feasible seed lands on f
    let g = Grid::new_1d(-1.0, 1.0, 101, Norm::L2).unwrap();
    let f = sample(&GalleryFunction::Square, &g, None).unwrap().negated();
    let fv = f.values_f64();
    let seed = GridMinorant::constant(g.clone(), -1.5, 2.0).unwrap();
    let (out, cert) = maximal_minorant(&f, &seed, 2.0, &MaximalOptions::default()).unwrap();
    for i in 0..g.node_count() {
        assert!(
            (out.value(i) - fv[i]).abs() <= 1e-7,
            "node {i}: lift {} vs f {}",
            out.value(i),
            fv[i]
        );
    }
    assert!(cert.lp_resolve_gap <= cert.tol_lp);
}

#[test]
fn calmness_of_a_one_sided_ramp() {
    // f is flat at 0 left of the origin and descends with slope -1 to the
    // right. Probed on the flat part at x_bar < 0 the only drops are at
    // x > 0, where the ratio x / (x - x_bar) grows with x, so the modulus
    // is attained at the right edge: 2 / (2 + |x_bar|).
    let g = Grid::new_1d(-2.0, 2.0, 161, Norm::L2).unwrap();
    let ramp = GalleryFunction::piecewise(vec![(-2.0, 0.0), (0.0, 0.0), (2.0, -2.0)]).unwrap();
    let f = sample(&ramp, &g, None).unwrap();
    for x_bar in [-0.5, -1.0, -1.5] {
        let node = g.node_at(&lcx::grid::Point::d1(x_bar)).unwrap();
        let k = lcx::subdiff::calmness_modulus(&f, node).unwrap();
        let expect = 2.0 / (2.0 + x_bar.abs());
        assert!((k - expect).abs() <= 1e-12, "x_bar={x_bar}: got {k}, want {expect}");
    }
}

#[test]
fn ekeland_fixes_immediately_at_a_global_minimizer_gap() {
    // g = f - h is constant when h is a parallel shift: every point is a
    // fixed point of the penalized argmin, so the start never moves
    let g = Grid::new_1d(-2.0, 2.0, 201, Norm::L2).unwrap();
    let f = sample(&GalleryFunction::Abs1d, &g, None).unwrap();
    let shifted = GridMinorant::new(
        g.clone(),
        f.values_f64().iter().map(|v| v - 0.75).collect(),
        1.0,
    )
    .unwrap();
    let x_bar = 37;
    let r = lcx::ekeland::ekeland_refine(
        &f,
        lcx::ekeland::MinorantInput::Grid(&shifted),
        x_bar,
        0.75,
        0.5,
        1e-12,
    )
    .unwrap();
    assert_eq!(r.x_delta, x_bar);
    assert_eq!(r.iterations, 0);
    assert_eq!(r.residuals.distance, 0.0);
}

#[test]
fn one_node_effective_domain_gives_cone_envelopes() {
    // only f(0) = 3 is finite: E-_k is the cone 3 + k|x| and the calmness
    // modulus at the anchor is 0
    let g = Grid::new_1d(-2.0, 2.0, 41, Norm::L2).unwrap();
    let values: Vec<lcx::ExtReal> = (0..41)
        .map(|i| if i == 20 { lcx::ExtReal::finite(3.0) } else { lcx::ExtReal::PosInf })
        .collect();
    let f = SampledFunction::new(g.clone(), values, None).unwrap();
    for k in [0.5, 2.0] {
        let env = lipschitz_lower_envelope(&f, k).unwrap();
        for i in 0..41 {
            let expect = 3.0 + k * g.node_coord(i).x().abs();
            assert!((env.value(i).to_f64() - expect).abs() <= 1e-12);
        }
    }
    assert_eq!(lcx::subdiff::calmness_modulus(&f, 20).unwrap(), 0.0);
}
