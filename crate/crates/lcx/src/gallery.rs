use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::grid::Point;

/// Anything that can be evaluated pointwise on the box. Gallery functions,
/// ad-hoc closures in tests and negated wrappers all implement this.
pub trait PointFunction {
    fn dim(&self) -> usize;
    fn eval(&self, p: &Point) -> ExtReal;
}

/// Closure adapter for `PointFunction`.
pub struct FnPointFunction<F: Fn(&Point) -> ExtReal> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(&Point) -> ExtReal> PointFunction for FnPointFunction<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, p: &Point) -> ExtReal {
        (self.f)(p)
    }
}

/// Mirror wrapper: evaluates `-f`.
pub struct Negated<'a>(pub &'a dyn PointFunction);

impl PointFunction for Negated<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, p: &Point) -> ExtReal {
        self.0.eval(p).neg()
    }
}

/// The closed-form example functions.
#[derive(Debug, Clone, PartialEq)]
pub enum GalleryFunction {
    /// x^2
    Square,
    /// -sqrt(|x|)
    NegSqrtAbs,
    /// |x| - |y|
    AbsDiff2d,
    /// sqrt(2) * |x|
    Sqrt2Abs,
    /// |x|
    Abs1d,
    /// a*x + b
    Affine { a: f64, b: f64 },
    /// Piecewise-linear interpolant of sorted breakpoints, extrapolated with
    /// the end-segment slopes.
    Piecewise { points: Vec<(f64, f64)> },
}

impl GalleryFunction {
    /// The fixed (parameter-free) gallery ids.
    pub const IDS: [&'static str; 5] = ["square", "neg_sqrt_abs", "abs_diff_2d", "sqrt2_abs", "abs_1d"];

    pub fn id(&self) -> &'static str {
        match self {
            GalleryFunction::Square => "square",
            GalleryFunction::NegSqrtAbs => "neg_sqrt_abs",
            GalleryFunction::AbsDiff2d => "abs_diff_2d",
            GalleryFunction::Sqrt2Abs => "sqrt2_abs",
            GalleryFunction::Abs1d => "abs_1d",
            GalleryFunction::Affine { .. } => "affine",
            GalleryFunction::Piecewise { .. } => "pwl",
        }
    }

    pub fn by_id(id: &str) -> Result<GalleryFunction> {
        match id {
            "square" => Ok(GalleryFunction::Square),
            "neg_sqrt_abs" => Ok(GalleryFunction::NegSqrtAbs),
            "abs_diff_2d" => Ok(GalleryFunction::AbsDiff2d),
            "sqrt2_abs" => Ok(GalleryFunction::Sqrt2Abs),
            "abs_1d" => Ok(GalleryFunction::Abs1d),
            _ => Err(Error::usage(format!(
                "unknown gallery id {id:?}; known ids: {}",
                GalleryFunction::IDS.join(", ")
            ))),
        }
    }

    pub fn affine(a: f64, b: f64) -> Result<GalleryFunction> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::usage("affine coefficients must be finite"));
        }
        Ok(GalleryFunction::Affine { a, b })
    }

    pub fn piecewise(points: Vec<(f64, f64)>) -> Result<GalleryFunction> {
        if points.len() < 2 {
            return Err(Error::usage("piecewise-linear needs at least 2 breakpoints"));
        }
        for w in points.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::usage("piecewise-linear breakpoints must be strictly increasing in x"));
            }
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::usage("piecewise-linear breakpoints must be finite"));
        }
        Ok(GalleryFunction::Piecewise { points })
    }
}

fn pwl_eval(points: &[(f64, f64)], x: f64) -> f64 {
    let n = points.len();
    // Segment index: the last i with points[i].0 <= x, clamped to [0, n-2].
    let seg = match points.binary_search_by(|p| p.0.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(n - 2),
        Err(0) => 0,
        Err(i) => (i - 1).min(n - 2),
    };
    let (x0, y0) = points[seg];
    let (x1, y1) = points[seg + 1];
    let slope = (y1 - y0) / (x1 - x0);
    y0 + slope * (x - x0)
}

impl PointFunction for GalleryFunction {
    fn dim(&self) -> usize {
        match self {
            GalleryFunction::AbsDiff2d => 2,
            _ => 1,
        }
    }

    fn eval(&self, p: &Point) -> ExtReal {
        debug_assert_eq!(p.dim(), self.dim());
        let v = match self {
            GalleryFunction::Square => p.x() * p.x(),
            GalleryFunction::NegSqrtAbs => -p.x().abs().sqrt(),
            GalleryFunction::AbsDiff2d => p.x().abs() - p.y().abs(),
            GalleryFunction::Sqrt2Abs => 2f64.sqrt() * p.x().abs(),
            GalleryFunction::Abs1d => p.x().abs(),
            GalleryFunction::Affine { a, b } => a * p.x() + b,
            GalleryFunction::Piecewise { points } => pwl_eval(points, p.x()),
        };
        ExtReal::finite(v)
    }
}
