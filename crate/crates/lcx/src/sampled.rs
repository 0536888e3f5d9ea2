use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::gallery::PointFunction;
use crate::grid::{Grid, NodeIndex, Point};

/// An extended-real-valued function known at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<ExtReal>,
    name: Option<String>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<ExtReal>, name: Option<String>) -> Result<SampledFunction> {
        if values.len() != grid.node_count() {
            return Err(Error::usage(format!(
                "value count {} does not match node count {}",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(SampledFunction { grid, values, name })
    }

    pub fn from_finite(grid: Grid, values: Vec<f64>, name: Option<String>) -> Result<SampledFunction> {
        let mut vs = Vec::with_capacity(values.len());
        for v in values {
            vs.push(ExtReal::new(v)?);
        }
        SampledFunction::new(grid, vs, name)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn value(&self, idx: NodeIndex) -> ExtReal {
        self.values[idx]
    }

    /// Values as IEEE floats, infinities mapped to IEEE infinities.
    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64()).collect()
    }

    /// Proper means at least one finite value.
    pub fn is_proper(&self) -> bool {
        self.values.iter().any(|v| v.is_finite())
    }

    pub fn has_neg_inf(&self) -> bool {
        self.values.iter().any(|v| v.is_neg_inf())
    }

    /// Nodes with finite value.
    pub fn effective_domain(&self) -> Vec<NodeIndex> {
        (0..self.values.len()).filter(|&i| self.values[i].is_finite()).collect()
    }

    /// Max of |v| over finite values; 0 when there are none. Used to scale
    /// tolerances.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .filter_map(|v| v.as_finite())
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Pointwise negation; +inf and -inf swap.
    pub fn negated(&self) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.neg()).collect(),
            name: self.name.as_ref().map(|n| format!("-({n})")),
        }
    }

    /// Pointwise scaling by a finite nonzero factor.
    pub fn scaled(&self, lambda: f64) -> SampledFunction {
        SampledFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.scale(lambda)).collect(),
            name: None,
        }
    }

    /// Pointwise extended-real sum; errors on (+inf) + (-inf).
    pub fn try_add(&self, other: &SampledFunction) -> Result<SampledFunction> {
        if self.grid != other.grid {
            return Err(Error::precondition("sum of functions on different grids"));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for (a, b) in self.values.iter().zip(&other.values) {
            values.push(a.add(*b)?);
        }
        Ok(SampledFunction { grid: self.grid.clone(), values, name: None })
    }

    /// Minimum over all nodes in the extended-real order.
    pub fn min_value(&self) -> ExtReal {
        self.values.iter().copied().min().unwrap_or(ExtReal::PosInf)
    }

    pub fn max_value(&self) -> ExtReal {
        self.values.iter().copied().max().unwrap_or(ExtReal::NegInf)
    }

    /// Smallest node index attaining the extended-real minimum.
    pub fn argmin(&self) -> NodeIndex {
        let mut best = 0;
        for i in 1..self.values.len() {
            if self.values[i] < self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn argmax(&self) -> NodeIndex {
        let mut best = 0;
        for i in 1..self.values.len() {
            if self.values[i] > self.values[best] {
                best = i;
            }
        }
        best
    }
}

/// Samples a point function at every grid node, row-major.
pub fn sample(f: &dyn PointFunction, grid: &Grid, name: Option<String>) -> Result<SampledFunction> {
    if f.dim() != grid.dim() {
        return Err(Error::usage(format!(
            "function dim {} does not match grid dim {}",
            f.dim(),
            grid.dim()
        )));
    }
    let values = (0..grid.node_count()).map(|i| f.eval(&grid.node_coord(i))).collect();
    SampledFunction::new(grid.clone(), values, name)
}

/// Evaluates a point function, requiring the point to lie in the grid box.
pub fn eval_on_box(f: &dyn PointFunction, grid: &Grid, p: &Point) -> Result<ExtReal> {
    if f.dim() != grid.dim() || p.dim() != grid.dim() {
        return Err(Error::usage("dimension mismatch between function, grid and point"));
    }
    if !grid.contains(p) {
        return Err(Error::domain(format!("point {p} outside the grid box")));
    }
    Ok(f.eval(p))
}

/// Evaluates a sampled function at a point that must be a grid node.
pub fn eval_sampled(f: &SampledFunction, p: &Point) -> Result<ExtReal> {
    if !f.grid().contains(p) {
        return Err(Error::domain(format!("point {p} outside the grid box")));
    }
    match f.grid().node_at(p) {
        Some(idx) => Ok(f.value(idx)),
        None => Err(Error::usage(format!(
            "point {p} is not a grid node; sampled functions are not interpolated"
        ))),
    }
}

/// Distance between two points of the box in the grid norm.
pub fn norm_dist(grid: &Grid, p: &Point, q: &Point) -> Result<f64> {
    if !grid.contains(p) || !grid.contains(q) {
        return Err(Error::domain("norm_dist points must lie in the grid box"));
    }
    Ok(grid.dist(p, q))
}
