use std::fmt;

use crate::error::{Error, Result};

/// Which p-norm distances on the box are measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl Norm {
    pub fn parse(s: &str) -> Result<Norm> {
        match s {
            "1" => Ok(Norm::L1),
            "2" => Ok(Norm::L2),
            "inf" | "Inf" | "INF" => Ok(Norm::LInf),
            _ => Err(Error::usage(format!("unknown norm {s:?}, expected 1, 2 or inf"))),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::L1 => write!(f, "1"),
            Norm::L2 => write!(f, "2"),
            Norm::LInf => write!(f, "inf"),
        }
    }
}

/// A point of the box, one or two coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    dim: usize,
    c: [f64; 2],
}

impl Point {
    pub fn d1(x: f64) -> Point {
        Point { dim: 1, c: [x, 0.0] }
    }

    pub fn d2(x: f64, y: f64) -> Point {
        Point { dim: 2, c: [x, y] }
    }

    pub fn from_slice(c: &[f64]) -> Result<Point> {
        match c {
            [x] => Ok(Point::d1(*x)),
            [x, y] => Ok(Point::d2(*x, *y)),
            _ => Err(Error::usage(format!("point must have 1 or 2 coordinates, got {}", c.len()))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    pub fn x(&self) -> f64 {
        self.c[0]
    }

    /// Second coordinate; only meaningful for dim 2.
    pub fn y(&self) -> f64 {
        self.c[1]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "({}, {})", self.c[0], self.c[1])
        }
    }
}

/// Index of a node in the row-major node order of its grid.
pub type NodeIndex = usize;

/// A uniform rectangular grid over a box in R^1 or R^2.
///
/// Node coordinates are always recomputed from `lower + j * spacing`, never
/// accumulated, so they are reproducible bit-for-bit from the grid fields.
/// Node order is row-major by axis: axis 0 is the slow axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    lower: [f64; 2],
    upper: [f64; 2],
    nodes: [usize; 2],
    norm: Norm,
}

impl Grid {
    pub fn new_1d(lower: f64, upper: f64, nodes: usize, norm: Norm) -> Result<Grid> {
        Grid::new(1, [lower, 0.0], [upper, 1.0], [nodes, 1], norm)
    }

    pub fn new_2d(
        lower: [f64; 2],
        upper: [f64; 2],
        nodes: [usize; 2],
        norm: Norm,
    ) -> Result<Grid> {
        Grid::new(2, lower, upper, nodes, norm)
    }

    fn new(dim: usize, lower: [f64; 2], upper: [f64; 2], nodes: [usize; 2], norm: Norm) -> Result<Grid> {
        if dim != 1 && dim != 2 {
            return Err(Error::usage(format!("grid dim must be 1 or 2, got {dim}")));
        }
        for i in 0..dim {
            if !lower[i].is_finite() || !upper[i].is_finite() {
                return Err(Error::usage("grid bounds must be finite"));
            }
            if lower[i] >= upper[i] {
                return Err(Error::usage(format!(
                    "grid axis {i}: lower {} must be < upper {}",
                    lower[i], upper[i]
                )));
            }
            if nodes[i] < 2 {
                return Err(Error::usage(format!(
                    "grid axis {i}: need at least 2 nodes, got {}",
                    nodes[i]
                )));
            }
        }
        let mut g = Grid { dim, lower, upper, nodes, norm };
        if dim == 1 {
            // Normalize the unused axis so equality and hashing behave.
            g.lower[1] = 0.0;
            g.upper[1] = 1.0;
            g.nodes[1] = 1;
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower[..self.dim]
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper[..self.dim]
    }

    pub fn nodes_per_axis(&self) -> &[usize] {
        &self.nodes[..self.dim]
    }

    pub fn node_count(&self) -> usize {
        self.nodes[..self.dim].iter().product()
    }

    /// Spacing along an axis: (upper - lower) / (nodes - 1).
    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.nodes[axis] - 1) as f64
    }

    pub fn axis_coord(&self, axis: usize, j: usize) -> f64 {
        self.lower[axis] + j as f64 * self.spacing(axis)
    }

    pub fn unravel(&self, idx: NodeIndex) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.nodes[1], idx % self.nodes[1]]
        }
    }

    pub fn ravel(&self, j: [usize; 2]) -> NodeIndex {
        if self.dim == 1 {
            j[0]
        } else {
            j[0] * self.nodes[1] + j[1]
        }
    }

    pub fn node_coord(&self, idx: NodeIndex) -> Point {
        let j = self.unravel(idx);
        if self.dim == 1 {
            Point::d1(self.axis_coord(0, j[0]))
        } else {
            Point::d2(self.axis_coord(0, j[0]), self.axis_coord(1, j[1]))
        }
    }

    /// True when the node touches the boundary of the box on any axis.
    pub fn is_boundary(&self, idx: NodeIndex) -> bool {
        let j = self.unravel(idx);
        (0..self.dim).any(|a| j[a] == 0 || j[a] == self.nodes[a] - 1)
    }

    pub fn contains(&self, p: &Point) -> bool {
        if p.dim() != self.dim {
            return false;
        }
        (0..self.dim).all(|a| {
            let span = self.upper[a] - self.lower[a];
            let slack = 1e-12 * span;
            p.coords()[a] >= self.lower[a] - slack && p.coords()[a] <= self.upper[a] + slack
        })
    }

    /// Finds the node a point refers to, within a small index-space tolerance.
    /// Returns None when the point is not (close to) a node.
    pub fn node_at(&self, p: &Point) -> Option<NodeIndex> {
        if p.dim() != self.dim || !self.contains(p) {
            return None;
        }
        let mut j = [0usize; 2];
        for a in 0..self.dim {
            let t = (p.coords()[a] - self.lower[a]) / self.spacing(a);
            let r = t.round();
            if (t - r).abs() > 1e-6 {
                return None;
            }
            let ji = r as isize;
            if ji < 0 || ji >= self.nodes[a] as isize {
                return None;
            }
            j[a] = ji as usize;
        }
        Some(self.ravel(j))
    }

    /// Distance between two points in the grid's norm.
    pub fn dist(&self, p: &Point, q: &Point) -> f64 {
        debug_assert_eq!(p.dim(), self.dim);
        debug_assert_eq!(q.dim(), self.dim);
        if self.dim == 1 {
            return (p.x() - q.x()).abs();
        }
        let dx = (p.x() - q.x()).abs();
        let dy = (p.y() - q.y()).abs();
        match self.norm {
            Norm::L1 => dx + dy,
            Norm::L2 => (dx * dx + dy * dy).sqrt(),
            Norm::LInf => dx.max(dy),
        }
    }

    pub fn node_dist(&self, i: NodeIndex, j: NodeIndex) -> f64 {
        self.dist(&self.node_coord(i), &self.node_coord(j))
    }

    /// The refinement with doubled resolution; existing nodes stay nodes.
    pub fn refined(&self) -> Grid {
        let mut nodes = self.nodes;
        for a in 0..self.dim {
            nodes[a] = 2 * (nodes[a] - 1) + 1;
        }
        Grid { dim: self.dim, lower: self.lower, upper: self.upper, nodes, norm: self.norm }
    }
}
