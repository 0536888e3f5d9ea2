use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, NodeIndex, Point};
use crate::sampled::SampledFunction;

/// The elementary cone minorant `x -> level - slope * ||x - apex||`.
/// Concave and globally slope-Lipschitz in the grid norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeFunction {
    pub apex: Vec<f64>,
    pub slope: f64,
    pub level: f64,
}

impl ConeFunction {
    pub fn new(apex: &Point, slope: f64, level: f64) -> Result<ConeFunction> {
        if !(slope >= 0.0) || !slope.is_finite() {
            return Err(Error::precondition(format!("cone slope must be finite and >= 0, got {slope}")));
        }
        if !level.is_finite() {
            return Err(Error::precondition("cone level must be finite"));
        }
        Ok(ConeFunction { apex: apex.coords().to_vec(), slope, level })
    }

    pub fn apex_point(&self) -> Point {
        Point::from_slice(&self.apex).expect("apex stored with 1 or 2 coords")
    }

    pub fn eval(&self, grid: &Grid, p: &Point) -> f64 {
        self.level - self.slope * grid.dist(p, &self.apex_point())
    }

    /// Values at every grid node, row-major.
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        (0..grid.node_count()).map(|i| self.eval(grid, &grid.node_coord(i))).collect()
    }
}

/// The supporting cone anchored on f: apex y, slope k, level f(y).
/// Errors when f(y) is not finite.
pub fn cone_minorant(f: &SampledFunction, y: NodeIndex, k: f64) -> Result<ConeFunction> {
    let fy = f
        .value(y)
        .as_finite()
        .ok_or_else(|| Error::domain(format!("cone minorant: f is not finite at node {y}")))?;
    ConeFunction::new(&f.grid().node_coord(y), k, fy)
}

/// A real-valued grid function claimed to be a concave K-Lipschitz minorant.
/// `check_against` verifies the claim independently of however the values
/// were produced.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMinorant {
    grid: Grid,
    values: Vec<f64>,
    lipschitz_budget: f64,
}

impl GridMinorant {
    pub fn new(grid: Grid, values: Vec<f64>, lipschitz_budget: f64) -> Result<GridMinorant> {
        if values.len() != grid.node_count() {
            return Err(Error::usage("grid minorant: value count does not match node count"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::precondition("grid minorant values must be finite"));
        }
        if !(lipschitz_budget >= 0.0) || !lipschitz_budget.is_finite() {
            return Err(Error::precondition("grid minorant: Lipschitz budget must be finite and >= 0"));
        }
        Ok(GridMinorant { grid, values, lipschitz_budget })
    }

    pub fn constant(grid: Grid, c: f64, lipschitz_budget: f64) -> Result<GridMinorant> {
        let n = grid.node_count();
        GridMinorant::new(grid, vec![c; n], lipschitz_budget)
    }

    pub fn from_cone(cone: &ConeFunction, grid: &Grid) -> Result<GridMinorant> {
        GridMinorant::new(grid.clone(), cone.sample(grid), cone.slope)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, idx: NodeIndex) -> f64 {
        self.values[idx]
    }

    pub fn lipschitz_budget(&self) -> f64 {
        self.lipschitz_budget
    }

    pub fn with_budget(mut self, k: f64) -> GridMinorant {
        self.lipschitz_budget = k;
        self
    }

    /// Shifts all values down by a nonnegative amount.
    pub fn shifted_down(&self, s: f64) -> GridMinorant {
        GridMinorant {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v - s).collect(),
            lipschitz_budget: self.lipschitz_budget,
        }
    }

    pub fn to_sampled(&self, name: Option<String>) -> SampledFunction {
        SampledFunction::from_finite(self.grid.clone(), self.values.clone(), name)
            .expect("finite values match the grid")
    }

    /// Independent feasibility check of the three invariants: minorant of f,
    /// concave (1-D second differences), K-Lipschitz (all node pairs).
    pub fn check_against(&self, f: &SampledFunction, tol_feas: f64) -> MinorantCheck {
        let mut check = MinorantCheck::default();
        check.tol_feas = tol_feas;
        let g = &self.grid;

        if f.grid() != g {
            check.grid_mismatch = true;
            return check;
        }
        let fv = f.values_f64();
        for (i, &v) in self.values.iter().enumerate() {
            // +inf nodes impose no upper constraint; -inf makes any minorant fail
            let viol = match fv[i] {
                x if x == f64::INFINITY => f64::NEG_INFINITY,
                x if x == f64::NEG_INFINITY => f64::INFINITY,
                x => v - x,
            };
            if viol > check.minorant_violation {
                check.minorant_violation = viol;
                check.minorant_worst_node = Some(i);
            }
        }

        if g.dim() == 1 {
            let mut worst = f64::NEG_INFINITY;
            let mut worst_node = None;
            for j in 1..self.values.len() - 1 {
                let sd = self.values[j - 1] - 2.0 * self.values[j] + self.values[j + 1];
                if sd > worst {
                    worst = sd;
                    worst_node = Some(j);
                }
            }
            if let Some(j) = worst_node {
                check.concavity_violation = Some(worst);
                check.concavity_worst_node = Some(j);
            } else {
                check.concavity_violation = Some(f64::NEG_INFINITY);
            }
        }

        let n = g.node_count();
        let k = self.lipschitz_budget;
        let mut worst = f64::NEG_INFINITY;
        let mut worst_pair = None;
        for i in 0..n {
            let pi = g.node_coord(i);
            for j in (i + 1)..n {
                let viol = (self.values[i] - self.values[j]).abs()
                    - k * g.dist(&pi, &g.node_coord(j));
                if viol > worst {
                    worst = viol;
                    worst_pair = Some((i, j));
                }
            }
        }
        check.lipschitz_violation = worst;
        check.lipschitz_worst_pair = worst_pair;
        check
    }
}

/// Result of the independent minorant validation. All violations are signed
/// slacks: a value <= tol_feas means the constraint holds within tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct MinorantCheck {
    pub tol_feas: f64,
    pub grid_mismatch: bool,
    pub minorant_violation: f64,
    pub minorant_worst_node: Option<NodeIndex>,
    /// None for 2-D grids, where concavity is not certified by local stencils.
    pub concavity_violation: Option<f64>,
    pub concavity_worst_node: Option<NodeIndex>,
    pub lipschitz_violation: f64,
    pub lipschitz_worst_pair: Option<(NodeIndex, NodeIndex)>,
}

impl Default for MinorantCheck {
    fn default() -> Self {
        MinorantCheck {
            tol_feas: 0.0,
            grid_mismatch: false,
            minorant_violation: f64::NEG_INFINITY,
            minorant_worst_node: None,
            concavity_violation: None,
            concavity_worst_node: None,
            lipschitz_violation: f64::NEG_INFINITY,
            lipschitz_worst_pair: None,
        }
    }
}

impl MinorantCheck {
    pub fn ok(&self) -> bool {
        !self.grid_mismatch
            && self.minorant_violation <= self.tol_feas
            && self.concavity_violation.unwrap_or(f64::NEG_INFINITY) <= self.tol_feas
            && self.lipschitz_violation <= self.tol_feas
    }

    pub fn describe(&self) -> String {
        if self.grid_mismatch {
            return "minorant grid does not match target grid".into();
        }
        let mut parts = Vec::new();
        if self.minorant_violation > self.tol_feas {
            parts.push(format!(
                "minorant property violated by {:.3e} at node {:?}",
                self.minorant_violation, self.minorant_worst_node
            ));
        }
        if self.concavity_violation.unwrap_or(f64::NEG_INFINITY) > self.tol_feas {
            parts.push(format!(
                "concavity violated by {:.3e} at node {:?}",
                self.concavity_violation.unwrap(),
                self.concavity_worst_node
            ));
        }
        if self.lipschitz_violation > self.tol_feas {
            parts.push(format!(
                "Lipschitz budget violated by {:.3e} at pair {:?}",
                self.lipschitz_violation, self.lipschitz_worst_pair
            ));
        }
        if parts.is_empty() {
            "feasible".into()
        } else {
            parts.join("; ")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MaximalityStatus {
    Maximal,
    Improvable,
}

/// Machine-checkable maximality verdict for a candidate minorant, relative to
/// the finite class of grid-concave K-Lipschitz grid minorants. Maximality
/// over the full continuum class is not claimed.
#[derive(Debug, Clone, Serialize)]
pub struct MaximalityCertificate {
    pub status: MaximalityStatus,
    /// Objective gain of the optimizer over the candidate (uniform weights).
    pub lp_objective_gap: f64,
    /// Objective gain of a re-solve seeded with the optimizer; near zero when
    /// the solver reached an optimum.
    pub lp_resolve_gap: f64,
    /// The class the verdict is relative to.
    pub class: String,
    pub lipschitz_budget: f64,
    pub pinned_node: Option<NodeIndex>,
    pub tol_lp: f64,
    pub tol_feas: f64,
    pub warnings: Vec<String>,
    /// Strictly dominating feasible minorant, present when improvable.
    #[serde(skip)]
    pub improvement: Option<GridMinorant>,
    /// Max node-wise improvement of the optimizer over the candidate.
    pub max_node_improvement: f64,
}
