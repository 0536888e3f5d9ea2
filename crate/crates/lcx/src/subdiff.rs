use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gallery::{Negated, PointFunction};
use crate::grid::{Grid, NodeIndex, Point};
use crate::maximal::{maximal_minorant, MaximalOptions};
use crate::minorant::{GridMinorant, MaximalityCertificate};
use crate::sampled::{sample, SampledFunction};
use crate::serde_util::ext_f64_vec;

/// The shape of a subgradient l from the cone of Lipschitz concave functions
/// vanishing at the origin. The associated supporting function is
/// `h(x) = l(x - x_bar) + f(x_bar)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CandidateForm {
    /// l(u) = -slope * ||u||
    Cone { slope: f64 },
    /// l(u) = s . u
    Affine { slope: Vec<f64> },
    /// The supporting function h sampled on the grid, anchored so that
    /// h(x_bar) equals the anchor value.
    Grid { support: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgradientCandidate {
    pub form: CandidateForm,
    /// Node index of x_bar on the target grid.
    pub base: NodeIndex,
    /// f(x_bar).
    pub anchor: f64,
}

impl SubgradientCandidate {
    pub fn cone(slope: f64, base: NodeIndex, anchor: f64) -> Result<SubgradientCandidate> {
        if !(slope >= 0.0) || !slope.is_finite() {
            return Err(Error::precondition("cone candidate slope must be finite and >= 0"));
        }
        if !anchor.is_finite() {
            return Err(Error::precondition("candidate anchor must be finite"));
        }
        Ok(SubgradientCandidate { form: CandidateForm::Cone { slope }, base, anchor })
    }

    pub fn affine(slope: Vec<f64>, base: NodeIndex, anchor: f64) -> Result<SubgradientCandidate> {
        if slope.is_empty() || slope.len() > 2 || slope.iter().any(|s| !s.is_finite()) {
            return Err(Error::precondition("affine candidate slope must be finite, dim 1 or 2"));
        }
        if !anchor.is_finite() {
            return Err(Error::precondition("candidate anchor must be finite"));
        }
        Ok(SubgradientCandidate { form: CandidateForm::Affine { slope }, base, anchor })
    }

    /// Grid form from explicit supporting-function values; the anchor is the
    /// value at the base node, making l(0) = 0 exact.
    pub fn from_support_values(
        support: Vec<f64>,
        base: NodeIndex,
    ) -> Result<SubgradientCandidate> {
        if support.iter().any(|v| !v.is_finite()) {
            return Err(Error::precondition("grid candidate support must be finite"));
        }
        if base >= support.len() {
            return Err(Error::precondition("grid candidate base out of range"));
        }
        let anchor = support[base];
        Ok(SubgradientCandidate { form: CandidateForm::Grid { support }, base, anchor })
    }

    /// Grid form sampled from `l` (a function of the offset u = x - x_bar):
    /// h(x) = l(x - x_bar) + anchor.
    pub fn from_l_fn(
        l: impl Fn(&Point) -> f64,
        grid: &Grid,
        base: NodeIndex,
        anchor: f64,
    ) -> Result<SubgradientCandidate> {
        let xb = grid.node_coord(base);
        let support = (0..grid.node_count())
            .map(|i| {
                let p = grid.node_coord(i);
                let u = match grid.dim() {
                    1 => Point::d1(p.x() - xb.x()),
                    _ => Point::d2(p.x() - xb.x(), p.y() - xb.y()),
                };
                l(&u) + anchor
            })
            .collect();
        SubgradientCandidate::from_support_values(support, base)
    }

    pub fn from_grid_minorant(m: &GridMinorant, base: NodeIndex) -> Result<SubgradientCandidate> {
        SubgradientCandidate::from_support_values(m.values().to_vec(), base)
    }

    /// Supporting-function values at every node of the grid.
    pub fn support_values(&self, grid: &Grid) -> Vec<f64> {
        let xb = grid.node_coord(self.base);
        match &self.form {
            CandidateForm::Cone { slope } => (0..grid.node_count())
                .map(|i| self.anchor - slope * grid.dist(&grid.node_coord(i), &xb))
                .collect(),
            CandidateForm::Affine { slope } => (0..grid.node_count())
                .map(|i| {
                    let p = grid.node_coord(i);
                    let dot: f64 = slope
                        .iter()
                        .zip(p.coords().iter().zip(xb.coords()))
                        .map(|(s, (a, b))| s * (a - b))
                        .sum();
                    self.anchor + dot
                })
                .collect(),
            CandidateForm::Grid { support } => support.clone(),
        }
    }

    /// The mirrored candidate: describes -l for -f. Involutive bit-for-bit.
    pub fn mirrored(&self) -> SubgradientCandidate {
        let form = match &self.form {
            CandidateForm::Cone { slope } => CandidateForm::Cone { slope: *slope },
            CandidateForm::Affine { slope } => {
                CandidateForm::Affine { slope: slope.iter().map(|s| -s).collect() }
            }
            CandidateForm::Grid { support } => {
                CandidateForm::Grid { support: support.iter().map(|v| -v).collect() }
            }
        };
        SubgradientCandidate { form, base: self.base, anchor: -self.anchor }
    }

    /// Scales by lambda > 0 (the negative case is mirror-then-scale).
    pub fn scaled(&self, lambda: f64) -> Result<SubgradientCandidate> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::precondition("candidate scaling factor must be finite and > 0"));
        }
        let form = match &self.form {
            CandidateForm::Cone { slope } => CandidateForm::Cone { slope: lambda * slope },
            CandidateForm::Affine { slope } => {
                CandidateForm::Affine { slope: slope.iter().map(|s| lambda * s).collect() }
            }
            CandidateForm::Grid { support } => {
                CandidateForm::Grid { support: support.iter().map(|v| lambda * v).collect() }
            }
        };
        Ok(SubgradientCandidate { form, base: self.base, anchor: lambda * self.anchor })
    }
}

/// Node-wise sum of two candidates at the same base (the sum-rule witness).
/// Structure is preserved where possible: cones add slopes, affine forms add
/// slopes; mixed forms fall back to sampled supports.
pub fn candidate_sum(
    a: &SubgradientCandidate,
    b: &SubgradientCandidate,
    grid: &Grid,
) -> Result<SubgradientCandidate> {
    if a.base != b.base {
        return Err(Error::precondition("candidate sum: different base nodes"));
    }
    let anchor = a.anchor + b.anchor;
    let form = match (&a.form, &b.form) {
        (CandidateForm::Cone { slope: k1 }, CandidateForm::Cone { slope: k2 }) => {
            CandidateForm::Cone { slope: k1 + k2 }
        }
        (CandidateForm::Affine { slope: s1 }, CandidateForm::Affine { slope: s2 }) => {
            CandidateForm::Affine { slope: s1.iter().zip(s2).map(|(x, y)| x + y).collect() }
        }
        _ => {
            let sa = a.support_values(grid);
            let sb = b.support_values(grid);
            CandidateForm::Grid {
                support: sa.iter().zip(&sb).map(|(x, y)| x + y).collect(),
            }
        }
    };
    Ok(SubgradientCandidate { form, base: a.base, anchor })
}

/// Convex combination t*a + (1-t)*b of two candidates at the same base.
pub fn candidate_combination(
    a: &SubgradientCandidate,
    b: &SubgradientCandidate,
    t: f64,
    grid: &Grid,
) -> Result<SubgradientCandidate> {
    if a.base != b.base {
        return Err(Error::precondition("candidate combination: different base nodes"));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::precondition("candidate combination: t must lie in [0, 1]"));
    }
    let sa = a.support_values(grid);
    let sb = b.support_values(grid);
    let support: Vec<f64> = sa.iter().zip(&sb).map(|(x, y)| t * x + (1.0 - t) * y).collect();
    SubgradientCandidate::from_support_values(support, a.base)
}

/// The grid calmness modulus at a node:
/// `max over x != x_bar of max(f(x_bar) - f(x), 0) / d(x, x_bar)`.
/// Nodes with f = +inf contribute nothing; a -inf node makes it +inf.
pub fn calmness_modulus(f: &SampledFunction, x_bar: NodeIndex) -> Result<f64> {
    let g = f.grid();
    let fb = f
        .value(x_bar)
        .as_finite()
        .ok_or_else(|| Error::domain("calmness modulus: f not finite at x_bar"))?;
    let vals = f.values_f64();
    let pb = g.node_coord(x_bar);
    let mut best = 0.0f64;
    for x in 0..g.node_count() {
        if x == x_bar {
            continue;
        }
        if vals[x] == f64::INFINITY {
            continue;
        }
        if vals[x] == f64::NEG_INFINITY {
            return Ok(f64::INFINITY);
        }
        let num = fb - vals[x];
        if num > 0.0 {
            let q = num / g.dist(&g.node_coord(x), &pb);
            if q > best {
                best = q;
            }
        }
    }
    Ok(best)
}

/// The supporting cone with the least grid slope satisfying the calmness
/// inequality: a node-wise minorant touching f at x_bar.
pub fn cone_subgradient(f: &SampledFunction, x_bar: NodeIndex) -> Result<SubgradientCandidate> {
    let k = calmness_modulus(f, x_bar)?;
    if !k.is_finite() {
        return Err(Error::precondition(
            "cone subgradient: calmness modulus is infinite (f takes -inf)",
        ));
    }
    let anchor = f.value(x_bar).as_finite().unwrap();
    SubgradientCandidate::cone(k, x_bar, anchor)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubgradientCheck {
    pub passes: bool,
    /// min over nodes of f(x) - h(x); negative means violation.
    #[serde(with = "crate::serde_util::ext_f64")]
    pub worst_slack: f64,
    pub worst_node: NodeIndex,
    pub tol: f64,
}

/// Verifies `f(x) - f(x_bar) >= l(x - x_bar)` at every node within tol,
/// reporting the argmin of the slack.
pub fn check_subgradient(
    f: &SampledFunction,
    cand: &SubgradientCandidate,
    tol: f64,
) -> Result<SubgradientCheck> {
    let g = f.grid();
    if cand.base >= g.node_count() {
        return Err(Error::precondition("candidate base node out of range"));
    }
    if let CandidateForm::Grid { support } = &cand.form {
        if support.len() != g.node_count() {
            return Err(Error::precondition("grid candidate support length mismatch"));
        }
    }
    let fb = f
        .value(cand.base)
        .as_finite()
        .ok_or_else(|| Error::precondition("candidate must be anchored at a finite node of f"))?;
    if (fb - cand.anchor).abs() > tol {
        return Err(Error::precondition(format!(
            "candidate anchor {} does not match f(x_bar) = {}",
            cand.anchor, fb
        )));
    }
    let support = cand.support_values(g);
    let vals = f.values_f64();
    let mut worst = f64::INFINITY;
    let mut worst_node = cand.base;
    for x in 0..g.node_count() {
        let slack = vals[x] - support[x]; // +inf passes, -inf fails
        if slack < worst {
            worst = slack;
            worst_node = x;
        }
    }
    Ok(SubgradientCheck { passes: worst >= -tol, worst_slack: worst, worst_node, tol })
}

/// Certifies whether the candidate is a maximal subgradient by running the
/// maximal-lifting LP pinned at the base node, seeded with the candidate's
/// supporting function.
pub fn check_maximality(
    f: &SampledFunction,
    cand: &SubgradientCandidate,
    k: f64,
    tol_feas: Option<f64>,
    tol_lp: Option<f64>,
) -> Result<MaximalityCertificate> {
    if f.grid().dim() != 1 {
        return Err(Error::precondition("maximality certification is 1-D only"));
    }
    let tol = tol_feas.unwrap_or_else(|| crate::maximal::default_tol_feas(f));
    let check = check_subgradient(f, cand, tol)?;
    if !check.passes {
        return Err(Error::precondition(format!(
            "candidate is not a subgradient (slack {:.3e} at node {})",
            check.worst_slack, check.worst_node
        )));
    }
    let seed = GridMinorant::new(f.grid().clone(), cand.support_values(f.grid()), k)?;
    let opts = MaximalOptions { pin: Some(cand.base), tol_feas: Some(tol), tol_lp, weights: None };
    let (_, cert) = maximal_minorant(f, &seed, k, &opts)?;
    Ok(cert)
}

/// A supergradient candidate for f, stored as the mirrored subgradient
/// candidate of -f (the duality of the convex/concave elementary families).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupergradientCandidate {
    mirrored: SubgradientCandidate,
}

impl SupergradientCandidate {
    /// From the convex Lipschitz l vanishing at 0, described directly:
    /// cone slope k means l(u) = +k*||u||.
    pub fn cone(slope: f64, base: NodeIndex, anchor: f64) -> Result<SupergradientCandidate> {
        Ok(SupergradientCandidate {
            mirrored: SubgradientCandidate::cone(slope, base, -anchor)?,
        })
    }

    pub fn affine(slope: Vec<f64>, base: NodeIndex, anchor: f64) -> Result<SupergradientCandidate> {
        let neg_slope = slope.iter().map(|s| -s).collect();
        Ok(SupergradientCandidate {
            mirrored: SubgradientCandidate::affine(neg_slope, base, -anchor)?,
        })
    }

    /// From majorant-side supporting values g(x) = l(x - x_bar) + f(x_bar).
    pub fn from_support_values(
        support: Vec<f64>,
        base: NodeIndex,
    ) -> Result<SupergradientCandidate> {
        let neg = support.iter().map(|v| -v).collect();
        Ok(SupergradientCandidate {
            mirrored: SubgradientCandidate::from_support_values(neg, base)?,
        })
    }

    pub fn from_l_fn(
        l: impl Fn(&Point) -> f64,
        grid: &Grid,
        base: NodeIndex,
        anchor: f64,
    ) -> Result<SupergradientCandidate> {
        let m = SubgradientCandidate::from_l_fn(|u| -l(u), grid, base, -anchor)?;
        Ok(SupergradientCandidate { mirrored: m })
    }

    /// The subgradient candidate of -f this supergradient mirrors to.
    pub fn as_mirrored(&self) -> &SubgradientCandidate {
        &self.mirrored
    }

    /// Negated supergradient = subgradient of -f (the duality equations).
    pub fn into_mirrored(self) -> SubgradientCandidate {
        self.mirrored
    }

    /// Majorant-side supporting values g(x) >= f(x).
    pub fn support_values(&self, grid: &Grid) -> Vec<f64> {
        self.mirrored.support_values(grid).iter().map(|v| -v).collect()
    }
}

/// Certifies minimality of a supergradient candidate (a minimal majorant is
/// a maximal minorant of -f): the mirrored maximal-lifting LP pinned at the
/// base node.
pub fn check_minimality(
    f: &SampledFunction,
    cand: &SupergradientCandidate,
    k: f64,
    tol_feas: Option<f64>,
    tol_lp: Option<f64>,
) -> Result<MaximalityCertificate> {
    check_maximality(&f.negated(), cand.as_mirrored(), k, tol_feas, tol_lp)
}

/// A candidate of either side, for rules whose branch depends on a sign.
#[derive(Debug, Clone, PartialEq)]
pub enum EitherCandidate {
    Sub(SubgradientCandidate),
    Super(SupergradientCandidate),
}

/// `f(x) - f(x_bar) <= l(x - x_bar)` checked through the mirror.
pub fn check_supergradient(
    f: &SampledFunction,
    cand: &SupergradientCandidate,
    tol: f64,
) -> Result<SubgradientCheck> {
    check_subgradient(&f.negated(), &cand.mirrored, tol)
}

/// Supergradient counterpart of the cone subgradient.
pub fn cone_supergradient(f: &SampledFunction, x_bar: NodeIndex) -> Result<SupergradientCandidate> {
    let sub = cone_subgradient(&f.negated(), x_bar)?;
    Ok(SupergradientCandidate { mirrored: sub })
}

/// Calmness modulus of -f: finiteness characterizes supergradient existence.
pub fn upper_calmness_modulus(f: &SampledFunction, x_bar: NodeIndex) -> Result<f64> {
    calmness_modulus(&f.negated(), x_bar)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleVerdict {
    Subdifferentiable,
    Diverging,
    Inconclusive,
}

pub const ORACLE_NOTE: &str = "finite-grid refinement trend; every finite grid has a finite \
     modulus, so the verdict reports the trend and the <= 10% stabilization rule is an \
     artifact choice, not part of the theory";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalmnessTolerances {
    pub k_cap: f64,
    pub stabilization_rel_change: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalmnessCertificate {
    pub x_bar: Vec<f64>,
    #[serde(with = "ext_f64_vec")]
    pub modulus_sequence: Vec<f64>,
    /// Nodes per axis at each refinement level.
    pub level_nodes: Vec<Vec<usize>>,
    pub tolerances: CalmnessTolerances,
    pub verdict: OracleVerdict,
    pub k_hat: Option<f64>,
    pub note: String,
}

/// Runs the calmness modulus on successively refined grids and classifies the
/// trend. Certificates are always produced; `Inconclusive` is a legal verdict.
pub fn subdifferentiability_oracle(
    f: &dyn PointFunction,
    base_grid: &Grid,
    x_bar: &Point,
    levels: usize,
    k_cap: f64,
) -> Result<CalmnessCertificate> {
    if levels < 2 {
        return Err(Error::precondition("oracle: need at least 2 refinement levels"));
    }
    if !(k_cap > 0.0) {
        return Err(Error::precondition("oracle: K cap must be positive"));
    }
    if base_grid.node_at(x_bar).is_none() {
        return Err(Error::usage(format!("oracle: {x_bar} is not a node of the base grid")));
    }
    if !f.eval(x_bar).is_finite() {
        return Err(Error::domain("oracle: f(x_bar) is not finite"));
    }

    let mut grid = base_grid.clone();
    let mut seq = Vec::with_capacity(levels);
    let mut level_nodes = Vec::with_capacity(levels);
    for lvl in 0..levels {
        if lvl > 0 {
            grid = grid.refined();
        }
        let sf = sample(f, &grid, None)?;
        let idx = grid
            .node_at(x_bar)
            .expect("refinement keeps base-grid nodes");
        seq.push(calmness_modulus(&sf, idx)?);
        level_nodes.push(grid.nodes_per_axis().to_vec());
    }

    let last = seq[levels - 1];
    let prev = seq[levels - 2];
    let stabilized = (last - prev).abs() <= 0.1 * prev.max(1e-12);
    let strictly_increasing = seq.windows(2).all(|w| w[1] > w[0]);
    let within_cap = seq.iter().all(|&k| k <= k_cap);

    let verdict = if seq.iter().any(|k| !k.is_finite()) {
        OracleVerdict::Diverging
    } else if within_cap && stabilized {
        OracleVerdict::Subdifferentiable
    } else if strictly_increasing && (!stabilized || !within_cap) {
        OracleVerdict::Diverging
    } else {
        OracleVerdict::Inconclusive
    };

    Ok(CalmnessCertificate {
        x_bar: x_bar.coords().to_vec(),
        modulus_sequence: seq.clone(),
        level_nodes,
        tolerances: CalmnessTolerances { k_cap, stabilization_rel_change: 0.1 },
        verdict,
        k_hat: match verdict {
            OracleVerdict::Subdifferentiable => Some(last),
            _ => None,
        },
        note: ORACLE_NOTE.to_string(),
    })
}

/// Oracle for supergradients: the mirrored trend on -f.
pub fn superdifferentiability_oracle(
    f: &dyn PointFunction,
    base_grid: &Grid,
    x_bar: &Point,
    levels: usize,
    k_cap: f64,
) -> Result<CalmnessCertificate> {
    subdifferentiability_oracle(&Negated(f), base_grid, x_bar, levels, k_cap)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TwoSidedStatus {
    AffineConfirmed {
        slope_gap: f64,
        max_affinity_deviation: f64,
    },
    HypothesisNotMet {
        failed_side: String,
        worst_node: NodeIndex,
        violation: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoSidedReport {
    pub x_bar: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    pub tol: f64,
    pub status: TwoSidedStatus,
}

/// Two-sided linear sandwich test: a linear subgradient s1 and a linear
/// supergradient s2 at the same point force f affine with s1 = s2.
pub fn affine_two_sided_test(
    f: &SampledFunction,
    x_bar: NodeIndex,
    s1: &[f64],
    s2: &[f64],
    tol: f64,
) -> Result<TwoSidedReport> {
    let g = f.grid();
    let fb = f
        .value(x_bar)
        .as_finite()
        .ok_or_else(|| Error::domain("two-sided test: f not finite at x_bar"))?;
    if s1.len() != g.dim() || s2.len() != g.dim() {
        return Err(Error::usage("two-sided test: slope dimension mismatch"));
    }
    let lower = SubgradientCandidate::affine(s1.to_vec(), x_bar, fb)?;
    let lower_check = check_subgradient(f, &lower, tol)?;
    if !lower_check.passes {
        return Ok(TwoSidedReport {
            x_bar: g.node_coord(x_bar).coords().to_vec(),
            s1: s1.to_vec(),
            s2: s2.to_vec(),
            tol,
            status: TwoSidedStatus::HypothesisNotMet {
                failed_side: "lower".into(),
                worst_node: lower_check.worst_node,
                violation: -lower_check.worst_slack,
            },
        });
    }
    let upper = SupergradientCandidate::affine(s2.to_vec(), x_bar, fb)?;
    let upper_check = check_supergradient(f, &upper, tol)?;
    if !upper_check.passes {
        return Ok(TwoSidedReport {
            x_bar: g.node_coord(x_bar).coords().to_vec(),
            s1: s1.to_vec(),
            s2: s2.to_vec(),
            tol,
            status: TwoSidedStatus::HypothesisNotMet {
                failed_side: "upper".into(),
                worst_node: upper_check.worst_node,
                violation: -upper_check.worst_slack,
            },
        });
    }

    let slope_gap = s1
        .iter()
        .zip(s2)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let mid: Vec<f64> = s1.iter().zip(s2).map(|(a, b)| 0.5 * (a + b)).collect();
    let model = SubgradientCandidate::affine(mid, x_bar, fb)?.support_values(g);
    let vals = f.values_f64();
    let max_dev = (0..g.node_count())
        .filter(|&i| vals[i].is_finite())
        .map(|i| (vals[i] - model[i]).abs())
        .fold(0.0f64, f64::max);

    Ok(TwoSidedReport {
        x_bar: g.node_coord(x_bar).coords().to_vec(),
        s1: s1.to_vec(),
        s2: s2.to_vec(),
        tol,
        status: TwoSidedStatus::AffineConfirmed {
            slope_gap,
            max_affinity_deviation: max_dev,
        },
    })
}
