use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::grid::NodeIndex;
use crate::maximal::{default_lipschitz_budget, default_tol_feas, maximal_minorant, MaximalOptions};
use crate::minorant::{GridMinorant, MaximalityCertificate, MaximalityStatus};
use crate::sampled::SampledFunction;
use crate::subdiff::{
    candidate_sum, check_subgradient, check_supergradient, EitherCandidate, SubgradientCandidate,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExtremumKind {
    GlobalMinIff,
    GlobalMaxIff,
    MaxNecessary,
    MinNecessary,
}

#[derive(Debug, Clone, Serialize)]
pub enum ExtremumWitness {
    /// The zero functional is the certified subgradient/supergradient.
    ZeroFunctional,
    /// A node beating x_bar.
    ViolatingNode { node: NodeIndex, value: String },
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremumCertificate {
    pub kind: ExtremumKind,
    pub x_bar: NodeIndex,
    pub x_bar_coords: Vec<f64>,
    pub holds: bool,
    /// Direct scan route: f(x_bar) is the extended-real extremum over nodes.
    pub direct_route: bool,
    /// Zero-functional membership route through the subgradient checker.
    pub membership_route: bool,
    /// The two routes agreed; a false here is a bug trap, never a verdict.
    pub consistent: bool,
    pub witness: ExtremumWitness,
    /// For the necessary condition: intersection of the classical one-sided
    /// slope intervals [s_plus, s_minus] of the supplied minorants.
    pub classical_interval: Option<(String, String)>,
    /// Extremum attained at a box-boundary node.
    pub boundary_attained: bool,
    /// 1-D interior extrema only: LP certification that the zero functional
    /// is maximal among pinned candidates (thin-subdifferential membership).
    pub thin_membership: Option<MaximalityCertificate>,
    pub flags: Vec<String>,
}

enum Side {
    Min,
    Max,
}

fn extremum_certificate(f: &SampledFunction, x_bar: NodeIndex, side: Side) -> Result<ExtremumCertificate> {
    let g = f.grid();
    if x_bar >= g.node_count() {
        return Err(Error::precondition("extremum: x_bar out of range"));
    }
    let fb = f.value(x_bar);
    if !fb.is_finite() {
        return Err(Error::domain("extremum: f(x_bar) is not finite"));
    }

    // For the max side everything mirrors through -f.
    let (work, kind) = match side {
        Side::Min => (f.clone(), ExtremumKind::GlobalMinIff),
        Side::Max => (f.negated(), ExtremumKind::GlobalMaxIff),
    };

    // Route 1: direct extended-real scan.
    let wb = work.value(x_bar);
    let mut direct = true;
    let mut violating = None;
    for i in 0..work.values().len() {
        if work.value(i) < wb {
            direct = false;
            if violating.is_none() || work.value(i) < work.value(violating.unwrap()) {
                violating = Some(i);
            }
        }
    }

    // Route 2: the zero functional through the subgradient checker, exact.
    let zero = SubgradientCandidate::affine(
        vec![0.0; g.dim()],
        x_bar,
        wb.as_finite().expect("checked finite"),
    )?;
    let membership = check_subgradient(&work, &zero, 0.0)?.passes;

    let consistent = direct == membership;
    let holds = direct && membership;
    let mut flags = Vec::new();
    if !consistent {
        flags.push(
            "INCONSISTENT: direct scan and zero-functional membership disagree (bug trap)".into(),
        );
    }

    let boundary = holds && g.is_boundary(x_bar);
    if boundary {
        flags.push("extremum attained at a box-boundary node".into());
    }

    // Thin-subdifferential membership via the pinned LP; sound only at
    // interior nodes of 1-D grids, where no concave improvement over the
    // constant support can exist.
    let thin_membership = if holds && g.dim() == 1 && !g.is_boundary(x_bar) {
        let k = default_lipschitz_budget(&work);
        let seed = GridMinorant::constant(g.clone(), wb.as_finite().unwrap(), k)?;
        let opts = MaximalOptions { pin: Some(x_bar), ..Default::default() };
        let (_, cert) = maximal_minorant(&work, &seed, k, &opts)?;
        if cert.status != MaximalityStatus::Maximal {
            flags.push(
                "INCONSISTENT: the pinned LP improved the zero functional at an interior \
                 extremum (bug trap)"
                    .into(),
            );
        }
        Some(cert)
    } else {
        if holds && g.dim() == 1 {
            flags.push(
                "thin-membership LP skipped at a boundary node: the box truncation can \
                 make the zero functional improvable there"
                    .into(),
            );
        }
        None
    };

    let witness = if holds {
        ExtremumWitness::ZeroFunctional
    } else if let Some(v) = violating {
        ExtremumWitness::ViolatingNode {
            node: v,
            value: match side {
                Side::Min => f.value(v).to_string(),
                Side::Max => f.value(v).to_string(),
            },
        }
    } else {
        ExtremumWitness::None
    };

    Ok(ExtremumCertificate {
        kind,
        x_bar,
        x_bar_coords: g.node_coord(x_bar).coords().to_vec(),
        holds,
        direct_route: direct,
        membership_route: membership,
        consistent,
        witness,
        classical_interval: None,
        boundary_attained: boundary,
        thin_membership,
        flags,
    })
}

/// Global-minimum criterion: x_bar minimizes f over the grid iff the zero
/// functional is a (maximal) subgradient there. Both routes are computed
/// independently and must agree.
pub fn global_min_certificate(f: &SampledFunction, x_bar: NodeIndex) -> Result<ExtremumCertificate> {
    extremum_certificate(f, x_bar, Side::Min)
}

/// Global-maximum criterion, mirrored through the superdifferential.
pub fn global_max_certificate(f: &SampledFunction, x_bar: NodeIndex) -> Result<ExtremumCertificate> {
    extremum_certificate(f, x_bar, Side::Max)
}

/// Necessary condition at a global maximum: every minorant supporting f at
/// x_bar has 0 in its classical superdifferential there. The interval is
/// [s_plus, s_minus] from one-sided difference quotients, one-sided at the
/// boundary.
pub fn max_necessary_condition(
    f: &SampledFunction,
    x_bar: NodeIndex,
    minorants: &[GridMinorant],
    tol_feas: Option<f64>,
) -> Result<ExtremumCertificate> {
    let g = f.grid();
    if g.dim() != 1 {
        return Err(Error::precondition("necessary condition: 1-D grids only"));
    }
    let tol = tol_feas.unwrap_or_else(|| default_tol_feas(f));
    let fb = f
        .value(x_bar)
        .as_finite()
        .ok_or_else(|| Error::domain("necessary condition: f(x_bar) not finite"))?;

    for (i, m) in minorants.iter().enumerate() {
        let check = m.check_against(f, tol);
        if !check.ok() {
            return Err(Error::precondition(format!(
                "necessary condition: minorant {i} is not a minorant of f: {}",
                check.describe()
            )));
        }
        if (m.value(x_bar) - fb).abs() > tol {
            return Err(Error::precondition(format!(
                "necessary condition: minorant {i} does not support f at x_bar \
                 (gap {:.3e})",
                (m.value(x_bar) - fb).abs()
            )));
        }
    }

    // Hypothesis: f attains its node-wise max at x_bar.
    let hypothesis = (0..g.node_count()).all(|i| f.value(i) <= f.value(x_bar));
    let mut flags = Vec::new();
    if !hypothesis {
        flags.push("hypothesis not met: f does not attain its node-wise maximum at x_bar".into());
    }

    let h_step = g.spacing(0);
    let n = g.node_count();
    let tol_slope = tol / h_step;
    let mut holds = hypothesis;
    let mut s_plus_max = f64::NEG_INFINITY;
    let mut s_minus_min = f64::INFINITY;
    let mut boundary = false;
    for m in minorants {
        // s_plus: right slope; missing at the right boundary -> -inf
        let s_plus = if x_bar + 1 < n {
            (m.value(x_bar + 1) - m.value(x_bar)) / h_step
        } else {
            boundary = true;
            f64::NEG_INFINITY
        };
        // s_minus: left slope; missing at the left boundary -> +inf
        let s_minus = if x_bar > 0 {
            (m.value(x_bar) - m.value(x_bar - 1)) / h_step
        } else {
            boundary = true;
            f64::INFINITY
        };
        if hypothesis && !(s_plus <= tol_slope && s_minus >= -tol_slope) {
            holds = false;
        }
        s_plus_max = s_plus_max.max(s_plus);
        s_minus_min = s_minus_min.min(s_minus);
    }
    if boundary {
        flags.push("one-sided interval at a box-boundary node".into());
    }
    if minorants.is_empty() {
        flags.push("no minorants supplied; the condition holds vacuously".into());
    }

    Ok(ExtremumCertificate {
        kind: ExtremumKind::MaxNecessary,
        x_bar,
        x_bar_coords: g.node_coord(x_bar).coords().to_vec(),
        holds,
        direct_route: hypothesis,
        membership_route: holds,
        consistent: true,
        witness: if holds { ExtremumWitness::ZeroFunctional } else { ExtremumWitness::None },
        classical_interval: Some((
            ExtReal::new(s_plus_max).map(|e| e.to_string()).unwrap_or_else(|_| "nan".into()),
            ExtReal::new(s_minus_min).map(|e| e.to_string()).unwrap_or_else(|_| "nan".into()),
        )),
        boundary_attained: boundary,
        thin_membership: None,
        flags,
    })
}

/// Necessary condition at a global minimum, mirrored: every convex majorant
/// supporting f at x_bar has 0 in its classical subdifferential there.
/// `majorants` are given as grid functions with a Lipschitz budget; each must
/// majorize f and touch it at x_bar.
pub fn min_necessary_condition(
    f: &SampledFunction,
    x_bar: NodeIndex,
    majorants: &[GridMinorant],
    tol_feas: Option<f64>,
) -> Result<ExtremumCertificate> {
    let neg = f.negated();
    let mirrored: Vec<GridMinorant> = majorants
        .iter()
        .map(|m| {
            GridMinorant::new(
                m.grid().clone(),
                m.values().iter().map(|v| -v).collect(),
                m.lipschitz_budget(),
            )
        })
        .collect::<Result<_>>()?;
    let cert = max_necessary_condition(&neg, x_bar, &mirrored, tol_feas)?;
    // mirror the slope interval back: [s+, s-] of -g is [-s-, -s+] of g
    let classical_interval = cert.classical_interval.map(|(lo, hi)| {
        let neg_str = |s: String| -> String {
            match s.as_str() {
                "inf" => "-inf".to_string(),
                "-inf" => "inf".to_string(),
                other => other
                    .parse::<f64>()
                    .map(|v| ExtReal::finite(-v).to_string())
                    .unwrap_or_else(|_| other.to_string()),
            }
        };
        (neg_str(hi), neg_str(lo))
    });
    Ok(ExtremumCertificate {
        kind: ExtremumKind::MinNecessary,
        classical_interval,
        ..cert
    })
}

/// Scaling rule: lambda * (sub/supergradient of f) is a subgradient of
/// lambda*f. The candidate side must match the sign of lambda.
pub fn calculus_scaling_check(
    f: &SampledFunction,
    lambda: f64,
    cand: &EitherCandidate,
    tol: f64,
) -> Result<bool> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::domain("scaling rule: lambda must be finite and nonzero"));
    }
    match (lambda > 0.0, cand) {
        (true, EitherCandidate::Sub(c)) => {
            let pre = check_subgradient(f, c, tol)?;
            if !pre.passes {
                return Err(Error::precondition(
                    "scaling rule: candidate is not a subgradient of f",
                ));
            }
            let scaled_f = f.scaled(lambda);
            let scaled_c = c.scaled(lambda)?;
            Ok(check_subgradient(&scaled_f, &scaled_c, tol * lambda.max(1.0))?.passes)
        }
        (false, EitherCandidate::Super(s)) => {
            let pre = check_supergradient(f, s, tol)?;
            if !pre.passes {
                return Err(Error::precondition(
                    "scaling rule: candidate is not a supergradient of f",
                ));
            }
            let scaled_f = f.scaled(lambda);
            // lambda * l = (-lambda) * (-l), and -l is the mirrored form
            let scaled_c = s.as_mirrored().scaled(-lambda)?;
            Ok(check_subgradient(&scaled_f, &scaled_c, tol * (-lambda).max(1.0))?.passes)
        }
        (true, EitherCandidate::Super(_)) => Err(Error::precondition(
            "scaling rule: lambda > 0 requires a subgradient candidate",
        )),
        (false, EitherCandidate::Sub(_)) => Err(Error::precondition(
            "scaling rule: lambda < 0 requires a supergradient candidate",
        )),
    }
}

/// Sum rule: subgradients of f1 and f2 at x_bar sum to a subgradient of
/// f1 + f2 there. A false return is a bug, not a legal outcome.
pub fn calculus_sum_check(
    f1: &SampledFunction,
    f2: &SampledFunction,
    x_bar: NodeIndex,
    c1: &SubgradientCandidate,
    c2: &SubgradientCandidate,
    tol: f64,
) -> Result<bool> {
    if c1.base != x_bar || c2.base != x_bar {
        return Err(Error::precondition("sum rule: candidates must be anchored at x_bar"));
    }
    if !check_subgradient(f1, c1, tol)?.passes {
        return Err(Error::precondition("sum rule: c1 is not a subgradient of f1"));
    }
    if !check_subgradient(f2, c2, tol)?.passes {
        return Err(Error::precondition("sum rule: c2 is not a subgradient of f2"));
    }
    let sum = f1.try_add(f2)?;
    if !sum.value(x_bar).is_finite() {
        return Err(Error::precondition("sum rule: (f1+f2)(x_bar) must be finite"));
    }
    let c = candidate_sum(c1, c2, f1.grid())?;
    Ok(check_subgradient(&sum, &c, 2.0 * tol)?.passes)
}

#[derive(Debug, Clone)]
pub struct DominationOutcome {
    pub dominates: bool,
    pub minorant: GridMinorant,
    pub certificate: MaximalityCertificate,
}

/// Domination rule: when f1 <= f2 with equal values at x_bar, any subgradient
/// of f1 at x_bar is dominated by a maximal subgradient of f2 there. The
/// witness comes from the pinned maximal-lifting LP.
pub fn calculus_domination_check(
    f1: &SampledFunction,
    f2: &SampledFunction,
    x_bar: NodeIndex,
    l1: &SubgradientCandidate,
    k: f64,
    tol_feas: Option<f64>,
) -> Result<DominationOutcome> {
    let g = f1.grid();
    if g.dim() != 1 {
        return Err(Error::precondition("domination rule: 1-D grids only"));
    }
    if f2.grid() != g {
        return Err(Error::precondition("domination rule: f1 and f2 must share a grid"));
    }
    let tol = tol_feas.unwrap_or_else(|| default_tol_feas(f2));
    for i in 0..g.node_count() {
        if f1.value(i) > f2.value(i) {
            return Err(Error::precondition(format!(
                "domination rule: f1 > f2 at node {i}"
            )));
        }
    }
    let v1 = f1
        .value(x_bar)
        .as_finite()
        .ok_or_else(|| Error::precondition("domination rule: f1(x_bar) not finite"))?;
    let v2 = f2
        .value(x_bar)
        .as_finite()
        .ok_or_else(|| Error::precondition("domination rule: f2(x_bar) not finite"))?;
    if (v1 - v2).abs() > tol {
        return Err(Error::precondition(format!(
            "domination rule: f1(x_bar) = {v1} must equal f2(x_bar) = {v2}"
        )));
    }
    if !check_subgradient(f1, l1, tol)?.passes {
        return Err(Error::precondition("domination rule: l1 is not a subgradient of f1"));
    }

    let seed = GridMinorant::new(g.clone(), l1.support_values(g), k)?;
    let opts = MaximalOptions { pin: Some(x_bar), tol_feas: Some(tol), ..Default::default() };
    let (out, certificate) = maximal_minorant(f2, &seed, k, &opts)?;
    let dominates =
        (0..g.node_count()).all(|i| out.value(i) >= seed.value(i) - tol);
    Ok(DominationOutcome { dominates, minorant: out, certificate })
}
