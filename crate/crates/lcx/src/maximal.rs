use crate::envelope::lipschitz_modulus;
use crate::error::{Error, Result};
use crate::grid::NodeIndex;
use crate::minorant::{GridMinorant, MaximalityCertificate, MaximalityStatus};
use crate::sampled::SampledFunction;
use crate::simplex::{DenseLp, LpStatus};

/// Default feasibility tolerance: 1e-9 * (1 + sup |f|).
pub fn default_tol_feas(f: &SampledFunction) -> f64 {
    1e-9 * (1.0 + f.sup_norm())
}

/// Default class budget for maximality runs: twice the grid modulus.
pub fn default_lipschitz_budget(f: &SampledFunction) -> f64 {
    2.0 * lipschitz_modulus(f)
}

#[derive(Debug, Clone, Default)]
pub struct MaximalOptions {
    /// Support pin: force v(x_bar) = f(x_bar). Requires the seed to touch f
    /// at the pin within tol_feas.
    pub pin: Option<NodeIndex>,
    /// Positive objective weights, uniform when absent.
    pub weights: Option<Vec<f64>>,
    /// Feasibility tolerance; defaults to `default_tol_feas(f)`.
    pub tol_feas: Option<f64>,
    /// Relative optimality tolerance; defaults to 1e-7 of the objective scale.
    pub tol_lp: Option<f64>,
}

/// Lifts a feasible seed to a maximal element of the class of grid-concave
/// K-Lipschitz minorants of f by a linear program maximizing the weighted
/// node sum, then certifies the outcome with an independent feasibility
/// re-check and a re-solve seeded with the optimizer.
///
/// The returned certificate describes the SEED: `Improvable` when the
/// optimizer strictly dominates it, `Maximal` when the LP cannot gain more
/// than tol_lp over it. The returned minorant is the optimizer itself, which
/// is maximal in the class whenever the re-solve gap is within tolerance.
pub fn maximal_minorant(
    f: &SampledFunction,
    seed: &GridMinorant,
    k: f64,
    opts: &MaximalOptions,
) -> Result<(GridMinorant, MaximalityCertificate)> {
    let (out, mut cert) = solve_once(f, seed, k, opts)?;

    // Re-solve from the optimizer: any further gain means the first solve
    // stopped short.
    let resolve_opts = MaximalOptions {
        pin: opts.pin,
        weights: opts.weights.clone(),
        tol_feas: opts.tol_feas,
        tol_lp: opts.tol_lp,
    };
    let (_, cert2) = solve_once(f, &out, k, &resolve_opts)?;
    cert.lp_resolve_gap = cert2.lp_objective_gap;
    if cert2.lp_objective_gap > cert.tol_lp {
        cert.warnings.push(format!(
            "re-solve from the optimizer gained {:.3e}: optimality of the output is not certified",
            cert2.lp_objective_gap
        ));
    }
    Ok((out, cert))
}

fn solve_once(
    f: &SampledFunction,
    seed: &GridMinorant,
    k: f64,
    opts: &MaximalOptions,
) -> Result<(GridMinorant, MaximalityCertificate)> {
    let g = f.grid();
    if g.dim() != 1 {
        return Err(Error::precondition(
            "maximal minorant: concavity certification and the LP are 1-D only",
        ));
    }
    if f.has_neg_inf() {
        return Err(Error::precondition("maximal minorant: f takes -inf"));
    }
    if !f.is_proper() {
        return Err(Error::precondition("maximal minorant: improper f"));
    }
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::precondition("maximal minorant: budget K must be finite and >= 0"));
    }
    let tol_feas = opts.tol_feas.unwrap_or_else(|| default_tol_feas(f));
    let tol_lp = opts.tol_lp.unwrap_or(1e-7);

    let seed_for_class = seed.clone().with_budget(k);
    let seed_check = seed_for_class.check_against(f, tol_feas);
    if !seed_check.ok() {
        return Err(Error::precondition(format!(
            "maximal minorant: seed violates the class invariants: {}",
            seed_check.describe()
        )));
    }

    let n = g.node_count();
    let fv = f.values_f64();
    let sv = seed.values();
    let h = g.spacing(0);

    if let Some(p) = opts.pin {
        if p >= n {
            return Err(Error::precondition("maximal minorant: pin node out of range"));
        }
        if !fv[p].is_finite() {
            return Err(Error::domain("maximal minorant: f not finite at the pin node"));
        }
        if (fv[p] - sv[p]).abs() > tol_feas {
            return Err(Error::precondition(format!(
                "maximal minorant: pinned seed must touch f at the pin node \
                 (gap {:.3e} > tol {:.3e})",
                (fv[p] - sv[p]).abs(),
                tol_feas
            )));
        }
    }

    let weights = match &opts.weights {
        Some(w) => {
            if w.len() != n || w.iter().any(|x| !(x > &0.0) || !x.is_finite()) {
                return Err(Error::precondition(
                    "maximal minorant: weights must be positive, finite, one per node",
                ));
            }
            w.clone()
        }
        None => vec![1.0; n],
    };

    // Variables w_j = v_j - seed_j >= 0; the seed is the LP origin.
    let clamp = 4.0 * tol_feas;
    let mut lp = DenseLp::new(n, weights.clone())?;
    for j in 0..n {
        if opts.pin == Some(j) {
            lp.add_row(vec![(j, 1.0)], 0.0, clamp)?;
        } else if fv[j].is_finite() {
            lp.add_row(vec![(j, 1.0)], fv[j] - sv[j], clamp)?;
        }
    }
    for j in 1..n - 1 {
        let sd = sv[j - 1] - 2.0 * sv[j] + sv[j + 1];
        lp.add_row(vec![(j - 1, 1.0), (j, -2.0), (j + 1, 1.0)], -sd, clamp)?;
    }
    for j in 0..n - 1 {
        let dseed = sv[j + 1] - sv[j];
        lp.add_row(vec![(j + 1, 1.0), (j, -1.0)], k * h - dseed, clamp)?;
        lp.add_row(vec![(j, 1.0), (j + 1, -1.0)], k * h + dseed, clamp)?;
    }

    let sol = lp.solve()?;

    let mut values: Vec<f64> = (0..n).map(|j| sv[j] + sol.x[j]).collect();
    if let Some(p) = opts.pin {
        values[p] = sv[p];
    }
    let out = GridMinorant::new(g.clone(), values, k)?;

    let out_check = out.check_against(f, tol_feas);
    if !out_check.ok() {
        return Err(Error::Lp(format!(
            "optimizer failed the independent feasibility re-check: {}",
            out_check.describe()
        )));
    }

    let gap: f64 = (0..n).map(|j| weights[j] * (out.value(j) - sv[j])).sum();
    let gap = gap.max(0.0);
    let obj_scale = {
        let o1: f64 = (0..n).map(|j| weights[j] * sv[j]).sum();
        let o2: f64 = (0..n).map(|j| weights[j] * out.value(j)).sum();
        o1.abs().max(o2.abs())
    };
    let tol_lp_eff = tol_lp * (1.0 + obj_scale);

    let mut warnings = Vec::new();
    if sol.status == LpStatus::IterationLimit {
        warnings.push(format!(
            "simplex iteration cap reached after {} pivots ({} degenerate); \
             verdict based on the returned feasible point",
            sol.iterations, sol.degenerate_pivots
        ));
    }
    let near_tol = out_check
        .minorant_violation
        .max(out_check.concavity_violation.unwrap_or(f64::NEG_INFINITY))
        .max(out_check.lipschitz_violation);
    if near_tol > 0.25 * tol_feas {
        warnings.push(format!(
            "optimizer feasibility uses {:.3e} of the {:.3e} tolerance budget",
            near_tol, tol_feas
        ));
    }

    let max_node_improvement =
        (0..n).map(|j| out.value(j) - sv[j]).fold(f64::NEG_INFINITY, f64::max);

    let status = if gap <= tol_lp_eff {
        MaximalityStatus::Maximal
    } else {
        MaximalityStatus::Improvable
    };
    let improvement = match status {
        MaximalityStatus::Improvable => Some(out.clone()),
        MaximalityStatus::Maximal => None,
    };

    let cert = MaximalityCertificate {
        status,
        lp_objective_gap: gap,
        lp_resolve_gap: 0.0,
        class: format!(
            "grid-concave, {k}-Lipschitz grid minorants on {n} nodes (finite class; \
             continuum maximality not claimed)"
        ),
        lipschitz_budget: k,
        pinned_node: opts.pin,
        tol_lp: tol_lp_eff,
        tol_feas,
        warnings,
        improvement,
        max_node_improvement,
    };
    Ok((out, cert))
}
