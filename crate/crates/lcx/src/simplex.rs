use crate::error::{Error, Result};

/// A dense LP in computational form:
/// maximize c.x subject to A x <= b, x >= 0, with every b_i >= 0
/// so the slack basis is feasible and no phase-1 is needed.
pub struct DenseLp {
    num_vars: usize,
    objective: Vec<f64>,
    rows: Vec<(Vec<(usize, f64)>, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    /// The iteration cap was reached; the returned point is feasible but
    /// optimality was not proven.
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
    pub iterations: usize,
    pub degenerate_pivots: usize,
}

impl DenseLp {
    pub fn new(num_vars: usize, objective: Vec<f64>) -> Result<DenseLp> {
        if objective.len() != num_vars {
            return Err(Error::Lp("objective length does not match variable count".into()));
        }
        if objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::Lp("objective coefficients must be finite".into()));
        }
        Ok(DenseLp { num_vars, objective, rows: Vec::new() })
    }

    /// Adds a row `sum coeff_j x_j <= rhs`. Negative rhs within `clamp_slack`
    /// is clamped to zero; anything more negative is rejected, since the
    /// slack basis would be infeasible.
    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64, clamp_slack: f64) -> Result<()> {
        if coeffs.iter().any(|&(j, c)| j >= self.num_vars || !c.is_finite()) {
            return Err(Error::Lp("bad row coefficients".into()));
        }
        if !rhs.is_finite() {
            return Err(Error::Lp("row rhs must be finite".into()));
        }
        let rhs = if rhs >= 0.0 {
            rhs
        } else if rhs >= -clamp_slack {
            0.0
        } else {
            return Err(Error::Lp(format!(
                "row rhs {rhs} below -{clamp_slack}: origin is not feasible"
            )));
        };
        self.rows.push((coeffs, rhs));
        Ok(())
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let n = self.num_vars;
        let m = self.rows.len();
        let width = n + m + 1;
        let rhs_col = n + m;

        // tableau rows 0..m are constraints, row m holds z_j - c_j and -z.
        let mut t = vec![0.0f64; (m + 1) * width];
        for (i, (coeffs, rhs)) in self.rows.iter().enumerate() {
            for &(j, c) in coeffs {
                t[i * width + j] += c;
            }
            t[i * width + n + i] = 1.0;
            t[i * width + rhs_col] = *rhs;
        }
        for j in 0..n {
            t[m * width + j] = -self.objective[j];
        }

        let mut basis: Vec<usize> = (n..n + m).collect();
        let opt_tol = 1e-9 * (1.0 + self.objective.iter().fold(0.0f64, |a, c| a.max(c.abs())));
        let piv_tol = 1e-9;
        let max_iter = 200 * (n + m) + 10_000;
        let bland_after = 3 * (n + m) + 50;

        let mut iterations = 0usize;
        let mut degenerate = 0usize;
        let mut degenerate_streak = 0usize;
        let mut bland = false;
        let mut status = LpStatus::Optimal;

        loop {
            if iterations >= max_iter {
                status = LpStatus::IterationLimit;
                break;
            }

            // entering column
            let obj_row = &t[m * width..(m + 1) * width];
            let entering = if bland {
                (0..n + m).find(|&j| obj_row[j] < -opt_tol)
            } else {
                let mut best = None;
                let mut best_val = -opt_tol;
                for j in 0..n + m {
                    if obj_row[j] < best_val {
                        best_val = obj_row[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(e) = entering else { break };

            // ratio test; ties broken by smallest basic variable index
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..m {
                let a = t[i * width + e];
                if a > piv_tol {
                    let ratio = t[i * width + rhs_col] / a;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            ratio < best_ratio - 1e-12
                                || (ratio <= best_ratio + 1e-12 && basis[i] < basis[l])
                        }
                    };
                    if better {
                        best_ratio = ratio.max(0.0);
                        leave = Some(i);
                    }
                }
            }
            let Some(l) = leave else {
                return Err(Error::Lp("unbounded objective".into()));
            };

            if best_ratio <= 1e-12 {
                degenerate += 1;
                degenerate_streak += 1;
                if degenerate_streak > bland_after {
                    bland = true;
                }
            } else {
                degenerate_streak = 0;
            }

            // pivot on (l, e)
            let piv = t[l * width + e];
            let lrow = l * width;
            for j in 0..width {
                t[lrow + j] /= piv;
            }
            for i in 0..=m {
                if i == l {
                    continue;
                }
                let factor = t[i * width + e];
                if factor == 0.0 {
                    continue;
                }
                let irow = i * width;
                for j in 0..width {
                    t[irow + j] -= factor * t[lrow + j];
                }
                t[irow + e] = 0.0;
            }
            basis[l] = e;
            iterations += 1;
        }

        let mut x = vec![0.0f64; n];
        for i in 0..m {
            if basis[i] < n {
                x[basis[i]] = t[i * width + rhs_col].max(0.0);
            }
        }
        let objective = x.iter().zip(&self.objective).map(|(xi, ci)| xi * ci).sum();
        Ok(LpSolution { x, objective, status, iterations, degenerate_pivots: degenerate })
    }
}
