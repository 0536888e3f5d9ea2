//! Cross-checks the dense simplex against an independent brute-force oracle:
//! enumerate every potential vertex (choose n active constraints from the
//! rows plus the nonnegativity bounds, solve the square system, keep the
//! feasible ones) and take the best objective.

use lcx::randfn::rng_for;
use lcx::simplex::DenseLp;
use rand::Rng;

/// Solves a small square system by Gaussian elimination with partial
/// pivoting; None when singular.
fn solve_square(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (piv, &max) = m[col..]
            .iter()
            .map(|row| row[col])
            .enumerate()
            .max_by(|(_, x), (_, y)| x.abs().partial_cmp(&y.abs()).unwrap())
            .map(|(i, _)| (i + col, &m[i + col][col]))
            .unwrap();
        if max.abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

/// Brute-force LP: max c.x st rows.x <= rhs, x >= 0.
/// Returns the best vertex objective, or None when infeasible... the origin
/// is always feasible here (rhs >= 0), so Some is guaranteed.
fn brute_force(c: &[f64], rows: &[(Vec<f64>, f64)]) -> f64 {
    let n = c.len();
    // constraints: rows, then x_i >= 0 as -x_i <= 0
    let mut all: Vec<(Vec<f64>, f64)> = rows.to_vec();
    for i in 0..n {
        let mut row = vec![0.0; n];
        row[i] = -1.0;
        all.push((row, 0.0));
    }
    let m = all.len();
    let mut best = f64::NEG_INFINITY;
    let mut choice = vec![0usize; n];

    fn rec(
        all: &[(Vec<f64>, f64)],
        c: &[f64],
        choice: &mut Vec<usize>,
        depth: usize,
        start: usize,
        m: usize,
        best: &mut f64,
    ) {
        let n = c.len();
        if depth == n {
            let a: Vec<Vec<f64>> = choice.iter().map(|&i| all[i].0.clone()).collect();
            let b: Vec<f64> = choice.iter().map(|&i| all[i].1).collect();
            if let Some(x) = solve_square(&a, &b) {
                let feasible = all
                    .iter()
                    .all(|(row, rhs)| {
                        row.iter().zip(&x).map(|(r, xi)| r * xi).sum::<f64>() <= rhs + 1e-7
                    });
                if feasible {
                    let obj: f64 = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
                    if obj > *best {
                        *best = obj;
                    }
                }
            }
            return;
        }
        for i in start..m {
            choice[depth] = i;
            rec(all, c, choice, depth + 1, i + 1, m, best);
        }
    }
    rec(&all, c, &mut choice, 0, 0, m, &mut best);
    // the origin is feasible
    best.max(0.0)
}

#[test]
fn simplex_matches_vertex_enumeration_on_random_instances() {
    let mut rng = rng_for(17);
    let mut bounded = 0;
    for trial in 0..300 {
        let n = rng.gen_range(1..=3usize);
        let m = rng.gen_range(1..=6usize);
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let rows: Vec<(Vec<f64>, f64)> = (0..m)
            .map(|_| {
                let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                (coeffs, rng.gen_range(0.0..3.0))
            })
            .collect();

        let mut lp = DenseLp::new(n, c.clone()).unwrap();
        for (coeffs, rhs) in &rows {
            let sparse: Vec<(usize, f64)> =
                coeffs.iter().enumerate().map(|(j, &v)| (j, v)).collect();
            lp.add_row(sparse, *rhs, 0.0).unwrap();
        }
        match lp.solve() {
            Ok(sol) => {
                bounded += 1;
                let oracle = brute_force(&c, &rows);
                assert!(
                    (sol.objective - oracle).abs() <= 1e-6 * (1.0 + oracle.abs()),
                    "trial {trial}: simplex {} vs oracle {oracle}",
                    sol.objective
                );
                // the returned point must satisfy every row
                for (coeffs, rhs) in &rows {
                    let lhs: f64 =
                        coeffs.iter().zip(&sol.x).map(|(a, x)| a * x).sum();
                    assert!(lhs <= rhs + 1e-7, "trial {trial}: infeasible output");
                }
                assert!(sol.x.iter().all(|&x| x >= -1e-9));
            }
            Err(_) => {
                // unbounded: the oracle must find an unbounded ray too; we
                // accept the error without cross-checking the certificate,
                // but it must not happen when an upper row caps every var
                let capped = (0..n).all(|j| {
                    rows.iter().any(|(coeffs, _)| {
                        coeffs[j] > 0.1 && coeffs.iter().all(|&v| v >= 0.0)
                    })
                });
                assert!(!capped, "trial {trial}: declared unbounded but looks capped");
            }
        }
    }
    assert!(bounded >= 50, "too few bounded instances ({bounded}) to be meaningful");
}

#[test]
fn simplex_handles_heavily_degenerate_instances() {
    // many duplicate all-zero-rhs rows around the optimum at the origin
    let mut rng = rng_for(33);
    for _ in 0..50 {
        let n = rng.gen_range(2..=4usize);
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let mut lp = DenseLp::new(n, c).unwrap();
        for j in 0..n {
            for _ in 0..3 {
                lp.add_row(vec![(j, 1.0)], 0.0, 0.0).unwrap();
            }
        }
        let sol = lp.solve().unwrap();
        assert!(sol.objective.abs() <= 1e-9);
        assert!(sol.x.iter().all(|&x| x.abs() <= 1e-9));
    }
}
