use super::{LpSolution, LpStatus, RowFormProgram, SolverOptions};
use crate::error::{Error, Result};
use std::collections::HashSet;

/// A finite but possibly huge family of inequalities `row_i · u <= rhs_i`
/// over free variables `u`.
pub trait ConstraintFamily {
    fn num_vars(&self) -> usize;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coefficients and right-hand side of row `index`.
    fn row(&self, index: usize) -> (Vec<(usize, f64)>, f64);

    /// The row with the largest violation `row·u - rhs` (which may be
    /// negative when `u` is feasible). Ties go to the smallest index.
    fn most_violated(&self, u: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.len() {
            let (coeffs, rhs) = self.row(i);
            let v = coeffs.iter().map(|&(j, a)| a * u[j]).sum::<f64>() - rhs;
            match best {
                Some((_, b)) if b >= v => {}
                _ => best = Some((i, v)),
            }
        }
        best
    }
}

#[derive(Debug, Clone)]
pub struct LazyCaps {
    /// Stop with `RowCapExceeded` once this many rows are active.
    pub max_rows: usize,
    pub max_rounds: usize,
    /// Violations at or below this are treated as feasible.
    pub violation_tol: f64,
    /// Initial `|u_v|` box keeping restricted programs bounded; it grows
    /// tenfold whenever it binds at the restricted optimum.
    pub initial_box: f64,
    pub rows_per_round: usize,
}

impl Default for LazyCaps {
    fn default() -> Self {
        LazyCaps {
            max_rows: 200_000,
            max_rounds: 20_000,
            violation_tol: 1e-9,
            initial_box: 1e3,
            rows_per_round: 1,
        }
    }
}

/// Cutting-plane solve of `max objective·u  s.t.  equalities,  family`.
///
/// `equalities` are `(coeffs, rhs)` pairs that are always present. Each round
/// solves the restricted program on the active rows, queries the family for
/// its most violated row and adds it, until no row is violated by more than
/// `caps.violation_tol`.
pub fn solve_lazy(
    objective: &[f64],
    equalities: &[(Vec<(usize, f64)>, f64)],
    family: &dyn ConstraintFamily,
    initial_rows: &[usize],
    caps: &LazyCaps,
    opts: &SolverOptions,
) -> Result<LpSolution> {
    let n = family.num_vars();
    if objective.len() != n {
        return Err(Error::InvalidInput("objective length differs from family".into()));
    }
    let mut active: Vec<usize> = Vec::new();
    let mut seen: HashSet<usize> = HashSet::new();
    for &i in initial_rows {
        if i >= family.len() {
            return Err(Error::IndexOutOfRange { index: i, size: family.len() });
        }
        if seen.insert(i) {
            active.push(i);
        }
    }
    let initial_count = active.len();
    let mut bound = caps.initial_box;
    let mut iterations = 0usize;
    let mut rows: Vec<(Vec<(usize, f64)>, f64)> = active.iter().map(|&i| family.row(i)).collect();

    for _round in 0..caps.max_rounds {
        let mut prog = RowFormProgram::with_capacity(n, equalities.len() + rows.len(), 0);
        for (coeffs, rhs) in equalities {
            prog.add_equality(coeffs.iter().copied(), *rhs);
        }
        for (coeffs, rhs) in &rows {
            prog.add_inequality(coeffs.iter().copied(), *rhs);
        }
        prog.set_box(bound);
        let (sol, box_mass) = prog.solve_with_box(objective, opts);
        iterations += sol.iterations;
        if sol.status != LpStatus::Optimal {
            return Ok(LpSolution {
                iterations,
                rows_generated: active.len() - initial_count,
                ..sol
            });
        }
        let u = &sol.primal;
        let mut added = 0;
        let mut violated = false;
        if let Some((idx, viol)) = family.most_violated(u) {
            let scale = 1.0 + family.row(idx).1.abs();
            if viol > caps.violation_tol * scale {
                violated = true;
                if seen.insert(idx) {
                    active.push(idx);
                    rows.push(family.row(idx));
                    added += 1;
                } else {
                    return Err(Error::SolverFailure {
                        reason: format!("row {idx} stays violated by {viol:e} after being added"),
                        iterations,
                        rows: active.len(),
                    });
                }
            }
        }
        if active.len() > caps.max_rows {
            return Err(Error::RowCapExceeded { cap: caps.max_rows });
        }
        if violated && added > 0 {
            continue;
        }
        // The box only matters when its multipliers carry mass; otherwise
        // the restricted optimum is optimal without it, even if some entries
        // rest on the bound along a direction of constant objective.
        let mass_scale = 1.0 + objective.iter().map(|v| v.abs()).sum::<f64>();
        let box_binding = box_mass > 1e-9 * mass_scale
            && u.iter().any(|v| v.abs() >= bound * (1.0 - 1e-9));
        if box_binding {
            bound *= 10.0;
            if !bound.is_finite() || bound > 1e15 {
                return Ok(LpSolution {
                    status: LpStatus::Unbounded,
                    iterations,
                    rows_generated: active.len() - initial_count,
                    ..sol
                });
            }
            continue;
        }
        // multipliers are reported against the active rows only
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            primal: sol.primal,
            duals: sol.duals,
            objective: sol.objective,
            iterations,
            rows_generated: active.len() - initial_count,
        });
    }
    Err(Error::SolverFailure {
        reason: "row generation did not converge".into(),
        iterations,
        rows: active.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_dense, LinearProgram, RowKind, Sense};

    /// Rows `u_a - u_b <= d(a, b)` over all ordered pairs.
    struct Differences {
        d: Vec<Vec<f64>>,
    }

    impl ConstraintFamily for Differences {
        fn num_vars(&self) -> usize {
            self.d.len()
        }
        fn len(&self) -> usize {
            self.d.len() * self.d.len()
        }
        fn row(&self, index: usize) -> (Vec<(usize, f64)>, f64) {
            let n = self.d.len();
            let (a, b) = (index / n, index % n);
            if a == b {
                (vec![], 0.0)
            } else {
                (vec![(a, 1.0), (b, -1.0)], self.d[a][b])
            }
        }
    }

    #[test]
    fn lazy_matches_dense_on_difference_constraints() {
        let pts = [0.0f64, 1.0, 3.0, 4.5];
        let d: Vec<Vec<f64>> = pts
            .iter()
            .map(|x| pts.iter().map(|y| (x - y).powi(2)).collect())
            .collect();
        let fam = Differences { d: d.clone() };
        let obj = [0.3, -0.1, 0.5, -0.7];
        let eq = vec![(vec![(0, 1.0)], 0.0)];
        let lazy = solve_lazy(&obj, &eq, &fam, &[], &LazyCaps::default(), &SolverOptions::default())
            .unwrap();

        let mut lp = LinearProgram::new(Sense::Maximize, obj.to_vec());
        lp.set_all_free();
        lp.add_row(vec![(0, 1.0)], RowKind::Eq, 0.0);
        for i in 0..fam.len() {
            let (c, r) = fam.row(i);
            if !c.is_empty() {
                lp.add_row(c, RowKind::Le, r);
            }
        }
        let dense = solve_dense(&lp, &SolverOptions::default()).unwrap();
        assert_eq!(lazy.status, LpStatus::Optimal);
        assert!((lazy.objective - dense.objective).abs() < 1e-9);
    }

    #[test]
    fn fully_loaded_family_needs_no_generation() {
        let pts = [0.0f64, 2.0, 5.0];
        let d: Vec<Vec<f64>> = pts
            .iter()
            .map(|x| pts.iter().map(|y| (x - y).powi(2)).collect())
            .collect();
        let fam = Differences { d };
        let all: Vec<usize> = (0..fam.len()).collect();
        let eq = vec![(vec![(0, 1.0)], 0.0)];
        let s = solve_lazy(&[1.0, -1.0, 1.0], &eq, &fam, &all, &LazyCaps::default(), &SolverOptions::default())
            .unwrap();
        assert_eq!(s.rows_generated, 0);
    }
}
