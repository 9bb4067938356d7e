//! Finite linear programming: a dense two-phase simplex with primal and dual
//! outputs, and a row-generation driver for programs whose constraint family
//! is too large to materialize.

mod lazy;
mod simplex;

pub use lazy::{solve_lazy, ConstraintFamily, LazyCaps};
pub use simplex::{simplex, SimplexOutcome, StandardForm};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

/// A sparse linear row `sum coeffs[i].1 * x[coeffs[i].0]  (kind)  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub kind: RowKind,
    pub rhs: f64,
}

impl Row {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

/// General-form linear program.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    vars: Vec<VarKind>,
    rows: Vec<Row>,
}

impl LinearProgram {
    /// All variables start nonnegative.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            vars: vec![VarKind::NonNegative; n],
            rows: Vec::new(),
        }
    }

    /// Replaces the objective, keeping the constraints.
    pub fn set_objective(&mut self, objective: Vec<f64>) {
        assert_eq!(objective.len(), self.objective.len());
        self.objective = objective;
    }

    pub fn set_kind(&mut self, var: usize, kind: VarKind) {
        self.vars[var] = kind;
    }

    pub fn set_all_free(&mut self) {
        self.vars.iter_mut().for_each(|v| *v = VarKind::Free);
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, kind: RowKind, rhs: f64) -> usize {
        self.rows.push(Row { coeffs, kind, rhs });
        self.rows.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::InvalidInput(format!("row {i} has a non-finite rhs")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(Error::IndexOutOfRange { index: j, size: n });
                }
                if !a.is_finite() {
                    return Err(Error::InvalidInput(format!("row {i} has a non-finite coefficient")));
                }
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite objective coefficient".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    Stalled,
}

/// Solution of a linear program.
///
/// `duals[r]` is the sensitivity of the optimal value to the right-hand side
/// of row `r`, so `objective == sum_r duals[r] * rhs[r]` at optimality for
/// programs without bounded-variable terms.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub duals: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub rows_generated: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Converts any non-optimal status into a `SolverFailure`.
    pub fn into_optimal(self) -> Result<LpSolution> {
        if self.is_optimal() {
            Ok(self)
        } else {
            Err(Error::SolverFailure {
                reason: format!("{:?}", self.status),
                iterations: self.iterations,
                rows: self.rows_generated,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub pivot_tol: f64,
    pub refactor_every: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_streak: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 200_000,
            feasibility_tol: 1e-10,
            optimality_tol: 1e-11,
            pivot_tol: 1e-9,
            refactor_every: 50,
            degenerate_streak: 40,
        }
    }
}

/// Solves a fully materialized program.
pub fn solve_dense(lp: &LinearProgram, opts: &SolverOptions) -> Result<LpSolution> {
    lp.validate()?;
    let m = lp.num_rows();
    let n = lp.num_vars();
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (r, row) in lp.rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            columns[j].push((r, a));
        }
    }
    let slack_count = lp.rows.iter().filter(|r| r.kind != RowKind::Eq).count();
    let mut sf = StandardForm::with_capacity(m, n + slack_count, 0);
    for (j, col) in columns.into_iter().enumerate() {
        sf.push_column(col, sign * lp.objective[j], lp.vars[j] == VarKind::Free);
    }
    for (r, row) in lp.rows.iter().enumerate() {
        match row.kind {
            RowKind::Le => {
                sf.push_column([(r, 1.0)], 0.0, false);
            }
            RowKind::Ge => {
                sf.push_column([(r, -1.0)], 0.0, false);
            }
            RowKind::Eq => {}
        }
    }
    let b: Vec<f64> = lp.rows.iter().map(|r| r.rhs).collect();
    let out = simplex(&sf, &b, opts);
    let primal = out.x[..n].to_vec();
    let objective = lp.objective.iter().zip(&primal).map(|(c, x)| c * x).sum();
    Ok(LpSolution {
        status: out.status,
        primal,
        duals: out.y.iter().map(|y| sign * y).collect(),
        objective,
        iterations: out.iterations,
        rows_generated: 0,
    })
}

/// A maximization over free variables written row-wise:
/// `max objective·u  s.t.  E u = e,  R u <= r`, optionally with `|u_v| <= box`.
///
/// It is solved through its LP dual, which has one row per variable and one
/// column per constraint, so programs with many constraints and few variables
/// stay cheap.
#[derive(Debug, Clone)]
pub struct RowFormProgram {
    sf: StandardForm,
    num_vars: usize,
    num_eq: usize,
    num_ineq: usize,
    box_bound: Option<f64>,
}

impl RowFormProgram {
    pub fn new(num_vars: usize) -> Self {
        RowFormProgram {
            sf: StandardForm::new(num_vars),
            num_vars,
            num_eq: 0,
            num_ineq: 0,
            box_bound: None,
        }
    }

    pub fn with_capacity(num_vars: usize, rows: usize, nnz: usize) -> Self {
        RowFormProgram {
            sf: StandardForm::with_capacity(num_vars, rows + 2 * num_vars, nnz + 2 * num_vars),
            num_vars,
            num_eq: 0,
            num_ineq: 0,
            box_bound: None,
        }
    }

    /// Adds `coeffs·u = rhs`. Equalities must be added before inequalities.
    pub fn add_equality<I: IntoIterator<Item = (usize, f64)>>(&mut self, coeffs: I, rhs: f64) {
        assert!(self.num_ineq == 0 && self.box_bound.is_none(), "equalities first");
        self.sf.push_column(coeffs, rhs, true);
        self.num_eq += 1;
    }

    /// Adds `coeffs·u <= rhs`.
    pub fn add_inequality<I: IntoIterator<Item = (usize, f64)>>(&mut self, coeffs: I, rhs: f64) {
        assert!(self.box_bound.is_none(), "box bound must be added last");
        self.sf.push_column(coeffs, rhs, false);
        self.num_ineq += 1;
    }

    /// Adds `-bound <= u_v <= bound` for every variable.
    pub fn set_box(&mut self, bound: f64) {
        match self.box_bound {
            None => self.sf.push_box_columns(bound),
            Some(_) => {
                let start = self.num_eq + self.num_ineq;
                for j in start..start + 2 * self.num_vars {
                    self.sf.set_cost(j, bound);
                }
            }
        }
        self.box_bound = Some(bound);
    }

    pub fn box_bound(&self) -> Option<f64> {
        self.box_bound
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_inequalities(&self) -> usize {
        self.num_ineq
    }

    /// Solves for the given objective. `primal` holds `u`; `duals` holds the
    /// multipliers of the equalities followed by those of the inequalities.
    pub fn solve(&self, objective: &[f64], opts: &SolverOptions) -> LpSolution {
        self.solve_with_box(objective, opts).0
    }

    /// Like [`solve`](Self::solve), also returning the total multiplier mass
    /// on the box. Zero mass means the box does not constrain the optimum,
    /// even when some `|u_v|` sits at the bound.
    pub fn solve_with_box(&self, objective: &[f64], opts: &SolverOptions) -> (LpSolution, f64) {
        assert_eq!(objective.len(), self.num_vars);
        let out = simplex(&self.sf, objective, opts);
        let rows = self.num_eq + self.num_ineq;
        let box_mass: f64 = out.x[rows..].iter().sum();
        let status = match out.status {
            LpStatus::Optimal => LpStatus::Optimal,
            // an infeasible dual means an unbounded (or infeasible) primal
            LpStatus::Infeasible => LpStatus::Unbounded,
            LpStatus::Unbounded => LpStatus::Infeasible,
            LpStatus::Stalled => LpStatus::Stalled,
        };
        let u = out.y;
        let value = objective.iter().zip(&u).map(|(a, b)| a * b).sum();
        let sol = LpSolution {
            status,
            primal: u,
            duals: out.x[..rows].to_vec(),
            objective: value,
            iterations: out.iterations,
            rows_generated: 0,
        };
        (sol, box_mass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn max_single_var() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0]);
        lp.add_row(vec![(0, 1.0)], RowKind::Le, 3.0);
        let s = solve_dense(&lp, &opts()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-12);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0]);
        lp.add_row(vec![(0, 1.0)], RowKind::Le, 1.0);
        lp.add_row(vec![(0, 1.0)], RowKind::Ge, 2.0);
        let s = solve_dense(&lp, &opts()).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0, 1.0]);
        lp.add_row(vec![(0, 1.0), (1, -1.0)], RowKind::Le, 1.0);
        let s = solve_dense(&lp, &opts()).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable_goes_negative() {
        // min x s.t. x >= -4, x free
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0]);
        lp.set_kind(0, VarKind::Free);
        lp.add_row(vec![(0, 1.0)], RowKind::Ge, -4.0);
        let s = solve_dense(&lp, &opts()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] + 4.0).abs() < 1e-12);
    }

    #[test]
    fn small_transport_with_redundant_row() {
        // 2x2 transport on {5,10}, mu = (0.5, 0.5), nu = (1, 0), cost |x-y|^2
        let cost = [0.0, 25.0, 25.0, 0.0];
        let mut lp = LinearProgram::new(Sense::Minimize, cost.to_vec());
        lp.add_row(vec![(0, 1.0), (1, 1.0)], RowKind::Eq, 0.5);
        lp.add_row(vec![(2, 1.0), (3, 1.0)], RowKind::Eq, 0.5);
        lp.add_row(vec![(0, 1.0), (2, 1.0)], RowKind::Eq, 1.0);
        lp.add_row(vec![(1, 1.0), (3, 1.0)], RowKind::Eq, 0.0);
        let s = solve_dense(&lp, &opts()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 12.5).abs() < 1e-12);
        let dual_obj: f64 = s.duals.iter().zip([0.5, 0.5, 1.0, 0.0]).map(|(y, b)| y * b).sum();
        assert!((dual_obj - 12.5).abs() < 1e-10);
    }

    #[test]
    fn row_form_matches_dense() {
        // max 2u0 + u1 s.t. u0 + u1 <= 4, u0 - u1 <= 2, -u0 <= 0, u0 + 3u1 = 3
        let mut rf = RowFormProgram::new(2);
        rf.add_equality([(0, 1.0), (1, 3.0)], 3.0);
        rf.add_inequality([(0, 1.0), (1, 1.0)], 4.0);
        rf.add_inequality([(0, 1.0), (1, -1.0)], 2.0);
        rf.add_inequality([(0, -1.0)], 0.0);
        let a = rf.solve(&[2.0, 1.0], &opts());

        let mut lp = LinearProgram::new(Sense::Maximize, vec![2.0, 1.0]);
        lp.set_all_free();
        lp.add_row(vec![(0, 1.0), (1, 3.0)], RowKind::Eq, 3.0);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], RowKind::Le, 4.0);
        lp.add_row(vec![(0, 1.0), (1, -1.0)], RowKind::Le, 2.0);
        lp.add_row(vec![(0, -1.0)], RowKind::Le, 0.0);
        let b = solve_dense(&lp, &opts()).unwrap();
        assert_eq!(a.status, LpStatus::Optimal);
        assert!((a.objective - b.objective).abs() < 1e-10);
        assert!((a.objective - 4.75).abs() < 1e-10);
    }

    #[test]
    fn row_form_unbounded_without_box() {
        let mut rf = RowFormProgram::new(1);
        rf.add_inequality([(0, -1.0)], 0.0);
        let s = rf.solve(&[1.0], &opts());
        assert_eq!(s.status, LpStatus::Unbounded);
        rf.set_box(10.0);
        let s = rf.solve(&[1.0], &opts());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 10.0).abs() < 1e-12);
    }
}
