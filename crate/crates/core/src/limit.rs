//! Limit laws of the scaled empirical MOT value: rates, the null limit
//! program and its relaxation, and the Gaussian law at a fixed dual vector.

use crate::error::{Error, Result};
use crate::lp::{simplex, solve_lazy, ConstraintFamily, LpStatus, SolverOptions, StandardForm};
use crate::mot::{
    build_cost_tensor, decode_tuple, pair_cost, tuple_count, CostTensor, DualLayout, DualVector,
    MotOptions, MotSolution, SolveMode, TupleFamily,
};
use crate::support::{gaussian_limit_from_weights, Measure, MeasureCollection, SupportSpace};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Scaling rate and limiting weights for sample sizes `n_1, ..., n_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateInfo {
    pub rho_n: f64,
    pub lambda: Vec<f64>,
    /// `a_i`, the product of the other groups' proportions.
    pub a: Vec<f64>,
}

/// `rho_n = sqrt(n_1 ... n_k) / sqrt(n_1 + ... + n_k)^(k-1)`, evaluated in
/// log space so large sizes do not overflow.
pub fn rate(sizes: &[u64]) -> Result<RateInfo> {
    let k = sizes.len();
    if k < 2 {
        return Err(Error::InvalidSize(format!("need at least two groups, got {k}")));
    }
    if let Some(i) = sizes.iter().position(|&n| n == 0) {
        return Err(Error::InvalidSize(format!("group {i} has sample size 0")));
    }
    let total: f64 = sizes.iter().map(|&n| n as f64).sum();
    let log_prod: f64 = sizes.iter().map(|&n| (n as f64).ln()).sum();
    let rho_n = (0.5 * log_prod - 0.5 * (k - 1) as f64 * total.ln()).exp();
    let lambda: Vec<f64> = sizes.iter().map(|&n| n as f64 / total).collect();
    let a = (0..k)
        .map(|i| {
            lambda
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, l)| l)
                .product()
        })
        .collect();
    Ok(RateInfo { rho_n, lambda, a })
}

/// `k` independent draws from the Gaussian limit of the multinomial process
/// with cell probabilities `weights`.
pub fn null_directions<R: Rng + ?Sized>(weights: &[f64], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..k).map(|_| gaussian_limit_from_weights(weights, rng).g).collect()
}

/// One Gaussian direction per measure of the collection, each with its own
/// covariance.
pub fn alternative_directions<R: Rng + ?Sized>(collection: &MeasureCollection, rng: &mut R) -> Vec<Vec<f64>> {
    collection
        .measures()
        .iter()
        .map(|m| gaussian_limit_from_weights(m.weights(), rng).g)
        .collect()
}

fn check_directions(g: &[Vec<f64>], a: &[f64], k: usize, n: usize) -> Result<()> {
    if g.len() != k || a.len() != k {
        return Err(Error::InvalidInput(format!(
            "expected {k} directions and weights, got {} and {}",
            g.len(),
            a.len()
        )));
    }
    if g.iter().any(|gi| gi.len() != n) {
        return Err(Error::InvalidInput(format!("directions must have length {n}")));
    }
    if a.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidInput("weights a_i must be finite and nonnegative".into()));
    }
    Ok(())
}

fn box_for(support: &SupportSpace) -> f64 {
    4.0 * support.diameter_sq() + 1.0
}

fn box_columns(sf: &mut StandardForm, rows: usize, bound: f64) {
    debug_assert_eq!(rows, sf.rows());
    sf.push_box_columns(bound);
}

fn failure(what: &str, status: LpStatus, iterations: usize) -> Error {
    Error::SolverFailure {
        reason: format!("{what} ended {status:?}"),
        iterations,
        rows: 0,
    }
}

/// Optimal value and maximizer of a limit program.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSolution {
    pub value: f64,
    pub dual: DualVector,
}

#[derive(Debug, Clone)]
enum Backend {
    /// Column form: one row per free dual entry, free columns for the
    /// equalities `sum_i u_i = 0`, one column per tuple, box columns.
    Dense(StandardForm),
    Lazy(Option<Arc<CostTensor>>),
}

/// The null limit program
/// `max sum_i sqrt(a_i) <u_i, g_i>  s.t.  sum_i u_i = 0,  A'u <= c`.
///
/// The constraint data are built once; each solve only swaps in the
/// objective. The first entries of `u_2, ..., u_k` are pinned to zero, which
/// is without loss because every direction `g_i` sums to zero.
#[derive(Debug, Clone)]
pub struct NullLimitProgram {
    support: Arc<SupportSpace>,
    layout: DualLayout,
    backend: Backend,
    bound: f64,
    opts: MotOptions,
}

impl NullLimitProgram {
    pub fn new(support: Arc<SupportSpace>, k: usize) -> Result<Self> {
        NullLimitProgram::with_options(support, k, &MotOptions::default())
    }

    pub fn with_options(support: Arc<SupportSpace>, k: usize, opts: &MotOptions) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidSize(format!("k must be at least 2, got {k}")));
        }
        let n = support.len();
        let layout = DualLayout::new(n, k);
        let count = tuple_count(n, k);
        let fits = |limit: usize| count.is_some_and(|c| c <= limit);
        let bound = box_for(&support);
        let dense = match opts.mode {
            SolveMode::Lazy => false,
            SolveMode::Dense if !fits(opts.dense_limit) => {
                return Err(Error::BudgetExceeded {
                    required: (n as u128).saturating_pow(k as u32),
                    budget: opts.dense_limit as u128,
                })
            }
            _ => fits(opts.dense_limit),
        };
        if !dense && !fits(opts.enumeration_limit) {
            return Err(Error::BudgetExceeded {
                required: (n as u128).saturating_pow(k as u32),
                budget: opts.enumeration_limit as u128,
            });
        }
        let costs = if fits(opts.dense_limit) {
            Some(build_cost_tensor(&support, k, opts.dense_limit)?)
        } else {
            None
        };
        let backend = match costs {
            Some(c) if dense => {
                let rows = layout.num_vars();
                let mut sf = StandardForm::with_capacity(rows, n + c.entries().len() + 2 * rows, 0);
                for j in 0..n {
                    sf.push_column((0..k).filter_map(|i| layout.var(i, j).map(|v| (v, 1.0))), 0.0, true);
                }
                let mut t = vec![0usize; k];
                for (idx, &cost) in c.entries().iter().enumerate() {
                    decode_tuple(idx, n, &mut t);
                    sf.push_column(layout.tuple_row(&t), cost, false);
                }
                box_columns(&mut sf, rows, bound);
                Backend::Dense(sf)
            }
            c => Backend::Lazy(c.map(Arc::new)),
        };
        Ok(NullLimitProgram {
            support,
            layout,
            backend,
            bound,
            opts: opts.clone(),
        })
    }

    pub fn k(&self) -> usize {
        self.layout.k()
    }

    pub fn support(&self) -> &Arc<SupportSpace> {
        &self.support
    }

    pub fn is_lazy(&self) -> bool {
        matches!(self.backend, Backend::Lazy(_))
    }

    fn objective(&self, g: &[Vec<f64>], a: &[f64]) -> Vec<f64> {
        let mut b = vec![0.0; self.layout.num_vars()];
        for (i, gi) in g.iter().enumerate() {
            let s = a[i].sqrt();
            for (j, &x) in gi.iter().enumerate() {
                if let Some(v) = self.layout.var(i, j) {
                    b[v] = s * x;
                }
            }
        }
        b
    }

    pub fn solve(&self, g: &[Vec<f64>], a: &[f64]) -> Result<LimitSolution> {
        check_directions(g, a, self.k(), self.support.len())?;
        let b = self.objective(g, a);
        let y = match &self.backend {
            Backend::Dense(sf) => {
                let out = simplex(sf, &b, &self.opts.solver);
                if out.status != LpStatus::Optimal {
                    return Err(failure("null limit program", out.status, out.iterations));
                }
                if out.y.iter().any(|v| v.abs() >= self.bound * (1.0 - 1e-9)) {
                    return Err(Error::SolverFailure {
                        reason: "null limit program reached its box".into(),
                        iterations: out.iterations,
                        rows: 0,
                    });
                }
                out.y
            }
            Backend::Lazy(costs) => {
                let fam = TupleFamily::new(&self.support, self.k(), costs.as_deref());
                let n = self.support.len();
                let eqs: Vec<(Vec<(usize, f64)>, f64)> = (0..n)
                    .map(|j| {
                        let row = (0..self.k())
                            .filter_map(|i| self.layout.var(i, j).map(|v| (v, 1.0)))
                            .collect();
                        (row, 0.0)
                    })
                    .collect();
                let mut caps = self.opts.lazy.clone();
                caps.initial_box = self.bound;
                solve_lazy(&b, &eqs, &fam, &fam.seed_rows(), &caps, &self.opts.solver)?
                    .into_optimal()?
                    .primal
            }
        };
        let value: f64 = b.iter().zip(&y).map(|(p, q)| p * q).sum();
        Ok(LimitSolution {
            value: value.max(0.0),
            dual: DualVector {
                blocks: self.layout.expand(&y),
            },
        })
    }

    pub fn value(&self, g: &[Vec<f64>], a: &[f64]) -> Result<f64> {
        Ok(self.solve(g, a)?.value)
    }

    /// Draws `g_1, ..., g_k` from the limit for `weights` and solves.
    pub fn sample<R: Rng + ?Sized>(&self, weights: &[f64], a: &[f64], rng: &mut R) -> Result<f64> {
        let g = null_directions(weights, self.k(), rng);
        self.value(&g, a)
    }
}

/// One draw of the null limit `X_0` for the first measure `mu1`.
pub fn sample_x0<R: Rng + ?Sized>(mu1: &Measure, a: &[f64], k: usize, rng: &mut R) -> Result<f64> {
    NullLimitProgram::new(mu1.support().clone(), k)?.sample(mu1.weights(), a, rng)
}

/// One inequality `(u_block)_anchor - (u_block)_other <= rhs` of the relaxed
/// null program.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ub0Row {
    pub block: usize,
    pub anchor: usize,
    pub other: usize,
    pub rhs: f64,
}

/// The relaxation of the null program over `u_2, ..., u_k` with
/// `u_1 = -(u_2 + ... + u_k)` substituted, keeping for every block the
/// two-index rows that follow from `sum_i u_i = 0` and the tuples in which
/// all but one index coincide.
#[derive(Debug, Clone)]
pub struct Ub0Program {
    n: usize,
    k: usize,
    rows: Vec<Ub0Row>,
    sf: StandardForm,
    bound: f64,
    opts: SolverOptions,
}

pub fn build_ub0(support: &SupportSpace, k: usize) -> Result<Ub0Program> {
    if k < 2 {
        return Err(Error::InvalidSize(format!("k must be at least 2, got {k}")));
    }
    let n = support.len();
    let mut rows = Vec::with_capacity(k * n * n.saturating_sub(1));
    for block in 0..k {
        for anchor in 0..n {
            for other in 0..n {
                if other != anchor {
                    let rhs = pair_cost(support, k, anchor, other)?;
                    rows.push(Ub0Row { block, anchor, other, rhs });
                }
            }
        }
    }
    // free entries: (u_i)_j for i >= 1 and j >= 1
    let free = (k - 1) * (n - 1);
    let reduced = |block: usize, j: usize| (j > 0).then(|| (block - 1) * (n - 1) + (j - 1));
    let bound = box_for(support);
    let mut sf = StandardForm::with_capacity(free, rows.len() + 2 * free, 0);
    for r in &rows {
        let mut col = Vec::new();
        let blocks: Vec<(usize, f64)> = if r.block == 0 {
            (1..k).map(|b| (b, -1.0)).collect()
        } else {
            vec![(r.block, 1.0)]
        };
        for (b, s) in blocks {
            if let Some(v) = reduced(b, r.anchor) {
                col.push((v, s));
            }
            if let Some(v) = reduced(b, r.other) {
                col.push((v, -s));
            }
        }
        sf.push_column(col, r.rhs, false);
    }
    box_columns(&mut sf, free, bound);
    Ok(Ub0Program {
        n,
        k,
        rows,
        sf,
        bound,
        opts: SolverOptions::default(),
    })
}

impl Ub0Program {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Variables `u_2, ..., u_k`, before pinning.
    pub fn num_vars(&self) -> usize {
        (self.k - 1) * self.n
    }

    pub fn rows(&self) -> &[Ub0Row] {
        &self.rows
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Coefficients of a row over `u_2, ..., u_k`, variable `(i - 1) N + j`
    /// for block `i >= 1`.
    pub fn coefficients(&self, row: &Ub0Row) -> Vec<(usize, f64)> {
        let n = self.n;
        let mut out = Vec::new();
        let blocks: Vec<(usize, f64)> = if row.block == 0 {
            (1..self.k).map(|b| (b, -1.0)).collect()
        } else {
            vec![(row.block, 1.0)]
        };
        for (b, s) in blocks {
            out.push(((b - 1) * n + row.anchor, s));
            out.push(((b - 1) * n + row.other, -s));
        }
        out
    }

    pub fn solve(&self, g: &[Vec<f64>], a: &[f64]) -> Result<LimitSolution> {
        check_directions(g, a, self.k, self.n)?;
        let n = self.n;
        let s1 = a[0].sqrt();
        let mut b = vec![0.0; self.sf.rows()];
        for i in 1..self.k {
            let si = a[i].sqrt();
            for j in 1..n {
                b[(i - 1) * (n - 1) + (j - 1)] = si * g[i][j] - s1 * g[0][j];
            }
        }
        let out = simplex(&self.sf, &b, &self.opts);
        if out.status != LpStatus::Optimal {
            return Err(failure("relaxed null program", out.status, out.iterations));
        }
        if out.y.iter().any(|v| v.abs() >= self.bound * (1.0 - 1e-9)) {
            return Err(Error::SolverFailure {
                reason: "relaxed null program reached its box".into(),
                iterations: out.iterations,
                rows: self.rows.len(),
            });
        }
        let value: f64 = b.iter().zip(&out.y).map(|(p, q)| p * q).sum();
        let mut blocks = vec![vec![0.0; n]; self.k];
        for i in 1..self.k {
            for j in 1..n {
                blocks[i][j] = out.y[(i - 1) * (n - 1) + (j - 1)];
            }
        }
        for j in 0..n {
            blocks[0][j] = -(1..self.k).map(|i| blocks[i][j]).sum::<f64>();
        }
        Ok(LimitSolution {
            value: value.max(0.0),
            dual: DualVector { blocks },
        })
    }

    pub fn value(&self, g: &[Vec<f64>], a: &[f64]) -> Result<f64> {
        Ok(self.solve(g, a)?.value)
    }

    pub fn sample<R: Rng + ?Sized>(&self, weights: &[f64], a: &[f64], rng: &mut R) -> Result<f64> {
        let g = null_directions(weights, self.k, rng);
        self.value(&g, a)
    }
}

/// One draw of the relaxation `UB_0` for the first measure `mu1`.
pub fn sample_ub0<R: Rng + ?Sized>(mu1: &Measure, a: &[f64], k: usize, rng: &mut R) -> Result<f64> {
    build_ub0(mu1.support(), k)?.sample(mu1.weights(), a, rng)
}

/// `X_0` and `UB_0` evaluated on one shared draw.
pub fn sample_coupled<R: Rng + ?Sized>(
    x0: &NullLimitProgram,
    ub0: &Ub0Program,
    weights: &[f64],
    a: &[f64],
    rng: &mut R,
) -> Result<(f64, f64)> {
    let g = null_directions(weights, x0.k(), rng);
    Ok((x0.value(&g, a)?, ub0.value(&g, a)?))
}

/// Standard deviation of the Gaussian limit objective at a fixed dual vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NlbSpec {
    pub sigma: f64,
}

/// `sigma^2 = sum_i a_i u_i' (diag(mu_i) - mu_i mu_i') u_i`.
pub fn nlb_sigma(u_star: &DualVector, collection: &MeasureCollection, a: &[f64]) -> NlbSpec {
    let var: f64 = u_star
        .blocks
        .iter()
        .zip(collection.measures())
        .zip(a)
        .map(|((u, m), &ai)| {
            let w = m.weights();
            let mean: f64 = u.iter().zip(w).map(|(x, p)| x * p).sum();
            let second: f64 = u.iter().zip(w).map(|(x, p)| x * x * p).sum();
            ai * (second - mean * mean).max(0.0)
        })
        .sum();
    NlbSpec { sigma: var.sqrt() }
}

/// Value of the limiting objective at a fixed dual vector.
pub fn fixed_dual_objective(u: &DualVector, g: &[Vec<f64>], a: &[f64]) -> f64 {
    u.blocks
        .iter()
        .zip(g)
        .zip(a)
        .map(|((ui, gi), &ai)| ai.sqrt() * ui.iter().zip(gi).map(|(x, y)| x * y).sum::<f64>())
        .sum()
}

/// The general limit program `max_{u in Phi*} sum_i sqrt(a_i) <u_i, g_i>`,
/// where `Phi*` is the dual optimal set of one collection. Optimality is
/// imposed as `<u, mu> >= MOT(mu) - slack`.
#[derive(Debug, Clone)]
pub struct AlternativeLimitProgram {
    support: Arc<SupportSpace>,
    layout: DualLayout,
    sf: Option<StandardForm>,
    level_row: Vec<(usize, f64)>,
    level_rhs: f64,
    bound: f64,
    opts: MotOptions,
}

/// Default slack in the optimality constraint of the alternative program.
pub const OPTIMALITY_SLACK: f64 = 1e-9;

/// Column-family wrapper adding a few explicit rows in front of the tuples.
struct WithExtraRows<'a> {
    extra: Vec<(Vec<(usize, f64)>, f64)>,
    base: TupleFamily<'a>,
}

impl ConstraintFamily for WithExtraRows<'_> {
    fn num_vars(&self) -> usize {
        self.base.num_vars()
    }

    fn len(&self) -> usize {
        self.extra.len() + self.base.len()
    }

    fn row(&self, index: usize) -> (Vec<(usize, f64)>, f64) {
        match self.extra.get(index) {
            Some(r) => r.clone(),
            None => self.base.row(index - self.extra.len()),
        }
    }

    fn most_violated(&self, u: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, (coeffs, rhs)) in self.extra.iter().enumerate() {
            let v = coeffs.iter().map(|&(j, a)| a * u[j]).sum::<f64>() - rhs;
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        if let Some((i, v)) = self.base.most_violated(u) {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i + self.extra.len(), v));
            }
        }
        best
    }
}

impl AlternativeLimitProgram {
    pub fn new(collection: &MeasureCollection, mot: &MotSolution) -> Result<Self> {
        AlternativeLimitProgram::with_options(collection, mot, OPTIMALITY_SLACK, &MotOptions::default())
    }

    pub fn with_options(
        collection: &MeasureCollection,
        mot: &MotSolution,
        slack: f64,
        opts: &MotOptions,
    ) -> Result<Self> {
        let support = collection.support().clone();
        let (n, k) = (support.len(), collection.k());
        let layout = DualLayout::new(n, k);
        let mut level_row = Vec::new();
        for (i, m) in collection.measures().iter().enumerate() {
            for (j, &w) in m.weights().iter().enumerate() {
                if let Some(v) = layout.var(i, j) {
                    if w != 0.0 {
                        level_row.push((v, -w));
                    }
                }
            }
        }
        let level_rhs = -(mot.value - slack);
        // entries where a measure has no mass are unconstrained from below
        // but carry no objective weight; the box only has to hold the rest
        let bound = 100.0 * (support.diameter_sq() + 1.0);
        let count = tuple_count(n, k);
        let dense = opts.mode != SolveMode::Lazy && count.is_some_and(|c| c <= opts.dense_limit);
        let sf = if dense {
            let c = build_cost_tensor(&support, k, opts.dense_limit)?;
            let rows = layout.num_vars();
            let mut sf = StandardForm::with_capacity(rows, c.entries().len() + 1 + 2 * rows, 0);
            sf.push_column(level_row.iter().copied(), level_rhs, false);
            let mut t = vec![0usize; k];
            for (idx, &cost) in c.entries().iter().enumerate() {
                decode_tuple(idx, n, &mut t);
                sf.push_column(layout.tuple_row(&t), cost, false);
            }
            box_columns(&mut sf, rows, bound);
            Some(sf)
        } else {
            if !count.is_some_and(|c| c <= opts.enumeration_limit) {
                return Err(Error::BudgetExceeded {
                    required: (n as u128).saturating_pow(k as u32),
                    budget: opts.enumeration_limit as u128,
                });
            }
            None
        };
        Ok(AlternativeLimitProgram {
            support,
            layout,
            sf,
            level_row,
            level_rhs,
            bound,
            opts: opts.clone(),
        })
    }

    pub fn k(&self) -> usize {
        self.layout.k()
    }

    pub fn solve(&self, g: &[Vec<f64>], a: &[f64]) -> Result<LimitSolution> {
        check_directions(g, a, self.k(), self.support.len())?;
        let mut b = vec![0.0; self.layout.num_vars()];
        for (i, gi) in g.iter().enumerate() {
            let s = a[i].sqrt();
            for (j, &x) in gi.iter().enumerate() {
                if let Some(v) = self.layout.var(i, j) {
                    b[v] = s * x;
                }
            }
        }
        let y = match &self.sf {
            Some(sf) => {
                let out = simplex(sf, &b, &self.opts.solver);
                if out.status != LpStatus::Optimal {
                    return Err(failure("alternative limit program", out.status, out.iterations));
                }
                out.y
            }
            None => {
                let fam = WithExtraRows {
                    extra: vec![(self.level_row.clone(), self.level_rhs)],
                    base: TupleFamily::new(&self.support, self.k(), None),
                };
                let mut seeds: Vec<usize> = vec![0];
                seeds.extend(fam.base.seed_rows().into_iter().map(|i| i + 1));
                let mut caps = self.opts.lazy.clone();
                caps.initial_box = self.bound;
                solve_lazy(&b, &[], &fam, &seeds, &caps, &self.opts.solver)?
                    .into_optimal()?
                    .primal
            }
        };
        let value: f64 = b.iter().zip(&y).map(|(p, q)| p * q).sum();
        Ok(LimitSolution {
            value,
            dual: DualVector {
                blocks: self.layout.expand(&y),
            },
        })
    }

    pub fn value(&self, g: &[Vec<f64>], a: &[f64]) -> Result<f64> {
        Ok(self.solve(g, a)?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_stream;

    fn line(xs: &[f64]) -> Arc<SupportSpace> {
        Arc::new(SupportSpace::from_scalars(xs).unwrap())
    }

    #[test]
    fn rate_examples() {
        let r = rate(&[100, 100]).unwrap();
        assert!((r.rho_n - 50f64.sqrt()).abs() < 1e-12);
        let oracle = (100.0 * 100.0 / 200.0f64).sqrt();
        assert!((r.rho_n - oracle).abs() < 1e-12);
        let r = rate(&[90, 90, 90]).unwrap();
        assert!((r.rho_n - 10f64.sqrt()).abs() < 1e-12);
        let r = rate(&[100, 300]).unwrap();
        assert!((r.lambda[0] - 0.25).abs() < 1e-15 && (r.a[0] - 0.75).abs() < 1e-15);
        assert!((r.a[1] - 0.25).abs() < 1e-15);
        assert!(rate(&[3]).is_err());
        assert!(rate(&[3, 0]).is_err());
    }

    #[test]
    fn null_program_two_point_closed_form() {
        let s = line(&[5.0, 10.0]);
        let p = NullLimitProgram::new(s, 2).unwrap();
        let g = vec![vec![0.3, -0.3], vec![-0.1, 0.1]];
        let a = [0.5, 0.5];
        let h = 0.5f64.sqrt() * 0.3 - 0.5f64.sqrt() * (-0.1);
        assert!((p.value(&g, &a).unwrap() - 6.25 * h.abs()).abs() < 1e-12);
        assert!((6.25 * h.abs() - 1.767766952966369).abs() < 1e-12);
    }

    #[test]
    fn point_mass_gives_zero() {
        let s = line(&[0.0, 1.0, 3.0]);
        let mu = Measure::dirac(s.clone(), 1).unwrap();
        let mut rng = replicate_stream(1, 2, 3);
        assert_eq!(sample_x0(&mu, &[0.25, 0.25, 0.25], 3, &mut rng).unwrap(), 0.0);
        assert_eq!(sample_ub0(&mu, &[0.25, 0.25, 0.25], 3, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn ub0_shape() {
        let s = line(&[5.0, 10.0]);
        let u = build_ub0(&s, 3).unwrap();
        assert_eq!((u.num_rows(), u.num_vars()), (6, 4));
        let s3 = line(&[0.0, 1.0, 2.5]);
        let u = build_ub0(&s3, 4).unwrap();
        assert_eq!((u.num_rows(), u.num_vars()), (24, 9));
    }

    #[test]
    fn nlb_sigma_zero_dual() {
        let s = line(&[5.0, 10.0]);
        let c = MeasureCollection::without_sizes(vec![
            Measure::new(s.clone(), vec![0.5, 0.5]).unwrap(),
            Measure::dirac(s, 0).unwrap(),
        ])
        .unwrap();
        assert_eq!(nlb_sigma(&DualVector::zeros(2, 2), &c, &[0.5, 0.5]).sigma, 0.0);
    }
}
