//! Multimarginal optimal transport with the variance cost: program data,
//! primal/dual solves, and the two-measure Wasserstein special case.

mod cost;
mod family;
mod marginal;

pub use cost::{
    build_cost_tensor, decode_tuple, encode_tuple, pair_cost, tuple_cost, tuple_count, CostTensor,
};
pub use family::{DualLayout, TupleFamily};
pub use marginal::{build_marginal_matrix, MarginalMatrix};

use crate::error::{Error, Result};
use crate::lp::{
    simplex, solve_dense, solve_lazy, LazyCaps, LinearProgram, LpStatus, RowKind, Sense,
    SolverOptions, StandardForm,
};
use crate::support::{Measure, MeasureCollection, SupportSpace};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Dense primal solves are used up to this many tuples.
pub const DEFAULT_DENSE_LIMIT: usize = 1_000_000;
/// Row generation enumerates at most this many tuples per separation query.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Auto,
    Dense,
    Lazy,
}

#[derive(Debug, Clone)]
pub struct MotOptions {
    pub mode: SolveMode,
    pub dense_limit: usize,
    pub enumeration_limit: usize,
    pub solver: SolverOptions,
    pub lazy: LazyCaps,
}

impl Default for MotOptions {
    fn default() -> Self {
        MotOptions {
            mode: SolveMode::Auto,
            dense_limit: DEFAULT_DENSE_LIMIT,
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
            solver: SolverOptions::default(),
            lazy: LazyCaps::default(),
        }
    }
}

/// Dual vector `u = (u_1, ..., u_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualVector {
    pub blocks: Vec<Vec<f64>>,
}

impl DualVector {
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn flat(&self) -> Vec<f64> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn zeros(k: usize, n: usize) -> Self {
        DualVector {
            blocks: vec![vec![0.0; n]; k],
        }
    }

    /// `<u, mu>`.
    pub fn objective(&self, collection: &MeasureCollection) -> f64 {
        self.blocks
            .iter()
            .zip(collection.measures())
            .map(|(u, m)| u.iter().zip(m.weights()).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }

    /// `max_t ((A'u)_t - c_t)`, by enumeration.
    pub fn max_violation(&self, support: &SupportSpace) -> f64 {
        let fam = TupleFamily::new(support, self.k(), None);
        let mut worst = f64::NEG_INFINITY;
        let mut t = vec![0usize; self.k()];
        let d = support.sq_dist_matrix();
        for idx in 0..crate::lp::ConstraintFamily::len(&fam) {
            decode_tuple(idx, support.len(), &mut t);
            let lhs: f64 = t.iter().enumerate().map(|(i, &j)| self.blocks[i][j]).sum();
            worst = worst.max(lhs - tuple_cost(&d, &t));
        }
        worst
    }

    pub fn block_sum(&self) -> Vec<f64> {
        let n = self.blocks[0].len();
        (0..n).map(|j| self.blocks.iter().map(|b| b[j]).sum()).collect()
    }
}

/// Shifts constants between blocks so that the first entry of `u_2..u_k`
/// is zero; `u_1` absorbs the shifts. The dual objective and feasibility are
/// unchanged, and when `sum_i u_i = 0` the first entry of `u_1` becomes zero.
pub fn normalize_dual(u: &DualVector) -> DualVector {
    let mut blocks = u.blocks.clone();
    let mut total = 0.0;
    for b in blocks.iter_mut().skip(1) {
        let s = b[0];
        total += s;
        b.iter_mut().for_each(|v| *v -= s);
    }
    blocks[0].iter_mut().for_each(|v| *v += total);
    DualVector { blocks }
}

/// Joint law on `N^k` tuples, dense.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multicoupling {
    pub pi: Vec<f64>,
}

impl Multicoupling {
    /// Tuples with mass above `tol`, largest first.
    pub fn support_entries(&self, n: usize, k: usize, tol: f64) -> Vec<(Vec<usize>, f64)> {
        let mut out: Vec<(Vec<usize>, f64)> = self
            .pi
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > tol)
            .map(|(i, &p)| {
                let mut t = vec![0; k];
                decode_tuple(i, n, &mut t);
                (t, p)
            })
            .collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub mode: SolveMode,
    pub iterations: usize,
    pub rows_generated: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MotSolution {
    pub value: f64,
    /// `None` in lazy mode, where the `N^k` coupling is not materialized.
    pub coupling: Option<Multicoupling>,
    pub dual: DualVector,
    pub lazy: bool,
    pub stats: SolverStats,
}

/// Reusable solver for one support and one `k`.
#[derive(Debug, Clone)]
pub struct MotSolver {
    support: Arc<SupportSpace>,
    k: usize,
    layout: DualLayout,
    mode: SolveMode,
    costs: Option<Arc<CostTensor>>,
    primal: Option<StandardForm>,
    opts: MotOptions,
}

impl MotSolver {
    pub fn new(support: Arc<SupportSpace>, k: usize, opts: MotOptions) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidSize(format!("k must be at least 2, got {k}")));
        }
        let n = support.len();
        let count = tuple_count(n, k);
        let fits = |limit: usize| count.is_some_and(|c| c <= limit);
        let mode = match opts.mode {
            SolveMode::Auto | SolveMode::Dense if fits(opts.dense_limit) => SolveMode::Dense,
            SolveMode::Dense => {
                return Err(Error::BudgetExceeded {
                    required: (n as u128).saturating_pow(k as u32),
                    budget: opts.dense_limit as u128,
                })
            }
            _ if fits(opts.enumeration_limit) => SolveMode::Lazy,
            _ => {
                return Err(Error::BudgetExceeded {
                    required: (n as u128).saturating_pow(k as u32),
                    budget: opts.enumeration_limit as u128,
                })
            }
        };
        let costs = if fits(opts.dense_limit) {
            Some(Arc::new(build_cost_tensor(&support, k, opts.dense_limit)?))
        } else {
            None
        };
        let layout = DualLayout::new(n, k);
        let primal = match (&costs, mode) {
            (Some(c), SolveMode::Dense) => Some(primal_form(layout, c)),
            _ => None,
        };
        Ok(MotSolver {
            support,
            k,
            layout,
            mode,
            costs,
            primal,
            opts,
        })
    }

    pub fn support(&self) -> &Arc<SupportSpace> {
        &self.support
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mode(&self) -> SolveMode {
        self.mode
    }

    pub fn costs(&self) -> Option<&Arc<CostTensor>> {
        self.costs.as_ref()
    }

    pub fn layout(&self) -> DualLayout {
        self.layout
    }

    fn check(&self, collection: &MeasureCollection) -> Result<()> {
        if collection.k() != self.k {
            return Err(Error::InvalidInput(format!(
                "solver built for k = {}, collection has {}",
                self.k,
                collection.k()
            )));
        }
        if **collection.support() != *self.support {
            return Err(Error::SupportMismatch);
        }
        Ok(())
    }

    fn rhs(&self, collection: &MeasureCollection) -> Vec<f64> {
        let mut b = vec![0.0; self.layout.num_vars()];
        for (i, m) in collection.measures().iter().enumerate() {
            for (j, &w) in m.weights().iter().enumerate() {
                if let Some(v) = self.layout.var(i, j) {
                    b[v] = w;
                }
            }
        }
        b
    }

    pub fn solve(&self, collection: &MeasureCollection) -> Result<MotSolution> {
        self.check(collection)?;
        match self.mode {
            SolveMode::Dense => self.solve_dense(collection),
            _ => self.solve_lazy(collection),
        }
    }

    /// Optimal value only.
    pub fn value(&self, collection: &MeasureCollection) -> Result<f64> {
        Ok(self.solve(collection)?.value)
    }

    fn solve_dense(&self, collection: &MeasureCollection) -> Result<MotSolution> {
        let sf = self.primal.as_ref().expect("dense form present in dense mode");
        let b = self.rhs(collection);
        let out = simplex(sf, &b, &self.opts.solver);
        if out.status != LpStatus::Optimal {
            return Err(Error::SolverFailure {
                reason: format!("primal MOT program ended {:?}", out.status),
                iterations: out.iterations,
                rows: 0,
            });
        }
        let dual = DualVector {
            blocks: self.layout.expand(&out.y),
        };
        Ok(MotSolution {
            value: out.objective.max(0.0),
            coupling: Some(Multicoupling { pi: out.x }),
            dual,
            lazy: false,
            stats: SolverStats {
                mode: SolveMode::Dense,
                iterations: out.iterations,
                rows_generated: 0,
            },
        })
    }

    fn solve_lazy(&self, collection: &MeasureCollection) -> Result<MotSolution> {
        let fam = TupleFamily::new(&self.support, self.k, self.costs.as_deref());
        let objective = self.rhs(collection);
        let seeds = fam.seed_rows();
        let mut caps = self.opts.lazy.clone();
        caps.initial_box = caps.initial_box.max(4.0 * self.support.diameter_sq() + 1.0);
        let sol = solve_lazy(&objective, &[], &fam, &seeds, &caps, &self.opts.solver)?.into_optimal()?;
        let dual = DualVector {
            blocks: self.layout.expand(&sol.primal),
        };
        Ok(MotSolution {
            value: dual.objective(collection).max(0.0),
            coupling: None,
            dual,
            lazy: true,
            stats: SolverStats {
                mode: SolveMode::Lazy,
                iterations: sol.iterations,
                rows_generated: sol.rows_generated,
            },
        })
    }
}

/// Primal program `min <c, pi>, A pi = mu, pi >= 0` without the pinned rows.
fn primal_form(layout: DualLayout, costs: &CostTensor) -> StandardForm {
    let (n, k) = (layout.n(), layout.k());
    let cols = costs.entries().len();
    let mut sf = StandardForm::with_capacity(layout.num_vars(), cols, cols * k);
    let mut t = vec![0usize; k];
    for (idx, &c) in costs.entries().iter().enumerate() {
        decode_tuple(idx, n, &mut t);
        sf.push_column(layout.tuple_row(&t), c, false);
    }
    sf
}

/// Solves MOT for a collection with default options.
pub fn solve_mot(collection: &MeasureCollection) -> Result<MotSolution> {
    solve_mot_with(collection, &MotOptions::default())
}

pub fn solve_mot_with(collection: &MeasureCollection, opts: &MotOptions) -> Result<MotSolution> {
    MotSolver::new(collection.support().clone(), collection.k(), opts.clone())?.solve(collection)
}

/// Squared 2-Wasserstein distance by the two-marginal transport program with
/// cost `|x - y|^2`.
pub fn w2_squared(mu: &Measure, nu: &Measure) -> Result<f64> {
    if **mu.support() != **nu.support() {
        return Err(Error::SupportMismatch);
    }
    let s = mu.support();
    let n = s.len();
    let cost: Vec<f64> = (0..n * n).map(|p| s.sq_dist(p / n, p % n)).collect();
    let mut lp = LinearProgram::new(Sense::Minimize, cost);
    for i in 0..n {
        lp.add_row((0..n).map(|j| (i * n + j, 1.0)).collect(), RowKind::Eq, mu.weights()[i]);
    }
    for j in 0..n {
        lp.add_row((0..n).map(|i| (i * n + j, 1.0)).collect(), RowKind::Eq, nu.weights()[j]);
    }
    let sol = solve_dense(&lp, &SolverOptions::default())?.into_optimal()?;
    Ok(sol.objective.max(0.0))
}

/// Regularity of the multitransportation polytope: with each `mu_i` sorted
/// decreasingly, the largest entries strictly increase in `i` and
/// `mu_i^N + sum_{j > i} mu_j^1 > k - i` for `i = 1, ..., k-1`.
pub fn check_regularity(collection: &MeasureCollection) -> bool {
    let k = collection.k();
    let sorted: Vec<Vec<f64>> = collection
        .measures()
        .iter()
        .map(|m| {
            let mut w = m.weights().to_vec();
            w.sort_by(|a, b| b.total_cmp(a));
            w
        })
        .collect();
    for i in 0..k - 1 {
        if sorted[i][0] >= sorted[i + 1][0] {
            return false;
        }
    }
    for i in 0..k - 1 {
        let smallest = *sorted[i].last().expect("nonempty support");
        let tail: f64 = sorted[i + 1..].iter().map(|w| w[0]).sum();
        // positions are 1-based in the inequality
        if smallest + tail <= (k - (i + 1)) as f64 {
            return false;
        }
    }
    true
}

/// Entrywise bounds on a normalized dual vector whose blocks sum to zero:
/// `|(u_i)_j| <= ((k-1)/k^2) |x_1 - x_j|^2`.
pub fn dual_entry_bounds(support: &SupportSpace, k: usize) -> Vec<f64> {
    let scale = (k - 1) as f64 / (k * k) as f64;
    (0..support.len()).map(|j| scale * support.sq_dist(0, j)).collect()
}

/// Push-forward of the coupling under the tuple mean: barycenter atoms and
/// their masses, heaviest first.
pub fn barycenter_pushforward(
    support: &SupportSpace,
    k: usize,
    coupling: &Multicoupling,
    tol: f64,
) -> Vec<(Vec<f64>, f64)> {
    let mut atoms: Vec<(Vec<f64>, f64)> = Vec::new();
    for (tuple, mass) in coupling.support_entries(support.len(), k, tol) {
        let mut mean = vec![0.0; support.dim()];
        for &t in &tuple {
            for (m, x) in mean.iter_mut().zip(support.point(t)) {
                *m += x / k as f64;
            }
        }
        match atoms.iter_mut().find(|(p, _)| *p == mean) {
            Some(a) => a.1 += mass,
            None => atoms.push((mean, mass)),
        }
    }
    atoms.sort_by(|a, b| b.1.total_cmp(&a.1));
    atoms
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Arc<SupportSpace> {
        Arc::new(SupportSpace::from_scalars(&[5.0, 10.0]).unwrap())
    }

    fn coll(s: &Arc<SupportSpace>, ws: &[&[f64]]) -> MeasureCollection {
        MeasureCollection::without_sizes(
            ws.iter().map(|w| Measure::new(s.clone(), w.to_vec()).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_measures_cost_nothing() {
        let s = line();
        let c = coll(&s, &[&[0.3, 0.7], &[0.3, 0.7], &[0.3, 0.7]]);
        let sol = solve_mot(&c).unwrap();
        assert!(sol.value.abs() < 1e-12);
        let pi = &sol.coupling.unwrap().pi;
        assert!((pi[0] - 0.3).abs() < 1e-12 && (pi[7] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn two_diracs() {
        let s = line();
        let c = coll(&s, &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!((solve_mot(&c).unwrap().value - 6.25).abs() < 1e-12);
    }

    #[test]
    fn sparse_three_diracs() {
        let s = line();
        let c = coll(&s, &[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let sol = solve_mot(&c).unwrap();
        assert!((sol.value - 50.0 / 9.0).abs() < 1e-12);
        assert!((sol.dual.objective(&c) - sol.value).abs() < 1e-10);
        assert!(sol.dual.max_violation(&s) < 1e-9);
    }

    #[test]
    fn w2_examples() {
        let s = line();
        let a = Measure::new(s.clone(), vec![0.5, 0.5]).unwrap();
        let b = Measure::new(s.clone(), vec![1.0, 0.0]).unwrap();
        let d5 = Measure::dirac(s.clone(), 0).unwrap();
        let d10 = Measure::dirac(s.clone(), 1).unwrap();
        assert!(w2_squared(&a, &a).unwrap().abs() < 1e-12);
        assert!((w2_squared(&d5, &d10).unwrap() - 25.0).abs() < 1e-12);
        assert!((w2_squared(&a, &b).unwrap() - 12.5).abs() < 1e-12);
        let other = Arc::new(SupportSpace::from_scalars(&[5.0, 11.0]).unwrap());
        let c = Measure::new(other, vec![0.5, 0.5]).unwrap();
        assert_eq!(w2_squared(&a, &c).unwrap_err(), Error::SupportMismatch);
    }

    #[test]
    fn lazy_agrees_with_dense_small() {
        let s = Arc::new(SupportSpace::from_scalars(&[0.0, 1.0, 3.0]).unwrap());
        let c = coll(&s, &[&[0.2, 0.5, 0.3], &[0.6, 0.1, 0.3], &[0.1, 0.1, 0.8]]);
        let dense = solve_mot(&c).unwrap();
        let lazy = solve_mot_with(
            &c,
            &MotOptions {
                mode: SolveMode::Lazy,
                ..MotOptions::default()
            },
        )
        .unwrap();
        assert!(lazy.lazy && lazy.coupling.is_none());
        assert!((dense.value - lazy.value).abs() < 1e-9, "{} {}", dense.value, lazy.value);
    }

    #[test]
    fn normalization_keeps_objective() {
        let s = line();
        let c = coll(&s, &[&[0.5, 0.5], &[1.0, 0.0], &[0.2, 0.8]]);
        let u = DualVector {
            blocks: vec![vec![1.0, -2.0], vec![0.5, 3.0], vec![-1.5, 0.25]],
        };
        let v = normalize_dual(&u);
        assert_eq!(v.blocks[1][0], 0.0);
        assert_eq!(v.blocks[2][0], 0.0);
        assert!((u.objective(&c) - v.objective(&c)).abs() < 1e-12);
        assert_eq!(normalize_dual(&v), v);
    }

    #[test]
    fn regularity_predicate() {
        let s = Arc::new(SupportSpace::from_scalars(&[0.0, 1.0, 2.0]).unwrap());
        let same = coll(&s, &[&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]]);
        assert!(!check_regularity(&same));
        // largest entries 0.5 < 0.85, and 0.2 + 0.85 > 1
        let reg = coll(&s, &[&[0.2, 0.3, 0.5], &[0.85, 0.1, 0.05]]);
        assert!(check_regularity(&reg));
        // ordering holds but 0.1 + 0.6 <= 1
        let part = coll(&s, &[&[0.1, 0.4, 0.5], &[0.6, 0.3, 0.1]]);
        assert!(!check_regularity(&part));
    }
}
