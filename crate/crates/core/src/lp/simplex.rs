//! Revised primal simplex on `min c'x, Ax = b` with nonnegative or free
//! columns. The basis inverse is kept dense (the programs solved here have
//! at most a few hundred rows) while columns are stored sparse, so pricing
//! costs one pass over the nonzeros.

use super::{LpStatus, SolverOptions};

/// Column-compressed constraint matrix with costs and column kinds.
#[derive(Debug, Clone)]
pub struct StandardForm {
    rows: usize,
    col_start: Vec<usize>,
    col_rows: Vec<u32>,
    col_vals: Vec<f64>,
    cost: Vec<f64>,
    free: Vec<bool>,
    /// Cost magnitude used to scale the optimality tolerance, when the
    /// largest cost belongs to big-M columns.
    cost_scale: Option<f64>,
}

impl StandardForm {
    pub fn new(rows: usize) -> Self {
        StandardForm {
            rows,
            col_start: vec![0],
            col_rows: Vec::new(),
            col_vals: Vec::new(),
            cost: Vec::new(),
            free: Vec::new(),
            cost_scale: None,
        }
    }

    pub fn with_capacity(rows: usize, cols: usize, nnz: usize) -> Self {
        let mut sf = StandardForm::new(rows);
        sf.col_start.reserve(cols);
        sf.col_rows.reserve(nnz);
        sf.col_vals.reserve(nnz);
        sf.cost.reserve(cols);
        sf.free.reserve(cols);
        sf
    }

    /// Appends a column; entries must reference rows `< self.rows()`.
    pub fn push_column<I>(&mut self, entries: I, cost: f64, free: bool) -> usize
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        for (r, v) in entries {
            debug_assert!(r < self.rows);
            if v != 0.0 {
                self.col_rows.push(r as u32);
                self.col_vals.push(v);
            }
        }
        self.col_start.push(self.col_rows.len());
        self.cost.push(cost);
        self.free.push(free);
        self.cost.len() - 1
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cost.len()
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn set_cost(&mut self, j: usize, c: f64) {
        self.cost[j] = c;
    }

    #[inline]
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.col_start[j], self.col_start[j + 1]);
        self.col_rows[a..b]
            .iter()
            .zip(&self.col_vals[a..b])
            .map(|(&r, &v)| (r as usize, v))
    }

    fn max_abs_cost(&self) -> f64 {
        self.cost.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Appends the columns `+e_r` and `-e_r` with cost `bound` for every row,
    /// i.e. the box `|y_r| <= bound` on the duals. The optimality tolerance
    /// stays scaled by the costs present before the call.
    pub fn push_box_columns(&mut self, bound: f64) {
        if self.cost_scale.is_none() {
            self.cost_scale = Some(self.max_abs_cost());
        }
        for r in 0..self.rows {
            self.push_column([(r, 1.0)], bound, false);
            self.push_column([(r, -1.0)], bound, false);
        }
    }

    fn tolerance_scale(&self) -> f64 {
        self.cost_scale.unwrap_or_else(|| self.max_abs_cost())
    }
}

/// Raw simplex result in standard-form coordinates.
#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

const ARTIFICIAL_PENALTY: f64 = 1.0;

struct Engine<'a> {
    sf: &'a StandardForm,
    b: &'a [f64],
    opts: &'a SolverOptions,
    m: usize,
    n: usize,
    /// Sign of the artificial column of each row (so that the start is feasible).
    art_sign: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    phase_cost: Vec<f64>,
    phase_one: bool,
    iterations: usize,
    since_refactor: usize,
    degenerate_streak: usize,
    feas_tol: f64,
    opt_tol: f64,
    cursor: usize,
    window: usize,
    // scratch
    y: Vec<f64>,
    w: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pricing {
    Partial,
    Full,
    Bland,
}

/// Smallest partial-pricing window.
const MIN_PRICING_WINDOW: usize = 256;

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl<'a> Engine<'a> {
    fn new(sf: &'a StandardForm, b: &'a [f64], opts: &'a SolverOptions) -> Self {
        let m = sf.rows();
        let n = sf.cols();
        let bnorm = b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let cscale = sf.tolerance_scale().max(1.0);
        Engine {
            sf,
            b,
            opts,
            m,
            n,
            art_sign: b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect(),
            basis: Vec::with_capacity(m),
            in_basis: vec![false; n + m],
            binv: vec![0.0; m * m],
            xb: vec![0.0; m],
            phase_cost: vec![0.0; n + m],
            phase_one: true,
            iterations: 0,
            since_refactor: 0,
            degenerate_streak: 0,
            feas_tol: opts.feasibility_tol * bnorm,
            opt_tol: opts.optimality_tol * cscale,
            cursor: 0,
            window: MIN_PRICING_WINDOW.max(n / 16),
            y: vec![0.0; m],
            w: vec![0.0; m],
        }
    }

    #[inline]
    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n
    }

    fn for_column<F: FnMut(usize, f64)>(&self, j: usize, mut f: F) {
        if j >= self.n {
            let r = j - self.n;
            f(r, self.art_sign[r]);
        } else {
            for (r, v) in self.sf.column(j) {
                f(r, v);
            }
        }
    }

    /// Picks a starting basis: a singleton column of the right sign for each
    /// row where one exists, an artificial elsewhere.
    fn crash(&mut self) {
        let mut best: Vec<Option<(usize, f64)>> = vec![None; self.m];
        for j in 0..self.n {
            if self.sf.free[j] {
                continue;
            }
            let (a, e) = (self.sf.col_start[j], self.sf.col_start[j + 1]);
            if e - a != 1 {
                continue;
            }
            let r = self.sf.col_rows[a] as usize;
            let v = self.sf.col_vals[a];
            let ok = if self.b[r] == 0.0 { v > 0.0 } else { (self.b[r] > 0.0) == (v > 0.0) };
            if !ok {
                continue;
            }
            let c = self.sf.cost[j];
            match best[r] {
                Some((_, bc)) if bc <= c => {}
                _ => best[r] = Some((j, c)),
            }
        }
        self.basis.clear();
        for (r, choice) in best.into_iter().enumerate() {
            let j = match choice {
                Some((j, _)) => j,
                None => self.n + r,
            };
            self.basis.push(j);
            self.in_basis[j] = true;
        }
        self.refactor();
    }

    fn has_artificials(&self) -> bool {
        self.basis.iter().any(|&j| self.is_artificial(j))
    }

    /// Rebuilds the dense basis inverse by Gauss-Jordan with partial pivoting.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (p, &j) in self.basis.iter().enumerate() {
            self.for_column(j, |r, v| a[r * m + p] = v);
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv = col;
            let mut best = a[col * m + col].abs();
            for r in col + 1..m {
                let v = a[r * m + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-12 {
                return false;
            }
            if piv != col {
                for c in 0..m {
                    a.swap(col * m + c, piv * m + c);
                    inv.swap(col * m + c, piv * m + c);
                }
            }
            let d = a[col * m + col];
            for c in 0..m {
                a[col * m + c] /= d;
                inv[col * m + c] /= d;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = a[r * m + col];
                if f == 0.0 {
                    continue;
                }
                for c in 0..m {
                    a[r * m + c] -= f * a[col * m + c];
                    inv[r * m + c] -= f * inv[col * m + c];
                }
            }
        }
        self.binv = inv;
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            self.xb[i] = row.iter().zip(self.b).map(|(x, y)| x * y).sum();
        }
        self.since_refactor = 0;
        true
    }

    fn compute_duals(&mut self) {
        let m = self.m;
        self.y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &j) in self.basis.iter().enumerate() {
            let c = self.phase_cost[j];
            if c == 0.0 {
                continue;
            }
            let row = &self.binv[i * m..(i + 1) * m];
            for (yr, &bv) in self.y.iter_mut().zip(row) {
                *yr += c * bv;
            }
        }
    }

    #[inline]
    fn reduced_cost(&self, j: usize) -> f64 {
        let mut d = self.phase_cost[j];
        self.for_column(j, |r, v| d -= self.y[r] * v);
        d
    }

    fn compute_direction(&mut self, q: usize) {
        let m = self.m;
        self.w.iter_mut().for_each(|v| *v = 0.0);
        let mut entries: Vec<(usize, f64)> = Vec::new();
        self.for_column(q, |r, v| entries.push((r, v)));
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            self.w[i] = entries.iter().map(|&(r, v)| row[r] * v).sum();
        }
    }

    /// Scores column `j` as an entering candidate.
    #[inline]
    fn candidate(&self, j: usize) -> Option<(f64, f64)> {
        if self.in_basis[j] {
            return None;
        }
        let d = self.reduced_cost(j);
        if self.sf.free[j] {
            if d.abs() <= self.opt_tol {
                return None;
            }
            Some((d.abs(), if d < 0.0 { 1.0 } else { -1.0 }))
        } else if d >= -self.opt_tol {
            None
        } else {
            Some((-d, 1.0))
        }
    }

    /// Chooses the entering column and its direction (+1 increase, -1 decrease).
    ///
    /// Partial pricing scans windows of columns from a rotating cursor and
    /// stops at the first window holding a candidate; full pricing and
    /// Bland's rule scan everything.
    fn price(&mut self, mode: Pricing) -> Option<(usize, f64)> {
        let n = self.n;
        if n == 0 {
            return None;
        }
        if mode == Pricing::Bland {
            return (0..n).find_map(|j| self.candidate(j).map(|(_, dir)| (j, dir)));
        }
        let window = if mode == Pricing::Partial { self.window } else { n };
        let mut best: Option<(usize, f64, f64)> = None;
        let mut scanned = 0;
        let mut j = self.cursor;
        while scanned < n {
            let stop = scanned + window.min(n - scanned);
            while scanned < stop {
                if let Some((score, dir)) = self.candidate(j) {
                    match best {
                        Some((_, s, _)) if s >= score => {}
                        _ => best = Some((j, score, dir)),
                    }
                }
                j += 1;
                if j == n {
                    j = 0;
                }
                scanned += 1;
            }
            if best.is_some() {
                break;
            }
        }
        self.cursor = j;
        best.map(|(j, _, dir)| (j, dir))
    }

    fn step(&mut self) -> Step {
        self.compute_duals();
        let bland = self.degenerate_streak >= self.opts.degenerate_streak;
        let mode = if bland { Pricing::Bland } else { Pricing::Partial };
        let (q, dir) = match self.price(mode) {
            Some(e) => e,
            None => return Step::Optimal,
        };
        self.compute_direction(q);
        let piv_tol = self.opts.pivot_tol;
        // ratio test
        let mut leave: Option<usize> = None;
        let mut theta = f64::INFINITY;
        let mut leave_mag = 0.0;
        for i in 0..self.m {
            let j = self.basis[i];
            let wi = dir * self.w[i];
            let ratio;
            if self.is_artificial(j) && !self.phase_one {
                // artificials are fixed at zero once feasibility is reached
                if wi.abs() <= piv_tol {
                    continue;
                }
                ratio = 0.0;
            } else if j < self.n && self.sf.free[j] {
                continue;
            } else {
                if wi <= piv_tol {
                    continue;
                }
                ratio = self.xb[i].max(0.0) / wi;
            }
            let better = match leave {
                None => true,
                Some(l) => {
                    let tie = (ratio - theta).abs() <= 1e-12 * (1.0 + theta.abs());
                    if tie {
                        if bland {
                            self.basis[i] < self.basis[l]
                        } else {
                            wi.abs() > leave_mag
                        }
                    } else {
                        ratio < theta
                    }
                }
            };
            if better {
                leave = Some(i);
                theta = ratio;
                leave_mag = wi.abs();
            }
        }
        let p = match leave {
            Some(p) => p,
            None => return Step::Unbounded,
        };
        if theta <= self.feas_tol * 1e-3 {
            self.degenerate_streak += 1;
        } else {
            self.degenerate_streak = 0;
        }
        // update primal values
        for i in 0..self.m {
            if i != p {
                self.xb[i] -= theta * dir * self.w[i];
            }
        }
        self.xb[p] = theta * dir;
        self.pivot(p, q);
        Step::Pivoted
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let m = self.m;
        let wp = self.w[p];
        {
            let row = &mut self.binv[p * m..(p + 1) * m];
            row.iter_mut().for_each(|v| *v /= wp);
        }
        let prow: Vec<f64> = self.binv[p * m..(p + 1) * m].to_vec();
        for i in 0..m {
            if i == p {
                continue;
            }
            let f = self.w[i];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.binv[i * m..(i + 1) * m];
            for (v, &pv) in row.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
        }
        let old = self.basis[p];
        self.in_basis[old] = false;
        self.in_basis[q] = true;
        self.basis[p] = q;
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= self.opts.refactor_every && !self.refactor() {
            // fall back to the incrementally updated inverse
            self.since_refactor = 0;
        }
    }

    fn run_phase(&mut self) -> Option<LpStatus> {
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Some(LpStatus::Stalled);
            }
            match self.step() {
                Step::Optimal => {
                    // confirm against a fresh factorization
                    if self.since_refactor > 0 {
                        self.refactor();
                        self.compute_duals();
                        if self.price(Pricing::Full).is_some() {
                            continue;
                        }
                    }
                    return None;
                }
                Step::Unbounded => return Some(LpStatus::Unbounded),
                Step::Pivoted => {}
            }
        }
    }

    /// Pivots basic artificials out where a real column can replace them.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        for p in 0..m {
            if !self.is_artificial(self.basis[p]) {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.n {
                if self.in_basis[j] {
                    continue;
                }
                let mut v = 0.0;
                for (r, a) in self.sf.column(j) {
                    v += self.binv[p * m + r] * a;
                }
                if v.abs() > 1e-7 {
                    match best {
                        Some((_, bv)) if bv >= v.abs() => {}
                        _ => best = Some((j, v.abs())),
                    }
                }
            }
            if let Some((q, _)) = best {
                self.compute_direction(q);
                let theta = self.xb[p] / self.w[p];
                for i in 0..m {
                    if i != p {
                        self.xb[i] -= theta * self.w[i];
                    }
                }
                self.xb[p] = theta;
                self.pivot(p, q);
            }
        }
    }

    fn solve(mut self) -> SimplexOutcome {
        self.crash();
        if self.has_artificials() {
            self.phase_one = true;
            for r in 0..self.m {
                self.phase_cost[self.n + r] = ARTIFICIAL_PENALTY;
            }
            if let Some(status) = self.run_phase() {
                return self.finish(status);
            }
            let infeas: f64 = self
                .basis
                .iter()
                .zip(&self.xb)
                .filter(|(&j, _)| j >= self.n)
                .map(|(_, &v)| v.abs())
                .sum();
            if infeas > self.feas_tol.max(1e-9) * (self.m as f64).sqrt() {
                return self.finish(LpStatus::Infeasible);
            }
            self.drive_out_artificials();
            for r in 0..self.m {
                self.phase_cost[self.n + r] = 0.0;
            }
        }
        self.phase_one = false;
        // nonbasic artificials never re-enter: mark them as basic-excluded
        self.phase_cost[..self.n].copy_from_slice(&self.sf.cost);
        self.degenerate_streak = 0;
        match self.run_phase() {
            Some(status) => self.finish(status),
            None => self.finish(LpStatus::Optimal),
        }
    }

    fn finish(mut self, status: LpStatus) -> SimplexOutcome {
        if status == LpStatus::Optimal {
            self.refactor();
        }
        self.compute_duals();
        let mut x = vec![0.0; self.n];
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.n {
                let v = self.xb[i];
                x[j] = if self.sf.free[j] { v } else { v.max(0.0) };
            }
        }
        let objective = x.iter().zip(&self.sf.cost).map(|(a, b)| a * b).sum();
        SimplexOutcome {
            status,
            x,
            y: self.y,
            objective,
            iterations: self.iterations,
        }
    }
}

/// Runs two-phase revised simplex.
pub fn simplex(sf: &StandardForm, b: &[f64], opts: &SolverOptions) -> SimplexOutcome {
    assert_eq!(b.len(), sf.rows(), "rhs length must match row count");
    if sf.rows() == 0 {
        let unbounded = (0..sf.cols()).any(|j| {
            let c = sf.cost[j];
            (sf.free[j] && c != 0.0) || c < 0.0
        });
        return SimplexOutcome {
            status: if unbounded { LpStatus::Unbounded } else { LpStatus::Optimal },
            x: vec![0.0; sf.cols()],
            y: Vec::new(),
            objective: 0.0,
            iterations: 0,
        };
    }
    Engine::new(sf, b, opts).solve()
}
