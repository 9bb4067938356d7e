use crate::error::{Error, Result};
use crate::lp::{solve_dense, LinearProgram, LpStatus, RowKind, Sense, SolverOptions};
use crate::mot::{decode_tuple, solve_mot, tuple_cost, tuple_count, w2_squared};
use crate::support::{Measure, MeasureCollection, SupportSpace};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

/// `C(X)`: Euclidean norm of `(|x_1 - x_j|^2)_j`.
pub fn ground_constant(support: &SupportSpace) -> f64 {
    (0..support.len())
        .map(|j| support.sq_dist(0, j).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Universal upper bound on the `1 - alpha` quantile of the null limit:
/// `(sum_i sqrt(a_i)) ((k-1)/k^2) C(X) sqrt(-8 ln(alpha/4))`.
pub fn cutoff_bound(alpha: f64, k: usize, a: &[f64], support: &SupportSpace) -> Result<f64> {
    check_alpha(alpha)?;
    if k < 2 || a.len() != k {
        return Err(Error::InvalidInput(format!("need k >= 2 weights, got k = {k}, {} weights", a.len())));
    }
    let s: f64 = a.iter().map(|x| x.sqrt()).sum();
    let scale = (k - 1) as f64 / (k * k) as f64;
    Ok(s * scale * ground_constant(support) * (-8.0 * (alpha / 4.0).ln()).sqrt())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Per-entry extremes of the first dual block over the normalized null
/// polytope `{sum_i u_i = 0, A'u <= c, (u_i)_1 = 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualRange {
    pub entry_max: Vec<f64>,
    pub entry_min: Vec<f64>,
    /// `C~(X)`: norm of the per-entry maxima of `|u_1|`.
    pub constant: f64,
}

pub fn dual_range(support: &SupportSpace, k: usize) -> Result<DualRange> {
    let n = support.len();
    let count = tuple_count(n, k)
        .filter(|&c| c <= 1_000_000)
        .ok_or(Error::BudgetExceeded {
            required: (n as u128).saturating_pow(k as u32),
            budget: 1_000_000,
        })?;
    if k < 2 {
        return Err(Error::InvalidSize(format!("k must be at least 2, got {k}")));
    }
    let var = |i: usize, j: usize| i * n + j;
    let d = support.sq_dist_matrix();
    let template = {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![0.0; k * n]);
        lp.set_all_free();
        for j in 0..n {
            lp.add_row((0..k).map(|i| (var(i, j), 1.0)).collect(), RowKind::Eq, 0.0);
        }
        for i in 0..k {
            lp.add_row(vec![(var(i, 0), 1.0)], RowKind::Eq, 0.0);
        }
        let mut t = vec![0usize; k];
        for idx in 0..count {
            decode_tuple(idx, n, &mut t);
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(k);
            for (i, &j) in t.iter().enumerate() {
                row.push((var(i, j), 1.0));
            }
            lp.add_row(row, RowKind::Le, tuple_cost(&d, &t));
        }
        lp
    };
    let opts = SolverOptions::default();
    let mut entry_max = vec![0.0; n];
    let mut entry_min = vec![0.0; n];
    for j in 1..n {
        for (sign, slot) in [(1.0, &mut entry_max), (-1.0, &mut entry_min)] {
            let mut obj = vec![0.0; k * n];
            obj[var(0, j)] = sign;
            let mut lp = template.clone();
            lp.set_objective(obj);
            let sol = solve_dense(&lp, &opts)?;
            match sol.status {
                LpStatus::Optimal => slot[j] = sign * sol.objective,
                LpStatus::Unbounded => return Err(Error::UnboundedEntry(j)),
                s => {
                    return Err(Error::SolverFailure {
                        reason: format!("dual range program ended {s:?}"),
                        iterations: sol.iterations,
                        rows: 0,
                    })
                }
            }
        }
    }
    let constant = entry_max
        .iter()
        .zip(&entry_min)
        .map(|(hi, lo)| hi.abs().max(lo.abs()).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(DualRange {
        entry_max,
        entry_min,
        constant,
    })
}

/// Lower bound on the power of the two-sample test with equal sizes `n` at
/// effect size `delta = W_2^2`:
/// `1 - Phi((4 C~ sqrt(-ln(alpha/4)) - sqrt(n/2) delta) / C~)`.
pub fn power_lower_bound(dual_constant: f64, n: u64, delta: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if n == 0 || !(delta >= 0.0) || !(dual_constant > 0.0) {
        return Err(Error::InvalidInput(
            "power bound needs n >= 1, delta >= 0 and a positive dual constant".into(),
        ));
    }
    let arg = (4.0 * dual_constant * (-(alpha / 4.0).ln()).sqrt() - (n as f64 / 2.0).sqrt() * delta)
        / dual_constant;
    // 1 - Phi(x) = erfc(x / sqrt 2) / 2, accurate in both tails
    Ok(0.5 * erfc(arg / std::f64::consts::SQRT_2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerCurvePoint {
    pub n: u64,
    pub delta: f64,
    pub bound: f64,
}

/// Power bounds over the product of an `n` grid and a `delta` grid.
pub fn power_curve(dual_constant: f64, ns: &[u64], deltas: &[f64], alpha: f64) -> Result<Vec<PowerCurvePoint>> {
    let mut out = Vec::with_capacity(ns.len() * deltas.len());
    for &delta in deltas {
        for &n in ns {
            out.push(PowerCurvePoint {
                n,
                delta,
                bound: power_lower_bound(dual_constant, n, delta, alpha)?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceFamily {
    /// `C` equal clusters of identical measures.
    Clustered(usize),
    /// All measures equal except the last.
    Sparse,
}

/// Population MOT value of a structured alternative, from one measure per
/// cluster (clustered) or from the common and the deviating measure (sparse).
pub fn reference_mot(family: ReferenceFamily, representatives: &[Measure], k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidSize(format!("k must be at least 2, got {k}")));
    }
    match family {
        ReferenceFamily::Clustered(c) => {
            if c < 2 || k % c != 0 {
                return Err(Error::DivisibilityViolation { k, clusters: c });
            }
            if representatives.len() != c {
                return Err(Error::InvalidInput(format!(
                    "clustered family needs {c} representatives, got {}",
                    representatives.len()
                )));
            }
            if c == 2 {
                Ok(0.25 * w2_squared(&representatives[0], &representatives[1])?)
            } else {
                let coll = MeasureCollection::without_sizes(representatives.to_vec())?;
                Ok(solve_mot(&coll)?.value)
            }
        }
        ReferenceFamily::Sparse => {
            if representatives.len() != 2 {
                return Err(Error::InvalidInput("sparse family needs two representatives".into()));
            }
            let scale = (k - 1) as f64 / (k * k) as f64;
            Ok(scale * w2_squared(&representatives[0], &representatives[1])?)
        }
    }
}
