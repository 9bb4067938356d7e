//! Row generation against the fully materialized program.

use kmot::mot::{MotOptions, MotSolver, SolveMode};
use kmot::support::{Measure, MeasureCollection, SupportSpace};
use std::sync::Arc;
use std::time::Instant;

fn main() -> kmot::Result<()> {
    let support = Arc::new(SupportSpace::from_scalars(&[0.0, 0.5, 1.5, 2.0, 3.0])?);
    let weights = [
        vec![0.3, 0.2, 0.2, 0.2, 0.1],
        vec![0.1, 0.1, 0.2, 0.3, 0.3],
        vec![0.2, 0.2, 0.2, 0.2, 0.2],
        vec![0.5, 0.1, 0.1, 0.1, 0.2],
    ];
    let measures = weights
        .iter()
        .map(|w| Measure::new(support.clone(), w.clone()))
        .collect::<kmot::Result<Vec<_>>>()?;
    let data = MeasureCollection::without_sizes(measures)?;

    for mode in [SolveMode::Dense, SolveMode::Lazy] {
        let opts = MotOptions { mode, ..MotOptions::default() };
        let start = Instant::now();
        let sol = MotSolver::new(support.clone(), data.k(), opts)?.solve(&data)?;
        println!(
            "{mode:?}: value {:.10}, {} iterations, {} generated rows, {:?}",
            sol.value,
            sol.stats.iterations,
            sol.stats.rows_generated,
            start.elapsed()
        );
    }
    Ok(())
}
