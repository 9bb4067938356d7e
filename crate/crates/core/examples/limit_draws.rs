//! Draws from the null limit law, its relaxed upper bound on the same
//! Gaussian directions, and the normal lower bound under an alternative.

use kmot::limit::{build_ub0, nlb_sigma, rate, sample_coupled, NullLimitProgram};
use kmot::mot::solve_mot;
use kmot::rng::{replicate_stream, tags};
use kmot::support::{Measure, MeasureCollection, SupportSpace};
use std::sync::Arc;

fn main() -> kmot::Result<()> {
    let support = Arc::new(SupportSpace::from_scalars(&[0.0, 1.0, 2.0])?);
    let mu = Measure::new(support.clone(), vec![0.3, 0.4, 0.3])?;
    let k = 3;
    let a = rate(&[100, 100, 100])?.a;

    let x0 = NullLimitProgram::new(support.clone(), k)?;
    let ub0 = build_ub0(&support, k)?;
    println!("relaxed program: {} rows, {} variables", ub0.num_rows(), ub0.num_vars());
    for r in 0..5 {
        let mut rng = replicate_stream(1, tags::LIMIT, r);
        let (lower, upper) = sample_coupled(&x0, &ub0, mu.weights(), &a, &mut rng)?;
        println!("draw {r}: null {lower:.5}  relaxed {upper:.5}");
    }

    let alt = MeasureCollection::new(
        vec![
            Measure::new(support.clone(), vec![0.2, 0.3, 0.5])?,
            Measure::new(support.clone(), vec![0.85, 0.1, 0.05])?,
        ],
        vec![200, 200],
    )?;
    let sol = solve_mot(&alt)?;
    let a2 = rate(alt.sizes())?.a;
    println!("normal lower bound sd {:.5}", nlb_sigma(&sol.dual, &alt, &a2).sigma);
    Ok(())
}
