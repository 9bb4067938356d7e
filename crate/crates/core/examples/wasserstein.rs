//! For two measures the MOT value is a quarter of the squared
//! 2-Wasserstein distance.

use kmot::mot::{solve_mot, w2_squared};
use kmot::support::{Measure, MeasureCollection, SupportSpace};
use std::sync::Arc;

fn main() -> kmot::Result<()> {
    let support = Arc::new(SupportSpace::new(vec![
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![1.0, 1.0],
    ])?);
    let mu = Measure::new(support.clone(), vec![0.5, 0.2, 0.2, 0.1])?;
    let nu = Measure::new(support.clone(), vec![0.1, 0.2, 0.3, 0.4])?;
    let w2 = w2_squared(&mu, &nu)?;
    let mot = solve_mot(&MeasureCollection::without_sizes(vec![mu, nu])?)?.value;
    println!("W2^2      {w2:.10}");
    println!("4 * MOT   {:.10}", 4.0 * mot);
    Ok(())
}
