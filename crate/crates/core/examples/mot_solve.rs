//! Solve a three-marginal transport problem on a line and inspect the
//! optimal multicoupling, a dual certificate and the barycenter.

use kmot::mot::{barycenter_pushforward, normalize_dual, solve_mot};
use kmot::support::{Measure, MeasureCollection, SupportSpace};
use std::sync::Arc;

fn main() -> kmot::Result<()> {
    let support = Arc::new(SupportSpace::from_scalars(&[0.0, 1.0, 2.0, 3.0])?);
    let measures = vec![
        Measure::new(support.clone(), vec![0.4, 0.3, 0.2, 0.1])?,
        Measure::new(support.clone(), vec![0.25, 0.25, 0.25, 0.25])?,
        Measure::new(support.clone(), vec![0.1, 0.2, 0.3, 0.4])?,
    ];
    let data = MeasureCollection::without_sizes(measures)?;
    let sol = solve_mot(&data)?;
    println!("MOT value {:.6}", sol.value);
    println!("dual objective {:.6}", sol.dual.objective(&data));

    let u = normalize_dual(&sol.dual);
    for (i, block) in u.blocks.iter().enumerate() {
        println!("u_{} = {:?}", i + 1, block);
    }
    let coupling = sol.coupling.expect("dense solve keeps the coupling");
    println!("coupling support:");
    for (tuple, mass) in coupling.support_entries(support.len(), 3, 1e-12) {
        println!("  {tuple:?} {mass:.4}");
    }
    println!("barycenter:");
    for (point, mass) in barycenter_pushforward(&support, 3, &coupling, 1e-12) {
        println!("  {point:?} {mass:.4}");
    }
    Ok(())
}
