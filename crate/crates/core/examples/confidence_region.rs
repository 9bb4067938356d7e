//! Confidence region for the population MOT value in both scalings.

use kmot::inference::{confidence_region, BootstrapConfig, CrMode};
use kmot::support::{Measure, MeasureCollection, SupportSpace};
use std::sync::Arc;

fn main() -> kmot::Result<()> {
    let support = Arc::new(SupportSpace::from_scalars(&[0.0, 1.0, 2.0])?);
    let data = MeasureCollection::new(
        vec![
            Measure::new(support.clone(), vec![0.2, 0.3, 0.5])?,
            Measure::new(support.clone(), vec![0.85, 0.1, 0.05])?,
        ],
        vec![400, 400],
    )?;
    let cfg = BootstrapConfig { replicates: 400, seed: 9, ..BootstrapConfig::default() };
    for mode in [CrMode::Standard, CrMode::Literal] {
        let ci = confidence_region(&data, 0.1, mode, &cfg)?;
        println!(
            "{mode:?}: MOT {:.4}, {:.0}% region [{:.4}, {:.4}]",
            ci.mot_value,
            100.0 * ci.level,
            ci.lower,
            ci.upper
        );
    }
    Ok(())
}
