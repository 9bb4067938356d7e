//! Permutation test on raw group labels.

use kmot::inference::{permutation_test, BootstrapConfig, GroupedSample};
use kmot::support::SupportSpace;
use std::sync::Arc;

fn main() -> kmot::Result<()> {
    let support = Arc::new(SupportSpace::from_scalars(&[0.0, 1.0, 2.0, 3.0])?);
    let groups = vec![
        vec![0, 0, 1, 1, 1, 2, 2, 3, 0, 1, 1, 2],
        vec![0, 1, 1, 2, 2, 2, 3, 3, 1, 2, 3, 3],
        vec![0, 0, 0, 1, 1, 2, 1, 0, 2, 1, 0, 1],
    ];
    let sample = GroupedSample::new(support, groups)?;
    let cfg = BootstrapConfig { seed: 5, ..BootstrapConfig::default() };
    let r = permutation_test(&sample, 999, 0.05, &cfg)?;
    println!("MOT {:.5}", r.mot_value);
    println!("p-value {:.4}", r.p_value_estimate);
    println!("decision {:?}", r.decision);
    Ok(())
}
