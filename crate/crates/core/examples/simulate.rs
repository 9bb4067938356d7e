//! Rejection rates on a clustered design with k = 4 groups.

use kmot::inference::{reference_mot, BootstrapConfig, Method, ReferenceFamily};
use kmot::synthetic::{design_measures, rejection_rate, three_d_pair, Design};

fn main() -> kmot::Result<()> {
    let (a, b) = three_d_pair();
    let reps = vec![a, b];
    let population = design_measures(Design::Clustered(2), &reps, 4)?;
    let truth = reference_mot(ReferenceFamily::Clustered(2), &reps, 4)?;
    println!("population MOT {truth:.4}");
    let cfg = BootstrapConfig { replicates: 100, ..BootstrapConfig::default() };
    for n in [50, 150] {
        let r = rejection_rate(&population, n, 0.05, Method::Derivative, &cfg, 20, 1)?;
        println!("n {n:>4}: {}/{} rejections", r.rejections, r.trials);
    }
    Ok(())
}
