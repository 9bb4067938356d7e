//! The k-sample test with each bootstrap cut-off.

use kmot::inference::{test_h0, BootstrapConfig, Method};
use kmot::rng::{replicate_stream, tags};
use kmot::synthetic::{draw_collection, three_d_pair};

fn main() -> kmot::Result<()> {
    let (first, second) = three_d_pair();
    let population = vec![first.clone(), first, second];
    let mut rng = replicate_stream(11, tags::SIMULATION, 0);
    let data = draw_collection(&population, &[150, 150, 150], &mut rng)?;
    let cfg = BootstrapConfig {
        replicates: 200,
        seed: 3,
        ..BootstrapConfig::default()
    };
    for method in [Method::Derivative, Method::Ub0, Method::Mn] {
        let r = test_h0(&data, 0.05, method, &cfg)?;
        println!(
            "{:<10} statistic {:.4}  cutoff {:.4}  p {:.3}  {:?}",
            method.name(),
            r.statistic,
            r.cutoff,
            r.p_value_estimate,
            r.decision
        );
    }
    Ok(())
}
