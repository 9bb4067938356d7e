//! Finite-sample power lower bound for the two-sample test and the
//! analytic bound on the null cut-off.

use kmot::inference::{cutoff_bound, dual_range, power_curve};
use kmot::limit::rate;
use kmot::synthetic::three_d_support;

fn main() -> kmot::Result<()> {
    let support = three_d_support();
    let range = dual_range(&support, 2)?;
    println!("dual range constant {:.5}", range.constant);
    for p in power_curve(range.constant, &[100, 400, 1600, 6400], &[0.2, 0.8], 0.05)? {
        println!("n {:>5}  delta {:.1}  power >= {:.4}", p.n, p.delta, p.bound);
    }
    let a = rate(&[500, 500, 500])?.a;
    println!("cut-off bound, k = 3: {:.4}", cutoff_bound(0.05, 3, &a, &support)?);
    Ok(())
}
