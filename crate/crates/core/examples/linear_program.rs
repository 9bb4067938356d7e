//! The dense simplex on a small program, with its dual multipliers.

use kmot::lp::{solve_dense, LinearProgram, RowKind, Sense, SolverOptions};

fn main() -> kmot::Result<()> {
    // max 3x + 2y  s.t.  x + y <= 4,  x + 3y <= 6,  x <= 3
    let mut lp = LinearProgram::new(Sense::Maximize, vec![3.0, 2.0]);
    lp.add_row(vec![(0, 1.0), (1, 1.0)], RowKind::Le, 4.0);
    lp.add_row(vec![(0, 1.0), (1, 3.0)], RowKind::Le, 6.0);
    lp.add_row(vec![(0, 1.0)], RowKind::Le, 3.0);
    let sol = solve_dense(&lp, &SolverOptions::default())?.into_optimal()?;
    println!("objective {}", sol.objective);
    println!("x = {:?}", sol.primal);
    println!("duals = {:?}", sol.duals);
    Ok(())
}
