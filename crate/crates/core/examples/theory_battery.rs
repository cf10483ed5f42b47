//! Numerical checks of how the three kernels relate.
//!
//! Runs the full battery, then looks at two pieces in more detail: how large
//! the sphere must be before inner products order pairs like distances do,
//! and how close seven points in the plane get to the star ordering.

use nalgebra::DMatrix;
use symlatent::stats::RngStream;
use symlatent::theory::{
    distance_feasibility_search, run_theory_battery, smallest_order_preserving_radius, BatteryConfig,
    FeasibilitySearch,
};

fn main() -> symlatent::Result<()> {
    let report = run_theory_battery(&BatteryConfig::default())?;
    println!("{report}\n");

    let mut rng = RngStream::new(5);
    let pts = DMatrix::from_fn(20, 2, |_, _| rng.std_normal());
    let grid = [1.01, 1.1, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1e3];
    match smallest_order_preserving_radius(&pts, &grid)? {
        Some(m) => println!("sphere radius {m} x max|z| already orders all 190 pairs correctly"),
        None => println!("no tested radius orders all pairs correctly"),
    }

    let search = FeasibilitySearch {
        restarts: 20,
        ..FeasibilitySearch::default()
    };
    for n in 5..=8 {
        let r = distance_feasibility_search(n, 2, &search)?;
        println!("n = {n}, K = 2: best star violation {:.4}", r.best_violation);
    }
    Ok(())
}
