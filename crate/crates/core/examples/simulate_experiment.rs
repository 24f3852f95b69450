//! Seeded run simulation, estimation with error bars, and audits.
//!
//! ```bash
//! cargo run --release -p bellbox --example simulate_experiment
//! ```

use bellbox::prelude::*;

fn main() -> Result<()> {
    let plan = MeasurementPlan::from_degrees(&[120.0, 0.0, 60.0], &[120.0, 0.0, 60.0])?;
    let target = behavior_from_state(&PureTwoQubitState::singlet(), &plan)?.swap_outputs(Side::B);
    let s = *target.scenario();
    let g = Geometry::new(400.0, 1e-6)?;

    let first: Vec<RunRecord> = simulate(&target, 3, 42, g)?.collect();
    for r in &first {
        println!("{}", serde_json::to_string(r).unwrap());
    }

    // four independent streams, merged
    let mut t = Tally::empty(s);
    for id in 0..4 {
        t.merge(&tally(s, simulate_stream(&target, 250_000, 42, id, g)?)?)?;
    }
    let (est, _) = estimate(&t)?;
    println!("runs {}, max cell error {:.2e}", t.grand_total(), est.max_abs_diff(&target)?);

    let (value, sigma) = functional_interval(&t, &wigner_chained(&s, 1, 2, 0)?)?;
    println!("chained Wigner {value:.5} +- {sigma:.5} (exact -0.125)");

    let loc = locality_audit(&g);
    println!("locality pass {} margin {:.3} m", loc.pass, loc.margin_meters);
    let rnd = randomness_audit(&t)?;
    println!(
        "settings uniform p={:.3}, independent p={:.3}",
        rnd.p_value_uniformity, rnd.p_value_independence
    );
    Ok(())
}
