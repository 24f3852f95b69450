//! Lossy detectors: fair sampling, post-selection, and the efficiency below
//! which a local model reproduces the coincidences.
//!
//! ```bash
//! cargo run -p bellbox --example detection_loophole
//! ```

use bellbox::prelude::*;

fn main() -> Result<()> {
    let chsh_plan = MeasurementPlan::from_degrees(&[0.0, 90.0], &[45.0, 135.0])?;
    let chsh_box = behavior_from_state(&PureTwoQubitState::singlet(), &chsh_plan)?;

    let lossy = apply_fair_sampling(&chsh_box, 0.8, 0.8)?;
    let (back, rates) = post_select(&lossy)?;
    println!("post-selected error {:.1e}, coincidence rates {rates:?}", back.max_abs_diff(&chsh_box)?);

    for mode in [ConstraintMode::Strict, ConstraintMode::Weak] {
        let r = critical_efficiency(&chsh_box, mode, 1e-3)?;
        println!("CHSH {:<6} eta* = {:.4} after {} probes", mode.as_str(), r.eta_star, r.bisection_trace.len());
    }
    println!("  (analytic 2(sqrt2 - 1) = {:.4})", 2.0 * (2f64.sqrt() - 1.0));

    let plan = MeasurementPlan::from_degrees(&[120.0, 0.0, 60.0], &[120.0, 0.0, 60.0])?;
    let wigner = behavior_from_state(&PureTwoQubitState::singlet(), &plan)?.swap_outputs(Side::B);
    let r = critical_efficiency(&wigner, ConstraintMode::Strict, 1e-3)?;
    println!("Wigner strict eta* = {}", r.eta_star);
    for (eta, ok) in &r.bisection_trace {
        println!("  {eta:.6} {}", if *ok { "feasible" } else { "infeasible" });
    }

    let s = wigner.scenario().with_alphabets(Alphabet::PlusMinusNull, Alphabet::PlusMinusNull);
    let (ra, rb) = click_rates(&r.feasible_model.behavior(&s)?)?;
    println!("model click rates A {ra:.4?} B {rb:.4?}");
    Ok(())
}
