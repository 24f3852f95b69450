//! Behaviors of two-qubit states under spin measurements in the X-Z plane.
//!
//! ```bash
//! cargo run -p bellbox --example quantum_behaviors
//! ```

use bellbox::prelude::*;

fn main() -> Result<()> {
    let plan = MeasurementPlan::from_degrees(&[0.0, 60.0, 120.0], &[0.0, 60.0, 120.0])?;

    for (name, state) in [
        ("singlet", PureTwoQubitState::singlet()),
        ("phi_plus", PureTwoQubitState::phi_plus()),
        ("partial(0.3)", PureTwoQubitState::partially_entangled(0.3)),
    ] {
        let b = behavior_from_state(&state, &plan)?;
        println!("{name}: defect {:.1e}", b.nonsignalling_defect());
        for (x, y) in b.scenario().pairs() {
            let blk = b.block(x, y);
            let corr = blk[0] - blk[1] - blk[2] + blk[3];
            print!("  E({x},{y})={corr:+.3}");
        }
        println!();
    }

    // closed form for the singlet: p(++) = (1 - cos d) / 4
    for deg in [0.0_f64, 60.0, 90.0, 180.0] {
        let [pp, pm, mp, mm] = singlet_joint(deg.to_radians());
        println!("delta {deg:>5}: {pp:.4} {pm:.4} {mp:.4} {mm:.4}");
    }

    // B's outcome labels swapped: equal settings never give (+, -)
    let swapped = behavior_from_state(&PureTwoQubitState::singlet(), &plan)?.swap_outputs(Side::B);
    println!("swapped p(+,-|0,0) = {}", swapped.get(0, 0, Outcome::Plus, Outcome::Minus));
    Ok(())
}
