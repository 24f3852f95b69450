//! Local, weakly nonlocal and signalling boxes.
//!
//! ```bash
//! cargo run -p bellbox --example classify_boxes
//! ```

use bellbox::prelude::*;

fn report(name: &str, b: &Behavior) -> Result<()> {
    let c = classify(b, DEFAULT_TOL)?;
    print!("{name:<16} {:?} (defect {:.2e})", c.kind, c.defect);
    if let Some(w) = &c.witness {
        print!(" witness value {:.4} < bound {:.4}", w.evaluate(b)?, w.reference_bound());
    }
    if c.kind != Kind::Signalling {
        print!(" visibility {:.4}", local_visibility(b)?);
    }
    println!();
    Ok(())
}

fn main() -> Result<()> {
    let s2 = Scenario::binary(2)?;
    let pr = Behavior::from_fn(s2, |x, y, a, b| if (a.index() ^ b.index()) == (x & y) { 0.5 } else { 0.0 })?;
    // A's outcome copies B's setting
    let sig = Behavior::from_fn(s2, |_, y, a, b| if a.index() == y && b == Outcome::Plus { 1.0 } else { 0.0 })?;
    let plan = MeasurementPlan::from_degrees(&[120.0, 0.0, 60.0], &[120.0, 0.0, 60.0])?;
    let wigner = behavior_from_state(&PureTwoQubitState::singlet(), &plan)?.swap_outputs(Side::B);

    report("uniform", &Behavior::uniform(s2))?;
    report("PR box", &pr)?;
    report("noisy PR (0.4)", &pr.mix(&Behavior::uniform(s2), 0.4)?)?;
    report("noisy PR (0.6)", &pr.mix(&Behavior::uniform(s2), 0.6)?)?;
    report("signalling", &sig)?;
    report("Wigner target", &wigner)?;
    report("Wigner @ 0.75", &wigner.mix(&Behavior::uniform(*wigner.scenario()), 0.75)?)?;
    Ok(())
}
