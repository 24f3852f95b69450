//! Wigner functionals on the singlet at 120 / 0 / 60 degrees.
//!
//! The literal form is not a locality witness (its local minimum is -1).
//! The chained form is non-negative on every perfectly correlated local
//! strategy and the singlet reaches -1/8.
//!
//! ```bash
//! cargo run -p bellbox --example wigner_inequalities
//! ```

use bellbox::prelude::*;

fn main() -> Result<()> {
    let plan = MeasurementPlan::from_degrees(&[120.0, 0.0, 60.0], &[120.0, 0.0, 60.0])?;
    let target = behavior_from_state(&PureTwoQubitState::singlet(), &plan)?.swap_outputs(Side::B);
    let s = *target.scenario();
    let uniform = Behavior::uniform(s);

    for k in 0..3 {
        let f = wigner_literal(&s, k)?;
        let bounds = functional_vertex_bounds(&f)?;
        println!(
            "literal k={k}: target {:+.4}, uniform {:+.4}, local range [{}, {}]",
            f.evaluate(&target)?,
            f.evaluate(&uniform)?,
            bounds.min,
            bounds.max
        );
    }

    for (i, j, k) in [(1, 2, 0), (0, 1, 2), (2, 0, 1)] {
        let f = wigner_chained(&s, i, j, k)?;
        println!("chained ({i},{j},{k}): target {:+.4}", f.evaluate(&target)?);
    }

    // CHSH for comparison
    let chsh_plan = MeasurementPlan::from_degrees(&[0.0, 90.0], &[45.0, 135.0])?;
    let chsh_box = behavior_from_state(&PureTwoQubitState::singlet(), &chsh_plan)?;
    let chsh = chsh_functional(chsh_box.scenario(), [1, -1, 1, 1])?;
    println!("CHSH: {:.4} (local bound {})", chsh.evaluate(&chsh_box)?.abs(), chsh.reference_bound());
    Ok(())
}
