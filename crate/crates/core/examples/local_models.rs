//! Deterministic strategies, their mixtures, and recovering a decomposition
//! with the simplex solver.
//!
//! ```bash
//! cargo run -p bellbox --example local_models
//! ```

use bellbox::prelude::*;

fn main() -> Result<()> {
    let s = Scenario::binary(2)?;
    let strategies = enumerate_strategies(&s)?;
    println!("{} deterministic strategies for 2 settings", strategies.len());

    let (p, m) = (Outcome::Plus, Outcome::Minus);
    let model = LocalModel::new(
        vec![
            LocalStrategy::new(vec![p, p], vec![p, m]),
            LocalStrategy::new(vec![m, p], vec![m, m]),
            LocalStrategy::new(vec![p, m], vec![p, p]),
        ],
        vec![0.5, 0.3, 0.2],
    )?;
    let b = model.behavior(&s)?;

    match local_decomposition(&b, DEFAULT_TOL)? {
        Membership::Local(found) => {
            println!("recovered {} strategies:", found.len());
            for (st, w) in found.strategies().iter().zip(found.weights()) {
                println!("  {w:.3}  fa={:?} fb={:?}", st.fa, st.fb);
            }
            println!("reconstruction error {:.1e}", found.behavior(&s)?.max_abs_diff(&b)?);
        }
        Membership::Outside { .. } => unreachable!("a mixture of strategies is local"),
    }

    let chsh = chsh_functional(&s, [1, 1, 1, -1])?;
    let vb = functional_vertex_bounds(&chsh)?;
    println!("CHSH over strategies: [{}, {}], model gives {:.3}", vb.min, vb.max, chsh.evaluate(&b)?);
    Ok(())
}
