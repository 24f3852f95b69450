//! Black-box Bell experiments.
//!
//! A two-sided box takes a setting on each side and returns an outcome on
//! each side. Its statistics form a [`Behavior`], the table
//! `Pr(alpha, beta -> a, b)`. This crate builds behaviors from entangled
//! states and from local hidden-variable models, decides whether a behavior
//! is local, weakly nonlocal, or signalling, evaluates Wigner and CHSH
//! functionals, models lossy detectors and the detection loophole, and
//! simulates and audits experimental runs.
//!
//! ```
//! use bellbox::prelude::*;
//!
//! let plan = MeasurementPlan::from_degrees(&[120.0, 0.0, 60.0], &[120.0, 0.0, 60.0]).unwrap();
//! let b = behavior_from_state(&PureTwoQubitState::singlet(), &plan)
//!     .unwrap()
//!     .swap_outputs(Side::B);
//! let f = wigner_chained(b.scenario(), 1, 2, 0).unwrap();
//! assert!((f.evaluate(&b).unwrap() + 0.125).abs() < 1e-12);
//! assert_eq!(classify(&b, DEFAULT_TOL).unwrap().kind, Kind::WeaklyNonlocal);
//! ```

pub mod behavior;
pub mod cli;
pub mod detection;
pub mod error;
pub mod functional;
pub mod io;
pub mod lp;
pub mod polytope;
pub mod quantum;
pub mod runs;
pub mod scenario;

pub use behavior::Behavior;
pub use error::{Error, Result};
pub use functional::BellFunctional;
pub use scenario::{Alphabet, Outcome, Scenario, Side};

pub mod prelude {
    pub use crate::behavior::{validate_behavior, Behavior};
    pub use crate::detection::{
        apply_fair_sampling, click_rates, construct_loophole_model, critical_efficiency, post_select,
        ConstraintMode, DetectorSpec, SamplingMode, ThresholdResult,
    };
    pub use crate::error::{Error, Result};
    pub use crate::functional::{
        chsh_functional, evaluate_functional, wigner_chained, wigner_literal, BellFunctional, Direction,
    };
    pub use crate::polytope::{
        classify, enumerate_strategies, functional_vertex_bounds, local_decomposition, local_visibility,
        model_behavior, strategy_behavior, Classification, Kind, LocalModel, LocalStrategy, Membership,
        DEFAULT_TOL,
    };
    pub use crate::quantum::{behavior_from_state, singlet_joint, MeasurementPlan, PureTwoQubitState};
    pub use crate::runs::{
        estimate, functional_interval, locality_audit, randomness_audit, simulate, simulate_stream, tally,
        Geometry, RunRecord, Tally,
    };
    pub use crate::scenario::{Alphabet, Outcome, Scenario, Side};
}
