use thiserror::Error;

use crate::scenario::Side;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("table shape mismatch: expected {expected} entries, got {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("negative entry {value} at (alpha={alpha}, beta={beta}, a={a}, b={b})")]
    NegativeEntry {
        alpha: usize,
        beta: usize,
        a: usize,
        b: usize,
        value: f64,
    },

    #[error("block (alpha={alpha}, beta={beta}) sums to {sum}, expected 1")]
    BadNormalization { alpha: usize, beta: usize, sum: f64 },

    #[error("setting {setting} out of range on side {side:?} (have {count})")]
    SettingOutOfRange {
        side: Side,
        setting: usize,
        count: usize,
    },

    #[error("scenarios do not match")]
    ScenarioMismatch,

    #[error("scenario too small: {0}")]
    ScenarioTooSmall(String),

    #[error("duplicate setting {0}")]
    DuplicateSetting(usize),

    #[error("sign pattern must contain exactly one negative sign")]
    BadSignPattern,

    #[error("invalid outcome permutation: {0}")]
    BadPermutation(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("strategy count {count} exceeds cap {cap}")]
    SizeLimit { count: u128, cap: u128 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("behavior is signalling (defect {0})")]
    SignallingInput(f64),

    #[error("target is signalling (defect {0})")]
    SignallingTarget(f64),

    #[error("efficiency {0} outside [0, 1]")]
    EfficiencyOutOfRange(f64),

    #[error("no coincidences at setting pair (alpha={alpha}, beta={beta})")]
    ZeroCoincidence { alpha: usize, beta: usize },

    #[error("state norm {0} differs from 1")]
    StateNotNormalized(f64),

    #[error("measurement plan does not match scenario: {0}")]
    PlanMismatch(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("n_runs must be at least 1")]
    NoRuns,

    #[error("record does not fit the tally scenario: {0}")]
    MixedScenario(String),

    #[error("no runs at setting pair (alpha={alpha}, beta={beta})")]
    EmptySettingPair { alpha: usize, beta: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear program failed: {0}")]
    Solver(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
