//! Imperfect detection and the detection loophole.
//!
//! The no-detection symbol `∅` is the last outcome index, so a binary table
//! embeds as the leading block of a ternary one. Under fair sampling the
//! click probability is independent of outcomes, settings and hidden
//! variables. The loophole construction drops that assumption: it searches
//! for a local model over strategies that may output `∅` and which, after
//! coincidence post-selection, reproduces a target behavior.

use serde::{Deserialize, Serialize};

use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, SimplexOptions};
use crate::polytope::{enumerate_strategies, LocalModel, LocalStrategy, DEFAULT_TOL};
use crate::scenario::{Outcome, Scenario, Side};

pub const DEFAULT_TOL_ETA: f64 = 1e-3;
pub const MAX_BISECTION_STEPS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingMode {
    /// Detection independent of the local hidden variables.
    FairSampling,
    /// Detection may depend on the local hidden variables.
    StrategyDependent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    pub eta_a: f64,
    pub eta_b: f64,
    pub mode: SamplingMode,
}

impl DetectorSpec {
    pub fn new(eta_a: f64, eta_b: f64, mode: SamplingMode) -> Result<DetectorSpec> {
        check_eta(eta_a)?;
        check_eta(eta_b)?;
        Ok(DetectorSpec { eta_a, eta_b, mode })
    }

    pub fn symmetric(eta: f64, mode: SamplingMode) -> Result<DetectorSpec> {
        DetectorSpec::new(eta, eta, mode)
    }

    /// Ternary behavior seen with these detectors when the source produces
    /// `b`. Strategy-dependent detection uses the loophole model in `constraint`
    /// mode and fails when none exists at these efficiencies.
    pub fn observed(&self, b: &Behavior, constraint: ConstraintMode) -> Result<Behavior> {
        match self.mode {
            SamplingMode::FairSampling => apply_fair_sampling(b, self.eta_a, self.eta_b),
            SamplingMode::StrategyDependent => {
                let model = construct_loophole_model_asym(b, self.eta_a, self.eta_b, constraint)?.ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "no strategy-dependent local model at eta = ({}, {})",
                        self.eta_a, self.eta_b
                    ))
                })?;
                model.behavior(&b.scenario().with_alphabets(
                    crate::scenario::Alphabet::PlusMinusNull,
                    crate::scenario::Alphabet::PlusMinusNull,
                ))
            }
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::EfficiencyOutOfRange(eta));
    }
    Ok(())
}

fn require_binary(b: &Behavior) -> Result<()> {
    if !b.scenario().is_binary() {
        return Err(Error::AlphabetMismatch("expected {+,-} outcomes on both sides".into()));
    }
    Ok(())
}

/// Independent losses on each side, at rates `1 - eta_a` and `1 - eta_b`.
pub fn apply_fair_sampling(b: &Behavior, eta_a: f64, eta_b: f64) -> Result<Behavior> {
    require_binary(b)?;
    check_eta(eta_a)?;
    check_eta(eta_b)?;
    let s = b.scenario();
    let t = Scenario::ternary(1)?;
    let ts = s.with_alphabets(t.outcomes_a(), t.outcomes_b());
    let null = Outcome::Null.index();
    let mut q = vec![0.0; ts.table_len()];
    for (alpha, beta) in s.pairs() {
        let ma = b.side_marginal(Side::A, alpha, beta)?;
        let mb = b.side_marginal(Side::B, beta, alpha)?;
        for a in 0..2 {
            for bb in 0..2 {
                q[ts.index(alpha, beta, a, bb)] = eta_a * eta_b * b.as_slice()[s.index(alpha, beta, a, bb)];
            }
            q[ts.index(alpha, beta, a, null)] = eta_a * (1.0 - eta_b) * ma[a];
            q[ts.index(alpha, beta, null, a)] = (1.0 - eta_a) * eta_b * mb[a];
        }
        q[ts.index(alpha, beta, null, null)] = (1.0 - eta_a) * (1.0 - eta_b);
    }
    Behavior::new(ts, q)
}

/// Coincidence-conditioned binary behavior plus the coincidence rate of each
/// setting pair (in `(alpha, beta)` layout order).
pub fn post_select(q: &Behavior) -> Result<(Behavior, Vec<f64>)> {
    let ts = q.scenario();
    if !ts.is_ternary() {
        return Err(Error::AlphabetMismatch("post-selection needs {+,-,∅} outcomes on both sides".into()));
    }
    let bs = Scenario::binary(1)?;
    let s = ts.with_alphabets(bs.outcomes_a(), bs.outcomes_b());
    let mut p = vec![0.0; s.table_len()];
    let mut rates = Vec::with_capacity(s.setting_pairs());
    for (alpha, beta) in s.pairs() {
        let cells: Vec<f64> = (0..2)
            .flat_map(|a| (0..2).map(move |b| (a, b)))
            .map(|(a, b)| q.as_slice()[ts.index(alpha, beta, a, b)])
            .collect();
        let rate: f64 = cells.iter().sum();
        if !(rate > 1e-12) {
            return Err(Error::ZeroCoincidence { alpha, beta });
        }
        for (k, v) in cells.iter().enumerate() {
            p[s.index(alpha, beta, k / 2, k % 2)] = v / rate;
        }
        rates.push(rate);
    }
    Ok((Behavior::new(s, p)?, rates))
}

/// Which observable constraints a loophole model must meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintMode {
    /// Coincidences match `eta_a eta_b · target` and each side clicks with
    /// probability exactly its efficiency at every setting.
    #[default]
    Strict,
    /// Coincidences only.
    Weak,
}

impl ConstraintMode {
    pub fn parse(s: &str) -> Result<ConstraintMode> {
        match s {
            "strict" => Ok(ConstraintMode::Strict),
            "weak" => Ok(ConstraintMode::Weak),
            other => Err(Error::Parse(format!("mode must be strict or weak, got {other:?}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintMode::Strict => "strict",
            ConstraintMode::Weak => "weak",
        }
    }
}

/// Searches for a local model over `{+,-,∅}` strategies whose coincidences
/// reproduce `target` at symmetric efficiency `eta`.
pub fn construct_loophole_model(target: &Behavior, eta: f64, mode: ConstraintMode) -> Result<Option<LocalModel>> {
    construct_loophole_model_asym(target, eta, eta, mode)
}

pub fn construct_loophole_model_asym(
    target: &Behavior,
    eta_a: f64,
    eta_b: f64,
    mode: ConstraintMode,
) -> Result<Option<LocalModel>> {
    let problem = LoopholeProblem::new(target)?;
    problem.solve(eta_a, eta_b, mode)
}

/// Strategy enumeration and constraint rows shared by all probes of one
/// target.
struct LoopholeProblem {
    target: Behavior,
    strategies: Vec<LocalStrategy>,
}

impl LoopholeProblem {
    fn new(target: &Behavior) -> Result<LoopholeProblem> {
        require_binary(target)?;
        let defect = target.nonsignalling_defect();
        if defect > DEFAULT_TOL {
            return Err(Error::SignallingTarget(defect));
        }
        let s = target.scenario();
        let ts = Scenario::ternary(1)?;
        let ts = s.with_alphabets(ts.outcomes_a(), ts.outcomes_b());
        Ok(LoopholeProblem {
            target: target.clone(),
            strategies: enumerate_strategies(&ts)?,
        })
    }

    fn solve(&self, eta_a: f64, eta_b: f64, mode: ConstraintMode) -> Result<Option<LocalModel>> {
        check_eta(eta_a)?;
        check_eta(eta_b)?;
        let s = self.target.scenario();
        let n = self.strategies.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();

        for (alpha, beta) in s.pairs() {
            for a in [Outcome::Plus, Outcome::Minus] {
                for b in [Outcome::Plus, Outcome::Minus] {
                    rows.push(
                        self.strategies
                            .iter()
                            .map(|f| (f.fa[alpha] == a && f.fb[beta] == b) as u8 as f64)
                            .collect::<Vec<f64>>(),
                    );
                    rhs.push(eta_a * eta_b * self.target.get(alpha, beta, a, b));
                }
            }
        }
        if mode == ConstraintMode::Strict {
            // A's click rate cannot depend on beta for a local strategy, so
            // one row per own setting covers every setting pair.
            for alpha in 0..s.settings_a() {
                rows.push(self.strategies.iter().map(|f| (f.fa[alpha] != Outcome::Null) as u8 as f64).collect());
                rhs.push(eta_a);
            }
            for beta in 0..s.settings_b() {
                rows.push(self.strategies.iter().map(|f| (f.fb[beta] != Outcome::Null) as u8 as f64).collect());
                rhs.push(eta_b);
            }
        }
        rows.push(vec![1.0; n]);
        rhs.push(1.0);

        let opts = SimplexOptions {
            feasibility_tol: DEFAULT_TOL,
            ..SimplexOptions::default()
        };
        match LinearProgram::feasibility(rows, rhs)?.solve_with(&opts)? {
            LpOutcome::Optimal(sol) => Ok(Some(LocalModel::from_solver_weights(&self.strategies, &sol.x, 0.0))),
            LpOutcome::Infeasible(_) => Ok(None),
            LpOutcome::Unbounded => Err(Error::Solver("feasibility LP reported unbounded".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    /// Largest probed efficiency with a loophole model; the true threshold
    /// lies within `tol_eta` above it (or equals 1).
    pub eta_star: f64,
    pub mode: ConstraintMode,
    pub feasible_model: LocalModel,
    /// Probes in evaluation order.
    pub bisection_trace: Vec<(f64, bool)>,
}

/// Bisects on symmetric efficiency for the largest `eta` at which a
/// loophole model exists.
pub fn critical_efficiency(target: &Behavior, mode: ConstraintMode, tol_eta: f64) -> Result<ThresholdResult> {
    if !(tol_eta > 0.0 && tol_eta <= 0.1) {
        return Err(Error::InvalidArgument(format!("tol_eta {tol_eta} outside (0, 0.1]")));
    }
    let problem = LoopholeProblem::new(target)?;
    let mut trace = Vec::new();
    let probe = |eta: f64, trace: &mut Vec<(f64, bool)>| -> Result<Option<LocalModel>> {
        let m = problem.solve(eta, eta, mode)?;
        trace.push((eta, m.is_some()));
        Ok(m)
    };

    let Some(mut best) = probe(0.0, &mut trace)? else {
        return Err(Error::Solver("no loophole model at eta = 0".into()));
    };
    if let Some(m) = probe(1.0, &mut trace)? {
        return Ok(ThresholdResult {
            eta_star: 1.0,
            mode,
            feasible_model: m,
            bisection_trace: trace,
        });
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= tol_eta {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match probe(mid, &mut trace)? {
            Some(m) => {
                lo = mid;
                best = m;
            }
            None => hi = mid,
        }
    }
    Ok(ThresholdResult {
        eta_star: lo,
        mode,
        feasible_model: best,
        bisection_trace: trace,
    })
}

/// Per-side click probability of a ternary behavior at every setting pair,
/// as `(A rates, B rates)` in `(alpha, beta)` layout order.
pub fn click_rates(q: &Behavior) -> Result<(Vec<f64>, Vec<f64>)> {
    let s = q.scenario();
    if !s.is_ternary() {
        return Err(Error::AlphabetMismatch("click rates need {+,-,∅} outcomes".into()));
    }
    let mut ra = Vec::new();
    let mut rb = Vec::new();
    for (alpha, beta) in s.pairs() {
        let ma = q.side_marginal(Side::A, alpha, beta)?;
        let mb = q.side_marginal(Side::B, beta, alpha)?;
        ra.push(ma[0] + ma[1]);
        rb.push(mb[0] + mb[1]);
    }
    Ok((ra, rb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Outcome::*;

    fn s3() -> Scenario {
        Scenario::binary(3).unwrap()
    }

    #[test]
    fn perfect_detection_embeds() {
        let b = Behavior::uniform(s3());
        let q = apply_fair_sampling(&b, 1.0, 1.0).unwrap();
        for (alpha, beta) in s3().pairs() {
            for o in [Plus, Minus, Null] {
                assert_eq!(q.get(alpha, beta, o, Null), 0.0);
                assert_eq!(q.get(alpha, beta, Null, o), 0.0);
            }
            assert_eq!(q.get(alpha, beta, Plus, Minus), 0.25);
        }
    }

    #[test]
    fn no_detection_all_null() {
        let q = apply_fair_sampling(&Behavior::uniform(s3()), 0.0, 0.0).unwrap();
        for (alpha, beta) in s3().pairs() {
            assert_eq!(q.get(alpha, beta, Null, Null), 1.0);
        }
        assert!(matches!(post_select(&q), Err(Error::ZeroCoincidence { alpha: 0, beta: 0 })));
    }

    #[test]
    fn half_efficiency_uniform() {
        let q = apply_fair_sampling(&Behavior::uniform(s3()), 0.5, 0.5).unwrap();
        assert_eq!(q.get(1, 2, Plus, Plus), 1.0 / 16.0);
    }

    #[test]
    fn fair_sampling_errors() {
        let b = Behavior::uniform(s3());
        assert_eq!(apply_fair_sampling(&b, 1.1, 0.5), Err(Error::EfficiencyOutOfRange(1.1)));
        let q = apply_fair_sampling(&b, 0.5, 0.5).unwrap();
        assert!(matches!(apply_fair_sampling(&q, 0.5, 0.5), Err(Error::AlphabetMismatch(_))));
        assert!(matches!(post_select(&b), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn post_select_rates() {
        let b = Behavior::uniform(s3());
        let (back, rates) = post_select(&apply_fair_sampling(&b, 0.7, 0.7).unwrap()).unwrap();
        assert!(back.max_abs_diff(&b).unwrap() < 1e-15);
        assert!(rates.iter().all(|r| (r - 0.49).abs() < 1e-15));
    }

    #[test]
    fn local_target_feasible_at_one() {
        let s = s3();
        let f = LocalStrategy::new(vec![Plus, Minus, Plus], vec![Minus, Minus, Plus]);
        let g = LocalStrategy::new(vec![Minus, Minus, Plus], vec![Plus, Minus, Plus]);
        let target = LocalModel::new(vec![f, g], vec![0.3, 0.7]).unwrap().behavior(&s).unwrap();
        let m = construct_loophole_model(&target, 1.0, ConstraintMode::Strict).unwrap().unwrap();
        assert!(m.strategies().iter().all(|f| !f.fa.contains(&Null) && !f.fb.contains(&Null)));
        let r = critical_efficiency(&target, ConstraintMode::Strict, 1e-3).unwrap();
        assert_eq!(r.eta_star, 1.0);
    }

    #[test]
    fn signalling_target_rejected() {
        let s = Scenario::binary(2).unwrap();
        let b = Behavior::from_fn(s, |_, beta, a, b| {
            let want = if beta == 0 { Plus } else { Minus };
            (a == want && b == Plus) as u8 as f64
        })
        .unwrap();
        assert!(matches!(
            construct_loophole_model(&b, 0.5, ConstraintMode::Weak),
            Err(Error::SignallingTarget(_))
        ));
    }

    #[test]
    fn tol_eta_range() {
        let b = Behavior::uniform(Scenario::binary(2).unwrap());
        assert!(critical_efficiency(&b, ConstraintMode::Strict, 0.0).is_err());
        assert!(critical_efficiency(&b, ConstraintMode::Strict, 0.2).is_err());
    }

    #[test]
    fn mode_strings() {
        for m in [ConstraintMode::Strict, ConstraintMode::Weak] {
            assert_eq!(ConstraintMode::parse(m.as_str()).unwrap(), m);
        }
        assert!(ConstraintMode::parse("lenient").is_err());
    }
}
