//! Local deterministic strategies, mixtures over them, and membership of a
//! behavior in their convex hull (the local polytope).
//!
//! Membership is decided by a feasibility LP over the weights of every
//! deterministic local strategy. When the LP is infeasible, its phase-1 dual
//! is turned into a Bell functional that separates the behavior from every
//! local strategy.

use serde::{Deserialize, Serialize};

use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::functional::{BellFunctional, Direction};
use crate::lp::{LinearProgram, LpOutcome, SimplexOptions};
use crate::scenario::{Outcome, Scenario};

/// Default cap on the number of enumerated strategies.
pub const DEFAULT_SIZE_LIMIT: u128 = 1_000_000;

/// Default tolerance for membership and signalling decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A deterministic local transfer function: each side's outcome depends on
/// its own setting only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalStrategy {
    pub fa: Vec<Outcome>,
    pub fb: Vec<Outcome>,
}

impl LocalStrategy {
    pub fn new(fa: Vec<Outcome>, fb: Vec<Outcome>) -> LocalStrategy {
        LocalStrategy { fa, fb }
    }

    pub fn check(&self, s: &Scenario) -> Result<()> {
        if self.fa.len() != s.settings_a() || self.fb.len() != s.settings_b() {
            return Err(Error::AlphabetMismatch(format!(
                "strategy covers {}x{} settings, scenario has {}x{}",
                self.fa.len(),
                self.fb.len(),
                s.settings_a(),
                s.settings_b()
            )));
        }
        if let Some(o) = self.fa.iter().find(|o| !s.outcomes_a().contains(**o)) {
            return Err(Error::AlphabetMismatch(format!("outcome {o} not in A alphabet")));
        }
        if let Some(o) = self.fb.iter().find(|o| !s.outcomes_b().contains(**o)) {
            return Err(Error::AlphabetMismatch(format!("outcome {o} not in B alphabet")));
        }
        Ok(())
    }

    /// Flat cell indices that carry probability one.
    fn cells(&self, s: &Scenario) -> impl Iterator<Item = usize> + '_ {
        let s = *s;
        s.pairs()
            .map(move |(alpha, beta)| s.index(alpha, beta, self.fa[alpha].index(), self.fb[beta].index()))
    }

    pub fn behavior(&self, s: &Scenario) -> Result<Behavior> {
        self.check(s)?;
        let mut p = vec![0.0; s.table_len()];
        for i in self.cells(s) {
            p[i] = 1.0;
        }
        Ok(Behavior::from_parts_unchecked(*s, p))
    }
}

/// Free-function form of [`LocalStrategy::behavior`].
pub fn strategy_behavior(f: &LocalStrategy, s: &Scenario) -> Result<Behavior> {
    f.behavior(s)
}

/// A probability distribution over local strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalModel {
    strategies: Vec<LocalStrategy>,
    weights: Vec<f64>,
}

impl LocalModel {
    pub fn new(strategies: Vec<LocalStrategy>, weights: Vec<f64>) -> Result<LocalModel> {
        if strategies.len() != weights.len() {
            return Err(Error::InvalidModel(format!(
                "{} strategies but {} weights",
                strategies.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(Error::InvalidModel(format!("negative weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if !((total - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidModel(format!("weights sum to {total}")));
        }
        Ok(LocalModel { strategies, weights })
    }

    pub fn single(strategy: LocalStrategy) -> LocalModel {
        LocalModel {
            strategies: vec![strategy],
            weights: vec![1.0],
        }
    }

    /// Builds a model from solver output: drops entries at or below
    /// `cutoff`, clamps the rest, and rescales to unit total.
    pub(crate) fn from_solver_weights(strategies: &[LocalStrategy], x: &[f64], cutoff: f64) -> LocalModel {
        let mut kept = Vec::new();
        let mut weights = Vec::new();
        for (f, &w) in strategies.iter().zip(x) {
            if w > cutoff {
                kept.push(f.clone());
                weights.push(w);
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        LocalModel {
            strategies: kept,
            weights,
        }
    }

    pub fn strategies(&self) -> &[LocalStrategy] {
        &self.strategies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Convex combination of the strategies' behaviors.
    pub fn behavior(&self, s: &Scenario) -> Result<Behavior> {
        let mut p = vec![0.0; s.table_len()];
        for (f, &w) in self.strategies.iter().zip(&self.weights) {
            f.check(s)?;
            for i in f.cells(s) {
                p[i] += w;
            }
        }
        Behavior::new(*s, p)
    }
}

/// Free-function form of [`LocalModel::behavior`].
pub fn model_behavior(m: &LocalModel, s: &Scenario) -> Result<Behavior> {
    m.behavior(s)
}

/// `|outcomes_a|^settings_a * |outcomes_b|^settings_b`, saturating.
pub fn strategy_count(s: &Scenario) -> u128 {
    let side = |k: usize, n: usize| (k as u128).checked_pow(n.min(u32::MAX as usize) as u32);
    match (
        side(s.outcomes_a().size(), s.settings_a()),
        side(s.outcomes_b().size(), s.settings_b()),
    ) {
        (Some(x), Some(y)) => x.saturating_mul(y),
        _ => u128::MAX,
    }
}

/// Every local strategy, lexicographic by `fa` then `fb`, where setting 0 is
/// the most significant position and outcomes order as `+ < - < ∅`.
pub fn enumerate_strategies(s: &Scenario) -> Result<Vec<LocalStrategy>> {
    enumerate_strategies_capped(s, DEFAULT_SIZE_LIMIT)
}

pub fn enumerate_strategies_capped(s: &Scenario, cap: u128) -> Result<Vec<LocalStrategy>> {
    let count = strategy_count(s);
    if count > cap {
        return Err(Error::SizeLimit { count, cap });
    }
    let fa_all = side_functions(s.settings_a(), s.outcomes_a().outcomes());
    let fb_all = side_functions(s.settings_b(), s.outcomes_b().outcomes());
    let mut out = Vec::with_capacity(count as usize);
    for fa in &fa_all {
        for fb in &fb_all {
            out.push(LocalStrategy::new(fa.clone(), fb.clone()));
        }
    }
    Ok(out)
}

fn side_functions(settings: usize, alphabet: &[Outcome]) -> Vec<Vec<Outcome>> {
    let mut out = vec![Vec::with_capacity(settings)];
    for _ in 0..settings {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                alphabet.iter().map(move |&o| {
                    let mut next = prefix.clone();
                    next.push(o);
                    next
                })
            })
            .collect();
    }
    out
}

/// Exact extrema of a functional over all deterministic local strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexBounds {
    pub min: f64,
    pub max: f64,
    pub argmin: LocalStrategy,
    pub argmax: LocalStrategy,
}

/// Brute-force extrema over the vertices of the local polytope; by linearity
/// they bound the functional over every local model.
pub fn functional_vertex_bounds(f: &BellFunctional) -> Result<VertexBounds> {
    let s = f.scenario();
    let strategies = enumerate_strategies(s)?;
    let coeffs = f.coefficients();
    let mut best: Option<VertexBounds> = None;
    for strat in strategies {
        let v: f64 = strat.cells(s).map(|i| coeffs[i]).sum();
        match &mut best {
            None => {
                best = Some(VertexBounds {
                    min: v,
                    max: v,
                    argmin: strat.clone(),
                    argmax: strat,
                })
            }
            Some(b) => {
                if v < b.min {
                    b.min = v;
                    b.argmin = strat.clone();
                }
                if v > b.max {
                    b.max = v;
                    b.argmax = strat;
                }
            }
        }
    }
    Ok(best.expect("at least one strategy"))
}

/// Result of a membership test.
#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    Local(LocalModel),
    /// No local model within tolerance; `certificate` is a functional that
    /// is nonnegative on every local strategy and negative on the behavior.
    Outside {
        certificate: BellFunctional,
        residual: f64,
    },
}

impl Membership {
    pub fn model(&self) -> Option<&LocalModel> {
        match self {
            Membership::Local(m) => Some(m),
            Membership::Outside { .. } => None,
        }
    }
}

fn vertex_columns(strategies: &[LocalStrategy], s: &Scenario) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![0.0; strategies.len()]; s.table_len()];
    for (j, f) in strategies.iter().enumerate() {
        for i in f.cells(s) {
            rows[i][j] = 1.0;
        }
    }
    rows
}

/// Searches for weights `w >= 0` with `Σ w_F P_F = b` (the L1 residual must
/// be at most `tol`).
pub fn local_decomposition(b: &Behavior, tol: f64) -> Result<Membership> {
    let s = b.scenario();
    let strategies = enumerate_strategies(s)?;
    let lp = LinearProgram::feasibility(vertex_columns(&strategies, s), b.as_slice().to_vec())?;
    let opts = SimplexOptions {
        feasibility_tol: tol,
        ..SimplexOptions::default()
    };
    match lp.solve_with(&opts)? {
        LpOutcome::Optimal(sol) => Ok(Membership::Local(LocalModel::from_solver_weights(
            &strategies,
            &sol.x,
            0.0,
        ))),
        LpOutcome::Infeasible(inf) => {
            let mut g: Vec<f64> = inf.certificate.iter().map(|y| -y).collect();
            let scale = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if scale > 0.0 {
                for v in &mut g {
                    *v /= scale;
                }
            }
            let raw = BellFunctional::new(*s, g, 0.0, Direction::AtLeast)?;
            let bound = functional_vertex_bounds(&raw)?.min;
            Ok(Membership::Outside {
                certificate: raw.with_reference_bound(bound, Direction::AtLeast),
                residual: inf.residual,
            })
        }
        LpOutcome::Unbounded => Err(Error::Solver("feasibility LP reported unbounded".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Local,
    WeaklyNonlocal,
    Signalling,
}

/// Which of the three black-box types a behavior belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub kind: Kind,
    /// Present iff `kind == WeaklyNonlocal`. Its reference bound is the
    /// exact local minimum.
    pub witness: Option<BellFunctional>,
    /// Present iff `kind == Local`.
    pub decomposition: Option<LocalModel>,
    pub defect: f64,
}

/// Signalling when the nonsignalling defect exceeds `tol`; otherwise Local
/// or WeaklyNonlocal by polytope membership.
pub fn classify(b: &Behavior, tol: f64) -> Result<Classification> {
    let defect = b.nonsignalling_defect();
    if defect > tol {
        return Ok(Classification {
            kind: Kind::Signalling,
            witness: None,
            decomposition: None,
            defect,
        });
    }
    Ok(match local_decomposition(b, tol)? {
        Membership::Local(model) => Classification {
            kind: Kind::Local,
            witness: None,
            decomposition: Some(model),
            defect,
        },
        Membership::Outside { certificate, .. } => Classification {
            kind: Kind::WeaklyNonlocal,
            witness: Some(certificate),
            decomposition: None,
            defect,
        },
    })
}

/// Largest `v` in `[0, 1]` such that `v b + (1 - v) uniform` is local,
/// solved as one LP with `v` as a variable.
pub fn local_visibility(b: &Behavior) -> Result<f64> {
    let defect = b.nonsignalling_defect();
    if defect > DEFAULT_TOL {
        return Err(Error::SignallingInput(defect));
    }
    let s = b.scenario();
    let strategies = enumerate_strategies(s)?;
    let n = strategies.len();
    let u = 1.0 / s.block_len() as f64;

    // columns: strategy weights, v, slack for v <= 1
    let mut a = vertex_columns(&strategies, s);
    for (row, &p) in a.iter_mut().zip(b.as_slice()) {
        row.push(-(p - u));
        row.push(0.0);
    }
    let mut cap = vec![0.0; n + 2];
    cap[n] = 1.0;
    cap[n + 1] = 1.0;
    a.push(cap);
    let mut rhs = vec![u; s.table_len()];
    rhs.push(1.0);
    let mut c = vec![0.0; n + 2];
    c[n] = -1.0;

    match LinearProgram::new(a, rhs, c)?.solve()? {
        LpOutcome::Optimal(sol) => Ok(sol.x[n].clamp(0.0, 1.0)),
        other => Err(Error::Solver(format!("visibility LP: {other:?}"))),
    }
}
