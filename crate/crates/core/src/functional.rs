//! Linear functionals over behaviors: the Wigner forms and CHSH.

use serde::{Deserialize, Serialize};

use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::scenario::{Outcome, Scenario, Side};

/// Sense of the locality constraint attached to a functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Local behaviors satisfy `value >= reference_bound`.
    AtLeast,
    /// Local behaviors satisfy `value <= reference_bound`.
    AtMost,
}

/// Coefficient table with the same `(alpha, beta, a, b)` layout as a
/// [`Behavior`], plus a reference bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BellFunctional {
    scenario: Scenario,
    coefficients: Vec<f64>,
    reference_bound: f64,
    direction: Direction,
}

impl BellFunctional {
    pub fn new(
        scenario: Scenario,
        coefficients: Vec<f64>,
        reference_bound: f64,
        direction: Direction,
    ) -> Result<BellFunctional> {
        if coefficients.len() != scenario.table_len() {
            return Err(Error::ShapeMismatch {
                expected: scenario.table_len(),
                found: coefficients.len(),
            });
        }
        Ok(BellFunctional {
            scenario,
            coefficients,
            reference_bound,
            direction,
        })
    }

    pub fn zero(scenario: Scenario) -> BellFunctional {
        BellFunctional {
            scenario,
            coefficients: vec![0.0; scenario.table_len()],
            reference_bound: 0.0,
            direction: Direction::AtLeast,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, alpha: usize, beta: usize, a: Outcome, b: Outcome) -> f64 {
        self.coefficients[self.scenario.index(alpha, beta, a.index(), b.index())]
    }

    pub fn reference_bound(&self) -> f64 {
        self.reference_bound
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn with_reference_bound(mut self, bound: f64, direction: Direction) -> BellFunctional {
        self.reference_bound = bound;
        self.direction = direction;
        self
    }

    /// Cells with nonzero coefficient as `(alpha, beta, a, b, coefficient)`.
    pub fn support(&self) -> Vec<(usize, usize, Outcome, Outcome, f64)> {
        let s = &self.scenario;
        let mut out = Vec::new();
        for (alpha, beta) in s.pairs() {
            for &a in s.outcomes_a().outcomes() {
                for &b in s.outcomes_b().outcomes() {
                    let c = self.coefficient(alpha, beta, a, b);
                    if c != 0.0 {
                        out.push((alpha, beta, a, b, c));
                    }
                }
            }
        }
        out
    }

    /// Element-wise inner product with `behavior`.
    pub fn evaluate(&self, behavior: &Behavior) -> Result<f64> {
        if *behavior.scenario() != self.scenario {
            return Err(Error::ScenarioMismatch);
        }
        Ok(self.evaluate_slice(behavior.as_slice()))
    }

    pub(crate) fn evaluate_slice(&self, table: &[f64]) -> f64 {
        self.coefficients.iter().zip(table).map(|(c, p)| c * p).sum()
    }

    /// True when `value` satisfies the reference constraint.
    pub fn satisfied_by(&self, value: f64) -> bool {
        match self.direction {
            Direction::AtLeast => value >= self.reference_bound,
            Direction::AtMost => value <= self.reference_bound,
        }
    }
}

/// Free-function form of [`BellFunctional::evaluate`].
pub fn evaluate_functional(f: &BellFunctional, b: &Behavior) -> Result<f64> {
    f.evaluate(b)
}

fn require_binary(scenario: &Scenario) -> Result<()> {
    if !scenario.is_binary() {
        return Err(Error::AlphabetMismatch(
            "functional needs {+,-} outcomes on both sides".into(),
        ));
    }
    Ok(())
}

/// `Pr(1,2 -> +,-) + Pr(2,0 -> +,-) - Pr(0,1 -> +,-) >= 0` with setting labels
/// shifted cyclically by `k`.
///
/// This is the printed form; it is not satisfied by every local model (see
/// [`crate::polytope::functional_vertex_bounds`]), so classification relies
/// on polytope membership instead.
pub fn wigner_literal(scenario: &Scenario, k: usize) -> Result<BellFunctional> {
    if k > 2 {
        return Err(Error::InvalidArgument(format!(
            "cyclic permutation index {k} not in {{0,1,2}}"
        )));
    }
    if scenario.settings_a() < 3 || scenario.settings_b() < 3 {
        return Err(Error::ScenarioTooSmall("need 3 settings per side".into()));
    }
    require_binary(scenario)?;
    let shift = |x: usize| (x + k) % 3;
    let mut f = BellFunctional::zero(*scenario);
    let cells = [(1, 2, 1.0), (2, 0, 1.0), (0, 1, -1.0)];
    for (alpha, beta, c) in cells {
        let i = scenario.index(shift(alpha), shift(beta), Outcome::Plus.index(), Outcome::Minus.index());
        f.coefficients[i] += c;
    }
    Ok(f)
}

/// `Pr(i,j -> +,-) + Pr(j,k -> +,-) - Pr(i,k -> +,-) >= 0`.
///
/// Holds for every local model in which equal settings give equal outcomes
/// on both sides.
pub fn wigner_chained(scenario: &Scenario, i: usize, j: usize, k: usize) -> Result<BellFunctional> {
    require_binary(scenario)?;
    for (x, side) in [(i, Side::A), (j, Side::A), (k, Side::A), (i, Side::B), (j, Side::B), (k, Side::B)] {
        scenario.check_setting(side, x)?;
    }
    if i == j || i == k {
        return Err(Error::DuplicateSetting(i));
    }
    if j == k {
        return Err(Error::DuplicateSetting(j));
    }
    let (p, m) = (Outcome::Plus.index(), Outcome::Minus.index());
    let mut f = BellFunctional::zero(*scenario);
    f.coefficients[scenario.index(i, j, p, m)] += 1.0;
    f.coefficients[scenario.index(j, k, p, m)] += 1.0;
    f.coefficients[scenario.index(i, k, p, m)] -= 1.0;
    Ok(f)
}

/// CHSH expression `S = sum s_{alpha beta} E(alpha, beta)` over settings
/// `{0,1}^2`, with `E = p(++) + p(--) - p(+-) - p(-+)`. Signs are ordered
/// `(00, 01, 10, 11)` and exactly one must be negative. Local bound `S <= 2`.
pub fn chsh_functional(scenario: &Scenario, signs: [i8; 4]) -> Result<BellFunctional> {
    if signs.iter().any(|&s| s != 1 && s != -1) || signs.iter().filter(|&&s| s == -1).count() != 1 {
        return Err(Error::BadSignPattern);
    }
    if scenario.settings_a() < 2 || scenario.settings_b() < 2 {
        return Err(Error::ScenarioTooSmall("need 2 settings per side".into()));
    }
    require_binary(scenario)?;
    let mut f = BellFunctional::zero(*scenario);
    for (n, &s) in signs.iter().enumerate() {
        let (alpha, beta) = (n / 2, n % 2);
        for a in 0..2 {
            for b in 0..2 {
                let parity = if a == b { 1.0 } else { -1.0 };
                f.coefficients[scenario.index(alpha, beta, a, b)] = f64::from(s) * parity;
            }
        }
    }
    Ok(f.with_reference_bound(2.0, Direction::AtMost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Outcome::{Minus, Plus};

    fn s3() -> Scenario {
        Scenario::binary(3).unwrap()
    }

    fn deterministic(s: Scenario, fa: &[Outcome], fb: &[Outcome]) -> Behavior {
        Behavior::from_fn(s, |alpha, beta, a, b| (a == fa[alpha] && b == fb[beta]) as u8 as f64).unwrap()
    }

    #[test]
    fn literal_cells() {
        let f = wigner_literal(&s3(), 0).unwrap();
        assert_eq!(
            f.support(),
            vec![(0, 1, Plus, Minus, -1.0), (1, 2, Plus, Minus, 1.0), (2, 0, Plus, Minus, 1.0)]
        );
        assert_eq!(f.reference_bound(), 0.0);
        assert_eq!(f.direction(), Direction::AtLeast);

        let f1 = wigner_literal(&s3(), 1).unwrap();
        assert_eq!(
            f1.support(),
            vec![(0, 1, Plus, Minus, 1.0), (1, 2, Plus, Minus, -1.0), (2, 0, Plus, Minus, 1.0)]
        );
        assert!(wigner_literal(&s3(), 3).is_err());
        assert!(matches!(
            wigner_literal(&Scenario::binary(2).unwrap(), 0),
            Err(Error::ScenarioTooSmall(_))
        ));
    }

    #[test]
    fn literal_on_uniform_and_vertex() {
        let f = wigner_literal(&s3(), 0).unwrap();
        assert_eq!(f.evaluate(&Behavior::uniform(s3())).unwrap(), 0.25);
        let v = deterministic(s3(), &[Plus, Minus, Minus], &[Plus, Minus, Plus]);
        assert_eq!(f.evaluate(&v).unwrap(), -1.0);
    }

    #[test]
    fn zero_functional() {
        let f = BellFunctional::zero(s3());
        assert_eq!(f.evaluate(&Behavior::uniform(s3())).unwrap(), 0.0);
    }

    #[test]
    fn chained_cells_and_errors() {
        let f = wigner_chained(&s3(), 1, 2, 0).unwrap();
        assert_eq!(
            f.support(),
            vec![(1, 0, Plus, Minus, -1.0), (1, 2, Plus, Minus, 1.0), (2, 0, Plus, Minus, 1.0)]
        );
        assert_eq!(f.evaluate(&Behavior::uniform(s3())).unwrap(), 0.25);
        assert!(matches!(wigner_chained(&s3(), 1, 1, 0), Err(Error::DuplicateSetting(1))));
        assert!(matches!(wigner_chained(&s3(), 0, 2, 2), Err(Error::DuplicateSetting(2))));
        assert!(matches!(wigner_chained(&s3(), 0, 1, 3), Err(Error::SettingOutOfRange { .. })));
    }

    #[test]
    fn chsh_values() {
        let s2 = Scenario::binary(2).unwrap();
        let f = chsh_functional(&s2, [1, 1, 1, -1]).unwrap();
        assert_eq!(f.evaluate(&Behavior::uniform(s2)).unwrap(), 0.0);
        let all_plus = deterministic(s2, &[Plus, Plus], &[Plus, Plus]);
        assert_eq!(f.evaluate(&all_plus).unwrap(), 2.0);
        assert_eq!(f.reference_bound(), 2.0);
        assert_eq!(f.direction(), Direction::AtMost);
        assert_eq!(chsh_functional(&s2, [1, 1, 1, 1]), Err(Error::BadSignPattern));
        assert_eq!(chsh_functional(&s2, [-1, 1, -1, 1]), Err(Error::BadSignPattern));
    }

    #[test]
    fn scenario_mismatch() {
        let f = wigner_literal(&s3(), 0).unwrap();
        let b = Behavior::uniform(Scenario::binary(4).unwrap());
        assert_eq!(f.evaluate(&b), Err(Error::ScenarioMismatch));
    }
}
