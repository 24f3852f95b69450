//! Conditional probability tables `Pr(alpha, beta -> a, b)`.

use crate::error::{Error, Result};
use crate::scenario::{Alphabet, Outcome, Scenario, Side};

/// Tolerance for nonnegativity and block normalization.
pub const PROB_TOL: f64 = 1e-12;

/// A validated table of conditional probabilities, stored flat in
/// `(alpha, beta, a, b)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    p: Vec<f64>,
}

impl Behavior {
    /// Validates a flat table. Entries are stored exactly as given; an
    /// out-of-tolerance table is rejected, never repaired.
    pub fn new(scenario: Scenario, p: Vec<f64>) -> Result<Behavior> {
        if p.len() != scenario.table_len() {
            return Err(Error::ShapeMismatch {
                expected: scenario.table_len(),
                found: p.len(),
            });
        }
        let na = scenario.outcomes_a().size();
        let nb = scenario.outcomes_b().size();
        for (alpha, beta) in scenario.pairs() {
            let start = scenario.block_start(alpha, beta);
            let block = &p[start..start + na * nb];
            for (k, &v) in block.iter().enumerate() {
                if v < -PROB_TOL {
                    return Err(Error::NegativeEntry {
                        alpha,
                        beta,
                        a: k / nb,
                        b: k % nb,
                        value: v,
                    });
                }
            }
            let sum: f64 = block.iter().sum();
            if !((sum - 1.0).abs() <= PROB_TOL) {
                return Err(Error::BadNormalization { alpha, beta, sum });
            }
        }
        Ok(Behavior { scenario, p })
    }

    /// Validates a nested `p[alpha][beta][a][b]` table.
    pub fn from_nested(scenario: Scenario, raw: &[Vec<Vec<Vec<f64>>>]) -> Result<Behavior> {
        Behavior::new(scenario, flatten_nested(&scenario, raw)?)
    }

    /// Every entry `1 / block_len`.
    pub fn uniform(scenario: Scenario) -> Behavior {
        let v = 1.0 / scenario.block_len() as f64;
        Behavior {
            scenario,
            p: vec![v; scenario.table_len()],
        }
    }

    /// Builds a table from a closure over `(alpha, beta, a, b)` and validates it.
    pub fn from_fn<F>(scenario: Scenario, mut f: F) -> Result<Behavior>
    where
        F: FnMut(usize, usize, Outcome, Outcome) -> f64,
    {
        let mut p = vec![0.0; scenario.table_len()];
        for (alpha, beta) in scenario.pairs() {
            for &a in scenario.outcomes_a().outcomes() {
                for &b in scenario.outcomes_b().outcomes() {
                    p[scenario.index(alpha, beta, a.index(), b.index())] = f(alpha, beta, a, b);
                }
            }
        }
        Behavior::new(scenario, p)
    }

    pub(crate) fn from_parts_unchecked(scenario: Scenario, p: Vec<f64>) -> Behavior {
        debug_assert_eq!(p.len(), scenario.table_len());
        Behavior { scenario, p }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Flat table in `(alpha, beta, a, b)` order.
    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.p
    }

    pub fn get(&self, alpha: usize, beta: usize, a: Outcome, b: Outcome) -> f64 {
        self.p[self.scenario.index(alpha, beta, a.index(), b.index())]
    }

    pub fn block(&self, alpha: usize, beta: usize) -> &[f64] {
        let start = self.scenario.block_start(alpha, beta);
        &self.p[start..start + self.scenario.block_len()]
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        let s = &self.scenario;
        (0..s.settings_a())
            .map(|alpha| {
                (0..s.settings_b())
                    .map(|beta| {
                        (0..s.outcomes_a().size())
                            .map(|a| {
                                (0..s.outcomes_b().size())
                                    .map(|b| self.p[s.index(alpha, beta, a, b)])
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Outcome distribution of `side` when it uses `own_setting` and the
    /// distant side uses `other_setting`.
    pub fn side_marginal(&self, side: Side, own_setting: usize, other_setting: usize) -> Result<Vec<f64>> {
        let s = &self.scenario;
        s.check_setting(side, own_setting)?;
        let other = match side {
            Side::A => Side::B,
            Side::B => Side::A,
        };
        s.check_setting(other, other_setting)?;
        let (alpha, beta) = match side {
            Side::A => (own_setting, other_setting),
            Side::B => (other_setting, own_setting),
        };
        let na = s.outcomes_a().size();
        let nb = s.outcomes_b().size();
        let block = self.block(alpha, beta);
        let out = match side {
            Side::A => (0..na).map(|a| (0..nb).map(|b| block[a * nb + b]).sum()).collect(),
            Side::B => (0..nb).map(|b| (0..na).map(|a| block[a * nb + b]).sum()).collect(),
        };
        Ok(out)
    }

    /// Largest L∞ change of either side's marginal under a change of the
    /// distant setting. Zero means no output marginal depends on the
    /// distant input.
    pub fn nonsignalling_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for side in [Side::A, Side::B] {
            let (own, other) = match side {
                Side::A => (self.scenario.settings_a(), self.scenario.settings_b()),
                Side::B => (self.scenario.settings_b(), self.scenario.settings_a()),
            };
            for x in 0..own {
                let marginals: Vec<Vec<f64>> = (0..other)
                    .map(|y| self.side_marginal(side, x, y).expect("settings in range"))
                    .collect();
                for i in 0..other {
                    for j in i + 1..other {
                        for (u, v) in marginals[i].iter().zip(&marginals[j]) {
                            worst = worst.max((u - v).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Permutes one side's outcome axis: the new outcome `perm[o]` receives
    /// the mass of old outcome `o`.
    pub fn relabel_outputs(&self, side: Side, perm: &[Outcome]) -> Result<Behavior> {
        let alphabet = self.scenario.alphabet(side);
        check_permutation(alphabet, perm)?;
        let s = self.scenario;
        let mut p = vec![0.0; s.table_len()];
        for (alpha, beta) in s.pairs() {
            for a in 0..s.outcomes_a().size() {
                for b in 0..s.outcomes_b().size() {
                    let (na, nb) = match side {
                        Side::A => (perm[a].index(), b),
                        Side::B => (a, perm[b].index()),
                    };
                    p[s.index(alpha, beta, na, nb)] = self.p[s.index(alpha, beta, a, b)];
                }
            }
        }
        Ok(Behavior { scenario: s, p })
    }

    /// Swaps `+` and `-` on one side, leaving `∅` in place.
    pub fn swap_outputs(&self, side: Side) -> Behavior {
        let perm: Vec<Outcome> = match self.scenario.alphabet(side) {
            Alphabet::PlusMinus => vec![Outcome::Minus, Outcome::Plus],
            Alphabet::PlusMinusNull => vec![Outcome::Minus, Outcome::Plus, Outcome::Null],
        };
        self.relabel_outputs(side, &perm).expect("swap is a valid permutation")
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &Behavior, weight: f64) -> Result<Behavior> {
        if self.scenario != other.scenario {
            return Err(Error::ScenarioMismatch);
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidArgument(format!("mixing weight {weight} outside [0, 1]")));
        }
        let p = self
            .p
            .iter()
            .zip(&other.p)
            .map(|(x, y)| weight * x + (1.0 - weight) * y)
            .collect();
        Behavior::new(self.scenario, p)
    }

    /// Largest absolute cell difference.
    pub fn max_abs_diff(&self, other: &Behavior) -> Result<f64> {
        if self.scenario != other.scenario {
            return Err(Error::ScenarioMismatch);
        }
        Ok(self
            .p
            .iter()
            .zip(&other.p)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }
}

/// Free-function form of [`Behavior::new`] over a nested table.
pub fn validate_behavior(scenario: Scenario, raw: &[Vec<Vec<Vec<f64>>>]) -> Result<Behavior> {
    Behavior::from_nested(scenario, raw)
}

pub(crate) fn flatten_nested<T: Copy>(scenario: &Scenario, raw: &[Vec<Vec<Vec<T>>>]) -> Result<Vec<T>> {
    let mismatch = || Error::ShapeMismatch {
        expected: scenario.table_len(),
        found: raw
            .iter()
            .flat_map(|x| x.iter().flat_map(|y| y.iter().map(|z| z.len())))
            .sum(),
    };
    if raw.len() != scenario.settings_a() {
        return Err(mismatch());
    }
    let mut out = Vec::with_capacity(scenario.table_len());
    for row in raw {
        if row.len() != scenario.settings_b() {
            return Err(mismatch());
        }
        for block in row {
            if block.len() != scenario.outcomes_a().size() {
                return Err(mismatch());
            }
            for line in block {
                if line.len() != scenario.outcomes_b().size() {
                    return Err(mismatch());
                }
                out.extend_from_slice(line);
            }
        }
    }
    Ok(out)
}

fn check_permutation(alphabet: Alphabet, perm: &[Outcome]) -> Result<()> {
    if perm.len() != alphabet.size() {
        return Err(Error::BadPermutation(format!(
            "expected {} symbols, got {}",
            alphabet.size(),
            perm.len()
        )));
    }
    let mut seen = [false; 3];
    for &o in perm {
        if !alphabet.contains(o) {
            return Err(Error::BadPermutation(format!("{o} not in alphabet")));
        }
        if std::mem::replace(&mut seen[o.index()], true) {
            return Err(Error::BadPermutation(format!("{o} repeated")));
        }
    }
    Ok(())
}
