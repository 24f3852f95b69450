//! Port structure of a two-sided black box: how many settings each side
//! accepts and which outcome symbols each side can report.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the two stations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// An outcome symbol. The no-detection symbol `Null` is always the last index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
    Null,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Plus, Outcome::Minus, Outcome::Null];

    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
            Outcome::Null => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Outcome> {
        Self::ALL.get(i).copied()
    }

    /// File symbol: `"+"`, `"-"`, or `"0"` for no detection.
    pub fn symbol(self) -> &'static str {
        match self {
            Outcome::Plus => "+",
            Outcome::Minus => "-",
            Outcome::Null => "0",
        }
    }

    pub fn from_symbol(s: &str) -> Result<Outcome> {
        match s {
            "+" => Ok(Outcome::Plus),
            "-" => Ok(Outcome::Minus),
            "0" => Ok(Outcome::Null),
            other => Err(Error::Parse(format!("unknown outcome symbol {other:?}"))),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Outcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Outcome::from_symbol(&s).map_err(serde::de::Error::custom)
    }
}

/// Outcome alphabet of one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// `{+, -}`
    PlusMinus,
    /// `{+, -, ∅}`
    PlusMinusNull,
}

impl Alphabet {
    pub fn size(self) -> usize {
        match self {
            Alphabet::PlusMinus => 2,
            Alphabet::PlusMinusNull => 3,
        }
    }

    pub fn outcomes(self) -> &'static [Outcome] {
        &Outcome::ALL[..self.size()]
    }

    pub fn contains(self, o: Outcome) -> bool {
        o.index() < self.size()
    }

    pub fn symbols(self) -> Vec<String> {
        self.outcomes().iter().map(|o| o.symbol().to_string()).collect()
    }

    pub fn from_symbols(symbols: &[String]) -> Result<Alphabet> {
        match symbols {
            [p, m] if p == "+" && m == "-" => Ok(Alphabet::PlusMinus),
            [p, m, n] if p == "+" && m == "-" && n == "0" => Ok(Alphabet::PlusMinusNull),
            _ => Err(Error::Parse(format!(
                "alphabet must be [\"+\",\"-\"] or [\"+\",\"-\",\"0\"], got {symbols:?}"
            ))),
        }
    }
}

/// Setting counts and outcome alphabets for the two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scenario {
    settings_a: usize,
    settings_b: usize,
    outcomes_a: Alphabet,
    outcomes_b: Alphabet,
}

impl Scenario {
    pub fn new(
        settings_a: usize,
        settings_b: usize,
        outcomes_a: Alphabet,
        outcomes_b: Alphabet,
    ) -> Result<Scenario> {
        if settings_a == 0 || settings_b == 0 {
            return Err(Error::InvalidArgument(
                "each side needs at least one setting".into(),
            ));
        }
        Ok(Scenario {
            settings_a,
            settings_b,
            outcomes_a,
            outcomes_b,
        })
    }

    /// `settings` per side, `{+,-}` outcomes on both.
    pub fn binary(settings: usize) -> Result<Scenario> {
        Scenario::new(settings, settings, Alphabet::PlusMinus, Alphabet::PlusMinus)
    }

    /// `settings` per side, `{+,-,∅}` outcomes on both.
    pub fn ternary(settings: usize) -> Result<Scenario> {
        Scenario::new(
            settings,
            settings,
            Alphabet::PlusMinusNull,
            Alphabet::PlusMinusNull,
        )
    }

    pub fn settings_a(&self) -> usize {
        self.settings_a
    }

    pub fn settings_b(&self) -> usize {
        self.settings_b
    }

    pub fn outcomes_a(&self) -> Alphabet {
        self.outcomes_a
    }

    pub fn outcomes_b(&self) -> Alphabet {
        self.outcomes_b
    }

    pub fn settings(&self, side: Side) -> usize {
        match side {
            Side::A => self.settings_a,
            Side::B => self.settings_b,
        }
    }

    pub fn alphabet(&self, side: Side) -> Alphabet {
        match side {
            Side::A => self.outcomes_a,
            Side::B => self.outcomes_b,
        }
    }

    pub fn with_alphabets(&self, outcomes_a: Alphabet, outcomes_b: Alphabet) -> Scenario {
        Scenario {
            outcomes_a,
            outcomes_b,
            ..*self
        }
    }

    pub fn is_binary(&self) -> bool {
        self.outcomes_a == Alphabet::PlusMinus && self.outcomes_b == Alphabet::PlusMinus
    }

    pub fn is_ternary(&self) -> bool {
        self.outcomes_a == Alphabet::PlusMinusNull && self.outcomes_b == Alphabet::PlusMinusNull
    }

    /// Number of outcome pairs in one `(alpha, beta)` block.
    pub fn block_len(&self) -> usize {
        self.outcomes_a.size() * self.outcomes_b.size()
    }

    pub fn setting_pairs(&self) -> usize {
        self.settings_a * self.settings_b
    }

    /// Total number of cells in a table laid out as `(alpha, beta, a, b)`.
    pub fn table_len(&self) -> usize {
        self.setting_pairs() * self.block_len()
    }

    /// Flat offset of cell `(alpha, beta, a, b)`, row-major.
    #[inline]
    pub fn index(&self, alpha: usize, beta: usize, a: usize, b: usize) -> usize {
        debug_assert!(alpha < self.settings_a && beta < self.settings_b);
        debug_assert!(a < self.outcomes_a.size() && b < self.outcomes_b.size());
        ((alpha * self.settings_b + beta) * self.outcomes_a.size() + a) * self.outcomes_b.size() + b
    }

    /// Offset of the first cell of block `(alpha, beta)`.
    #[inline]
    pub fn block_start(&self, alpha: usize, beta: usize) -> usize {
        (alpha * self.settings_b + beta) * self.block_len()
    }

    pub fn check_setting(&self, side: Side, setting: usize) -> Result<()> {
        let count = self.settings(side);
        if setting >= count {
            return Err(Error::SettingOutOfRange {
                side,
                setting,
                count,
            });
        }
        Ok(())
    }

    /// Iterates `(alpha, beta)` in layout order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let sb = self.settings_b;
        (0..self.settings_a).flat_map(move |alpha| (0..sb).map(move |beta| (alpha, beta)))
    }
}
