//! Simulated experimental runs: independent uniform settings chosen before
//! `t = 0`, outcomes reported at `t = T`, and the statistics computed from
//! the resulting run log.
//!
//! Streams come from ChaCha8 seeded with `seed` and positioned on
//! `stream_id`, so disjoint stream ids under one seed give independent
//! sub-streams. Bit-exact reproduction is promised within one build only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::functional::BellFunctional;
use crate::scenario::{Outcome, Scenario};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Station separation `L` and run duration `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub distance_m: f64,
    pub duration_s: f64,
}

impl Geometry {
    pub fn new(distance_m: f64, duration_s: f64) -> Result<Geometry> {
        if !(distance_m > 0.0) || !distance_m.is_finite() {
            return Err(Error::InvalidGeometry(format!("L = {distance_m} must be positive")));
        }
        if !(duration_s > 0.0) || !duration_s.is_finite() {
            return Err(Error::InvalidGeometry(format!("T = {duration_s} must be positive")));
        }
        Ok(Geometry {
            distance_m,
            duration_s,
        })
    }

    /// Parses `"L,T"` (meters, seconds).
    pub fn parse(s: &str) -> Result<Geometry> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [l, t] = parts[..] else {
            return Err(Error::Parse(format!("geometry must be L,T, got {s:?}")));
        };
        let num = |x: &str| x.parse::<f64>().map_err(|e| Error::Parse(format!("{x:?}: {e}")));
        Geometry::new(num(l)?, num(t)?)
    }

    pub fn light_distance(&self) -> f64 {
        self.duration_s * SPEED_OF_LIGHT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalityAudit {
    pub pass: bool,
    pub margin_meters: f64,
}

/// Passes iff `L > T c` strictly.
pub fn locality_audit(g: &Geometry) -> LocalityAudit {
    let margin = g.distance_m - g.light_distance();
    LocalityAudit {
        pass: margin > 0.0,
        margin_meters: margin,
    }
}

/// One run of the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    #[serde(rename = "i")]
    pub index: u64,
    pub alpha: usize,
    pub beta: usize,
    pub a: Outcome,
    pub b: Outcome,
    #[serde(rename = "tca")]
    pub t_choice_a: f64,
    #[serde(rename = "tcb")]
    pub t_choice_b: f64,
    #[serde(rename = "tr")]
    pub t_report: f64,
}

/// Iterator over simulated runs.
#[derive(Debug, Clone)]
pub struct Simulator {
    scenario: Scenario,
    cumulative: Vec<f64>,
    rng: ChaCha8Rng,
    geometry: Geometry,
    next_index: u64,
    end: u64,
}

impl Simulator {
    fn draw_outcomes(&mut self, alpha: usize, beta: usize) -> (Outcome, Outcome) {
        let s = &self.scenario;
        let len = s.block_len();
        let start = s.block_start(alpha, beta);
        let block = &self.cumulative[start..start + len];
        let u: f64 = self.rng.random();
        let k = block.iter().position(|&c| u < c).unwrap_or_else(|| {
            // u beyond the rounded total: take the last cell with mass
            (0..len).rev().find(|&k| k == 0 || block[k] > block[k - 1]).unwrap_or(len - 1)
        });
        let nb = s.outcomes_b().size();
        (Outcome::from_index(k / nb).unwrap(), Outcome::from_index(k % nb).unwrap())
    }

    fn choice_time(&mut self) -> f64 {
        let u: f64 = self.rng.random();
        -self.geometry.duration_s * (1.0 - u)
    }
}

impl Iterator for Simulator {
    type Item = RunRecord;

    fn next(&mut self) -> Option<RunRecord> {
        if self.next_index >= self.end {
            return None;
        }
        let alpha = self.rng.random_range(0..self.scenario.settings_a());
        let beta = self.rng.random_range(0..self.scenario.settings_b());
        let t_choice_a = self.choice_time();
        let t_choice_b = self.choice_time();
        let (a, b) = self.draw_outcomes(alpha, beta);
        let rec = RunRecord {
            index: self.next_index,
            alpha,
            beta,
            a,
            b,
            t_choice_a,
            t_choice_b,
            t_report: self.geometry.duration_s,
        };
        self.next_index += 1;
        Some(rec)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next_index) as usize;
        (n, Some(n))
    }
}

/// `n_runs` runs drawn from `b` on stream 0 of `seed`.
pub fn simulate(b: &Behavior, n_runs: u64, seed: u64, g: Geometry) -> Result<Simulator> {
    simulate_stream(b, n_runs, seed, 0, g)
}

/// As [`simulate`] on an explicit sub-stream. Run indices start at 0.
pub fn simulate_stream(b: &Behavior, n_runs: u64, seed: u64, stream_id: u64, g: Geometry) -> Result<Simulator> {
    if n_runs == 0 {
        return Err(Error::NoRuns);
    }
    let s = *b.scenario();
    let mut cumulative = Vec::with_capacity(s.table_len());
    for (alpha, beta) in s.pairs() {
        let mut acc = 0.0;
        for &p in b.block(alpha, beta) {
            acc += p.max(0.0);
            cumulative.push(acc);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    Ok(Simulator {
        scenario: s,
        cumulative,
        rng,
        geometry: g,
        next_index: 0,
        end: n_runs,
    })
}

/// Outcome counts per cell, in the `(alpha, beta, a, b)` layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    scenario: Scenario,
    counts: Vec<u64>,
    totals: Vec<u64>,
}

impl Tally {
    pub fn empty(scenario: Scenario) -> Tally {
        Tally {
            scenario,
            counts: vec![0; scenario.table_len()],
            totals: vec![0; scenario.setting_pairs()],
        }
    }

    /// Validates counts; totals are derived from them.
    pub fn from_counts(scenario: Scenario, counts: Vec<u64>) -> Result<Tally> {
        if counts.len() != scenario.table_len() {
            return Err(Error::ShapeMismatch {
                expected: scenario.table_len(),
                found: counts.len(),
            });
        }
        let totals = counts.chunks(scenario.block_len()).map(|c| c.iter().sum()).collect();
        Ok(Tally {
            scenario,
            counts,
            totals,
        })
    }

    pub fn from_records<I: IntoIterator<Item = RunRecord>>(scenario: Scenario, records: I) -> Result<Tally> {
        let mut t = Tally::empty(scenario);
        for r in records {
            t.record(&r)?;
        }
        Ok(t)
    }

    pub fn record(&mut self, r: &RunRecord) -> Result<()> {
        let s = &self.scenario;
        if r.alpha >= s.settings_a()
            || r.beta >= s.settings_b()
            || !s.outcomes_a().contains(r.a)
            || !s.outcomes_b().contains(r.b)
        {
            return Err(Error::MixedScenario(format!(
                "run {} ({}, {} -> {}, {})",
                r.index, r.alpha, r.beta, r.a, r.b
            )));
        }
        self.counts[s.index(r.alpha, r.beta, r.a.index(), r.b.index())] += 1;
        self.totals[r.alpha * s.settings_b() + r.beta] += 1;
        Ok(())
    }

    /// Adds `other` into `self`.
    pub fn merge(&mut self, other: &Tally) -> Result<()> {
        if self.scenario != other.scenario {
            return Err(Error::MixedScenario("tallies over different scenarios".into()));
        }
        for (x, y) in self.counts.iter_mut().zip(&other.counts) {
            *x += y;
        }
        for (x, y) in self.totals.iter_mut().zip(&other.totals) {
            *x += y;
        }
        Ok(())
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Runs per setting pair, `(alpha, beta)` layout order.
    pub fn totals(&self) -> &[u64] {
        &self.totals
    }

    pub fn total(&self, alpha: usize, beta: usize) -> u64 {
        self.totals[alpha * self.scenario.settings_b() + beta]
    }

    pub fn grand_total(&self) -> u64 {
        self.totals.iter().sum()
    }
}

/// Free-function form of [`Tally::from_records`].
pub fn tally<I: IntoIterator<Item = RunRecord>>(scenario: Scenario, records: I) -> Result<Tally> {
    Tally::from_records(scenario, records)
}

/// Point estimate `n / total` per block with Wald standard errors.
pub fn estimate(t: &Tally) -> Result<(Behavior, Vec<f64>)> {
    let s = t.scenario;
    let mut p = vec![0.0; s.table_len()];
    let mut se = vec![0.0; s.table_len()];
    for (alpha, beta) in s.pairs() {
        let total = t.total(alpha, beta);
        if total == 0 {
            return Err(Error::EmptySettingPair { alpha, beta });
        }
        let n = total as f64;
        let start = s.block_start(alpha, beta);
        for k in start..start + s.block_len() {
            let ph = t.counts[k] as f64 / n;
            p[k] = ph;
            se[k] = (ph * (1.0 - ph) / n).sqrt();
        }
    }
    Ok((Behavior::new(s, p)?, se))
}

/// Estimate of `f` on the tally and its standard error, treating each
/// setting pair as an independent multinomial sample.
pub fn functional_interval(t: &Tally, f: &BellFunctional) -> Result<(f64, f64)> {
    if *f.scenario() != t.scenario {
        return Err(Error::ScenarioMismatch);
    }
    let (b, _) = estimate(t)?;
    let value = f.evaluate(&b)?;
    let s = t.scenario;
    let c = f.coefficients();
    let mut var = 0.0;
    for (alpha, beta) in s.pairs() {
        let start = s.block_start(alpha, beta);
        let range = start..start + s.block_len();
        let mean: f64 = range.clone().map(|k| c[k] * b.as_slice()[k]).sum();
        let second: f64 = range.map(|k| c[k] * c[k] * b.as_slice()[k]).sum();
        var += ((second - mean * mean).max(0.0)) / t.total(alpha, beta) as f64;
    }
    Ok((value, var.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomnessAudit {
    pub chi_square_uniformity: f64,
    pub dof_uniformity: usize,
    pub p_value_uniformity: f64,
    pub chi_square_independence: f64,
    pub dof_independence: usize,
    pub p_value_independence: f64,
}

/// Pearson chi-square of the setting-pair histogram against the uniform
/// distribution and against the product of its own marginals.
pub fn randomness_audit(t: &Tally) -> Result<RandomnessAudit> {
    let s = t.scenario;
    let n = t.grand_total();
    if n == 0 {
        return Err(Error::InvalidArgument("randomness audit needs at least one run".into()));
    }
    let n = n as f64;
    let (sa, sb) = (s.settings_a(), s.settings_b());
    let obs = |alpha: usize, beta: usize| t.total(alpha, beta) as f64;

    let expected = n / (sa * sb) as f64;
    let uniformity: f64 = s.pairs().map(|(x, y)| (obs(x, y) - expected).powi(2) / expected).sum();

    let rows: Vec<f64> = (0..sa).map(|x| (0..sb).map(|y| obs(x, y)).sum()).collect();
    let cols: Vec<f64> = (0..sb).map(|y| (0..sa).map(|x| obs(x, y)).sum()).collect();
    let independence: f64 = s
        .pairs()
        .map(|(x, y)| {
            let e = rows[x] * cols[y] / n;
            if e > 0.0 {
                (obs(x, y) - e).powi(2) / e
            } else {
                0.0
            }
        })
        .sum();

    let dof_u = sa * sb - 1;
    let dof_i = (sa - 1) * (sb - 1);
    Ok(RandomnessAudit {
        chi_square_uniformity: uniformity,
        dof_uniformity: dof_u,
        p_value_uniformity: chi_square_sf(uniformity, dof_u),
        chi_square_independence: independence,
        dof_independence: dof_i,
        p_value_independence: chi_square_sf(independence, dof_i),
    })
}

/// Upper tail of the chi-square distribution; 1 for zero degrees of freedom.
pub fn chi_square_sf(x: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).map(|d| d.sf(x)).unwrap_or(f64::NAN)
}
