//! Two-qubit pure states measured along directions in the x–z plane.
//!
//! Spin-1/2 convention: setting angle `θ` measures `cos θ Z + sin θ X`, so
//! orthogonal outcomes sit at `θ` and `θ + π`. Polarizer angles must be
//! doubled before use.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// A complex amplitude as an explicit `(re, im)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Amplitude {
    pub re: f64,
    pub im: f64,
}

impl Amplitude {
    pub const fn new(re: f64, im: f64) -> Amplitude {
        Amplitude { re, im }
    }

    pub const fn real(re: f64) -> Amplitude {
        Amplitude { re, im: 0.0 }
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// `c00|00⟩ + c01|01⟩ + c10|10⟩ + c11|11⟩`, first index on side A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureTwoQubitState {
    amps: [Amplitude; 4],
}

impl PureTwoQubitState {
    /// Amplitudes ordered `c00, c01, c10, c11`.
    pub fn new(amps: [Amplitude; 4]) -> Result<PureTwoQubitState> {
        let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::StateNotNormalized(norm));
        }
        Ok(PureTwoQubitState { amps })
    }

    /// `(|01⟩ - |10⟩)/√2`
    pub fn singlet() -> PureTwoQubitState {
        PureTwoQubitState {
            amps: [
                Amplitude::default(),
                Amplitude::real(FRAC_1_SQRT_2),
                Amplitude::real(-FRAC_1_SQRT_2),
                Amplitude::default(),
            ],
        }
    }

    /// `(|00⟩ + |11⟩)/√2`
    pub fn phi_plus() -> PureTwoQubitState {
        PureTwoQubitState {
            amps: [
                Amplitude::real(FRAC_1_SQRT_2),
                Amplitude::default(),
                Amplitude::default(),
                Amplitude::real(FRAC_1_SQRT_2),
            ],
        }
    }

    /// `cos t |00⟩ + sin t |11⟩`; partially entangled for `0 < t < π/4`.
    pub fn partially_entangled(t: f64) -> PureTwoQubitState {
        PureTwoQubitState {
            amps: [
                Amplitude::real(t.cos()),
                Amplitude::default(),
                Amplitude::default(),
                Amplitude::real(t.sin()),
            ],
        }
    }

    pub fn amplitudes(&self) -> &[Amplitude; 4] {
        &self.amps
    }

    /// Parses `"singlet"`, `"phi_plus"`, or
    /// `"amps:re00,im00,re01,im01,re10,im10,re11,im11"`.
    pub fn parse(text: &str) -> Result<PureTwoQubitState> {
        match text.trim() {
            "singlet" => Ok(PureTwoQubitState::singlet()),
            "phi_plus" => Ok(PureTwoQubitState::phi_plus()),
            other => {
                let Some(list) = other.strip_prefix("amps:") else {
                    return Err(Error::Parse(format!("unknown state {other:?}")));
                };
                let vals = list
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                    .collect::<Result<Vec<f64>>>()?;
                if vals.len() != 8 {
                    return Err(Error::Parse(format!("amps needs 8 numbers, got {}", vals.len())));
                }
                let amp = |k: usize| Amplitude::new(vals[2 * k], vals[2 * k + 1]);
                PureTwoQubitState::new([amp(0), amp(1), amp(2), amp(3)])
            }
        }
    }
}

/// One measurement angle (radians) per setting on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    pub angles_a: Vec<f64>,
    pub angles_b: Vec<f64>,
}

impl MeasurementPlan {
    pub fn new(angles_a: Vec<f64>, angles_b: Vec<f64>) -> Result<MeasurementPlan> {
        if angles_a.is_empty() || angles_b.is_empty() {
            return Err(Error::PlanMismatch("each side needs at least one angle".into()));
        }
        if let Some(x) = angles_a.iter().chain(&angles_b).find(|x| !x.is_finite()) {
            return Err(Error::PlanMismatch(format!("non-finite angle {x}")));
        }
        Ok(MeasurementPlan { angles_a, angles_b })
    }

    pub fn from_degrees(a: &[f64], b: &[f64]) -> Result<MeasurementPlan> {
        MeasurementPlan::new(
            a.iter().map(|d| d.to_radians()).collect(),
            b.iter().map(|d| d.to_radians()).collect(),
        )
    }

    /// The binary scenario this plan measures.
    pub fn scenario(&self) -> Scenario {
        Scenario::new(
            self.angles_a.len(),
            self.angles_b.len(),
            crate::scenario::Alphabet::PlusMinus,
            crate::scenario::Alphabet::PlusMinus,
        )
        .expect("plan has at least one angle per side")
    }

    pub fn check(&self, s: &Scenario) -> Result<()> {
        if !s.is_binary() {
            return Err(Error::PlanMismatch("quantum behaviors use {+,-} outcomes".into()));
        }
        if self.angles_a.len() != s.settings_a() || self.angles_b.len() != s.settings_b() {
            return Err(Error::PlanMismatch(format!(
                "plan has {}x{} angles, scenario {}x{} settings",
                self.angles_a.len(),
                self.angles_b.len(),
                s.settings_a(),
                s.settings_b()
            )));
        }
        Ok(())
    }
}

/// Real eigenvectors of `cos θ Z + sin θ X` for outcomes `+` and `-`.
fn eigenvectors(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [[c, s], [-s, c]]
}

/// Outcome probabilities of measuring `state` with `plan`.
pub fn behavior_from_state(state: &PureTwoQubitState, plan: &MeasurementPlan) -> Result<Behavior> {
    behavior_in_scenario(state, plan, &plan.scenario())
}

pub fn behavior_in_scenario(state: &PureTwoQubitState, plan: &MeasurementPlan, s: &Scenario) -> Result<Behavior> {
    plan.check(s)?;
    let c = state.amplitudes();
    let mut p = vec![0.0; s.table_len()];
    for (alpha, beta) in s.pairs() {
        let u = eigenvectors(plan.angles_a[alpha]);
        let v = eigenvectors(plan.angles_b[beta]);
        for a in 0..2 {
            for b in 0..2 {
                let mut amp = Amplitude::default();
                for i in 0..2 {
                    for j in 0..2 {
                        let w = u[a][i] * v[b][j];
                        amp.re += w * c[2 * i + j].re;
                        amp.im += w * c[2 * i + j].im;
                    }
                }
                p[s.index(alpha, beta, a, b)] = amp.norm_sqr();
            }
        }
    }
    Behavior::new(*s, p)
}

/// Closed-form singlet outcome table `[p(++), p(+-), p(-+), p(--)]` for
/// angle difference `delta`.
pub fn singlet_joint(delta: f64) -> [f64; 4] {
    let c = delta.cos();
    let same = (1.0 - c) / 4.0;
    let diff = (1.0 + c) / 4.0;
    [same, diff, diff, same]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Outcome::{Minus, Plus};
    use std::f64::consts::{FRAC_PI_3, PI};

    #[test]
    fn singlet_closed_form_examples() {
        assert_eq!(singlet_joint(0.0), [0.0, 0.5, 0.5, 0.0]);
        let pi = singlet_joint(PI);
        assert!((pi[0] - 0.5).abs() < 1e-15 && pi[1].abs() < 1e-15);
        assert!((singlet_joint(FRAC_PI_3)[0] - 0.125).abs() < 1e-15);
    }

    #[test]
    fn singlet_equal_angles_anticorrelated() {
        let plan = MeasurementPlan::from_degrees(&[120.0, 0.0, 60.0], &[120.0, 0.0, 60.0]).unwrap();
        let b = behavior_from_state(&PureTwoQubitState::singlet(), &plan).unwrap();
        for x in 0..3 {
            assert!(b.get(x, x, Plus, Plus).abs() < 1e-15);
            assert!(b.get(x, x, Minus, Minus).abs() < 1e-15);
        }
    }

    #[test]
    fn parse_state_specs() {
        assert_eq!(PureTwoQubitState::parse("singlet").unwrap(), PureTwoQubitState::singlet());
        assert_eq!(PureTwoQubitState::parse("phi_plus").unwrap(), PureTwoQubitState::phi_plus());
        let h = FRAC_1_SQRT_2;
        let s = PureTwoQubitState::parse(&format!("amps:0,0,{h},0,0,{},0,0", -h)).unwrap();
        assert!((s.amplitudes()[2].im - (-h)).abs() < 1e-15);
        assert!(PureTwoQubitState::parse("amps:1,0,0,0").is_err());
        assert!(matches!(
            PureTwoQubitState::parse("amps:1,0,1,0,0,0,0,0"),
            Err(Error::StateNotNormalized(_))
        ));
        assert!(PureTwoQubitState::parse("ghz").is_err());
    }

    #[test]
    fn plan_mismatch() {
        let plan = MeasurementPlan::new(vec![0.0, 1.0], vec![0.0]).unwrap();
        let s = Scenario::binary(2).unwrap();
        assert!(matches!(
            behavior_in_scenario(&PureTwoQubitState::singlet(), &plan, &s),
            Err(Error::PlanMismatch(_))
        ));
        assert!(MeasurementPlan::new(vec![], vec![0.0]).is_err());
    }
}
