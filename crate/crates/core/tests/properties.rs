use bellbox::io::{behavior_from_json, behavior_to_json};
use bellbox::prelude::*;
use bellbox::quantum::Amplitude;
use proptest::prelude::*;

fn binary(n: usize) -> Scenario {
    Scenario::binary(n).unwrap()
}

/// Arbitrary (possibly signalling) behavior: each block is a normalized
/// vector of positive weights.
fn any_behavior(n: usize) -> impl Strategy<Value = Behavior> {
    let s = binary(n);
    prop::collection::vec(0.01f64..1.0, s.table_len()).prop_map(move |raw| {
        let mut p = raw;
        for block in p.chunks_mut(s.block_len()) {
            let total: f64 = block.iter().sum();
            block.iter_mut().for_each(|x| *x /= total);
        }
        Behavior::new(s, p).unwrap()
    })
}

fn quantum_behavior(n: usize) -> impl Strategy<Value = Behavior> {
    (
        prop::collection::vec(-1.0f64..1.0, 8),
        prop::collection::vec(-3.2f64..3.2, n),
        prop::collection::vec(-3.2f64..3.2, n),
    )
        .prop_filter("nonzero state", |(amps, _, _)| amps.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|(amps, ta, tb)| {
            let norm = amps.iter().map(|x| x * x).sum::<f64>().sqrt();
            let a: Vec<Amplitude> = amps.chunks(2).map(|c| Amplitude::new(c[0] / norm, c[1] / norm)).collect();
            let state = PureTwoQubitState::new([a[0], a[1], a[2], a[3]]).unwrap();
            behavior_from_state(&state, &MeasurementPlan::new(ta, tb).unwrap()).unwrap()
        })
}

fn flip() -> Vec<Outcome> {
    vec![Outcome::Minus, Outcome::Plus]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functional_evaluation_is_linear(
        b1 in any_behavior(2),
        b2 in any_behavior(2),
        w in 0.0f64..=1.0,
        coeffs in prop::collection::vec(-2.0f64..2.0, 16),
    ) {
        let f = BellFunctional::new(binary(2), coeffs, 0.0, Direction::AtLeast).unwrap();
        let mixed = b1.mix(&b2, w).unwrap();
        let lhs = f.evaluate(&mixed).unwrap();
        let rhs = w * f.evaluate(&b1).unwrap() + (1.0 - w) * f.evaluate(&b2).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn defect_is_relabeling_invariant(b in any_behavior(3), side_a in any::<bool>()) {
        let side = if side_a { Side::A } else { Side::B };
        let r = b.relabel_outputs(side, &flip()).unwrap();
        prop_assert!((r.nonsignalling_defect() - b.nonsignalling_defect()).abs() <= 1e-15);
        // relabeling twice is the identity
        let twice = r.relabel_outputs(side, &flip()).unwrap();
        prop_assert_eq!(twice.as_slice(), b.as_slice());
    }

    #[test]
    fn classification_is_relabeling_invariant(b in quantum_behavior(3), side_a in any::<bool>()) {
        let side = if side_a { Side::A } else { Side::B };
        let r = b.relabel_outputs(side, &flip()).unwrap();
        let k0 = classify(&b, DEFAULT_TOL).unwrap().kind;
        let k1 = classify(&r, DEFAULT_TOL).unwrap().kind;
        prop_assert_eq!(k0, k1);
    }

    #[test]
    fn visibility_grows_with_noise(b in quantum_behavior(2), w1 in 0.05f64..1.0, w2 in 0.05f64..1.0) {
        let (lo, hi) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
        let u = Behavior::uniform(*b.scenario());
        let v_lo = local_visibility(&b.mix(&u, lo).unwrap()).unwrap();
        let v_hi = local_visibility(&b.mix(&u, hi).unwrap()).unwrap();
        prop_assert!(v_lo >= v_hi - 1e-9);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&v_hi));
    }

    #[test]
    fn post_selection_undoes_fair_sampling(b in any_behavior(2), ea in 0.01f64..=1.0, eb in 0.01f64..=1.0) {
        let q = apply_fair_sampling(&b, ea, eb).unwrap();
        let (back, rates) = post_select(&q).unwrap();
        prop_assert!(back.max_abs_diff(&b).unwrap() <= 1e-12);
        for r in rates {
            prop_assert!((r - ea * eb).abs() <= 1e-12);
        }
    }

    #[test]
    fn tally_is_additive_over_concatenation(seed in any::<u64>(), n1 in 1u64..300, n2 in 1u64..300) {
        let s = binary(2);
        let b = Behavior::uniform(s);
        let g = Geometry::new(400.0, 1e-6).unwrap();
        let r1: Vec<RunRecord> = simulate_stream(&b, n1, seed, 0, g).unwrap().collect();
        let r2: Vec<RunRecord> = simulate_stream(&b, n2, seed, 1, g).unwrap().collect();
        let mut merged = tally(s, r1.clone()).unwrap();
        merged.merge(&tally(s, r2.clone()).unwrap()).unwrap();
        let joined = tally(s, r1.into_iter().chain(r2)).unwrap();
        prop_assert_eq!(merged.counts(), joined.counts());
        prop_assert_eq!(joined.grand_total(), n1 + n2);
    }

    #[test]
    fn behavior_json_round_trip(b in any_behavior(3)) {
        let text = behavior_to_json(&b).to_string();
        let back = behavior_from_json(&text).unwrap();
        prop_assert_eq!(back.as_slice(), b.as_slice());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn loophole_feasibility_is_monotone(b in quantum_behavior(2), e1 in 0.0f64..=1.0, e2 in 0.0f64..=1.0, weak in any::<bool>()) {
        let mode = if weak { ConstraintMode::Weak } else { ConstraintMode::Strict };
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let feasible_hi = construct_loophole_model(&b, hi, mode).unwrap().is_some();
        let feasible_lo = construct_loophole_model(&b, lo, mode).unwrap().is_some();
        prop_assert!(!feasible_hi || feasible_lo);
    }

    #[test]
    fn loophole_models_reproduce_target(b in quantum_behavior(2), eta in 0.0f64..0.7) {
        // below 2/3 every target admits a model
        let s = b.scenario().with_alphabets(Alphabet::PlusMinusNull, Alphabet::PlusMinusNull);
        let model = construct_loophole_model(&b, eta, ConstraintMode::Strict).unwrap();
        if eta <= 2.0 / 3.0 - 1e-6 {
            prop_assert!(model.is_some());
        }
        if let Some(m) = model {
            let q = m.behavior(&s).unwrap();
            for (alpha, beta) in s.pairs() {
                for a in [Outcome::Plus, Outcome::Minus] {
                    for bb in [Outcome::Plus, Outcome::Minus] {
                        let want = eta * eta * b.get(alpha, beta, a, bb);
                        prop_assert!((q.get(alpha, beta, a, bb) - want).abs() <= 1e-7);
                    }
                }
            }
            let (ra, rb) = click_rates(&q).unwrap();
            for r in ra.iter().chain(&rb) {
                prop_assert!((r - eta).abs() <= 1e-7, "rate {r} vs {eta}");
            }
        }
    }
}
