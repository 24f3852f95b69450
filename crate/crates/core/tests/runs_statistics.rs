use bellbox::prelude::*;
use bellbox::runs::chi_square_sf;

fn geometry() -> Geometry {
    Geometry::new(400.0, 1e-6).unwrap()
}

fn wigner_target() -> Behavior {
    let plan = MeasurementPlan::from_degrees(&[120.0, 0.0, 60.0], &[120.0, 0.0, 60.0]).unwrap();
    behavior_from_state(&PureTwoQubitState::singlet(), &plan).unwrap().swap_outputs(Side::B)
}

#[test]
fn same_seed_same_stream() {
    let b = wigner_target();
    let r1: Vec<RunRecord> = simulate_stream(&b, 1000, 7, 3, geometry()).unwrap().collect();
    let r2: Vec<RunRecord> = simulate_stream(&b, 1000, 7, 3, geometry()).unwrap().collect();
    assert_eq!(r1, r2);
    let other: Vec<RunRecord> = simulate_stream(&b, 1000, 7, 4, geometry()).unwrap().collect();
    assert_ne!(r1, other);
    let reseeded: Vec<RunRecord> = simulate_stream(&b, 1000, 8, 3, geometry()).unwrap().collect();
    assert_ne!(r1, reseeded);
}

#[test]
fn records_respect_timing_and_indices() {
    let g = geometry();
    for (k, r) in simulate(&wigner_target(), 500, 1, g).unwrap().enumerate() {
        assert_eq!(r.index, k as u64);
        assert!(r.t_choice_a >= -g.duration_s && r.t_choice_a < 0.0);
        assert!(r.t_choice_b >= -g.duration_s && r.t_choice_b < 0.0);
        assert_eq!(r.t_report, g.duration_s);
        assert!(r.alpha < 3 && r.beta < 3);
    }
}

#[test]
fn zero_runs_rejected() {
    assert!(matches!(simulate(&wigner_target(), 0, 1, geometry()), Err(Error::NoRuns)));
}

#[test]
fn merged_streams_match_single_stream() {
    let b = wigner_target();
    let s = *b.scenario();
    let mut merged = Tally::empty(s);
    for id in 0..4 {
        merged.merge(&tally(s, simulate_stream(&b, 50_000, 99, id, geometry()).unwrap()).unwrap()).unwrap();
    }
    let single = tally(s, simulate(&b, 200_000, 100, geometry()).unwrap()).unwrap();

    // two-sample chi-square homogeneity over the 36 cells
    let (n1, n2) = (merged.grand_total() as f64, single.grand_total() as f64);
    let mut chi = 0.0;
    let mut dof = 0usize;
    for (&x, &y) in merged.counts().iter().zip(single.counts()) {
        let total = (x + y) as f64;
        if total == 0.0 {
            continue;
        }
        let e1 = total * n1 / (n1 + n2);
        let e2 = total * n2 / (n1 + n2);
        chi += (x as f64 - e1).powi(2) / e1 + (y as f64 - e2).powi(2) / e2;
        dof += 1;
    }
    let p = chi_square_sf(chi, dof - 1);
    assert!(p > 0.001, "chi {chi} dof {} p {p}", dof - 1);
}

#[test]
fn estimates_consistent_across_seeds() {
    let b = wigner_target();
    let s = *b.scenario();
    let n = 1_000_000u64;
    for seed in 0..20 {
        let t = tally(s, simulate(&b, n, 1000 + seed, geometry()).unwrap()).unwrap();
        let (est, stderr) = estimate(&t).unwrap();
        for (alpha, beta) in s.pairs() {
            let nab = t.total(alpha, beta) as f64;
            for k in 0..4 {
                let idx = s.block_start(alpha, beta) + k;
                let p = b.as_slice()[idx];
                let sigma = (p * (1.0 - p) / nab).sqrt();
                let diff = (est.as_slice()[idx] - p).abs();
                // exact zeros are never sampled
                assert!(diff <= 5.0 * sigma + 1e-15, "seed {seed} cell {idx}: {diff} vs {sigma}");
                assert!(stderr[idx] >= 0.0);
            }
        }
    }
}

#[test]
fn randomness_audit_accepts_fair_choices() {
    let b = wigner_target();
    let t = tally(*b.scenario(), simulate(&b, 100_000, 5, geometry()).unwrap()).unwrap();
    let audit = randomness_audit(&t).unwrap();
    assert_eq!(audit.dof_uniformity, 8);
    assert_eq!(audit.dof_independence, 4);
    assert!(audit.p_value_uniformity > 1e-4);
    assert!(audit.p_value_independence > 1e-4);
}

#[test]
fn chained_wigner_estimate_near_target() {
    let b = wigner_target();
    let s = *b.scenario();
    let t = tally(s, simulate(&b, 1_000_000, 21, geometry()).unwrap()).unwrap();
    let (value, sigma) = functional_interval(&t, &wigner_chained(&s, 1, 2, 0).unwrap()).unwrap();
    assert!((value + 0.125).abs() <= 5.0 * sigma, "{value} ± {sigma}");
    assert!(value < 0.0);
}
