use proptest::prelude::*;
use repcat::montecarlo::{
    enumerate_fault_sets, estimate_prepared, fault_list, run_trajectory, seed_stream, Anomaly,
    Prepared, StoppingRule,
};
use repcat::{ExperimentKind, NoiseConfig};
use std::collections::HashMap;

fn census(kind: ExperimentKind, d: usize, w: usize) -> usize {
    let cfg = NoiseConfig::new(0.01).unwrap();
    let prep = Prepared::build(kind, d, &cfg).unwrap();
    enumerate_fault_sets(&prep, &cfg, w, u64::MAX, 4)
        .unwrap()
        .failing
        .len()
}

#[test]
fn single_faults_are_corrected() {
    for kind in [
        ExperimentKind::Memory,
        ExperimentKind::PrepPlus,
        ExperimentKind::Cnot,
    ] {
        for d in [3, 5] {
            assert_eq!(census(kind, d, 1), 0, "{kind} d={d}");
        }
    }
}

#[test]
fn ft_toffoli_tolerates_one_fault_at_d5() {
    assert_eq!(census(ExperimentKind::ToffoliFt, 5, 1), 0);
}

#[test]
fn ft_toffoli_d3_has_a_failing_single_fault() {
    assert!(census(ExperimentKind::ToffoliFt, 3, 1) > 0);
}

#[test]
fn memory_d5_tolerates_two_faults() {
    assert_eq!(census(ExperimentKind::Memory, 5, 2), 0);
}

#[test]
fn zero_noise_runs_are_clean() {
    let cfg = NoiseConfig::noiseless();
    for kind in ExperimentKind::ALL {
        for d in [3, 5] {
            let prep = Prepared::build(kind, d, &cfg).unwrap();
            for i in 0..20 {
                let t = run_trajectory(&prep, &cfg, &mut seed_stream(1, i));
                assert!(
                    !t.is_failure() && t.anomaly.is_none(),
                    "{kind} d={d}: {t:?}"
                );
            }
        }
    }
}

#[test]
fn memory_d3_matches_weight_two_enumeration() {
    let p = 0.002;
    let cfg = NoiseConfig::new(p).unwrap();
    let prep = Prepared::build(ExperimentKind::Memory, 3, &cfg).unwrap();
    let probs: HashMap<_, _> = fault_list(&prep, &cfg).into_iter().collect();
    let c = enumerate_fault_sets(&prep, &cfg, 2, u64::MAX, 1).unwrap();
    // Probability of exactly this pair and nothing else on the other locations.
    let mut loc_p: HashMap<(usize, usize), f64> = HashMap::new();
    for (&(l, i, _), &q) in &probs {
        *loc_p.entry((l, i)).or_default() += q;
    }
    let quiet: f64 = loc_p.values().map(|q| 1.0 - q).product();
    let oracle: f64 = c
        .failing
        .iter()
        .map(|(s, _)| {
            s.iter()
                .map(|f| probs[f] / (1.0 - loc_p[&(f.0, f.1)]))
                .product::<f64>()
        })
        .sum::<f64>()
        * quiet;
    let e = estimate_prepared(
        &prep,
        &cfg,
        3,
        StoppingRule {
            min_failures: 1500,
            max_trajectories: 20_000_000,
        },
        1,
        None,
        false,
    );
    let rel = (e.p_l - oracle).abs() / oracle;
    assert!(
        rel < 0.1,
        "MC {:.4e} [{:.3e}, {:.3e}] vs oracle {oracle:.4e}",
        e.p_l,
        e.ci_lo,
        e.ci_hi
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Every block ends with a trivial syndrome after decoding.
    #[test]
    fn sampled_trajectories_close(
        kind in prop::sample::select(vec![ExperimentKind::Memory, ExperimentKind::PrepPlus, ExperimentKind::Cnot]),
        d in prop::sample::select(vec![3usize, 5, 7]),
        p in 0.005f64..0.05,
        seed in any::<u64>(),
    ) {
        let cfg = NoiseConfig::new(p).unwrap();
        let prep = Prepared::build(kind, d, &cfg).unwrap();
        for i in 0..20 {
            let t = run_trajectory(&prep, &cfg, &mut seed_stream(seed, i));
            prop_assert_ne!(t.anomaly, Some(Anomaly::NontrivialSyndrome));
        }
    }
}

#[test]
fn stopping_rule_precision() {
    let rule = StoppingRule::default();
    assert_eq!(rule.min_failures, 500);
    assert!(1.96 / (rule.min_failures as f64).sqrt() < 0.09);
}

#[test]
fn seed_streams_are_uncorrelated() {
    use rand::Rng;
    let n = 1_000_000;
    let (mut a, mut b) = (seed_stream(5, 0), seed_stream(5, 1));
    let mut sum = 0.0;
    for _ in 0..n {
        let x: f64 = a.gen::<f64>() - 0.5;
        let y: f64 = b.gen::<f64>() - 0.5;
        sum += x * y;
    }
    // Correlation of two uniforms; the standard error is 1/sqrt(n).
    let corr = sum / n as f64 * 12.0;
    assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "corr={corr}");
}
