use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repcat::decoder::{
    build_matching_graph, correction_from_matching, detection_events, mwpm, pairing_weight,
    MatchingGraph, Partner, SyndromeHistory,
};
use repcat::montecarlo::Prepared;
use repcat::{ExperimentKind, NoiseConfig};

/// Exhaustive optimum over all perfect matchings with boundary copies.
fn brute_force(g: &MatchingGraph) -> u64 {
    fn go(g: &MatchingGraph, used: &mut Vec<bool>) -> u64 {
        let Some(i) = used.iter().position(|&u| !u) else {
            return 0;
        };
        used[i] = true;
        let mut best = g.boundary[i] as u64 + go(g, used);
        for j in i + 1..used.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(g.weights[i][j] as u64 + go(g, used));
                used[j] = false;
            }
        }
        used[i] = false;
        best
    }
    go(g, &mut vec![false; g.events.len()])
}

fn assert_valid(g: &MatchingGraph, pairing: &[(usize, Partner)]) {
    let mut seen = vec![0; g.events.len()];
    for &(i, p) in pairing {
        seen[i] += 1;
        if let Partner::Event(j) = p {
            seen[j] += 1;
        }
    }
    assert!(
        seen.iter().all(|&s| s == 1),
        "not a perfect matching: {pairing:?}"
    );
}

/// Random symmetric instances with arbitrary small weights.
fn synthetic_corpus() -> Vec<MatchingGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut out = Vec::new();
    for _ in 0..400 {
        let m = rng.gen_range(0..=10);
        let mut weights = vec![vec![0u32; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let w = rng.gen_range(1..12);
                weights[i][j] = w;
                weights[j][i] = w;
            }
        }
        let boundary = (0..m).map(|_| rng.gen_range(1..12)).collect();
        out.push(MatchingGraph {
            events: (0..m).map(|i| (i, 0)).collect(),
            nodes: (0..m).collect(),
            weights,
            boundary,
        });
    }
    out
}

/// Sparse random syndrome histories on real memory decoding graphs.
fn lattice_corpus() -> Vec<(usize, SyndromeHistory, MatchingGraph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut out = Vec::new();
    for d in [3usize, 5, 7] {
        let prep =
            Prepared::build(ExperimentKind::Memory, d, &NoiseConfig::new(0.01).unwrap()).unwrap();
        let rounds = prep.exp.decoders[0].rounds.len();
        let graph = &prep.geometry.graphs[&(0, rounds)];
        let mut kept = 0;
        while kept < 150 {
            let mut rows = vec![vec![false; d - 1]; rounds];
            for row in rows.iter_mut().take(rounds - 1) {
                for b in row.iter_mut() {
                    *b = rng.gen_bool(0.12);
                }
            }
            let h = SyndromeHistory::new(rows, true).unwrap();
            let ev = detection_events(&h);
            if ev.events.len() > 10 {
                continue;
            }
            let g = build_matching_graph(&ev, graph).unwrap();
            out.push((d, h, g));
            kept += 1;
        }
    }
    out
}

#[test]
fn mwpm_equals_brute_force_on_synthetic_graphs() {
    for g in synthetic_corpus() {
        let p = mwpm(&g).unwrap();
        assert_valid(&g, &p);
        assert_eq!(pairing_weight(&g, &p), brute_force(&g), "{g:?}");
    }
}

#[test]
fn mwpm_equals_brute_force_on_lattice_graphs() {
    for (_, _, g) in lattice_corpus() {
        let p = mwpm(&g).unwrap();
        assert_valid(&g, &p);
        assert_eq!(pairing_weight(&g, &p), brute_force(&g), "{:?}", g.events);
    }
}

#[test]
fn matching_is_deterministic() {
    for (_, _, g) in lattice_corpus().into_iter().take(60) {
        assert_eq!(mwpm(&g).unwrap(), mwpm(&g).unwrap());
    }
}

#[test]
fn correction_clears_final_syndrome() {
    for (d, h, g) in lattice_corpus() {
        let prep =
            Prepared::build(ExperimentKind::Memory, d, &NoiseConfig::new(0.01).unwrap()).unwrap();
        let graph = &prep.geometry.graphs[&(0, h.rounds())];
        let corr = correction_from_matching(&mwpm(&g).unwrap(), &g, graph);
        // The corrected data pattern must reproduce the last (reliable) row.
        let last = h.outcomes.last().unwrap();
        for (i, &o) in last.iter().enumerate() {
            let flip = (corr.data >> i ^ corr.data >> (i + 1)) & 1 == 1;
            assert_eq!(flip, o, "d={d} stabilizer {i}");
        }
    }
}
