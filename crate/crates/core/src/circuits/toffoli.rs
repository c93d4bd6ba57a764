//! Round-robin Toffoli constructions.
//!
//! Piece `P_k` applies `CCX(A_{i-k+1}, B_i, C_i)` for every `i`; the `d`
//! pieces together apply each `CCX(A_i, B_j, C_j)` exactly once.

use super::builder::{Builder, Pool};
use super::memory::{memory_cycle, resolve_full_decodes};
use super::{
    check_distance, BuildError, Directive, Experiment, ExperimentKind, LogicalOp, Scheduled,
    SyndromeDecoder,
};
use crate::circuit::{Block, Circuit, Gate, LayerTag};

const A: Block = Block::ControlA;
const B: Block = Block::ControlB;
const C: Block = Block::Target;

fn piece_gates(b: &mut Builder, k: usize) -> Vec<Gate> {
    (0..b.d() as isize)
        .map(|i| Gate::CCX(b.data(A, i - k as isize + 1), b.data(B, i), b.data(C, i)))
        .collect()
}

fn check_piece(k: usize, d: usize) -> Result<(), BuildError> {
    check_distance(d)?;
    if k == 0 || k > d {
        return Err(BuildError::Index(format!("piece {k} for d={d}")));
    }
    Ok(())
}

/// One transversal layer of `d` Toffoli gates.
pub fn build_round_robin_piece(k: usize, d: usize) -> Result<Circuit, BuildError> {
    check_piece(k, d)?;
    let mut b = Builder::new(d);
    b.block(A);
    b.block(B);
    b.block(C);
    let g = piece_gates(&mut b, k);
    b.layer(g, LayerTag::Piece { k });
    Ok(b.finish())
}

/// Gates of `S^A_{i,k}` with ancilla `anc`, one entry per layer.
fn gadget_a(b: &mut Builder, anc: usize, i: isize, k: isize) -> [Gate; 4] {
    [
        Gate::CNOT(anc, b.data(A, i)),
        Gate::CNOT(anc, b.data(A, i + 1)),
        Gate::CCX(anc, b.data(B, i), b.data(C, i)),
        Gate::CCX(anc, b.data(B, i + k), b.data(C, i + k)),
    ]
}

/// Gates of the modified `S^B_{i,k}` with ancilla `anc`.
fn gadget_b(b: &mut Builder, anc: usize, i: isize, k: isize) -> [Gate; 4] {
    [
        Gate::CNOT(anc, b.data(B, i)),
        Gate::CNOT(anc, b.data(B, i + 1)),
        Gate::CCX(anc, b.data(A, i + 1 - k), b.data(C, i)),
        Gate::CCX(anc, b.data(A, i + 1), b.data(C, i + 1)),
    ]
}

fn check_gadget(i: usize, k: usize, d: usize) -> Result<(), BuildError> {
    check_distance(d)?;
    if i + 1 >= d || k == 0 || k >= d {
        return Err(BuildError::Index(format!("gadget ({i},{k}) for d={d}")));
    }
    Ok(())
}

fn gadget_fragment(i: usize, k: usize, d: usize, modified_b: bool) -> Result<Circuit, BuildError> {
    check_gadget(i, k, d)?;
    let mut b = Builder::new(d);
    b.block(A);
    b.block(B);
    b.block(C);
    let pool = if modified_b {
        Pool::GadgetB
    } else {
        Pool::GadgetA
    };
    let anc = b.ancillas(pool, i + 1)[i];
    let tag = if modified_b {
        LayerTag::GadgetB { k }
    } else {
        LayerTag::GadgetA { k }
    };
    let gates = if modified_b {
        gadget_b(&mut b, anc, i as isize, k as isize)
    } else {
        gadget_a(&mut b, anc, i as isize, k as isize)
    };
    b.layer(vec![Gate::PrepPlus(anc)], tag);
    for g in gates {
        b.layer(vec![g], tag);
    }
    b.layer(vec![Gate::MeasX(anc)], tag);
    Ok(b.finish())
}

/// Measurement of `X^A_i X^A_{i+1} CX^{B,C}(i,i) CX^{B,C}(i+k,i+k)`.
pub fn build_clifford_stabilizer_gadget(
    i: usize,
    k: usize,
    d: usize,
) -> Result<Circuit, BuildError> {
    gadget_fragment(i, k, d, false)
}

/// Measurement of `X^B_i X^B_{i+1} CX^{A,C}(i+1-k,i) CX^{A,C}(i+1,i+1)`.
///
/// Only meaningful while the target block is in the codespace.
pub fn build_modified_b_stabilizer_gadget(
    i: usize,
    k: usize,
    d: usize,
) -> Result<Circuit, BuildError> {
    gadget_fragment(i, k, d, true)
}

fn steane_prep(b: &mut Builder) -> Vec<Gate> {
    b.ancilla_block().into_iter().map(Gate::PrepZeroL).collect()
}

fn steane_coupling(b: &mut Builder) {
    let anc = b.ancilla_block();
    let data = b.block(C);
    b.layer(
        anc.iter()
            .zip(&data)
            .map(|(&a, &t)| Gate::CNOT(a, t))
            .collect(),
        LayerTag::SteaneEc,
    );
}

fn steane_readout(b: &mut Builder) -> Vec<Gate> {
    b.ancilla_block().into_iter().map(Gate::MeasX).collect()
}

/// `|0>_L` ancilla block, transversal CNOT onto the target, `X` readout.
pub fn build_steane_ec(d: usize) -> Result<Circuit, BuildError> {
    check_distance(d)?;
    let mut b = Builder::new(d);
    let data = b.block(C);
    let prep = steane_prep(&mut b);
    b.readout_layer(prep, LayerTag::SteaneEc, &data);
    steane_coupling(&mut b);
    let readout = steane_readout(&mut b);
    b.readout_layer(readout, LayerTag::SteaneEc, &data);
    Ok(b.finish())
}

/// All `S^A_{i,k}` and modified `S^B_{i,k}` in eight layers, with `extra`
/// measurements merged into the preparation layer; returns the A, B and
/// `extra` records, the first two ordered by `i`.
fn gadget_stage(b: &mut Builder, k: usize, extra: Vec<Gate>) -> [Vec<usize>; 3] {
    let d = b.d();
    let anc_a = b.ancillas(Pool::GadgetA, d - 1);
    let anc_b = b.ancillas(Pool::GadgetB, d - 1);
    let ga: Vec<[Gate; 4]> = (0..d - 1)
        .map(|i| gadget_a(b, anc_a[i], i as isize, k as isize))
        .collect();
    let gb: Vec<[Gate; 4]> = (0..d - 1)
        .map(|i| gadget_b(b, anc_b[i], i as isize, k as isize))
        .collect();
    let tag = LayerTag::GadgetB { k };
    let served: Vec<usize> = b.block(A).into_iter().chain(b.block(B)).collect();
    let n_extra = extra.len();
    let mut prep: Vec<Gate> = extra;
    prep.extend(anc_a.iter().chain(&anc_b).map(|&q| Gate::PrepPlus(q)));
    let extra_recs = b.readout_layer(prep, tag, &served);
    debug_assert_eq!(extra_recs.len(), n_extra);
    for step in 0..2 {
        b.layer(
            ga.iter()
                .map(|g| g[step])
                .chain(gb.iter().map(|g| g[step]))
                .collect(),
            tag,
        );
    }
    for step in 2..4 {
        b.layer(
            ga.iter().map(|g| g[step]).collect(),
            LayerTag::GadgetA { k },
        );
    }
    for step in 2..4 {
        b.layer(gb.iter().map(|g| g[step]).collect(), tag);
    }
    let recs = b.readout_layer(
        anc_a
            .iter()
            .chain(&anc_b)
            .map(|&q| Gate::MeasX(q))
            .collect(),
        tag,
        &served,
    );
    [recs[..d - 1].to_vec(), recs[d - 1..].to_vec(), extra_recs]
}

/// Two reflections `s -> -s` then `s -> 1-s` of the physical A slots,
/// shifting their contents by one position.
fn swap_network(slots: &[usize]) -> [Vec<Gate>; 2] {
    let d = slots.len();
    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    for i in 0..d {
        let j1 = (d - i) % d;
        if i < j1 {
            r1.push(Gate::SWAP(slots[i], slots[j1]));
        }
        let j2 = (d + 1 - i) % d;
        if i < j2 {
            r2.push(Gate::SWAP(slots[i], slots[j2]));
        }
    }
    [r1, r2]
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    Concat,
    Swap,
    Ft,
    PerfectEc,
}

fn toffoli(d: usize, variant: Variant) -> Result<Experiment, BuildError> {
    check_distance(d)?;
    let mut b = Builder::new(d);
    let slots = b.block(A);
    b.block(B);
    let data_c = b.block(C);
    let (dec_a, dec_b, dec_c) = (0, 1, 2);
    let mut rounds = [Vec::new(), Vec::new(), Vec::new()];
    let mut schedule = Vec::new();
    let mut pieces = Vec::new();
    for k in 1..=d {
        let mut g = piece_gates(&mut b, k);
        if variant == Variant::Ft && k < d {
            g.extend(steane_prep(&mut b));
        }
        pieces.push(b.num_layers());
        b.layer(g, LayerTag::Piece { k });
        if k == d {
            break;
        }
        match variant {
            Variant::Concat | Variant::Swap | Variant::PerfectEc => {
                let extra = if variant == Variant::Swap {
                    let [r1, r2] = swap_network(&slots);
                    [vec![], r1, r2, vec![]]
                } else {
                    Default::default()
                };
                b.noisy = variant != Variant::PerfectEc;
                let recs = b.syndrome_round(&[C], k - 1, extra);
                b.noisy = true;
                rounds[dec_c].push(recs.into_iter().next().unwrap());
                schedule.push(Scheduled {
                    after_layer: b.num_layers() - 1,
                    directive: Directive::Decode {
                        decoder: dec_c,
                        rounds: rounds[dec_c].len(),
                    },
                });
            }
            Variant::Ft => {
                steane_coupling(&mut b);
                let readout = steane_readout(&mut b);
                let readout_layer = b.num_layers();
                let [ra, rb, records] = gadget_stage(&mut b, k, readout);
                schedule.push(Scheduled {
                    after_layer: readout_layer,
                    directive: Directive::Steane {
                        records,
                        data: data_c.clone(),
                        undo_layer: pieces.last().copied(),
                    },
                });
                rounds[dec_a].push(ra);
                rounds[dec_b].push(rb);
            }
        }
    }
    let final_rounds = if variant == Variant::PerfectEc { 0 } else { d };
    let anc_c = b.ancillas(Pool::Syndrome(C), d - 1);
    b.scope = Some(data_c.iter().chain(&anc_c).copied().collect());
    let start = rounds[dec_c].len();
    let grid = memory_cycle(&mut b, &[C], final_rounds, start);
    rounds[dec_c].extend(grid.into_iter().next().unwrap());
    let after_c = b.num_layers() - 1;
    schedule.push(Scheduled {
        after_layer: after_c,
        directive: Directive::Decode {
            decoder: dec_c,
            rounds: usize::MAX,
        },
    });
    schedule.push(Scheduled {
        after_layer: after_c,
        directive: Directive::CzUndo { decoder: dec_c },
    });

    let data_a = b.block(A);
    let data_b = b.block(B);
    let anc_a = b.ancillas(Pool::Syndrome(A), d - 1);
    let anc_b = b.ancillas(Pool::Syndrome(B), d - 1);
    b.scope = Some(
        data_a
            .iter()
            .chain(&data_b)
            .chain(&anc_a)
            .chain(&anc_b)
            .copied()
            .collect(),
    );
    let start = rounds[dec_a].len();
    let mut grid = memory_cycle(&mut b, &[A, B], final_rounds, start).into_iter();
    rounds[dec_a].extend(grid.next().unwrap());
    rounds[dec_b].extend(grid.next().unwrap());
    b.scope = None;
    let last = b.num_layers() - 1;
    for dec in [dec_a, dec_b] {
        schedule.push(Scheduled {
            after_layer: last,
            directive: Directive::Decode {
                decoder: dec,
                rounds: usize::MAX,
            },
        });
    }

    let window = match variant {
        Variant::Ft => (pieces[d - 1], pieces[d - 1] + 1),
        _ => (pieces[0], pieces[d - 1] + 1),
    };
    let [ra, rb, rc] = rounds;
    let kind = match variant {
        Variant::Concat => ExperimentKind::ToffoliConcat,
        Variant::Swap => ExperimentKind::ToffoliSwap,
        Variant::Ft => ExperimentKind::ToffoliFt,
        Variant::PerfectEc => ExperimentKind::ToffoliPerfectEc,
    };
    let mut e = Experiment {
        kind,
        distance: d,
        circuit: b.finish(),
        decoders: vec![
            SyndromeDecoder {
                block: A,
                data: data_a,
                rounds: ra,
                cz_window: None,
            },
            SyndromeDecoder {
                block: B,
                data: data_b,
                rounds: rb,
                cz_window: None,
            },
            SyndromeDecoder {
                block: C,
                data: data_c,
                rounds: rc,
                cz_window: Some(window),
            },
        ],
        schedule,
        criterion: vec![
            LogicalOp::ZL(A),
            LogicalOp::ZL(B),
            LogicalOp::ZL(C),
            LogicalOp::CzL,
        ],
    };
    resolve_full_decodes(&mut e);
    Ok(e)
}

/// Pieces separated by one target syndrome round each, decoded on the
/// cumulative history; final memory cycle on all blocks with the
/// a-posteriori `CZ` undo before the control-block decode.
pub fn build_toffoli_concat_experiment(d: usize) -> Result<Experiment, BuildError> {
    toffoli(d, Variant::Concat)
}

/// As the concatenation variant, with block A permuted by two SWAP layers
/// between pieces so every Toffoli acts on a fixed local triple.
pub fn build_toffoli_swap_experiment(d: usize) -> Result<Experiment, BuildError> {
    toffoli(d, Variant::Swap)
}

/// Pieces separated by Steane EC on the target and a round of Clifford
/// stabilizer measurements on the controls.
pub fn build_toffoli_ft_experiment(d: usize) -> Result<Experiment, BuildError> {
    toffoli(d, Variant::Ft)
}

/// Noisy pieces only: target correction between pieces and the final
/// readout are noiseless.
pub fn build_toffoli_perfect_ec_experiment(d: usize) -> Result<Experiment, BuildError> {
    toffoli(d, Variant::PerfectEc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn ccx_triples(c: &Circuit) -> Vec<(usize, usize, usize)> {
        let idx = |q: usize| c.qubits[q].index;
        c.layers
            .iter()
            .flat_map(|l| &l.gates)
            .filter_map(|g| match *g {
                Gate::CCX(a, b, t) => Some((idx(a), idx(b), idx(t))),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn piece_instances() {
        assert_eq!(
            ccx_triples(&build_round_robin_piece(1, 3).unwrap()),
            vec![(0, 0, 0), (1, 1, 1), (2, 2, 2)]
        );
        assert_eq!(
            ccx_triples(&build_round_robin_piece(2, 3).unwrap()),
            vec![(2, 0, 0), (0, 1, 1), (1, 2, 2)]
        );
        assert!(build_round_robin_piece(0, 3).is_err());
    }

    #[test]
    fn piece_union_covers_each_pair_once() {
        for d in [3, 5, 7] {
            let mut seen = HashSet::new();
            for k in 1..=d {
                for (a, b, t) in ccx_triples(&build_round_robin_piece(k, d).unwrap()) {
                    assert_eq!(b, t);
                    assert!(seen.insert((a, b)));
                }
            }
            assert_eq!(seen.len(), d * d);
        }
    }

    #[test]
    fn gadget_support_is_six() {
        for d in [5, 7, 9] {
            for k in 1..d {
                for frag in [
                    build_clifford_stabilizer_gadget(0, k, d),
                    build_modified_b_stabilizer_gadget(1, k, d),
                ] {
                    let c = frag.unwrap();
                    let support: HashSet<usize> = c
                        .layers
                        .iter()
                        .flat_map(|l| &l.gates)
                        .flat_map(|g| g.operands())
                        .collect();
                    assert_eq!(support.len(), 7, "six data qubits plus the ancilla");
                }
            }
        }
        assert!(build_clifford_stabilizer_gadget(0, 3, 3).is_err());
    }

    #[test]
    fn toffoli_builders_validate() {
        for d in [3, 5] {
            for e in [
                build_toffoli_concat_experiment(d),
                build_toffoli_swap_experiment(d),
                build_toffoli_ft_experiment(d),
                build_toffoli_perfect_ec_experiment(d),
            ] {
                let e = e.unwrap();
                assert!(e.validate().is_empty(), "{:?}: {:?}", e.kind, e.validate());
            }
        }
    }

    #[test]
    fn concat_round_counts() {
        let e = build_toffoli_concat_experiment(3).unwrap();
        let pieces = e
            .circuit
            .layers
            .iter()
            .filter(|l| matches!(l.tag, LayerTag::Piece { .. }))
            .count();
        assert_eq!(pieces, 3);
        let intermediate = e
            .schedule
            .iter()
            .filter(
                |s| matches!(s.directive, Directive::Decode { decoder: 2, rounds } if rounds < 6),
            )
            .count();
        assert_eq!(intermediate, 2);
        assert_eq!(ccx_triples(&e.circuit).len(), 9);
    }

    #[test]
    fn swap_variant_uses_fixed_triples() {
        for d in [3, 5, 7] {
            let e = build_toffoli_swap_experiment(d).unwrap();
            let c = &e.circuit;
            for l in c
                .layers
                .iter()
                .filter(|l| matches!(l.tag, LayerTag::Piece { .. }))
            {
                for g in &l.gates {
                    if let Gate::CCX(a, b, t) = *g {
                        assert_eq!(c.qubits[a].index, c.qubits[t].index);
                        assert_eq!(c.qubits[b].index, c.qubits[t].index);
                    }
                }
            }
            let swap_layers = c
                .layers
                .iter()
                .filter(|l| l.gates.iter().any(|g| matches!(g, Gate::SWAP(..))))
                .count();
            assert_eq!(swap_layers, 2 * (d - 1));
            assert_eq!(ccx_triples(c).len(), d * d);
        }
    }

    #[test]
    fn modified_b_before_ec_is_flagged() {
        let mut e = build_toffoli_ft_experiment(3).unwrap();
        let steane: Vec<usize> = e
            .circuit
            .layers
            .iter()
            .enumerate()
            .filter(|(_, l)| l.tag == LayerTag::SteaneEc)
            .map(|(i, _)| i)
            .collect();
        for i in steane {
            e.circuit.layers[i].tag = LayerTag::Other;
        }
        assert!(e
            .validate()
            .iter()
            .any(|v| v.message.contains("modified-B gadget before target EC")));
    }
}
