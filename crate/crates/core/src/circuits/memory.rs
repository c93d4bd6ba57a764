//! Memory and transversal-gate experiments.

use super::builder::{Builder, Pool};
use super::{
    check_distance, BuildError, Directive, Experiment, ExperimentKind, LogicalOp, Scheduled,
    SyndromeDecoder,
};
use crate::circuit::{Block, Circuit, Gate, LayerTag};

/// Measurement of `X_i X_{i+1}` with one ancilla: the ancilla is the CNOT
/// control, so data phase flips are copied onto it.
pub fn build_stabilizer_measurement(i: usize, d: usize) -> Result<Circuit, BuildError> {
    check_distance(d)?;
    if i + 1 >= d {
        return Err(BuildError::Index(format!("stabilizer {i} for d={d}")));
    }
    let mut b = Builder::new(d);
    let a = b.data(Block::Target, i as isize);
    let c = b.data(Block::Target, i as isize + 1);
    let anc = b.ancillas(Pool::Syndrome(Block::Target), i + 1)[i];
    let tag = LayerTag::Syndrome {
        block: Block::Target,
        round: 0,
    };
    b.layer(vec![Gate::PrepPlus(anc)], tag);
    b.layer(vec![Gate::CNOT(anc, a)], tag);
    b.layer(vec![Gate::CNOT(anc, c)], tag);
    b.layer(vec![Gate::MeasX(anc)], tag);
    Ok(compact(b.finish()))
}

/// Drops qubits no gate touches and renumbers the rest.
fn compact(c: Circuit) -> Circuit {
    let n = c.qubits.len();
    let mut used = vec![false; n];
    for l in &c.layers {
        for g in &l.gates {
            for q in g.operands() {
                used[q] = true;
            }
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut qubits = Vec::new();
    for q in 0..n {
        if used[q] {
            map[q] = qubits.len();
            qubits.push(c.qubits[q]);
        }
    }
    let layers = c
        .layers
        .into_iter()
        .map(|mut l| {
            l.gates = l
                .gates
                .iter()
                .map(|g| {
                    let ops: Vec<usize> = g.operands().iter().map(|&q| map[q]).collect();
                    Gate::from_parts(g.kind(), &ops).expect("same arity")
                })
                .collect();
            l.readout = l
                .readout
                .iter()
                .filter(|&&q| used[q])
                .map(|&q| map[q])
                .collect();
            l.idle_scope = l
                .idle_scope
                .map(|s| s.into_iter().filter(|&q| used[q]).map(|q| map[q]).collect());
            l
        })
        .collect();
    Circuit {
        distance: c.distance,
        qubits,
        layers,
    }
}

/// `rounds` noisy rounds then one noiseless round on `blocks`; returns the
/// per-block record grid.
pub(crate) fn memory_cycle(
    b: &mut Builder,
    blocks: &[Block],
    rounds: usize,
    first_round: usize,
) -> Vec<Vec<Vec<usize>>> {
    let mut grid = vec![Vec::new(); blocks.len()];
    let noisy = b.noisy;
    for r in 0..=rounds {
        b.noisy = noisy && r < rounds;
        let recs = b.syndrome_round(blocks, first_round + r, Default::default());
        for (g, rec) in grid.iter_mut().zip(recs) {
            g.push(rec);
        }
    }
    b.noisy = noisy;
    grid
}

fn single_block(kind: ExperimentKind, b: Builder, rounds: Vec<Vec<usize>>) -> Experiment {
    let mut b = b;
    let data = b.block(Block::Target);
    let last = b.num_layers() - 1;
    Experiment {
        kind,
        distance: b.d(),
        circuit: b.finish(),
        decoders: vec![SyndromeDecoder {
            block: Block::Target,
            data,
            rounds,
            cz_window: None,
        }],
        schedule: vec![Scheduled {
            after_layer: last,
            directive: Directive::Decode {
                decoder: 0,
                rounds: usize::MAX,
            },
        }],
        criterion: vec![LogicalOp::ZL(Block::Target)],
    }
}

/// Fixes `Decode { rounds: usize::MAX }` placeholders to the full history.
pub(crate) fn resolve_full_decodes(e: &mut Experiment) {
    for s in &mut e.schedule {
        if let Directive::Decode { decoder, rounds } = &mut s.directive {
            if *rounds == usize::MAX {
                *rounds = e.decoders[*decoder].rounds.len();
            }
        }
    }
}

/// `rounds` noisy rounds of stabilizer measurement followed by a perfect
/// round, decoded jointly.
pub fn build_memory_experiment(d: usize, rounds: usize) -> Result<Experiment, BuildError> {
    check_distance(d)?;
    let mut b = Builder::new(d);
    b.block(Block::Target);
    let grid = memory_cycle(&mut b, &[Block::Target], rounds, 0);
    let mut e = single_block(ExperimentKind::Memory, b, grid.into_iter().next().unwrap());
    resolve_full_decodes(&mut e);
    Ok(e)
}

/// `|+>` on every data qubit followed by a full memory cycle.
pub fn build_prep_plus_l(d: usize) -> Result<Experiment, BuildError> {
    check_distance(d)?;
    let mut b = Builder::new(d);
    let data = b.block(Block::Target);
    let mut grid = Vec::new();
    let prep: Vec<Gate> = data.iter().map(|&q| Gate::PrepPlus(q)).collect();
    grid.push(
        b.syndrome_round(&[Block::Target], 0, [prep, vec![], vec![], vec![]])
            .remove(0),
    );
    let rest = memory_cycle(&mut b, &[Block::Target], d - 1, 1);
    grid.extend(rest.into_iter().next().unwrap());
    let mut e = single_block(ExperimentKind::PrepPlus, b, grid);
    resolve_full_decodes(&mut e);
    Ok(e)
}

/// Transversal `X` readout decoded by majority vote.
pub fn build_measure_xl(d: usize) -> Result<Experiment, BuildError> {
    check_distance(d)?;
    let mut b = Builder::new(d);
    let data = b.block(Block::Target);
    let records = b.layer(
        data.iter().map(|&q| Gate::MeasX(q)).collect(),
        LayerTag::Readout,
    );
    Ok(Experiment {
        kind: ExperimentKind::MeasXl,
        distance: d,
        circuit: b.finish(),
        decoders: vec![],
        schedule: vec![Scheduled {
            after_layer: 0,
            directive: Directive::Majority {
                records,
                op: LogicalOp::XL(Block::Target),
            },
        }],
        criterion: vec![LogicalOp::XL(Block::Target)],
    })
}

/// Transversal CNOT from block A to block C, then a memory cycle on both.
pub fn build_transversal_cnot(d: usize) -> Result<Experiment, BuildError> {
    check_distance(d)?;
    let mut b = Builder::new(d);
    let ctrl = b.block(Block::ControlA);
    let tgt = b.block(Block::Target);
    b.layer(
        ctrl.iter()
            .zip(&tgt)
            .map(|(&c, &t)| Gate::CNOT(c, t))
            .collect(),
        LayerTag::Transversal,
    );
    let mut grid = memory_cycle(&mut b, &[Block::ControlA, Block::Target], d, 0);
    let last = b.num_layers() - 1;
    let rounds_c = grid.pop().unwrap();
    let rounds_a = grid.pop().unwrap();
    let mut e = Experiment {
        kind: ExperimentKind::Cnot,
        distance: d,
        circuit: b.finish(),
        decoders: vec![
            SyndromeDecoder {
                block: Block::ControlA,
                data: ctrl,
                rounds: rounds_a,
                cz_window: None,
            },
            SyndromeDecoder {
                block: Block::Target,
                data: tgt,
                rounds: rounds_c,
                cz_window: None,
            },
        ],
        schedule: vec![
            Scheduled {
                after_layer: last,
                directive: Directive::Decode {
                    decoder: 0,
                    rounds: usize::MAX,
                },
            },
            Scheduled {
                after_layer: last,
                directive: Directive::Decode {
                    decoder: 1,
                    rounds: usize::MAX,
                },
            },
        ],
        criterion: vec![LogicalOp::ZL(Block::ControlA), LogicalOp::ZL(Block::Target)],
    };
    resolve_full_decodes(&mut e);
    Ok(e)
}
