//! Circuit builders for every simulated logical gadget, with their decoding
//! schedules and failure criteria.

mod builder;
mod memory;
mod toffoli;

pub use memory::{
    build_measure_xl, build_memory_experiment, build_prep_plus_l, build_stabilizer_measurement,
    build_transversal_cnot,
};
pub use toffoli::{
    build_clifford_stabilizer_gadget, build_modified_b_stabilizer_gadget, build_round_robin_piece,
    build_steane_ec, build_toffoli_concat_experiment, build_toffoli_ft_experiment,
    build_toffoli_perfect_ec_experiment, build_toffoli_swap_experiment,
};

use crate::circuit::{Block, Circuit, LayerTag, Violation};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("code distance must be odd and at least 3 (got {0})")]
    Distance(usize),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("unknown experiment '{0}'")]
    UnknownExperiment(String),
}

pub(crate) fn check_distance(d: usize) -> Result<(), BuildError> {
    if d < 3 || d % 2 == 0 || d > 63 {
        return Err(BuildError::Distance(d));
    }
    Ok(())
}

/// Builder selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Memory,
    PrepPlus,
    MeasXl,
    Cnot,
    ToffoliConcat,
    ToffoliFt,
    ToffoliSwap,
    /// Round-robin Toffoli with noiseless target correction between pieces.
    ToffoliPerfectEc,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Memory,
        ExperimentKind::PrepPlus,
        ExperimentKind::MeasXl,
        ExperimentKind::Cnot,
        ExperimentKind::ToffoliConcat,
        ExperimentKind::ToffoliFt,
        ExperimentKind::ToffoliSwap,
        ExperimentKind::ToffoliPerfectEc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Memory => "memory",
            ExperimentKind::PrepPlus => "prep_plus",
            ExperimentKind::MeasXl => "meas_xl",
            ExperimentKind::Cnot => "cnot",
            ExperimentKind::ToffoliConcat => "toffoli_concat",
            ExperimentKind::ToffoliFt => "toffoli_ft",
            ExperimentKind::ToffoliSwap => "toffoli_swap",
            ExperimentKind::ToffoliPerfectEc => "toffoli_perfect_ec",
        }
    }

    pub fn build(self, d: usize) -> Result<Experiment, BuildError> {
        match self {
            ExperimentKind::Memory => build_memory_experiment(d, d),
            ExperimentKind::PrepPlus => build_prep_plus_l(d),
            ExperimentKind::MeasXl => build_measure_xl(d),
            ExperimentKind::Cnot => build_transversal_cnot(d),
            ExperimentKind::ToffoliConcat => build_toffoli_concat_experiment(d),
            ExperimentKind::ToffoliFt => build_toffoli_ft_experiment(d),
            ExperimentKind::ToffoliSwap => build_toffoli_swap_experiment(d),
            ExperimentKind::ToffoliPerfectEc => build_toffoli_perfect_ec_experiment(d),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = BuildError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| BuildError::UnknownExperiment(s.to_string()))
    }
}

/// Logical operator whose failure is checked at the end of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicalOp {
    /// Phase flip of a block.
    ZL(Block),
    /// Wrong `X_L` readout of a block.
    XL(Block),
    /// Logical controlled-phase between the two control blocks.
    CzL,
}

impl fmt::Display for LogicalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = |b: &Block| match b {
            Block::ControlA => "A",
            Block::ControlB => "B",
            Block::Target => "C",
            Block::Ancilla => "anc",
            Block::AncillaBlock => "ancblock",
        };
        match self {
            LogicalOp::ZL(b) => write!(f, "Z_L^{}", tag(b)),
            LogicalOp::XL(b) => write!(f, "X_L^{}", tag(b)),
            LogicalOp::CzL => write!(f, "CZ_L^AB"),
        }
    }
}

/// Repetition-code syndrome history decoded by matching.
#[derive(Clone, Debug, PartialEq)]
pub struct SyndromeDecoder {
    pub block: Block,
    /// Dense qubits holding logical positions `0..d` when the decoder runs.
    pub data: Vec<usize>,
    /// Measurement records, `rounds[r][i]` for stabilizer `X_i X_{i+1}`.
    pub rounds: Vec<Vec<usize>>,
    /// Layers `[start, end)` whose Toffoli-generated `CZ` pairs are undone
    /// after this decoder's final call.
    pub cz_window: Option<(usize, usize)>,
}

/// Decoding step executed after a layer.
#[derive(Clone, Debug, PartialEq)]
pub enum Directive {
    /// Decodes the first `rounds` rounds of a decoder, treating the last as
    /// reliable, and applies the updated correction.
    Decode { decoder: usize, rounds: usize },
    /// Steane EC readout: minimal-weight correction of `data`. Each corrected
    /// qubit also cancels the `CZ` pair its error left at the `Toffoli` in
    /// layer `undo_layer`.
    Steane {
        records: Vec<usize>,
        data: Vec<usize>,
        undo_layer: Option<usize>,
    },
    /// Transversal readout decoded by majority vote.
    Majority { records: Vec<usize>, op: LogicalOp },
    /// Cancels the `CZ` pairs attributed to target faults by the decoder's
    /// final matching.
    CzUndo { decoder: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scheduled {
    pub after_layer: usize,
    pub directive: Directive,
}

/// A circuit plus its decoding schedule and failure criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub kind: ExperimentKind,
    pub distance: usize,
    pub circuit: Circuit,
    pub decoders: Vec<SyndromeDecoder>,
    pub schedule: Vec<Scheduled>,
    pub criterion: Vec<LogicalOp>,
}

impl Experiment {
    pub fn num_records(&self) -> usize {
        self.circuit.measurement_records().len()
    }

    /// Circuit invariants plus schedule consistency.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.circuit.validate();
        let records = self.circuit.measurement_records();
        let mut uses = vec![0usize; records.len()];
        let mut note = |r: usize, out: &mut Vec<Violation>| {
            if r < uses.len() {
                uses[r] += 1;
            } else {
                out.push(Violation {
                    layer: None,
                    qubit: None,
                    message: format!("record {r} out of range"),
                });
            }
        };
        for dec in &self.decoders {
            for round in &dec.rounds {
                for &r in round {
                    note(r, &mut out);
                }
            }
        }
        for s in &self.schedule {
            match &s.directive {
                Directive::Steane { records, .. } | Directive::Majority { records, .. } => {
                    for &r in records {
                        note(r, &mut out);
                    }
                }
                Directive::Decode { decoder, rounds } => match self.decoders.get(*decoder) {
                    None => out.push(Violation {
                        layer: Some(s.after_layer),
                        qubit: None,
                        message: format!("unknown decoder {decoder}"),
                    }),
                    Some(dec) => {
                        let last = dec.rounds[..*rounds]
                            .iter()
                            .flatten()
                            .map(|&r| records[r].0)
                            .max();
                        if last.map_or(false, |l| l > s.after_layer) {
                            out.push(Violation {
                                layer: Some(s.after_layer),
                                qubit: None,
                                message: "decode scheduled before its measurements".into(),
                            });
                        }
                    }
                },
                Directive::CzUndo { .. } => {}
            }
        }
        for (r, &u) in uses.iter().enumerate() {
            if u != 1 {
                out.push(Violation {
                    layer: Some(records[r].0),
                    qubit: Some(self.circuit.qubits[records[r].1]),
                    message: format!("measurement record {r} consumed {u} times"),
                });
            }
        }
        let mut ec_since_piece = true;
        for (l, layer) in self.circuit.layers.iter().enumerate() {
            match layer.tag {
                LayerTag::Piece { .. } => ec_since_piece = false,
                LayerTag::SteaneEc => ec_since_piece = true,
                LayerTag::GadgetB { .. } if !ec_since_piece => out.push(Violation {
                    layer: Some(l),
                    qubit: None,
                    message: "modified-B gadget before target EC".into(),
                }),
                _ => {}
            }
        }
        if self.criterion.is_empty() {
            out.push(Violation {
                layer: None,
                qubit: None,
                message: "empty failure criterion".into(),
            });
        }
        out
    }
}
