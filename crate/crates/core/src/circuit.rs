//! Circuit intermediate representation.
//!
//! Qubits are addressed by a dense index into [`Circuit::qubits`]; each index
//! maps back to a [`QubitRef`] (block and position). Gates within a layer act
//! on disjoint qubits, and qubits not touched by any gate idle for the layer.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Qubit block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    ControlA,
    ControlB,
    Target,
    /// Single-qubit syndrome or gadget ancillas.
    Ancilla,
    /// Logical `|0>_L` block used by Steane error correction.
    AncillaBlock,
}

impl Block {
    /// Data blocks are addressed modulo the distance.
    pub fn is_data(self) -> bool {
        matches!(self, Block::ControlA | Block::ControlB | Block::Target)
    }
}

/// Block-relative qubit address.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QubitRef {
    pub block: Block,
    pub index: usize,
}

impl QubitRef {
    pub fn new(block: Block, index: usize) -> Self {
        Self { block, index }
    }
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[{}]", self.block, self.index)
    }
}

/// Gate kinds of the bias-preserving set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Idle,
    PrepPlus,
    PrepZeroL,
    MeasX,
    PauliX,
    PauliZ,
    CZ,
    CNOT,
    CCX,
    SWAP,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Idle
            | GateKind::PrepPlus
            | GateKind::PrepZeroL
            | GateKind::MeasX
            | GateKind::PauliX
            | GateKind::PauliZ => 1,
            GateKind::CZ | GateKind::CNOT | GateKind::SWAP => 2,
            GateKind::CCX => 3,
        }
    }
}

/// A gate applied to dense qubit indices.
///
/// `CNOT(c, t)`, `CCX(a, b, t)`: controls first, target last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Idle(usize),
    PrepPlus(usize),
    PrepZeroL(usize),
    MeasX(usize),
    PauliX(usize),
    PauliZ(usize),
    CZ(usize, usize),
    CNOT(usize, usize),
    CCX(usize, usize, usize),
    SWAP(usize, usize),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Idle(_) => GateKind::Idle,
            Gate::PrepPlus(_) => GateKind::PrepPlus,
            Gate::PrepZeroL(_) => GateKind::PrepZeroL,
            Gate::MeasX(_) => GateKind::MeasX,
            Gate::PauliX(_) => GateKind::PauliX,
            Gate::PauliZ(_) => GateKind::PauliZ,
            Gate::CZ(..) => GateKind::CZ,
            Gate::CNOT(..) => GateKind::CNOT,
            Gate::CCX(..) => GateKind::CCX,
            Gate::SWAP(..) => GateKind::SWAP,
        }
    }

    pub fn operands(&self) -> Vec<usize> {
        match *self {
            Gate::Idle(q)
            | Gate::PrepPlus(q)
            | Gate::PrepZeroL(q)
            | Gate::MeasX(q)
            | Gate::PauliX(q)
            | Gate::PauliZ(q) => vec![q],
            Gate::CZ(a, b) | Gate::CNOT(a, b) | Gate::SWAP(a, b) => vec![a, b],
            Gate::CCX(a, b, t) => vec![a, b, t],
        }
    }

    /// Rebuilds a gate from a kind and operand list.
    pub fn from_parts(kind: GateKind, ops: &[usize]) -> Option<Gate> {
        if ops.len() != kind.arity() {
            return None;
        }
        Some(match kind {
            GateKind::Idle => Gate::Idle(ops[0]),
            GateKind::PrepPlus => Gate::PrepPlus(ops[0]),
            GateKind::PrepZeroL => Gate::PrepZeroL(ops[0]),
            GateKind::MeasX => Gate::MeasX(ops[0]),
            GateKind::PauliX => Gate::PauliX(ops[0]),
            GateKind::PauliZ => Gate::PauliZ(ops[0]),
            GateKind::CZ => Gate::CZ(ops[0], ops[1]),
            GateKind::CNOT => Gate::CNOT(ops[0], ops[1]),
            GateKind::CCX => Gate::CCX(ops[0], ops[1], ops[2]),
            GateKind::SWAP => Gate::SWAP(ops[0], ops[1]),
        })
    }

    /// First operand; unique per layer, so it keys fault locations.
    pub fn anchor(&self) -> usize {
        match *self {
            Gate::Idle(q)
            | Gate::PrepPlus(q)
            | Gate::PrepZeroL(q)
            | Gate::MeasX(q)
            | Gate::PauliX(q)
            | Gate::PauliZ(q)
            | Gate::CZ(q, _)
            | Gate::CNOT(q, _)
            | Gate::SWAP(q, _)
            | Gate::CCX(q, _, _) => q,
        }
    }
}

/// What a layer belongs to; used by the schedule validator and for debugging.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerTag {
    /// Part of syndrome extraction round `round` on `block`.
    Syndrome {
        block: Block,
        round: usize,
    },
    /// Round-robin Toffoli piece `k`.
    Piece {
        k: usize,
    },
    /// Clifford stabilizer gadgets on the control blocks.
    GadgetA {
        k: usize,
    },
    GadgetB {
        k: usize,
    },
    /// Steane error correction of the target.
    SteaneEc,
    /// Transversal logical gate.
    Transversal,
    /// Final readout or preparation layer.
    Readout,
    /// Routing swaps.
    Routing,
    Other,
}

/// One time step.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub gates: Vec<Gate>,
    /// Noiseless layers model the perfect final round.
    pub noisy: bool,
    /// Qubits subject to idle noise if untouched; `None` means all qubits.
    pub idle_scope: Option<Vec<usize>>,
    /// Data qubits whose ancillas are prepared or read out in this layer.
    pub readout: Vec<usize>,
    pub tag: LayerTag,
}

impl Layer {
    pub fn new(gates: Vec<Gate>, tag: LayerTag) -> Self {
        Self {
            gates,
            noisy: true,
            idle_scope: None,
            readout: Vec::new(),
            tag,
        }
    }
}

/// A noisy gate or idle slot; errors act right after it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Location {
    pub layer: usize,
    pub gate: Gate,
}

/// Gate-layer circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub distance: usize,
    pub qubits: Vec<QubitRef>,
    pub layers: Vec<Layer>,
}

/// One breach of a circuit invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub layer: Option<usize>,
    pub qubit: Option<QubitRef>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.layer, self.qubit) {
            (Some(l), Some(q)) => write!(f, "layer {l}, qubit {q}: {}", self.message),
            (Some(l), None) => write!(f, "layer {l}: {}", self.message),
            (None, Some(q)) => write!(f, "qubit {q}: {}", self.message),
            (None, None) => write!(f, "{}", self.message),
        }
    }
}

impl Circuit {
    pub fn new(distance: usize) -> Self {
        Self {
            distance,
            qubits: Vec::new(),
            layers: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    /// Dense index of `r`, if allocated.
    pub fn find(&self, r: QubitRef) -> Option<usize> {
        self.qubits.iter().position(|&q| q == r)
    }

    /// Dense indices of a data block, ordered by position.
    pub fn block_qubits(&self, block: Block) -> Vec<usize> {
        let mut v: Vec<(usize, usize)> = self
            .qubits
            .iter()
            .enumerate()
            .filter(|(_, q)| q.block == block)
            .map(|(i, q)| (q.index, i))
            .collect();
        v.sort_unstable();
        v.into_iter().map(|(_, i)| i).collect()
    }

    /// Measurement records in circuit order as `(layer, qubit)`.
    pub fn measurement_records(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (l, layer) in self.layers.iter().enumerate() {
            for g in &layer.gates {
                if let Gate::MeasX(q) = *g {
                    out.push((l, q));
                }
            }
        }
        out
    }

    /// Noise locations of every noisy layer, in time order: gates first, then
    /// idle qubits of the layer's scope.
    pub fn locations(&self) -> Vec<Location> {
        let n = self.qubits.len();
        let mut out = Vec::new();
        let mut touched = vec![usize::MAX; n];
        for (l, layer) in self.layers.iter().enumerate() {
            if !layer.noisy {
                continue;
            }
            for g in &layer.gates {
                for q in g.operands() {
                    touched[q] = l;
                }
                out.push(Location { layer: l, gate: *g });
            }
            let scope: Box<dyn Iterator<Item = usize>> = match &layer.idle_scope {
                Some(s) => Box::new(s.iter().copied()),
                None => Box::new(0..n),
            };
            for q in scope {
                if touched[q] != l {
                    out.push(Location {
                        layer: l,
                        gate: Gate::Idle(q),
                    });
                }
            }
        }
        out
    }

    /// Checks the structural invariants; never aborts.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.qubits.len();
        let mut seen_refs: HashMap<QubitRef, usize> = HashMap::new();
        for (i, &r) in self.qubits.iter().enumerate() {
            if r.block.is_data() && r.index >= self.distance {
                out.push(Violation {
                    layer: None,
                    qubit: Some(r),
                    message: format!(
                        "data index {} not reduced modulo d={}",
                        r.index, self.distance
                    ),
                });
            }
            if let Some(prev) = seen_refs.insert(r, i) {
                out.push(Violation {
                    layer: None,
                    qubit: Some(r),
                    message: format!("qubit allocated twice (slots {prev} and {i})"),
                });
            }
        }
        let mut target_block: Option<Block> = None;
        let mut touched = vec![usize::MAX; n];
        for (l, layer) in self.layers.iter().enumerate() {
            for g in &layer.gates {
                let ops = g.operands();
                if ops.iter().any(|&q| q >= n) {
                    out.push(Violation {
                        layer: Some(l),
                        qubit: None,
                        message: format!("{:?} operand out of range", g.kind()),
                    });
                    continue;
                }
                for (j, &q) in ops.iter().enumerate() {
                    if ops[..j].contains(&q) {
                        out.push(Violation {
                            layer: Some(l),
                            qubit: Some(self.qubits[q]),
                            message: format!("repeated operand in {:?}", g.kind()),
                        });
                    } else if touched[q] == l {
                        out.push(Violation {
                            layer: Some(l),
                            qubit: Some(self.qubits[q]),
                            message: format!("qubit {} used twice in layer", self.qubits[q]),
                        });
                    }
                    touched[q] = l;
                }
                if let Gate::CCX(_, _, t) = *g {
                    let tb = self.qubits[t].block;
                    match target_block {
                        None => target_block = Some(tb),
                        Some(b) if b != tb => out.push(Violation {
                            layer: Some(l),
                            qubit: Some(self.qubits[t]),
                            message: "mixed Toffoli target blocks".into(),
                        }),
                        _ => {}
                    }
                    if tb != Block::Target {
                        out.push(Violation {
                            layer: Some(l),
                            qubit: Some(self.qubits[t]),
                            message: "Toffoli target outside the Target block".into(),
                        });
                    }
                }
            }
            if let Some(scope) = &layer.idle_scope {
                if scope.iter().any(|&q| q >= n) {
                    out.push(Violation {
                        layer: Some(l),
                        qubit: None,
                        message: "idle scope out of range".into(),
                    });
                }
            }
        }
        out
    }
}

/// Free-function form of [`Circuit::validate`].
pub fn validate_circuit(c: &Circuit) -> Vec<Violation> {
    c.validate()
}

#[derive(Serialize, Deserialize)]
struct GateRecord {
    kind: GateKind,
    operands: Vec<QubitRef>,
}

#[derive(Serialize, Deserialize)]
struct LayerRecord {
    #[serde(default = "default_true")]
    noisy: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    idle_scope: Option<Vec<QubitRef>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    readout: Vec<QubitRef>,
    #[serde(default = "default_tag")]
    tag: LayerTag,
    gates: Vec<GateRecord>,
}

#[derive(Serialize, Deserialize)]
struct CircuitRecord {
    distance: usize,
    qubits: Vec<QubitRef>,
    layers: Vec<LayerRecord>,
}

fn default_true() -> bool {
    true
}

fn default_tag() -> LayerTag {
    LayerTag::Other
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let refs = |v: &[usize]| v.iter().map(|&q| self.qubits[q]).collect::<Vec<_>>();
        let rec = CircuitRecord {
            distance: self.distance,
            qubits: self.qubits.clone(),
            layers: self
                .layers
                .iter()
                .map(|l| LayerRecord {
                    noisy: l.noisy,
                    idle_scope: l.idle_scope.as_deref().map(refs),
                    readout: refs(&l.readout),
                    tag: l.tag,
                    gates: l
                        .gates
                        .iter()
                        .map(|g| GateRecord {
                            kind: g.kind(),
                            operands: refs(&g.operands()),
                        })
                        .collect(),
                })
                .collect(),
        };
        rec.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let rec = CircuitRecord::deserialize(d)?;
        let index: HashMap<QubitRef, usize> = rec
            .qubits
            .iter()
            .enumerate()
            .map(|(i, &q)| (q, i))
            .collect();
        let lookup = |v: &[QubitRef]| -> Result<Vec<usize>, D::Error> {
            v.iter()
                .map(|q| {
                    index
                        .get(q)
                        .copied()
                        .ok_or_else(|| D::Error::custom(format!("unknown qubit {q}")))
                })
                .collect()
        };
        let mut layers = Vec::with_capacity(rec.layers.len());
        for l in rec.layers {
            let mut gates = Vec::with_capacity(l.gates.len());
            for g in l.gates {
                let ops = lookup(&g.operands)?;
                let gate = Gate::from_parts(g.kind, &ops).ok_or_else(|| {
                    D::Error::custom(format!("{:?} expects {} operands", g.kind, g.kind.arity()))
                })?;
                gates.push(gate);
            }
            let idle_scope = match l.idle_scope {
                Some(s) => Some(lookup(&s)?),
                None => None,
            };
            let readout = lookup(&l.readout)?;
            layers.push(Layer {
                gates,
                noisy: l.noisy,
                idle_scope,
                readout,
                tag: l.tag,
            });
        }
        Ok(Circuit {
            distance: rec.distance,
            qubits: rec.qubits,
            layers,
        })
    }
}
