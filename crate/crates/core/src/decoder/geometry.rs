//! Space-time fault lattice of an experiment, derived by propagating every
//! elementary phase-flip fault through the circuit.

use super::paths::ShortestPaths;
use crate::circuit::{Circuit, Gate};
use crate::circuits::{Directive, Experiment, SyndromeDecoder};
use crate::noise::{ErrorOp, NoiseConfig};
use std::collections::HashMap;

/// Deterministic consequences of one `Z`-type fault.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FaultEffect {
    /// Flipped measurement records.
    pub records: Vec<usize>,
    /// Qubits carrying `Z` at the end of the circuit.
    pub final_z: Vec<usize>,
    /// `CZ` pairs generated at Toffoli targets, as `(layer, a, b)` with
    /// endpoints relabelled through later SWAPs.
    pub cz: Vec<(usize, usize, usize)>,
}

/// Sparse Z-frame propagator.
pub struct Propagator<'c> {
    circuit: &'c Circuit,
    /// `gate_at[layer][qubit]`: gate index within the layer.
    gate_at: Vec<Vec<u32>>,
    /// `record_at[layer][qubit]`: measurement record index.
    record_at: Vec<HashMap<usize, usize>>,
}

const NO_GATE: u32 = u32::MAX;

fn toggle(v: &mut Vec<usize>, q: usize) {
    if let Some(i) = v.iter().position(|&x| x == q) {
        v.swap_remove(i);
    } else {
        v.push(q);
    }
}

impl<'c> Propagator<'c> {
    pub fn new(circuit: &'c Circuit) -> Self {
        let n = circuit.num_qubits();
        let mut gate_at = Vec::with_capacity(circuit.layers.len());
        let mut record_at = Vec::with_capacity(circuit.layers.len());
        let mut rec = 0;
        for layer in &circuit.layers {
            let mut row = vec![NO_GATE; n];
            let mut recs = HashMap::new();
            for (gi, g) in layer.gates.iter().enumerate() {
                for q in g.operands() {
                    row[q] = gi as u32;
                }
                if let Gate::MeasX(q) = *g {
                    recs.insert(q, rec);
                    rec += 1;
                }
            }
            gate_at.push(row);
            record_at.push(recs);
        }
        Self {
            circuit,
            gate_at,
            record_at,
        }
    }

    /// Propagates `Z` on `zs`, inserted before layer `start`, to the end.
    pub fn propagate(&self, start: usize, zs: &[usize]) -> FaultEffect {
        let mut active: Vec<usize> = Vec::new();
        for &q in zs {
            toggle(&mut active, q);
        }
        let mut out = FaultEffect::default();
        let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
        let mut gates: Vec<u32> = Vec::new();
        for l in start..self.circuit.layers.len() {
            if active.is_empty() && pairs.is_empty() {
                break;
            }
            let layer = &self.circuit.layers[l];
            let row = &self.gate_at[l];
            gates.clear();
            gates.extend(active.iter().map(|&q| row[q]).filter(|&g| g != NO_GATE));
            for &(_, a, b) in &pairs {
                for q in [a, b] {
                    let g = row[q];
                    if g != NO_GATE && matches!(layer.gates[g as usize], Gate::SWAP(..)) {
                        gates.push(g);
                    }
                }
            }
            gates.sort_unstable();
            gates.dedup();
            for &gi in &gates {
                let has = |active: &Vec<usize>, q: usize| active.contains(&q);
                match layer.gates[gi as usize] {
                    Gate::CNOT(c, t) => {
                        if has(&active, t) {
                            toggle(&mut active, c);
                        }
                    }
                    Gate::CCX(a, b, t) => {
                        if has(&active, t) {
                            pairs.push((l, a.min(b), a.max(b)));
                        }
                    }
                    Gate::SWAP(a, b) => {
                        let (ha, hb) = (has(&active, a), has(&active, b));
                        if ha != hb {
                            toggle(&mut active, a);
                            toggle(&mut active, b);
                        }
                        for p in pairs.iter_mut() {
                            let f = |q: usize| {
                                if q == a {
                                    b
                                } else if q == b {
                                    a
                                } else {
                                    q
                                }
                            };
                            let (x, y) = (f(p.1), f(p.2));
                            *p = (p.0, x.min(y), x.max(y));
                        }
                    }
                    Gate::PrepPlus(q) | Gate::PrepZeroL(q) => {
                        if has(&active, q) {
                            toggle(&mut active, q);
                        }
                    }
                    Gate::MeasX(q) => {
                        if has(&active, q) {
                            out.records.push(self.record_at[l][&q]);
                        }
                    }
                    _ => {}
                }
            }
        }
        active.sort_unstable();
        out.final_z = active;
        out.records.sort_unstable();
        out.cz = pairs;
        out
    }
}

/// One elementary fault, in time order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fault {
    /// First layer the fault propagates through.
    pub start: usize,
    /// `Z` support right after the faulty location.
    pub z: Vec<usize>,
    /// Directly flipped measurement record.
    pub flip: Option<usize>,
    /// `None` for virtual data faults.
    pub location: Option<(usize, Gate, usize)>,
}

/// Every elementary `Z` fault of the circuit plus virtual data faults at the
/// start and after each measurement layer.
pub fn enumerate_faults(circuit: &Circuit, cfg: &NoiseConfig) -> Vec<Fault> {
    let structural = NoiseConfig::with_options(0.01, cfg.swap, true).expect("valid reference p");
    let mut data_qubits: Vec<usize> = (0..circuit.num_qubits())
        .filter(|&q| circuit.qubits[q].block.is_data())
        .collect();
    data_qubits.sort_unstable();
    let mut faults: Vec<Fault> = data_qubits
        .iter()
        .map(|&q| Fault {
            start: 0,
            z: vec![q],
            flip: None,
            location: None,
        })
        .collect();
    let locs = circuit.locations();
    let mut li = 0;
    let mut record = 0;
    for (l, layer) in circuit.layers.iter().enumerate() {
        let mut recs_here = HashMap::new();
        for g in &layer.gates {
            if let Gate::MeasX(q) = *g {
                recs_here.insert(q, record);
                record += 1;
            }
        }
        while li < locs.len() && locs[li].layer == l {
            let loc = locs[li];
            li += 1;
            let ops = loc.gate.operands();
            let model = structural.model(loc.gate.kind());
            for (ti, &(op, _)) in model.terms.iter().enumerate() {
                let (z, flip) = match op {
                    ErrorOp::Z(i) => (vec![ops[i as usize]], None),
                    ErrorOp::ZZ(i, j) => (vec![ops[i as usize], ops[j as usize]], None),
                    ErrorOp::CZZ(_, _, k) => (vec![ops[k as usize]], None),
                    ErrorOp::Flip => (vec![], Some(recs_here[&ops[0]])),
                    ErrorOp::CZ(..) => continue,
                };
                faults.push(Fault {
                    start: l + 1,
                    z,
                    flip,
                    location: Some((l, loc.gate, ti)),
                });
            }
        }
        if !recs_here.is_empty() {
            faults.extend(data_qubits.iter().map(|&q| Fault {
                start: l + 1,
                z: vec![q],
                flip: None,
                location: None,
            }));
        }
    }
    faults
}

/// Edge of a decoding graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub a: usize,
    /// Equal to the boundary node for boundary edges.
    pub b: usize,
    pub weight: u32,
    /// Data-qubit `Z` effect as a bit mask over logical positions.
    pub data: u64,
    /// `CZ` pairs generated inside the decoder's window.
    pub cz: Vec<(usize, usize)>,
    /// Index of the representative fault.
    pub fault: usize,
}

/// Matching graph of one decoder truncated to its first `rounds` rounds.
#[derive(Clone, Debug)]
pub struct DecodeGraph {
    pub rounds: usize,
    pub stabilizers: usize,
    pub edges: Vec<GraphEdge>,
    pub paths: ShortestPaths,
}

impl DecodeGraph {
    pub fn num_detectors(&self) -> usize {
        self.rounds * self.stabilizers
    }

    pub fn boundary(&self) -> usize {
        self.num_detectors()
    }

    pub fn node(&self, round: usize, stabilizer: usize) -> usize {
        round * self.stabilizers + stabilizer
    }

    /// Data mask and `CZ` parity along the stored shortest path.
    pub fn path_effect(&self, from: usize, to: usize) -> (u64, Vec<(usize, usize)>) {
        let mut mask = 0;
        let mut cz = Vec::new();
        for e in self.paths.path_edges(from, to) {
            let edge = &self.edges[e];
            mask ^= edge.data;
            for &p in &edge.cz {
                toggle_pair(&mut cz, p);
            }
        }
        (mask, cz)
    }
}

pub(crate) fn toggle_pair(v: &mut Vec<(usize, usize)>, p: (usize, usize)) {
    if let Some(i) = v.iter().position(|&x| x == p) {
        v.swap_remove(i);
    } else {
        v.push(p);
    }
}

/// Per-decoder view of the fault list.
struct DecoderFaults {
    /// `(detectors, data mask, cz pairs)` per fault, detectors as `(round, stab)`.
    effects: Vec<(Vec<(usize, usize)>, u64, Vec<(usize, usize)>)>,
    total_rounds: usize,
    stabilizers: usize,
}

fn decoder_faults(
    dec: &SyndromeDecoder,
    effects: &[FaultEffect],
    faults: &[Fault],
    num_records: usize,
) -> DecoderFaults {
    let mut where_rec = vec![None; num_records];
    for (r, round) in dec.rounds.iter().enumerate() {
        for (i, &rec) in round.iter().enumerate() {
            where_rec[rec] = Some((r, i));
        }
    }
    let pos: HashMap<usize, usize> = dec.data.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let total = dec.rounds.len();
    let mut out = Vec::with_capacity(effects.len());
    for (eff, fault) in effects.iter().zip(faults) {
        let mut dets: Vec<(usize, usize)> = Vec::new();
        let flip = |rec: usize, dets: &mut Vec<(usize, usize)>| {
            if let Some((r, i)) = where_rec[rec] {
                for rr in [r, r + 1] {
                    if rr < total {
                        if let Some(k) = dets.iter().position(|&x| x == (rr, i)) {
                            dets.swap_remove(k);
                        } else {
                            dets.push((rr, i));
                        }
                    }
                }
            }
        };
        for &rec in &eff.records {
            flip(rec, &mut dets);
        }
        if let Some(rec) = fault.flip {
            flip(rec, &mut dets);
        }
        dets.sort_unstable();
        let mut mask = 0u64;
        for q in &eff.final_z {
            if let Some(&i) = pos.get(q) {
                mask ^= 1 << i;
            }
        }
        let cz = match dec.cz_window {
            Some((lo, hi)) => eff
                .cz
                .iter()
                .filter(|p| p.0 >= lo && p.0 < hi)
                .map(|p| (p.1, p.2))
                .fold(Vec::new(), |mut v, p| {
                    toggle_pair(&mut v, p);
                    v
                }),
            None => Vec::new(),
        };
        out.push((dets, mask, cz));
    }
    DecoderFaults {
        effects: out,
        total_rounds: total,
        stabilizers: dec.data.len() - 1,
    }
}

fn build_graph(df: &DecoderFaults, rounds: usize) -> DecodeGraph {
    let ns = df.stabilizers;
    let boundary = rounds * ns;
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges = Vec::new();
    for (fi, (dets, mask, cz)) in df.effects.iter().enumerate() {
        if dets.is_empty() || dets.len() > 2 || dets.iter().any(|&(r, _)| r >= rounds) {
            continue;
        }
        let a = dets[0].0 * ns + dets[0].1;
        let b = if dets.len() == 2 {
            dets[1].0 * ns + dets[1].1
        } else {
            boundary
        };
        if seen.contains_key(&(a, b)) {
            continue;
        }
        seen.insert((a, b), edges.len());
        edges.push(GraphEdge {
            a,
            b,
            weight: 1,
            data: *mask,
            cz: cz.clone(),
            fault: fi,
        });
    }
    debug_assert!(rounds <= df.total_rounds);
    let paths = ShortestPaths::new(
        boundary + 1,
        &edges
            .iter()
            .map(|e| (e.a, e.b, e.weight))
            .collect::<Vec<_>>(),
    );
    DecodeGraph {
        rounds,
        stabilizers: ns,
        edges,
        paths,
    }
}

/// Precomputed decoding data of an experiment.
#[derive(Clone, Debug)]
pub struct Geometry {
    /// Keyed by `(decoder, rounds)`.
    pub graphs: HashMap<(usize, usize), DecodeGraph>,
    /// Per schedule entry of a windowed decoder: `CZ` pairs generated by a
    /// correction `Z` on each logical position applied at that point.
    pub correction_cz: HashMap<usize, Vec<Vec<(usize, usize)>>>,
    pub num_faults: usize,
}

impl Geometry {
    pub fn build(exp: &Experiment, cfg: &NoiseConfig) -> Self {
        let faults = enumerate_faults(&exp.circuit, cfg);
        let prop = Propagator::new(&exp.circuit);
        let effects: Vec<FaultEffect> = faults
            .iter()
            .map(|f| {
                if f.z.is_empty() {
                    FaultEffect::default()
                } else {
                    prop.propagate(f.start, &f.z)
                }
            })
            .collect();
        let nrec = exp.num_records();
        let mut per_decoder: HashMap<usize, DecoderFaults> = HashMap::new();
        let mut graphs = HashMap::new();
        let mut correction_cz = HashMap::new();
        for (si, s) in exp.schedule.iter().enumerate() {
            if let Directive::Decode { decoder, rounds } = s.directive {
                let dec = &exp.decoders[decoder];
                let df = per_decoder
                    .entry(decoder)
                    .or_insert_with(|| decoder_faults(dec, &effects, &faults, nrec));
                graphs
                    .entry((decoder, rounds))
                    .or_insert_with(|| build_graph(df, rounds));
                if let Some((lo, hi)) = dec.cz_window {
                    let table = dec
                        .data
                        .iter()
                        .map(|&q| {
                            let eff = prop.propagate(s.after_layer + 1, &[q]);
                            let mut v = Vec::new();
                            for p in eff.cz.iter().filter(|p| p.0 >= lo && p.0 < hi) {
                                toggle_pair(&mut v, (p.1, p.2));
                            }
                            v
                        })
                        .collect();
                    correction_cz.insert(si, table);
                }
            }
        }
        Geometry {
            graphs,
            correction_cz,
            num_faults: faults.len(),
        }
    }
}
