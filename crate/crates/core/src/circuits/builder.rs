use crate::circuit::{Block, Circuit, Gate, Layer, LayerTag, QubitRef};
use std::collections::HashMap;

/// Ancilla pools; ancilla `i` of pool `k` has index `k * d + i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Pool {
    Syndrome(Block),
    GadgetA,
    GadgetB,
}

impl Pool {
    fn ordinal(self) -> usize {
        match self {
            Pool::Syndrome(Block::ControlA) => 0,
            Pool::Syndrome(Block::ControlB) => 1,
            Pool::Syndrome(_) => 2,
            Pool::GadgetA => 3,
            Pool::GadgetB => 4,
        }
    }
}

/// Incremental circuit construction with logical-to-physical tracking.
pub(crate) struct Builder {
    pub c: Circuit,
    /// Current physical qubit of each logical address.
    loc: HashMap<QubitRef, usize>,
    records: usize,
    pub noisy: bool,
    pub scope: Option<Vec<usize>>,
}

impl Builder {
    pub fn new(d: usize) -> Self {
        Self {
            c: Circuit::new(d),
            loc: HashMap::new(),
            records: 0,
            noisy: true,
            scope: None,
        }
    }

    pub fn d(&self) -> usize {
        self.c.distance
    }

    pub fn q(&mut self, r: QubitRef) -> usize {
        if let Some(&i) = self.loc.get(&r) {
            return i;
        }
        let i = self.c.qubits.len();
        self.c.qubits.push(r);
        self.loc.insert(r, i);
        i
    }

    /// Data qubit at logical position `i` (reduced modulo `d`).
    pub fn data(&mut self, block: Block, i: isize) -> usize {
        let d = self.d() as isize;
        self.q(QubitRef::new(block, i.rem_euclid(d) as usize))
    }

    pub fn block(&mut self, block: Block) -> Vec<usize> {
        (0..self.d() as isize)
            .map(|i| self.data(block, i))
            .collect()
    }

    pub fn ancillas(&mut self, pool: Pool, count: usize) -> Vec<usize> {
        let base = pool.ordinal() * self.d();
        (0..count)
            .map(|i| self.q(QubitRef::new(Block::Ancilla, base + i)))
            .collect()
    }

    pub fn ancilla_block(&mut self) -> Vec<usize> {
        (0..self.d())
            .map(|i| self.q(QubitRef::new(Block::AncillaBlock, i)))
            .collect()
    }

    pub fn num_layers(&self) -> usize {
        self.c.layers.len()
    }

    /// Appends a layer; returns the record indices of its measurements.
    pub fn layer(&mut self, gates: Vec<Gate>, tag: LayerTag) -> Vec<usize> {
        let mut recs = Vec::new();
        for g in &gates {
            if let Gate::MeasX(_) = g {
                recs.push(self.records);
                self.records += 1;
            }
            if let Gate::SWAP(a, b) = *g {
                for v in self.loc.values_mut() {
                    if *v == a {
                        *v = b;
                    } else if *v == b {
                        *v = a;
                    }
                }
            }
        }
        self.c.layers.push(Layer {
            gates,
            noisy: self.noisy,
            idle_scope: self.scope.clone(),
            readout: Vec::new(),
            tag,
        });
        recs
    }

    /// Like [`Builder::layer`], for ancilla preparation or readout serving `data`.
    pub fn readout_layer(&mut self, gates: Vec<Gate>, tag: LayerTag, data: &[usize]) -> Vec<usize> {
        let recs = self.layer(gates, tag);
        self.c.layers.last_mut().expect("just pushed").readout = data.to_vec();
        recs
    }

    /// One round of `X_i X_{i+1}` measurements on each block, in parallel.
    ///
    /// `extra[l]` gates are merged into layer `l` of the round. Returns
    /// per-block record indices ordered by stabilizer.
    pub fn syndrome_round(
        &mut self,
        blocks: &[Block],
        round: usize,
        extra: [Vec<Gate>; 4],
    ) -> Vec<Vec<usize>> {
        let d = self.d() as isize;
        let mut anc = Vec::new();
        let mut data = Vec::new();
        for &b in blocks {
            anc.push(self.ancillas(Pool::Syndrome(b), self.d() - 1));
            data.push(self.block(b));
        }
        let tag = LayerTag::Syndrome {
            block: blocks[0],
            round,
        };
        let [e0, e1, e2, e3] = extra;
        let mut l0: Vec<Gate> = anc.iter().flatten().map(|&a| Gate::PrepPlus(a)).collect();
        l0.extend(e0);
        let served: Vec<usize> = data.concat();
        self.readout_layer(l0, tag, &served);
        for (shift, e) in [(0isize, e1), (1, e2)] {
            let mut gates = Vec::new();
            for (a, dq) in anc.iter().zip(&data) {
                for i in 0..(d - 1) {
                    gates.push(Gate::CNOT(a[i as usize], dq[(i + shift) as usize]));
                }
            }
            gates.extend(e);
            self.layer(gates, tag);
        }
        let mut l3: Vec<Gate> = anc.iter().flatten().map(|&a| Gate::MeasX(a)).collect();
        l3.extend(e3);
        let recs = self.readout_layer(l3, tag, &served);
        recs.chunks(self.d() - 1).map(|c| c.to_vec()).collect()
    }

    pub fn finish(self) -> Circuit {
        self.c
    }
}
