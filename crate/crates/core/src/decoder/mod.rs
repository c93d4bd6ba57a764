//! Syndrome-history decoding: detection events, shortest-path matching
//! graphs, minimum-weight perfect matching, majority votes and the
//! a-posteriori `CZ` undo of the Toffoli experiments.

pub mod blossom;
pub mod geometry;
pub mod paths;

use crate::circuit::{Block, Circuit};
use crate::circuits::LogicalOp;
use crate::error_state::ErrorState;
use geometry::{toggle_pair, DecodeGraph};
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

pub use geometry::Geometry;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("syndrome history is not rectangular")]
    Ragged,
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("event ({0}, {1}) lies outside the decoding graph")]
    EventOutOfRange(usize, usize),
    #[error("no perfect matching exists")]
    Infeasible,
    #[error("residual error on {0:?} has a non-trivial syndrome")]
    NontrivialSyndrome(Block),
}

/// Outcome grid `o[r][i]`, `true` meaning `-1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SyndromeHistory {
    pub outcomes: Vec<Vec<bool>>,
    /// Whether the last row is a noiseless round.
    pub perfect_final: bool,
}

impl SyndromeHistory {
    pub fn new(outcomes: Vec<Vec<bool>>, perfect_final: bool) -> Result<Self, DecodeError> {
        if let Some(first) = outcomes.first() {
            if outcomes.iter().any(|r| r.len() != first.len()) {
                return Err(DecodeError::Ragged);
            }
        }
        Ok(Self {
            outcomes,
            perfect_final,
        })
    }

    /// From `±1` outcomes.
    pub fn from_signs(rows: &[Vec<i8>], perfect_final: bool) -> Result<Self, DecodeError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&s| s < 0).collect())
                .collect(),
            perfect_final,
        )
    }

    pub fn rounds(&self) -> usize {
        self.outcomes.len()
    }

    pub fn stabilizers(&self) -> usize {
        self.outcomes.first().map_or(0, Vec::len)
    }
}

/// Detection events as `(round, stabilizer)`, lexicographically sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DetectionEvents {
    pub events: Vec<(usize, usize)>,
}

pub fn detection_events(h: &SyndromeHistory) -> DetectionEvents {
    let mut events = Vec::new();
    let mut prev = vec![false; h.stabilizers()];
    for (r, row) in h.outcomes.iter().enumerate() {
        for (i, (&o, p)) in row.iter().zip(prev.iter_mut()).enumerate() {
            if o != *p {
                events.push((r, i));
            }
            *p = o;
        }
    }
    DetectionEvents { events }
}

/// Complete graph on the events with shortest-path weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingGraph {
    pub events: Vec<(usize, usize)>,
    /// Lattice node of each event.
    pub nodes: Vec<usize>,
    /// Event-to-event weights.
    pub weights: Vec<Vec<u32>>,
    /// Event-to-boundary weights.
    pub boundary: Vec<u32>,
}

/// Stand-in weight for disconnected pairs.
const FAR: u32 = 1 << 20;

fn capped(w: u32) -> u32 {
    w.min(FAR)
}

pub fn build_matching_graph(
    ev: &DetectionEvents,
    graph: &DecodeGraph,
) -> Result<MatchingGraph, DecodeError> {
    let mut nodes = Vec::with_capacity(ev.events.len());
    for &(r, i) in &ev.events {
        if r >= graph.rounds || i >= graph.stabilizers {
            return Err(DecodeError::EventOutOfRange(r, i));
        }
        nodes.push(graph.node(r, i));
    }
    let weights = nodes
        .iter()
        .map(|&a| {
            nodes
                .iter()
                .map(|&b| capped(graph.paths.dist(a, b)))
                .collect()
        })
        .collect();
    let boundary = nodes
        .iter()
        .map(|&a| capped(graph.paths.dist(a, graph.boundary())))
        .collect();
    Ok(MatchingGraph {
        events: ev.events.clone(),
        nodes,
        weights,
        boundary,
    })
}

/// Partner of each event: another event or the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Partner {
    Event(usize),
    Boundary,
}

/// Pairs `(event, partner)` with `event < partner` for event-event pairs.
pub type Pairing = Vec<(usize, Partner)>;

/// Minimum-weight perfect matching with one boundary copy per event.
pub fn mwpm(g: &MatchingGraph) -> Result<Pairing, DecodeError> {
    let m = g.events.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut edges = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in i + 1..m {
            edges.push((i, j, g.weights[i][j] as i64));
        }
        edges.push((i, m + i, g.boundary[i] as i64));
    }
    for i in 0..m {
        for j in i + 1..m {
            edges.push((m + i, m + j, 0));
        }
    }
    let mate =
        blossom::min_weight_perfect_matching(2 * m, &edges).ok_or(DecodeError::Infeasible)?;
    let mut out = Vec::new();
    for (i, &j) in mate.iter().enumerate().take(m) {
        if j >= m {
            out.push((i, Partner::Boundary));
        } else if i < j {
            out.push((i, Partner::Event(j)));
        }
    }
    Ok(out)
}

pub fn pairing_weight(g: &MatchingGraph, p: &Pairing) -> u64 {
    p.iter()
        .map(|&(i, q)| match q {
            Partner::Event(j) => g.weights[i][j] as u64,
            Partner::Boundary => g.boundary[i] as u64,
        })
        .sum()
}

/// Data `Z` flips as a mask over logical positions, plus the `CZ` pairs
/// the inferred faults generated inside the decoder's window.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Correction {
    pub data: u64,
    pub cz: Vec<(usize, usize)>,
}

impl Correction {
    pub fn is_identity(&self) -> bool {
        self.data == 0 && self.cz.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |j| self.data >> j & 1 == 1)
    }
}

pub fn correction_from_matching(
    pairing: &Pairing,
    g: &MatchingGraph,
    graph: &DecodeGraph,
) -> Correction {
    let mut c = Correction::default();
    for &(i, p) in pairing {
        let to = match p {
            Partner::Event(j) => g.nodes[j],
            Partner::Boundary => graph.boundary(),
        };
        let (mask, cz) = graph.path_effect(g.nodes[i], to);
        c.data ^= mask;
        for pair in cz {
            toggle_pair(&mut c.cz, pair);
        }
    }
    c.cz.sort_unstable();
    c
}

/// Events, matching graph, pairing and correction in one call.
pub fn decode(h: &SyndromeHistory, graph: &DecodeGraph) -> Result<Correction, DecodeError> {
    let ev = detection_events(h);
    let g = build_matching_graph(&ev, graph)?;
    let p = mwpm(&g)?;
    Ok(correction_from_matching(&p, &g, graph))
}

/// Minimal-weight `Z` pattern consistent with transversal ancilla outcomes.
pub fn majority_decode_steane(outcomes: &[i8], d: usize) -> Result<Correction, DecodeError> {
    if outcomes.len() != d {
        return Err(DecodeError::Length {
            expected: d,
            got: outcomes.len(),
        });
    }
    let mut mask: u64 = outcomes
        .iter()
        .enumerate()
        .filter(|(_, &o)| o < 0)
        .map(|(j, _)| 1 << j)
        .sum();
    if mask.count_ones() as usize > d / 2 {
        mask ^= (1u64 << d) - 1;
    }
    Ok(Correction {
        data: mask,
        cz: Vec::new(),
    })
}

/// Majority vote on transversal `X` outcomes; `true` when it reads `-1`.
pub fn majority_vote(outcomes: &[i8]) -> bool {
    outcomes.iter().filter(|&&o| o < 0).count() * 2 > outcomes.len()
}

/// Record of the corrections applied by intermediate target decodes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorrectionLog {
    /// `(schedule index, applied delta mask)` in time order.
    pub entries: Vec<(usize, u64)>,
}

/// Pairs to toggle in the `CZ` set: those the final decode attributes to
/// faults inside the window, plus those the applied corrections generated.
pub fn cz_posteriori_undo(
    log: &CorrectionLog,
    final_decode: &Correction,
    geometry: &Geometry,
) -> Vec<(usize, usize)> {
    let mut out = final_decode.cz.clone();
    for &(si, delta) in &log.entries {
        let Some(table) = geometry.correction_cz.get(&si) else {
            continue;
        };
        for (j, pairs) in table.iter().enumerate() {
            if delta >> j & 1 == 1 {
                for &p in pairs {
                    toggle_pair(&mut out, p);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Failed logical operators given the residual error. `X_L` failures come
/// from majority votes and are passed in by the caller.
pub fn logical_failure_check(
    e: &ErrorState,
    criterion: &[LogicalOp],
    circuit: &Circuit,
    xl_flipped: &BTreeSet<Block>,
) -> Result<BTreeSet<LogicalOp>, DecodeError> {
    let mut failed = BTreeSet::new();
    for &op in criterion {
        let bad = match op {
            LogicalOp::ZL(block) => {
                let qs = circuit.block_qubits(block);
                let weight = qs.iter().filter(|&&q| e.zframe[q]).count();
                if weight != 0 && weight != qs.len() {
                    return Err(DecodeError::NontrivialSyndrome(block));
                }
                weight % 2 == 1
            }
            LogicalOp::XL(block) => xl_flipped.contains(&block),
            LogicalOp::CzL => !e.czset.is_empty(),
        };
        if bad {
            failed.insert(op);
        }
    }
    Ok(failed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(rows: &[&[i8]]) -> SyndromeHistory {
        SyndromeHistory::from_signs(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), true)
            .unwrap()
    }

    #[test]
    fn events_examples() {
        assert!(detection_events(&hist(&[&[1, 1, 1, 1], &[1, 1, 1, 1]]))
            .events
            .is_empty());
        let h = hist(&[&[1, 1, 1, 1], &[1, -1, -1, 1], &[1, -1, -1, 1]]);
        assert_eq!(detection_events(&h).events, vec![(1, 1), (1, 2)]);
        let h = hist(&[&[1, 1, 1, 1], &[1, 1, -1, 1], &[1, 1, 1, 1]]);
        assert_eq!(detection_events(&h).events, vec![(1, 2), (2, 2)]);
    }

    #[test]
    fn ragged_history_rejected() {
        assert_eq!(
            SyndromeHistory::from_signs(&[vec![1, 1], vec![1]], false),
            Err(DecodeError::Ragged)
        );
    }

    fn graph(weights: Vec<Vec<u32>>, boundary: Vec<u32>) -> MatchingGraph {
        let m = boundary.len();
        MatchingGraph {
            events: (0..m).map(|i| (0, i)).collect(),
            nodes: (0..m).collect(),
            weights,
            boundary,
        }
    }

    #[test]
    fn mwpm_examples() {
        assert!(mwpm(&graph(vec![], vec![])).unwrap().is_empty());
        let g = graph(vec![vec![0, 1], vec![1, 0]], vec![3, 3]);
        assert_eq!(mwpm(&g).unwrap(), vec![(0, Partner::Event(1))]);
        let g = graph(vec![vec![0, 5], vec![5, 0]], vec![1, 2]);
        assert_eq!(
            mwpm(&g).unwrap(),
            vec![(0, Partner::Boundary), (1, Partner::Boundary)]
        );
    }

    #[test]
    fn steane_majority() {
        assert!(majority_decode_steane(&[1; 5], 5).unwrap().is_identity());
        for j in 0..5 {
            let mut o = [1i8; 5];
            o[j] = -1;
            assert_eq!(majority_decode_steane(&o, 5).unwrap().data, 1 << j);
        }
        assert_eq!(majority_decode_steane(&[-1, -1, 1], 3).unwrap().data, 0b100);
        assert!(majority_decode_steane(&[1, 1], 3).is_err());
    }

    #[test]
    fn majority_vote_threshold() {
        assert!(!majority_vote(&[1, -1, 1]));
        assert!(majority_vote(&[-1, -1, 1]));
    }
}
