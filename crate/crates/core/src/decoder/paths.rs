//! All-pairs shortest paths by Dijkstra from every node.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

pub const UNREACHABLE: u32 = u32::MAX;
const NO_EDGE: u32 = u32::MAX;

/// Distance and predecessor-edge tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortestPaths {
    n: usize,
    dist: Vec<u32>,
    pred: Vec<u32>,
    /// Edge endpoints, needed to walk predecessor chains.
    ends: Vec<(usize, usize)>,
}

impl ShortestPaths {
    /// `edges` are undirected `(a, b, weight)`.
    pub fn new(n: usize, edges: &[(usize, usize, u32)]) -> Self {
        let mut adj: Vec<Vec<(usize, u32, u32)>> = vec![Vec::new(); n];
        for (k, &(a, b, w)) in edges.iter().enumerate() {
            adj[a].push((b, w, k as u32));
            adj[b].push((a, w, k as u32));
        }
        let mut dist = vec![UNREACHABLE; n * n];
        let mut pred = vec![NO_EDGE; n * n];
        let mut heap = BinaryHeap::new();
        for s in 0..n {
            let row = s * n;
            dist[row + s] = 0;
            heap.push(Reverse((0u32, s)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[row + u] {
                    continue;
                }
                for &(v, w, k) in &adj[u] {
                    let nd = d + w;
                    if nd < dist[row + v] {
                        dist[row + v] = nd;
                        pred[row + v] = k;
                        heap.push(Reverse((nd, v)));
                    }
                }
            }
        }
        Self {
            n,
            dist,
            pred,
            ends: edges.iter().map(|e| (e.0, e.1)).collect(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn dist(&self, a: usize, b: usize) -> u32 {
        self.dist[a * self.n + b]
    }

    /// Edge indices on the stored shortest path from `from` to `to`.
    pub fn path_edges(&self, from: usize, to: usize) -> Vec<usize> {
        let row = from * self.n;
        let mut out = Vec::new();
        if self.dist[row + to] == UNREACHABLE {
            return out;
        }
        let mut v = to;
        while v != from {
            let k = self.pred[row + v];
            out.push(k as usize);
            let (a, b) = self.ends[k as usize];
            v = if a == v { b } else { a };
        }
        out
    }
}
