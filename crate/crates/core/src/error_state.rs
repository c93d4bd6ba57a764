//! The restricted error algebra: a Pauli-`Z` frame plus a parity set of
//! pending `CZ` errors, and its propagation through bias-preserving gates.

use crate::circuit::Gate;
use std::collections::BTreeSet;
use thiserror::Error;

/// Propagation left the `{Z, CZ}` group.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropagationError {
    #[error("CZ error on ({0},{1}) meets a Toffoli target; the result would be a CCZ")]
    NonClifford(usize, usize),
    #[error("qubit {0} reset while a CZ error with qubit {1} is pending")]
    PendingCzOnReset(usize, usize),
}

/// Pending error `E` such that the noisy state is `E` applied to the ideal one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ErrorState {
    pub zframe: Vec<bool>,
    /// Unordered pairs stored as `(min, max)`.
    pub czset: BTreeSet<(usize, usize)>,
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ErrorState {
    pub fn new(n: usize) -> Self {
        Self {
            zframe: vec![false; n],
            czset: BTreeSet::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.czset.is_empty() && !self.zframe.iter().any(|&z| z)
    }

    pub fn flip_z(&mut self, q: usize) {
        self.zframe[q] ^= true;
    }

    /// Multiplies by `CZ(a, b)`; adding a pair twice cancels it.
    pub fn toggle_cz(&mut self, a: usize, b: usize) {
        debug_assert_ne!(a, b);
        let p = pair(a, b);
        if !self.czset.remove(&p) {
            self.czset.insert(p);
        }
    }

    /// Partners of `q` in the pending `CZ` set.
    pub fn cz_partners(&self, q: usize) -> Vec<usize> {
        self.czset
            .iter()
            .filter_map(|&(a, b)| {
                if a == q {
                    Some(b)
                } else if b == q {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Replaces `E` by `g E g†`, so that `g E = E' g`.
    ///
    /// Measurements leave the state untouched; their outcomes are resolved by
    /// the simulator. Resets clear the frame bit of the reset qubit.
    pub fn apply(&mut self, g: &Gate) -> Result<(), PropagationError> {
        match *g {
            Gate::Idle(_) | Gate::PauliZ(_) | Gate::CZ(..) | Gate::MeasX(_) => {}
            Gate::PrepPlus(q) | Gate::PrepZeroL(q) => {
                if let Some(&x) = self.cz_partners(q).first() {
                    return Err(PropagationError::PendingCzOnReset(q, x));
                }
                self.zframe[q] = false;
            }
            Gate::PauliX(q) => {
                for x in self.cz_partners(q) {
                    self.zframe[x] ^= true;
                }
            }
            Gate::CNOT(c, t) => {
                if self.zframe[t] {
                    self.zframe[c] ^= true;
                }
                for x in self.cz_partners(t) {
                    if x == c {
                        self.zframe[c] ^= true;
                    } else {
                        self.toggle_cz(c, x);
                    }
                }
            }
            Gate::CCX(a, b, t) => {
                let partners = self.cz_partners(t);
                if let Some(&x) = partners.iter().find(|&&x| x != a && x != b) {
                    return Err(PropagationError::NonClifford(t, x));
                }
                // CZ(t, a) -> CZ(t, a) CZ(a, b).
                for _ in &partners {
                    self.toggle_cz(a, b);
                }
                if self.zframe[t] {
                    self.toggle_cz(a, b);
                }
            }
            Gate::SWAP(a, b) => {
                self.zframe.swap(a, b);
                let relabel = |q: usize| {
                    if q == a {
                        b
                    } else if q == b {
                        a
                    } else {
                        q
                    }
                };
                self.czset = self
                    .czset
                    .iter()
                    .map(|&(x, y)| pair(relabel(x), relabel(y)))
                    .collect();
            }
        }
        Ok(())
    }

    /// Functional form of [`ErrorState::apply`].
    pub fn propagate(&self, g: &Gate) -> Result<ErrorState, PropagationError> {
        let mut e = self.clone();
        e.apply(g)?;
        Ok(e)
    }
}

/// Free-function form of [`ErrorState::propagate`].
pub fn propagate(e: &ErrorState, g: &Gate) -> Result<ErrorState, PropagationError> {
    e.propagate(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_z(n: usize, zs: &[usize]) -> ErrorState {
        let mut e = ErrorState::new(n);
        for &q in zs {
            e.flip_z(q);
        }
        e
    }

    #[test]
    fn ccx_target_z_adds_control_pair() {
        let e = with_z(3, &[2]).propagate(&Gate::CCX(0, 1, 2)).unwrap();
        assert_eq!(e.zframe, vec![false, false, true]);
        assert_eq!(e.czset.iter().copied().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn control_pair_commutes_with_ccx() {
        let mut e = ErrorState::new(3);
        e.toggle_cz(1, 0);
        assert_eq!(e.propagate(&Gate::CCX(0, 1, 2)).unwrap(), e);
    }

    #[test]
    fn cnot_target_z_spreads_to_control() {
        let e = with_z(2, &[1]).propagate(&Gate::CNOT(0, 1)).unwrap();
        assert_eq!(e.zframe, vec![true, true]);
    }

    #[test]
    fn cz_on_toffoli_target_is_rejected() {
        let mut e = ErrorState::new(4);
        e.toggle_cz(2, 3);
        assert_eq!(
            e.propagate(&Gate::CCX(0, 1, 2)),
            Err(PropagationError::NonClifford(2, 3))
        );
    }

    #[test]
    fn cz_parity() {
        let mut e = ErrorState::new(2);
        e.toggle_cz(0, 1);
        e.toggle_cz(1, 0);
        assert!(e.is_empty());
    }

    #[test]
    fn swap_relabels() {
        let mut e = with_z(3, &[0]);
        e.toggle_cz(0, 2);
        e.apply(&Gate::SWAP(0, 1)).unwrap();
        assert_eq!(e.zframe, vec![false, true, false]);
        assert!(e.czset.contains(&(1, 2)));
    }
}
