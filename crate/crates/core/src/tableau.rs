//! CHP stabilizer tableau (Aaronson-Gottesman).
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers, row `2n` scratch.

use crate::circuit::Gate;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("non-Clifford gate fed to tableau")]
    NonClifford,
    #[error("{0:?} is not a tableau operation")]
    Unsupported(crate::circuit::GateKind),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    x: Vec<Vec<bool>>,
    z: Vec<Vec<bool>>,
    r: Vec<bool>,
}

impl StabilizerTableau {
    /// `|0...0>`.
    pub fn new(n: usize) -> Self {
        let rows = 2 * n + 1;
        let mut x = vec![vec![false; n]; rows];
        let mut z = vec![vec![false; n]; rows];
        for i in 0..n {
            x[i][i] = true;
            z[n + i][i] = true;
        }
        Self {
            n,
            x,
            z,
            r: vec![false; rows],
        }
    }

    /// `|+...+>`.
    pub fn new_plus(n: usize) -> Self {
        let mut t = Self::new(n);
        for q in 0..n {
            t.h(q);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn h(&mut self, q: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][q] & self.z[i][q];
            let t = self.x[i][q];
            self.x[i][q] = self.z[i][q];
            self.z[i][q] = t;
        }
    }

    pub fn s(&mut self, q: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][q] & self.z[i][q];
            self.z[i][q] ^= self.x[i][q];
        }
    }

    pub fn cnot(&mut self, c: usize, t: usize) {
        for i in 0..2 * self.n {
            let (xc, xt, zc, zt) = (self.x[i][c], self.x[i][t], self.z[i][c], self.z[i][t]);
            self.r[i] ^= xc & zt & (xt ^ zc ^ true);
            self.x[i][t] ^= xc;
            self.z[i][c] ^= zt;
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cnot(a, b);
        self.h(b);
    }

    pub fn pauli_x(&mut self, q: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.z[i][q];
        }
    }

    pub fn pauli_z(&mut self, q: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][q];
        }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        for i in 0..2 * self.n {
            self.x[i].swap(a, b);
            self.z[i].swap(a, b);
        }
    }

    /// Conjugates by a Clifford gate. `PrepPlus` resets to `|+>` using `rng`.
    pub fn apply<R: Rng + ?Sized>(&mut self, g: &Gate, rng: &mut R) -> Result<(), TableauError> {
        match *g {
            Gate::Idle(_) => {}
            Gate::PauliX(q) => self.pauli_x(q),
            Gate::PauliZ(q) => self.pauli_z(q),
            Gate::CZ(a, b) => self.cz(a, b),
            Gate::CNOT(c, t) => self.cnot(c, t),
            Gate::SWAP(a, b) => self.swap(a, b),
            Gate::PrepPlus(q) => {
                let (out, _) = self.measure_x(q, rng);
                if out < 0 {
                    self.pauli_z(q);
                }
            }
            Gate::CCX(..) => return Err(TableauError::NonClifford),
            other => return Err(TableauError::Unsupported(other.kind())),
        }
        Ok(())
    }

    /// Phase exponent contribution of multiplying single-qubit Paulis.
    fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
        match (x1, z1) {
            (false, false) => 0,
            (true, true) => z2 as i32 - x2 as i32,
            (true, false) => (z2 as i32) * (2 * x2 as i32 - 1),
            (false, true) => (x2 as i32) * (1 - 2 * z2 as i32),
        }
    }

    /// Row `h` <- row `i` * row `h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let mut sum = 2 * self.r[h] as i32 + 2 * self.r[i] as i32;
        for j in 0..self.n {
            sum += Self::g(self.x[i][j], self.z[i][j], self.x[h][j], self.z[h][j]);
        }
        self.r[h] = sum.rem_euclid(4) == 2;
        for j in 0..self.n {
            let (xi, zi) = (self.x[i][j], self.z[i][j]);
            self.x[h][j] ^= xi;
            self.z[h][j] ^= zi;
        }
    }

    /// Measures `Z_q`; returns `(outcome is -1, deterministic)`.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> (bool, bool) {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&p| self.x[p][q]) {
            for i in 0..2 * n {
                if i != p && self.x[i][q] {
                    self.rowsum(i, p);
                }
            }
            self.x[p - n] = self.x[p].clone();
            self.z[p - n] = self.z[p].clone();
            self.r[p - n] = self.r[p];
            self.x[p] = vec![false; n];
            self.z[p] = vec![false; n];
            self.z[p][q] = true;
            let out: bool = rng.gen();
            self.r[p] = out;
            (out, false)
        } else {
            let s = 2 * n;
            self.x[s] = vec![false; n];
            self.z[s] = vec![false; n];
            self.r[s] = false;
            for i in 0..n {
                if self.x[i][q] {
                    self.rowsum(s, i + n);
                }
            }
            (self.r[s], true)
        }
    }

    /// Measures `X_q`; returns `(±1, deterministic)`.
    pub fn measure_x<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> (i8, bool) {
        self.h(q);
        let (minus, det) = self.measure_z(q, rng);
        self.h(q);
        (if minus { -1 } else { 1 }, det)
    }

    /// Stabilizer generators as signed Pauli strings, e.g. `+XZ`.
    pub fn stabilizers(&self) -> Vec<String> {
        (self.n..2 * self.n)
            .map(|i| {
                let mut s = String::from(if self.r[i] { "-" } else { "+" });
                for j in 0..self.n {
                    s.push(match (self.x[i][j], self.z[i][j]) {
                        (false, false) => 'I',
                        (true, false) => 'X',
                        (false, true) => 'Z',
                        (true, true) => 'Y',
                    });
                }
                s
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn plus_state_measures_deterministically() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut t = StabilizerTableau::new_plus(1);
        assert_eq!(t.measure_x(0, &mut rng), (1, true));
    }

    #[test]
    fn zero_state_measures_randomly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut plus = 0;
        for _ in 0..2000 {
            let mut t = StabilizerTableau::new(1);
            let (o, det) = t.measure_x(0, &mut rng);
            assert!(!det);
            plus += (o == 1) as u32;
        }
        assert!((900..1100).contains(&plus));
    }

    #[test]
    fn cz_maps_x_to_xz() {
        let mut t = StabilizerTableau::new(2);
        t.h(0);
        t.cz(0, 1);
        assert_eq!(t.stabilizers(), vec!["+XZ", "+IZ"]);
    }

    #[test]
    fn z_on_plus_flips_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut t = StabilizerTableau::new_plus(2);
        t.pauli_z(1);
        assert_eq!(t.measure_x(1, &mut rng), (-1, true));
        assert_eq!(t.measure_x(0, &mut rng), (1, true));
    }

    #[test]
    fn ccx_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut t = StabilizerTableau::new(3);
        assert_eq!(
            t.apply(&Gate::CCX(0, 1, 2), &mut rng),
            Err(TableauError::NonClifford)
        );
    }

    #[test]
    fn pauli_z_involution() {
        let mut t = StabilizerTableau::new_plus(3);
        t.cnot(0, 2);
        let before = t.clone();
        t.pauli_z(1);
        t.pauli_z(1);
        assert_eq!(t, before);
    }
}
