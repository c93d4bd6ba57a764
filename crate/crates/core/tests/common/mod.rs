//! Dense statevector reference simulator for small registers.
//!
//! Qubit `q` is bit `q` of the basis index.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use repcat::{ErrorState, Gate};

#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub amp: Vec<Complex64>,
}

fn bit(i: usize, q: usize) -> bool {
    i >> q & 1 == 1
}

impl Dense {
    /// `|0...0>`.
    pub fn zero(n: usize) -> Self {
        let mut amp = vec![Complex64::new(0.0, 0.0); 1 << n];
        amp[0] = Complex64::new(1.0, 0.0);
        Self { n, amp }
    }

    /// `|+...+>`.
    pub fn plus(n: usize) -> Self {
        let a = (1.0 / (1usize << n) as f64).sqrt();
        Self {
            n,
            amp: vec![Complex64::new(a, 0.0); 1 << n],
        }
    }

    /// Haar-ish random state from Gaussian amplitudes.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut amp: Vec<Complex64> = (0..1 << n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm = amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amp {
            *a /= norm;
        }
        Self { n, amp }
    }

    pub fn h(&mut self, q: usize) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amp.len() {
            if !bit(i, q) {
                let j = i | 1 << q;
                let (a, b) = (self.amp[i], self.amp[j]);
                self.amp[i] = (a + b) * s;
                self.amp[j] = (a - b) * s;
            }
        }
    }

    /// `exp(-i theta Y / 2)`.
    pub fn ry(&mut self, q: usize, theta: f64) {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        for i in 0..self.amp.len() {
            if !bit(i, q) {
                let j = i | 1 << q;
                let (a, b) = (self.amp[i], self.amp[j]);
                self.amp[i] = a * c - b * s;
                self.amp[j] = a * s + b * c;
            }
        }
    }

    /// Probability that `q` reads 1.
    pub fn prob_one(&self, q: usize) -> f64 {
        self.amp
            .iter()
            .enumerate()
            .filter(|(i, _)| bit(*i, q))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn s(&mut self, q: usize) {
        for i in 0..self.amp.len() {
            if bit(i, q) {
                self.amp[i] *= Complex64::i();
            }
        }
    }

    pub fn x(&mut self, q: usize) {
        for i in 0..self.amp.len() {
            if !bit(i, q) {
                self.amp.swap(i, i | 1 << q);
            }
        }
    }

    pub fn z(&mut self, q: usize) {
        for i in 0..self.amp.len() {
            if bit(i, q) {
                self.amp[i] = -self.amp[i];
            }
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        for i in 0..self.amp.len() {
            if bit(i, a) && bit(i, b) {
                self.amp[i] = -self.amp[i];
            }
        }
    }

    /// `X` on `t` conditioned on all `controls`.
    pub fn mcx(&mut self, controls: &[usize], t: usize) {
        for i in 0..self.amp.len() {
            if !bit(i, t) && controls.iter().all(|&c| bit(i, c)) {
                self.amp.swap(i, i | 1 << t);
            }
        }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        for i in 0..self.amp.len() {
            if bit(i, a) && !bit(i, b) {
                self.amp.swap(i, i ^ (1 << a) ^ (1 << b));
            }
        }
    }

    /// Unitary gates only; resets and measurements panic.
    pub fn gate(&mut self, g: &Gate) {
        match *g {
            Gate::Idle(_) => {}
            Gate::PauliX(q) => self.x(q),
            Gate::PauliZ(q) => self.z(q),
            Gate::CZ(a, b) => self.cz(a, b),
            Gate::CNOT(c, t) => self.mcx(&[c], t),
            Gate::CCX(a, b, t) => self.mcx(&[a, b], t),
            Gate::SWAP(a, b) => self.swap(a, b),
            other => panic!("not unitary: {other:?}"),
        }
    }

    /// Applies the error operator `prod Z^frame * prod CZ`.
    pub fn error(&mut self, e: &ErrorState) {
        for (q, &z) in e.zframe.iter().enumerate() {
            if z {
                self.z(q);
            }
        }
        for &(a, b) in &e.czset {
            self.cz(a, b);
        }
    }

    /// Computational-basis outcome probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amp.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|<self|other>|`.
    pub fn overlap(&self, other: &Dense) -> f64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }
}
