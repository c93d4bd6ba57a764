//! Physical-parameter conversions and stochastic gate error channels.
//!
//! Every noisy gate is a perfect gate followed by one error drawn from its
//! channel. All gates last one time step `T` and share the per-step
//! phase-flip probability `p`.

use crate::circuit::{Gate, GateKind};
use crate::error_state::ErrorState;
use crate::scalar::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("no finite optimal gate time when kappa1 = 0")]
    NoFiniteOptimum,
    #[error("invalid cat-qubit parameters: {0}")]
    InvalidParams(String),
    #[error("phase-flip probability {0} outside [0, 1/6]")]
    InvalidProbability(f64),
}

/// Physical parameters of one cat qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatQubitParams<F> {
    pub nbar: F,
    /// Single-photon loss rate (1/s).
    pub kappa1: F,
    /// Two-photon dissipation rate (1/s).
    pub kappa2: F,
    /// Gate time (s).
    #[serde(rename = "T")]
    pub t: F,
}

impl<F: Float> CatQubitParams<F> {
    pub fn validate(&self) -> Result<(), NoiseError> {
        let z = F::zero();
        if !(self.nbar > z && self.kappa1 >= z && self.kappa2 > z && self.t > z) {
            return Err(NoiseError::InvalidParams(format!(
                "need nbar > 0, kappa1 >= 0, kappa2 > 0, T > 0 (got {:?})",
                (self.nbar, self.kappa1, self.kappa2, self.t)
            )));
        }
        Ok(())
    }
}

/// `p = nbar * kappa1 * T`.
pub fn idle_phase_flip_probability<F: Float>(params: &CatQubitParams<F>) -> F {
    params.nbar * params.kappa1 * params.t
}

/// Gate time maximizing CNOT fidelity, `(2 nbar sqrt(pi))^-1 sqrt(1/(kappa1 kappa2))`.
pub fn optimal_gate_time<F: Float>(nbar: F, kappa1: F, kappa2: F) -> Result<F, NoiseError> {
    if kappa1 <= F::zero() {
        return Err(NoiseError::NoFiniteOptimum);
    }
    let two = F::lit(2.0);
    Ok((F::one() / (kappa1 * kappa2)).sqrt() / (two * nbar * F::PI().sqrt()))
}

/// `p = (2 sqrt(pi))^-1 sqrt(kappa1 / kappa2)`.
pub fn optimal_phase_flip_probability<F: Float>(kappa1: F, kappa2: F) -> F {
    (kappa1 / kappa2).sqrt() / (F::lit(2.0) * F::PI().sqrt())
}

/// Inverse of [`optimal_phase_flip_probability`]: `kappa1 / kappa2` giving `p`.
pub fn ratio_for_phase_flip_probability<F: Float>(p: F) -> F {
    let x = F::lit(2.0) * F::PI().sqrt() * p;
    x * x
}

/// Fitted CNOT bit-flip probability `(5.58 sqrt(r) + 1.68 r) exp(-2 nbar)`, `r = kappa1/kappa2`.
pub fn cnot_bitflip_probability<F: Float>(nbar: F, ratio: F) -> F {
    (F::lit(5.58) * ratio.sqrt() + F::lit(1.68) * ratio) * (-F::lit(2.0) * nbar).exp()
}

/// Error operator on a gate's operand positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorOp {
    Z(u8),
    ZZ(u8, u8),
    CZ(u8, u8),
    /// `CZ_ij Z_k`.
    CZZ(u8, u8, u8),
    /// Measurement outcome flip.
    Flip,
}

impl ErrorOp {
    /// Multiplies the error into `e`; `ops` are the gate operands.
    pub fn apply_to(self, e: &mut ErrorState, ops: &[usize]) {
        match self {
            ErrorOp::Z(i) => e.flip_z(ops[i as usize]),
            ErrorOp::ZZ(i, j) => {
                e.flip_z(ops[i as usize]);
                e.flip_z(ops[j as usize]);
            }
            ErrorOp::CZ(i, j) => e.toggle_cz(ops[i as usize], ops[j as usize]),
            ErrorOp::CZZ(i, j, k) => {
                e.toggle_cz(ops[i as usize], ops[j as usize]);
                e.flip_z(ops[k as usize]);
            }
            ErrorOp::Flip => {}
        }
    }
}

/// A gate's error channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateErrorModel {
    pub kind: GateKind,
    pub terms: Vec<(ErrorOp, f64)>,
    pub identity: f64,
}

impl GateErrorModel {
    fn new(kind: GateKind, terms: Vec<(ErrorOp, f64)>) -> Self {
        let identity = 1.0 - terms.iter().map(|t| t.1).sum::<f64>();
        Self {
            kind,
            terms,
            identity,
        }
    }

    /// Draws one term index, or `None` for identity.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, &(_, p)) in self.terms.iter().enumerate() {
            acc += p;
            if u < acc {
                return Some(i);
            }
        }
        None
    }

    /// Total error probability.
    pub fn error_probability(&self) -> f64 {
        1.0 - self.identity
    }
}

/// Error model of the bias-preserving SWAP, absent from the gate table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SwapModel {
    /// `{Z1: p, Z2: p}`.
    ZMarginal,
    /// Explicit probabilities in units of `p`.
    Custom { z1: f64, z2: f64, z1z2: f64 },
}

impl Default for SwapModel {
    fn default() -> Self {
        SwapModel::ZMarginal
    }
}

/// Resolved noise parameters with cached channels.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseConfig {
    pub p: f64,
    pub p_meas: f64,
    pub swap: SwapModel,
    /// Apply idle noise to ancillas between measurement and re-preparation.
    pub idle_dead_ancillas: bool,
    /// Apply idle noise to data qubits while their ancillas are prepared or read out.
    pub idle_during_readout: bool,
    channels: Vec<GateErrorModel>,
}

fn kind_slot(k: GateKind) -> usize {
    match k {
        GateKind::Idle => 0,
        GateKind::PrepPlus => 1,
        GateKind::PrepZeroL => 2,
        GateKind::MeasX => 3,
        GateKind::PauliX => 4,
        GateKind::PauliZ => 5,
        GateKind::CZ => 6,
        GateKind::CNOT => 7,
        GateKind::CCX => 8,
        GateKind::SWAP => 9,
    }
}

const KINDS: [GateKind; 10] = [
    GateKind::Idle,
    GateKind::PrepPlus,
    GateKind::PrepZeroL,
    GateKind::MeasX,
    GateKind::PauliX,
    GateKind::PauliZ,
    GateKind::CZ,
    GateKind::CNOT,
    GateKind::CCX,
    GateKind::SWAP,
];

fn channel(kind: GateKind, p: f64, p_meas: f64, swap: SwapModel) -> GateErrorModel {
    use ErrorOp::*;
    let terms = match kind {
        GateKind::Idle
        | GateKind::PrepPlus
        | GateKind::PrepZeroL
        | GateKind::PauliX
        | GateKind::PauliZ => {
            vec![(Z(0), p)]
        }
        GateKind::MeasX => vec![(Flip, p_meas)],
        GateKind::CZ => vec![(Z(0), p), (Z(1), p)],
        GateKind::CNOT => vec![(Z(0), 3.0 * p), (Z(1), 0.5 * p), (ZZ(0, 1), 0.5 * p)],
        GateKind::CCX => vec![
            (Z(0), p),
            (Z(1), p),
            (Z(2), 0.5 * p),
            (CZ(0, 1), 3.0 * p),
            (CZZ(0, 1, 2), 0.5 * p),
        ],
        GateKind::SWAP => match swap {
            SwapModel::ZMarginal => vec![(Z(0), p), (Z(1), p)],
            SwapModel::Custom { z1, z2, z1z2 } => {
                vec![(Z(0), z1 * p), (Z(1), z2 * p), (ZZ(0, 1), z1z2 * p)]
            }
        },
    };
    GateErrorModel::new(kind, terms.into_iter().filter(|t| t.1 > 0.0).collect())
}

impl NoiseConfig {
    /// Channels derived from `p`, measurement flips with probability `p`.
    pub fn new(p: f64) -> Result<Self, NoiseError> {
        Self::with_options(p, SwapModel::default(), true)
    }

    pub fn with_options(
        p: f64,
        swap: SwapModel,
        idle_dead_ancillas: bool,
    ) -> Result<Self, NoiseError> {
        if !(0.0..=1.0 / 6.0).contains(&p) {
            return Err(NoiseError::InvalidProbability(p));
        }
        let channels: Vec<_> = KINDS.iter().map(|&k| channel(k, p, p, swap)).collect();
        if channels.iter().any(|c| c.identity < -1e-12) {
            return Err(NoiseError::InvalidProbability(p));
        }
        Ok(Self {
            p,
            p_meas: p,
            swap,
            idle_dead_ancillas,
            idle_during_readout: false,
            channels,
        })
    }

    pub fn noiseless() -> Self {
        Self::new(0.0).expect("p = 0 is valid")
    }

    pub fn model(&self, kind: GateKind) -> &GateErrorModel {
        &self.channels[kind_slot(kind)]
    }
}

/// Draws one error for `gate`, as a delta over `n` qubits.
///
/// A measurement flip is reported through the second component.
pub fn sample_gate_error<R: Rng + ?Sized>(
    gate: &Gate,
    n: usize,
    cfg: &NoiseConfig,
    rng: &mut R,
) -> (ErrorState, bool) {
    let mut e = ErrorState::new(n);
    let model = cfg.model(gate.kind());
    let mut flip = false;
    if let Some(i) = model.sample(rng) {
        let op = model.terms[i].0;
        flip = op == ErrorOp::Flip;
        op.apply_to(&mut e, &gate.operands());
    }
    (e, flip)
}

/// Independent `Z` with probability `p` on each qubit of a `|0>_L` block.
pub fn prep_zero_l_noise<R: Rng + ?Sized>(d: usize, cfg: &NoiseConfig, rng: &mut R) -> Vec<bool> {
    (0..d).map(|_| rng.gen::<f64>() < cfg.p).collect()
}

/// Experiment-file noise description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSpec {
    Direct {
        p: f64,
    },
    Physical {
        nbar: f64,
        kappa1: f64,
        kappa2: f64,
        #[serde(rename = "T")]
        t: GateTime,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateTime {
    Seconds(f64),
    /// Must be `"optimal"`.
    Named(String),
}

impl NoiseSpec {
    /// Per-step phase-flip probability.
    pub fn phase_flip_probability(&self) -> Result<f64, NoiseError> {
        match self {
            NoiseSpec::Direct { p } => Ok(*p),
            NoiseSpec::Physical {
                nbar,
                kappa1,
                kappa2,
                t,
            } => {
                let t = match t {
                    GateTime::Seconds(s) => *s,
                    GateTime::Named(n) if n == "optimal" => {
                        optimal_gate_time(*nbar, *kappa1, *kappa2)?
                    }
                    GateTime::Named(n) => {
                        return Err(NoiseError::InvalidParams(format!(
                            "unknown gate time '{n}'"
                        )))
                    }
                };
                let params = CatQubitParams {
                    nbar: *nbar,
                    kappa1: *kappa1,
                    kappa2: *kappa2,
                    t,
                };
                params.validate()?;
                Ok(idle_phase_flip_probability(&params))
            }
        }
    }
}
