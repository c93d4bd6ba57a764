//! Closed-form estimates, threshold fits, break-even and overhead searches.

use crate::noise::{cnot_bitflip_probability, optimal_phase_flip_probability};
use crate::scalar::Float;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("under-determined fit: {0}")]
    UnderDetermined(String),
    #[error("no crossing with the physical error line in the data range")]
    NoCrossing,
    #[error("target {target:e} unreachable with nbar <= {max_nbar}")]
    Infeasible { target: f64, max_nbar: u32 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// One Monte-Carlo result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataPoint<F> {
    pub d: usize,
    pub p: F,
    pub p_l: F,
    pub ci_lo: F,
    pub ci_hi: F,
    pub censored: bool,
}

impl<F: Float> DataPoint<F> {
    pub fn new(d: usize, p: F, p_l: F) -> Self {
        Self {
            d,
            p,
            p_l,
            ci_lo: p_l,
            ci_hi: p_l,
            censored: false,
        }
    }

    fn usable(&self) -> bool {
        !self.censored && self.p_l > F::zero() && self.p > F::zero()
    }
}

/// Exponent of `p / p_th` in the scaling formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentFamily {
    /// `(d+1)/2`.
    Half,
    /// `(d+1)/4`.
    Quarter,
}

impl ExponentFamily {
    pub fn exponent<F: Float>(self, d: usize) -> F {
        let e = F::count(d + 1);
        match self {
            ExponentFamily::Half => e / F::lit(2.0),
            ExponentFamily::Quarter => e / F::lit(4.0),
        }
    }
}

/// `p_L = A (p / p_th)^e(d)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit<F> {
    pub a: F,
    pub p_th: F,
    pub family: ExponentFamily,
    /// `ln p_L - ln prediction` for each point used.
    pub residuals: Vec<F>,
    pub rms: F,
    pub points_used: usize,
}

impl<F: Float> ScalingFit<F> {
    pub fn predict(&self, d: usize, p: F) -> F {
        self.a * (p / self.p_th).powf(self.family.exponent(d))
    }
}

/// Least squares `min |X b - y|` by normal equations and partial pivoting.
fn least_squares<F: Float>(rows: &[Vec<F>], y: &[F]) -> Option<Vec<F>> {
    let k = rows.first()?.len();
    let mut m = vec![vec![F::zero(); k + 1]; k];
    for (r, &yi) in rows.iter().zip(y) {
        for i in 0..k {
            for j in 0..k {
                m[i][j] = m[i][j] + r[i] * r[j];
            }
            m[i][k] = m[i][k] + r[i] * yi;
        }
    }
    for c in 0..k {
        let piv = (c..k).max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap())?;
        if m[piv][c].abs() < F::lit(1e-12) {
            return None;
        }
        m.swap(c, piv);
        for r in 0..k {
            if r != c {
                let f = m[r][c] / m[c][c];
                for j in c..=k {
                    m[r][j] = m[r][j] - f * m[c][j];
                }
            }
        }
    }
    Some((0..k).map(|i| m[i][k] / m[i][i]).collect())
}

fn fit_once<F: Float>(pts: &[DataPoint<F>], family: ExponentFamily) -> Option<ScalingFit<F>> {
    let mut rows = Vec::with_capacity(pts.len());
    let mut y = Vec::with_capacity(pts.len());
    for pt in pts {
        let e: F = family.exponent(pt.d);
        rows.push(vec![F::one(), -e]);
        y.push(pt.p_l.ln() - e * pt.p.ln());
    }
    let b = least_squares(&rows, &y)?;
    let mut fit = ScalingFit {
        a: b[0].exp(),
        p_th: b[1].exp(),
        family,
        residuals: vec![],
        rms: F::zero(),
        points_used: pts.len(),
    };
    fit.residuals = pts
        .iter()
        .map(|pt| pt.p_l.ln() - fit.predict(pt.d, pt.p).ln())
        .collect();
    fit.rms = (fit.residuals.iter().map(|&r| r * r).sum::<F>() / F::count(pts.len())).sqrt();
    Some(fit)
}

/// Joint fit of `A` and `p_th` over all distances, restricted to
/// non-censored points with `p <= p_th`.
pub fn fit_threshold<F: Float>(
    points: &[DataPoint<F>],
    family: ExponentFamily,
) -> Result<ScalingFit<F>, AnalysisError> {
    let usable: Vec<DataPoint<F>> = points.iter().copied().filter(|p| p.usable()).collect();
    let mut per_d: BTreeMap<usize, usize> = BTreeMap::new();
    for p in &usable {
        *per_d.entry(p.d).or_default() += 1;
    }
    let good = per_d.values().filter(|&&n| n >= 3).count();
    if good < 2 {
        return Err(AnalysisError::UnderDetermined(format!(
            "need at least 2 distances with 3 usable points, have {good}"
        )));
    }
    let mut set = usable.clone();
    let mut fit = None;
    for _ in 0..20 {
        let f = fit_once(&set, family)
            .ok_or_else(|| AnalysisError::UnderDetermined("singular design".into()))?;
        let next: Vec<DataPoint<F>> = usable.iter().copied().filter(|p| p.p <= f.p_th).collect();
        let stable = next.len() == set.len();
        fit = Some(f);
        let distances = next
            .iter()
            .map(|p| p.d)
            .collect::<std::collections::BTreeSet<_>>()
            .len();
        if stable || next.len() < 3 || distances < 2 {
            break;
        }
        set = next;
    }
    Ok(fit.expect("at least one iteration"))
}

/// Slope and intercept of `ln p_L` against `ln p` for one distance.
pub fn fit_exponent<F: Float>(points: &[DataPoint<F>]) -> Result<(F, F), AnalysisError> {
    let pts: Vec<&DataPoint<F>> = points.iter().filter(|p| p.usable()).collect();
    if pts.len() < 2 {
        return Err(AnalysisError::UnderDetermined(
            "need two usable points".into(),
        ));
    }
    let rows: Vec<Vec<F>> = pts.iter().map(|p| vec![p.p.ln(), F::one()]).collect();
    let y: Vec<F> = pts.iter().map(|p| p.p_l.ln()).collect();
    let b = least_squares(&rows, &y)
        .ok_or_else(|| AnalysisError::UnderDetermined("identical p values".into()))?;
    Ok((b[0], b[1]))
}

fn ln_binomial<F: Float>(n: usize, k: usize) -> F {
    (0..k)
        .map(|i| (F::count(n - i) / F::count(i + 1)).ln())
        .sum()
}

/// Probability of more than `floor(d/2)` of `d` independent flips with
/// probability `q`.
pub fn binomial_tail<F: Float>(d: usize, q: F) -> F {
    if q <= F::zero() {
        return F::zero();
    }
    if q >= F::one() {
        return F::one();
    }
    (d / 2 + 1..=d)
        .map(|k| {
            (ln_binomial::<F>(d, k) + F::count(k) * q.ln() + F::count(d - k) * (F::one() - q).ln())
                .exp()
        })
        .sum()
}

/// Control-block `Z_L` probability under perfect intermediate EC, with
/// per-qubit corruption `p' = d p`.
pub fn accumulation_pzl<F: Float>(d: usize, p: F) -> F {
    binomial_tail(d, (F::count(d) * p).min(F::one()))
}

/// Whether `d p << 1`, taken as `d p <= 0.1`.
pub fn accumulation_valid<F: Float>(d: usize, p: F) -> bool {
    F::count(d) * p <= F::lit(0.1)
}

/// Worst-case logical `X` probability per cycle, `2 d (d-1) p_X^CX`.
pub fn logical_x_bound<F: Float>(d: usize, nbar: F, ratio: F) -> F {
    F::count(2 * d * (d - 1)) * cnot_bitflip_probability(nbar, ratio)
}

/// Bound discounting the fraction `correlated` of CNOT bit-flips that are
/// `X_c X_t` on first-layer CNOTs, which end as data stabilizers.
pub fn logical_x_bound_refined<F: Float>(d: usize, nbar: F, ratio: F, correlated: F) -> F {
    F::count(d * (d - 1)) * (F::lit(2.0) - correlated) * cnot_bitflip_probability(nbar, ratio)
}

/// Memory resources meeting a target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverheadPoint<F> {
    pub d: usize,
    pub nbar: F,
    pub data_qubits: usize,
    pub total_modes: usize,
    pub p_zl: F,
    pub p_xl: F,
    pub p_l: F,
}

pub const MAX_NBAR: u32 = 15;
const MAX_DISTANCE: usize = 4001;

/// Smallest odd `d`, then smallest integer `nbar <= 15`, with
/// `A (p/p_th)^e(d) + 2 d (d-1) p_X^CX(nbar) <= target`.
pub fn memory_overhead<F: Float>(
    target: F,
    ratio: F,
    fit: &ScalingFit<F>,
) -> Result<OverheadPoint<F>, AnalysisError> {
    if !(target > F::zero()) || !(ratio > F::zero()) {
        return Err(AnalysisError::Invalid(
            "target and ratio must be positive".into(),
        ));
    }
    let p = optimal_phase_flip_probability(ratio, F::one());
    let nbar_max = F::count(MAX_NBAR as usize);
    let infeasible = Err(AnalysisError::Infeasible {
        target: target.to_f64().unwrap_or(f64::NAN),
        max_nbar: MAX_NBAR,
    });
    let mut d = 3;
    while d <= MAX_DISTANCE {
        let p_xl_floor = logical_x_bound(d, nbar_max, ratio);
        if p_xl_floor > target {
            return infeasible;
        }
        let p_zl = fit.predict(d, p);
        if p_zl + p_xl_floor <= target {
            let nbar = (1..=MAX_NBAR)
                .map(|n| F::count(n as usize))
                .find(|&n| p_zl + logical_x_bound(d, n, ratio) <= target)
                .expect("nbar_max is feasible");
            let p_xl = logical_x_bound(d, nbar, ratio);
            return Ok(OverheadPoint {
                d,
                nbar,
                data_qubits: d,
                total_modes: 2 * d - 1,
                p_zl,
                p_xl,
                p_l: p_zl + p_xl,
            });
        }
        d += 2;
    }
    infeasible
}

/// Physical error at which the best logical error over `d` crosses the
/// identity line, interpolated in log-log. Points are
/// `(physical gate error, p_L, d)`.
pub fn breakeven<F: Float>(points: &[(F, F, usize)]) -> Result<F, AnalysisError> {
    let mut best: Vec<(F, F)> = Vec::new();
    for &(x, pl, _) in points {
        if !(x > F::zero()) || !(pl > F::zero()) {
            continue;
        }
        match best.iter_mut().find(|b| b.0 == x) {
            Some(b) => b.1 = b.1.min(pl),
            None => best.push((x, pl)),
        }
    }
    best.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let g = |b: &(F, F)| b.1.ln() - b.0.ln();
    for w in best.windows(2) {
        let (g0, g1) = (g(&w[0]), g(&w[1]));
        if g0 <= F::zero() && g1 > F::zero() {
            let (l0, l1) = (w[0].0.ln(), w[1].0.ln());
            return Ok((l0 + (l1 - l0) * (-g0) / (g1 - g0)).exp());
        }
    }
    Err(AnalysisError::NoCrossing)
}

/// Odd `d` minimizing `2 accumulation_pzl(d, p)`.
pub fn optimal_distance_concat<F: Float>(p: F) -> (usize, F) {
    let mut best = (3, F::lit(2.0) * accumulation_pzl(3, p));
    let mut d = 5;
    while d <= MAX_DISTANCE && F::count(d) * p < F::one() {
        let v = F::lit(2.0) * accumulation_pzl(d, p);
        if v < best.1 {
            best = (d, v);
        }
        d += 2;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::ratio_for_phase_flip_probability;

    fn synthetic(a: f64, p_th: f64, family: ExponentFamily) -> Vec<DataPoint<f64>> {
        let mut v = Vec::new();
        for d in [3, 5, 7] {
            for p in [0.002, 0.004, 0.006, 0.01] {
                let fit = ScalingFit {
                    a,
                    p_th,
                    family,
                    residuals: vec![],
                    rms: 0.0,
                    points_used: 0,
                };
                v.push(DataPoint::new(d, p, fit.predict(d, p)));
            }
        }
        v
    }

    #[test]
    fn fit_recovers_parameters() {
        let f = fit_threshold(
            &synthetic(0.1, 0.019, ExponentFamily::Half),
            ExponentFamily::Half,
        )
        .unwrap();
        assert!((f.a / 0.1 - 1.0).abs() < 0.01);
        assert!((f.p_th / 0.019 - 1.0).abs() < 0.01);
        assert!(f.rms < 1e-9);
    }

    #[test]
    fn fit_rejects_single_distance() {
        let pts: Vec<_> = synthetic(0.1, 0.019, ExponentFamily::Half)
            .into_iter()
            .filter(|p| p.d == 3)
            .collect();
        assert!(matches!(
            fit_threshold(&pts, ExponentFamily::Half),
            Err(AnalysisError::UnderDetermined(_))
        ));
    }

    #[test]
    fn exponent_of_power_law() {
        let pts: Vec<DataPoint<f64>> = [0.001, 0.002, 0.003]
            .iter()
            .map(|&p| DataPoint::new(5, p, 7.0 * p * p * p))
            .collect();
        let (slope, _) = fit_exponent(&pts).unwrap();
        assert!((slope - 3.0).abs() < 1e-9);
    }

    #[test]
    fn accumulation_examples() {
        assert!((accumulation_pzl(3, 0.001f64) - 2.6946e-5).abs() < 1e-8);
        assert_eq!(accumulation_pzl(9, 0.0), 0.0);
        assert!(accumulation_valid(3, 0.001));
        assert!(!accumulation_valid(30, 0.01));
    }

    #[test]
    fn accumulation_generic_f32() {
        let v: f32 = accumulation_pzl(3, 0.001f32);
        assert!((v - 2.6946e-5).abs() < 1e-7);
    }

    #[test]
    fn logical_x_examples() {
        let r = 1e-3f64;
        let base = cnot_bitflip_probability(10.0, r);
        assert!((logical_x_bound(3, 10.0, r) / base - 12.0).abs() < 1e-9);
        let ratio = logical_x_bound(5, 11.0, r) / logical_x_bound(5, 10.0, r);
        assert!((ratio - (-2.0f64).exp()).abs() < 1e-12);
        let v = logical_x_bound(70, 15.0, ratio_for_phase_flip_probability(0.01));
        assert!(v > 1.5e-10 && v < 2.1e-10, "{v}");
        assert!(logical_x_bound_refined(5, 10.0, r, 0.0) == logical_x_bound(5, 10.0, r));
    }

    fn memory_fit() -> ScalingFit<f64> {
        ScalingFit {
            a: 0.05,
            p_th: 0.019,
            family: ExponentFamily::Half,
            residuals: vec![],
            rms: 0.0,
            points_used: 0,
        }
    }

    #[test]
    fn overhead_trivial_and_infeasible() {
        let r = ratio_for_phase_flip_probability(0.01);
        let o = memory_overhead(1.0, r, &memory_fit()).unwrap();
        assert_eq!(o.d, 3);
        assert_eq!(o.total_modes, 5);
        assert!(matches!(
            memory_overhead(1e-16, r, &memory_fit()),
            Err(AnalysisError::Infeasible { .. })
        ));
    }

    #[test]
    fn overhead_is_minimal() {
        let r = ratio_for_phase_flip_probability(0.005);
        let fit = memory_fit();
        let o = memory_overhead(1e-8, r, &fit).unwrap();
        assert!(o.p_l <= 1e-8);
        let p = optimal_phase_flip_probability(r, 1.0);
        let prev = o.d - 2;
        assert!(fit.predict(prev, p) + logical_x_bound(prev, 15.0, r) > 1e-8);
    }

    #[test]
    fn breakeven_synthetic() {
        let pts: Vec<(f64, f64, usize)> = [0.02, 0.05, 0.08, 0.12, 0.2]
            .iter()
            .map(|&x| (x, x * x / 0.1, 3))
            .collect();
        let x = breakeven(&pts).unwrap();
        assert!((x - 0.1).abs() < 1e-9);
        assert_eq!(breakeven(&pts[..2]), Err(AnalysisError::NoCrossing));
    }

    #[test]
    fn optimal_distance_has_interior_minimum() {
        let (d, v) = optimal_distance_concat(0.001);
        assert!(d > 3);
        assert!(v < 2.0 * accumulation_pzl(3, 0.001));
        assert!(v < 2.0 * accumulation_pzl(d + 20, 0.001));
        let (_, v2) = optimal_distance_concat(0.002);
        assert!(v2 >= v);
    }
}
