//! Batch front-end: sweep configuration, execution, result files.

use repcat::analysis::{fit_threshold, memory_overhead, DataPoint, ExponentFamily, ScalingFit};
use repcat::montecarlo::{enumerate_fault_sets, estimate_prepared, Census, Prepared, StoppingRule};
use repcat::noise::{ratio_for_phase_flip_probability, GateTime, NoiseSpec, SwapModel};
use repcat::{Estimate, ExperimentKind, NoiseConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_FIT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

pub const CSV_HEADER: &str = "d,p,N,N_fail,p_L,ci_lo,ci_hi,censored";

/// Error carrying its process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: 1,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Noise sweep: explicit `p` values or a grid of physical parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSweep {
    Direct {
        p: Vec<f64>,
    },
    Physical {
        nbar: Vec<f64>,
        kappa1: Vec<f64>,
        kappa2: Vec<f64>,
        #[serde(rename = "T", default = "optimal")]
        t: GateTime,
    },
}

fn optimal() -> GateTime {
    GateTime::Named("optimal".into())
}

impl NoiseSweep {
    /// Phase-flip probabilities in sweep order.
    pub fn probabilities(&self) -> Result<Vec<f64>, CliError> {
        match self {
            NoiseSweep::Direct { p } => Ok(p.clone()),
            NoiseSweep::Physical {
                nbar,
                kappa1,
                kappa2,
                t,
            } => {
                let mut out = Vec::new();
                for &nbar in nbar {
                    for &kappa1 in kappa1 {
                        for &kappa2 in kappa2 {
                            let spec = NoiseSpec::Physical {
                                nbar,
                                kappa1,
                                kappa2,
                                t: t.clone(),
                            };
                            out.push(
                                spec.phase_flip_probability()
                                    .map_err(|e| CliError::config(e.to_string()))?,
                            );
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

fn default_true() -> bool {
    true
}

/// One sweep over distances and noise strengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub distances: Vec<usize>,
    pub noise: NoiseSweep,
    #[serde(default)]
    pub stopping: StoppingRule,
    #[serde(default)]
    pub seed: u64,
    /// Output path prefix; `.json` and `.csv` are appended.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Wall-clock cap per point in seconds.
    #[serde(default)]
    pub time_budget_s: Option<f64>,
    #[serde(default)]
    pub swap: SwapModel,
    #[serde(default = "default_true")]
    pub idle_dead_ancillas: bool,
    #[serde(default)]
    pub idle_during_readout: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.distances.is_empty() {
            return Err(CliError::config("distances: empty list"));
        }
        let ps = self.noise.probabilities()?;
        if ps.is_empty() {
            return Err(CliError::config("noise: empty sweep"));
        }
        for &d in &self.distances {
            self.experiment
                .build(d)
                .map_err(|e| CliError::config(format!("distances: {e}")))?;
        }
        for &p in &ps {
            self.noise_config(p)?;
        }
        if self.stopping.min_failures == 0 || self.stopping.max_trajectories == 0 {
            return Err(CliError::config("stopping: limits must be positive"));
        }
        if matches!(self.time_budget_s, Some(t) if !(t > 0.0)) {
            return Err(CliError::config("time_budget_s: must be positive"));
        }
        Ok(())
    }

    pub fn noise_config(&self, p: f64) -> Result<NoiseConfig, CliError> {
        let mut cfg = NoiseConfig::with_options(p, self.swap, self.idle_dead_ancillas)
            .map_err(|e| CliError::config(format!("noise: {e}")))?;
        cfg.idle_during_readout = self.idle_during_readout;
        Ok(cfg)
    }
}

/// Parses a JSON config, then applies `key=value` overrides.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut v: Value =
        serde_json::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))?;
    for o in overrides {
        apply_override(&mut v, o)?;
    }
    let cfg: ExperimentConfig =
        serde_json::from_value(v).map_err(|e| CliError::config(format!("config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

/// `a.b=value`; the value is read as JSON, falling back to a string.
pub fn apply_override(v: &mut Value, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override '{item}': expected key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = v;
    let parts: Vec<&str> = key.trim().split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| CliError::config(format!("override '{key}': not an object")))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Err(CliError::config(format!("override '{item}': empty key")))
}

/// Everything needed to reproduce a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub estimates: Vec<Estimate>,
}

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

/// Runs the sweep, distance-major.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    workers: usize,
    progress: bool,
) -> Result<ResultRecord, CliError> {
    let started = now();
    let ps = cfg.noise.probabilities()?;
    let mut estimates = Vec::new();
    for &d in &cfg.distances {
        let prep = Prepared::build(cfg.experiment, d, &cfg.noise_config(0.01)?)
            .map_err(|e| CliError::config(e.to_string()))?;
        for &p in &ps {
            let noise = cfg.noise_config(p)?;
            let budget = cfg.time_budget_s.map(Duration::from_secs_f64);
            let e = estimate_prepared(
                &prep,
                &noise,
                cfg.seed,
                cfg.stopping,
                workers,
                budget,
                progress,
            );
            if progress {
                eprintln!(
                    "{} d={d} p={p}: N={} fail={} p_L={:.3e}",
                    cfg.experiment, e.n, e.n_fail, e.p_l
                );
            }
            estimates.push(e);
        }
    }
    Ok(ResultRecord {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        started_unix_s: started,
        finished_unix_s: now(),
        estimates,
    })
}

pub fn csv(estimates: &[Estimate]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for e in estimates {
        s.push_str(&format!(
            "{},{},{},{},{:.6e},{:.6e},{:.6e},{}\n",
            e.d, e.p, e.n, e.n_fail, e.p_l, e.ci_lo, e.ci_hi, e.censored
        ));
    }
    s
}

/// Reads data points from a result record (`.json`) or a sweep CSV.
pub fn read_points(path: &Path) -> Result<Vec<DataPoint<f64>>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |m: String| CliError::config(format!("{}: {m}", path.display()));
    if path.extension().is_some_and(|x| x == "csv") {
        let mut lines = text.lines();
        if lines.next() != Some(CSV_HEADER) {
            return Err(bad("unexpected CSV header".into()));
        }
        lines
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                let f: Vec<&str> = l.split(',').collect();
                let num = |k: usize| {
                    f.get(k)
                        .and_then(|x| x.parse::<f64>().ok())
                        .ok_or_else(|| bad(format!("line {}: column {}", i + 2, k + 1)))
                };
                if f.len() != 8 {
                    return Err(bad(format!("line {}: expected 8 columns", i + 2)));
                }
                Ok(DataPoint {
                    d: num(0)? as usize,
                    p: num(1)?,
                    p_l: num(4)?,
                    ci_lo: num(5)?,
                    ci_hi: num(6)?,
                    censored: f[7] == "true",
                })
            })
            .collect()
    } else {
        let r: ResultRecord = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        Ok(r.estimates
            .iter()
            .map(|e| DataPoint {
                d: e.d,
                p: e.p,
                p_l: e.p_l,
                ci_lo: e.ci_lo,
                ci_hi: e.ci_hi,
                censored: e.censored,
            })
            .collect())
    }
}

pub fn fit(points: &[DataPoint<f64>], family: ExponentFamily) -> Result<ScalingFit<f64>, CliError> {
    fit_threshold(points, family).map_err(|e| CliError {
        code: EXIT_FIT,
        message: format!("fit: {e}"),
    })
}

/// Overhead table over `ps` and `targets`; infeasible cells keep empty
/// fields and `feasible = false`.
pub fn overhead_csv(fit: &ScalingFit<f64>, ps: &[f64], targets: &[f64]) -> String {
    let mut s = String::from("p,target_pL,d,nbar,total_modes,feasible\n");
    for &p in ps {
        let ratio = ratio_for_phase_flip_probability(p);
        for &t in targets {
            match memory_overhead(t, ratio, fit) {
                Ok(o) => s.push_str(&format!(
                    "{p},{t:e},{},{},{},true\n",
                    o.d, o.nbar, o.total_modes
                )),
                Err(_) => s.push_str(&format!("{p},{t:e},,,,false\n")),
            }
        }
    }
    s
}

/// Exhaustive fault insertion; budget overflow maps to exit code 4.
pub fn enumerate(
    kind: ExperimentKind,
    d: usize,
    max_weight: usize,
    budget: u64,
    seeds: u64,
) -> Result<(Prepared, NoiseConfig, Census), CliError> {
    if max_weight > 2 {
        return Err(CliError::config("max weight must be at most 2"));
    }
    let cfg = NoiseConfig::new(0.01).expect("valid p");
    let prep = Prepared::build(kind, d, &cfg).map_err(|e| CliError::config(e.to_string()))?;
    let census =
        enumerate_fault_sets(&prep, &cfg, max_weight, budget, seeds).map_err(|b| CliError {
            code: EXIT_BUDGET,
            message: format!("{} fault sets needed, budget {}", b.needed, b.budget),
        })?;
    Ok((prep, cfg, census))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str =
        r#"{"experiment": "memory", "distances": [3, 5], "noise": {"p": [0.01, 0.02]}, "seed": 4}"#;

    #[test]
    fn config_round_trip() {
        let cfg = parse_config(BASE, &[]).unwrap();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert_eq!(parse_config(&text, &[]).unwrap(), cfg);
    }

    #[test]
    fn physical_grid_round_trip() {
        let text = r#"{"experiment": "cnot", "distances": [3],
            "noise": {"nbar": [15], "kappa1": [1e3, 2e3], "kappa2": [1e5], "T": "optimal"}}"#;
        let cfg = parse_config(text, &[]).unwrap();
        assert_eq!(cfg.noise.probabilities().unwrap().len(), 2);
        let again = parse_config(&serde_json::to_string(&cfg).unwrap(), &[]).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn overrides_apply() {
        let o = [
            "seed=9".to_string(),
            "stopping.min_failures=50".into(),
            "experiment=cnot".into(),
        ];
        let cfg = parse_config(BASE, &o).unwrap();
        assert_eq!(
            (cfg.seed, cfg.stopping.min_failures, cfg.experiment),
            (9, 50, ExperimentKind::Cnot)
        );
    }

    #[test]
    fn invalid_configs_exit_2() {
        for bad in [
            r#"{"experiment": "memory", "distances": [], "noise": {"p": [0.01]}}"#,
            r#"{"experiment": "memory", "distances": [4], "noise": {"p": [0.01]}}"#,
            r#"{"experiment": "nope", "distances": [3], "noise": {"p": [0.01]}}"#,
            r#"{"experiment": "memory", "distances": [3], "noise": {"p": [0.5]}}"#,
            "{\n  \"experiment\": \"memory\",\n  oops\n}",
        ] {
            assert_eq!(
                parse_config(bad, &[]).unwrap_err().code,
                EXIT_CONFIG,
                "{bad}"
            );
        }
    }

    #[test]
    fn parse_errors_carry_line() {
        let e = parse_config("{\n  \"experiment\": \"memory\",\n  oops\n}", &[]).unwrap_err();
        assert!(e.message.contains("line 3"), "{}", e.message);
    }

    #[test]
    fn fit_needs_two_distances() {
        let pts = vec![DataPoint::new(3, 0.01, 0.01), DataPoint::new(3, 0.02, 0.04)];
        assert_eq!(fit(&pts, ExponentFamily::Half).unwrap_err().code, EXIT_FIT);
    }

    #[test]
    fn enumeration_budget_exit_4() {
        assert_eq!(
            enumerate(ExperimentKind::Memory, 3, 2, 10, 1)
                .err()
                .map(|e| e.code),
            Some(EXIT_BUDGET)
        );
    }
}
