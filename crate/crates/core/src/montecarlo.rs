//! Trajectory engine and the failure-count stopping rule.

use crate::circuit::{Block, Gate};
use crate::circuits::{Directive, Experiment, ExperimentKind, LogicalOp};
use crate::decoder::{
    self, cz_posteriori_undo, logical_failure_check, majority_decode_steane, majority_vote,
    Correction, CorrectionLog, DecodeError, Geometry, SyndromeHistory,
};
use crate::error_state::ErrorState;
use crate::noise::{ErrorOp, GateErrorModel, NoiseConfig};
use crate::tableau::StabilizerTableau;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

/// Trajectories per aggregation block.
pub const BLOCK: u64 = 256;

const NO_RECORD: usize = usize::MAX;

/// Reproducible per-trajectory RNG.
pub fn seed_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Copy, Debug)]
struct Loc {
    gate: Gate,
    rec: usize,
    /// Idle qubit that is measured and not yet re-prepared.
    dead: bool,
    /// Idle data qubit whose ancillas are being prepared or read out.
    readout: bool,
}

impl Loc {
    fn active(&self, cfg: &NoiseConfig) -> bool {
        (!self.dead || cfg.idle_dead_ancillas) && (!self.readout || cfg.idle_during_readout)
    }
}

/// An experiment with its decoding geometry and per-layer lookup tables.
pub struct Prepared {
    pub exp: Experiment,
    pub geometry: Geometry,
    locs: Vec<Vec<Loc>>,
    gate_recs: Vec<Vec<usize>>,
    directives: Vec<Vec<usize>>,
}

impl Prepared {
    /// `cfg` only fixes the structure of the channels (the SWAP model).
    pub fn new(exp: Experiment, cfg: &NoiseConfig) -> Self {
        let geometry = Geometry::build(&exp, cfg);
        let c = &exp.circuit;
        let n = c.num_qubits();
        let mut alive: Vec<bool> = c.qubits.iter().map(|q| q.block.is_data()).collect();
        let mut by_layer: Vec<Vec<Gate>> = vec![Vec::new(); c.layers.len()];
        for l in c.locations() {
            by_layer[l.layer].push(l.gate);
        }
        let mut locs = Vec::with_capacity(c.layers.len());
        let mut gate_recs = Vec::with_capacity(c.layers.len());
        let mut rec = 0;
        for (l, layer) in c.layers.iter().enumerate() {
            let mut recs = vec![NO_RECORD; n];
            let mut per_gate = Vec::with_capacity(layer.gates.len());
            for g in &layer.gates {
                if let Gate::MeasX(q) = *g {
                    recs[q] = rec;
                    per_gate.push(rec);
                    rec += 1;
                } else {
                    per_gate.push(NO_RECORD);
                }
            }
            locs.push(
                by_layer[l]
                    .iter()
                    .map(|&gate| {
                        let (r, dead) = match gate {
                            Gate::MeasX(q) => (recs[q], false),
                            Gate::Idle(q) => (NO_RECORD, !alive[q]),
                            _ => (NO_RECORD, false),
                        };
                        let readout = matches!(gate, Gate::Idle(q) if layer.readout.contains(&q));
                        Loc {
                            gate,
                            rec: r,
                            dead,
                            readout,
                        }
                    })
                    .collect(),
            );
            for g in &layer.gates {
                match *g {
                    Gate::PrepPlus(q) | Gate::PrepZeroL(q) => alive[q] = true,
                    Gate::MeasX(q) if !c.qubits[q].block.is_data() => alive[q] = false,
                    _ => {}
                }
            }
            gate_recs.push(per_gate);
        }
        let mut directives = vec![Vec::new(); c.layers.len()];
        for (si, s) in exp.schedule.iter().enumerate() {
            directives[s.after_layer].push(si);
        }
        Self {
            exp,
            geometry,
            locs,
            gate_recs,
            directives,
        }
    }

    pub fn build(
        kind: ExperimentKind,
        d: usize,
        cfg: &NoiseConfig,
    ) -> Result<Self, crate::circuits::BuildError> {
        Ok(Self::new(kind.build(d)?, cfg))
    }

    /// Noise locations of `layer` in sampling order.
    pub fn layer_locations(&self, layer: usize) -> impl Iterator<Item = Gate> + '_ {
        self.locs[layer].iter().map(|l| l.gate)
    }

    pub fn num_layers(&self) -> usize {
        self.locs.len()
    }
}

/// Where faults come from.
pub trait NoiseSource {
    /// Error term drawn at location `index` of `layer`, or `None`.
    fn term(&mut self, layer: usize, index: usize, model: &GateErrorModel) -> Option<usize>;
    /// Randomness for measurement collapses.
    fn rng(&mut self) -> &mut dyn RngCore;
}

/// Independent sampling of every channel.
pub struct Sampled<R>(pub R);

impl<R: RngCore> NoiseSource for Sampled<R> {
    fn term(&mut self, _: usize, _: usize, model: &GateErrorModel) -> Option<usize> {
        if model.terms.is_empty() {
            return None;
        }
        model.sample(&mut self.0)
    }

    fn rng(&mut self) -> &mut dyn RngCore {
        &mut self.0
    }
}

/// Deterministic fault insertion keyed by `(layer, location, term)`.
pub struct Injected<R> {
    pub faults: HashMap<(usize, usize), usize>,
    pub rng: R,
}

impl<R: RngCore> NoiseSource for Injected<R> {
    fn term(&mut self, layer: usize, index: usize, _: &GateErrorModel) -> Option<usize> {
        self.faults.get(&(layer, index)).copied()
    }

    fn rng(&mut self) -> &mut dyn RngCore {
        &mut self.rng
    }
}

/// Simulation shortcut that replaced an exact outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Anomaly {
    /// A `CZ` error met a Toffoli target or a reset; counted as a failure of
    /// every checked operator.
    NonClifford,
    /// A block ended with a non-trivial syndrome; counted as its `Z_L` failure.
    NontrivialSyndrome,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trajectory {
    pub failed: BTreeSet<LogicalOp>,
    pub anomaly: Option<Anomaly>,
}

impl Trajectory {
    pub fn is_failure(&self) -> bool {
        !self.failed.is_empty()
    }
}

/// Collapses the `CZ`-connected component of `q` by measuring it in the
/// `X` basis on a stabilizer tableau; the outcomes become the new frame bits.
pub fn collapse(e: &mut ErrorState, q: usize, rng: &mut dyn RngCore) {
    let mut comp = vec![q];
    let mut i = 0;
    while i < comp.len() {
        for x in e.cz_partners(comp[i]) {
            if !comp.contains(&x) {
                comp.push(x);
            }
        }
        i += 1;
    }
    let pos: HashMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut t = StabilizerTableau::new_plus(comp.len());
    for (i, &v) in comp.iter().enumerate() {
        if e.zframe[v] {
            t.pauli_z(i);
        }
    }
    let edges: Vec<(usize, usize)> = e
        .czset
        .iter()
        .filter(|(a, _)| pos.contains_key(a))
        .copied()
        .collect();
    for &(a, b) in &edges {
        t.cz(pos[&a], pos[&b]);
        e.czset.remove(&(a, b));
    }
    for (i, &v) in comp.iter().enumerate() {
        e.zframe[v] = t.measure_x(i, rng).0 < 0;
    }
}

fn syndrome_of(mask: u64, stabilizers: usize) -> impl Iterator<Item = bool> {
    (0..stabilizers).map(move |i| ((mask >> i) ^ (mask >> (i + 1))) & 1 == 1)
}

#[derive(Default)]
struct DecoderState {
    applied: u64,
    /// `(first round seeing the change, delta)`.
    folds: Vec<(usize, u64)>,
    log: CorrectionLog,
    last: Correction,
}

/// One full pass of an experiment.
pub fn run_with_source(
    prep: &Prepared,
    cfg: &NoiseConfig,
    src: &mut dyn NoiseSource,
) -> Trajectory {
    let exp = &prep.exp;
    let c = &exp.circuit;
    let mut e = ErrorState::new(c.num_qubits());
    let mut flips = vec![false; exp.num_records()];
    let mut decs: Vec<DecoderState> = exp
        .decoders
        .iter()
        .map(|_| DecoderState::default())
        .collect();
    let mut xl_flipped: BTreeSet<Block> = BTreeSet::new();
    let mut out = Trajectory::default();
    let nonclifford = |out: &mut Trajectory| {
        out.failed = exp.criterion.iter().copied().collect();
        out.anomaly = Some(Anomaly::NonClifford);
    };
    for (l, layer) in c.layers.iter().enumerate() {
        for (gi, g) in layer.gates.iter().enumerate() {
            if let Gate::MeasX(q) = *g {
                if !e.czset.is_empty() && e.czset.iter().any(|&(a, b)| a == q || b == q) {
                    collapse(&mut e, q, src.rng());
                }
                flips[prep.gate_recs[l][gi]] = e.zframe[q];
            } else if e.apply(g).is_err() {
                nonclifford(&mut out);
                return out;
            }
        }
        if layer.noisy {
            for (li, loc) in prep.locs[l].iter().enumerate() {
                if !loc.active(cfg) {
                    continue;
                }
                let model = cfg.model(loc.gate.kind());
                if let Some(t) = src.term(l, li, model) {
                    match model.terms[t].0 {
                        ErrorOp::Flip => flips[loc.rec] ^= true,
                        op => op.apply_to(&mut e, &loc.gate.operands()),
                    }
                }
            }
        }
        for &si in &prep.directives[l] {
            match &exp.schedule[si].directive {
                Directive::Decode { decoder, rounds } => {
                    let dec = &exp.decoders[*decoder];
                    let st = &mut decs[*decoder];
                    let ns = dec.data.len() - 1;
                    let mut rows = Vec::with_capacity(*rounds);
                    let mut fold = 0u64;
                    for r in 0..*rounds {
                        for &(k, delta) in &st.folds {
                            if k == r {
                                fold ^= delta;
                            }
                        }
                        let row: Vec<bool> = dec.rounds[r]
                            .iter()
                            .zip(syndrome_of(fold, ns))
                            .map(|(&rec, s)| flips[rec] ^ s)
                            .collect();
                        rows.push(row);
                    }
                    let graph = &prep.geometry.graphs[&(*decoder, *rounds)];
                    let h = SyndromeHistory {
                        outcomes: rows,
                        perfect_final: *rounds == dec.rounds.len(),
                    };
                    let corr =
                        decoder::decode(&h, graph).expect("events lie on the decoding graph");
                    let delta = corr.data ^ st.applied;
                    for (j, &q) in dec.data.iter().enumerate() {
                        if delta >> j & 1 == 1 {
                            e.flip_z(q);
                        }
                    }
                    st.applied = corr.data;
                    st.folds.push((*rounds, delta));
                    st.log.entries.push((si, delta));
                    st.last = corr;
                }
                Directive::Steane {
                    records,
                    data,
                    undo_layer,
                } => {
                    let outcomes: Vec<i8> = records
                        .iter()
                        .map(|&r| if flips[r] { -1 } else { 1 })
                        .collect();
                    let corr = majority_decode_steane(&outcomes, data.len())
                        .expect("one record per data qubit");
                    for (j, &q) in data.iter().enumerate() {
                        if corr.data >> j & 1 == 0 {
                            continue;
                        }
                        e.flip_z(q);
                        if let Some(l) = undo_layer {
                            for g in &prep.exp.circuit.layers[*l].gates {
                                if let Gate::CCX(a, b, t) = *g {
                                    if t == q {
                                        e.toggle_cz(a, b);
                                    }
                                }
                            }
                        }
                    }
                }
                Directive::Majority { records, op } => {
                    let outcomes: Vec<i8> = records
                        .iter()
                        .map(|&r| if flips[r] { -1 } else { 1 })
                        .collect();
                    if majority_vote(&outcomes) {
                        if let LogicalOp::XL(b) = op {
                            xl_flipped.insert(*b);
                        }
                    }
                }
                Directive::CzUndo { decoder } => {
                    let st = &decs[*decoder];
                    for (a, b) in cz_posteriori_undo(&st.log, &st.last, &prep.geometry) {
                        e.toggle_cz(a, b);
                    }
                }
            }
        }
    }
    let mut criterion = exp.criterion.clone();
    loop {
        match logical_failure_check(&e, &criterion, c, &xl_flipped) {
            Ok(f) => {
                out.failed.extend(f);
                return out;
            }
            Err(DecodeError::NontrivialSyndrome(b)) => {
                out.failed.insert(LogicalOp::ZL(b));
                out.anomaly = Some(Anomaly::NontrivialSyndrome);
                criterion.retain(|&op| op != LogicalOp::ZL(b));
            }
            Err(other) => unreachable!("{other}"),
        }
    }
}

/// One sampled trajectory.
pub fn run_trajectory<R: RngCore>(prep: &Prepared, cfg: &NoiseConfig, rng: &mut R) -> Trajectory {
    let mut src = Sampled(rng);
    run_with_source(prep, cfg, &mut src)
}

/// `min_failures` reached or `max_trajectories` run, whichever first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StoppingRule {
    pub min_failures: u64,
    pub max_trajectories: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            min_failures: 500,
            max_trajectories: 10_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub distance: usize,
    pub noise: NoiseConfig,
    pub seed: u64,
    pub stopping: StoppingRule,
    pub workers: usize,
    /// Wall-clock cap; the estimate is flagged censored when it bites.
    pub time_budget: Option<Duration>,
    /// Progress lines on standard error.
    pub progress: bool,
}

impl RunConfig {
    pub fn new(experiment: ExperimentKind, distance: usize, noise: NoiseConfig) -> Self {
        Self {
            experiment,
            distance,
            noise,
            seed: 0,
            stopping: StoppingRule::default(),
            workers: 1,
            time_budget: None,
            progress: false,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.stopping.min_failures < 1 {
            return Err("min_failures must be at least 1".into());
        }
        if self.stopping.max_trajectories < 1 {
            return Err("max_trajectories must be at least 1".into());
        }
        if self.workers < 1 {
            return Err("workers must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpCount {
    pub op: String,
    pub failures: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub experiment: String,
    pub d: usize,
    pub p: f64,
    pub n: u64,
    pub n_fail: u64,
    pub per_op: Vec<OpCount>,
    pub p_l: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub censored: bool,
    pub anomalies: u64,
    pub wall_time_s: f64,
    pub seed: u64,
}

impl Estimate {
    /// Normal-approximation relative half-width of the 95% interval.
    pub fn relative_half_width(&self) -> f64 {
        if self.n_fail == 0 {
            f64::INFINITY
        } else {
            1.96 / (self.n_fail as f64).sqrt()
        }
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let ph = k as f64 / n;
    let z2 = z * z;
    let den = 1.0 + z2 / n;
    let centre = (ph + z2 / (2.0 * n)) / den;
    let half = z * (ph * (1.0 - ph) / n + z2 / (4.0 * n * n)).sqrt() / den;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, Default)]
struct Tally {
    n: u64,
    fail: u64,
    per_op: Vec<u64>,
    anomalies: u64,
}

fn run_block(prep: &Prepared, cfg: &NoiseConfig, seed: u64, lo: u64, hi: u64) -> Tally {
    let ops = &prep.exp.criterion;
    let mut t = Tally {
        per_op: vec![0; ops.len()],
        ..Default::default()
    };
    for idx in lo..hi {
        let mut rng = seed_stream(seed, idx);
        let tr = run_trajectory(prep, cfg, &mut rng);
        t.n += 1;
        if tr.is_failure() {
            t.fail += 1;
        }
        for (i, op) in ops.iter().enumerate() {
            if tr.failed.contains(op) {
                t.per_op[i] += 1;
            }
        }
        t.anomalies += tr.anomaly.is_some() as u64;
    }
    t
}

/// Runs a prepared experiment under the stopping rule. Results depend only
/// on the seed, never on the worker count.
pub fn estimate_prepared(
    prep: &Prepared,
    cfg: &NoiseConfig,
    seed: u64,
    stopping: StoppingRule,
    workers: usize,
    time_budget: Option<Duration>,
    progress: bool,
) -> Estimate {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    let wave = (workers.max(1) * 4) as u64;
    let mut total = Tally {
        per_op: vec![0; prep.exp.criterion.len()],
        ..Default::default()
    };
    let mut next_block = 0u64;
    let mut timed_out = false;
    'outer: loop {
        let first = next_block;
        let blocks: Vec<(u64, u64)> = (first..first + wave)
            .map(|b| (b * BLOCK, ((b + 1) * BLOCK).min(stopping.max_trajectories)))
            .filter(|(lo, hi)| lo < hi)
            .collect();
        if blocks.is_empty() {
            break;
        }
        let tallies: Vec<Tally> = pool.install(|| {
            blocks
                .par_iter()
                .map(|&(lo, hi)| run_block(prep, cfg, seed, lo, hi))
                .collect()
        });
        next_block += wave;
        for t in tallies {
            total.n += t.n;
            total.fail += t.fail;
            total.anomalies += t.anomalies;
            for (a, b) in total.per_op.iter_mut().zip(&t.per_op) {
                *a += b;
            }
            if total.fail >= stopping.min_failures || total.n >= stopping.max_trajectories {
                break 'outer;
            }
        }
        if progress {
            eprintln!(
                "{} d={} p={:.4}: {} trajectories, {} failures, {:.1}s",
                prep.exp.kind,
                prep.exp.distance,
                cfg.p,
                total.n,
                total.fail,
                start.elapsed().as_secs_f64()
            );
        }
        if time_budget.map_or(false, |b| start.elapsed() >= b) {
            timed_out = true;
            break;
        }
    }
    let (ci_lo, ci_hi) = wilson_interval(total.fail, total.n, 1.96);
    Estimate {
        experiment: prep.exp.kind.name().to_string(),
        d: prep.exp.distance,
        p: cfg.p,
        n: total.n,
        n_fail: total.fail,
        per_op: prep
            .exp
            .criterion
            .iter()
            .zip(&total.per_op)
            .map(|(op, &f)| OpCount {
                op: op.to_string(),
                failures: f,
            })
            .collect(),
        p_l: if total.n == 0 {
            0.0
        } else {
            total.fail as f64 / total.n as f64
        },
        ci_lo,
        ci_hi,
        censored: timed_out || total.fail < stopping.min_failures,
        anomalies: total.anomalies,
        wall_time_s: start.elapsed().as_secs_f64(),
        seed,
    }
}

pub fn estimate(rc: &RunConfig) -> Result<Estimate, crate::circuits::BuildError> {
    let prep = Prepared::build(rc.experiment, rc.distance, &rc.noise)?;
    Ok(estimate_prepared(
        &prep,
        &rc.noise,
        rc.seed,
        rc.stopping,
        rc.workers,
        rc.time_budget,
        rc.progress,
    ))
}

/// One elementary fault: `(layer, location index, term)`.
pub type FaultId = (usize, usize, usize);

/// Every fault of every noisy location, with its probability under `cfg`.
pub fn fault_list(prep: &Prepared, cfg: &NoiseConfig) -> Vec<(FaultId, f64)> {
    let mut out = Vec::new();
    for (l, locs) in prep.locs.iter().enumerate() {
        if !prep.exp.circuit.layers[l].noisy {
            continue;
        }
        for (i, loc) in locs.iter().enumerate() {
            if !loc.active(cfg) {
                continue;
            }
            for (t, &(_, p)) in cfg.model(loc.gate.kind()).terms.iter().enumerate() {
                out.push(((l, i, t), p));
            }
        }
    }
    out
}

/// Runs with exactly the faults in `set`; a failure under any of the
/// collapse seeds counts.
pub fn inject(
    prep: &Prepared,
    cfg: &NoiseConfig,
    set: &[FaultId],
    collapse_seeds: u64,
) -> Trajectory {
    let faults: HashMap<(usize, usize), usize> = set.iter().map(|&(l, i, t)| ((l, i), t)).collect();
    let mut worst = Trajectory::default();
    for s in 0..collapse_seeds.max(1) {
        let mut src = Injected {
            faults: faults.clone(),
            rng: seed_stream(s, 0),
        };
        let tr = run_with_source(prep, cfg, &mut src);
        if tr.failed.len() > worst.failed.len() || (worst.anomaly.is_none() && tr.anomaly.is_some())
        {
            worst = tr;
        }
    }
    worst
}

/// Failing fault sets of weight exactly 0, 1 or 2.
#[derive(Clone, Debug, Default)]
pub struct Census {
    pub examined: u64,
    pub failing: Vec<(Vec<FaultId>, BTreeSet<LogicalOp>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetExceeded {
    pub needed: u64,
    pub budget: u64,
}

/// Number of fault sets of weight at most `w` over `n` faults, saturating.
pub fn fault_set_count(n: u64, w: usize) -> u64 {
    let mut total = 0u64;
    let mut binom = 1u64;
    for k in 0..=w as u64 {
        if k > 0 {
            binom = binom.saturating_mul(n.saturating_sub(k - 1)) / k;
        }
        total = total.saturating_add(binom);
    }
    total
}

/// Exhaustive insertion of every fault set up to `max_weight` (at most 2).
/// Faults on the same location are mutually exclusive and skipped.
pub fn enumerate_fault_sets(
    prep: &Prepared,
    cfg: &NoiseConfig,
    max_weight: usize,
    budget: u64,
    collapse_seeds: u64,
) -> Result<Census, BudgetExceeded> {
    let faults = fault_list(prep, cfg);
    let needed = fault_set_count(faults.len() as u64, max_weight);
    if needed > budget || max_weight > 2 {
        return Err(BudgetExceeded { needed, budget });
    }
    let ids: Vec<FaultId> = faults.iter().map(|f| f.0).collect();
    let mut sets: Vec<Vec<FaultId>> = vec![vec![]];
    if max_weight >= 1 {
        sets.extend(ids.iter().map(|&f| vec![f]));
    }
    if max_weight >= 2 {
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                if (ids[i].0, ids[i].1) != (ids[j].0, ids[j].1) {
                    sets.push(vec![ids[i], ids[j]]);
                }
            }
        }
    }
    let failing: Vec<(Vec<FaultId>, BTreeSet<LogicalOp>)> = sets
        .par_iter()
        .filter_map(|s| {
            let tr = inject(prep, cfg, s, collapse_seeds);
            tr.is_failure().then(|| (s.clone(), tr.failed))
        })
        .collect();
    Ok(Census {
        examined: sets.len() as u64,
        failing,
    })
}

/// Human-readable description of a fault.
pub fn describe_fault(prep: &Prepared, cfg: &NoiseConfig, f: FaultId) -> String {
    let loc = prep.locs[f.0][f.1];
    let model = cfg.model(loc.gate.kind());
    let q = |i: usize| prep.exp.circuit.qubits[i].to_string();
    let ops: Vec<String> = loc.gate.operands().into_iter().map(q).collect();
    format!(
        "layer {} {:?}({}) {:?}",
        f.0,
        loc.gate.kind(),
        ops.join(","),
        model.terms[f.2].0
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn stream_reproducible() {
        let a: Vec<u64> = (0..8)
            .map(|_| 0)
            .scan(seed_stream(3, 5), |r, _: i32| Some(r.gen()))
            .collect();
        let b: Vec<u64> = (0..8)
            .map(|_| 0)
            .scan(seed_stream(3, 5), |r, _: i32| Some(r.gen()))
            .collect();
        assert_eq!(a, b);
        let c: u64 = seed_stream(3, 6).gen();
        assert_ne!(a[0], c);
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(500, 10_000, 1.96);
        assert!(lo < 0.05 && 0.05 < hi);
        assert_eq!(wilson_interval(0, 100, 1.96).0, 0.0);
    }

    #[test]
    fn stopping_rule_arithmetic() {
        assert!(1.96 / 500f64.sqrt() < 0.09);
    }

    #[test]
    fn zero_noise_censored() {
        let rc = RunConfig {
            stopping: StoppingRule {
                min_failures: 500,
                max_trajectories: 10_000,
            },
            ..RunConfig::new(ExperimentKind::Memory, 3, NoiseConfig::noiseless())
        };
        let est = estimate(&rc).unwrap();
        assert_eq!(est.n, 10_000);
        assert_eq!(est.n_fail, 0);
        assert!(est.censored);
        assert_eq!(est.p_l, 0.0);
    }

    #[test]
    fn fault_set_counts() {
        assert_eq!(fault_set_count(10, 0), 1);
        assert_eq!(fault_set_count(10, 1), 11);
        assert_eq!(fault_set_count(10, 2), 56);
    }

    #[test]
    fn collapse_clears_component() {
        let mut e = ErrorState::new(3);
        e.toggle_cz(0, 1);
        e.toggle_cz(1, 2);
        let mut rng = seed_stream(1, 0);
        collapse(&mut e, 0, &mut rng);
        assert!(e.czset.is_empty());
    }
}
