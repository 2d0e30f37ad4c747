//! Pauli-frame fault propagation, exhaustive single-fault enumeration and
//! Monte-Carlo sampling of circuit-level depolarizing noise.
//!
//! Faults are propagated as unsigned Pauli frames.  Each qubit may carry a
//! *known* single-qubit stabilizer (e.g. `Z` right after a reset); frame
//! components that act as that stabilizer are dropped, which is how errors on
//! freshly prepared ancillas are recognised as harmless.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, MeasKind};
use crate::encoding::{Encoding, PauliClass};
use crate::error::GseError;
use crate::pauli::{Pauli1, PauliOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FaultConfig {
    /// Also inject correlated `QQ` faults after every swap.
    pub swap_faults: bool,
    /// Treat a flipped `B_j` measurement as a detection.
    pub count_b_flips: bool,
}

impl Default for FaultConfig {
    fn default() -> Self {
        FaultConfig { swap_faults: false, count_b_flips: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    Before,
    After,
}

/// A single Pauli fault next to a gate.  `partner` is set for the
/// correlated `QQ` fault of a swap (same Pauli on both qubits).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FaultEvent {
    pub gate: usize,
    pub position: Position,
    pub qubit: usize,
    pub pauli: Pauli1,
    pub partner: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    DetectedByMeasurement,
    DetectableLater,
    Benign,
    EvolvedOperatorException,
    UndetectableLogical,
}

#[derive(Clone, Debug, Serialize)]
pub struct FaultOutcome {
    pub event: FaultEvent,
    pub verdict: Verdict,
    /// Gate indices of the flipped measurements.
    pub flipped: Vec<usize>,
    /// Residual on the data register, as a label.
    pub residual: String,
    pub residual_class: PauliClass,
    /// Residual weight left on ancilla and flag qubits.
    pub ancilla_weight: usize,
    /// The fault anticommuted with an odd number of evolutions.
    pub time_reversal: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FaultSummary {
    pub total: usize,
    pub detected_by_measurement: usize,
    pub detectable_later: usize,
    pub benign: usize,
    pub evolved_operator_exception: usize,
    pub undetectable_logical: usize,
}

impl FaultSummary {
    fn add(&mut self, v: Verdict) {
        self.total += 1;
        match v {
            Verdict::DetectedByMeasurement => self.detected_by_measurement += 1,
            Verdict::DetectableLater => self.detectable_later += 1,
            Verdict::Benign => self.benign += 1,
            Verdict::EvolvedOperatorException => self.evolved_operator_exception += 1,
            Verdict::UndetectableLogical => self.undetectable_logical += 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FaultReport {
    pub outcomes: Vec<FaultOutcome>,
    pub summary: FaultSummary,
}

impl FaultReport {
    /// One JSON object per fault.
    pub fn to_json_lines(&self) -> String {
        self.outcomes
            .iter()
            .map(|o| serde_json::to_string(o).expect("outcome serializes"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

// ---------------------------------------------------------------------------
// Frame rules
// ---------------------------------------------------------------------------

/// Removes the component of `p` that acts as the known stabilizer `s`.
fn reduce(p: Pauli1, s: Option<Pauli1>) -> Pauli1 {
    let (x, z) = p.bits();
    match s {
        None | Some(Pauli1::I) => p,
        Some(Pauli1::Z) => Pauli1::from_bits(x, false),
        Some(Pauli1::X) => Pauli1::from_bits(false, z),
        Some(Pauli1::Y) => Pauli1::from_bits(x ^ z, false),
    }
}

fn hadamard(p: Pauli1) -> Pauli1 {
    let (x, z) = p.bits();
    Pauli1::from_bits(z, x)
}

/// What one gate does to a frame: returns `(measurement flipped, time reversal)`.
fn step(g: &Gate, frame: &mut [Pauli1]) -> (bool, bool) {
    match *g {
        Gate::PrepZero(q) | Gate::PrepEigen { q, .. } => {
            frame[q] = Pauli1::I;
            (false, false)
        }
        Gate::CP { cp, a, tp, b } => {
            let (ea, eb) = (frame[a], frame[b]);
            if !ea.commutes(cp) {
                frame[b] = frame[b].times(tp);
            }
            if !eb.commutes(tp) {
                frame[a] = frame[a].times(cp);
            }
            (false, false)
        }
        Gate::H(q) => {
            frame[q] = hadamard(frame[q]);
            (false, false)
        }
        Gate::Swap(a, b) => {
            frame.swap(a, b);
            (false, false)
        }
        Gate::Evolve1 { p, q, .. } => (false, !frame[q].commutes(p)),
        Gate::Evolve2 { p, a, pp, b, .. } => (false, frame[a].commutes(p) != frame[b].commutes(pp)),
        Gate::MeasureZ { q, .. } => {
            let flipped = frame[q].bits().0;
            frame[q] = Pauli1::I;
            (flipped, false)
        }
    }
}

/// Known single-qubit stabilizers before the circuit: ancillas and flags
/// start in `|0⟩`, data qubits carry the encoded state.
fn initial_tracking(c: &Circuit) -> Vec<Option<Pauli1>> {
    (0..c.n_qubits).map(|q| if q < c.n_data { None } else { Some(Pauli1::Z) }).collect()
}

fn track(g: &Gate, known: &mut [Option<Pauli1>]) {
    let keep = |s: Option<Pauli1>, p: Pauli1| s.filter(|s| s.commutes(p));
    match *g {
        Gate::PrepZero(q) | Gate::MeasureZ { q, .. } => known[q] = Some(Pauli1::Z),
        Gate::PrepEigen { q, pauli, .. } => known[q] = Some(pauli),
        Gate::H(q) => known[q] = known[q].map(hadamard),
        Gate::Swap(a, b) => known.swap(a, b),
        Gate::CP { cp, a, tp, b } => {
            known[a] = keep(known[a], cp);
            known[b] = keep(known[b], tp);
        }
        Gate::Evolve1 { p, q, .. } => known[q] = keep(known[q], p),
        Gate::Evolve2 { p, a, pp, b, .. } => {
            known[a] = keep(known[a], p);
            known[b] = keep(known[b], pp);
        }
    }
}

/// Runs `frame` through `gates[start..]`; returns the flipped measurement
/// gate indices and the accumulated time-reversal parity.
pub fn propagate(c: &Circuit, start: usize, frame: &mut [Pauli1]) -> (Vec<usize>, bool) {
    let mut flips = Vec::new();
    let mut tr = false;
    for (i, g) in c.gates.iter().enumerate().skip(start) {
        let (f, t) = step(g, frame);
        if f {
            flips.push(i);
        }
        tr ^= t;
    }
    (flips, tr)
}

/// Conjugates a whole-register operator through one gate (phase dropped).
pub fn conjugate_through(g: &Gate, op: &PauliOp) -> PauliOp {
    let mut frame: Vec<Pauli1> = (0..op.n_qubits()).map(|q| op.get(q)).collect();
    step(g, &mut frame);
    frame_to_op(&frame)
}

fn frame_to_op(frame: &[Pauli1]) -> PauliOp {
    let factors: Vec<_> = frame.iter().copied().enumerate().filter(|(_, p)| !p.is_identity()).collect();
    PauliOp::from_sparse(frame.len(), &factors)
}

// ---------------------------------------------------------------------------
// Exhaustive single faults
// ---------------------------------------------------------------------------

fn fault_events(c: &Circuit, cfg: &FaultConfig) -> Vec<(FaultEvent, Vec<Option<Pauli1>>)> {
    let mut known = initial_tracking(c);
    let mut out = Vec::new();
    for (i, g) in c.gates.iter().enumerate() {
        let is_swap = matches!(g, Gate::Swap(..));
        for &q in &g.qubits() {
            for p in Pauli1::NON_IDENTITY {
                let ev = FaultEvent { gate: i, position: Position::Before, qubit: q, pauli: p, partner: None };
                out.push((ev, known.clone()));
            }
        }
        track(g, &mut known);
        for &q in &g.qubits() {
            for p in Pauli1::NON_IDENTITY {
                let ev = FaultEvent { gate: i, position: Position::After, qubit: q, pauli: p, partner: None };
                out.push((ev, known.clone()));
            }
        }
        if cfg.swap_faults && is_swap {
            let qs = g.qubits();
            for p in Pauli1::NON_IDENTITY {
                let ev = FaultEvent { gate: i, position: Position::After, qubit: qs[0], pauli: p, partner: Some(qs[1]) };
                out.push((ev, known.clone()));
            }
        }
    }
    out
}

/// Propagates one fault to the end of the circuit and classifies it.
pub fn evaluate_fault(c: &Circuit, enc: &Encoding, cfg: &FaultConfig, ev: FaultEvent, known: &[Option<Pauli1>]) -> FaultOutcome {
    let mut frame = vec![Pauli1::I; c.n_qubits];
    frame[ev.qubit] = reduce(ev.pauli, known[ev.qubit]);
    if let Some(b) = ev.partner {
        frame[b] = reduce(ev.pauli, known[b]);
    }
    let start = match ev.position {
        Position::Before => ev.gate,
        Position::After => ev.gate + 1,
    };
    let (flipped, tr) = propagate(c, start, &mut frame);
    let data = frame_to_op(&frame[..c.n_data]);
    let ancilla_weight = frame[c.n_data..].iter().filter(|p| !p.is_identity()).count();
    let class = enc.classify(&data);
    let kinds: Vec<MeasKind> = flipped
        .iter()
        .map(|&i| match c.gates[i] {
            Gate::MeasureZ { kind, .. } => kind,
            _ => unreachable!(),
        })
        .collect();
    let detected = kinds.iter().any(|k| match k {
        MeasKind::Syndrome(_) | MeasKind::Flag => true,
        MeasKind::BMeasure(_) => cfg.count_b_flips,
    });
    let silent_b_flip = kinds.iter().any(|k| matches!(k, MeasKind::BMeasure(_)));
    let verdict = if detected {
        Verdict::DetectedByMeasurement
    } else if silent_b_flip {
        Verdict::UndetectableLogical
    } else {
        match class {
            PauliClass::Detectable => Verdict::DetectableLater,
            PauliClass::Trivial | PauliClass::Stabilizer => {
                if tr {
                    Verdict::UndetectableLogical
                } else {
                    Verdict::Benign
                }
            }
            PauliClass::Logical => match &c.evolved {
                Some(evolved) if data.eq_up_to_phase(evolved) => Verdict::EvolvedOperatorException,
                _ => Verdict::UndetectableLogical,
            },
        }
    };
    FaultOutcome {
        event: ev,
        verdict,
        flipped,
        residual: data.letters(),
        residual_class: class,
        ancilla_weight,
        time_reversal: tr,
    }
}

/// Every single Pauli fault before and after every gate on every qubit it
/// touches (plus `QQ` faults after swaps when configured).
pub fn enumerate_single_faults(c: &Circuit, enc: &Encoding, cfg: &FaultConfig) -> FaultReport {
    let mut summary = FaultSummary::default();
    let outcomes: Vec<FaultOutcome> = fault_events(c, cfg)
        .into_iter()
        .map(|(ev, known)| evaluate_fault(c, enc, cfg, ev, &known))
        .collect();
    for o in &outcomes {
        summary.add(o.verdict);
    }
    FaultReport { outcomes, summary }
}

/// Whether an evolved-operator exception happens at the central evolution:
/// on the central gate itself, or on the same qubit directly before it or
/// directly after it.
pub fn is_at_central_evolution(c: &Circuit, ev: &FaultEvent) -> bool {
    let Some(center) = c.central else { return false };
    if ev.gate == center {
        return true;
    }
    let center_qubits = c.gates[center].qubits();
    if !center_qubits.contains(&ev.qubit) {
        return false;
    }
    let touches = |i: usize| c.gates[i].qubits().contains(&ev.qubit);
    match ev.position {
        Position::After if ev.gate < center => !(ev.gate + 1..center).any(touches),
        Position::Before if ev.gate > center => !(center + 1..ev.gate).any(touches),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Heisenberg pull-back
// ---------------------------------------------------------------------------

/// The data operator whose eigenvalue the measurement at `gate` reports,
/// found by pulling `Z` on the measured qubit back to the circuit start.
/// Signs are not tracked.
pub fn measured_operator(c: &Circuit, gate: usize) -> Result<PauliOp, GseError> {
    let Gate::MeasureZ { q, .. } = c.gates[gate] else {
        return Err(GseError::InvalidArgument(format!("gate {gate} is not a measurement")));
    };
    let mut frame = vec![Pauli1::I; c.n_qubits];
    frame[q] = Pauli1::Z;
    let random = |what: &str| Err(GseError::Unsupported(format!("measurement at {gate} is random: {what}")));
    for i in (0..gate).rev() {
        match c.gates[i] {
            Gate::PrepZero(r) | Gate::MeasureZ { q: r, .. } => {
                if frame[r].bits().0 {
                    return random("anticommutes with a reset");
                }
                frame[r] = Pauli1::I;
            }
            Gate::PrepEigen { q: r, pauli, .. } => {
                if !frame[r].commutes(pauli) {
                    return random("anticommutes with a prepared eigenstate");
                }
                frame[r] = Pauli1::I;
            }
            Gate::Evolve1 { .. } | Gate::Evolve2 { .. } => {
                let (_, tr) = step(&c.gates[i], &mut frame.clone());
                if tr {
                    return random("does not commute with an evolution");
                }
            }
            ref g => {
                step(g, &mut frame);
            }
        }
    }
    if frame[c.n_data..].iter().any(|p| p.bits().0) {
        return random("anticommutes with an initial ancilla state");
    }
    Ok(frame_to_op(&frame[..c.n_data]))
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

/// Depolarizing noise after every two-qubit gate: each of its two qubits
/// independently suffers a uniformly random `X`, `Y` or `Z` with
/// probability `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloConfig {
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub count_b_flips: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// 95% normal-approximation binomial half-width.
    pub half_width: f64,
}

impl Estimate {
    fn from_counts(k: u64, n: u64) -> Self {
        if n == 0 {
            return Estimate { value: f64::NAN, half_width: f64::NAN };
        }
        let p = k as f64 / n as f64;
        Estimate { value: p, half_width: 1.96 * (p * (1.0 - p) / n as f64).sqrt() }
    }

    pub fn contains(&self, x: f64, widen: f64) -> bool {
        (self.value - x).abs() <= widen * self.half_width.max(1e-12)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectionStats {
    pub trials: u64,
    pub noise_slots: usize,
    pub fault_free: u64,
    pub detected: u64,
    pub accepted_correct: u64,
    pub accepted_wrong: u64,
    /// No fault at all.
    pub p_fault_free: Estimate,
    pub p_detected: Estimate,
    /// Not flagged and the final state is correct.
    pub p_accepted_correct: Estimate,
    /// Not flagged but the final state is wrong.
    pub p_accepted_wrong: Estimate,
    /// Detected among all trials with at least one fault.
    pub p_detected_given_faulty: Estimate,
    /// Detected among trials whose faults had any effect (detected or
    /// wrong); faults that act trivially on the state are excluded.
    pub p_detected_given_effective: Estimate,
}

#[derive(Clone)]
struct SlotEffect {
    data: Vec<u64>,
    det: Vec<u64>,
    tr: bool,
}

fn xor_into(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

/// Detector bookkeeping: which measurement feeds which detector bit, and
/// which detector bits count as detections versus silent failures.
struct Detectors {
    of_measurement: Vec<Option<usize>>,
    detecting: Vec<u64>,
    failing: Vec<u64>,
    words: usize,
}

impl Detectors {
    fn new(c: &Circuit, n_loops: usize, count_b: bool) -> Self {
        // Loop p: the two rounds of the same loop share a detector (their
        // parity is what is compared).  Every flag and B_j gets its own.
        let meas = c.measurements();
        let mut of_measurement = vec![None; c.gates.len()];
        let mut next = n_loops;
        let mut roles = vec![true; n_loops];
        for &(i, kind) in &meas {
            let bit = match kind {
                MeasKind::Syndrome(p) => p,
                MeasKind::Flag => {
                    roles.push(true);
                    next += 1;
                    next - 1
                }
                MeasKind::BMeasure(_) => {
                    roles.push(count_b);
                    next += 1;
                    next - 1
                }
            };
            of_measurement[i] = Some(bit);
        }
        let words = next.div_ceil(64).max(1);
        let mut detecting = vec![0u64; words];
        let mut failing = vec![0u64; words];
        for (bit, &det) in roles.iter().enumerate() {
            let target = if det { &mut detecting } else { &mut failing };
            target[bit / 64] |= 1 << (bit % 64);
        }
        Detectors { of_measurement, detecting, failing, words }
    }
}

fn slot_effect(c: &Circuit, dets: &Detectors, gate: usize, q: usize, p: Pauli1, known: Option<Pauli1>) -> SlotEffect {
    let mut frame = vec![Pauli1::I; c.n_qubits];
    frame[q] = reduce(p, known);
    let (flips, tr) = propagate(c, gate + 1, &mut frame);
    let mut det = vec![0u64; dets.words];
    for i in flips {
        if let Some(bit) = dets.of_measurement[i] {
            det[bit / 64] ^= 1 << (bit % 64);
        }
    }
    SlotEffect { data: frame_to_op(&frame[..c.n_data]).symplectic_row(), det, tr }
}

/// Samples the circuit under depolarizing noise.  The circuit is expected to
/// measure every loop operator twice (before and after the computation) so
/// that comparing the two rounds detects errors; the run is correct when no
/// detector fires, no `B_j` outcome is silently wrong, the data residual is a
/// stabilizer and no evolution was time-reversed.
pub fn monte_carlo(c: &Circuit, enc: &Encoding, cfg: &MonteCarloConfig) -> Result<DetectionStats, GseError> {
    if !(0.0..=1.0).contains(&cfg.p) {
        return Err(GseError::InvalidArgument(format!("error rate {} outside [0, 1]", cfg.p)));
    }
    let dets = Detectors::new(c, enc.stabilizers.len(), cfg.count_b_flips);
    // Noise slots: after every two-qubit gate, on each of its qubits.
    let mut known = initial_tracking(c);
    let mut slots: Vec<(usize, usize, Option<Pauli1>)> = Vec::new();
    for (i, g) in c.gates.iter().enumerate() {
        track(g, &mut known);
        if g.is_two_qubit() {
            for q in g.qubits() {
                slots.push((i, q, known[q]));
            }
        }
    }
    // X and Z effects per slot; Y is their XOR since propagation is linear.
    let effects: Vec<[SlotEffect; 2]> = slots
        .par_iter()
        .map(|&(i, q, k)| [slot_effect(c, &dets, i, q, Pauli1::X, k), slot_effect(c, &dets, i, q, Pauli1::Z, k)])
        .collect();
    let row_len = 2 * c.n_data.div_ceil(64);
    let n_slots = slots.len();
    let p = cfg.p;

    #[derive(Default, Clone, Copy)]
    struct Tally {
        fault_free: u64,
        detected: u64,
        correct: u64,
        wrong: u64,
    }
    let tally = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(trial);
            let mut data = vec![0u64; row_len];
            let mut det = vec![0u64; dets.words];
            let mut tr = false;
            let mut any = false;
            let mut slot = 0usize;
            if p > 0.0 {
                let log_q = (1.0 - p).ln();
                loop {
                    // Geometric skip to the next faulty slot.
                    let skip = if p >= 1.0 {
                        0
                    } else {
                        let u: f64 = rng.gen::<f64>();
                        ((1.0 - u).ln() / log_q).floor() as usize
                    };
                    slot = slot.saturating_add(skip);
                    if slot >= n_slots {
                        break;
                    }
                    any = true;
                    let which = rng.gen_range(0..3u8);
                    let [ex, ez] = &effects[slot];
                    if which != 2 {
                        xor_into(&mut data, &ex.data);
                        xor_into(&mut det, &ex.det);
                        tr ^= ex.tr;
                    }
                    if which != 0 {
                        xor_into(&mut data, &ez.data);
                        xor_into(&mut det, &ez.det);
                        tr ^= ez.tr;
                    }
                    slot += 1;
                }
            }
            let mut t = Tally::default();
            if !any {
                t.fault_free = 1;
            }
            let hit = |mask: &[u64]| det.iter().zip(mask).any(|(a, b)| a & b != 0);
            if hit(&dets.detecting) {
                t.detected = 1;
            } else if hit(&dets.failing) || tr || !enc.row_in_stabilizer_group(&data) {
                t.wrong = 1;
            } else {
                t.correct = 1;
            }
            t
        })
        .reduce(Tally::default, |a, b| Tally {
            fault_free: a.fault_free + b.fault_free,
            detected: a.detected + b.detected,
            correct: a.correct + b.correct,
            wrong: a.wrong + b.wrong,
        });
    let n = cfg.trials;
    Ok(DetectionStats {
        trials: n,
        noise_slots: n_slots,
        fault_free: tally.fault_free,
        detected: tally.detected,
        accepted_correct: tally.correct,
        accepted_wrong: tally.wrong,
        p_fault_free: Estimate::from_counts(tally.fault_free, n),
        p_detected: Estimate::from_counts(tally.detected, n),
        p_accepted_correct: Estimate::from_counts(tally.correct, n),
        p_accepted_wrong: Estimate::from_counts(tally.wrong, n),
        p_detected_given_faulty: Estimate::from_counts(tally.detected, n - tally.fault_free),
        p_detected_given_effective: Estimate::from_counts(tally.detected, tally.detected + tally.wrong),
    })
}
