//! Resource counts and detection-threshold estimates.
//!
//! Gate counts are two-qubit gate counts.  `c` is the number of gates of the
//! computation (a whole VQE run) and `d` the number of gates added for error
//! detection; each gate fails on each of its two qubits independently with
//! probability `1 − s`.

use serde::Serialize;

use crate::circuit::{Connectivity, SwapAccounting};
use crate::error::GseError;
use crate::gadgets::{all_bj_measurements, hva_schedule, hva_term_count, zero_state_circuit};
use crate::lattice::{InteractionGraph, Topology};
use crate::Encoding;

/// `s^e` computed as `exp(e · ln s)`.
fn pow(s: f64, e: f64) -> f64 {
    if s == 1.0 {
        1.0
    } else {
        (e * s.ln()).exp()
    }
}

/// Probability that a computation of `c` gates runs without any error.
pub fn p_g(c: f64, s: f64) -> f64 {
    pow(s, 2.0 * c)
}

/// Probability of an error during detection after an error-free computation.
pub fn p_e(c: f64, d: f64, s: f64) -> f64 {
    pow(s, 2.0 * c) * (1.0 - pow(s, 2.0 * d))
}

/// Probability of exactly one error during the computation followed by an
/// error-free detection stage.
pub fn p_d(c: f64, d: f64, s: f64) -> f64 {
    2.0 * c * (1.0 - s) * pow(s, 2.0 * c + 2.0 * d - 1.0)
}

/// Fraction of runs that are correct among those with no detected error.
pub fn p_g_ed(c: f64, d: f64, s: f64) -> Result<f64, GseError> {
    let pd = p_d(c, d, s);
    if pd >= 1.0 {
        return Err(GseError::InvalidArgument(format!("p_d = {pd} leaves nothing to post-select")));
    }
    Ok((p_g(c, s) - p_e(c, d, s)) / (1.0 - pd))
}

/// `−2c s^{2c+2d} + 2c s^{2c+2d−1} + s^{2d} − 1`: positive when single-error
/// detection pays for its own gates.
pub fn improvement_margin(c: f64, d: f64, s: f64) -> f64 {
    -2.0 * c * pow(s, 2.0 * c + 2.0 * d) + 2.0 * c * pow(s, 2.0 * c + 2.0 * d - 1.0) + pow(s, 2.0 * d) - 1.0
}

/// The inequality as stated in the lemma, `−2c s^{2c+2d} + s^{2c+2d+1} + s^{2d} − 1`.
/// It does not follow from the derivation and is kept for comparison only.
pub fn stated_improvement_margin(c: f64, d: f64, s: f64) -> f64 {
    -2.0 * c * pow(s, 2.0 * c + 2.0 * d) + pow(s, 2.0 * c + 2.0 * d + 1.0) + pow(s, 2.0 * d) - 1.0
}

/// The smallest `s` in `[lo, 1)` above which `f` is positive: scans `1 − s`
/// on a logarithmic grid, then bisects the first sign change.
fn threshold(f: impl Fn(f64) -> f64, lo: f64) -> Option<f64> {
    let mut prev = lo;
    if f(prev) > 0.0 {
        return Some(prev);
    }
    let (k_lo, k_hi) = (-(1.0 - lo).log10(), 14.0);
    let steps = 4000;
    for i in 1..=steps {
        let k = k_lo + (k_hi - k_lo) * i as f64 / steps as f64;
        let s = 1.0 - 10f64.powf(-k);
        if f(s) > 0.0 {
            return Some(bisect(&f, prev, s));
        }
        prev = s;
    }
    None
}

/// Root of `f` in `[a, b]` with `f(a) ≤ 0 < f(b)`.
fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    while b - a > 1e-13 {
        let mid = 0.5 * (a + b);
        if f(mid) > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Threshold {
    pub s: f64,
    /// Threshold of the inequality as stated in the lemma, if it has one.
    pub stated: Option<f64>,
}

/// Per-qubit-gate success rate above which detecting single errors improves
/// the accepted-run accuracy.
pub fn improvement_threshold_s(c: f64, d: f64) -> Result<Threshold, GseError> {
    if c <= 0.0 || d <= 0.0 {
        return Err(GseError::InvalidArgument("gate counts must be positive".into()));
    }
    let s = threshold(|s| improvement_margin(c, d, s), 0.5)
        .ok_or_else(|| GseError::NoRoot(format!("improvement threshold for c={c}, d={d}")))?;
    Ok(Threshold { s, stated: threshold(|s| stated_improvement_margin(c, d, s), 0.5) })
}

/// `1 − 1/(3m²)`: chance that two uniformly drawn single-qubit errors on an
/// `m × m` lattice combine into something detectable.
pub fn p_a_estimate(m: usize) -> f64 {
    1.0 - 1.0 / (3.0 * (m * m) as f64)
}

/// `p_a_estimate` as a reduced fraction `(numerator, denominator)`.
pub fn p_a_fraction(m: usize) -> (u64, u64) {
    let den = 3 * (m * m) as u64;
    (den - 1, den)
}

/// Threshold when any error is detected with probability `p_a`:
/// `−p_a s^{2c} + s^{2d} + p_a − 1 > 0`.
pub fn arbitrary_error_threshold_s(c: f64, d: f64, p_a: f64) -> Result<f64, GseError> {
    threshold(|s| -p_a * pow(s, 2.0 * c) + pow(s, 2.0 * d) + p_a - 1.0, 0.5)
        .ok_or_else(|| GseError::NoRoot(format!("arbitrary-error threshold for c={c}, d={d}, p_a={p_a}")))
}

/// Smallest `s` for which accepted runs are correct with probability above
/// `target`, i.e. `s^{2(c+d)} / (s^{2(c+d)} + (1 − s^{2c})(1 − p_a)) > target`,
/// equivalently `s^{2(c+d)}(1−t) + s^{2c} t (1−p_a) − t (1−p_a) > 0`.
pub fn required_s_for_target(c: f64, d: f64, p_a: f64, target: f64) -> Result<f64, GseError> {
    if !(0.0..1.0).contains(&target) || target == 0.0 {
        return Err(GseError::InvalidArgument(format!("target {target} outside (0, 1)")));
    }
    let q = 1.0 - p_a;
    threshold(
        |s| pow(s, 2.0 * (c + d)) * (1.0 - target) + pow(s, 2.0 * c) * target * q - target * q,
        0.5,
    )
    .ok_or_else(|| GseError::NoRoot(format!("required s for target {target}")))
}

/// The polynomial form as printed, `s^{2(c+d)}(1−t) + s^{2c} t (1−p_a) − t`,
/// which loses the `(1 − p_a)` factor on the constant term; it is negative on
/// all of `(0, 1)` for realistic inputs.
pub fn required_s_stated_form(c: f64, d: f64, p_a: f64, target: f64) -> Result<f64, GseError> {
    threshold(
        |s| pow(s, 2.0 * (c + d)) * (1.0 - target) + pow(s, 2.0 * c) * target * (1.0 - p_a) - target,
        0.5,
    )
    .ok_or_else(|| GseError::NoRoot("the printed form has no root below s = 1".into()))
}

/// Gate budget for a second detection round: `⌊ln(1 − p_a) / (2 ln s)⌋`.
pub fn second_round_budget(p_a: f64, s: f64) -> Result<u64, GseError> {
    if !(0.0 < s && s < 1.0) || !(0.0..1.0).contains(&p_a) {
        return Err(GseError::InvalidArgument(format!("need 0 < s < 1 and 0 ≤ p_a < 1, got s={s}, p_a={p_a}")));
    }
    Ok(((1.0 - p_a).ln() / (2.0 * s.ln())).floor() as u64)
}

/// Rounds to six decimals, as the tables print.
pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

/// The lattice sizes the tables are computed for.
pub const TABLE_SIZES: [usize; 3] = [4, 8, 16];

/// Two-qubit gate counts and depths of the VQE circuits on an `m × n`
/// planar lattice (reduced connectivity, native two-qubit evolutions).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostRow {
    pub m: usize,
    pub n: usize,
    /// `10 · #loops`: ten gates per loop measurement.
    pub zero_state_gates: usize,
    pub zero_state_depth: usize,
    /// Gates of the constructed simultaneous loop-measurement round.
    pub zero_state_gates_constructed: usize,
    /// `13 (mn + 3E)`, the tabulated ansatz count.
    pub ansatz_gates: usize,
    /// `mn + 13 · 3E`, the count derived in the text.
    pub ansatz_gates_text: usize,
    /// `79mn − 39(m + n − 1)`, the simplification printed in the text.
    pub ansatz_gates_text_simplified: usize,
    pub ansatz_gates_constructed: usize,
    /// `1 + 11 · 6`: every edge layer charged the worst gadget depth.
    pub ansatz_depth: usize,
    /// Sum over layers of the deepest constructed gadget.
    pub ansatz_depth_constructed: usize,
    pub vqe_gates: usize,
    pub vqe_depth: usize,
    pub error_detected_gates: usize,
    pub error_detected_depth: usize,
    /// Two-qubit depth of the loop-measurement round (without the reset and
    /// measurement layers).
    pub zero_state_two_qubit_depth: usize,
    /// Two-qubit depth of the `B_j` measurement stage.
    pub b_measurement_depth: usize,
}

pub fn cost_table(m: usize, n: usize) -> Result<CostRow, GseError> {
    let graph = InteractionGraph::build(Topology::PlanarDoubled, m, n)?;
    let edges = graph.straight_edges().count();
    let loops = graph.plaquettes.len();
    let enc = Encoding::build(graph);
    let conn = Connectivity::Reduced;
    let zero = zero_state_circuit(&enc, conn)?;
    let zero_res = zero.count_resources(SwapAccounting::Unit);
    let hva = hva_schedule(&enc, &vec![0.0; hva_term_count(&enc)], true, conn)?;
    let b = all_bj_measurements(&enc, conn).count_resources(SwapAccounting::Unit);

    let mn = m * n;
    let zero_state_gates = 10 * loops;
    debug_assert_eq!(zero_state_gates, 10 * ((m - 1) * (n - 1) + m + n));
    let ansatz_gates = 13 * (mn + 3 * edges);
    let ansatz_depth = 1 + 11 * 6;
    let vqe_gates = zero_state_gates + 2 * ansatz_gates;
    let vqe_depth = zero_res.depth + 2 * ansatz_depth;
    Ok(CostRow {
        m,
        n,
        zero_state_gates,
        zero_state_depth: zero_res.depth,
        zero_state_gates_constructed: zero_res.two_qubit_gates,
        ansatz_gates,
        ansatz_gates_text: mn + 39 * edges,
        ansatz_gates_text_simplified: 79 * mn - 39 * (m + n - 1),
        ansatz_gates_constructed: hva.circuit.two_qubit_gate_count(),
        ansatz_depth,
        ansatz_depth_constructed: hva.layered_depth(),
        vqe_gates,
        vqe_depth,
        error_detected_gates: vqe_gates + zero_state_gates + 4 * mn,
        error_detected_depth: vqe_depth + zero_res.depth + b.two_qubit_depth,
        zero_state_two_qubit_depth: zero_res.two_qubit_depth,
        b_measurement_depth: b.two_qubit_depth,
    })
}

/// `(c, d)` of a cost row: VQE gates and the gates error detection adds.
pub fn gate_counts(row: &CostRow) -> (f64, f64) {
    (row.vqe_gates as f64, (row.error_detected_gates - row.vqe_gates) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub m: usize,
    pub n: usize,
    pub threshold_s: f64,
    /// `p_g` at the (printed, six-digit) threshold.
    pub threshold_p_g: f64,
    pub stated_threshold_s: Option<f64>,
    pub s: f64,
    pub p_g: f64,
    pub p_d: f64,
    pub p_g_ed: f64,
}

pub fn threshold_row(row: &CostRow, s: f64) -> Result<ThresholdRow, GseError> {
    let (c, d) = gate_counts(row);
    let th = improvement_threshold_s(c, d)?;
    Ok(ThresholdRow {
        m: row.m,
        n: row.n,
        threshold_s: th.s,
        threshold_p_g: p_g(c, round6(th.s)),
        stated_threshold_s: th.stated,
        s,
        p_g: p_g(c, s),
        p_d: p_d(c, d, s),
        p_g_ed: p_g_ed(c, d, s)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimisticRow {
    pub m: usize,
    pub n: usize,
    pub p_a: (u64, u64),
    pub threshold_s: f64,
    /// As tabulated: `p_g` at the single-error improvement threshold.
    pub threshold_p_g: f64,
    /// `p_g` actually reached at the arbitrary-error threshold.
    pub threshold_p_g_at_s: f64,
    pub target: f64,
    pub required_s: f64,
    /// `s^{2(c+d)}` at the (printed) required `s`.
    pub required_p_g: f64,
}

pub fn optimistic_row(row: &CostRow, target: f64) -> Result<OptimisticRow, GseError> {
    let (c, d) = gate_counts(row);
    let p_a = p_a_estimate(row.m);
    let th = arbitrary_error_threshold_s(c, d, p_a)?;
    let req = required_s_for_target(c, d, p_a, target)?;
    Ok(OptimisticRow {
        m: row.m,
        n: row.n,
        p_a: p_a_fraction(row.m),
        threshold_s: th,
        threshold_p_g: p_g(c, round6(improvement_threshold_s(c, d)?.s)),
        threshold_p_g_at_s: p_g(c, th),
        target,
        required_s: req,
        required_p_g: p_g(c + d, round6(req)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BudgetRow {
    pub m: usize,
    pub n: usize,
    pub p_a: (u64, u64),
    pub d: usize,
    pub s: f64,
    pub d_b: u64,
}

pub const BUDGET_S: [f64; 4] = [0.99, 0.999, 0.9999, 0.99999];

pub fn budget_rows(row: &CostRow) -> Result<Vec<BudgetRow>, GseError> {
    BUDGET_S
        .iter()
        .map(|&s| {
            Ok(BudgetRow {
                m: row.m,
                n: row.n,
                p_a: p_a_fraction(row.m),
                d: row.error_detected_gates - row.vqe_gates,
                s,
                d_b: second_round_budget(p_a_estimate(row.m), s)?,
            })
        })
        .collect()
}

/// A rendered table: header plus string cells.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("| {} |\n|{}\n", self.header.join(" | "), "---|".repeat(self.header.len()));
        for r in &self.rows {
            out.push_str(&format!("| {} |\n", r.join(" | ")));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| serde_json::Value::Object(self.header.iter().cloned().zip(r.iter().map(|c| c.clone().into())).collect()))
            .collect();
        serde_json::json!({ "title": self.title, "rows": rows })
    }
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn frac((a, b): (u64, u64)) -> String {
    format!("{a}/{b}")
}

fn strings<const N: usize>(h: [&str; N]) -> Vec<String> {
    h.iter().map(|s| s.to_string()).collect()
}

pub fn cost_rows() -> Result<Vec<CostRow>, GseError> {
    TABLE_SIZES.iter().map(|&m| cost_table(m, m)).collect()
}

pub fn cost_table_view(rows: &[CostRow]) -> Table {
    Table {
        title: "Two-qubit gate and depth costs".into(),
        header: strings([
            "m", "n", "zero_state_gates", "zero_state_depth", "ansatz_gates", "ansatz_depth", "vqe_gates", "vqe_depth",
            "error_detected_gates", "error_detected_depth", "zero_state_gates_constructed", "ansatz_gates_constructed",
            "ansatz_gates_text", "ansatz_gates_text_simplified", "ansatz_depth_constructed",
        ]),
        rows: rows
            .iter()
            .map(|r| {
                [
                    r.m, r.n, r.zero_state_gates, r.zero_state_depth, r.ansatz_gates, r.ansatz_depth, r.vqe_gates,
                    r.vqe_depth, r.error_detected_gates, r.error_detected_depth, r.zero_state_gates_constructed,
                    r.ansatz_gates_constructed, r.ansatz_gates_text, r.ansatz_gates_text_simplified,
                    r.ansatz_depth_constructed,
                ]
                .iter()
                .map(|v| v.to_string())
                .collect()
            })
            .collect(),
    }
}

pub fn threshold_table(rows: &[CostRow], s: f64) -> Result<Table, GseError> {
    let mut out = Vec::new();
    for r in rows {
        let t = threshold_row(r, s)?;
        out.push(vec![
            t.m.to_string(),
            t.n.to_string(),
            f6(t.threshold_s),
            f6(t.threshold_p_g),
            f6(t.p_g),
            f6(t.p_d),
            f6(t.p_g_ed),
        ]);
    }
    Ok(Table {
        title: format!("Improvement threshold and success probabilities at s = {s}"),
        header: strings(["m", "n", "threshold_s", "threshold_p_g", "p_g", "p_d", "p_g_ed"]),
        rows: out,
    })
}

pub fn optimistic_table(rows: &[CostRow], target: f64) -> Result<Table, GseError> {
    let mut out = Vec::new();
    for r in rows {
        let o = optimistic_row(r, target)?;
        out.push(vec![
            o.m.to_string(),
            o.n.to_string(),
            frac(o.p_a),
            f6(o.threshold_s),
            f6(o.threshold_p_g),
            f6(o.required_s),
            f6(o.required_p_g),
        ]);
    }
    Ok(Table {
        title: format!("Thresholds with arbitrary-error detection, target {target}"),
        header: strings(["m", "n", "p_a", "threshold_s", "threshold_p_g", "required_s", "required_p_g"]),
        rows: out,
    })
}

pub fn budget_table(rows: &[CostRow]) -> Result<Table, GseError> {
    let mut out = Vec::new();
    for r in rows {
        for b in budget_rows(r)? {
            out.push(vec![b.m.to_string(), b.n.to_string(), frac(b.p_a), b.d.to_string(), b.s.to_string(), b.d_b.to_string()]);
        }
    }
    Ok(Table {
        title: "Second-round detection budgets".into(),
        header: strings(["m", "n", "p_a", "d", "s", "d_b"]),
        rows: out,
    })
}
