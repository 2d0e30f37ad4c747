//! Circuit representation, text serialization and resource counting.

use std::fmt::Write as _;

use serde::Serialize;

use crate::encoding::LoopId;
use crate::layout::Layout;
use crate::pauli::{Pauli1, PauliOp};

/// What a Z measurement reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasKind {
    Syndrome(LoopId),
    Flag,
    BMeasure(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    PrepZero(usize),
    /// Prepares the `+1` (or `−1` when `negative`) eigenstate of a
    /// single-qubit Pauli.
    PrepEigen { q: usize, pauli: Pauli1, negative: bool },
    /// Applies `tp` on `b` conditioned on the `−1` eigenspace of `cp` on `a`.
    CP { cp: Pauli1, a: usize, tp: Pauli1, b: usize },
    H(usize),
    Swap(usize, usize),
    /// `exp(−i P t)` on one qubit; `reversed` marks `t → −t`.
    Evolve1 { p: Pauli1, q: usize, reversed: bool },
    /// `exp(−i P⊗P' t)` as one native two-qubit gate.
    Evolve2 { p: Pauli1, a: usize, pp: Pauli1, b: usize, reversed: bool },
    MeasureZ { q: usize, kind: MeasKind },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::PrepZero(q) | Gate::H(q) => vec![q],
            Gate::PrepEigen { q, .. } | Gate::Evolve1 { q, .. } | Gate::MeasureZ { q, .. } => vec![q],
            Gate::CP { a, b, .. } | Gate::Evolve2 { a, b, .. } => vec![a, b],
            Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::CP { .. } | Gate::Swap(..) | Gate::Evolve2 { .. })
    }

    /// The gate run backwards in time (used for the time-reversed ansatz).
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Evolve1 { p, q, reversed } => Gate::Evolve1 { p, q, reversed: !reversed },
            Gate::Evolve2 { p, a, pp, b, reversed } => Gate::Evolve2 { p, a, pp, b, reversed: !reversed },
            g => g,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    Full,
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SwapAccounting {
    /// A swap counts as one two-qubit gate.
    #[default]
    Unit,
    /// A swap counts as three CNOTs (three layers).
    Expanded,
}

#[derive(Clone, Debug, Serialize)]
pub struct Circuit {
    pub name: String,
    pub n_qubits: usize,
    pub n_data: usize,
    pub connectivity: Connectivity,
    pub gates: Vec<Gate>,
    /// Flag qubits added by this circuit (beyond the layout).
    pub flags: Vec<usize>,
    pub reflected: bool,
    pub ancilla: Option<usize>,
    /// The data-register operator being evolved, if this is an evolution.
    pub evolved: Option<PauliOp>,
    /// Index of the central evolution gate, if any.
    pub central: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub struct Resources {
    pub two_qubit_gates: usize,
    /// ASAP depth counting every gate.
    pub depth: usize,
    /// ASAP depth counting only two-qubit gates.
    pub two_qubit_depth: usize,
    pub measurements: usize,
}

impl Circuit {
    pub fn new(name: impl Into<String>, n_qubits: usize, n_data: usize, connectivity: Connectivity) -> Self {
        Circuit {
            name: name.into(),
            n_qubits,
            n_data,
            connectivity,
            gates: Vec::new(),
            flags: Vec::new(),
            reflected: false,
            ancilla: None,
            evolved: None,
            central: None,
        }
    }

    pub fn push(&mut self, g: Gate) -> usize {
        for q in g.qubits() {
            assert!(q < self.n_qubits, "gate {g:?} outside {} qubits", self.n_qubits);
        }
        self.gates.push(g);
        self.gates.len() - 1
    }

    /// Appends another circuit's gates (widening this circuit if needed).
    pub fn append(&mut self, other: &Circuit) {
        self.n_qubits = self.n_qubits.max(other.n_qubits);
        self.gates.extend_from_slice(&other.gates);
        self.flags.extend_from_slice(&other.flags);
    }

    /// The gates in reverse order with every evolution time-reversed.
    pub fn reversed(&self) -> Circuit {
        let mut out = self.clone();
        out.name = format!("{} (reversed)", self.name);
        out.gates = self.gates.iter().rev().map(Gate::inverse).collect();
        out.central = self.central.map(|c| self.gates.len() - 1 - c);
        out
    }

    fn qubit_name(&self, q: usize) -> String {
        if q < self.n_data {
            format!("q{q}")
        } else {
            format!("a{}", q - self.n_data)
        }
    }

    /// One gate per line, e.g. `CP Y q3 X a0`, `SWAP q4 q5`, `EV2 Z Z q6 q7 t`, `MZ a0`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            let n = |q| self.qubit_name(q);
            let t = |rev: bool| if rev { "-t" } else { "t" };
            let _ = match *g {
                Gate::PrepZero(q) => writeln!(s, "PREP {}", n(q)),
                Gate::PrepEigen { q, pauli, negative } => {
                    writeln!(s, "PREP{} {} {}", if negative { "-" } else { "+" }, pauli, n(q))
                }
                Gate::CP { cp, a, tp, b } => writeln!(s, "CP {cp} {} {tp} {}", n(a), n(b)),
                Gate::H(q) => writeln!(s, "H {}", n(q)),
                Gate::Swap(a, b) => writeln!(s, "SWAP {} {}", n(a), n(b)),
                Gate::Evolve1 { p, q, reversed } => writeln!(s, "EV1 {p} {} {}", n(q), t(reversed)),
                Gate::Evolve2 { p, a, pp, b, reversed } => {
                    writeln!(s, "EV2 {p} {pp} {} {} {}", n(a), n(b), t(reversed))
                }
                Gate::MeasureZ { q, .. } => writeln!(s, "MZ {}", n(q)),
            };
        }
        s
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn count_resources(&self, accounting: SwapAccounting) -> Resources {
        let mut ready = vec![0usize; self.n_qubits];
        let mut ready2 = vec![0usize; self.n_qubits];
        let mut res = Resources::default();
        for g in &self.gates {
            let qs = g.qubits();
            let cost = match (g, accounting) {
                (Gate::Swap(..), SwapAccounting::Expanded) => 3,
                _ => 1,
            };
            let start = qs.iter().map(|&q| ready[q]).max().unwrap_or(0);
            for &q in &qs {
                ready[q] = start + cost;
            }
            res.depth = res.depth.max(start + cost);
            if g.is_two_qubit() {
                res.two_qubit_gates += cost;
                let start2 = qs.iter().map(|&q| ready2[q]).max().unwrap_or(0);
                for &q in &qs {
                    ready2[q] = start2 + cost;
                }
                res.two_qubit_depth = res.two_qubit_depth.max(start2 + cost);
            }
            if matches!(g, Gate::MeasureZ { .. }) {
                res.measurements += 1;
            }
        }
        res
    }

    /// Two-qubit gates that act on an uncoupled pair under `layout`.
    pub fn connectivity_violations(&self, layout: &Layout) -> Vec<(usize, Gate)> {
        self.gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.is_two_qubit())
            .filter(|(_, g)| {
                let qs = g.qubits();
                !(layout.adjacent(qs[0], qs[1]) || self.flags.contains(&qs[0]) || self.flags.contains(&qs[1]))
            })
            .map(|(i, g)| (i, *g))
            .collect()
    }

    /// Indices of the measurements, in circuit order.
    pub fn measurements(&self) -> Vec<(usize, MeasKind)> {
        self.gates
            .iter()
            .enumerate()
            .filter_map(|(i, g)| match *g {
                Gate::MeasureZ { kind, .. } => Some((i, kind)),
                _ => None,
            })
            .collect()
    }
}
