//! Circuit builders: syndrome and vertex-operator measurements, protected
//! evolutions of two-vertex logical operators, and the HVA ansatz schedule.

use std::collections::HashMap;

use serde::Serialize;

use crate::circuit::{Circuit, Connectivity, Gate, MeasKind, SwapAccounting};
use crate::encoding::{qubits_of, vertex_qubits, Encoding, LoopId};
use crate::error::GseError;
use crate::faults::{enumerate_single_faults, FaultConfig, FaultSummary};
use crate::layout::Corner;
use crate::pauli::{Pauli1, PauliOp};

// ---------------------------------------------------------------------------
// Syndrome and vertex-operator measurement
// ---------------------------------------------------------------------------

/// Measures one loop operator with its ancilla: one Pauli-controlled-X per
/// non-identity factor in NW → NE → SW → SE order.  Under reduced
/// connectivity the factor on the non-coupled qubit of a vertex is reached
/// by swapping the vertex's two qubits.
pub fn syndrome_measurement_circuit(enc: &Encoding, p: LoopId, conn: Connectivity) -> Result<Circuit, GseError> {
    if p >= enc.stabilizers.len() {
        return Err(GseError::NotAStabilizer(format!("loop index {p}")));
    }
    let layout = &enc.layout;
    let a = layout.loop_ancilla[p];
    let local = enc.loop_local(p);
    let mut c = Circuit::new(format!("syndrome[{p}]"), layout.n_qubits, enc.n_data(), conn);
    c.ancilla = Some(a);
    c.push(Gate::PrepZero(a));
    for (idx, &(v, corner)) in layout.loop_corners[p].iter().enumerate() {
        let [q0, _] = vertex_qubits(v);
        let mut swapped = false;
        for s in 0..2 {
            let letter = local.get(2 * idx + s);
            if letter.is_identity() {
                continue;
            }
            match conn {
                Connectivity::Full => {
                    c.push(Gate::CP { cp: letter, a: q0 + s, tp: Pauli1::X, b: a });
                }
                Connectivity::Reduced => {
                    let need = s != corner.slot();
                    if need != swapped {
                        c.push(Gate::Swap(q0, q0 + 1));
                        swapped = need;
                    }
                    c.push(Gate::CP { cp: letter, a: q0 + corner.slot(), tp: Pauli1::X, b: a });
                }
            }
        }
        if swapped {
            c.push(Gate::Swap(q0, q0 + 1));
        }
    }
    c.push(Gate::MeasureZ { q: a, kind: MeasKind::Syndrome(p) });
    Ok(c)
}

/// Measures `B_v = ±ZY` with the ancilla that has `v` as its NW corner.
pub fn bj_measurement_circuit(enc: &Encoding, v: usize, conn: Connectivity) -> Circuit {
    let layout = &enc.layout;
    let a = layout.vertex_ancilla(v);
    let [q0, q1] = vertex_qubits(v);
    let mut c = Circuit::new(format!("B[{v}]"), layout.n_qubits, enc.n_data(), conn);
    c.ancilla = Some(a);
    c.push(Gate::PrepZero(a));
    match conn {
        Connectivity::Full => {
            c.push(Gate::CP { cp: Pauli1::Z, a: q0, tp: Pauli1::X, b: a });
            c.push(Gate::CP { cp: Pauli1::Y, a: q1, tp: Pauli1::X, b: a });
        }
        Connectivity::Reduced => {
            c.push(Gate::Swap(q0, q1));
            c.push(Gate::CP { cp: Pauli1::Z, a: q1, tp: Pauli1::X, b: a });
            c.push(Gate::Swap(q0, q1));
            c.push(Gate::CP { cp: Pauli1::Y, a: q1, tp: Pauli1::X, b: a });
        }
    }
    c.push(Gate::MeasureZ { q: a, kind: MeasKind::BMeasure(v) });
    c
}

/// All `B_j` measurements side by side.
pub fn all_bj_measurements(enc: &Encoding, conn: Connectivity) -> Circuit {
    let mut c = Circuit::new("B measurements", enc.layout.n_qubits, enc.n_data(), conn);
    for v in 0..enc.graph.n_vertices() {
        c.append(&bj_measurement_circuit(enc, v, conn));
    }
    c
}

/// Every loop operator measured simultaneously.
///
/// The loop factors per corner are always NW = `IY`, NE = `XZ`, SW = `YX`,
/// SE = `ZI`, so the measurements are interleaved in eight layers:
/// NW `Y`; NE `X`; swap NE/SW vertices; NE `Z`; SW `Y`; swap back; SW `X`;
/// SE `Z`.  Under full connectivity the swaps are omitted.
pub fn zero_state_circuit(enc: &Encoding, conn: Connectivity) -> Result<Circuit, GseError> {
    let layout = &enc.layout;
    let mut c = Circuit::new("zero-state syndrome round", layout.n_qubits, enc.n_data(), conn);
    let expected = |corner: Corner| match corner {
        Corner::NW => "IY",
        Corner::NE => "XZ",
        Corner::SW => "YX",
        Corner::SE => "ZI",
    };
    let mut roles: Vec<Vec<(usize, Corner, usize)>> = Vec::new();
    for p in 0..enc.stabilizers.len() {
        let local = enc.loop_local(p);
        let mut entries = Vec::new();
        for (idx, &(v, corner)) in layout.loop_corners[p].iter().enumerate() {
            let pair = local.restrict(&[2 * idx, 2 * idx + 1]).letters();
            if pair != expected(corner) {
                return Err(GseError::Unsupported(format!(
                    "loop {p} has factor {pair} at corner {corner:?}; the shared schedule needs {}",
                    expected(corner)
                )));
            }
            entries.push((v, corner, layout.loop_ancilla[p]));
        }
        roles.push(entries);
        c.push(Gate::PrepZero(layout.loop_ancilla[p]));
    }
    let with_role = |corner: Corner| -> Vec<(usize, usize)> {
        roles.iter().flatten().filter(|(_, c, _)| *c == corner).map(|&(v, _, a)| (v, a)).collect()
    };
    let (nw, ne, sw, se) = (with_role(Corner::NW), with_role(Corner::NE), with_role(Corner::SW), with_role(Corner::SE));
    let mut swap_set: Vec<usize> = ne.iter().chain(&sw).map(|&(v, _)| v).collect();
    swap_set.sort_unstable();
    swap_set.dedup();
    let reduced = conn == Connectivity::Reduced;
    let cp = |c: &mut Circuit, p: Pauli1, q: usize, a: usize| {
        c.push(Gate::CP { cp: p, a: q, tp: Pauli1::X, b: a });
    };
    for &(v, a) in &nw {
        cp(&mut c, Pauli1::Y, 2 * v + 1, a);
    }
    for &(v, a) in &ne {
        cp(&mut c, Pauli1::X, 2 * v, a);
    }
    if reduced {
        for &v in &swap_set {
            c.push(Gate::Swap(2 * v, 2 * v + 1));
        }
    }
    // While swapped, the first qubit's slot holds the second qubit and vice versa.
    for &(v, a) in &ne {
        cp(&mut c, Pauli1::Z, if reduced { 2 * v } else { 2 * v + 1 }, a);
    }
    for &(v, a) in &sw {
        cp(&mut c, Pauli1::Y, if reduced { 2 * v + 1 } else { 2 * v }, a);
    }
    if reduced {
        for &v in &swap_set {
            c.push(Gate::Swap(2 * v, 2 * v + 1));
        }
    }
    for &(v, a) in &sw {
        cp(&mut c, Pauli1::X, 2 * v + 1, a);
    }
    for &(v, a) in &se {
        cp(&mut c, Pauli1::Z, 2 * v, a);
    }
    for p in 0..enc.stabilizers.len() {
        c.push(Gate::MeasureZ { q: layout.loop_ancilla[p], kind: MeasKind::Syndrome(p) });
    }
    Ok(c)
}

/// Depth-one preparation of every vertex pair in an eigenstate of `B_j`
/// (`−1` where the occupancy bit is set), followed by one round of loop
/// measurements.  Loop defects are handled classically by `Encoding::fix_signs`.
pub fn state_prep_circuit(enc: &Encoding, occupancies: &[bool], conn: Connectivity) -> Result<Circuit, GseError> {
    let nv = enc.graph.n_vertices();
    if occupancies.len() != nv {
        return Err(GseError::ParamCount { expected: nv, got: occupancies.len() });
    }
    let mut c = Circuit::new("state preparation", enc.layout.n_qubits, enc.n_data(), conn);
    for (v, &occupied) in occupancies.iter().enumerate() {
        let b = enc.local(&enc.vertex_ops[v], &[v]);
        debug_assert_eq!(b.letters(), "ZY");
        // B = s·Z⊗Y on |0⟩⊗|y⟩ has eigenvalue s·y; we want (−1)^occupied.
        let negative_b = b.sign() == Some(-1);
        let [q0, q1] = vertex_qubits(v);
        c.push(Gate::PrepZero(q0));
        c.push(Gate::PrepEigen { q: q1, pauli: Pauli1::Y, negative: occupied ^ negative_b });
    }
    c.append(&zero_state_circuit(enc, conn)?);
    Ok(c)
}

// ---------------------------------------------------------------------------
// Evolutions
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    /// `B_j`
    Vertex,
    /// `B_j B_k`
    VertexVertex,
    /// `i B_j A_jk`
    VertexEdge,
    /// `i A_jk B_k`
    EdgeVertex,
    /// Any other operator supported on one or two vertices.
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Vertex,
    Horizontal,
    Vertical,
}

/// A Hermitian logical operator supported on one vertex or an adjacent pair.
#[derive(Clone, Debug, Serialize)]
pub struct EvolutionTerm {
    pub kind: TermKind,
    /// One vertex, or two in conventional order (left or top first).
    pub vertices: Vec<usize>,
    pub edge: Option<usize>,
    /// The operator on the full data register.
    pub op: PauliOp,
}

impl EvolutionTerm {
    pub fn vertex(enc: &Encoding, v: usize) -> Self {
        EvolutionTerm { kind: TermKind::Vertex, vertices: vec![v], edge: None, op: enc.vertex_ops[v].clone() }
    }

    pub fn vertex_vertex(enc: &Encoding, e: usize) -> Self {
        let (j, k) = (enc.graph.edges[e].j, enc.graph.edges[e].k);
        let op = &enc.vertex_ops[j] * &enc.vertex_ops[k];
        EvolutionTerm { kind: TermKind::VertexVertex, vertices: vec![j, k], edge: Some(e), op }
    }

    pub fn vertex_edge(enc: &Encoding, e: usize) -> Self {
        let (j, k) = (enc.graph.edges[e].j, enc.graph.edges[e].k);
        let op = (&enc.vertex_ops[j] * &enc.edge_ops[e]).times_i(1);
        EvolutionTerm { kind: TermKind::VertexEdge, vertices: vec![j, k], edge: Some(e), op }
    }

    pub fn edge_vertex(enc: &Encoding, e: usize) -> Self {
        let (j, k) = (enc.graph.edges[e].j, enc.graph.edges[e].k);
        let op = (&enc.edge_ops[e] * &enc.vertex_ops[k]).times_i(1);
        EvolutionTerm { kind: TermKind::EdgeVertex, vertices: vec![j, k], edge: Some(e), op }
    }

    /// An arbitrary operator given by its local label on the pair of edge `e`.
    pub fn on_edge(enc: &Encoding, e: usize, label: &str) -> Result<Self, GseError> {
        let (j, k) = (enc.graph.edges[e].j, enc.graph.edges[e].k);
        let local = PauliOp::parse(label)?;
        if local.n_qubits() != 4 {
            return Err(GseError::InvalidArgument(format!("{label} is not a four-qubit label")));
        }
        let op = local.embed(enc.n_data(), &qubits_of(&[j, k]));
        Ok(EvolutionTerm { kind: TermKind::Other, vertices: vec![j, k], edge: Some(e), op })
    }

    pub fn strands(&self) -> Vec<usize> {
        qubits_of(&self.vertices)
    }

    pub fn local(&self) -> PauliOp {
        self.op.restrict(&self.strands())
    }

    pub fn orientation(&self, enc: &Encoding) -> Orientation {
        match self.vertices.as_slice() {
            [_] => Orientation::Vertex,
            [j, k] => {
                let ((rj, _), (rk, _)) = (enc.graph.coords(*j), enc.graph.coords(*k));
                if rj == rk {
                    Orientation::Horizontal
                } else {
                    Orientation::Vertical
                }
            }
            _ => unreachable!("terms live on one or two vertices"),
        }
    }

    pub fn describe(&self) -> String {
        format!("{:?} on {:?}: {}", self.kind, self.vertices, self.local().letters())
    }
}

/// How a term is evolved: which target Pauli `Q` the controlled gates use on
/// the evolved (pivot) strand, whether the strand order is reversed, whether
/// the second strand is flagged, and whether the centre is a native
/// two-qubit evolution.
#[derive(Clone, Debug, Serialize)]
pub struct EvolutionPlan {
    pub term: EvolutionTerm,
    pub q: Pauli1,
    pub reflected: bool,
    pub flag_second: bool,
    pub native: bool,
}

struct Shape {
    letters: Vec<Pauli1>,
    strands: Vec<usize>,
    pivot: usize,
    partner: Option<usize>,
    controls: Vec<usize>,
    flagged: Option<usize>,
}

fn shape(plan: &EvolutionPlan) -> Result<Shape, GseError> {
    let local = plan.term.local();
    let strands = plan.term.strands();
    let letters: Vec<Pauli1> = (0..strands.len()).map(|i| local.get(i)).collect();
    let mut order: Vec<usize> = (0..strands.len()).collect();
    if plan.reflected {
        order.reverse();
    }
    let nz: Vec<usize> = order.into_iter().filter(|&i| !letters[i].is_identity()).collect();
    let Some(&pivot) = nz.last() else {
        return Err(GseError::InvalidArgument("cannot evolve the identity".into()));
    };
    if letters[pivot].commutes(plan.q) {
        return Err(GseError::InvalidArgument(format!(
            "Q = {} commutes with the pivot factor {}",
            plan.q, letters[pivot]
        )));
    }
    let (partner, controls) = if plan.native && nz.len() >= 2 {
        (Some(nz[nz.len() - 2]), nz[..nz.len() - 2].to_vec())
    } else {
        (None, nz[..nz.len() - 1].to_vec())
    };
    let flagged = if plan.flag_second {
        let second = *nz.get(1).ok_or_else(|| GseError::Unsupported("flag needs two factors".into()))?;
        if !controls.contains(&second) {
            return Err(GseError::Unsupported("the flagged strand must carry a controlled gate".into()));
        }
        Some(second)
    } else {
        None
    };
    Ok(Shape { letters, strands, pivot, partner, controls, flagged })
}

/// Builds the evolution circuit for a plan.
///
/// Full connectivity: controlled gates from every control strand onto the
/// pivot, the central evolution, and the mirror image; with a native
/// two-qubit gate the last control becomes the centre's partner.  A flag on
/// the second strand wraps that strand's controlled gates with
/// flag-controlled copies of its Pauli.
///
/// Reduced connectivity: the pivot is first swapped into the ancilla shared
/// by both vertices; every control and the partner is brought to its
/// vertex's coupled slot with an intra-vertex swap when needed; the suffix
/// undoes the prefix.
pub fn evolution_circuit(enc: &Encoding, plan: &EvolutionPlan, conn: Connectivity) -> Result<Circuit, GseError> {
    let sh = shape(plan)?;
    let layout = &enc.layout;
    let mut c = Circuit::new(
        format!("evolve {}{}", plan.term.local().letters(), if plan.reflected { " (reflected)" } else { "" }),
        layout.n_qubits,
        enc.n_data(),
        conn,
    );
    c.reflected = plan.reflected;
    c.evolved = Some(plan.term.op.clone());
    let l = &sh.letters;
    let s = &sh.strands;
    let center = |loc_partner: Option<usize>, loc_pivot: usize| match sh.partner {
        Some(p) => Gate::Evolve2 { p: l[p], a: loc_partner.unwrap(), pp: l[sh.pivot], b: loc_pivot, reversed: false },
        None => Gate::Evolve1 { p: l[sh.pivot], q: loc_pivot, reversed: false },
    };

    let vertex_only = plan.term.vertices.len() == 1;
    if conn == Connectivity::Full || vertex_only {
        if conn == Connectivity::Reduced && sh.flagged.is_some() {
            return Err(GseError::Unsupported("flag qubits under reduced connectivity".into()));
        }
        let flag = sh.flagged.map(|_| {
            let f = c.n_qubits;
            c.n_qubits += 1;
            c.flags.push(f);
            f
        });
        let mut prefix = Vec::new();
        for &ctl in &sh.controls {
            if Some(ctl) == sh.flagged {
                prefix.push(Gate::CP { cp: Pauli1::Z, a: flag.unwrap(), tp: l[ctl], b: s[ctl] });
            }
            prefix.push(Gate::CP { cp: l[ctl], a: s[ctl], tp: plan.q, b: s[sh.pivot] });
        }
        if let Some(f) = flag {
            c.push(Gate::PrepZero(f));
            c.push(Gate::H(f));
        }
        for g in &prefix {
            c.push(*g);
        }
        c.central = Some(c.push(center(sh.partner.map(|p| s[p]), s[sh.pivot])));
        for g in prefix.iter().rev() {
            c.push(*g);
        }
        if let Some(f) = flag {
            c.push(Gate::H(f));
            c.push(Gate::MeasureZ { q: f, kind: MeasKind::Flag });
        }
        return Ok(c);
    }

    if sh.flagged.is_some() {
        return Err(GseError::Unsupported("flag qubits under reduced connectivity".into()));
    }
    let (j, k) = (plan.term.vertices[0], plan.term.vertices[1]);
    let (rj, cj) = enc.graph.coords(j);
    // Vertical pairs use the ancilla to their west, horizontal ones the one to the south.
    let (a, corners) = match plan.term.orientation(enc) {
        Orientation::Vertical => (layout.grid_ancilla(rj, cj + layout.cols - 1), [Corner::NE, Corner::SE]),
        _ => (layout.grid_ancilla(rj, cj), [Corner::NW, Corner::NE]),
    };
    for (i, &v) in [j, k].iter().enumerate() {
        if !layout.adjacent(a, 2 * v + corners[i].slot()) {
            return Err(GseError::Unsupported(format!("vertices {j}, {k} do not share an ancilla")));
        }
    }
    c.ancilla = Some(a);
    // `at[i]` is the physical qubit currently holding strand i.
    let mut at: Vec<usize> = s.clone();
    let mut holder: HashMap<usize, Option<usize>> = s.iter().enumerate().map(|(i, &q)| (q, Some(i))).collect();
    holder.insert(a, None);
    let mut prefix = Vec::new();
    let mut swap = |prefix: &mut Vec<Gate>, at: &mut Vec<usize>, p: usize, q: usize| {
        prefix.push(Gate::Swap(p, q));
        let (hp, hq) = (holder[&p], holder[&q]);
        holder.insert(p, hq);
        holder.insert(q, hp);
        if let Some(i) = hp {
            at[i] = q;
        }
        if let Some(i) = hq {
            at[i] = p;
        }
    };
    let coupled = |i: usize| s[2 * (i / 2) + corners[i / 2].slot()];
    let bring = |prefix: &mut Vec<Gate>, at: &mut Vec<usize>, swap: &mut dyn FnMut(&mut Vec<Gate>, &mut Vec<usize>, usize, usize), i: usize| {
        if at[i] != coupled(i) {
            let base = s[2 * (i / 2)];
            swap(prefix, at, base, base + 1);
        }
    };
    bring(&mut prefix, &mut at, &mut swap, sh.pivot);
    let slot = at[sh.pivot];
    swap(&mut prefix, &mut at, slot, a);
    for &ctl in &sh.controls {
        bring(&mut prefix, &mut at, &mut swap, ctl);
        prefix.push(Gate::CP { cp: l[ctl], a: at[ctl], tp: plan.q, b: a });
    }
    if let Some(p) = sh.partner {
        bring(&mut prefix, &mut at, &mut swap, p);
    }
    for g in &prefix {
        c.push(*g);
    }
    c.central = Some(c.push(center(sh.partner.map(|p| at[p]), a)));
    for g in prefix.iter().rev() {
        c.push(*g);
    }
    Ok(c)
}

/// Target Paulis that anticommute with `p`, in X < Y < Z order.
fn anticommuting(p: Pauli1) -> Vec<Pauli1> {
    Pauli1::NON_IDENTITY.into_iter().filter(|q| !q.commutes(p)).collect()
}

/// Every candidate plan for `term`, in preference order: plain, reflected,
/// flagged, reflected and flagged; within each, `Q` in X < Y < Z order.
pub fn candidate_plans(term: &EvolutionTerm, native: bool) -> Vec<EvolutionPlan> {
    let mut out = Vec::new();
    for (reflected, flag_second) in [(false, false), (true, false), (false, true), (true, true)] {
        let probe = EvolutionPlan { term: term.clone(), q: Pauli1::X, reflected, flag_second, native };
        let local = term.local();
        let strands = term.strands().len();
        let mut order: Vec<usize> = (0..strands).collect();
        if reflected {
            order.reverse();
        }
        let Some(&pivot) = order.iter().rev().find(|&&i| !local.get(i).is_identity()) else {
            return out;
        };
        for q in anticommuting(local.get(pivot)) {
            let plan = EvolutionPlan { q, ..probe.clone() };
            if shape(&plan).is_ok() {
                out.push(plan);
            }
        }
    }
    out
}

/// Builds the plan's circuit and runs exhaustive single-fault enumeration.
pub fn evaluate_plan(
    enc: &Encoding,
    plan: &EvolutionPlan,
    conn: Connectivity,
    cfg: &FaultConfig,
) -> Result<FaultSummary, GseError> {
    let c = evolution_circuit(enc, plan, conn)?;
    Ok(enumerate_single_faults(&c, enc, cfg).summary)
}

/// The first candidate plan whose circuit has no undetectable logical
/// single-fault outcome (evolved-operator exceptions are tolerated: they are
/// intrinsic to single-qubit central evolutions).
pub fn plan_protected_evolution(
    enc: &Encoding,
    term: &EvolutionTerm,
    native: bool,
    conn: Connectivity,
) -> Result<EvolutionPlan, GseError> {
    let cfg = FaultConfig { swap_faults: conn == Connectivity::Reduced, ..FaultConfig::default() };
    for plan in candidate_plans(term, native) {
        if conn == Connectivity::Reduced && plan.flag_second && term.vertices.len() > 1 {
            continue;
        }
        if let Ok(summary) = evaluate_plan(enc, &plan, conn, &cfg) {
            if summary.undetectable_logical == 0 {
                return Ok(plan);
            }
        }
    }
    Err(GseError::NoPlan(term.describe()))
}

// ---------------------------------------------------------------------------
// HVA ansatz
// ---------------------------------------------------------------------------

/// The HVA terms in layer order: `B_j`; `B_jB_k` horizontal, vertical;
/// `iB_jA_jk` horizontal, vertical; `iA_jkB_k` horizontal, vertical.
/// Doubled (zero-weight) edges are not evolved.
pub fn hva_layers(enc: &Encoding) -> Vec<Vec<EvolutionTerm>> {
    use crate::lattice::EdgeKind;
    let g = &enc.graph;
    let edges_of = |kind: EdgeKind| -> Vec<usize> { g.straight_edges().filter(|&e| g.edges[e].kind == kind).collect() };
    let (h, v) = (edges_of(EdgeKind::Horizontal), edges_of(EdgeKind::Vertical));
    let mut layers = vec![(0..g.n_vertices()).map(|x| EvolutionTerm::vertex(enc, x)).collect::<Vec<_>>()];
    type Make = fn(&Encoding, usize) -> EvolutionTerm;
    for make in [EvolutionTerm::vertex_vertex as Make, EvolutionTerm::vertex_edge, EvolutionTerm::edge_vertex] {
        for edges in [&h, &v] {
            layers.push(edges.iter().map(|&e| make(enc, e)).collect());
        }
    }
    layers
}

/// A planned HVA ansatz: one protected evolution per term.
#[derive(Clone, Debug, Serialize)]
pub struct HvaSchedule {
    pub layers: Vec<Vec<EvolutionPlan>>,
    pub circuit: Circuit,
    /// Largest gadget two-qubit depth per layer.
    pub layer_depths: Vec<usize>,
}

impl HvaSchedule {
    /// Depth counted as the sum over layers of the deepest gadget.
    pub fn layered_depth(&self) -> usize {
        self.layer_depths.iter().sum()
    }

    pub fn n_terms(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }
}

pub fn hva_term_count(enc: &Encoding) -> usize {
    hva_layers(enc).iter().map(Vec::len).sum()
}

/// Plans every term (plans are cached by local operator shape and edge
/// class, since the fault analysis of a gadget only depends on those) and
/// concatenates the gadgets layer by layer.
pub fn hva_schedule(enc: &Encoding, params: &[f64], native: bool, conn: Connectivity) -> Result<HvaSchedule, GseError> {
    let layers = hva_layers(enc);
    let expected: usize = layers.iter().map(Vec::len).sum();
    if params.len() != expected {
        return Err(GseError::ParamCount { expected, got: params.len() });
    }
    let mut circuit = Circuit::new("HVA ansatz", enc.layout.n_qubits, enc.n_data(), conn);
    let mut planned = Vec::new();
    let mut layer_depths = Vec::new();
    let mut cache: HashMap<(String, Orientation, Vec<u8>), (Pauli1, bool, bool)> = HashMap::new();
    for layer in layers {
        let mut plans = Vec::new();
        let mut depth = 0;
        for term in layer {
            let key = (term.local().letters(), term.orientation(enc), boundary_signature(enc, &term));
            let plan = match cache.get(&key) {
                Some(&(q, reflected, flag_second)) => EvolutionPlan { term, q, reflected, flag_second, native },
                None => {
                    let plan = plan_protected_evolution(enc, &term, native, conn)?;
                    cache.insert(key, (plan.q, plan.reflected, plan.flag_second));
                    plan
                }
            };
            let gadget = evolution_circuit(enc, &plan, conn)?;
            if !gadget.flags.is_empty() {
                // Give each flag its own qubit in the composite circuit.
                let offset = circuit.n_qubits - enc.layout.n_qubits;
                let mut shifted = gadget.clone();
                relabel_flags(&mut shifted, enc.layout.n_qubits, offset);
                circuit.append(&shifted);
            } else {
                circuit.append(&gadget);
            }
            depth = depth.max(gadget.count_resources(SwapAccounting::Unit).two_qubit_depth);
            plans.push(plan);
        }
        layer_depths.push(depth);
        planned.push(plans);
    }
    Ok(HvaSchedule { layers: planned, circuit, layer_depths })
}

/// Which doubled edges touch the term's vertices (boundary context matters
/// for which errors are logical).
fn boundary_signature(enc: &Encoding, term: &EvolutionTerm) -> Vec<u8> {
    let g = &enc.graph;
    term.vertices
        .iter()
        .map(|&v| {
            crate::lattice::Dir::ALL.iter().fold(0u8, |acc, &d| {
                let e = g.half_edge(v, d);
                let other = g.edges[e].other(v);
                let inside = term.vertices.contains(&other) as u8;
                (acc << 2) | (g.edges[e].kind.is_doubled() as u8) << 1 | inside
            })
        })
        .collect()
}

fn relabel_flags(c: &mut Circuit, base: usize, offset: usize) {
    let shift = |q: usize| if q >= base { q + offset } else { q };
    for g in &mut c.gates {
        *g = match *g {
            Gate::PrepZero(q) => Gate::PrepZero(shift(q)),
            Gate::H(q) => Gate::H(shift(q)),
            Gate::MeasureZ { q, kind } => Gate::MeasureZ { q: shift(q), kind },
            Gate::CP { cp, a, tp, b } => Gate::CP { cp, a: shift(a), tp, b: shift(b) },
            other => other,
        };
    }
    c.flags = c.flags.iter().map(|&f| shift(f)).collect();
    c.n_qubits += offset;
}

// ---------------------------------------------------------------------------
// Whole-algorithm circuits
// ---------------------------------------------------------------------------

/// The circuits that make up one VQE run with error detection.
#[derive(Clone, Debug)]
pub struct VqeCircuits {
    pub zero_state: Circuit,
    pub ansatz: HvaSchedule,
    pub b_measurements: Circuit,
    pub detection_round: Circuit,
}

impl VqeCircuits {
    pub fn build(enc: &Encoding, native: bool, conn: Connectivity) -> Result<Self, GseError> {
        let zero_state = state_prep_circuit(enc, &vec![false; enc.graph.n_vertices()], conn)?;
        let params = vec![0.0; hva_term_count(enc)];
        let ansatz = hva_schedule(enc, &params, native, conn)?;
        Ok(VqeCircuits {
            zero_state,
            ansatz,
            b_measurements: all_bj_measurements(enc, conn),
            detection_round: zero_state_circuit(enc, conn)?,
        })
    }

    /// Zero-state preparation, ansatz, time-reversed ansatz.
    pub fn vqe(&self) -> Circuit {
        let mut c = self.zero_state.clone();
        c.name = "VQE".into();
        c.append(&self.ansatz.circuit);
        c.append(&self.ansatz.circuit.reversed());
        c
    }

    /// The VQE circuit followed by `B_j` measurements and a second round of
    /// loop measurements.
    pub fn error_detected(&self) -> Circuit {
        let mut c = self.vqe();
        c.name = "error-detected VQE".into();
        c.append(&self.b_measurements);
        c.append(&self.detection_round);
        c
    }
}

/// Every gadget instance used by a VQE run on this lattice under `conn`:
/// each loop measurement, each `B_j` measurement and each planned HVA
/// evolution.
pub fn gadget_inventory(enc: &Encoding, native: bool, conn: Connectivity) -> Result<Vec<Circuit>, GseError> {
    let mut out = Vec::new();
    for p in 0..enc.stabilizers.len() {
        out.push(syndrome_measurement_circuit(enc, p, conn)?);
    }
    for v in 0..enc.graph.n_vertices() {
        out.push(bj_measurement_circuit(enc, v, conn));
    }
    let hva = hva_schedule(enc, &vec![0.0; hva_term_count(enc)], native, conn)?;
    for plan in hva.layers.iter().flatten() {
        out.push(evolution_circuit(enc, plan, conn)?);
    }
    Ok(out)
}
