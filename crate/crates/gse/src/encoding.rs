//! The GSE stabilizer code on an interaction graph.
//!
//! Every vertex owns two data qubits `(2v, 2v+1)`.  The four half-edges of a
//! vertex carry mutually anticommuting two-qubit Paulis
//! (left `XY`, up `YY`, right `IZ`, down `IX`); edge operators are
//! `A_jk = ε_jk γ_j γ_k`, vertex operators `B_j = −γ_L γ_U γ_R γ_D`, and the
//! loop operator `i^n ∏ A` around each plaquette or bigon is a stabilizer.

use serde::Serialize;

use crate::error::GseError;
use crate::gf2::Gf2Basis;
use crate::lattice::{Dir, InteractionGraph, Step};
use crate::layout::Layout;
use crate::pauli::{Pauli1, PauliOp};

/// Index into `InteractionGraph::plaquettes` / `Encoding::stabilizers`.
pub type LoopId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PauliClass {
    Trivial,
    Stabilizer,
    Detectable,
    Logical,
}

/// The two-qubit Pauli carried by a half-edge.
pub fn gamma_label(dir: Dir) -> &'static str {
    match dir {
        Dir::Left => "XY",
        Dir::Up => "YY",
        Dir::Right => "IZ",
        Dir::Down => "IX",
    }
}

pub fn vertex_qubits(v: usize) -> [usize; 2] {
    [2 * v, 2 * v + 1]
}

pub fn qubits_of(vertices: &[usize]) -> Vec<usize> {
    vertices.iter().flat_map(|&v| vertex_qubits(v)).collect()
}

#[derive(Clone, Debug)]
pub struct Encoding {
    pub graph: InteractionGraph,
    pub layout: Layout,
    pub edge_signs: Vec<i8>,
    /// `A_jk` for every edge in its stored orientation `j → k`.
    pub edge_ops: Vec<PauliOp>,
    /// `B_j` for every vertex.
    pub vertex_ops: Vec<PauliOp>,
    /// Loop operators, indexed like `graph.plaquettes`.
    pub stabilizers: Vec<PauliOp>,
    /// Non-contractible loop operators of a torus.  They belong to the
    /// stabilizer group but are not measured by any gadget.
    pub homology: Vec<PauliOp>,
    basis: Gf2Basis,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DistanceReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl DistanceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Encoding {
    pub fn build(graph: InteractionGraph) -> Self {
        let signs = vec![1; graph.edges.len()];
        Self::with_signs(graph, signs)
    }

    pub fn with_signs(graph: InteractionGraph, edge_signs: Vec<i8>) -> Self {
        assert_eq!(edge_signs.len(), graph.edges.len());
        let n = 2 * graph.n_vertices();
        let mut enc = Encoding {
            layout: Layout::new(&graph),
            graph,
            edge_signs,
            edge_ops: Vec::new(),
            vertex_ops: Vec::new(),
            stabilizers: Vec::new(),
            homology: Vec::new(),
            basis: Gf2Basis::new(),
        };
        enc.vertex_ops = (0..enc.graph.n_vertices())
            .map(|v| {
                let g = |d| enc.gamma(v, d);
                (&(&(&g(Dir::Left) * &g(Dir::Up)) * &g(Dir::Right)) * &g(Dir::Down)).negated()
            })
            .collect();
        enc.edge_ops = (0..enc.graph.edges.len()).map(|e| enc.edge_op_from(e, enc.graph.edges[e].j)).collect();
        let loop_op = |cycle: &[Step]| {
            let mut op = PauliOp::identity(n).times_i((cycle.len() % 4) as u8);
            for s in cycle {
                op = &op * &enc.edge_op_from(s.edge, s.from);
            }
            op
        };
        let stabilizers: Vec<PauliOp> = enc.graph.plaquettes.iter().map(|p| loop_op(&p.cycle)).collect();
        let homology: Vec<PauliOp> = enc.graph.homology_cycles().iter().map(|c| loop_op(c)).collect();
        enc.stabilizers = stabilizers;
        enc.homology = homology;
        for s in enc.stabilizers.iter().chain(&enc.homology) {
            enc.basis.insert(&s.symplectic_row());
        }
        enc
    }

    pub fn n_data(&self) -> usize {
        2 * self.graph.n_vertices()
    }

    pub fn stabilizer_rank(&self) -> usize {
        self.basis.rank()
    }

    /// `γ` for half-edge `dir` of vertex `v`, on the full data register.
    pub fn gamma(&self, v: usize, dir: Dir) -> PauliOp {
        PauliOp::parse(gamma_label(dir)).unwrap().embed(self.n_data(), &vertex_qubits(v))
    }

    /// `A_{from,to}` for edge `e` traversed starting at `from`.
    pub fn edge_op_from(&self, e: usize, from: usize) -> PauliOp {
        let edge = &self.graph.edges[e];
        let to = edge.other(from);
        let op = &self.gamma(from, edge.dir_at(from)) * &self.gamma(to, edge.dir_at(to));
        if edge.orientation_from(from) * self.edge_signs[e] < 0 {
            op.negated()
        } else {
            op
        }
    }

    /// Restriction of `op` to the qubits of `vertices`, in that order.
    pub fn local(&self, op: &PauliOp, vertices: &[usize]) -> PauliOp {
        op.restrict(&qubits_of(vertices))
    }

    pub fn edge_local(&self, e: usize) -> PauliOp {
        let edge = &self.graph.edges[e];
        self.local(&self.edge_ops[e], &[edge.j, edge.k])
    }

    pub fn loop_local(&self, p: LoopId) -> PauliOp {
        self.local(&self.stabilizers[p], &self.graph.plaquettes[p].vertices)
    }

    fn data_part(&self, err: &PauliOp) -> Result<PauliOp, GseError> {
        let n = self.n_data();
        if err.n_qubits() == n {
            return Ok(err.clone());
        }
        if let Some(&q) = err.support().iter().find(|&&q| q >= n) {
            return Err(GseError::OutsideData(q));
        }
        if err.n_qubits() < n {
            return Err(GseError::SizeMismatch { left: err.n_qubits(), right: n });
        }
        Ok(err.restrict(&(0..n).collect::<Vec<_>>()))
    }

    /// One bit per stabilizer generator: set when `err` anticommutes with it.
    pub fn syndrome(&self, err: &PauliOp) -> Result<Vec<bool>, GseError> {
        let err = self.data_part(err)?;
        Ok(self.stabilizers.iter().map(|s| !s.commutes(&err)).collect())
    }

    pub fn in_stabilizer_group(&self, p: &PauliOp) -> bool {
        p.n_qubits() == self.n_data() && self.basis.contains(&p.symplectic_row())
    }

    /// Membership test on a packed symplectic row `[x | z]` of the data register.
    pub fn row_in_stabilizer_group(&self, row: &[u64]) -> bool {
        self.basis.contains(row)
    }

    pub fn classify(&self, p: &PauliOp) -> PauliClass {
        let p = self.data_part(p).expect("classify: operator must act on data qubits");
        if p.is_identity_up_to_phase() {
            PauliClass::Trivial
        } else if self.stabilizers.iter().any(|s| !s.commutes(&p)) {
            PauliClass::Detectable
        } else if self.in_stabilizer_group(&p) {
            PauliClass::Stabilizer
        } else {
            PauliClass::Logical
        }
    }

    /// All non-identity Paulis on the four qubits of `(a, b)` that commute
    /// with every stabilizer, as local labels in `(a, b)` qubit order.
    pub fn two_vertex_centralizer(&self, a: usize, b: usize) -> Vec<PauliOp> {
        let qubits = qubits_of(&[a, b]);
        let mut out = Vec::new();
        for code in 1..256usize {
            let local = PauliOp::from_sparse(
                4,
                &(0..4).map(|i| (i, Pauli1::ALL[(code >> (2 * i)) & 3])).collect::<Vec<_>>(),
            );
            let full = local.embed(self.n_data(), &qubits);
            if self.stabilizers.iter().all(|s| s.commutes(&full)) {
                out.push(local);
            }
        }
        out
    }

    /// Named products of `B_j`, `A_jk`, `A'_jk` (doubled edges only) and `B_k`
    /// for the vertex pair of edge `e`, as local labels with computed signs.
    pub fn enumerate_two_vertex_logicals(&self, e: usize) -> Vec<(String, PauliOp)> {
        let edge = &self.graph.edges[e];
        let (j, k) = (edge.j, edge.k);
        let (straight, doubled) = match self.graph.straight_partner(e) {
            Some(s) => (s, Some(e)),
            None => {
                let twin = self.graph.doubled_edges().find(|&d| self.graph.straight_partner(d) == Some(e));
                (e, twin)
            }
        };
        let mut factors: Vec<(&str, PauliOp)> = vec![("B_j", self.vertex_ops[j].clone())];
        factors.push(("A_jk", self.edge_op_from(straight, j)));
        if let Some(d) = doubled {
            factors.push(("A'_jk", self.edge_op_from(d, j)));
        }
        factors.push(("B_k", self.vertex_ops[k].clone()));
        let mut out = Vec::new();
        for mask in 1..(1usize << factors.len()) {
            let mut op = PauliOp::identity(self.n_data());
            let mut name = Vec::new();
            for (i, (label, f)) in factors.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    op = &op * f;
                    name.push(*label);
                }
            }
            out.push((name.join(" "), self.local(&op, &[j, k])));
        }
        out
    }

    /// Returns a new encoding whose loop signs are flipped exactly on
    /// `defective`, by negating edge operators along dual paths that pair the
    /// defects up (closest pairs first).
    pub fn fix_signs(&self, defective: &[LoopId]) -> Result<Encoding, GseError> {
        let mut remaining: Vec<LoopId> = defective.to_vec();
        remaining.sort_unstable();
        remaining.dedup();
        if remaining.len() % 2 != 0 {
            return Err(GseError::OddDefectSet(remaining.len()));
        }
        let adj = self.graph.plaquette_adjacency();
        let mut signs = self.edge_signs.clone();
        while !remaining.is_empty() {
            let mut best: Option<(usize, usize, Vec<usize>)> = None;
            for a in 0..remaining.len() {
                for b in a + 1..remaining.len() {
                    let path = self
                        .graph
                        .dual_path(&adj, remaining[a], remaining[b])
                        .ok_or_else(|| GseError::InvalidLattice("disconnected plaquette graph".into()))?;
                    if best.as_ref().is_none_or(|(_, _, p)| path.len() < p.len()) {
                        best = Some((a, b, path));
                    }
                }
            }
            let (a, b, path) = best.expect("at least two defects remain");
            for e in path {
                signs[e] = -signs[e];
            }
            remaining.remove(b);
            remaining.remove(a);
        }
        Ok(Encoding::with_signs(self.graph.clone(), signs))
    }

    /// Checks that every weight-one Pauli on the data qubits is detectable.
    pub fn verify_detection_distance(&self) -> DistanceReport {
        let mut report = DistanceReport::default();
        for q in 0..self.n_data() {
            for p in Pauli1::NON_IDENTITY {
                let err = PauliOp::single(self.n_data(), q, p);
                report.checked += 1;
                let class = self.classify(&err);
                if class != PauliClass::Detectable {
                    report.violations.push(format!("{p} on qubit {q}: {class:?}"));
                }
            }
        }
        report
    }

    /// Checks the edge/vertex operator algebra: hermiticity, involution,
    /// antisymmetry, the commutation pattern by shared vertices, and that
    /// every loop operator is a + stabilizer.  Returns human-readable violations.
    pub fn check_algebra(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let id = PauliOp::identity(self.n_data());
        let g = &self.graph;
        for (v, b) in self.vertex_ops.iter().enumerate() {
            if !b.is_hermitian() || &(b * b) != &id {
                bad.push(format!("B_{v} is not a Hermitian involution"));
            }
        }
        for (e, a) in self.edge_ops.iter().enumerate() {
            let edge = &g.edges[e];
            if !a.is_hermitian() || &(a * a) != &id {
                bad.push(format!("A on edge {e} is not a Hermitian involution"));
            }
            if self.edge_op_from(e, edge.k) != a.clone().negated() {
                bad.push(format!("A_kj != -A_jk on edge {e}"));
            }
            for v in 0..g.n_vertices() {
                let touches = v == edge.j || v == edge.k;
                if a.commutes(&self.vertex_ops[v]) == touches {
                    bad.push(format!("A on edge {e} vs B_{v}: wrong commutation"));
                }
            }
        }
        for v in 0..g.n_vertices() {
            for w in v + 1..g.n_vertices() {
                if !self.vertex_ops[v].commutes(&self.vertex_ops[w]) {
                    bad.push(format!("B_{v}, B_{w} anticommute"));
                }
            }
        }
        for e in 0..g.edges.len() {
            for f in e + 1..g.edges.len() {
                let (a, b) = (&g.edges[e], &g.edges[f]);
                let shared = [a.j, a.k].iter().filter(|&&x| x == b.j || x == b.k).count();
                let should_commute = shared != 1;
                if self.edge_ops[e].commutes(&self.edge_ops[f]) != should_commute {
                    bad.push(format!("edges {e}, {f} sharing {shared} vertices: wrong commutation"));
                }
            }
        }
        for (p, s) in self.stabilizers.iter().enumerate() {
            if !s.is_hermitian() || !self.in_stabilizer_group(s) {
                bad.push(format!("loop {p} is not a Hermitian stabilizer"));
            }
            for op in self.edge_ops.iter().chain(&self.vertex_ops) {
                if !s.commutes(op) {
                    bad.push(format!("loop {p} anticommutes with a logical generator"));
                    break;
                }
            }
        }
        bad
    }

    pub fn to_json(&self) -> serde_json::Value {
        let g = &self.graph;
        let vertices: Vec<_> = (0..g.n_vertices())
            .map(|v| {
                let (r, c) = g.coords(v);
                serde_json::json!({
                    "vertex": v, "row": r, "col": c,
                    "qubits": vertex_qubits(v),
                    "B": self.local(&self.vertex_ops[v], &[v]).to_string(),
                })
            })
            .collect();
        let edges: Vec<_> = g
            .edges
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                serde_json::json!({
                    "edge": e, "j": edge.j, "k": edge.k, "kind": edge.kind,
                    "orientation": edge.orientation, "sign": self.edge_signs[e],
                    "interacting": edge.interacting,
                    "A": self.edge_local(e).to_string(),
                })
            })
            .collect();
        let loops: Vec<_> = g
            .plaquettes
            .iter()
            .enumerate()
            .map(|(p, pl)| {
                serde_json::json!({
                    "loop": p, "kind": pl.kind, "row": pl.row, "col": pl.col,
                    "vertices": pl.vertices,
                    "operator": self.loop_local(p).to_string(),
                })
            })
            .collect();
        serde_json::json!({
            "rows": g.rows, "cols": g.cols, "topology": g.topology,
            "data_qubits": self.n_data(),
            "stabilizer_rank": self.stabilizer_rank(),
            "vertices": vertices, "edges": edges, "loops": loops,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LoopKind;

    fn planar(m: usize, n: usize) -> Encoding {
        Encoding::build(InteractionGraph::build_planar(m, n).unwrap())
    }

    #[test]
    fn vertex_operator_is_zy() {
        let enc = planar(2, 2);
        for v in 0..4 {
            assert_eq!(enc.local(&enc.vertex_ops[v], &[v]).to_string(), "ZY");
        }
    }

    #[test]
    fn edge_labels() {
        let enc = planar(4, 4);
        for e in enc.graph.straight_edges() {
            let label = enc.edge_local(e).letters();
            match enc.graph.edges[e].kind {
                crate::lattice::EdgeKind::Horizontal => assert_eq!(label, "IZXY"),
                _ => assert_eq!(label, "IXYY"),
            }
        }
    }

    #[test]
    fn bigon_and_square_loops() {
        let enc = planar(4, 4);
        let center = enc.graph.square_at(1, 1).unwrap();
        assert_eq!(enc.loop_local(center).letters(), "IYXZYXZI");
        for p in enc.graph.bigons() {
            let expect = match enc.graph.plaquettes[p].kind {
                LoopKind::BigonTop => "-YXZI",
                LoopKind::BigonRight => "-IYYX",
                LoopKind::BigonBottom => "-IYXZ",
                LoopKind::BigonLeft => "-XZZI",
                LoopKind::Square => unreachable!(),
            };
            assert_eq!(enc.loop_local(p).to_string(), expect);
        }
    }

    #[test]
    fn generators_are_independent_on_planar() {
        let enc = planar(4, 4);
        assert_eq!(enc.stabilizer_rank(), 17);
        let torus = Encoding::build(InteractionGraph::build_torus(4, 4).unwrap());
        // 16 plaquettes with one relation, plus two homology classes.
        assert_eq!(torus.stabilizer_rank(), 17);
    }

    #[test]
    fn algebra_holds() {
        assert!(planar(2, 2).check_algebra().is_empty());
        assert!(Encoding::build(InteractionGraph::build_torus(3, 4).unwrap()).check_algebra().is_empty());
    }

    #[test]
    fn weight_one_errors_are_detectable() {
        assert!(planar(2, 4).verify_detection_distance().passed());
    }

    #[test]
    fn classify_examples() {
        let enc = planar(4, 4);
        let center = enc.graph.square_at(1, 1).unwrap();
        assert_eq!(enc.classify(&enc.stabilizers[center]), PauliClass::Stabilizer);
        assert_eq!(enc.classify(&enc.vertex_ops[5]), PauliClass::Logical);
        assert_eq!(enc.classify(&PauliOp::identity(32).negated()), PauliClass::Trivial);
        assert_eq!(enc.classify(&PauliOp::single(32, 3, Pauli1::Y)), PauliClass::Detectable);
    }

    #[test]
    fn odd_defect_sets_are_rejected() {
        assert!(matches!(planar(2, 2).fix_signs(&[0]), Err(GseError::OddDefectSet(1))));
        assert_eq!(planar(2, 2).fix_signs(&[]).unwrap().edge_signs, vec![1; 8]);
    }

    #[test]
    fn syndrome_rejects_ancilla_support() {
        let enc = planar(2, 2);
        assert!(enc.syndrome(&PauliOp::single(12, 10, Pauli1::X)).is_err());
        assert_eq!(enc.syndrome(&PauliOp::single(12, 3, Pauli1::X)).unwrap().len(), 5);
    }
}
