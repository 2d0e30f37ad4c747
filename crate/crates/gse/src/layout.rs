//! Physical qubit layout and the reduced-connectivity coupling graph.
//!
//! Qubits are numbered as follows:
//!
//! * `0 .. 2V` — data qubits, two per vertex;
//! * one ancilla per position `(r, c)` of the `m × n` grid of plaquette
//!   centres (on planar lattices the last row and column are "wrap"
//!   positions whose corners are taken mod `m`, `n`);
//! * one ancilla per bigon.
//!
//! The ancilla at position `(r, c)` sits between the vertices
//! NW = `(r, c)`, NE = `(r, c+1)`, SW = `(r+1, c)`, SE = `(r+1, c+1)` and is
//! coupled to the second qubit of NW and SW and the first qubit of NE and SE.
//! The two qubits of a vertex are coupled to each other.  A bigon ancilla
//! reuses the couplings of the wrap position just outside its boundary edge,
//! restricted to the bigon's two vertices.

use serde::Serialize;

use crate::lattice::{InteractionGraph, LoopKind};

/// The role a vertex plays around an ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Corner {
    NW,
    NE,
    SW,
    SE,
}

impl Corner {
    /// Which qubit of the vertex (0 = first, 1 = second) touches the ancilla.
    pub fn slot(self) -> usize {
        match self {
            Corner::NW | Corner::SW => 1,
            Corner::NE | Corner::SE => 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Layout {
    pub rows: usize,
    pub cols: usize,
    pub n_data: usize,
    /// Ancilla qubit of every plaquette (squares and bigons).
    pub loop_ancilla: Vec<usize>,
    /// `(vertex, corner)` pairs of every loop, in the loop's vertex order.
    pub loop_corners: Vec<Vec<(usize, Corner)>>,
    /// Total number of qubits before per-circuit flag qubits.
    pub n_qubits: usize,
    neighbours: Vec<Vec<usize>>,
}

impl Layout {
    pub fn new(g: &InteractionGraph) -> Self {
        let (m, n) = (g.rows, g.cols);
        let n_data = 2 * g.n_vertices();
        let n_bigons = g.bigons().count();
        let n_qubits = n_data + m * n + n_bigons;
        let mut layout = Layout {
            rows: m,
            cols: n,
            n_data,
            loop_ancilla: Vec::new(),
            loop_corners: Vec::new(),
            n_qubits,
            neighbours: vec![Vec::new(); n_qubits],
        };
        for v in 0..g.n_vertices() {
            layout.couple(2 * v, 2 * v + 1);
        }
        for r in 0..m {
            for c in 0..n {
                let a = layout.grid_ancilla(r, c);
                for (v, corner) in layout.corners_at(r, c) {
                    layout.couple(a, 2 * v + corner.slot());
                }
            }
        }
        let mut next_bigon = n_data + m * n;
        for p in &g.plaquettes {
            let (ancilla, corners) = match p.kind {
                LoopKind::Square => {
                    let corners = [Corner::NW, Corner::NE, Corner::SW, Corner::SE];
                    (layout.grid_ancilla(p.row, p.col), p.vertices.iter().copied().zip(corners).collect::<Vec<_>>())
                }
                kind => {
                    let roles = match kind {
                        LoopKind::BigonTop => [Corner::SW, Corner::SE],
                        LoopKind::BigonBottom => [Corner::NW, Corner::NE],
                        LoopKind::BigonLeft => [Corner::NE, Corner::SE],
                        LoopKind::BigonRight => [Corner::NW, Corner::SW],
                        LoopKind::Square => unreachable!(),
                    };
                    let a = next_bigon;
                    next_bigon += 1;
                    let corners: Vec<_> = p.vertices.iter().copied().zip(roles).collect();
                    for &(v, corner) in &corners {
                        layout.couple(a, 2 * v + corner.slot());
                    }
                    (a, corners)
                }
            };
            layout.loop_ancilla.push(ancilla);
            layout.loop_corners.push(corners);
        }
        layout
    }

    fn couple(&mut self, a: usize, b: usize) {
        if !self.neighbours[a].contains(&b) {
            self.neighbours[a].push(b);
            self.neighbours[b].push(a);
        }
    }

    pub fn grid_ancilla(&self, r: usize, c: usize) -> usize {
        self.n_data + (r % self.rows) * self.cols + (c % self.cols)
    }

    /// The four `(vertex, corner)` pairs around grid position `(r, c)`.
    pub fn corners_at(&self, r: usize, c: usize) -> [(usize, Corner); 4] {
        let (m, n) = (self.rows, self.cols);
        let v = |rr: usize, cc: usize| (rr % m) * n + (cc % n);
        [
            (v(r, c), Corner::NW),
            (v(r, c + 1), Corner::NE),
            (v(r + 1, c), Corner::SW),
            (v(r + 1, c + 1), Corner::SE),
        ]
    }

    /// Ancilla used to measure `B_v`: the one that has `v` as its NW corner.
    pub fn vertex_ancilla(&self, v: usize) -> usize {
        self.grid_ancilla(v / self.cols, v % self.cols)
    }

    pub fn is_data(&self, q: usize) -> bool {
        q < self.n_data
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a < self.neighbours.len() && self.neighbours[a].contains(&b)
    }

    pub fn neighbours(&self, q: usize) -> &[usize] {
        &self.neighbours[q]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_4x4_layout() {
        let g = InteractionGraph::build_planar(4, 4).unwrap();
        let l = Layout::new(&g);
        assert_eq!(l.n_qubits, 32 + 16 + 8);
        // Every ancilla touches exactly four data qubits.
        for a in l.n_data..l.n_data + 16 {
            assert_eq!(l.neighbours(a).len(), 4);
        }
        // Data qubits are never coupled across vertices.
        for q in 0..32 {
            for &b in l.neighbours(q) {
                assert!(b >= 32 || b / 2 == q / 2);
            }
        }
        let centre = g.square_at(1, 1).unwrap();
        let a = l.loop_ancilla[centre];
        assert_eq!(a, l.grid_ancilla(1, 1));
        assert!(l.adjacent(a, 2 * 5 + 1) && l.adjacent(a, 2 * 6) && l.adjacent(a, 2 * 9 + 1) && l.adjacent(a, 2 * 10));
    }
}
