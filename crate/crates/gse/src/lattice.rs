//! Interaction graphs for the spinless Hubbard model.
//!
//! Two shapes are supported: a planar `m × n` grid whose boundary is padded
//! with zero-weight doubled edges so that every vertex has degree four, and an
//! `m × n` torus.  Vertices are numbered row-major from the top-left corner.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::GseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    PlanarDoubled,
    Torus,
}

/// Direction of a half-edge leaving a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dir {
    Left,
    Up,
    Right,
    Down,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::Left, Dir::Up, Dir::Right, Dir::Down];

    pub fn index(self) -> usize {
        match self {
            Dir::Left => 0,
            Dir::Up => 1,
            Dir::Right => 2,
            Dir::Down => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Horizontal,
    Vertical,
    DoubledTop,
    DoubledBottom,
    DoubledLeft,
    DoubledRight,
}

impl EdgeKind {
    pub fn is_doubled(self) -> bool {
        !matches!(self, EdgeKind::Horizontal | EdgeKind::Vertical)
    }
}

/// An oriented edge `j → k` leaving `j` through `dir_j` and entering `k`
/// through `dir_k`.  `orientation` is `ε_{jk}`; `ε_{kj} = −ε_{jk}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub j: usize,
    pub k: usize,
    pub dir_j: Dir,
    pub dir_k: Dir,
    pub orientation: i8,
    pub kind: EdgeKind,
    pub interacting: bool,
}

impl Edge {
    /// `ε` for traversal from `from` to the other endpoint.
    pub fn orientation_from(&self, from: usize) -> i8 {
        if from == self.j {
            self.orientation
        } else {
            -self.orientation
        }
    }

    pub fn other(&self, v: usize) -> usize {
        if v == self.j {
            self.k
        } else {
            self.j
        }
    }

    pub fn dir_at(&self, v: usize) -> Dir {
        if v == self.j {
            self.dir_j
        } else {
            self.dir_k
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopKind {
    Square,
    BigonTop,
    BigonBottom,
    BigonLeft,
    BigonRight,
}

/// One traversal step of a loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
}

/// A face of the graph whose loop operator is a stabilizer generator.
///
/// `vertices` lists squares as (NW, NE, SW, SE) and bigons with the left or
/// top vertex first; this is also the qubit order of the loop operator label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Plaquette {
    pub kind: LoopKind,
    pub row: usize,
    pub col: usize,
    pub vertices: Vec<usize>,
    pub cycle: Vec<Step>,
}

impl Plaquette {
    pub fn is_bigon(&self) -> bool {
        self.kind != LoopKind::Square
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.cycle.iter().map(|s| s.edge)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InteractionGraph {
    pub rows: usize,
    pub cols: usize,
    pub topology: Topology,
    pub edges: Vec<Edge>,
    pub plaquettes: Vec<Plaquette>,
    #[serde(skip)]
    half_edges: Vec<[usize; 4]>,
}

impl InteractionGraph {
    pub fn build_planar(m: usize, n: usize) -> Result<Self, GseError> {
        if m < 2 || n < 2 || m % 2 != 0 || n % 2 != 0 {
            return Err(GseError::InvalidLattice(format!(
                "planar lattices need even dimensions of at least 2, got {m}x{n}"
            )));
        }
        let mut g = InteractionGraph::empty(m, n, Topology::PlanarDoubled);
        for r in 0..m {
            for c in 0..n {
                if c + 1 < n {
                    g.add_edge(g.vertex(r, c), g.vertex(r, c + 1), Dir::Right, Dir::Left, 1, EdgeKind::Horizontal);
                }
                if r + 1 < m {
                    g.add_edge(g.vertex(r, c), g.vertex(r + 1, c), Dir::Down, Dir::Up, 1, EdgeKind::Vertical);
                }
            }
        }
        // Each doubled edge runs opposite to its straight partner, so every
        // bigon is a directed 2-cycle.
        for c in (0..n).step_by(2) {
            g.add_edge(g.vertex(0, c), g.vertex(0, c + 1), Dir::Up, Dir::Up, -1, EdgeKind::DoubledTop);
            g.add_edge(g.vertex(m - 1, c), g.vertex(m - 1, c + 1), Dir::Down, Dir::Down, -1, EdgeKind::DoubledBottom);
        }
        for r in (0..m).step_by(2) {
            g.add_edge(g.vertex(r, 0), g.vertex(r + 1, 0), Dir::Left, Dir::Left, -1, EdgeKind::DoubledLeft);
            g.add_edge(g.vertex(r, n - 1), g.vertex(r + 1, n - 1), Dir::Right, Dir::Right, -1, EdgeKind::DoubledRight);
        }
        for r in 0..m - 1 {
            for c in 0..n - 1 {
                g.add_square(r, c);
            }
        }
        for c in (0..n).step_by(2) {
            g.add_bigon(LoopKind::BigonTop, 0, c, g.vertex(0, c), g.vertex(0, c + 1), Dir::Right, Dir::Up);
        }
        for r in (0..m).step_by(2) {
            g.add_bigon(LoopKind::BigonRight, r, n - 1, g.vertex(r, n - 1), g.vertex(r + 1, n - 1), Dir::Down, Dir::Right);
        }
        for c in (0..n).step_by(2) {
            g.add_bigon(LoopKind::BigonBottom, m - 1, c, g.vertex(m - 1, c), g.vertex(m - 1, c + 1), Dir::Right, Dir::Down);
        }
        for r in (0..m).step_by(2) {
            g.add_bigon(LoopKind::BigonLeft, r, 0, g.vertex(r, 0), g.vertex(r + 1, 0), Dir::Down, Dir::Left);
        }
        Ok(g)
    }

    pub fn build_torus(m: usize, n: usize) -> Result<Self, GseError> {
        if m < 2 || n < 2 {
            return Err(GseError::InvalidLattice(format!("torus needs at least 2x2, got {m}x{n}")));
        }
        let mut g = InteractionGraph::empty(m, n, Topology::Torus);
        for r in 0..m {
            for c in 0..n {
                let v = g.vertex(r, c);
                g.add_edge(v, g.vertex(r, (c + 1) % n), Dir::Right, Dir::Left, 1, EdgeKind::Horizontal);
                g.add_edge(v, g.vertex((r + 1) % m, c), Dir::Down, Dir::Up, 1, EdgeKind::Vertical);
            }
        }
        for r in 0..m {
            for c in 0..n {
                g.add_square(r, c);
            }
        }
        Ok(g)
    }

    pub fn build(topology: Topology, m: usize, n: usize) -> Result<Self, GseError> {
        match topology {
            Topology::PlanarDoubled => Self::build_planar(m, n),
            Topology::Torus => Self::build_torus(m, n),
        }
    }

    fn empty(m: usize, n: usize, topology: Topology) -> Self {
        InteractionGraph {
            rows: m,
            cols: n,
            topology,
            edges: Vec::new(),
            plaquettes: Vec::new(),
            half_edges: vec![[usize::MAX; 4]; m * n],
        }
    }

    fn add_edge(&mut self, j: usize, k: usize, dir_j: Dir, dir_k: Dir, orientation: i8, kind: EdgeKind) {
        let id = self.edges.len();
        assert_eq!(self.half_edges[j][dir_j.index()], usize::MAX, "half-edge used twice");
        assert_eq!(self.half_edges[k][dir_k.index()], usize::MAX, "half-edge used twice");
        self.half_edges[j][dir_j.index()] = id;
        self.half_edges[k][dir_k.index()] = id;
        self.edges.push(Edge { j, k, dir_j, dir_k, orientation, kind, interacting: !kind.is_doubled() });
    }

    fn step(&self, from: usize, dir: Dir) -> Step {
        let edge = self.half_edge(from, dir);
        Step { edge, from, to: self.edges[edge].other(from) }
    }

    /// Square with NW corner at (r, c), traversed NW → NE → SE → SW.
    fn add_square(&mut self, r: usize, c: usize) {
        let (m, n) = (self.rows, self.cols);
        let nw = self.vertex(r, c);
        let ne = self.vertex(r, (c + 1) % n);
        let sw = self.vertex((r + 1) % m, c);
        let se = self.vertex((r + 1) % m, (c + 1) % n);
        let cycle = vec![
            self.step(nw, Dir::Right),
            self.step(ne, Dir::Down),
            self.step(se, Dir::Left),
            self.step(sw, Dir::Up),
        ];
        self.plaquettes.push(Plaquette { kind: LoopKind::Square, row: r, col: c, vertices: vec![nw, ne, sw, se], cycle });
    }

    /// Bigon: out along the straight edge from `a`, back along the doubled one.
    #[allow(clippy::too_many_arguments)]
    fn add_bigon(&mut self, kind: LoopKind, row: usize, col: usize, a: usize, b: usize, straight: Dir, doubled: Dir) {
        let cycle = vec![self.step(a, straight), self.step(b, doubled)];
        debug_assert_eq!(cycle[0].to, b);
        debug_assert_eq!(cycle[1].to, a);
        self.plaquettes.push(Plaquette { kind, row, col, vertices: vec![a, b], cycle });
    }

    pub fn n_vertices(&self) -> usize {
        self.rows * self.cols
    }

    /// The straight non-contractible cycles of a torus, one per row and one
    /// per column; empty for planar lattices.
    pub fn homology_cycles(&self) -> Vec<Vec<Step>> {
        if self.topology != Topology::Torus {
            return Vec::new();
        }
        let rows = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.step(self.vertex(r, c), Dir::Right)).collect());
        let cols = (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.step(self.vertex(r, c), Dir::Down)).collect());
        rows.chain(cols).collect()
    }

    pub fn vertex(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v / self.cols, v % self.cols)
    }

    pub fn half_edge(&self, v: usize, dir: Dir) -> usize {
        self.half_edges[v][dir.index()]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.half_edges[v].iter().filter(|&&e| e != usize::MAX).count()
    }

    pub fn straight_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| !self.edges[e].kind.is_doubled())
    }

    pub fn doubled_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].kind.is_doubled())
    }

    pub fn squares(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.plaquettes.len()).filter(|&p| !self.plaquettes[p].is_bigon())
    }

    pub fn bigons(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.plaquettes.len()).filter(|&p| self.plaquettes[p].is_bigon())
    }

    /// Index of the square whose NW corner is (r, c), if present.
    pub fn square_at(&self, r: usize, c: usize) -> Option<usize> {
        self.plaquettes.iter().position(|p| p.kind == LoopKind::Square && p.row == r && p.col == c)
    }

    /// The edge that the doubled edge `e` shadows (same endpoints, straight).
    pub fn straight_partner(&self, e: usize) -> Option<usize> {
        let d = &self.edges[e];
        if !d.kind.is_doubled() {
            return None;
        }
        self.straight_edges().find(|&s| {
            let s = &self.edges[s];
            (s.j == d.j && s.k == d.k) || (s.j == d.k && s.k == d.j)
        })
    }

    /// Plaquettes containing edge `e`.
    pub fn plaquettes_of_edge(&self, e: usize) -> Vec<usize> {
        (0..self.plaquettes.len()).filter(|&p| self.plaquettes[p].edges().any(|x| x == e)).collect()
    }

    /// Plaquette adjacency: two plaquettes are adjacent when they share an
    /// edge.  Returns, for each plaquette, `(neighbour, shared edge)` pairs.
    pub fn plaquette_adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.plaquettes.len()];
        for e in 0..self.edges.len() {
            let ps = self.plaquettes_of_edge(e);
            for &a in &ps {
                for &b in &ps {
                    if a != b {
                        adj[a].push((b, e));
                    }
                }
            }
        }
        adj
    }

    /// Edges on a shortest plaquette-adjacency path from `a` to `b`.
    pub fn dual_path(&self, adj: &[Vec<(usize, usize)>], a: usize, b: usize) -> Option<Vec<usize>> {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.plaquettes.len()];
        let mut seen = vec![false; self.plaquettes.len()];
        let mut queue = VecDeque::from([a]);
        seen[a] = true;
        while let Some(p) = queue.pop_front() {
            if p == b {
                let mut edges = Vec::new();
                let mut cur = b;
                while let Some((from, e)) = prev[cur] {
                    edges.push(e);
                    cur = from;
                }
                edges.reverse();
                return Some(edges);
            }
            for &(q, e) in &adj[p] {
                if !seen[q] {
                    seen[q] = true;
                    prev[q] = Some((p, e));
                    queue.push_back(q);
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("graph serializes")
    }
}
