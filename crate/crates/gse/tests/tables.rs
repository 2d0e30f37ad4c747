//! Syndrome and two-vertex logical tables on the 4×4 planar lattice, checked
//! against hand-written expectations.

use std::collections::BTreeSet;

use gse::encoding::qubits_of;
use gse::lattice::EdgeKind;
use gse::{Encoding, InteractionGraph, PauliClass, PauliOp, Topology};

fn planar44() -> Encoding {
    Encoding::build(InteractionGraph::build(Topology::PlanarDoubled, 4, 4).unwrap())
}

fn flagged(enc: &Encoding, err: &PauliOp) -> BTreeSet<usize> {
    let s = enc.syndrome(err).unwrap();
    (0..s.len()).filter(|&i| s[i]).collect()
}

/// For an interior vertex the four incident squares, seen from the vertex,
/// sit NW, NE, SW and SE of it.  Each single-qubit error lights exactly two.
#[test]
fn single_qubit_syndromes_follow_corner_pattern() {
    let enc = planar44();
    let g = &enc.graph;
    let expected = [
        ("XI", ["NW", "NE"]),
        ("YI", ["NW", "SW"]),
        ("ZI", ["SW", "NE"]),
        ("IX", ["SW", "SE"]),
        ("IY", ["NE", "SW"]),
        ("IZ", ["NE", "SE"]),
    ];
    for (r, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let v = g.vertex(r, c);
        let around = |name: &str| match name {
            "NW" => g.square_at(r - 1, c - 1).unwrap(),
            "NE" => g.square_at(r - 1, c).unwrap(),
            "SW" => g.square_at(r, c - 1).unwrap(),
            _ => g.square_at(r, c).unwrap(),
        };
        for (label, corners) in expected {
            let err = PauliOp::parse(label).unwrap().embed(enc.n_data(), &qubits_of(&[v]));
            let want: BTreeSet<usize> = corners.iter().map(|n| around(n)).collect();
            assert_eq!(flagged(&enc, &err), want, "{label} on vertex {v}");
        }
    }
}

/// The five partial loops left behind by an ancilla Z fault in the middle of
/// the interior loop measurement, with the squares (row, col) they light.
#[test]
fn ancilla_fault_residues_are_detected() {
    let enc = planar44();
    let g = &enc.graph;
    let centre = g.square_at(1, 1).unwrap();
    let vertices = &g.plaquettes[centre].vertices;
    let expected: [(&str, [(usize, usize); 2]); 5] = [
        ("IIIIIIZI", [(1, 2), (2, 1)]),
        ("IIIIIXZI", [(2, 0), (1, 2)]),
        ("IIIIYXZI", [(1, 0), (1, 2)]),
        ("IIIZYXZI", [(1, 0), (0, 2)]),
        ("IIXZYXZI", [(1, 0), (0, 1)]),
    ];
    for (label, squares) in expected {
        let err = PauliOp::parse(label).unwrap().embed(enc.n_data(), &qubits_of(vertices));
        let want: BTreeSet<usize> = squares.iter().map(|&(r, c)| g.square_at(r, c).unwrap()).collect();
        assert_eq!(flagged(&enc, &err), want, "{label}");
        assert_eq!(enc.classify(&err), PauliClass::Detectable);
    }
}

fn set(labels: &[&str]) -> BTreeSet<String> {
    labels.iter().map(|s| s.to_string()).collect()
}

const HORIZONTAL: [&str; 7] = ["IZXY", "IZYI", "ZXXY", "ZXYI", "ZYII", "IIZY", "ZYZY"];
const VERTICAL: [&str; 7] = ["IXYY", "IXXI", "ZZYY", "ZZXI", "ZYII", "IIZY", "ZYZY"];
const TOP: [&str; 8] = ["YYYY", "YYXI", "XIYY", "XIXI", "YXZI", "YXIY", "XZZI", "XZIY"];
const BOTTOM: [&str; 8] = ["IXIX", "IXZZ", "ZZIX", "ZZZZ", "IYXZ", "IYYX", "ZIXZ", "ZIYX"];
const LEFT: [&str; 8] = ["XYXY", "XYYI", "YIXY", "YIYI", "XZZI", "XZIY", "YXZI", "YXIY"];
const RIGHT: [&str; 8] = ["IZIZ", "IZZX", "ZXIZ", "ZXZX", "IYYX", "IYXZ", "ZIYX", "ZIXZ"];

/// Expected two-vertex logical labels (left/top vertex first) for straight edge `e`.
fn expected_logicals(enc: &Encoding, e: usize) -> BTreeSet<String> {
    let g = &enc.graph;
    let mut want = match g.edges[e].kind {
        EdgeKind::Horizontal => set(&HORIZONTAL),
        _ => set(&VERTICAL),
    };
    let twin = g.doubled_edges().find(|&d| g.straight_partner(d) == Some(e));
    if let Some(d) = twin {
        let extra: &[&str] = match g.edges[d].kind {
            EdgeKind::DoubledTop => &TOP,
            EdgeKind::DoubledBottom => &BOTTOM,
            EdgeKind::DoubledLeft => &LEFT,
            _ => &RIGHT,
        };
        want.extend(set(extra));
    }
    want
}

#[test]
fn two_vertex_logicals_match_tables() {
    let enc = planar44();
    let g = &enc.graph;
    let (mut single, mut doubled) = (0, 0);
    for e in g.straight_edges() {
        let edge = &g.edges[e];
        let (a, b) = if edge.j < edge.k { (edge.j, edge.k) } else { (edge.k, edge.j) };
        let found: BTreeSet<String> = enc.two_vertex_centralizer(a, b).iter().map(|p| p.letters()).collect();
        let want = expected_logicals(&enc, e);
        assert_eq!(found, want, "edge {e} ({a},{b})");
        match want.len() {
            7 => single += 1,
            15 => doubled += 1,
            n => panic!("unexpected table size {n}"),
        }
    }
    assert_eq!((single, doubled), (16, 8));
}

/// The named products reproduce the same labels as the brute-force search.
#[test]
fn named_products_cover_the_centralizer() {
    let enc = planar44();
    let g = &enc.graph;
    for e in g.straight_edges() {
        let named: BTreeSet<String> = enc.enumerate_two_vertex_logicals(e).iter().map(|(_, p)| p.letters()).collect();
        assert_eq!(named, expected_logicals(&enc, e), "edge {e}");
    }
}

/// `XIXI` is a logical error on a doubled top edge and nowhere else.
#[test]
fn xixi_is_logical_only_on_top_edges() {
    let enc = planar44();
    let g = &enc.graph;
    for e in g.straight_edges() {
        let edge = &g.edges[e];
        let (a, b) = (edge.j.min(edge.k), edge.j.max(edge.k));
        let err = PauliOp::parse("XIXI").unwrap().embed(enc.n_data(), &qubits_of(&[a, b]));
        let on_top = g.doubled_edges().any(|d| g.straight_partner(d) == Some(e) && g.edges[d].kind == EdgeKind::DoubledTop);
        assert_eq!(enc.classify(&err) != PauliClass::Detectable, on_top, "edge {e}");
    }
}
