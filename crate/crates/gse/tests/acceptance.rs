//! End-to-end acceptance checks.  Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use gse::analysis::{self, cost_rows};
use gse::circuit::Connectivity;
use gse::encoding::qubits_of;
use gse::faults::{enumerate_single_faults, is_at_central_evolution, monte_carlo, FaultConfig, MonteCarloConfig, Verdict};
use gse::gadgets::{gadget_inventory, VqeCircuits};
use gse::lattice::EdgeKind;
use gse::{Encoding, InteractionGraph, PauliOp, Topology};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn planar(m: usize, n: usize) -> Encoding {
    Encoding::build(InteractionGraph::build(Topology::PlanarDoubled, m, n).unwrap())
}

fn torus(m: usize, n: usize) -> Encoding {
    Encoding::build(InteractionGraph::build(Topology::Torus, m, n).unwrap())
}

fn operators() -> Outcome {
    let enc = planar(4, 4);
    let g = &enc.graph;
    // The square's sign follows from the edge orientations; its letters are
    // what the construction fixes.
    let centre_op = enc.loop_local(g.square_at(1, 1).unwrap());
    ensure(centre_op.letters() == "IYXZYXZI", format!("interior loop {centre_op}"))?;
    let centre = centre_op.to_string();
    let mut bigons: BTreeSet<String> = g.bigons().map(|p| enc.loop_local(p).to_string()).collect();
    let want: BTreeSet<String> = ["-YXZI", "-IYYX", "-IYXZ", "-XZZI"].iter().map(|s| s.to_string()).collect();
    ensure(bigons == want, format!("bigon loops {bigons:?}"))?;
    bigons.insert(centre);
    Ok(format!("{}", bigons.into_iter().collect::<Vec<_>>().join(" ")))
}

fn algebra() -> Outcome {
    let enc = planar(4, 4);
    let v = enc.check_algebra();
    ensure(v.is_empty(), format!("{} violations, first: {:?}", v.len(), v.first()))?;
    Ok("0 violations".into())
}

fn detection_distance() -> Outcome {
    let mut out = Vec::new();
    for (name, enc) in [("4x4 planar", planar(4, 4)), ("2x2 torus", torus(2, 2)), ("4x4 torus", torus(4, 4))] {
        let r = enc.verify_detection_distance();
        ensure(r.passed(), format!("{name}: {:?}", r.violations))?;
        out.push(format!("{name} {} checked", r.checked));
    }
    ensure(out[0].ends_with(" 96 checked"), "expected 96 weight-1 Paulis on 4x4")?;
    Ok(out.join(", "))
}

fn flagged(enc: &Encoding, err: &PauliOp) -> BTreeSet<usize> {
    let s = enc.syndrome(err).unwrap();
    (0..s.len()).filter(|&i| s[i]).collect()
}

fn syndrome_tables() -> Outcome {
    let enc = planar(4, 4);
    let g = &enc.graph;
    let single = [
        ("XI", [(0, 0), (0, 1)]),
        ("YI", [(0, 0), (1, 0)]),
        ("ZI", [(1, 0), (0, 1)]),
        ("IX", [(1, 0), (1, 1)]),
        ("IY", [(0, 1), (1, 0)]),
        ("IZ", [(0, 1), (1, 1)]),
    ];
    let mut checked = 0;
    for (r, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let v = g.vertex(r, c);
        for (label, offs) in single {
            let err = PauliOp::parse(label).unwrap().embed(enc.n_data(), &qubits_of(&[v]));
            let want: BTreeSet<usize> = offs.iter().map(|&(dr, dc)| g.square_at(r + dr - 1, c + dc - 1).unwrap()).collect();
            ensure(flagged(&enc, &err) == want, format!("{label} on vertex {v}"))?;
            checked += 1;
        }
    }
    let centre = g.square_at(1, 1).unwrap();
    let residues = [
        ("IIIIIIZI", [(1, 2), (2, 1)]),
        ("IIIIIXZI", [(2, 0), (1, 2)]),
        ("IIIIYXZI", [(1, 0), (1, 2)]),
        ("IIIZYXZI", [(1, 0), (0, 2)]),
        ("IIXZYXZI", [(1, 0), (0, 1)]),
    ];
    for (label, squares) in residues {
        let err = PauliOp::parse(label).unwrap().embed(enc.n_data(), &qubits_of(&g.plaquettes[centre].vertices));
        let want: BTreeSet<usize> = squares.iter().map(|&(r, c)| g.square_at(r, c).unwrap()).collect();
        let got = flagged(&enc, &err);
        ensure(got == want && !got.is_empty(), format!("residue {label}"))?;
    }
    Ok(format!("{checked} single-qubit syndromes, 5 ancilla residues"))
}

fn labels(l: &[&str]) -> BTreeSet<String> {
    l.iter().map(|s| s.to_string()).collect()
}

fn logical_tables() -> Outcome {
    let enc = planar(4, 4);
    let g = &enc.graph;
    let horizontal = labels(&["IZXY", "IZYI", "ZXXY", "ZXYI", "ZYII", "IIZY", "ZYZY"]);
    let vertical = labels(&["IXYY", "IXXI", "ZZYY", "ZZXI", "ZYII", "IIZY", "ZYZY"]);
    let side = |k: EdgeKind| match k {
        EdgeKind::DoubledTop => labels(&["YYYY", "YYXI", "XIYY", "XIXI", "YXZI", "YXIY", "XZZI", "XZIY"]),
        EdgeKind::DoubledBottom => labels(&["IXIX", "IXZZ", "ZZIX", "ZZZZ", "IYXZ", "IYYX", "ZIXZ", "ZIYX"]),
        EdgeKind::DoubledLeft => labels(&["XYXY", "XYYI", "YIXY", "YIYI", "XZZI", "XZIY", "YXZI", "YXIY"]),
        _ => labels(&["IZIZ", "IZZX", "ZXIZ", "ZXZX", "IYYX", "IYXZ", "ZIYX", "ZIXZ"]),
    };
    let (mut single, mut doubled) = (0, 0);
    for e in g.straight_edges() {
        let edge = &g.edges[e];
        let mut want = if edge.kind == EdgeKind::Horizontal { horizontal.clone() } else { vertical.clone() };
        if let Some(d) = g.doubled_edges().find(|&d| g.straight_partner(d) == Some(e)) {
            want.extend(side(g.edges[d].kind));
        }
        let found: BTreeSet<String> =
            enc.two_vertex_centralizer(edge.j.min(edge.k), edge.j.max(edge.k)).iter().map(|p| p.letters()).collect();
        ensure(found == want, format!("edge {e}: {} found vs {} expected", found.len(), want.len()))?;
        match found.len() {
            7 => single += 1,
            15 => doubled += 1,
            n => return Err(format!("edge {e}: {n} logicals")),
        }
    }
    Ok(format!("{single} single edges x 7, {doubled} doubled edges x 15"))
}

fn gadget_exhaustion() -> Outcome {
    let enc = planar(4, 4);
    let mut total = (0, 0, 0);
    for conn in [Connectivity::Full, Connectivity::Reduced] {
        let cfg = FaultConfig { swap_faults: conn == Connectivity::Reduced, ..FaultConfig::default() };
        for c in gadget_inventory(&enc, true, conn).map_err(|e| e.to_string())? {
            let s = enumerate_single_faults(&c, &enc, &cfg).summary;
            ensure(s.undetectable_logical == 0, format!("{conn:?} {}: {} undetectable", c.name, s.undetectable_logical))?;
            total.0 += 1;
            total.1 += s.total;
        }
    }
    let composite = VqeCircuits::build(&enc, true, Connectivity::Reduced).map_err(|e| e.to_string())?.error_detected();
    let s = enumerate_single_faults(&composite, &enc, &FaultConfig { swap_faults: true, ..FaultConfig::default() }).summary;
    ensure(s.undetectable_logical == 0, format!("error-detected circuit: {} undetectable", s.undetectable_logical))?;
    total.2 = s.total;
    Ok(format!("{} gadgets, {} faults, 0 undetectable; whole circuit {} faults, 0 undetectable", total.0, total.1, total.2))
}

fn negative_control() -> Outcome {
    let enc = planar(4, 4);
    let (mut exceptions, mut gadgets_with) = (0, 0);
    for conn in [Connectivity::Full, Connectivity::Reduced] {
        let cfg = FaultConfig { swap_faults: conn == Connectivity::Reduced, ..FaultConfig::default() };
        for c in gadget_inventory(&enc, false, conn).map_err(|e| e.to_string())? {
            let r = enumerate_single_faults(&c, &enc, &cfg);
            ensure(r.summary.undetectable_logical == 0, format!("{conn:?} {}: undetectable", c.name))?;
            let here: Vec<_> = r.outcomes.iter().filter(|o| o.verdict == Verdict::EvolvedOperatorException).collect();
            for o in &here {
                ensure(is_at_central_evolution(&c, &o.event), format!("{conn:?} {}: exception at gate {}", c.name, o.event.gate))?;
            }
            let is_evolution = c.central.is_some();
            let is_multi_qubit = is_evolution && c.gates.iter().filter(|g| g.is_two_qubit()).count() > 0;
            ensure(here.is_empty() || is_evolution, format!("{}: exception outside an evolution", c.name))?;
            if is_multi_qubit && here.is_empty() {
                return Err(format!("{conn:?} {}: no exception at the central evolve", c.name));
            }
            exceptions += here.len();
            gadgets_with += usize::from(!here.is_empty());
        }
    }
    ensure(exceptions > 0, "no exceptions observed")?;
    Ok(format!("{exceptions} exceptions in {gadgets_with} evolution gadgets, all at the central evolve"))
}

fn cost_table() -> Outcome {
    let rows = cost_rows().map_err(|e| e.to_string())?;
    let zero: Vec<_> = rows.iter().map(|r| r.zero_state_gates).collect();
    ensure(zero == [170, 650, 2570], format!("zero-state gates {zero:?}"))?;
    for r in &rows {
        ensure(r.zero_state_depth == 10, format!("zero-state depth {}", r.zero_state_depth))?;
        ensure(
            r.error_detected_gates - r.vqe_gates == r.zero_state_gates + 4 * r.m * r.n,
            format!("{}x{}: error-detected minus VQE", r.m, r.n),
        )?;
    }
    let published = [(1144, 2458, 2692), (5200, 11050, 11956), (22048, 46666, 50260)];
    for (r, (a, v, e)) in rows.iter().zip(published) {
        ensure((r.ansatz_gates, r.vqe_gates, r.error_detected_gates) == (a, v, e), format!("{}x{} gate columns", r.m, r.n))?;
        ensure((r.ansatz_depth, r.vqe_depth, r.error_detected_depth) == (67, 144, 158), format!("{}x{} depth columns", r.m, r.n))?;
    }
    let report: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{}x{} ansatz {} (formulas {} / {}, constructed {}), zero-state constructed {} gates",
                r.m, r.n, r.ansatz_gates, r.ansatz_gates_text, r.ansatz_gates_text_simplified, r.ansatz_gates_constructed,
                r.zero_state_gates_constructed
            )
        })
        .collect();
    Ok(format!(
        "{}; zero-state depth 10 vs claimed at most 8 (two-qubit depth {})",
        report.join("; "),
        rows[0].zero_state_two_qubit_depth
    ))
}

fn within(x: f64, want: f64) -> bool {
    (x - want).abs() <= 1.0e-6 + 1e-12
}

fn threshold_tables() -> Outcome {
    let rows = cost_rows().map_err(|e| e.to_string())?;
    let success = [
        [0.999544, 0.106224, 0.952029, 0.046584, 0.993882],
        [0.999891, 0.089902, 0.801716, 0.173999, 0.953170],
        [0.999974, 0.088331, 0.393244, 0.341570, 0.555822],
    ];
    let optimistic = [
        ((47, 48), [0.991762, 0.106224, 0.999760, 0.274634]),
        ((191, 192), [0.997103, 0.089902, 0.999899, 0.089346]),
        ((767, 768), [0.999076, 0.088331, 0.999963, 0.024251]),
    ];
    let budgets: [[u64; 4]; 3] =
        [[192, 1934, 19355, 193559], [261, 2627, 26286, 262873], [330, 3320, 33217, 332187]];
    let mut n = 0;
    for (i, r) in rows.iter().enumerate() {
        let t = analysis::threshold_row(r, 0.99999).map_err(|e| e.to_string())?;
        let got = [t.threshold_s, t.threshold_p_g, t.p_g, t.p_d, t.p_g_ed];
        for (g, w) in got.iter().zip(success[i]) {
            ensure(within(*g, w), format!("{}x{} success table: {g:.6} vs {w}", r.m, r.n))?;
            n += 1;
        }
        let o = analysis::optimistic_row(r, 0.95).map_err(|e| e.to_string())?;
        ensure(o.p_a == optimistic[i].0, format!("p_a {:?}", o.p_a))?;
        let got = [o.threshold_s, o.threshold_p_g, o.required_s, o.required_p_g];
        for (g, w) in got.iter().zip(optimistic[i].1) {
            ensure(within(*g, w), format!("{}x{} optimistic table: {g:.6} vs {w}", r.m, r.n))?;
            n += 1;
        }
        let b: Vec<u64> = analysis::budget_rows(r).map_err(|e| e.to_string())?.iter().map(|b| b.d_b).collect();
        ensure(b == budgets[i], format!("{}x{} budgets {b:?}", r.m, r.n))?;
        n += 4;
    }
    Ok(format!("{n} values within one unit in the last digit"))
}

fn monte_carlo_consistency() -> Outcome {
    let enc = planar(4, 4);
    let c = VqeCircuits::build(&enc, true, Connectivity::Reduced).map_err(|e| e.to_string())?.error_detected();
    let s = 0.99999;
    let trials = 200_000;
    let stats = monte_carlo(&c, &enc, &MonteCarloConfig { p: 1.0 - s, trials, seed: 7, count_b_flips: true })
        .map_err(|e| e.to_string())?;
    let gates = c.two_qubit_gate_count();
    let expect = s.powi(2 * gates as i32);
    let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
    let dev = (stats.p_fault_free.value - expect) / sigma;
    ensure(dev.abs() <= 3.0, format!("fault-free {:.6} vs {expect:.6} ({dev:+.2} sigma)", stats.p_fault_free.value))?;
    let effective = stats.p_detected_given_effective.value;
    let raw = stats.p_detected_given_faulty.value;
    ensure(effective >= 0.9, format!("detected among effective faults {effective:.4} < 0.9"))?;
    Ok(format!(
        "c={gates}, fault-free {:.6} vs s^(2c)={expect:.6} ({dev:+.2} sigma); detected|effective {effective:.4}, detected|any fault {raw:.4} (p_a estimate 47/48)",
        stats.p_fault_free.value
    ))
}

fn sign_fixing() -> Outcome {
    let enc = planar(4, 4);
    let base: Vec<i8> = enc.stabilizers.iter().map(|s| s.sign().unwrap()).collect();
    let n = base.len();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for t in 0..100 {
        let k = 2 * rng.gen_range(0..=n / 2);
        let defects = sample(&mut rng, n, k).into_vec();
        let fixed = enc.fix_signs(&defects).map_err(|e| e.to_string())?;
        for p in 0..n {
            let flipped = fixed.stabilizers[p].sign().unwrap() != base[p];
            ensure(flipped == defects.contains(&p), format!("trial {t}: loop {p}"))?;
        }
    }
    Ok("100 random even defect sets".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 11] = [
        ("operator construction", operators, 1),
        ("algebra conformance", algebra, 5),
        ("detection distance", detection_distance, 5),
        ("syndrome tables", syndrome_tables, 1),
        ("logical tables", logical_tables, 1),
        ("gadget fault exhaustion", gadget_exhaustion, 60),
        ("negative control", negative_control, 60),
        ("cost table", cost_table, 5),
        ("threshold tables", threshold_tables, 1),
        ("monte carlo consistency", monte_carlo_consistency, 300),
        ("sign fixing", sign_fixing, 5),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = match result {
            Ok(msg) if took > Duration::from_secs(*limit) => Err(format!("{msg} (took {took:.2?}, limit {limit}s)")),
            other => other,
        };
        match result {
            Ok(msg) => println!("PASS {:>2} {name} [{took:.2?}]: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{took:.2?}]: {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
