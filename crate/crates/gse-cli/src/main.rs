use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gse::analysis::{self, Table};
use gse::circuit::{Connectivity, SwapAccounting};
use gse::faults::{enumerate_single_faults, is_at_central_evolution, monte_carlo, FaultConfig, MonteCarloConfig, Verdict};
use gse::gadgets::{gadget_inventory, VqeCircuits};
use gse::{Encoding, GseError, InteractionGraph, Topology};

#[derive(Parser, Debug)]
#[command(name = "gse", version, about = "Error-detecting GSE encoding of the spinless Fermi-Hubbard model")]
struct Cli {
    /// key=value file with default option values (command-line flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// How swaps are charged in resource counts.
    #[arg(long, global = true, value_enum, default_value_t = SwapCost::Unit)]
    swap_accounting: SwapCost,
    /// Write outputs to files in this directory instead of stdout.
    #[arg(long, global = true, env = "GSE_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump the vertex, edge and loop operators.
    Encode(LatticeArgs),
    /// Check detection distance and exhaustively analyse every gadget.
    Verify(VerifyArgs),
    /// Emit the resource and threshold tables.
    Tables(TablesArgs),
    /// Sample the error-detected VQE circuit under depolarizing noise.
    Montecarlo(MonteCarloArgs),
}

#[derive(Args, Debug, Clone)]
struct LatticeArgs {
    #[arg(long, default_value_t = 4)]
    rows: usize,
    #[arg(long, default_value_t = 4)]
    cols: usize,
    #[arg(long, value_enum, default_value_t = TopologyArg::Planar)]
    topology: TopologyArg,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    #[arg(long, value_enum, default_value_t = ConnectivityArg::Reduced)]
    connectivity: ConnectivityArg,
    /// Use single-qubit central evolutions instead of native two-qubit ones.
    #[arg(long)]
    no_native: bool,
    /// Also write every fault outcome as JSON lines to this file.
    #[arg(long)]
    faults_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TablesArgs {
    #[arg(long, value_enum, default_value_t = Which::All)]
    which: Which,
    /// Per-qubit-gate success probability for the success table.
    #[arg(long, default_value_t = 0.99999)]
    s: f64,
    /// Target accepted-run accuracy for the optimistic table.
    #[arg(long, default_value_t = 0.95)]
    target: f64,
}

#[derive(Args, Debug)]
struct MonteCarloArgs {
    #[command(flatten)]
    lattice: LatticeArgs,
    #[arg(long, value_enum, default_value_t = ConnectivityArg::Reduced)]
    connectivity: ConnectivityArg,
    #[arg(long)]
    no_native: bool,
    /// Per-qubit-gate success probability.
    #[arg(long, default_value_t = 0.99999)]
    s: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Do not count flipped B_j outcomes as detections.
    #[arg(long)]
    ignore_b_flips: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
    Markdown,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SwapCost {
    Unit,
    Expanded,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TopologyArg {
    Planar,
    Torus,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ConnectivityArg {
    Full,
    Reduced,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Which {
    Cost,
    Thresholds,
    Optimistic,
    Budget,
    All,
}

impl From<ConnectivityArg> for Connectivity {
    fn from(c: ConnectivityArg) -> Self {
        match c {
            ConnectivityArg::Full => Connectivity::Full,
            ConnectivityArg::Reduced => Connectivity::Reduced,
        }
    }
}

impl From<SwapCost> for SwapAccounting {
    fn from(c: SwapCost) -> Self {
        match c {
            SwapCost::Unit => SwapAccounting::Unit,
            SwapCost::Expanded => SwapAccounting::Expanded,
        }
    }
}

/// Failures mapped to exit codes: 1 for a failed verification, 2 for bad input.
enum Failure {
    Verification(String),
    Usage(String),
}

impl From<GseError> for Failure {
    fn from(e: GseError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Reads `key = value` lines (`#` starts a comment).
fn read_config(path: &PathBuf) -> Result<BTreeMap<String, String>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

/// Appends config-file options that were not given on the command line.
fn merge_config(mut argv: Vec<String>) -> Result<Vec<String>, Failure> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let path = match argv[pos].split_once('=') {
        Some((_, p)) => PathBuf::from(p),
        None => PathBuf::from(argv.get(pos + 1).ok_or_else(|| Failure::Usage("--config needs a path".into()))?),
    };
    let given: Vec<String> = argv
        .iter()
        .filter_map(|a| a.strip_prefix("--").map(|k| k.split('=').next().unwrap().to_string()))
        .collect();
    for (k, v) in read_config(&path)? {
        if given.contains(&k) {
            continue;
        }
        match v.as_str() {
            "true" => argv.push(format!("--{k}")),
            "false" => {}
            _ => {
                argv.push(format!("--{k}"));
                argv.push(v);
            }
        }
    }
    Ok(argv)
}

fn lattice(args: &LatticeArgs) -> Result<Encoding, Failure> {
    let topology = match args.topology {
        TopologyArg::Planar => Topology::PlanarDoubled,
        TopologyArg::Torus => Topology::Torus,
    };
    Ok(Encoding::build(InteractionGraph::build(topology, args.rows, args.cols)?))
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn emit(&self, name: &str, ext: &str, content: &str) -> Result<(), Failure> {
        match &self.dir {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!("{name}.{ext}"));
                std::fs::write(&path, content)?;
                eprintln!("wrote {}", path.display());
            }
            None => print!("{content}"),
        }
        Ok(())
    }
}

fn ext(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
        Format::Markdown => "md",
    }
}

fn cmd_encode(cli: &Cli, args: &LatticeArgs, out: &Output) -> Result<(), Failure> {
    let enc = lattice(args)?;
    let g = &enc.graph;
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&enc.to_json()).unwrap() + "\n",
        Format::Csv | Format::Markdown => {
            let mut rows = Vec::new();
            for v in 0..g.n_vertices() {
                rows.push(vec!["B".to_string(), v.to_string(), enc.local(&enc.vertex_ops[v], &[v]).to_string()]);
            }
            for (e, edge) in g.edges.iter().enumerate() {
                rows.push(vec!["A".into(), format!("{} {}", edge.j, edge.k), enc.edge_local(e).to_string()]);
            }
            for p in 0..g.plaquettes.len() {
                let vs: Vec<String> = g.plaquettes[p].vertices.iter().map(|v| v.to_string()).collect();
                rows.push(vec!["loop".into(), vs.join(" "), enc.loop_local(p).to_string()]);
            }
            let table = Table {
                title: "operators".into(),
                header: vec!["kind".into(), "vertices".into(), "operator".into()],
                rows,
            };
            if cli.format == Format::Csv {
                table.to_csv()
            } else {
                table.to_markdown()
            }
        }
    };
    out.emit("encoding", ext(cli.format), &text)
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs, out: &Output) -> Result<(), Failure> {
    let enc = lattice(&args.lattice)?;
    let conn: Connectivity = args.connectivity.into();
    let native = !args.no_native;
    let distance = enc.verify_detection_distance();
    let algebra = enc.check_algebra();
    let cfg = FaultConfig { swap_faults: conn == Connectivity::Reduced, ..FaultConfig::default() };

    let mut gadgets = Vec::new();
    let mut exceptions = Vec::new();
    let mut lines = String::new();
    let mut undetectable = 0;
    let mut misplaced_exceptions = 0;
    let circuits = gadget_inventory(&enc, native, conn)?;
    // The whole error-detected algorithm is only checked with native
    // evolutions: without them every central-evolution fault is expected to
    // survive to the end, which is what the per-gadget exceptions report.
    let composite = if native { Some(VqeCircuits::build(&enc, native, conn)?.error_detected()) } else { None };
    for c in circuits.iter().chain(composite.as_ref()) {
        let report = enumerate_single_faults(c, &enc, &cfg);
        undetectable += report.summary.undetectable_logical;
        for o in &report.outcomes {
            if o.verdict == Verdict::EvolvedOperatorException {
                let central = is_at_central_evolution(c, &o.event);
                misplaced_exceptions += usize::from(!central);
                exceptions.push(json!({ "gadget": c.name, "event": o.event, "at_central_evolution": central }));
            }
        }
        if args.faults_out.is_some() {
            for o in &report.outcomes {
                let mut v = serde_json::to_value(o).unwrap();
                v["gadget"] = json!(c.name);
                let _ = writeln!(lines, "{v}");
            }
        }
        let res = c.count_resources(cli.swap_accounting.into());
        gadgets.push(json!({ "gadget": c.name, "summary": report.summary, "resources": res }));
    }
    if let Some(path) = &args.faults_out {
        std::fs::write(path, lines)?;
    }
    let passed = distance.passed() && algebra.is_empty() && undetectable == 0 && misplaced_exceptions == 0;
    let report = json!({
        "rows": args.lattice.rows,
        "cols": args.lattice.cols,
        "topology": format!("{:?}", enc.graph.topology),
        "connectivity": format!("{conn:?}"),
        "native": native,
        "detection_distance": { "checked": distance.checked, "violations": distance.violations.len() },
        "algebra_violations": algebra,
        "gadgets": gadgets,
        "undetectable_logical": undetectable,
        "evolved_operator_exceptions": exceptions,
        "verdict": if !passed { "FAIL" } else if exceptions.is_empty() { "PASS" } else { "PASS-with-exceptions" },
    });
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).unwrap() + "\n",
        _ => {
            let table = Table {
                title: "verification".into(),
                header: ["gadget", "total", "detected", "detectable_later", "benign", "exceptions", "undetectable"]
                    .map(String::from)
                    .to_vec(),
                rows: gadgets
                    .iter()
                    .map(|g| {
                        let s = &g["summary"];
                        let mut row = vec![g["gadget"].as_str().unwrap().to_string()];
                        for k in ["total", "detected_by_measurement", "detectable_later", "benign", "evolved_operator_exception", "undetectable_logical"] {
                            row.push(s[k].to_string());
                        }
                        row
                    })
                    .collect(),
            };
            if cli.format == Format::Csv {
                table.to_csv()
            } else {
                table.to_markdown()
            }
        }
    };
    out.emit("verify", ext(cli.format), &text)?;
    eprintln!("{}", report["verdict"].as_str().unwrap());
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{undetectable} undetectable logical faults, {misplaced_exceptions} misplaced exceptions, {} weight-1 misses, {} algebra violations",
            distance.violations.len(),
            algebra.len()
        )))
    }
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Markdown => format!("### {}\n\n{}", table.title, table.to_markdown()),
        Format::Json => serde_json::to_string_pretty(&table.to_json()).unwrap() + "\n",
    }
}

fn cmd_tables(cli: &Cli, args: &TablesArgs, out: &Output) -> Result<(), Failure> {
    let rows = analysis::cost_rows()?;
    let mut tables = Vec::new();
    let all = args.which == Which::All;
    if all || args.which == Which::Cost {
        tables.push(("cost", analysis::cost_table_view(&rows)));
    }
    if all || args.which == Which::Thresholds {
        tables.push(("thresholds", analysis::threshold_table(&rows, args.s)?));
    }
    if all || args.which == Which::Optimistic {
        tables.push(("optimistic", analysis::optimistic_table(&rows, args.target)?));
    }
    if all || args.which == Which::Budget {
        tables.push(("budget", analysis::budget_table(&rows)?));
    }
    for (i, (name, table)) in tables.iter().enumerate() {
        if i > 0 && out.dir.is_none() {
            println!();
        }
        out.emit(name, ext(cli.format), &render(table, cli.format))?;
    }
    Ok(())
}

fn cmd_montecarlo(cli: &Cli, args: &MonteCarloArgs, out: &Output) -> Result<(), Failure> {
    if !(args.s > 0.0 && args.s <= 1.0) {
        return Err(Failure::Usage(format!("--s must lie in (0, 1], got {}", args.s)));
    }
    let enc = lattice(&args.lattice)?;
    let circuits = VqeCircuits::build(&enc, !args.no_native, args.connectivity.into())?;
    let circuit = circuits.error_detected();
    let cfg = MonteCarloConfig { p: 1.0 - args.s, trials: args.trials, seed: args.seed, count_b_flips: !args.ignore_b_flips };
    let stats = monte_carlo(&circuit, &enc, &cfg)?;
    let gates = circuit.two_qubit_gate_count();
    let expected = analysis::p_g(gates as f64, args.s);
    let report = json!({
        "rows": args.lattice.rows,
        "cols": args.lattice.cols,
        "s": args.s,
        "trials": args.trials,
        "seed": args.seed,
        "two_qubit_gates": gates,
        "expected_fault_free": expected,
        "p_a_estimate": analysis::p_a_estimate(args.lattice.rows),
        "stats": stats,
    });
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).unwrap() + "\n",
        _ => {
            let e = |x: &gse::faults::Estimate| vec![format!("{:.6}", x.value), format!("{:.6}", x.half_width)];
            let mut rows = Vec::new();
            for (name, est) in [
                ("fault_free", &stats.p_fault_free),
                ("detected", &stats.p_detected),
                ("accepted_correct", &stats.p_accepted_correct),
                ("accepted_wrong", &stats.p_accepted_wrong),
                ("detected_given_faulty", &stats.p_detected_given_faulty),
                ("detected_given_effective", &stats.p_detected_given_effective),
            ] {
                let mut row = vec![name.to_string()];
                row.extend(e(est));
                rows.push(row);
            }
            rows.push(vec!["expected_fault_free".into(), format!("{expected:.6}"), String::new()]);
            let table = Table {
                title: "Monte Carlo".into(),
                header: vec!["quantity".into(), "estimate".into(), "half_width_95".into()],
                rows,
            };
            render(&table, cli.format)
        }
    };
    out.emit("montecarlo", ext(cli.format), &text)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let out = Output { dir: cli.out_dir.clone() };
    match &cli.command {
        Command::Encode(a) => cmd_encode(cli, a, &out),
        Command::Verify(a) => cmd_verify(cli, a, &out),
        Command::Tables(a) => cmd_tables(cli, a, &out),
        Command::Montecarlo(a) => cmd_montecarlo(cli, a, &out),
    }
}

fn main() -> ExitCode {
    let argv = match merge_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(Failure::Usage(m) | Failure::Verification(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(argv);
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
