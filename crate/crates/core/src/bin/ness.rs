//! `ness`: steady states, cycle decompositions and cycle graphs of finite
//! Markov processes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ness_core::cycles::{cycle_counts, Cycle, CycleCatalog};
use ness_core::decomposition::{
    db_current_split, decompose, enumerate_decompositions, sample_decompositions,
    CycleDecomposition, DEFAULT_MAX_ORDERINGS,
};
use ness_core::markov::{MarkovProcess, ProbabilityDistribution};
use ness_core::observables::{
    entropy_production, entropy_production_cycles, thermo_quantities, EvaluationPoint,
};
use ness_core::report::{decomposition_formula, decomposition_table, num, table, RunReport};
use ness_core::simulator::{estimate_fluxes, project_kirchhoff, simulate, StopRule};
use ness_core::tasep::{
    build_tasep, detect_kink, log_spaced, sweep_csv, tasep_sweep, Gait, TasepConfig,
};
use ness_core::transform::CycleGraph;
use ness_core::NessError;

#[derive(Parser)]
#[command(
    name = "ness",
    version,
    about = "Cycle decompositions of non-equilibrium steady states"
)]
struct Cli {
    /// Worker threads for parallel operations (default: all cores).
    #[arg(long, global = true, env = "NESS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady state, fluxes and balance checks.
    Steady(ModelArgs),
    /// Decompose the steady-state flux field into weighted cycles.
    Decompose(DecomposeArgs),
    /// Build the cycle graph and its potential.
    Transform(TransformArgs),
    /// Edge currents, affinities, voltages, emfs, resistances and entropy production.
    Thermo(ThermoArgs),
    /// Gillespie simulation with empirical flux estimates.
    Simulate(SimulateArgs),
    /// Pinned-gait decompositions of the 2-particle ring over a range of x.
    TasepSweep(SweepArgs),
    /// Write the 2-particle ring with boundary rate x as a model file.
    TasepModel(TasepModelArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// JSON model file.
    model: PathBuf,
    /// Write a JSON run report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderingMode {
    /// Catalog order: by length, then lexicographically.
    Default,
    /// Cycles listed in --ordering-file first, the rest in catalog order.
    File,
    /// Every ordering; reports the distinct decompositions.
    All,
    /// Random orderings drawn with --seed.
    Sample,
}

#[derive(Args)]
struct OrderingArgs {
    #[arg(long, value_enum, default_value = "default")]
    ordering: OrderingMode,
    /// JSON array of 1-based cycles, e.g. [[1,3,6,4],[1,2,6,5]].
    #[arg(long)]
    ordering_file: Option<PathBuf>,
    /// Divide reported weights by this factor (extra column).
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    ordering: OrderingArgs,
    /// Process all 2-cycles first and report detailed-balance and current parts.
    #[arg(long)]
    split_2cycles: bool,
    /// Cap on the number of orderings for --ordering all.
    #[arg(long, default_value_t = DEFAULT_MAX_ORDERINGS)]
    max_orderings: usize,
    /// Number of random orderings for --ordering sample.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    ordering: OrderingArgs,
}

#[derive(Args)]
struct ThermoArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Write the edge table as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also compute entropy production (needs every transition to be reversible).
    #[arg(long)]
    entropy: bool,
    /// Evaluate entropy production at this distribution instead of the steady
    /// state (comma-separated probabilities).
    #[arg(long, value_delimiter = ',')]
    at: Option<Vec<f64>>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    seed: u64,
    /// Stop after this many events.
    #[arg(long, conflicts_with = "t_max")]
    events: Option<usize>,
    /// Stop at this time.
    #[arg(long)]
    t_max: Option<f64>,
    /// Initial state (1-based).
    #[arg(long, default_value_t = 1)]
    initial: usize,
    /// Batches for the batch-means error estimate.
    #[arg(long, default_value_t = 20)]
    batches: usize,
    /// Project the empirical fluxes onto the node condition before export.
    #[arg(long)]
    project: bool,
    /// Write the flux estimate as a flux JSON file.
    #[arg(long)]
    fluxes_out: Option<PathBuf>,
    /// Write the trajectory as CSV (time,from,to).
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.1)]
    x_min: f64,
    #[arg(long, default_value_t = 10.0)]
    x_max: f64,
    #[arg(long, default_value_t = 41)]
    points: usize,
    /// Gait processed first: alpha, beta, gamma, delta or a 1-based cycle like 1,3,6,4.
    #[arg(long, default_value = "alpha")]
    pin: String,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also report the one-sided slopes of the pinned weight at x = 1.
    #[arg(long)]
    kink: bool,
}

#[derive(Args)]
struct TasepModelArgs {
    #[arg(long)]
    x: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("warning: could not configure thread pool: {e}");
        }
    }
    let argv: Vec<String> = std::env::args().collect();
    let result = match cli.command {
        Command::Steady(a) => cmd_steady(&a, argv),
        Command::Decompose(a) => cmd_decompose(&a, argv),
        Command::Transform(a) => cmd_transform(&a, argv),
        Command::Thermo(a) => cmd_thermo(&a, argv),
        Command::Simulate(a) => cmd_simulate(&a, argv),
        Command::TasepSweep(a) => cmd_sweep(&a),
        Command::TasepModel(a) => cmd_tasep_model(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_error(&e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn report_error(e: &NessError) {
    match e {
        NessError::InvalidProcess(v) => {
            eprintln!("error: invalid process");
            for m in v {
                eprintln!("  - {m}");
            }
        }
        NessError::TooManyOrderings { .. } => {
            eprintln!("error: {e}");
            eprintln!("hint: rerun with --ordering sample --samples N --seed S");
        }
        NessError::CycleExplosion { .. } => {
            eprintln!("error: {e}");
            eprintln!("hint: the graph has too many simple cycles for exhaustive treatment");
        }
        NessError::DivergentEntropy { .. } => {
            eprintln!("error: {e}");
            eprintln!(
                "the affinity ln(φ_ij/φ_ji) is infinite on a one-way transition, so entropy \
                 production is undefined; currents and edge quantities above remain valid"
            );
        }
        _ => eprintln!("error: {e}"),
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, NessError> {
    fs::read(path)
        .map_err(|e| NessError::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, text: &str) -> Result<(), NessError> {
    fs::write(path, text)
        .map_err(|e| NessError::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

/// Reads, parses and validates a model file.
fn load(args: &ModelArgs) -> Result<(MarkovProcess, Vec<u8>), NessError> {
    let bytes = read_input(&args.model)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|e| NessError::Parse(format!("input is not UTF-8: {e}")))?;
    let p = MarkovProcess::from_json_str(&text)?;
    let v = p.validate();
    if !v.is_empty() {
        return Err(NessError::InvalidProcess(
            v.into_iter().map(|v| v.message).collect(),
        ));
    }
    Ok((p, bytes))
}

fn finish(out: Option<&Path>, report: RunReport) -> Result<(), NessError> {
    if let Some(path) = out {
        write_output(path, &report.to_json_string())?;
    }
    Ok(())
}

fn edge_label(i: usize, j: usize) -> String {
    format!("{}->{}", i + 1, j + 1)
}

fn cmd_steady(a: &ModelArgs, argv: Vec<String>) -> Result<(), NessError> {
    let (p, input) = load(a)?;
    let dist = p.stationary_distribution()?;
    let fluxes = p.fluxes_for(&dist)?;
    let db = p.detailed_balance()?;
    let rev = p.is_dynamically_reversible();

    println!("states: {}  time: {}", p.n_states(), p.time_kind());
    let rows: Vec<Vec<String>> = dist
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, v)| vec![(i + 1).to_string(), num(*v)])
        .collect();
    print!("{}", table(&["state", "p"], &rows));
    println!();
    let rows: Vec<Vec<String>> = fluxes
        .edges()
        .map(|(i, j, v)| vec![edge_label(i, j), num(v)])
        .collect();
    print!("{}", table(&["edge", "flux"], &rows));
    if let Some(l) = fluxes.loops() {
        println!();
        let rows: Vec<Vec<String>> = l
            .iter()
            .enumerate()
            .map(|(i, v)| vec![(i + 1).to_string(), num(*v)])
            .collect();
        print!("{}", table(&["state", "loop flux"], &rows));
    }
    println!();
    println!(
        "detailed balance: {} (max |I| = {})",
        db.balanced,
        num(db.max_current)
    );
    println!("dynamically reversible: {rev}");

    let results = json!({
        "p": dist.as_slice(),
        "fluxes": serde_json::from_str::<Value>(&fluxes.to_json_string()).expect("valid json"),
        "detailed_balance": db.balanced,
        "max_current": db.max_current,
        "dynamically_reversible": rev,
    });
    finish(
        a.out.as_deref(),
        RunReport::new(argv, Some(&input), results),
    )
}

fn read_ordering_file(path: &Path) -> Result<Vec<Cycle>, NessError> {
    let bytes = read_input(path)?;
    let raw: Vec<Vec<usize>> = serde_json::from_slice(&bytes)
        .map_err(|e| NessError::Parse(format!("{}: {e}", path.display())))?;
    raw.iter().map(|c| Cycle::from_one_based(c)).collect()
}

fn ordering_for(o: &OrderingArgs, catalog: &CycleCatalog) -> Result<Vec<usize>, NessError> {
    match (o.ordering, &o.ordering_file) {
        (OrderingMode::File, Some(path)) => {
            catalog.ordering_with_prefix(&read_ordering_file(path)?)
        }
        (OrderingMode::File, None) => Err(NessError::InvalidArgument(
            "--ordering file needs --ordering-file".into(),
        )),
        (OrderingMode::Default, _) => Ok(catalog.default_ordering()),
        (mode, _) => Err(NessError::InvalidArgument(format!(
            "--ordering {} is not supported here",
            mode.to_possible_value().expect("named").get_name()
        ))),
    }
}

fn print_decomposition(d: &CycleDecomposition, scale: Option<f64>) {
    print!("{}", decomposition_table(d, scale));
    if let Some(s) = scale {
        println!(
            "flux/{} = {}",
            num(s),
            decomposition_formula(d, s, |c| c.to_string())
        );
    }
    println!(
        "support: {}  residual: {}",
        d.support_size(),
        num(d.residual().max_flux())
    );
}

fn cmd_decompose(a: &DecomposeArgs, argv: Vec<String>) -> Result<(), NessError> {
    let (p, input) = load(&a.model)?;
    let fluxes = p.steady_fluxes()?;
    let graph = p.graph();
    let catalog = CycleCatalog::enumerate(&graph)?;
    let counts = cycle_counts(&graph)?;
    println!(
        "cycles: {}  betti: {}  fundamental: {}",
        counts.total, counts.betti, counts.fundamental
    );
    let scale = a.ordering.scale;
    let mut report_seed = None;

    let results = if a.split_2cycles {
        let split = db_current_split(&fluxes, &catalog)?;
        println!("detailed-balance part (2-cycles):");
        let db = CycleDecomposition::from_weights(
            p.n_states(),
            split
                .detailed_balance_part()
                .iter()
                .map(|e| (e.cycle.clone(), e.weight))
                .collect(),
        )?;
        print!("{}", decomposition_table(&db, scale));
        println!("current part:");
        let cur = CycleDecomposition::from_weights(
            p.n_states(),
            split
                .current_part()
                .iter()
                .map(|e| (e.cycle.clone(), e.weight))
                .collect(),
        )?;
        print!("{}", decomposition_table(&cur, scale));
        json!({
            "detailed_balance_part": db.to_json(),
            "current_part": cur.to_json(),
        })
    } else {
        match a.ordering.ordering {
            OrderingMode::All => {
                let all = enumerate_decompositions(&fluxes, &catalog, a.max_orderings)?;
                println!("{} distinct decompositions", all.len());
                for (k, d) in all.iter().enumerate() {
                    println!();
                    println!("decomposition {}:", k + 1);
                    print_decomposition(d, scale);
                }
                json!({
                    "distinct": all.len(),
                    "decompositions": all.iter().map(CycleDecomposition::to_json).collect::<Vec<_>>(),
                })
            }
            OrderingMode::Sample => {
                let seed = a.seed.ok_or_else(|| {
                    NessError::InvalidArgument("--ordering sample requires --seed".into())
                })?;
                report_seed = Some(seed);
                let s = sample_decompositions(&fluxes, &catalog, a.samples, seed)?;
                println!(
                    "at least {} distinct decompositions ({} sampled orderings, seed {})",
                    s.lower_bound(),
                    s.samples,
                    seed
                );
                for (k, d) in s.distinct.iter().enumerate() {
                    println!();
                    println!("decomposition {}:", k + 1);
                    print_decomposition(d, scale);
                }
                json!({
                    "lower_bound": s.lower_bound(),
                    "samples": s.samples,
                    "decompositions": s.distinct.iter().map(CycleDecomposition::to_json).collect::<Vec<_>>(),
                })
            }
            _ => {
                let ordering = ordering_for(&a.ordering, &catalog)?;
                let d = decompose(&fluxes, &catalog, &ordering)?;
                print_decomposition(&d, scale);
                d.to_json()
            }
        }
    };
    let mut report = RunReport::new(argv, Some(&input), results);
    if let Some(s) = report_seed {
        report = report.with_seed(s);
    }
    finish(a.model.out.as_deref(), report)
}

fn cmd_transform(a: &TransformArgs, argv: Vec<String>) -> Result<(), NessError> {
    let (p, input) = load(&a.model)?;
    let fluxes = p.steady_fluxes()?;
    let catalog = CycleCatalog::enumerate(&p.graph())?;
    let ordering = ordering_for(&a.ordering, &catalog)?;
    let d = decompose(&fluxes, &catalog, &ordering)?;
    let h = CycleGraph::build(&d, &p)?;
    let pot = h.potential()?;

    let rows: Vec<Vec<String>> = h
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, n)| {
            vec![
                (k + 1).to_string(),
                n.cycle.to_string(),
                num(n.weight),
                num(n.period),
                num(pot.energy[k]),
            ]
        })
        .collect();
    print!("{}", table(&["node", "cycle", "m", "tau", "H"], &rows));
    println!();
    let rows: Vec<Vec<String>> = h
        .edges()
        .iter()
        .map(|e| {
            vec![
                format!("{}-{}", e.a + 1, e.b + 1),
                num(e.rate_ab),
                num(e.rate_ba),
                num(e.flux_ab),
                num(e.flux_ba),
            ]
        })
        .collect();
    print!(
        "{}",
        table(&["pair", "b_ab", "b_ba", "psi_ab", "psi_ba"], &rows)
    );
    println!();
    println!("sum m tau: {}", num(h.normalization()));
    println!("max |psi_ab - psi_ba|: {}", num(h.max_flux_asymmetry()));
    println!("Z: {}", num(pot.partition));

    finish(
        a.model.out.as_deref(),
        RunReport::new(argv, Some(&input), h.to_json(Some(&pot))),
    )
}

fn cmd_thermo(a: &ThermoArgs, argv: Vec<String>) -> Result<(), NessError> {
    let (p, input) = load(&a.model)?;
    let q = thermo_quantities(&p)?;
    let csv = q.to_csv(&p);
    let rows: Vec<Vec<String>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    print!("{}", table(&["edge", "I", "A", "U", "E", "R"], &rows));
    if let Some(path) = &a.csv {
        write_output(path, &csv)?;
    }
    let mut results = json!({ "edges": csv });
    if a.entropy {
        let at = match &a.at {
            Some(v) => EvaluationPoint::At(ProbabilityDistribution::new(v.clone())?),
            None => EvaluationPoint::Steady,
        };
        let ep = entropy_production(&p, &at)?;
        println!();
        println!("P_tot: {}", num(ep.total));
        println!("P_sys: {}", num(ep.system));
        println!("P_med: {}", num(ep.medium));
        results["entropy"] = json!(ep);
        if matches!(at, EvaluationPoint::Steady) {
            let catalog = CycleCatalog::enumerate(&p.graph())?;
            let d = decompose(&p.steady_fluxes()?, &catalog, &catalog.default_ordering())?;
            let cyc = entropy_production_cycles(&d, &p)?;
            println!("sum m A (cycles): {}", num(cyc));
            results["entropy_cycles"] = json!(cyc);
        }
    }
    finish(
        a.model.out.as_deref(),
        RunReport::new(argv, Some(&input), results),
    )
}

fn cmd_simulate(a: &SimulateArgs, argv: Vec<String>) -> Result<(), NessError> {
    let (p, input) = load(&a.model)?;
    let stop = match (a.events, a.t_max) {
        (Some(k), _) => StopRule::Events(k),
        (None, Some(t)) => StopRule::Time(t),
        (None, None) => {
            return Err(NessError::InvalidArgument(
                "give --events or --t-max".into(),
            ))
        }
    };
    if a.initial == 0 || a.initial > p.n_states() {
        return Err(NessError::InvalidArgument(format!(
            "--initial must be in 1..={}",
            p.n_states()
        )));
    }
    let t = simulate(&p, stop, a.seed, a.initial - 1)?;
    let est = estimate_fluxes(&t, a.batches)?;
    let exact = p.steady_fluxes()?;
    println!(
        "events: {}  duration: {}  seed: {}",
        t.events.len(),
        num(t.total_time),
        a.seed
    );
    let rows: Vec<Vec<String>> = exact
        .edges()
        .map(|(i, j, v)| {
            let e = est.fluxes.get(i, j);
            let se = est.std_error[(i, j)];
            vec![edge_label(i, j), num(e), num(se), num(v), num((e - v) / se)]
        })
        .collect();
    print!(
        "{}",
        table(&["edge", "estimate", "std err", "exact", "z"], &rows)
    );

    let exported = if a.project {
        project_kirchhoff(&est.fluxes, &p.graph())?
    } else {
        est.fluxes.clone()
    };
    if let Some(path) = &a.fluxes_out {
        write_output(path, &exported.to_json_string())?;
    }
    if let Some(path) = &a.trajectory {
        write_output(path, &t.to_csv())?;
    }
    let results = json!({
        "events": t.events.len(),
        "duration": t.total_time,
        "projected": a.project,
        "fluxes": serde_json::from_str::<Value>(&exported.to_json_string()).expect("valid json"),
    });
    finish(
        a.model.out.as_deref(),
        RunReport::new(argv, Some(&input), results).with_seed(a.seed),
    )
}

fn parse_pin(s: &str) -> Result<Gait, NessError> {
    if let Some(g) = Gait::parse(s) {
        return Ok(g);
    }
    let verts = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| NessError::InvalidArgument(format!("unknown gait {s}")))?;
    let c = Cycle::from_one_based(&verts)?;
    Gait::from_cycle(&c).ok_or_else(|| NessError::InvalidArgument(format!("{c} is not a gait")))
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), NessError> {
    let pin = parse_pin(&a.pin)?;
    let xs = log_spaced(a.x_min, a.x_max, a.points)?;
    let rows = tasep_sweep(&xs, pin)?;
    let csv = sweep_csv(&rows);
    match &a.out {
        Some(path) => write_output(path, &csv)?,
        None => print!("{csv}"),
    }
    if a.kink {
        let k = detect_kink(pin, 1.0, 1e-4)?;
        println!(
            "# kink at x = {}: value {}, left slope {}, right slope {}, slope jump {}",
            num(k.at),
            num(k.value),
            num(k.left_slope),
            num(k.right_slope),
            num(k.discontinuity())
        );
    }
    Ok(())
}

fn cmd_tasep_model(a: &TasepModelArgs) -> Result<(), NessError> {
    let p = build_tasep(TasepConfig::new(a.x)?);
    print!("{}", p.to_json_string());
    Ok(())
}
