use std::fmt;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use meshroute::bench::{
    compare_generated, corpus_params, fit_complexity_exponent, measure_runtime, AgreementReport,
    BenchConfig, Check, MIN_REPETITIONS,
};
use meshroute::io::{
    export_dot, load_graph, save_graph, write_text, CounterexampleStore, Decimal, GraphFile,
    IoError, RouteRecord,
};
use meshroute::oracle::{brute_force_route, threshold_exact_route, OracleError};
use meshroute::routing::MraOptions;
use meshroute::{
    generate_topology, Algorithm, AttributeModel, Graph, NodeId, Path, RouteQuery, RouteResult,
    TopologyParams,
};

#[derive(Parser)]
#[command(
    name = "meshroute",
    version,
    about = "Delay-bounded maximum-capacity routing on mesh topologies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random geometric topology and write it as JSON.
    Gen(GenArgs),
    /// Find the widest route that fits a delay bound.
    Route(RouteArgs),
    /// Cross-check all algorithms against the exact solvers on random instances.
    Compare(CompareArgs),
    /// Time the algorithms on growing fixed-density topologies.
    Bench(BenchArgs),
    /// Render a graph, optionally with a route highlighted, as Graphviz DOT.
    Export(ExportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Side of the square area, metres.
    #[arg(long, default_value_t = 1000.0)]
    area: f64,
    /// Coverage radius, metres.
    #[arg(long, default_value_t = 200.0)]
    radius: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `uniform:LO:HI` or `const:V`, in Mbps.
    #[arg(long, default_value = "uniform:1:10", value_parser = parse_model)]
    rate_model: AttributeModel,
    /// `uniform:LO:HI` or `const:V`, in ms.
    #[arg(long, default_value = "const:2", value_parser = parse_model)]
    delay_model: AttributeModel,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy)]
enum Solver {
    Algorithm(Algorithm),
    Oracle,
    BruteForce,
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "oracle" | "threshold" => Ok(Solver::Oracle),
            "brute-force" | "brute_force" => Ok(Solver::BruteForce),
            other => other.parse().map(Solver::Algorithm),
        }
    }
}

#[derive(Args)]
struct RouteArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// dijkstra, bellman-ford, floyd-warshall, mra, oracle or brute-force.
    #[arg(long, default_value = "dijkstra")]
    algo: Solver,
    #[arg(long)]
    src: String,
    #[arg(long)]
    dst: String,
    /// End-to-end delay bound, ms.
    #[arg(long)]
    tau: f64,
    /// Delay quantum for mra, ms.
    #[arg(long)]
    tick: Option<f64>,
    /// Make mra answer for routes whose delay is exactly the bound.
    #[arg(long)]
    exact_delay: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Delay bounds, cycled over the trials.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    tau: Vec<f64>,
    /// Trial `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    area: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    /// Agreement CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where counterexample bundles go. Falls back to $MESHROUTE_COUNTEREXAMPLE_DIR,
    /// then `counterexamples`.
    #[arg(long)]
    counterexamples: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "dijkstra,bellman-ford,floyd-warshall")]
    algos: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',', default_value = "50,70,100,140,200,280,400")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = MIN_REPETITIONS)]
    reps: usize,
    /// Expected node degree of the generated graphs.
    #[arg(long, default_value_t = 16.0)]
    degree: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 50.0)]
    tau: f64,
    /// Timing CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated node names to highlight.
    #[arg(long, value_delimiter = ',', conflicts_with = "algo")]
    path: Option<Vec<String>>,
    /// Compute the highlighted route with this solver (needs --src, --dst, --tau).
    #[arg(long, requires_all = ["src", "dst", "tau"])]
    algo: Option<Solver>,
    #[arg(long)]
    src: Option<String>,
    #[arg(long)]
    dst: Option<String>,
    #[arg(long)]
    tau: Option<f64>,
    /// DOT output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Runtime(String),
    Usage(String),
    Io(IoError),
    Infeasible,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Infeasible => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Runtime(m) | Failure::Usage(m) => f.write_str(m),
            Failure::Io(e) => write!(f, "{e}"),
            Failure::Infeasible => f.write_str("no route fits the delay bound"),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Io(e)
    }
}

fn usage(msg: impl fmt::Display) -> Failure {
    Failure::Usage(msg.to_string())
}

fn parse_model(s: &str) -> Result<AttributeModel, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{t}` is not a number"))
    };
    match parts.as_slice() {
        ["const" | "constant", v] => Ok(AttributeModel::Constant { value: num(v)? }),
        ["uniform", lo, hi] => Ok(AttributeModel::Uniform {
            lo: num(lo)?,
            hi: num(hi)?,
        }),
        _ => Err(format!("expected `uniform:LO:HI` or `const:V`, got `{s}`")),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Gen(args) => gen(args),
        Command::Route(args) => route(args),
        Command::Compare(args) => compare(args),
        Command::Bench(args) => bench(args),
        Command::Export(args) => export(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infeasible) => ExitCode::from(4),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    let params = TopologyParams {
        n: args.n,
        area_side: args.area,
        radius: args.radius,
        seed: args.seed,
        rate_model: args.rate_model,
        delay_model: args.delay_model,
    };
    params.validate().map_err(usage)?;
    let graph = generate_topology(&params).map_err(usage)?;
    save_graph(&args.out, &GraphFile::from_graph(&graph, Some(params)))?;
    println!("nodes {}", graph.node_count());
    println!("links {}", graph.link_count());
    Ok(())
}

fn read_graph(path: &std::path::Path) -> Result<Graph, Failure> {
    Ok(load_graph(path)?.to_graph()?)
}

fn node(graph: &Graph, name: &str) -> Result<NodeId, Failure> {
    graph
        .node_by_name(name)
        .ok_or_else(|| usage(format!("no node named `{name}`")))
}

fn solve(
    graph: &Graph,
    solver: Solver,
    query: &RouteQuery,
    mra: MraOptions,
) -> Result<RouteResult, Failure> {
    let result = match solver {
        Solver::Algorithm(a) => a.route(graph, query, mra),
        Solver::Oracle => threshold_exact_route(graph, query),
        Solver::BruteForce => match brute_force_route(graph, query) {
            Ok(r) => Ok(r),
            Err(OracleError::Route(e)) => Err(e),
            Err(e @ OracleError::BudgetExceeded(_)) => return Err(Failure::Runtime(e.to_string())),
        },
    };
    result.map_err(usage)
}

fn route(args: RouteArgs) -> Result<(), Failure> {
    let graph = read_graph(&args.input)?;
    let query = RouteQuery::new(node(&graph, &args.src)?, node(&graph, &args.dst)?, args.tau);
    let mra = MraOptions {
        tick: args.tick,
        exact_delay: args.exact_delay,
    };
    let result = solve(&graph, args.algo, &query, mra)?;
    let record = RouteRecord::from_result(&graph, &result);
    if args.json {
        println!("{}", serde_json::to_string(&record).expect("route records serialize"));
    } else {
        println!("status {}", record.status);
        if let Some(path) = &record.path {
            println!("path {}", path.join(" "));
        }
        if let (Some(rate), Some(delay)) = (record.rate_mbps, record.delay_ms) {
            println!("rate_mbps {rate}");
            println!("delay_ms {delay}");
        }
    }
    if result.is_found() {
        Ok(())
    } else {
        Err(Failure::Infeasible)
    }
}

fn rate_cell(result: Option<&RouteResult>) -> String {
    match result {
        Some(RouteResult::Found(r)) => Decimal(r.rate).to_string(),
        Some(RouteResult::Infeasible) => "infeasible".into(),
        None => "error".into(),
    }
}

fn oracle_verdict(report: &AgreementReport) -> &'static str {
    let checks = report.outcomes.iter().map(|o| o.matches_oracle);
    if checks.clone().any(|c| c == Check::Mismatch) {
        "false"
    } else if checks.clone().all(|c| c == Check::Match) {
        "true"
    } else {
        "unchecked"
    }
}

fn compare(args: CompareArgs) -> Result<(), Failure> {
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if args.tau.iter().any(|t| t.is_nan() || *t < 0.0) {
        return Err(usage("every --tau must be a non-negative number"));
    }
    let params_for = |i: usize| {
        let mut p = corpus_params(args.n, args.seed.wrapping_add(i as u64));
        p.area_side = args.area.unwrap_or(p.area_side);
        p.radius = args.radius.unwrap_or(p.radius);
        p
    };
    params_for(0).validate().map_err(usage)?;
    let store = match args.counterexamples {
        Some(dir) => CounterexampleStore::new(dir),
        None => CounterexampleStore::from_env_or("counterexamples"),
    };

    let mut csv = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["seed", "n", "L", "src", "dst", "tau"];
    let rate_columns: Vec<String> = Algorithm::ALL
        .iter()
        .map(|a| format!("rate_{}", a.name().replace('-', "_")))
        .collect();
    header.extend(rate_columns.iter().map(String::as_str));
    header.extend(["oracle_rate", "agree", "matches_oracle"]);
    csv.write_record(&header).map_err(|e| Failure::Runtime(e.to_string()))?;

    let mut agreed = 0;
    let mut matched = [0usize; 4];
    let mut persisted = 0;
    for i in 0..args.trials {
        let params = params_for(i);
        let tau = args.tau[i % args.tau.len()];
        let (graph, report) = compare_generated(params, tau, Some(&store)).map_err(usage)?;
        let mut row = vec![
            params.seed.to_string(),
            params.n.to_string(),
            graph.link_count().to_string(),
            graph.name(report.query.source).to_string(),
            graph.name(report.query.destination).to_string(),
            Decimal(tau).to_string(),
        ];
        for (k, o) in report.outcomes.iter().enumerate() {
            row.push(rate_cell(o.result.as_ref().ok()));
            if o.matches_oracle == Check::Match {
                matched[k] += 1;
            }
        }
        row.push(rate_cell(Some(&report.oracle)));
        row.push(report.agree_rates.to_string());
        row.push(oracle_verdict(&report).to_string());
        csv.write_record(&row).map_err(|e| Failure::Runtime(e.to_string()))?;
        agreed += usize::from(report.agree_rates);
        persisted += usize::from(report.counterexample_path.is_some());
    }
    let bytes = csv.into_inner().map_err(|e| Failure::Runtime(e.to_string()))?;
    let text = String::from_utf8(bytes).expect("csv output is utf-8");

    let mut summary = format!("trials {}\nagree {agreed}/{}\n", args.trials, args.trials);
    for (a, m) in Algorithm::ALL.iter().zip(matched) {
        summary += &format!("matches_oracle {} {m}/{}\n", a.name(), args.trials);
    }
    summary += &format!("counterexamples {persisted} in {}\n", store.root().display());
    match args.out {
        Some(path) => {
            write_text(&path, &text)?;
            print!("{summary}");
        }
        None => {
            print!("{text}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    if args.reps < MIN_REPETITIONS {
        return Err(usage(format!("--reps must be at least {MIN_REPETITIONS}")));
    }
    if args.sizes.is_empty() || args.sizes.contains(&0) {
        return Err(usage("--sizes must list positive node counts"));
    }
    let config = BenchConfig {
        repetitions: args.reps,
        mean_degree: args.degree,
        seed: args.seed,
        bound: args.tau,
        ..BenchConfig::default()
    };
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["algo", "n", "L", "reps", "median_ms", "slope"])
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    for &algo in &args.algos {
        let records = measure_runtime(algo, &args.sizes, &config).map_err(usage)?;
        for r in &records {
            log::info!("{} n={} median {:.4} ms", r.algorithm, r.n, r.median_ms);
            csv.write_record([
                r.algorithm.clone(),
                r.n.to_string(),
                r.links.to_string(),
                r.repetitions.to_string(),
                format!("{:.6}", r.median_ms),
                String::new(),
            ])
            .map_err(|e| Failure::Runtime(e.to_string()))?;
        }
        let slope = match fit_complexity_exponent(&records) {
            Ok(fit) => format!("{:.4}", fit.slope),
            Err(e) => {
                eprintln!("{}: no exponent fit ({e})", algo.name());
                "NA".into()
            }
        };
        csv.write_record([algo.name(), "", "", "", "", &slope])
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let bytes = csv.into_inner().map_err(|e| Failure::Runtime(e.to_string()))?;
    let text = String::from_utf8(bytes).expect("csv output is utf-8");
    match args.out {
        Some(path) => write_text(&path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn export(args: ExportArgs) -> Result<(), Failure> {
    let graph = read_graph(&args.input)?;
    let highlight = if let Some(names) = &args.path {
        let nodes = names
            .iter()
            .map(|n| node(&graph, n))
            .collect::<Result<Vec<_>, _>>()?;
        Some(Path::from_nodes(&graph, &nodes).map_err(usage)?)
    } else if let Some(solver) = args.algo {
        let (Some(src), Some(dst), Some(tau)) = (&args.src, &args.dst, args.tau) else {
            return Err(usage("--algo needs --src, --dst and --tau"));
        };
        let query = RouteQuery::new(node(&graph, src)?, node(&graph, dst)?, tau);
        match solve(&graph, solver, &query, MraOptions::default())? {
            RouteResult::Found(r) => Some(r.path),
            RouteResult::Infeasible => {
                eprintln!("no route fits the delay bound; exporting without highlight");
                None
            }
        }
    } else {
        None
    };
    let dot = export_dot(&graph, highlight.as_ref());
    match args.out {
        Some(path) => write_text(&path, &dot)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(dot.as_bytes())
                .map_err(|e| Failure::Runtime(e.to_string()))?;
        }
    }
    Ok(())
}
