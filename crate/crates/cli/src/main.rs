use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use carrier_forge::bound::{compute_l, Verdict};
use carrier_forge::format::fmt17;
use carrier_forge::graph::{collapse_tree, CollapsePoint, MetricGraph, Subgraph};
use carrier_forge::relax::{
    girth_derived_radius, relax, scan_theorem, DecoratedGraph, GroupPresentation, RelaxConfig, RelaxError, Topology,
};
use carrier_forge::shortening::{sh_gain, ShorteningInput, STEINER_ANGLE};
use carrier_forge::verify::{corrupted_gain, run_all, true_gain, SuiteConfig};

const THREADS_VAR: &str = "CARRIER_FORGE_THREADS";

#[derive(Parser)]
#[command(name = "carrier-forge", version, about = "Triod shortening, edge-length bounds and carrier graph relaxation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate Sh(c, phi) on the grid (lo, hi] x (lo, hi] as CSV.
    ShTable(ShTableArgs),
    /// Emit the edge-length bound certificate for (r, k) as JSON.
    Bound(BoundArgs),
    /// Relax a decorated graph for a group to a critical point of length.
    Relax(RelaxArgs),
    /// Relax many seeds and check each result against the bound.
    Scan(ScanArgs),
    /// Run the randomized lemma suites.
    VerifyLemmas(VerifyArgs),
    /// Collapse a tree in a trivalent graph to a cone point.
    Collapse(CollapseArgs),
}

#[derive(Args)]
struct ShTableArgs {
    #[arg(long, default_value_t = 0.0)]
    c_min: f64,
    #[arg(long, default_value_t = 5.0)]
    c_max: f64,
    #[arg(long, default_value_t = 0.0)]
    phi_min: f64,
    /// Defaults to 2π/3.
    #[arg(long)]
    phi_max: Option<f64>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 50)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    r: f64,
    #[arg(long)]
    k: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RelaxFlags {
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-3)]
    angle_tol: f64,
}

impl RelaxFlags {
    fn config(&self, seed: u64, allow_topology_moves: bool) -> RelaxConfig {
        RelaxConfig {
            step: self.step,
            tol_grad: self.tol,
            max_iter: self.max_iter,
            allow_topology_moves,
            seed,
            angle_tol: self.angle_tol,
        }
    }
}

#[derive(Args)]
struct RelaxArgs {
    /// Group file.
    #[arg(long)]
    group: PathBuf,
    /// Decorated-graph file to start from.
    #[arg(long, conflicts_with = "topology")]
    graph: Option<PathBuf>,
    /// Seed topology when no graph file is given: theta, dumbbell or caterpillar.
    #[arg(long)]
    topology: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allow vertex splitting and short-edge contraction.
    #[arg(long)]
    topology_moves: bool,
    #[command(flatten)]
    flags: RelaxFlags,
    /// Directory for final.graph, trace.csv and summary.txt.
    #[arg(long, default_value = "relax-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    group: PathBuf,
    #[arg(long, default_value_t = 50)]
    seeds: u64,
    /// Circuit-length bound; defaults to half the girth of the relaxed seed-0 graph.
    #[arg(long)]
    r: Option<f64>,
    #[command(flatten)]
    flags: RelaxFlags,
    /// Directory for scan.csv, certificate.json and summary.txt.
    #[arg(long, default_value = "scan-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Test hook: run the suites against a deliberately wrong Sh.
    #[arg(long, hide = true)]
    corrupt_sh: bool,
}

#[derive(Args)]
struct CollapseArgs {
    /// Trivalent graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Comma-separated edge ids of the tree S.
    #[arg(long, value_delimiter = ',', required = true)]
    tree: Vec<usize>,
    /// Cone point as `<edge>:<t>` with 0 < t < 1; defaults to the midpoint of the longest edge of S.
    #[arg(long)]
    point: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    NotConverged(String),
    Suite(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::NotConverged(_) => 2,
            Failure::Suite(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::NotConverged(m) | Failure::Suite(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(context: impl std::fmt::Display) -> impl FnOnce(E) -> Failure {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(input(path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(input(path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(input(dir.display()))
}

fn load_group(path: &Path) -> Result<Arc<GroupPresentation>, Failure> {
    GroupPresentation::parse(&read(path)?).map(Arc::new).map_err(input(path.display()))
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Input(format!("{THREADS_VAR} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

fn sh_table(a: &ShTableArgs) -> Result<(), Failure> {
    let phi_max = a.phi_max.unwrap_or(STEINER_ANGLE);
    // accept the angle typed to 17 digits
    let phi_max = if (phi_max - STEINER_ANGLE).abs() < 1e-12 { STEINER_ANGLE } else { phi_max };
    if !(a.c_min >= 0.0 && a.c_max > a.c_min && a.c_max.is_finite()) {
        return Err(Failure::Input(format!("c range ({}, {}] must satisfy 0 <= lo < hi", a.c_min, a.c_max)));
    }
    if !(a.phi_min >= 0.0 && phi_max > a.phi_min && phi_max <= STEINER_ANGLE) {
        return Err(Failure::Input(format!("phi range ({}, {}] must lie in (0, 2π/3]", a.phi_min, phi_max)));
    }
    if a.steps == 0 {
        return Err(Failure::Input("steps must be positive".into()));
    }
    let axis = |lo: f64, hi: f64, i: usize| if i == a.steps { hi } else { lo + (hi - lo) * i as f64 / a.steps as f64 };
    let mut out = String::from("c,phi,a,b,gain\n");
    for i in 1..=a.steps {
        let c = axis(a.c_min, a.c_max, i);
        for j in 1..=a.steps {
            let phi = axis(a.phi_min, phi_max, j);
            let s = ShorteningInput::new(c, phi).and_then(sh_gain).map_err(input(format!("c={c} phi={phi}")))?;
            writeln!(out, "{},{},{},{},{}", fmt17(c), fmt17(phi), fmt17(s.a), fmt17(s.b), fmt17(s.gain)).unwrap();
        }
    }
    emit(a.out.as_deref(), &out)
}

fn bound(a: &BoundArgs) -> Result<(), Failure> {
    let cert = compute_l(a.r, a.k).map_err(input("bound"))?;
    let mut text = cert.to_json();
    text.push('\n');
    emit(a.out.as_deref(), &text)?;
    let check = cert.verify();
    if check.passed() {
        Ok(())
    } else {
        Err(Failure::Suite(format!("certificate failed self-verification: {check:?}")))
    }
}

fn relax_cmd(a: &RelaxArgs) -> Result<(), Failure> {
    let group = load_group(&a.group)?;
    let start = match (&a.graph, &a.topology) {
        (Some(path), _) => DecoratedGraph::parse(&read(path)?, group).map_err(input(path.display()))?,
        (None, topo) => {
            let topology: Topology = topo.as_deref().unwrap_or("theta").parse().map_err(input("--topology"))?;
            DecoratedGraph::seed(group, topology, a.seed).map_err(input("seed graph"))?
        }
    };
    let cfg = a.flags.config(a.seed, a.topology_moves);
    let (g, report) = relax(&start, &cfg).map_err(|e| match e {
        RelaxError::Precondition(_) => Failure::Input(format!("relax: {e}")),
        e => Failure::NotConverged(format!("relax: {e}")),
    })?;
    ensure_dir(&a.out_dir)?;
    write_file(&a.out_dir.join("final.graph"), &g.to_text())?;
    write_file(&a.out_dir.join("trace.csv"), &report.trace_csv())?;
    let summary = report.summary();
    write_file(&a.out_dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    if report.converged && report.white.holds() {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!("relax did not converge after {} iterations", report.iterations)))
    }
}

fn scan(a: &ScanArgs) -> Result<(), Failure> {
    let group = load_group(&a.group)?;
    let threads = threads_from_env()?;
    let base = a.flags.config(0, true);
    base.validate().map_err(input("relax flags"))?;
    let r = match a.r {
        Some(r) => r,
        None => girth_derived_radius(&group, &base).map_err(|e| Failure::NotConverged(format!("girth-derived r: {e}")))?,
    };
    let cert = compute_l(r, group.rank() as i64).map_err(input("bound"))?;
    ensure_dir(&a.out_dir)?;
    write_file(&a.out_dir.join("certificate.json"), &(cert.to_json() + "\n"))?;
    let report = match scan_theorem(&group, a.seeds, &cert, &base, threads) {
        Ok(r) => r,
        Err(RelaxError::Violation { seed, dump }) => {
            write_file(&a.out_dir.join("violation.txt"), &dump)?;
            return Err(Failure::Suite(format!("seed {seed} violates the bound; graph written to violation.txt")));
        }
        Err(e) => return Err(Failure::Input(format!("scan: {e}"))),
    };
    write_file(&a.out_dir.join("scan.csv"), &report.to_csv())?;
    let summary = report.summary();
    write_file(&a.out_dir.join("summary.txt"), &summary)?;
    print!("{summary}");
    debug_assert_eq!(report.count(Verdict::Violation), 0);
    if report.unconverged() > 0 {
        return Err(Failure::NotConverged(format!("{} seeds did not converge", report.unconverged())));
    }
    Ok(())
}

fn verify_lemmas(a: &VerifyArgs) -> Result<(), Failure> {
    if a.grid < 2 || a.trials == 0 {
        return Err(Failure::Input("grid must be at least 2 and trials positive".into()));
    }
    let cfg = SuiteConfig { grid: a.grid, trials: a.trials, seed: a.seed };
    let report = if a.corrupt_sh { run_all(&cfg, &corrupted_gain) } else { run_all(&cfg, &true_gain) };
    let text = report.to_text();
    emit(a.out.as_deref(), &text)?;
    if report.passed() {
        Ok(())
    } else {
        if a.out.is_some() {
            eprint!("{text}");
        }
        Err(Failure::Suite("lemma suites failed".into()))
    }
}

fn parse_point(text: &str) -> Result<CollapsePoint, Failure> {
    let bad = || Failure::Input(format!("--point: expected `<edge>:<t>`, got `{text}`"));
    let (e, t) = text.split_once(':').ok_or_else(bad)?;
    Ok(CollapsePoint { edge: e.trim().parse().map_err(|_| bad())?, t: t.trim().parse().map_err(|_| bad())? })
}

fn collapse(a: &CollapseArgs) -> Result<(), Failure> {
    let x = MetricGraph::parse(&read(&a.graph)?).map_err(input(a.graph.display()))?;
    let s = Subgraph::new(&x, a.tree.iter().copied()).map_err(input("--tree"))?;
    let point = a.point.as_deref().map(parse_point).transpose()?;
    let c = collapse_tree(&x, &s, point).map_err(input("collapse"))?;
    let k = x.rank();
    let mut text = c.y.to_text();
    writeln!(text, "# cone_vertex {} valence {}", c.cone_vertex, c.cone_valence()).unwrap();
    writeln!(text, "# point edge {} t {}", c.point.edge, fmt17(c.point.t)).unwrap();
    for ce in &c.cone_edges {
        writeln!(
            text,
            "# cone_edge {} split_vertex {} original_vertex {} length {}",
            ce.edge,
            ce.split_vertex,
            ce.original_vertex,
            fmt17(ce.length)
        )
        .unwrap();
    }
    emit(a.out.as_deref(), &text)?;
    let bound = x.total_length() + (4 * k - 5) as f64 * s.length();
    eprintln!(
        "len(X) = {}\nlen(S) = {}\nlen(Y) = {}\nlen(X) + (4k-5) len(S) = {}\nrank(X) = {} rank(Y) = {}",
        fmt17(x.total_length()),
        fmt17(s.length()),
        fmt17(c.y.total_length()),
        fmt17(bound),
        k,
        c.y.rank()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::ShTable(a) => sh_table(a),
        Command::Bound(a) => bound(a),
        Command::Relax(a) => relax_cmd(a),
        Command::Scan(a) => scan(a),
        Command::VerifyLemmas(a) => verify_lemmas(a),
        Command::Collapse(a) => collapse(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
