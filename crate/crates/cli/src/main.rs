use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cnflift::cp::{check_cpk, cp_php_refutation, cpk_rank, lift_cp_refutation, CpProof};
use cnflift::generate::{gen_bipartite, gen_php, gen_random_tcnf};
use cnflift::lifting::{
    lift_gap_mode, lift_parity, lift_tensor, write_sidecar, LiftedFormula, ParityParams,
    TensorParams,
};
use cnflift::lp::{approx_degree, gap_experiment, ratio, APPROX_DEGREE_VAR_CAP};
use cnflift::resolution::{
    check_resolution, lift_refutation_parity, lift_refutation_tensor, proof_rank, ResolutionProof,
};
use cnflift::search::{
    exact_decision_depth, lifted_search_tree_parity, lifted_search_tree_tensor, optimal_tree,
    DecisionTree, DepthProblem, TensorMode,
};
use cnflift::{parse_dimacs, write_dimacs, BipartiteGraph, CnfFormula};

#[derive(Parser)]
#[command(
    name = "cnflift",
    version,
    about = "Selector lifts of CNF formulas, proofs and checkers"
)]
struct Cli {
    /// Increase log verbosity (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate formulas and graphs.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Lift a DIMACS formula; writes the formula and a `<out>.map` sidecar.
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Check a proof against a formula.
    #[command(subcommand)]
    Check(ProofCmd),
    /// Print the rank of a proof.
    #[command(subcommand)]
    Rank(RankCmd),
    /// Decision trees for clause search.
    #[command(subcommand)]
    Dt(DtCmd),
    /// Build proofs.
    #[command(subcommand)]
    Prove(ProveCmd),
    /// Integrality-gap experiment.
    #[command(subcommand)]
    Gap(GapCmd),
    /// Approximate degree.
    #[command(subcommand)]
    Degree(DegreeCmd),
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Number of pigeons; holes are one fewer.
    #[arg(long)]
    pigeons: Option<u32>,
    /// Holes per pigeon in a random graph (complete graph if omitted).
    #[arg(long, requires = "seed")]
    degree: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Edge-list file instead of --pigeons.
    #[arg(long, conflicts_with = "pigeons")]
    graph: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Graph pigeonhole formula.
    Php {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random t-CNF with m clauses over n variables.
    Random {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random bipartite graph as an edge list.
    Graph {
        #[arg(long)]
        pigeons: u32,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LiftIo {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Subcommand)]
enum LiftCmd {
    Tensor {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        ell: u32,
        #[command(flatten)]
        io: LiftIo,
    },
    Parity {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        a: u32,
        #[command(flatten)]
        io: LiftIo,
    },
    GapMode {
        #[command(flatten)]
        io: LiftIo,
    },
}

#[derive(Args)]
struct CheckArgs {
    #[arg(short = 'f', long)]
    formula: PathBuf,
    #[arg(short, long)]
    proof: PathBuf,
}

#[derive(Subcommand)]
enum ProofCmd {
    /// Resolution refutation.
    Res(CheckArgs),
    /// CP(k) refutation.
    Cpk(CheckArgs),
}

#[derive(Subcommand)]
enum RankCmd {
    Res {
        #[arg(short, long)]
        proof: PathBuf,
    },
    Cpk {
        #[arg(short, long)]
        proof: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LiftKindArg {
    Tensor,
    Parity,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Interval nodes, correct on selector-valid inputs.
    Valid,
    /// Variable queries only, correct on every input.
    Total,
}

#[derive(Args)]
struct LiftParams {
    #[arg(long, value_enum)]
    kind: LiftKindArg,
    #[arg(long)]
    k: u32,
    /// Tensor alphabet size.
    #[arg(long)]
    ell: Option<u32>,
    /// Parity bits per coordinate.
    #[arg(long)]
    a: Option<u32>,
}

#[derive(Subcommand)]
enum DtCmd {
    /// Exact decision-tree depth of clause search.
    Depth {
        #[arg(short = 'f', long)]
        formula: PathBuf,
    },
    /// Optimal clause-search tree.
    Build {
        #[arg(short = 'f', long)]
        formula: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lift a base tree to a tree for the lifted formula.
    Lift {
        #[arg(short = 'f', long)]
        formula: PathBuf,
        #[arg(short, long)]
        tree: PathBuf,
        #[command(flatten)]
        lift: LiftParams,
        #[arg(long, value_enum, default_value = "valid")]
        mode: ModeArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ProveCmd {
    /// CP refutation of a graph pigeonhole formula.
    PhpCp {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// CP(k+1) refutation of the tensor lift of a pigeonhole formula.
    LiftCpk {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        ell: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Resolution refutation of a lifted formula from an optimal base tree.
    LiftRes {
        #[arg(short = 'f', long)]
        formula: PathBuf,
        #[command(flatten)]
        lift: LiftParams,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GapCmd {
    Run {
        #[arg(long, default_value_t = 3)]
        t: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 25)]
        delta: u32,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DegreeCmd {
    /// ε-approximate degree of a ±1 truth table.
    Approx {
        /// Comma-separated ±1 values, 2^n of them.
        #[arg(long, allow_hyphen_values = true)]
        table: String,
        /// Error bound as a fraction, e.g. 5/6.
        #[arg(long, default_value = "5/6")]
        eps: String,
    },
}

enum Failure {
    /// Bad arguments or unreadable inputs.
    Usage(String),
    /// A proof or tree did not check.
    Check(String),
}

type Run = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read(path)?)
        .map_err(|_| Failure::Usage(format!("{}: not UTF-8", path.display())))
}

fn read_formula(path: &Path) -> Result<CnfFormula, Failure> {
    parse_dimacs(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, output: Option<&Path>, bytes: &[u8]) -> Run {
    match output {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => out.write_all(bytes).map_err(usage),
    }
}

fn graph_from(args: &GraphArgs) -> Result<BipartiteGraph, Failure> {
    if let Some(path) = &args.graph {
        return BipartiteGraph::parse_edge_list(&read_text(path)?).map_err(usage);
    }
    let pigeons = args
        .pigeons
        .ok_or_else(|| usage("--pigeons or --graph is required"))?;
    match (args.degree, args.seed) {
        (Some(d), Some(seed)) => gen_bipartite(pigeons, d, seed).map_err(usage),
        (None, _) => {
            if pigeons < 2 {
                return Err(usage("--pigeons must be at least 2"));
            }
            Ok(BipartiteGraph::complete(pigeons))
        }
        (Some(_), None) => Err(usage("--degree requires --seed")),
    }
}

fn lift_from(base: &CnfFormula, p: &LiftParams) -> Result<LiftedFormula, Failure> {
    match p.kind {
        LiftKindArg::Tensor => {
            let ell = p
                .ell
                .ok_or_else(|| usage("--ell is required for tensor lifts"))?;
            lift_tensor(base, TensorParams::new(p.k, ell).map_err(usage)?).map_err(usage)
        }
        LiftKindArg::Parity => {
            let a =
                p.a.ok_or_else(|| usage("--a is required for parity lifts"))?;
            lift_parity(base, ParityParams::new(p.k, a).map_err(usage)?).map_err(usage)
        }
    }
}

fn write_lift(out: &mut dyn Write, lifted: &LiftedFormula, io: &LiftIo) -> Run {
    emit(out, Some(&io.output), &write_dimacs(lifted.formula()))?;
    let mut map = io.output.clone().into_os_string();
    map.push(".map");
    emit(
        out,
        Some(Path::new(&map)),
        write_sidecar(lifted.provenance()).as_bytes(),
    )
}

fn parse_eps(s: &str) -> Result<(i64, i64), Failure> {
    let bad = || usage(format!("--eps: cannot parse `{s}` as a fraction"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: i64 = n.trim().parse().map_err(|_| bad())?;
    let d: i64 = d.trim().parse().map_err(|_| bad())?;
    if d <= 0 || n < 0 || n >= d {
        return Err(usage("--eps: must be a fraction with 0 <= eps < 1"));
    }
    Ok((n, d))
}

fn run(cli: Cli, out: &mut dyn Write) -> Run {
    match cli.command {
        Command::Gen(GenCmd::Php { graph, output }) => {
            let g = graph_from(&graph)?;
            emit(
                out,
                output.as_deref(),
                &write_dimacs(&gen_php(&g).map_err(usage)?),
            )
        }
        Command::Gen(GenCmd::Random {
            t,
            n,
            m,
            seed,
            output,
        }) => emit(
            out,
            output.as_deref(),
            &write_dimacs(&gen_random_tcnf(t, n, m, seed).map_err(usage)?),
        ),
        Command::Gen(GenCmd::Graph {
            pigeons,
            degree,
            seed,
            output,
        }) => emit(
            out,
            output.as_deref(),
            gen_bipartite(pigeons, degree, seed)
                .map_err(usage)?
                .to_edge_list()
                .as_bytes(),
        ),
        Command::Lift(cmd) => {
            let (lifted, io) = match &cmd {
                LiftCmd::Tensor { k, ell, io } => (
                    lift_tensor(
                        &read_formula(&io.input)?,
                        TensorParams::new(*k, *ell).map_err(usage)?,
                    ),
                    io,
                ),
                LiftCmd::Parity { k, a, io } => (
                    lift_parity(
                        &read_formula(&io.input)?,
                        ParityParams::new(*k, *a).map_err(usage)?,
                    ),
                    io,
                ),
                LiftCmd::GapMode { io } => (lift_gap_mode(&read_formula(&io.input)?), io),
            };
            write_lift(out, &lifted.map_err(usage)?, io)
        }
        Command::Check(ProofCmd::Res(args)) => {
            let f = read_formula(&args.formula)?;
            let p = ResolutionProof::parse_text(&read_text(&args.proof)?)
                .map_err(|e| Failure::Check(e.to_string()))?;
            check_resolution(&f, &p).map_err(|e| Failure::Check(e.to_string()))?;
            writeln!(
                out,
                "ok: refutation with {} lines, rank {}",
                p.len(),
                proof_rank(&p)
            )
            .map_err(usage)
        }
        Command::Check(ProofCmd::Cpk(args)) => {
            let f = read_formula(&args.formula)?;
            let p = CpProof::parse_text(&read_text(&args.proof)?)
                .map_err(|e| Failure::Check(e.to_string()))?;
            check_cpk(&f, &p).map_err(|e| Failure::Check(e.to_string()))?;
            writeln!(
                out,
                "ok: CP({}) refutation with {} lines, rank {}",
                p.degree(),
                p.len(),
                cpk_rank(&p)
            )
            .map_err(usage)
        }
        Command::Rank(RankCmd::Res { proof }) => {
            let p = ResolutionProof::parse_text(&read_text(&proof)?).map_err(usage)?;
            writeln!(out, "{}", proof_rank(&p)).map_err(usage)
        }
        Command::Rank(RankCmd::Cpk { proof }) => {
            let p = CpProof::parse_text(&read_text(&proof)?).map_err(usage)?;
            writeln!(out, "{}", cpk_rank(&p)).map_err(usage)
        }
        Command::Dt(DtCmd::Depth { formula }) => {
            let f = read_formula(&formula)?;
            writeln!(
                out,
                "{}",
                exact_decision_depth(DepthProblem::Search(&f)).map_err(usage)?
            )
            .map_err(usage)
        }
        Command::Dt(DtCmd::Build { formula, output }) => {
            let f = read_formula(&formula)?;
            let (_, tree) = optimal_tree(DepthProblem::Search(&f)).map_err(usage)?;
            emit(out, output.as_deref(), tree.to_text().as_bytes())
        }
        Command::Dt(DtCmd::Lift {
            formula,
            tree,
            lift,
            mode,
            output,
        }) => {
            let base = read_formula(&formula)?;
            let t = DecisionTree::parse_text(&read_text(&tree)?, None).map_err(usage)?;
            let lifted = lift_from(&base, &lift)?;
            let lifted_tree = match lift.kind {
                LiftKindArg::Parity => lifted_search_tree_parity(&t, &lifted),
                LiftKindArg::Tensor => {
                    let mode = match mode {
                        ModeArg::Valid => TensorMode::SelectorValid,
                        ModeArg::Total => TensorMode::Total,
                    };
                    lifted_search_tree_tensor(&t, &lifted, mode)
                }
            }
            .map_err(usage)?;
            emit(out, output.as_deref(), lifted_tree.to_text().as_bytes())
        }
        Command::Prove(ProveCmd::PhpCp { graph, output }) => {
            let g = graph_from(&graph)?;
            let (f, p) = cp_php_refutation(&g).map_err(usage)?;
            check_cpk(&f, &p).map_err(|e| Failure::Check(e.to_string()))?;
            emit(out, output.as_deref(), p.to_text().as_bytes())
        }
        Command::Prove(ProveCmd::LiftCpk {
            graph,
            k,
            ell,
            output,
        }) => {
            let g = graph_from(&graph)?;
            let (f, base) = cp_php_refutation(&g).map_err(usage)?;
            let lifted =
                lift_tensor(&f, TensorParams::new(k, ell).map_err(usage)?).map_err(usage)?;
            let built = lift_cp_refutation(&f, &base, &lifted).map_err(usage)?;
            check_cpk(lifted.formula(), &built.proof).map_err(|e| Failure::Check(e.to_string()))?;
            emit(out, output.as_deref(), built.proof.to_text().as_bytes())
        }
        Command::Prove(ProveCmd::LiftRes {
            formula,
            lift,
            output,
        }) => {
            let base = read_formula(&formula)?;
            let (_, tree) = optimal_tree(DepthProblem::Search(&base)).map_err(usage)?;
            let lifted = lift_from(&base, &lift)?;
            let proof = match lift.kind {
                LiftKindArg::Tensor => lift_refutation_tensor(&tree, &lifted),
                LiftKindArg::Parity => lift_refutation_parity(&tree, &lifted),
            }
            .map_err(usage)?;
            check_resolution(lifted.formula(), &proof)
                .map_err(|e| Failure::Check(e.to_string()))?;
            emit(out, output.as_deref(), proof.to_text().as_bytes())
        }
        Command::Gap(GapCmd::Run {
            t,
            n,
            delta,
            seed,
            output,
        }) => {
            let report = gap_experiment(t, n, delta, seed).map_err(usage)?;
            emit(
                out,
                output.as_deref(),
                format!("{}\n", report.to_record()).as_bytes(),
            )
        }
        Command::Degree(DegreeCmd::Approx { table, eps }) => {
            let values = table
                .split(',')
                .map(|v| match v.trim() {
                    "1" | "+1" => Ok(1),
                    "-1" => Ok(-1),
                    other => Err(usage(format!("--table: `{other}` is not ±1"))),
                })
                .collect::<Result<Vec<i64>, _>>()?;
            let n = values.len().trailing_zeros();
            if values.len() != 1 << n || n > APPROX_DEGREE_VAR_CAP {
                return Err(usage(format!(
                    "--table: length must be 2^n with n <= {APPROX_DEGREE_VAR_CAP}"
                )));
            }
            let (num, den) = parse_eps(&eps)?;
            writeln!(out, "{}", approx_degree(&values, n, &ratio(num, den))).map_err(usage)
        }
    }
}

/// Runs one invocation and returns its exit code.
fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return e.exit_code() as u8;
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    match run(cli, out) {
        Ok(()) => 0,
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "check failed: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn main() -> ExitCode {
    let code = execute(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr(),
    );
    ExitCode::from(code)
}
