//! `pvc`: command-line front end for the partition vertex cover solver.
//!
//! Exit codes: 0 success, 2 usage or input error (bad flags, unreadable or
//! malformed file), 3 solver error, 4 rounding infeasible after all restarts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pvc_core::bench::{gap_row, gap_table_text, run_bench, to_csv, BenchConfig};
use pvc_core::exact::{exact_solve, DEFAULT_VERTEX_LIMIT};
use pvc_core::greedy::greedy_solve;
use pvc_core::instance::{
    generate_random, generate_star, parse_instance, parse_set_cover, reduce_set_cover,
    serialize_instance, GroupAssignment, Instance, RandomConfig,
};
use pvc_core::pvclp::{solve_lp1, solve_pvclp, SolveMode};
use pvc_core::report::{solve, SolveError};
use pvc_core::rounding::{
    beta_sums, estimate_round_success, expected_round_cost, sample_round_cost, RoundingConfig,
    RoundingError,
};

#[derive(Parser)]
#[command(
    name = "pvc",
    version,
    about = "Partition vertex cover: knapsack-cover LP, cutting planes, threshold rounding"
)]
struct Cli {
    /// Log verbosity (-v debug, -vv trace incl. simplex tableaux).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the strengthened relaxation and round it.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        load: LoadArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        rounds_constant: u32,
        #[arg(long, value_enum, default_value_t = Mode::Direct)]
        mode: Mode,
        /// Also report the union after removing redundant vertices.
        #[arg(long)]
        prune: bool,
        /// Print the cut log after the report.
        #[arg(long)]
        cut_log: bool,
        /// Include wall-clock timings (output is then not reproducible).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact optimum by branch and bound.
    Exact {
        input: PathBuf,
        #[command(flatten)]
        load: LoadArgs,
        #[arg(long, default_value_t = DEFAULT_VERTEX_LIMIT)]
        limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy baseline.
    Greedy {
        input: PathBuf,
        #[command(flatten)]
        load: LoadArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Natural relaxation with edge variables.
    Lp1 {
        input: PathBuf,
        #[command(flatten)]
        load: LoadArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated instance in canonical form.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Check the rounding precondition and estimate per-group single-round success.
    Verify {
        input: PathBuf,
        #[command(flatten)]
        load: LoadArgs,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Direct)]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded batch over random instances, written as CSV.
    Bench(BenchArgs),
    /// Star gap table: natural relaxation vs strengthened relaxation vs optimum.
    Gap {
        /// Star sizes (number of leaves).
        #[arg(default_values_t = [1usize, 2, 5, 20, 100])]
        leaves: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LoadArgs {
    /// Require groups to be pairwise disjoint and cover every edge.
    #[arg(long)]
    strict_partition: bool,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Star with unit costs and one group of target 1.
    Star {
        #[arg(long, short = 'd')]
        leaves: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random instance.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        cost_min: u64,
        #[arg(long, default_value_t = 10)]
        cost_max: u64,
        #[arg(long, default_value_t = 1)]
        weight_min: u64,
        #[arg(long, default_value_t = 1)]
        weight_max: u64,
        /// Probability that an edge also joins one other group.
        #[arg(long, default_value_t = 0.0)]
        overlap: f64,
        #[arg(long, value_enum, default_value_t = Assignment::Random)]
        assignment: Assignment,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a set-cover file (`p sc <r> <m>`) to a partition vertex cover instance.
    SetcoverReduce {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Number of instances.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    n_min: usize,
    #[arg(long, default_value_t = 16)]
    n_max: usize,
    #[arg(long, default_value_t = 6)]
    m_min: usize,
    #[arg(long, default_value_t = 24)]
    m_max: usize,
    #[arg(long, default_value_t = 1)]
    r_min: usize,
    #[arg(long, default_value_t = 4)]
    r_max: usize,
    #[arg(long, default_value_t = 1)]
    weight_max: u64,
    #[arg(long, default_value_t = 0.0)]
    overlap: f64,
    #[arg(long, value_enum, default_value_t = Mode::Direct)]
    mode: Mode,
    #[arg(long, default_value_t = 4)]
    rounds_constant: u32,
    /// Single-round Monte Carlo trials per instance for the 5/8 check.
    #[arg(long, default_value_t = 1000)]
    mc_trials: u64,
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Direct,
    Delta,
}

impl From<Mode> for SolveMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Direct => SolveMode::Direct,
            Mode::Delta => SolveMode::DeltaSearch,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Assignment {
    Random,
    RoundRobin,
}

enum Failure {
    Input(String),
    Solver(String),
    Infeasible(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Infeasible(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Solver(m) | Failure::Infeasible(m) => m,
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Rounding(RoundingError::InfeasibleAfterRestarts { .. }) => {
                Failure::Infeasible(e.to_string())
            }
            other => Failure::Solver(other.to_string()),
        }
    }
}

fn solver<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Solver(e.to_string())
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path, args: &LoadArgs) -> Result<Instance, Failure> {
    parse_instance(&read(path)?, args.strict_partition)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ids(it: impl Iterator<Item = usize>) -> String {
    it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            input,
            load: l,
            seed,
            rounds_constant,
            mode,
            prune,
            cut_log,
            timing,
            out,
        } => {
            let inst = load(&input, &l)?;
            let cfg = RoundingConfig {
                seed,
                rounds_constant,
                prune,
                ..Default::default()
            };
            let report = solve(&inst, mode.into(), &cfg)?;
            let mut text = report.to_key_value(timing);
            if cut_log {
                for c in &report.relaxation.cuts {
                    let _ = writeln!(text, "{c}");
                }
            }
            emit(&text, out.as_deref())
        }
        Command::Exact {
            input,
            load: l,
            limit,
            out,
        } => {
            let inst = load(&input, &l)?;
            let res = exact_solve(&inst, limit).map_err(solver)?;
            let text = format!(
                "optimum = {}\nchosen = {}\nnodes = {}\n",
                res.optimum,
                ids(res.chosen.iter()),
                res.nodes
            );
            emit(&text, out.as_deref())
        }
        Command::Greedy {
            input,
            load: l,
            out,
        } => {
            let inst = load(&input, &l)?;
            let sel = greedy_solve(&inst);
            let text = format!(
                "cost = {}\nfeasible = {}\nchosen = {}\n",
                sel.cost,
                sel.is_feasible(&inst),
                ids(sel.chosen.iter())
            );
            emit(&text, out.as_deref())
        }
        Command::Lp1 {
            input,
            load: l,
            out,
        } => {
            let inst = load(&input, &l)?;
            let sol = solve_lp1(&inst).map_err(solver)?;
            let mut text = format!("lp1_value = {:.9}\n", sol.objective);
            let _ = writeln!(
                text,
                "x = {}",
                sol.x
                    .iter()
                    .map(|v| format!("{v:.9}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            emit(&text, out.as_deref())
        }
        Command::Generate { kind } => match kind {
            GenerateKind::Star { leaves, out } => {
                if leaves == 0 {
                    return Err(Failure::Input("a star needs at least one leaf".into()));
                }
                emit(&serialize_instance(&generate_star(leaves)), out.as_deref())
            }
            GenerateKind::Random {
                n,
                m,
                r,
                seed,
                cost_min,
                cost_max,
                weight_min,
                weight_max,
                overlap,
                assignment,
                out,
            } => {
                let cfg = RandomConfig {
                    n,
                    m,
                    r,
                    cost: (cost_min, cost_max),
                    weight: (weight_min, weight_max),
                    assignment: match assignment {
                        Assignment::Random => GroupAssignment::Random,
                        Assignment::RoundRobin => GroupAssignment::RoundRobin,
                    },
                    overlap,
                };
                let inst =
                    generate_random(&cfg, seed).map_err(|e| Failure::Input(e.to_string()))?;
                emit(&serialize_instance(&inst), out.as_deref())
            }
            GenerateKind::SetcoverReduce { input, out } => {
                let sc = parse_set_cover(&read(&input)?)
                    .map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
                emit(&serialize_instance(&reduce_set_cover(&sc)), out.as_deref())
            }
        },
        Command::Verify {
            input,
            load: l,
            trials,
            seed,
            mode,
            out,
        } => {
            let inst = load(&input, &l)?;
            let sol = solve_pvclp(&inst, mode.into()).map_err(solver)?;
            let cfg = RoundingConfig::with_seed(seed);
            let mut text = format!(
                "lp_value = {:.9}\ntrials = {trials}\nseed = {seed}\n",
                sol.objective
            );
            for (i, v) in beta_sums(&inst, &sol.x).iter().enumerate() {
                match v {
                    Some(v) => {
                        let _ = writeln!(text, "group {i} beta_sum = {v:.9}");
                    }
                    None => {
                        let _ = writeln!(text, "group {i} beta_sum = satisfied_by_threshold_set");
                    }
                }
            }
            let est = estimate_round_success(&inst, &sol.x, trials, seed);
            for i in 0..inst.num_groups() {
                let _ = writeln!(
                    text,
                    "group {i} success_freq = {:.6} radius99 = {:.6} meets_5_8 = {}",
                    est.frequency[i],
                    est.radius[i],
                    est.frequency[i] >= 5.0 / 8.0 - est.radius[i]
                );
            }
            let closed = expected_round_cost(&inst, &sol.x, &cfg);
            let _ = writeln!(text, "expected_round_cost = {closed:.9}");
            if trials > 0 {
                let sample = sample_round_cost(&inst, &sol.x, trials, seed);
                let _ = writeln!(
                    text,
                    "sampled_round_cost = {:.9} stderr = {:.9}",
                    sample.mean, sample.std_err
                );
            }
            emit(&text, out.as_deref())
        }
        Command::Bench(b) => {
            if b.n_min > b.n_max
                || b.m_min > b.m_max
                || b.r_min > b.r_max
                || b.r_min == 0
                || b.n_min < 2
            {
                return Err(Failure::Input(
                    "bench ranges must be nonempty with n >= 2 and r >= 1".into(),
                ));
            }
            let cfg = BenchConfig {
                instances: b.trials,
                n: (b.n_min, b.n_max),
                m: (b.m_min, b.m_max),
                r: (b.r_min, b.r_max),
                weight: (1, b.weight_max.max(1)),
                overlap: b.overlap,
                mode: b.mode.into(),
                rounds_constant: b.rounds_constant,
                mc_trials: b.mc_trials,
                timing: b.timing,
                ..Default::default()
            };
            let records = run_bench(&cfg, b.seed);
            emit(&to_csv(&records, cfg.timing), b.out.as_deref())
        }
        Command::Gap { leaves, out } => {
            if leaves.contains(&0) {
                return Err(Failure::Input("star sizes must be at least 1".into()));
            }
            let rows = leaves
                .iter()
                .map(|&d| gap_row(d))
                .collect::<Result<Vec<_>, _>>()
                .map_err(solver)?;
            emit(&gap_table_text(&rows), out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
