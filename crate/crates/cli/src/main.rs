use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use stdsub_cli::scenario::{Mode, Scenario};
use stdsub_cli::{load_scenario, run_scenario, CliError};

#[derive(Parser, Debug)]
#[command(name = "stdsub", version, about = "Verification workbench for standard subspaces and their modular theory")]
struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replace every check's tolerance with this value.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON scenario file; its mode is used when no subcommand is given.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Record wall time in the report (breaks byte-for-byte reproducibility).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Complement duality on random subspaces.
    Lattice(LatticeArgs),
    /// Modular data of random standard subspaces, fibers and pairing constants.
    Modular(ModularArgs),
    /// Cross-product checks on skeleton-backed and truncated towers.
    Tower,
    /// Exact checks on symplectic skeletons.
    Skeleton(SkeletonArgs),
    /// Extension construction on an angle sequence model.
    Seqmodel(SeqmodelArgs),
    /// Type labels of constant-angle tensor products.
    Classify,
    /// Truncated Fock space checks.
    Fock(FockArgs),
    /// Every check group plus a determinism repeat.
    Suite,
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[arg(long)]
    d_max: Option<usize>,
    #[arg(long)]
    cases: Option<usize>,
}

#[derive(Args, Debug)]
struct ModularArgs {
    #[arg(long)]
    d_max: Option<usize>,
    #[arg(long)]
    cases: Option<usize>,
    #[arg(long)]
    grid_points: Option<usize>,
}

#[derive(Args, Debug)]
struct SkeletonArgs {
    /// Block dimensions of a single skeleton, e.g. `1,1,1,1`.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    even_cases: Option<usize>,
    #[arg(long)]
    odd_cases: Option<usize>,
}

#[derive(Args, Debug)]
struct SeqmodelArgs {
    /// Angle descriptor as inline JSON, e.g. `{"kind":"power_law","c":1,"alpha":1}`.
    #[arg(long)]
    angles: Option<String>,
    #[arg(long)]
    cross_check_n: Option<usize>,
}

#[derive(Args, Debug)]
struct FockArgs {
    /// Accepted for `fock verify`; the checks are the same.
    action: Option<FockAction>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(clap::ValueEnum, Clone, Debug)]
enum FockAction {
    Verify,
}

fn mode_of(cmd: &Command) -> Mode {
    match cmd {
        Command::Lattice(_) => Mode::Lattice,
        Command::Modular(_) => Mode::Modular,
        Command::Tower => Mode::Tower,
        Command::Skeleton(_) => Mode::Skeleton,
        Command::Seqmodel(_) => Mode::Seqmodel,
        Command::Classify => Mode::Classify,
        Command::Fock(_) => Mode::Fock,
        Command::Suite => Mode::Suite,
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn apply_flags(s: &mut Scenario, cmd: Option<Command>) -> Result<(), CliError> {
    match cmd {
        Some(Command::Lattice(a)) => {
            set(&mut s.lattice.d_max, a.d_max);
            set(&mut s.lattice.cases, a.cases);
        }
        Some(Command::Modular(a)) => {
            set(&mut s.modular.d_max, a.d_max);
            set(&mut s.modular.cases, a.cases);
            set(&mut s.modular.grid_points, a.grid_points);
        }
        Some(Command::Skeleton(a)) => {
            if a.dims.is_some() {
                s.skeleton.dims = a.dims;
            }
            set(&mut s.skeleton.even_cases, a.even_cases);
            set(&mut s.skeleton.odd_cases, a.odd_cases);
        }
        Some(Command::Seqmodel(a)) => {
            if let Some(text) = a.angles {
                s.seqmodel.angles = serde_json::from_str(&text).map_err(|e| CliError::Parse {
                    line: e.line(),
                    column: e.column(),
                    message: format!("--angles: {e}"),
                })?;
            }
            set(&mut s.seqmodel.cross_check_n, a.cross_check_n);
        }
        Some(Command::Fock(a)) => {
            set(&mut s.fock.d, a.d);
            set(&mut s.fock.cutoff, a.cutoff);
            set(&mut s.fock.radius, a.radius);
            set(&mut s.fock.samples, a.samples);
        }
        _ => {}
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let mut scenario = match (&cli.scenario, &cli.command) {
        (Some(path), cmd) => {
            let s = load_scenario(path)?;
            if let Some(cmd) = cmd {
                if mode_of(cmd) != s.mode {
                    return Err(CliError::Parse {
                        line: 0,
                        column: 0,
                        message: format!("subcommand {:?} does not match scenario mode {:?}", mode_of(cmd), s.mode),
                    });
                }
            }
            s
        }
        (None, Some(cmd)) => Scenario::new(mode_of(cmd), 0),
        (None, None) => {
            return Err(CliError::Parse {
                line: 0,
                column: 0,
                message: "a subcommand or --scenario is required".into(),
            })
        }
    };
    set(&mut scenario.seed, cli.seed);
    if cli.tol.is_some() {
        scenario.tolerance = cli.tol;
    }
    if let Some(out) = &cli.out {
        scenario.output = Some(out.display().to_string());
    }
    apply_flags(&mut scenario, cli.command)?;

    let start = Instant::now();
    let mut report = run_scenario(&scenario)?;
    if cli.timing {
        report.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    let json = report.to_json();
    match &scenario.output {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    eprint!("{}", report.summary_table());
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
