use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, LevelFilter};

use cloner_lab::channel::{ChoiMatrix, Fixture};
use cloner_lab::ensemble::{build_R, AncillaSpec, InputEnsemble};
use cloner_lab::error::Error;
use cloner_lab::lab::{self, ChannelCloner};
use cloner_lab::metrics::{metrics_row, BlochPureState, MetricsRow};
use cloner_lab::sdp::{SolutionJson, DEFAULT_TOL};
use cloner_lab::ucqc::{selected_sequence, Ucqc};

#[derive(Parser)]
#[command(name = "cloner-lab", version, about = "Design and evaluate optimal qubit cloners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the design program for an ensemble and write the solution JSON.
    Design {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Iteration log as CSV.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Metrics of a channel for one input state.
    Evaluate {
        #[arg(long)]
        choi: PathBuf,
        #[arg(long, default_value = "pure-zero", value_parser = parse_ancilla)]
        ancilla: AncillaSpec,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
    },
    /// All nine cloner comparisons.
    Table1 {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Metrics along θ ∈ [0, π] at φ = 0.
    SweepMeridian {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value = "181x1", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Clone fidelity over a (θ, φ) grid.
    SweepSurface {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value = "61x61", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The four-CNOT reference cloner.
    Ucqc {
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
    },
    /// Check that a channel is valid and optimal for its ensemble.
    Certify {
        #[arg(long, conflicts_with_all = ["choi", "ensemble"])]
        fixture: Option<String>,
        #[arg(long, requires = "ensemble")]
        choi: Option<PathBuf>,
        #[arg(long)]
        ensemble: Option<PathBuf>,
    },
}

/// A channel from `--choi`, or one designed for the circle tilted by `--alpha`.
#[derive(Args)]
struct ChannelArgs {
    #[arg(long)]
    choi: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value = "pure-zero", value_parser = parse_ancilla)]
    ancilla: AncillaSpec,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

fn parse_ancilla(s: &str) -> Result<AncillaSpec, String> {
    match s {
        "pure-zero" => Ok(AncillaSpec::PureZero),
        "maximally-mixed" => Ok(AncillaSpec::MaximallyMixed),
        other => Err(format!("unknown ancilla '{other}' (pure-zero, maximally-mixed)")),
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let mut parts = s.split('x');
    let n = parts.next().unwrap_or("").parse::<usize>().map_err(|e| format!("grid '{s}': {e}"))?;
    let m = match parts.next() {
        Some(p) => p.parse::<usize>().map_err(|e| format!("grid '{s}': {e}"))?,
        None => 1,
    };
    if parts.next().is_some() || n == 0 || m == 0 {
        return Err(format!("grid '{s}' must be NxM with positive sizes"));
    }
    Ok((n, m))
}

enum Failure {
    Input(Error),
    Lib(Error),
    Fail(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) | Failure::Lib(Error::InvalidTolerance(_)) => 2,
            Failure::Lib(Error::NotConverged { .. }) => 3,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Input(_) | Failure::Lib(Error::InvalidTolerance(_)) => "input",
            Failure::Lib(Error::NotConverged { .. }) => "not-converged",
            Failure::Lib(_) => "runtime",
            Failure::Fail(_) => "certification",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(e) | Failure::Lib(e) => e.to_string(),
            Failure::Fail(s) => s.clone(),
        }
    }
}

fn init_logging() {
    let level = match std::env::var("CLONER_LAB_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("trace") => LevelFilter::Trace,
        _ => LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn read_ensemble(path: &Path) -> Result<InputEnsemble, Failure> {
    InputEnsemble::load(path).map_err(Failure::Input)
}

/// Accepts a bare Choi JSON or a design solution JSON.
fn read_choi(path: &Path) -> Result<ChoiMatrix, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(e.into()))?;
    if let Ok(sol) = serde_json::from_str::<SolutionJson>(&text) {
        return ChoiMatrix::from_json(&sol.choi).map_err(Failure::Input);
    }
    ChoiMatrix::from_json_str(&text).map_err(Failure::Input)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path).map_err(Error::from)?))
}

fn build_cloner(args: &ChannelArgs) -> Result<ChannelCloner, Failure> {
    let choi = match &args.choi {
        Some(path) => read_choi(path)?,
        None => {
            info!("designing for the circle tilted by {}", args.alpha);
            let ens = InputEnsemble::main_circle(args.alpha, args.ancilla.clone());
            lab::design(&ens, args.tol)?.x_opt
        }
    };
    Ok(ChannelCloner::new(choi, args.ancilla.clone())?)
}

fn print_row(row: &MetricsRow) {
    for (name, v) in MetricsRow::COLUMNS.iter().zip(row.as_array()) {
        println!("{name:<8} {}", lab::fmt5(v));
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Design { ensemble, out, tol, log } => {
            let ens = read_ensemble(&ensemble)?;
            let sol = lab::design(&ens, tol)?;
            println!("F* = {:.6}", sol.f_star);
            println!("gap = {:.3e}", sol.gap);
            println!("iterations = {}", sol.iterations());
            if let Some(path) = out {
                let mut w = create(&path)?;
                w.write_all(sol.to_json_string()?.as_bytes()).map_err(Error::from)?;
                w.flush().map_err(Error::from)?;
            }
            if let Some(path) = log {
                sol.write_log(create(&path)?)?;
            }
        }
        Command::Evaluate { choi, ancilla, theta, phi } => {
            let cloner = ChannelCloner::new(read_choi(&choi)?, ancilla)?;
            print_row(&metrics_row(&cloner, &BlochPureState::new(theta, phi))?);
        }
        Command::Table1 { out, tol } => {
            let rows = lab::table1(tol)?;
            print!("{}", lab::render_table(&rows));
            if let Some(path) = out {
                lab::write_table_csv(&rows, create(&path)?)?;
            }
        }
        Command::SweepMeridian { channel, grid, out } => {
            let points = lab::sweep_meridian(&build_cloner(&channel)?, grid.0)?;
            match out {
                Some(path) => lab::write_meridian_csv(&points, create(&path)?)?,
                None => lab::write_meridian_csv(&points, io::stdout().lock())?,
            }
        }
        Command::SweepSurface { channel, grid, out } => {
            let cloner = build_cloner(&channel)?;
            let points = lab::sweep_surface(&cloner, grid.0, grid.1)?;
            let circle = lab::circle_fidelities(&cloner, channel.alpha, 64)?;
            let max = points.iter().map(|p| p.f_c).fold(f64::MIN, f64::max);
            let (lo, hi) = circle.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            eprintln!("grid max F_C = {max:.6}; on-circle F_C in [{lo:.6}, {hi:.6}]");
            match out {
                Some(path) => lab::write_surface_csv(&points, create(&path)?)?,
                None => lab::write_surface_csv(&points, io::stdout().lock())?,
            }
        }
        Command::Ucqc { theta, phi } => {
            let seq: Vec<String> = selected_sequence().iter().map(|g| g.to_string()).collect();
            println!("sequence {}", seq.join(" "));
            print_row(&metrics_row(&Ucqc, &BlochPureState::new(theta, phi))?);
        }
        Command::Certify { fixture, choi, ensemble } => {
            let report = match (fixture, choi, ensemble) {
                (Some(name), _, _) => lab::certify_fixture(name.parse::<Fixture>().map_err(Failure::Input)?)?,
                (None, Some(choi), Some(ens)) => {
                    let r = build_R(&read_ensemble(&ens)?)?;
                    lab::certify(&read_choi(&choi)?, &r, None)?
                }
                _ => return Err(Failure::Input(Error::InvalidEnsemble("certify needs --fixture or --choi with --ensemble".into()))),
            };
            println!("{report}");
            if !report.certified {
                return Err(Failure::Fail(report.to_string()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error kind=usage code=2 message={first:?}");
            return ExitCode::from(2);
        }
    };
    init_logging();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = f.message().replace('\n', " ");
            eprintln!("error kind={} code={} message={msg:?}", f.kind(), f.code());
            ExitCode::from(f.code())
        }
    }
}
