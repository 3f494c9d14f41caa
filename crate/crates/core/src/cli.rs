//! Command-line surface: argument parsing, validation and the artifact
//! tables produced by each subcommand.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::entanglement::{bond_profile_of, Measure};
use crate::error::Error as ChainError;
use crate::hilbert::{ChainSpec, SpinKind};
use crate::output::{write_atomic, Format, Table};
use crate::spectra::{SolvedChain, DEFAULT_DEGENERACY_TOL};
use crate::thermal::{temperature_grid, TemperatureScale, ThermalChain, DEFAULT_THRESHOLD_TOL};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(ChainError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io { .. } => 1,
        }
    }
}

impl From<ChainError> for CliError {
    fn from(e: ChainError) -> Self {
        if e.is_invalid_input() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Compute(e)
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "openchain",
    version,
    about = "Entanglement in open Heisenberg chains by exact diagonalization"
)]
pub struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distinct energy levels with degeneracies.
    Spectrum(SpectrumArgs),
    /// Nearest-neighbour entanglement along the chain for one level.
    Profile(ProfileArgs),
    /// Thermal entanglement of one bond over a temperature grid.
    Thermal(ThermalArgs),
    /// Temperature above which one bond's entanglement vanishes.
    Threshold(ThresholdArgs),
    /// Data behind one of the four figures, as a long-format CSV.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    #[arg(long, value_parser = parse_spin)]
    pub spin: SpinKind,
    #[arg(long)]
    pub length: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub coupling: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Relative degeneracy tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, default_value = "ground", value_parser = parse_level)]
    pub level: usize,
    #[arg(long)]
    pub measure: Option<Measure>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BondArgs {
    #[arg(long, num_args = 2, value_names = ["I", "J"], default_values_t = [1, 2])]
    pub bond: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ThermalArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub bond: BondArgs,
    #[arg(long)]
    pub measure: Option<Measure>,
    #[arg(long, default_value_t = 0.05)]
    pub tmin: f64,
    #[arg(long, default_value_t = 3.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 60)]
    pub steps: usize,
    #[arg(long, default_value = "lin")]
    pub tscale: TemperatureScale,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub bond: BondArgs,
    /// Bisection tolerance on the temperature.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub id: u8,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value = "csv")]
    pub format: Format,
}

fn parse_spin(s: &str) -> Result<SpinKind, String> {
    s.parse().map_err(|e: ChainError| e.to_string())
}

fn parse_level(s: &str) -> Result<usize, String> {
    match s {
        "ground" => Ok(0),
        "first" => Ok(1),
        k => k.parse().map_err(|_| format!("level must be `ground`, `first` or an index, got `{k}`")),
    }
}

/// Temperatures used for the thermal figures.
pub const FIGURE_TMIN: f64 = 0.02;
pub const FIGURE_TMAX: f64 = 3.0;
pub const FIGURE_STEPS: usize = 150;

/// Fully validated settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub format: Format,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Spectrum { spec: ChainSpec, degeneracy_tol: f64 },
    Profile { spec: ChainSpec, level: usize, measure: Measure, degeneracy_tol: f64 },
    Thermal { spec: ChainSpec, bond: (usize, usize), measure: Measure, grid: Vec<f64> },
    Threshold { spec: ChainSpec, bond: (usize, usize), tol: f64 },
    Figure { id: u8 },
}

fn chain_spec(args: &ChainArgs) -> Result<ChainSpec, CliError> {
    Ok(ChainSpec::new(args.spin, args.length, args.coupling)?)
}

fn positive_tol(tol: Option<f64>, default: f64) -> Result<f64, CliError> {
    let t = tol.unwrap_or(default);
    if !(t > 0.0) || !t.is_finite() {
        return Err(CliError::Usage(format!("tolerance must be positive, got {t}")));
    }
    Ok(t)
}

fn measure_for(spec: &ChainSpec, requested: Option<Measure>) -> Result<Measure, CliError> {
    let m = requested.unwrap_or(Measure::for_spin(spec.spin()));
    m.check_spin(spec.spin())?;
    Ok(m)
}

fn bond_pair(spec: &ChainSpec, args: &BondArgs) -> Result<(usize, usize), CliError> {
    let (i, j) = (args.bond[0], args.bond[1]);
    spec.check_pair(i, j)?;
    Ok((i, j))
}

impl RunConfig {
    pub fn from_command(command: &Command) -> Result<Self, CliError> {
        match command {
            Command::Spectrum(a) => Ok(Self {
                task: Task::Spectrum {
                    spec: chain_spec(&a.chain)?,
                    degeneracy_tol: positive_tol(a.tol, DEFAULT_DEGENERACY_TOL)?,
                },
                format: a.output.format,
                out: a.output.out.clone(),
            }),
            Command::Profile(a) => {
                let spec = chain_spec(&a.chain)?;
                Ok(Self {
                    task: Task::Profile {
                        spec,
                        level: a.level,
                        measure: measure_for(&spec, a.measure)?,
                        degeneracy_tol: positive_tol(a.tol, DEFAULT_DEGENERACY_TOL)?,
                    },
                    format: a.output.format,
                    out: a.output.out.clone(),
                })
            }
            Command::Thermal(a) => {
                let spec = chain_spec(&a.chain)?;
                Ok(Self {
                    task: Task::Thermal {
                        spec,
                        bond: bond_pair(&spec, &a.bond)?,
                        measure: measure_for(&spec, a.measure)?,
                        grid: temperature_grid(a.tmin, a.tmax, a.steps, a.tscale)?,
                    },
                    format: a.output.format,
                    out: a.output.out.clone(),
                })
            }
            Command::Threshold(a) => {
                let spec = chain_spec(&a.chain)?;
                Ok(Self {
                    task: Task::Threshold {
                        spec,
                        bond: bond_pair(&spec, &a.bond)?,
                        tol: positive_tol(a.tol, DEFAULT_THRESHOLD_TOL)?,
                    },
                    format: a.output.format,
                    out: a.output.out.clone(),
                })
            }
            Command::Figure(a) => Ok(Self {
                task: Task::Figure { id: a.id },
                format: a.format,
                out: Some(a.out.join(format!("fig{}.{}", a.id, a.format.extension()))),
            }),
        }
    }
}

pub fn spectrum_table(spec: ChainSpec, degeneracy_tol: f64) -> Result<Table, CliError> {
    let chain = SolvedChain::with_tolerance(spec, degeneracy_tol)?;
    let mut t = Table::new(["index", "energy", "degeneracy"]);
    for level in &chain.levels {
        t.push(vec![level.index.into(), level.energy.into(), level.degeneracy().into()]);
    }
    Ok(t)
}

pub fn profile_table(
    spec: ChainSpec,
    level: usize,
    measure: Measure,
    degeneracy_tol: f64,
) -> Result<Table, CliError> {
    let chain = SolvedChain::with_tolerance(spec, degeneracy_tol)?;
    let p = bond_profile_of(&chain, level, measure)?;
    let mut t = Table::new(["bond", "value", "oracle"]);
    for (k, (v, o)) in p.values.iter().zip(&p.oracle).enumerate() {
        t.push(vec![(k + 1).into(), (*v).into(), (*o).into()]);
    }
    Ok(t)
}

pub fn thermal_table(
    spec: ChainSpec,
    bond: (usize, usize),
    measure: Measure,
    grid: &[f64],
) -> Result<Table, CliError> {
    let curve = ThermalChain::new(spec)?.scan(bond.0, bond.1, grid, measure)?;
    let mut t = Table::new(["T", "value"]);
    for (temp, v) in curve.points {
        t.push(vec![temp.into(), v.into()]);
    }
    Ok(t)
}

pub fn threshold_table(spec: ChainSpec, bond: (usize, usize), tol: f64) -> Result<Table, CliError> {
    let r = ThermalChain::new(spec)?.threshold(bond.0, bond.1, tol)?;
    let mut t = Table::new([
        "spin",
        "length",
        "i",
        "j",
        "t_threshold",
        "bracket_lo",
        "bracket_hi",
        "iterations",
        "term",
    ]);
    t.push(vec![
        spec.spin().to_string().into(),
        spec.length().into(),
        bond.0.into(),
        bond.1.into(),
        r.temperature.into(),
        r.bracket.0.into(),
        r.bracket.1.into(),
        r.iterations.into(),
        r.term.to_string().into(),
    ]);
    Ok(t)
}

const FIGURE_COLUMNS: [&str; 5] = ["figure_id", "L", "level_or_T", "bond_or_measure", "value"];

fn profile_figure(
    id: u8,
    spin: SpinKind,
    lengths: std::ops::RangeInclusive<usize>,
) -> Result<Table, CliError> {
    let mut t = Table::new(FIGURE_COLUMNS);
    let measure = Measure::for_spin(spin);
    for l in lengths {
        let chain = SolvedChain::new(ChainSpec::antiferro(spin, l)?)?;
        for (level, label) in [(0, "ground"), (1, "first")] {
            let p = bond_profile_of(&chain, level, measure)?;
            for (k, v) in p.values.iter().enumerate() {
                t.push(vec![(id as usize).into(), l.into(), label.into(), (k + 1).into(), (*v).into()]);
            }
        }
    }
    Ok(t)
}

fn thermal_figure(id: u8, spin: SpinKind) -> Result<Table, CliError> {
    let mut t = Table::new(FIGURE_COLUMNS);
    let measure = Measure::for_spin(spin);
    let grid = temperature_grid(FIGURE_TMIN, FIGURE_TMAX, FIGURE_STEPS, TemperatureScale::Lin)?;
    for l in 2..=6 {
        let curve = ThermalChain::new(ChainSpec::antiferro(spin, l)?)?.scan(1, 2, &grid, measure)?;
        for (temp, v) in curve.points {
            t.push(vec![(id as usize).into(), l.into(), temp.into(), measure.name().into(), v.into()]);
        }
    }
    Ok(t)
}

/// Long-format table for figure `id` (1..=4).
pub fn figure_table(id: u8) -> Result<Table, CliError> {
    match id {
        1 => profile_figure(1, SpinKind::Half, 3..=10),
        2 => thermal_figure(2, SpinKind::Half),
        3 => profile_figure(3, SpinKind::One, 3..=6),
        4 => thermal_figure(4, SpinKind::One),
        other => Err(CliError::Usage(format!("figure id must be 1..4, got {other}"))),
    }
}

pub fn run_task(task: &Task) -> Result<Table, CliError> {
    match task {
        Task::Spectrum { spec, degeneracy_tol } => spectrum_table(*spec, *degeneracy_tol),
        Task::Profile { spec, level, measure, degeneracy_tol } => {
            profile_table(*spec, *level, *measure, *degeneracy_tol)
        }
        Task::Thermal { spec, bond, measure, grid } => thermal_table(*spec, *bond, *measure, grid),
        Task::Threshold { spec, bond, tol } => threshold_table(*spec, *bond, *tol),
        Task::Figure { id } => figure_table(*id),
    }
}

fn emit(table: &Table, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = table.render(format);
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
            }
            write_atomic(path, &text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

/// Runs a parsed command line end to end.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let config = RunConfig::from_command(&cli.command)?;
    let table = run_task(&config.task)?;
    emit(&table, config.format, config.out.as_deref())
}
