use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sector_snake::dynamics::ScheduleConfig;
use sector_snake::experiments::reproduce::{self, ReproduceOptions};
use sector_snake::experiments::scan::{self, ScanGrid, TargetClass};
use sector_snake::experiments::{banding, controls, diagonal_qa, sensor, tables};
use sector_snake::experiments::{file_sha256, write_csv, ExperimentError, Setup};
use sector_snake::graphs::{graph_stats, hypercube_graph, path_window_graph, sector_graph};
use sector_snake::hamiltonian::{BarrierTargetConfig, DriverConfig, SensorModelConfig};
use sector_snake::ordering::{
    build_ordering, load_certificate, save_certificate, strict_generate, validate_states, BitString, GeneratorBudget,
    OrderingKind, StrictOutcome, ValidationMode,
};

#[derive(Parser)]
#[command(name = "sector-snake", version, about = "Sector/path hypercube orderings and graph-local annealing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an ordering and write its certificate
    Generate(GenerateArgs),
    /// Check a certificate or a bit-string file
    Validate(ValidateArgs),
    /// Adjacent Hamming-distance diagnostics of an ordering
    Diagnose(DiagnoseArgs),
    /// One anneal on the strict-window barrier target
    Anneal(AnnealArgs),
    /// Fine (alpha, epsilon) scan over target classes
    Scan(ScanArgs),
    /// Driver ablation, convergence, anneal-time and finite-size tables
    Ablate(AblateArgs),
    /// Deterministic and seeded-ensemble ordering controls
    Controls(ControlsArgs),
    /// Transverse-field anneals on diagonal path costs
    DiagonalQa(DiagonalQaArgs),
    /// MeanBand/OffBand table
    Band(BandArgs),
    /// Sensor-placement benchmark
    Sensor(SensorArgs),
    /// Minimum instantaneous gaps along the interpolation
    Gaps(GapsArgs),
    /// Regenerate every table and check it against the reference values
    ReproduceAll(ReproduceArgs),
    /// Edge counts and spectral extremes of a graph
    GraphStats(GraphStatsArgs),
}

#[derive(Args, Clone)]
struct OutArg {
    /// Output directory
    #[arg(long, env = "SECTOR_SNAKE_OUT", default_value = "results")]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct PhysicsArgs {
    #[arg(long, default_value_t = 8)]
    n: u32,
    /// Total anneal time
    #[arg(long = "T", default_value_t = 80.0)]
    total_time: f64,
    #[arg(long, default_value_t = 35)]
    slices: usize,
    /// Target path window
    #[arg(long, default_value_t = 4)]
    w_t: usize,
    /// Barrier height
    #[arg(long, default_value_t = 0.35)]
    h: f64,
    /// Target position as a fraction of the path length
    #[arg(long = "p-star", default_value_t = 0.5)]
    p_star: f64,
}

impl PhysicsArgs {
    fn schedule(&self) -> Result<ScheduleConfig, CliError> {
        ScheduleConfig::new(self.total_time, self.slices).map_err(|e| CliError::Config(e.to_string()))
    }

    fn barrier(&self) -> Result<BarrierTargetConfig, CliError> {
        let cfg = BarrierTargetConfig { w_t: self.w_t, h: self.h, p_star_frac: self.p_star, ..Default::default() };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    fn setup(&self) -> Result<Setup, CliError> {
        Ok(Setup::new(self.n, self.schedule()?, self.barrier()?)?)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value = "strict")]
    kind: OrderingKind,
    #[arg(long)]
    seed: Option<u64>,
    /// Strict generator node budget
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Strict generator wall-clock budget
    #[arg(long)]
    max_seconds: Option<f64>,
    /// Also print the bit strings, one per line
    #[arg(long)]
    print: bool,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ValidateArgs {
    /// Certificate JSON, or a text file with one bit string per line
    input: PathBuf,
    /// Bit-string width, required for text input
    #[arg(long)]
    n: Option<u32>,
    /// strict, skeleton-only or bijection-only (text input)
    #[arg(long, default_value = "strict")]
    mode: String,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value = "strict")]
    kind: OrderingKind,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct AnnealArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.15)]
    epsilon: f64,
    /// Driver path window
    #[arg(long, default_value_t = 8)]
    w: usize,
    /// Ordering defining the driver's path component
    #[arg(long, default_value = "strict")]
    kind: OrderingKind,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    /// Target class; all classes when omitted
    #[arg(long)]
    target: Option<TargetClass>,
    /// Grid JSON file
    #[arg(long)]
    grid: Option<PathBuf>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum AblateTable {
    Ablation,
    Convergence,
    TimeSweep,
    FiniteSize,
}

#[derive(Args)]
struct AblateArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[arg(long, value_enum, default_value = "ablation")]
    table: AblateTable,
    #[arg(long, value_delimiter = ',', default_value = "35,70,140")]
    slice_counts: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80,120,160")]
    times: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "5,6,7,8")]
    sizes: Vec<u32>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ControlsArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[arg(long, default_value_t = controls::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = controls::DEFAULT_BASE_SEED)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct DiagonalQaArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct BandArgs {
    #[arg(long, default_value_t = 8)]
    n: u32,
    #[arg(long, default_value_t = banding::DEFAULT_RANDOM_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = banding::DEFAULT_BASE_SEED)]
    seed: u64,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct SensorArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    /// Driver path window
    #[arg(long, default_value_t = sensor::SENSOR_DRIVER_WINDOW)]
    w: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct GapsArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[arg(long, default_value_t = sector_snake::dynamics::DEFAULT_GAP_POINTS)]
    points: usize,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Args)]
struct ReproduceArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long, default_value_t = controls::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = controls::DEFAULT_BASE_SEED)]
    seed: u64,
    /// Node budget for the n = 9 strict attempt
    #[arg(long, default_value_t = 10_000_000)]
    max_nodes: u64,
    /// Wall-clock budget for the n = 9 strict attempt
    #[arg(long)]
    max_seconds: Option<f64>,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum GraphChoice {
    Hypercube,
    Sector,
    Path,
}

#[derive(Args)]
struct GraphStatsArgs {
    #[arg(long, value_enum, default_value = "hypercube")]
    graph: GraphChoice,
    #[arg(long, default_value_t = 8)]
    n: u32,
    /// Ordering for the path-window graph
    #[arg(long, default_value = "strict")]
    kind: OrderingKind,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 4)]
    w: usize,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Failed(String),
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        CliError::Config(e.to_string())
    }
}

macro_rules! config_err {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Config(e.to_string())
            }
        }
    )*};
}
config_err!(
    std::io::Error,
    serde_json::Error,
    sector_snake::ordering::OrderingError,
    sector_snake::ordering::CertificateError,
    sector_snake::graphs::GraphError,
    sector_snake::hamiltonian::HamiltonianError
);

#[derive(Serialize)]
struct RunManifest<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    config: C,
    files: Vec<(String, String)>,
}

fn write_table<T: Serialize>(out: &Path, name: &str, rows: &[T], files: &mut Vec<(String, String)>) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    let path = out.join(name);
    write_csv(&path, rows)?;
    files.push((name.to_string(), file_sha256(&path)?));
    println!("wrote {}", path.display());
    Ok(())
}

fn finish<C: Serialize>(out: &Path, command: &str, config: C, files: Vec<(String, String)>) -> Result<(), CliError> {
    let manifest = RunManifest { command, version: env!("CARGO_PKG_VERSION"), config, files };
    let path = out.join(format!("{command}.manifest.json"));
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    println!("manifest {}", path.display());
    Ok(())
}

fn physics_json(p: &PhysicsArgs) -> serde_json::Value {
    serde_json::json!({
        "n": p.n, "total_time": p.total_time, "slices": p.slices,
        "w_t": p.w_t, "h": p.h, "p_star_frac": p.p_star,
    })
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let out = &args.out.out;
    fs::create_dir_all(out)?;
    let ordering = if args.kind == OrderingKind::Strict {
        let budget = GeneratorBudget { max_nodes: args.max_nodes, max_seconds: args.max_seconds };
        match strict_generate(args.n, &budget)? {
            StrictOutcome::Complete(o) => o,
            StrictOutcome::Incomplete(log) => {
                let path = out.join(format!("strict_n{}_attempt.json", args.n));
                fs::write(&path, serde_json::to_string_pretty(&log)? + "\n")?;
                println!(
                    "incomplete after {} nodes ({:?}), deepest index {}; attempt log {}",
                    log.nodes,
                    log.reason,
                    log.deepest_index,
                    path.display()
                );
                return Ok(());
            }
        }
    } else {
        build_ordering(args.kind, args.n, args.seed)?
    };
    if args.print {
        for t in 0..ordering.len() {
            println!("{}", ordering.state(t));
        }
    }
    let path = out.join(match ordering.seed() {
        Some(seed) => format!("{}_n{}_seed{seed}.json", ordering.kind(), ordering.n()),
        None => format!("{}_n{}.json", ordering.kind(), ordering.n()),
    });
    save_certificate(&ordering, &path)?;
    println!("certificate {}", path.display());
    Ok(())
}

fn parse_mode(mode: &str) -> Result<ValidationMode, CliError> {
    match mode.replace('_', "-").as_str() {
        "strict" => Ok(ValidationMode::Strict),
        "skeleton-only" | "skeleton" => Ok(ValidationMode::SkeletonOnly),
        "bijection-only" | "bijection" => Ok(ValidationMode::BijectionOnly),
        other => Err(CliError::Config(format!("unknown validation mode {other:?}"))),
    }
}

fn validate(args: ValidateArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.input)?;
    let report = if text.trim_start().starts_with('{') {
        let ordering = load_certificate(&args.input).map_err(|e| CliError::Failed(e.to_string()))?;
        ordering.validate(ordering.kind().validation_mode())
    } else {
        let n = args.n.ok_or_else(|| CliError::Config("--n is required for bit-string files".into()))?;
        let states = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| BitString::parse(l, n).map(|b| b.value()))
            .collect::<Result<Vec<_>, _>>()?;
        validate_states(n, &states, parse_mode(&args.mode)?)
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("validation failed: {:?}", report.first_failure().map(|c| &c.name))))
    }
}

fn diagnose(args: DiagnoseArgs) -> Result<(), CliError> {
    let ordering = build_ordering(args.kind, args.n, args.seed)?;
    let d = ordering.diagnostics();
    println!(
        "{} n={} mean_adjacent_dh={:.3} max_adjacent_dh={} fraction_dh1={:.3}",
        ordering.label(),
        args.n,
        d.mean_adjacent_dh,
        d.max_adjacent_dh,
        d.fraction_dh1
    );
    Ok(())
}

fn anneal(args: AnnealArgs) -> Result<(), CliError> {
    let setup = args.physics.setup()?;
    let config = DriverConfig::new(args.alpha, args.epsilon, args.w)?;
    let source = build_ordering(args.kind, setup.n, args.seed)?;
    let target = setup.barrier_target(&setup.strict)?;
    let out = setup.anneal(&config, &source, &target)?;
    println!("fidelity {:.6} energy_residual {:.6}", out.fidelity, out.energy_residual);
    let row = tables::AnnealRow::new(
        &sector_snake::experiments::NamedDriver { label: "custom", config },
        setup.n,
        &setup.schedule,
        &out,
    );
    let mut files = Vec::new();
    write_table(&args.out.out, "anneal.csv", &[row], &mut files)?;
    let config_json = serde_json::json!({
        "physics": physics_json(&args.physics), "alpha": args.alpha, "epsilon": args.epsilon,
        "w": args.w, "path_ordering": source.label(),
    });
    finish(&args.out.out, "anneal", config_json, files)
}

fn scan_cmd(args: ScanArgs) -> Result<(), CliError> {
    let setup = args.physics.setup()?;
    let grid = match &args.grid {
        Some(path) => ScanGrid::load(path)?,
        None => ScanGrid::reproduction(),
    };
    let targets: Vec<TargetClass> = args.target.map_or(TargetClass::ALL.to_vec(), |t| vec![t]);
    let scans = scan::run_fine_scan(&setup, &targets, &grid)?;
    let cells: Vec<_> = scans.iter().flat_map(|s| s.cells.clone()).collect();
    let summary: Vec<_> = scans.iter().map(|s| scan::summary_row(&setup, s)).collect();
    for s in &summary {
        println!(
            "{}: best {:.4} at ({}, alpha={}, epsilon={})",
            s.target, s.best_hybrid, s.best_source, s.best_alpha, s.best_epsilon
        );
    }
    let mut files = Vec::new();
    write_table(&args.out.out, "fine_scan.csv", &cells, &mut files)?;
    write_table(&args.out.out, "target_classes.csv", &summary, &mut files)?;
    finish(&args.out.out, "scan", serde_json::json!({"physics": physics_json(&args.physics), "grid": grid}), files)
}

fn print_anneal_rows(rows: &[tables::AnnealRow]) {
    for r in rows {
        println!(
            "{:<16} n={} T={} M={} fidelity {:.4} residual {:.4}",
            r.driver, r.n, r.total_time, r.slices, r.fidelity, r.energy_residual
        );
    }
}

fn ablate(args: AblateArgs) -> Result<(), CliError> {
    let schedule = args.physics.schedule()?;
    let barrier = args.physics.barrier()?;
    let (name, rows) = match args.table {
        AblateTable::FiniteSize => ("finite_size.csv", tables::run_finite_size(&args.sizes, &schedule, &barrier)?),
        table => {
            let setup = args.physics.setup()?;
            match table {
                AblateTable::Ablation => ("ablation.csv", tables::run_ablation(&setup)?),
                AblateTable::Convergence => ("convergence.csv", tables::run_convergence(&setup, &args.slice_counts)?),
                _ => ("time_sweep.csv", tables::run_time_sweep(&setup, &args.times)?),
            }
        }
    };
    print_anneal_rows(&rows);
    let mut files = Vec::new();
    write_table(&args.out.out, name, &rows, &mut files)?;
    let config = serde_json::json!({
        "physics": physics_json(&args.physics), "table": name,
        "slice_counts": args.slice_counts, "times": args.times, "sizes": args.sizes,
    });
    finish(&args.out.out, "ablate", config, files)
}

fn controls_cmd(args: ControlsArgs) -> Result<(), CliError> {
    let setup = args.physics.setup()?;
    let (samples, summary) = controls::run_controls(&setup, args.samples, args.seed)?;
    for s in &summary {
        println!("{:<13} {:<25} {:.4} +- {:.4}", s.mode, s.source, s.fidelity_mean, s.fidelity_std);
    }
    let mut files = Vec::new();
    write_table(&args.out.out, "controls_samples.csv", &samples, &mut files)?;
    write_table(&args.out.out, "controls_summary.csv", &summary, &mut files)?;
    let config = serde_json::json!({
        "physics": physics_json(&args.physics), "samples": args.samples, "base_seed": args.seed,
        "driver": controls::control_driver(),
    });
    finish(&args.out.out, "controls", config, files)
}

fn diagonal_qa_cmd(args: DiagonalQaArgs) -> Result<(), CliError> {
    let (rows, summary) = diagonal_qa::run_diagonal_qa(args.physics.n, &args.physics.schedule()?)?;
    for s in &summary {
        println!("{:<13} {:<7} {:.4}", s.family, s.encoding, s.mean_success);
    }
    let mut files = Vec::new();
    write_table(&args.out.out, "diagonal_qa.csv", &rows, &mut files)?;
    write_table(&args.out.out, "diagonal_qa_summary.csv", &summary, &mut files)?;
    finish(&args.out.out, "diagonal-qa", physics_json(&args.physics), files)
}

fn band(args: BandArgs) -> Result<(), CliError> {
    let (rows, samples) = banding::run_banding(args.n, args.samples, args.seed)?;
    for r in &rows {
        println!("{:<26} {:<13} {:.2}", r.family, r.ordering, r.mean_band);
    }
    let mut files = Vec::new();
    write_table(&args.out.out, "banding.csv", &rows, &mut files)?;
    write_table(&args.out.out, "banding_random.csv", &samples, &mut files)?;
    let config = serde_json::json!({"n": args.n, "samples": args.samples, "base_seed": args.seed});
    finish(&args.out.out, "band", config, files)
}

fn sensor_cmd(args: SensorArgs) -> Result<(), CliError> {
    let setup = args.physics.setup()?;
    let cfg = SensorModelConfig::default();
    let rows = sensor::run_sensor(&setup, &cfg, args.w)?;
    for r in &rows {
        println!("{:<17} fidelity {:.4} residual {:.4}", r.driver, r.fidelity, r.energy_residual);
    }
    let mut files = Vec::new();
    write_table(&args.out.out, "sensor.csv", &rows, &mut files)?;
    let config = serde_json::json!({"physics": physics_json(&args.physics), "sensor": cfg, "driver_window": args.w});
    finish(&args.out.out, "sensor", config, files)
}

fn gaps(args: GapsArgs) -> Result<(), CliError> {
    let setup = args.physics.setup()?;
    let (rows, profiles) = tables::run_gaps(&setup, args.points)?;
    for r in &rows {
        println!("{:<20} min gap {:.5} at s = {:.4}", r.driver, r.min_gap, r.argmin_s);
    }
    let mut files = Vec::new();
    write_table(&args.out.out, "mingap.csv", &rows, &mut files)?;
    write_table(&args.out.out, "gap_profiles.csv", &profiles, &mut files)?;
    finish(&args.out.out, "gaps", serde_json::json!({"physics": physics_json(&args.physics), "points": args.points}), files)
}

fn reproduce_all(args: ReproduceArgs) -> Result<(), CliError> {
    let grid = match &args.grid {
        Some(path) => ScanGrid::load(path)?,
        None => ScanGrid::reproduction(),
    };
    let opts = ReproduceOptions {
        n: args.physics.n,
        schedule: args.physics.schedule()?,
        barrier: args.physics.barrier()?,
        grid,
        control_samples: args.samples,
        control_seed: args.seed,
        attempt_budget: GeneratorBudget { max_nodes: Some(args.max_nodes), max_seconds: args.max_seconds },
        ..ReproduceOptions::default()
    };
    let (manifest, path) = reproduce::reproduce_all(&args.out.out, &opts)?;
    for step in manifest.steps.iter().filter(|s| s.error.is_some()) {
        println!("step {} failed: {}", step.step, step.error.as_deref().unwrap_or(""));
    }
    for line in &manifest.acceptance {
        println!("{line}");
    }
    println!("manifest {}", path.display());
    if manifest.all_passed {
        Ok(())
    } else {
        Err(CliError::Failed("one or more acceptance rows outside tolerance".into()))
    }
}

fn graph_stats_cmd(args: GraphStatsArgs) -> Result<(), CliError> {
    let graph = match args.graph {
        GraphChoice::Hypercube => hypercube_graph(args.n)?,
        GraphChoice::Sector => sector_graph(args.n)?,
        GraphChoice::Path => path_window_graph(&build_ordering(args.kind, args.n, args.seed)?, args.w)?,
    };
    println!("{}", serde_json::to_string_pretty(&graph_stats(&graph)?)?);
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Validate(a) => validate(a),
        Command::Diagnose(a) => diagnose(a),
        Command::Anneal(a) => anneal(a),
        Command::Scan(a) => scan_cmd(a),
        Command::Ablate(a) => ablate(a),
        Command::Controls(a) => controls_cmd(a),
        Command::DiagonalQa(a) => diagonal_qa_cmd(a),
        Command::Band(a) => band(a),
        Command::Sensor(a) => sensor_cmd(a),
        Command::Gaps(a) => gaps(a),
        Command::ReproduceAll(a) => reproduce_all(a),
        Command::GraphStats(a) => graph_stats_cmd(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

