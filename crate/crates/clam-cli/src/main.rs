//! `clam` — simulate curved-aperture radar collections and estimate
//! scatterer offsets from them.
//!
//! Exit codes: 0 success, 2 configuration/input error, 3 singular system in
//! single-estimate mode.

use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use clam_core::estimator::{assemble, solve_full, solve_reduced, Estimate};
use clam_core::experiments::{
    self, horizontal_resolution, preset_cubic, preset_parabola, vertical_half_resolution, Scenario,
    ScenarioConfig, SolverMode, SweepResult, APERTURE_HALF_LENGTH_M, APERTURE_HEIGHT_M,
    CUBIC_ZEROS_M, DEFAULT_SAMPLE_COUNT, PARABOLA_ZERO_M,
};
use clam_core::fieldsim::{simulate, FieldSamples};
use clam_core::windows::{BaseWindow, WindowSet};
use clam_core::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_SINGULAR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "clam",
    about = "Curvilinear-aperture monopulse: simulation, offset estimation, and experiment sweeps",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output path; format inferred from the extension (.csv / .json)
    /// unless --format is given. Stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format override.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Seed override (the CLAM_SEED environment variable beats this).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate field samples for the configured scene.
    Simulate(CommonArgs),
    /// Estimate scatterer offsets from a simulated field file.
    Estimate {
        #[command(flatten)]
        common: CommonArgs,
        /// Field samples CSV (re,im columns) produced by `simulate`.
        #[arg(long)]
        field: PathBuf,
    },
    /// Sweep true height offsets with a single scatterer.
    SweepHeight(CommonArgs),
    /// Sweep dx/dy over a resolution cell at fixed height.
    SweepXy(CommonArgs),
    /// Compare range-offset sensitivity: reduced solve on the parabola
    /// preset vs full solve on the cubic preset.
    RangeAmbiguity(CommonArgs),
    /// Map height error and determinant against confuser position.
    GlintMap(CommonArgs),
    /// Print the named presets with their derived resolutions.
    Presets,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Presets => {
            print_presets();
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate(args) => {
            let sc = load_scenario(&args)?;
            let scene = sc
                .scene
                .clone()
                .ok_or_else(|| Error::Config("simulate requires a non-empty scene".into()))?;
            let field = simulate(
                &scene,
                &sc.aperture,
                &sc.geometry,
                sc.noise_fraction,
                Some(sc.seed),
            )?;
            let text = match output_format(&args) {
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    field.write_csv(&mut buf)?;
                    String::from_utf8(buf).expect("csv is utf-8")
                }
                OutputFormat::Json => field_json(&field),
            };
            emit(&args.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Estimate { common, field } => {
            let sc = load_scenario(&common)?;
            let file = std::fs::File::open(&field)?;
            let samples = FieldSamples::read_csv(BufReader::new(file), sc.aperture.spacing())?;
            if samples.len() != sc.aperture.sample_count() {
                return Err(Error::Config(format!(
                    "field file has {} samples but the aperture has {}",
                    samples.len(),
                    sc.aperture.sample_count()
                )));
            }
            let ws = WindowSet::build(
                &BaseWindow::new(sc.window, sc.aperture.half_extent()),
                &sc.aperture,
            );
            let sys = assemble(&samples, &sc.aperture, &sc.geometry, &ws)?;
            let est = match sc.solver {
                SolverMode::Full => solve_full(&sys, sc.det_threshold, sc.imag_threshold),
                SolverMode::Reduced => solve_reduced(&sys, sc.det_threshold, sc.imag_threshold),
            };
            let text = estimate_report(&est, sc.solver);
            emit(&common.out, &text)?;
            if est.flags.singular {
                return Ok(ExitCode::from(EXIT_SINGULAR));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepHeight(args) => run_sweep(&args, experiments::run_height_sweep),
        Command::SweepXy(args) => run_sweep(&args, experiments::run_xy_sweep),
        Command::RangeAmbiguity(args) => run_sweep(&args, experiments::run_range_ambiguity),
        Command::GlintMap(args) => run_sweep(&args, experiments::run_glint_map),
    }
}

fn load_scenario(args: &CommonArgs) -> Result<Scenario, Error> {
    let mut cfg = ScenarioConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    cfg.resolve()
}

fn run_sweep(
    args: &CommonArgs,
    runner: fn(&Scenario) -> Result<SweepResult, Error>,
) -> Result<ExitCode, Error> {
    let sc = load_scenario(args)?;
    let result = runner(&sc)?;
    let text = match output_format(args) {
        OutputFormat::Csv => result.to_csv(),
        OutputFormat::Json => result.to_json(),
    };
    emit(&args.out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn output_format(args: &CommonArgs) -> OutputFormat {
    if let Some(f) = args.format {
        return f;
    }
    match args
        .out
        .as_deref()
        .and_then(Path::extension)
        .and_then(|e| e.to_str())
    {
        Some("json") => OutputFormat::Json,
        _ => OutputFormat::Csv,
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn field_json(field: &FieldSamples) -> String {
    let rows: Vec<serde_json::Value> = field
        .values
        .iter()
        .map(|v| serde_json::json!({"re": v.re, "im": v.im}))
        .collect();
    serde_json::to_string_pretty(&rows).expect("field serializes") + "\n"
}

fn estimate_report(est: &Estimate, solver: SolverMode) -> String {
    let mut s = String::new();
    s.push_str(&format!("solver = {}\n", solver.name()));
    match est.solution {
        Some(sol) => {
            s.push_str(&format!("dx_m = {:.9e}\n", sol.dx));
            if est.dy_assumed_zero {
                s.push_str("dy_m = 0 (assumed)\n");
            } else {
                s.push_str(&format!("dy_m = {:.9e}\n", sol.dy));
            }
            s.push_str(&format!("dz_m = {:.9e}\n", sol.dz));
            s.push_str(&format!("imag_residual_m = {:.9e}\n", sol.imag_residual));
        }
        None => s.push_str("solution = none (singular system)\n"),
    }
    s.push_str(&format!("det_magnitude = {:.9e}\n", est.det_magnitude));
    s.push_str(&format!("det_score = {:.9e}\n", est.det_score));
    s.push_str(&format!("flags = {}\n", est.flags.label()));
    s
}

fn print_presets() {
    let length = 2.0 * APERTURE_HALF_LENGTH_M;
    for (name, zeros) in [
        ("cubic-fig1", format!("{:?} m", CUBIC_ZEROS_M)),
        (
            "parabola-fig4",
            format!("[-{z}, {z}] m", z = PARABOLA_ZERO_M),
        ),
    ] {
        let (ap, g) = if name == "cubic-fig1" {
            preset_cubic(DEFAULT_SAMPLE_COUNT).unwrap()
        } else {
            preset_parabola(DEFAULT_SAMPLE_COUNT).unwrap()
        };
        println!("{name}:");
        println!("  aperture: length {length} m, height {APERTURE_HEIGHT_M} m, vertical zeros at x = {zeros}");
        println!(
            "  geometry: {} GHz, range {} m, p = {}, samples {}",
            g.frequency / 1e9,
            g.y0,
            g.p,
            ap.sample_count()
        );
        println!(
            "  horizontal resolution: {:.3} m (linear aperture of the same length)",
            horizontal_resolution(&g, length)
        );
        println!(
            "  vertical half-resolution: +-{:.1} m (circumscribing rectangle)",
            vertical_half_resolution(&g)
        );
    }
}
