//! Batch command-line surface over the library: compile gate lists, estimate
//! resources, simulate population traces, and transform spectra.
//!
//! Exit codes: 0 success, 2 validation/input, 3 size cap, 4 numerical
//! (fixed-point overflow or step-fit failure).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vibronic::circuit::{
    build_evolution, select_step_count, CompileError, CompileOptions, FitError,
};
use vibronic::grid::{GridConfig, GridError};
use vibronic::model::{parse_model, validate_model, ModelError, VibronicModel};
use vibronic::observables::{
    autocorrelation, population_trace, prepare_vertical_excitation, sample_populations,
    spectrum, Method, ObsError,
};
use vibronic::resources::{count_toffoli, estimate_total, CostModel, StepChoice, NOMINAL_WIDTH};
use vibronic::simulator::{apply_gates, Backend, SimError};
use vibronic::units;

#[derive(Parser)]
#[command(name = "vibronic", version, about = "Vibronic dynamics compiler and estimator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a product-formula evolution to a gate-list file.
    Compile(CompileArgs),
    /// Estimate qubit and Toffoli costs for an evolution.
    Estimate(EstimateArgs),
    /// Simulate diabatic populations over time.
    Simulate(SimulateArgs),
    /// Compute an absorption spectrum from the dipole autocorrelation.
    Spectrum(SpectrumArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Model file (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Qubits per mode register.
    #[arg(long, default_value_t = 4)]
    grid_bits: u32,
    /// Product-formula order (1, 2, or 4).
    #[arg(long, default_value_t = 2)]
    order: u32,
    /// Evolution time in femtoseconds.
    #[arg(long, default_value_t = 100.0)]
    time_fs: f64,
    /// Target error for the empirical step selection.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Fixed step count (bypasses the empirical selection).
    #[arg(long)]
    steps: Option<usize>,
    /// Pin the fixed-point register width (fractional bits auto-split).
    #[arg(long)]
    fixed_point_bits: Option<u32>,
    /// Fold the harmonic ground-surface potential into the diagonal fragment.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    include_v0: bool,
    /// Evolution sign convention.
    #[arg(long, value_enum, default_value_t = SignConvention::Paper)]
    sign: SignConvention,
    /// Seed for sampling modes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (defaults to stdout where it makes sense).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignConvention {
    /// Evolve with e^{+iHt}.
    Paper,
    /// Evolve with e^{-iHt}.
    Physics,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Faithful,
    Semantic,
    Oracle,
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Label printed in the report table.
    #[arg(long, default_value = "model")]
    system_name: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of time samples in [0, time].
    #[arg(long, default_value_t = 101)]
    samples: usize,
    /// Propagation backend.
    #[arg(long, value_enum, default_value_t = BackendArg::Oracle)]
    backend: BackendArg,
    /// Initial electronic state (vertical excitation).
    #[arg(long, default_value_t = 0)]
    initial_state: usize,
    /// Report finite-shot estimates instead of exact marginals.
    #[arg(long)]
    shots: Option<usize>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of autocorrelation samples in [0, time].
    #[arg(long, default_value_t = 256)]
    samples: usize,
    /// Damping rate in atomic units (default 5 / t_max).
    #[arg(long)]
    damping: Option<f64>,
    /// Propagation backend (oracle or semantic).
    #[arg(long, value_enum, default_value_t = BackendArg::Oracle)]
    backend: BackendArg,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    SizeCap(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::SizeCap(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::SizeCap(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        match e {
            GridError::SizeCap { .. } => CliError::SizeCap(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        match e {
            CompileError::FixedPointOverflow { .. } | CompileError::WidthTooLarge(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::SizeCap { .. } | SimError::WidthCap { .. } => {
                CliError::SizeCap(e.to_string())
            }
            SimError::Grid(g) => g.into(),
            SimError::UnmatchedUncompute { .. } | SimError::DirtyAncilla { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::NonMonotone(_) => CliError::Numerical(e.to_string()),
            FitError::Compile(c) => c.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ObsError> for CliError {
    fn from(e: ObsError) -> Self {
        match e {
            ObsError::Sim(s) => s.into(),
            ObsError::Compile(c) => c.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

fn load_model(path: &PathBuf) -> Result<VibronicModel, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Validation(format!("cannot read model file {}: {e}", path.display()))
    })?;
    let model = parse_model(&text)?;
    let diagnostics = validate_model(&model);
    if !diagnostics.is_empty() {
        let lines: Vec<String> = diagnostics.iter().map(|d| d.to_string()).collect();
        return Err(CliError::Validation(format!(
            "model failed validation:\n  {}",
            lines.join("\n  ")
        )));
    }
    Ok(model)
}

fn compile_options(common: &CommonArgs) -> CompileOptions {
    CompileOptions {
        include_v0: common.include_v0,
        caching: true,
        frac_bits: 24,
        pinned_width: common.fixed_point_bits,
        physics_sign: matches!(common.sign, SignConvention::Physics),
    }
}

fn resolve_steps(
    common: &CommonArgs,
    model: &VibronicModel,
    g: GridConfig,
    opts: &CompileOptions,
) -> Result<StepChoice, CliError> {
    if let Some(r) = common.steps {
        if r == 0 {
            return Err(CliError::Validation("--steps must be at least 1".into()));
        }
        return Ok(StepChoice::Supplied(r));
    }
    let epsilon = common.epsilon.ok_or_else(|| {
        CliError::Validation("either --steps or --epsilon is required".into())
    })?;
    if !(epsilon > 0.0) {
        return Err(CliError::Validation("--epsilon must be positive".into()));
    }
    let t = units::fs_to_au(common.time_fs);
    let sel = select_step_count(model, g, t, epsilon, common.order, 2, opts)?;
    Ok(StepChoice::Selected(sel))
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// A `.json` output path switches the trace/spectrum payload from CSV to JSON.
fn wants_json(out: &Option<PathBuf>) -> bool {
    out.as_ref()
        .and_then(|p| p.extension())
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false)
}

fn cmd_compile(args: &CompileArgs) -> Result<(), CliError> {
    let common = &args.common;
    let model = load_model(&common.model)?;
    let g = GridConfig::new(common.grid_bits)?;
    let opts = compile_options(common);
    let steps = match resolve_steps(common, &model, g, &opts)? {
        StepChoice::Supplied(r) => r,
        StepChoice::Selected(sel) => sel.steps,
    };
    let t = units::fs_to_au(common.time_fs);
    let list = build_evolution(&model, g, t, steps, common.order, &opts)?;
    let mut text = Vec::new();
    list.export_text(&mut text)
        .map_err(|e| CliError::Validation(format!("gate-list export failed: {e}")))?;
    write_or_print(&common.out, &String::from_utf8(text).expect("ascii export"))?;
    let cost = CostModel::default();
    eprintln!(
        "compiled {} gates over {} qubits (system {}, width {}); {} Toffoli; {} steps",
        list.len(),
        list.layout.arithmetic_bits(),
        list.layout.system_bits(),
        list.layout.format.width,
        count_toffoli(&list, &cost),
        steps,
    );
    Ok(())
}

fn cmd_estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let common = &args.common;
    let model = load_model(&common.model)?;
    let g = GridConfig::new(common.grid_bits)?;
    let opts = compile_options(common);
    let steps = resolve_steps(common, &model, g, &opts)?;
    let t = units::fs_to_au(common.time_fs);
    let width = common.fixed_point_bits.unwrap_or(NOMINAL_WIDTH);
    let cost = CostModel::default();
    let report = estimate_total(&model, g, t, &steps, common.order, width, &opts, &cost)?;
    let params = format!(
        "N={}, M={}, t={} fs{}",
        model.n_states_logical,
        model.mode_count(),
        common.time_fs,
        common
            .epsilon
            .map(|e| format!(", eps={}%", e * 100.0))
            .unwrap_or_default()
    );
    print!("{}", report.to_table(&args.system_name, &params));
    println!("steps: {} ({})", report.n_steps, report.step_selection);
    if let Some(path) = &common.out {
        fs::write(path, report.to_json())
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let common = &args.common;
    let model = load_model(&common.model)?;
    let g = GridConfig::new(common.grid_bits)?;
    let opts = compile_options(common);
    let init = prepare_vertical_excitation(&model, g, args.initial_state)?;
    let n = args.samples.max(2);
    let trace = match args.backend {
        BackendArg::Oracle => {
            population_trace(&model, g, &init, common.time_fs, n, Method::Oracle, &opts)?
        }
        BackendArg::Semantic => {
            let steps = match resolve_steps(common, &model, g, &opts)? {
                StepChoice::Supplied(r) => r,
                StepChoice::Selected(sel) => sel.steps,
            };
            population_trace(
                &model,
                g,
                &init,
                common.time_fs,
                n,
                Method::Compiled { order: common.order, steps },
                &opts,
            )?
        }
        BackendArg::Faithful => {
            // Gate-faithful trace: evolve segment by segment on the full
            // register space.
            let steps = match resolve_steps(common, &model, g, &opts)? {
                StepChoice::Supplied(r) => r,
                StepChoice::Selected(sel) => sel.steps,
            };
            let t = units::fs_to_au(common.time_fs);
            let dt = t / (n - 1) as f64;
            let seg_steps = steps.div_ceil(n - 1).max(1);
            let list = build_evolution(&model, g, dt, seg_steps, common.order, &opts)?;
            let mut state = init.clone();
            let mut times_fs = vec![0.0];
            let mut pops = vec![vibronic::observables::populations(&model, &state)];
            for i in 1..n {
                state = apply_gates(&state, &list, Backend::GateFaithful)?.state;
                times_fs.push(units::au_to_fs(dt * i as f64));
                pops.push(vibronic::observables::populations(&model, &state));
            }
            vibronic::observables::PopulationTrace { times_fs, populations: pops }
        }
    };
    let trace = if let Some(shots) = args.shots {
        // Finite-shot estimates: one independent measurement round per time
        // sample, oracle-propagated.
        if !matches!(args.backend, BackendArg::Oracle) {
            return Err(CliError::Validation(
                "--shots currently pairs with the oracle backend".into(),
            ));
        }
        let t = units::fs_to_au(common.time_fs);
        let dt = t / (n - 1) as f64;
        let prop = vibronic::simulator::oracle::ExactPropagator::new(&model, g, opts.include_v0)?;
        let sign = opts.angle_sign();
        let mut sampled = trace;
        for (i, row) in sampled.populations.iter_mut().enumerate() {
            let state = prop.evolve(&init, sign * dt * i as f64);
            *row = sample_populations(&model, &state, shots, common.seed + i as u64);
        }
        sampled
    } else {
        trace
    };
    let payload = if wants_json(&common.out) { trace.to_json() } else { trace.to_csv() };
    write_or_print(&common.out, &payload)
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let common = &args.common;
    let model = load_model(&common.model)?;
    let g = GridConfig::new(common.grid_bits)?;
    let opts = compile_options(common);
    let mu = model.dipole.clone().ok_or_else(|| {
        CliError::Validation("spectrum needs a dipole matrix in the model file".into())
    })?;
    let method = match args.backend {
        BackendArg::Oracle => Method::Oracle,
        BackendArg::Semantic => {
            let steps = match resolve_steps(common, &model, g, &opts)? {
                StepChoice::Supplied(r) => r,
                StepChoice::Selected(sel) => sel.steps,
            };
            Method::Compiled { order: common.order, steps }
        }
        BackendArg::Faithful => {
            return Err(CliError::Validation(
                "spectrum supports the oracle and semantic backends".into(),
            ))
        }
    };
    let n = args.samples.max(2);
    let samples = autocorrelation(&model, g, &mu, common.time_fs, n, method, &opts)?;
    let t_max = units::fs_to_au(common.time_fs);
    let dt = t_max / (n - 1) as f64;
    let damping = args.damping.unwrap_or(5.0 / t_max);
    let spec = spectrum(&samples, dt, damping)?;
    let payload = if wants_json(&common.out) { spec.to_json() } else { spec.to_csv() };
    write_or_print(&common.out, &payload)?;
    for p in spec.peaks.iter().take(8) {
        eprintln!(
            "peak at {:.6} eV (intensity {:.4e})",
            p.omega_au * units::EV_PER_HARTREE,
            p.intensity
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compile(args) => cmd_compile(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Spectrum(args) => cmd_spectrum(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
