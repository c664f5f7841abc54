use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use grnn::bench::{emit_predictions, emit_table, format_table, run_benchmark, BenchConfig, BpSettings, SigmaPolicy};
use grnn::control::{run_tracking, ControllerConfig, OnlineController, QuadAltitudeState, QuadParams, Scenario};
use grnn::data::{benchmark_suite, load_dir, write_csv};
use grnn::grnn::SigmaSearch;
use grnn::sysid::{identify, IdentConfig, LagConfig, PlantSpec};
use grnn::GrowthPolicy;

#[derive(Parser, Debug)]
#[command(name = "bench", version, about = "GRNN versus backpropagation benchmarks and demos")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train both models on every dataset in a directory and write the results table.
    Run(RunArgs),
    /// Identify a plant from random excitation and write the test trajectory.
    Sysid(SysidArgs),
    /// Run the adaptive altitude controller and write the tracking trace.
    Control(ControlArgs),
    /// Write the built-in stand-in datasets as CSV plus spec sidecars.
    Datasets(DatasetsArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Directory of `<name>.csv` files, each with a `<name>.spec` sidecar.
    #[arg(long)]
    data: PathBuf,
    /// Smoothing parameter, or `auto` for a holdout grid search.
    #[arg(long, default_value = "auto")]
    sigma: String,
    #[arg(long, default_value_t = 10)]
    bp_hidden: usize,
    #[arg(long, default_value_t = 500)]
    bp_epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    bp_lr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PlantKind {
    Linear,
    Nonlinear,
    Quad,
}

#[derive(Args, Debug)]
struct SysidArgs {
    #[arg(long, value_enum, default_value_t = PlantKind::Linear)]
    plant: PlantKind,
    /// `a` of the linear plant.
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    /// `b` of the linear plant.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Step for the quadcopter plant, s.
    #[arg(long, default_value_t = 0.02)]
    dt: f64,
    #[arg(long, default_value_t = 1)]
    n_y: usize,
    #[arg(long, default_value_t = 1)]
    n_u: usize,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, default_value_t = 4000)]
    train_steps: usize,
    #[arg(long, default_value_t = 400)]
    test_steps: usize,
    /// Lower end of the excitation range; defaults depend on the plant.
    #[arg(long, allow_hyphen_values = true)]
    u_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    u_max: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV with columns `k,u,y,y_hat`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScenarioKind {
    Step,
    Square,
}

#[derive(Args, Debug)]
struct ControlArgs {
    #[arg(long, value_enum, default_value_t = ScenarioKind::Step)]
    scenario: ScenarioKind,
    /// Reference before the step, or the low level of the square wave, m.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    low: f64,
    /// Reference after the step, or the high level of the square wave, m.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    high: f64,
    /// Step time, s.
    #[arg(long, default_value_t = 0.0)]
    at: f64,
    /// Square wave period, s.
    #[arg(long, default_value_t = 4.0)]
    period: f64,
    /// Simulated time per episode, s.
    #[arg(long, default_value_t = 10.0)]
    duration: f64,
    /// Episodes run back to back with the same controller.
    #[arg(long, default_value_t = 1)]
    episodes: usize,
    #[arg(long, default_value_t = 6.0)]
    kp: f64,
    #[arg(long, default_value_t = 4.0)]
    kd: f64,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    /// Novelty radius on squared distance.
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    /// Error gate for corrective insertions.
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 500)]
    max_patterns: usize,
    #[arg(long, default_value_t = 0.02)]
    dt: f64,
    /// Disable learning; the loop is then plain PD.
    #[arg(long)]
    no_adapt: bool,
    /// Output CSV with columns `k,t,r,z,u,n_patterns`. With several
    /// episodes, files are suffixed `_ep<i>`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DatasetsArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sysid(a) => cmd_sysid(a).map(|()| true),
        Command::Control(a) => cmd_control(a).map(|()| true),
        Command::Datasets(a) => cmd_datasets(a).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn bench_threads() -> Result<usize> {
    match std::env::var("BENCH_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("BENCH_THREADS={v:?}"))?;
            if n == 0 {
                bail!("BENCH_THREADS must be at least 1");
            }
            Ok(n)
        }
        Err(_) => Ok(1),
    }
}

fn parse_sigma(s: &str, seed: u64) -> Result<SigmaPolicy> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(SigmaPolicy::Auto(SigmaSearch {
            seed,
            ..SigmaSearch::default()
        }));
    }
    let v: f64 = s.parse().with_context(|| format!("--sigma expects a number or `auto`, got {s:?}"))?;
    if !(v > 0.0 && v.is_finite()) {
        bail!("--sigma must be positive and finite, got {v}");
    }
    Ok(SigmaPolicy::Fixed(v))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Returns whether every dataset succeeded.
fn cmd_run(a: RunArgs) -> Result<bool> {
    let config = BenchConfig {
        sigma: parse_sigma(&a.sigma, a.seed)?,
        bp: BpSettings {
            hidden: a.bp_hidden,
            epochs: a.bp_epochs,
            learning_rate: a.bp_lr,
        },
        seed: a.seed,
        threads: bench_threads()?,
    };
    let entries = load_dir(&a.data)?;
    if entries.is_empty() {
        eprintln!("warning: no datasets with spec files in {}", a.data.display());
        return Ok(true);
    }
    for (path, ds) in &entries {
        if let Err(e) = ds {
            eprintln!("warning: {}: {e}", path.display());
        }
    }
    ensure_dir(&a.out)?;
    let stems: Vec<String> = entries
        .iter()
        .map(|(path, _)| path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned()))
        .collect();
    let loaded: Vec<bool> = entries.iter().map(|(_, d)| d.is_ok()).collect();
    let mut runs = run_benchmark(entries.into_iter().map(|(_, d)| d).collect(), &config);
    for ((run, stem), ok) in runs.iter_mut().zip(stems).zip(loaded) {
        if !ok {
            run.result.dataset = stem;
        }
    }
    let results: Vec<_> = runs.iter().map(|r| r.result.clone()).collect();
    emit_table(&results, a.out.join("results.csv"))?;
    for run in &runs {
        if let Some(ds) = &run.normalized {
            let path = a.out.join(format!("{}_predictions.csv", run.result.dataset));
            emit_predictions(run.grnn.as_ref(), run.bp.as_ref(), ds, path)?;
        }
    }
    print!("{}", format_table(&results));
    let failed: Vec<_> = results.iter().filter(|r| r.is_failure()).collect();
    for r in &failed {
        eprintln!(
            "failed: {}: {}",
            r.dataset,
            r.failure.as_deref().unwrap_or("unknown error")
        );
    }
    Ok(failed.is_empty())
}

fn cmd_sysid(a: SysidArgs) -> Result<()> {
    let (plant, range) = match a.plant {
        PlantKind::Linear => (PlantSpec::LinearFirstOrder { a: a.a, b: a.b }, (-1.0, 1.0)),
        PlantKind::Nonlinear => (PlantSpec::NonlinearBenchmark, (-1.0, 1.0)),
        PlantKind::Quad => {
            let params = QuadParams::default();
            let hover = params.hover_thrust();
            (PlantSpec::QuadAltitude { params, dt: a.dt }, (hover - 2.0, hover + 2.0))
        }
    };
    let config = IdentConfig {
        plant,
        lags: LagConfig::new(a.n_y, a.n_u)?,
        sigma: a.sigma,
        train_steps: a.train_steps,
        test_steps: a.test_steps,
        u_range: (a.u_min.unwrap_or(range.0), a.u_max.unwrap_or(range.1)),
        y0: 0.0,
        seed: a.seed,
    };
    let (model, report) = identify(&config)?;
    if let Some(dir) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    report.write_csv(&a.out)?;
    println!("patterns={} test_mse={:.4e}", model.len(), report.mse);
    Ok(())
}

fn cmd_control(a: ControlArgs) -> Result<()> {
    if a.episodes == 0 {
        bail!("--episodes must be at least 1");
    }
    let scenario = match a.scenario {
        ScenarioKind::Step => Scenario::Step {
            from: a.low,
            to: a.high,
            at: a.at,
        },
        ScenarioKind::Square => {
            if !(a.period > 0.0) {
                bail!("--period must be positive");
            }
            Scenario::Square {
                low: a.low,
                high: a.high,
                period: a.period,
            }
        }
    };
    if !(a.duration > 0.0) {
        bail!("--duration must be positive");
    }
    let config = ControllerConfig {
        kp: a.kp,
        kd: a.kd,
        sigma: a.sigma,
        policy: GrowthPolicy::new(a.delta, a.epsilon, a.max_patterns)?,
        dt: a.dt,
        adapt: !a.no_adapt,
        ..ControllerConfig::default()
    };
    let mut controller = OnlineController::new(config)?;
    let horizon = (a.duration / a.dt).round().max(1.0) as usize;
    let initial = QuadAltitudeState { z: a.low, vz: 0.0 };
    if let Some(dir) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    for ep in 0..a.episodes {
        let report = run_tracking(&mut controller, &scenario, initial, horizon)?;
        let path = if a.episodes == 1 {
            a.out.clone()
        } else {
            episode_path(&a.out, ep + 1)
        };
        report.write_csv(&path)?;
        let settle = report
            .settling_time
            .map_or_else(|| "none".to_string(), |t| format!("{t:.2}"));
        println!(
            "episode={} settling_s={} steady_err={:.4e} abs_err_integral={:.4e} patterns={}",
            ep + 1,
            settle,
            report.steady_state_error,
            report.cumulative_abs_error,
            report.max_patterns_seen
        );
    }
    Ok(())
}

fn episode_path(out: &Path, ep: usize) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("tracking");
    let name = match out.extension().and_then(|s| s.to_str()) {
        Some(ext) => format!("{stem}_ep{ep}.{ext}"),
        None => format!("{stem}_ep{ep}"),
    };
    out.with_file_name(name)
}

fn cmd_datasets(a: DatasetsArgs) -> Result<()> {
    ensure_dir(&a.out)?;
    for s in benchmark_suite(a.seed)? {
        let path = write_csv(&s.dataset, &a.out, &s.notes)?;
        println!("{} rows={} -> {}", s.dataset.name, s.dataset.rows(), path.display());
    }
    Ok(())
}
