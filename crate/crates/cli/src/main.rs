use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coupler_cli::commands;
use coupler_cli::config::{preset, ScenarioConfig};
use coupler_core::analysis::SweepAxis;
use coupler_core::CouplerError;

/// Kerr coupler squeezing simulator.
///
/// Computes nth-order single-mode, sum- and difference-squeezing time series
/// for the two-mode Kerr coupler through a closed-form engine and a
/// truncated-Fock brute-force engine, and emits CSV.
#[derive(Parser)]
#[command(name = "coupler", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Start from a named preset (fig1a_n2, fig1a_n3, fig1b, fig1c, fig2a,
    /// fig2b, fig3a_small, fig3a_large, fig3b).
    #[arg(long)]
    preset: Option<String>,
    /// Load a key=value config file.
    #[arg(long)]
    config: Option<String>,
    /// Output CSV path (overrides the scenario's `output`).
    #[arg(long)]
    out: Option<String>,
    /// Engine: analytic, fock or both.
    #[arg(long)]
    backend: Option<String>,
    /// Time grid as START:STOP:STEPS.
    #[arg(long)]
    grid: Option<String>,
    /// Fock cutoff: auto or a total-photon-number integer.
    #[arg(long)]
    cutoff: Option<String>,
    /// Trajectory detuning convention: unitary or paper-exact.
    #[arg(long)]
    convention: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a squeezing time series and write CSV.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Run both engines and report per-column disagreement.
    Compare {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Largest tolerated per-column max-abs-diff.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Sweep one parameter axis and emit value,min_s,argmin_t rows.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Axis: kappa, chi, delta, alpha1, alpha2 or n.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values.
        #[arg(long)]
        values: String,
    },
    /// Print a preset as config-file text.
    Preset {
        name: String,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<String>,
    },
}

fn resolve_scenario(args: &ScenarioArgs) -> Result<ScenarioConfig, CouplerError> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(_), Some(_)) => {
            return Err(CouplerError::InvalidParameter(
                "--preset and --config are mutually exclusive".into(),
            ))
        }
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CouplerError::InvalidParameter(format!("cannot read config `{path}`: {e}"))
            })?;
            ScenarioConfig::parse(&text)?
        }
        (None, None) => ScenarioConfig::default(),
    };
    if let Some(out) = &args.out {
        cfg.output = out.clone();
    }
    if let Some(backend) = &args.backend {
        cfg.backend = backend.parse()?;
    }
    if let Some(grid) = &args.grid {
        let parts: Vec<&str> = grid.split(':').collect();
        let bad = || {
            CouplerError::InvalidParameter(format!(
                "grid must be START:STOP:STEPS, got `{grid}`"
            ))
        };
        if parts.len() != 3 {
            return Err(bad());
        }
        cfg.t_start = parts[0].parse().map_err(|_| bad())?;
        cfg.t_stop = parts[1].parse().map_err(|_| bad())?;
        cfg.steps = parts[2].parse().map_err(|_| bad())?;
    }
    if let Some(cutoff) = &args.cutoff {
        cfg.cutoff = cutoff.parse()?;
    }
    if let Some(convention) = &args.convention {
        cfg.convention = convention.parse()?;
    }
    Ok(cfg)
}

fn exit_code_for(err: &CouplerError) -> u8 {
    match err {
        CouplerError::InvalidParameter(_) | CouplerError::UnknownAxis(_) => 1,
        _ => 2,
    }
}

fn fail(err: CouplerError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(&err))
}

fn configure_workers() {
    // Worker count only; per-point evaluation is independent and collected in
    // grid order, so this never changes numeric output.
    if let Ok(value) = std::env::var("COUPLER_WORKERS") {
        if let Ok(workers) = value.parse::<usize>() {
            if workers >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    configure_workers();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run { scenario } => {
            let cfg = match resolve_scenario(&scenario) {
                Ok(cfg) => cfg,
                Err(e) => return fail(e),
            };
            match commands::run(&cfg) {
                Ok(files) => {
                    for f in files {
                        eprintln!("wrote {f}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Compare {
            scenario,
            tolerance,
        } => {
            let cfg = match resolve_scenario(&scenario) {
                Ok(cfg) => cfg,
                Err(e) => return fail(e),
            };
            match commands::compare(&cfg, tolerance) {
                Ok(false) => ExitCode::SUCCESS,
                Ok(true) => {
                    eprintln!("error: engine disagreement exceeds tolerance {tolerance:.3e}");
                    ExitCode::from(3)
                }
                Err(e) => fail(e),
            }
        }
        Command::Sweep {
            scenario,
            axis,
            values,
        } => {
            let cfg = match resolve_scenario(&scenario) {
                Ok(cfg) => cfg,
                Err(e) => return fail(e),
            };
            let axis: SweepAxis = match axis.parse() {
                Ok(axis) => axis,
                Err(e) => return fail(e),
            };
            let parsed: Result<Vec<f64>, _> = values
                .split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| {
                        CouplerError::InvalidParameter(format!("bad sweep value `{v}`"))
                    })
                })
                .collect();
            let parsed = match parsed {
                Ok(v) if !v.is_empty() => v,
                Ok(_) => return fail(CouplerError::InvalidParameter("empty value list".into())),
                Err(e) => return fail(e),
            };
            let out = scenario.out.as_deref();
            match commands::sweep_run(&cfg, axis, &parsed, out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(e),
            }
        }
        Command::Preset { name, out } => {
            let cfg = match preset(&name) {
                Ok(cfg) => cfg,
                Err(e) => return fail(e),
            };
            let text = cfg.serialize();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &text) {
                        return fail(CouplerError::InvalidParameter(format!(
                            "cannot write `{path}`: {e}"
                        )));
                    }
                    ExitCode::SUCCESS
                }
                None => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
            }
        }
    }
}
