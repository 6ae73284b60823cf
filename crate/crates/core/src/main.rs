use clap::{Parser, Subcommand};
use reslab::harness::{self, HarnessError, MatchReport, ResonanceRow, SweepConfig};
use reslab::model::{build_problem, validate_hypotheses, CertifiedSetup, ProblemConfig};
use reslab::quantization::{pseudo_resonances, EnergyRectangle};
use reslab::spectral::{resonances_spectral, SpectralSettings};
use reslab::wkb::{find_resonances_shooting, ShootingOptions};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "reslab", version, about = "Resonances of a two-channel Schrödinger system with crossing classical trajectories")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Window {
    /// Problem config (JSON).
    config: PathBuf,
    #[arg(long)]
    h: f64,
    /// Half-width of the window in units of h·log(1/h).
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    /// Depth of the window in units of h·log(1/h); defaults to 2/T(E0).
    #[arg(long = "M")]
    m: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the hypothesis report of a problem config.
    Check { config: PathBuf },
    /// Roots of the quantization condition in the window.
    Pseudo {
        #[command(flatten)]
        window: Window,
    },
    /// θ-stable eigenvalues of the distorted operator in the window.
    Spectrum {
        #[command(flatten)]
        window: Window,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "L")]
        l: Option<f64>,
        #[arg(long = "Mprime")]
        m_prime: Option<f64>,
    },
    /// Zeros of the shooting determinant seeded at the pseudo-resonances.
    Shoot {
        #[command(flatten)]
        window: Window,
        #[arg(long = "L")]
        l: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        reorth: f64,
    },
    /// Run an h-sweep and write CSV, JSON and plot data.
    Sweep { config: PathBuf },
    /// Regenerate plot data from a sweep's report.json.
    Plotdata {
        report: PathBuf,
        /// Output directory; defaults to the report's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn numerical(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Numerical(e.to_string())
}

fn load(path: &Path) -> Result<ProblemConfig, HarnessError> {
    Ok(ProblemConfig::from_path(path)?)
}

fn open_window(w: &Window, config: &ProblemConfig) -> Result<(CertifiedSetup, EnergyRectangle), HarnessError> {
    let setup = CertifiedSetup::from_config(config)?;
    let m = match w.m {
        Some(m) => m,
        None => harness::default_depth(&setup)?,
    };
    let rect = EnergyRectangle::new(setup.e0, w.r, m, w.h).map_err(|e| HarnessError::Config(e.to_string()))?;
    Ok((setup, rect))
}

fn print_rows(rows: &[ResonanceRow]) -> Result<(), HarnessError> {
    harness::write_csv(rows, std::io::stdout().lock())
}

fn summarize(report: &MatchReport) {
    for hr in &report.per_h {
        let count = |n: Option<usize>| n.map(|n| n.to_string()).unwrap_or_else(|| "-".into());
        println!(
            "h = {:<6} pseudo {:>3}  spectral {:>3}  shooting {:>3}",
            hr.h,
            count(hr.pseudo.as_ref().map(Vec::len)),
            count(hr.spectral.as_ref().map(Vec::len)),
            count(hr.shooting.as_ref().map(Vec::len)),
        );
        for (name, m) in [("spectral", &hr.spectral_match), ("shooting", &hr.shooting_match)] {
            if let Some(m) = m {
                println!(
                    "    {name}: {} pairs, max d/h {}, unmatched {}+{}",
                    m.pairs.len(),
                    m.max_distance_over_h.map(|d| format!("{d:.3e}")).unwrap_or_else(|| "-".into()),
                    m.unmatched_pseudo.len(),
                    m.unmatched_other.len()
                );
            }
        }
    }
    for (name, t) in [("spectral", &report.spectral_trend), ("shooting", &report.shooting_trend)] {
        if let Some(t) = t {
            let fmt = |x: Option<f64>| x.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
            println!(
                "{name}: max d/h strictly decreasing: {}, pooled exponent {}, max exponent {}",
                t.strictly_decreasing,
                fmt(t.pooled_exponent),
                fmt(t.max_exponent)
            );
        }
    }
    for f in &report.failures {
        eprintln!("failed cell h = {}, {}: {}", f.h, f.method.as_str(), f.message);
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Check { config } => {
            let report = validate_hypotheses(&build_problem(&load(&config)?)?);
            println!("{report}");
            if !report.all_passed() {
                return Err(HarnessError::Hypothesis(report));
            }
        }
        Command::Pseudo { window } => {
            let (setup, rect) = open_window(&window, &load(&window.config)?)?;
            let roots = pseudo_resonances(&setup, &rect).map_err(numerical)?;
            print_rows(&roots.iter().map(|p| ResonanceRow::from_pseudo(rect.h, p)).collect::<Vec<_>>())?;
        }
        Command::Spectrum { window, n, l, m_prime } => {
            let mut config = load(&window.config)?;
            config.spectral.n = n.or(config.spectral.n);
            config.spectral.l = l.or(config.spectral.l);
            config.spectral.m_prime = m_prime.or(config.spectral.m_prime);
            let (setup, rect) = open_window(&window, &config)?;
            let settings = SpectralSettings::resolve(&setup, rect.m);
            let found = resonances_spectral(&setup, &rect, &settings).map_err(numerical)?;
            log::info!("θ = {:.4}, N = {}, L = {}, {} rejected", found.theta_used, found.n, found.l, found.rejected.len());
            print_rows(&found.resonances.iter().map(|s| ResonanceRow::from_spectral(rect.h, s)).collect::<Vec<_>>())?;
        }
        Command::Shoot { window, l, reorth } => {
            let (setup, rect) = open_window(&window, &load(&window.config)?)?;
            let options = ShootingOptions { l, reorth_interval: reorth, ..ShootingOptions::default() };
            let roots = find_resonances_shooting(&setup, &rect, &options).map_err(numerical)?;
            print_rows(&roots.iter().map(|s| ResonanceRow::from_shooting(rect.h, s)).collect::<Vec<_>>())?;
        }
        Command::Sweep { config } => {
            let cfg = SweepConfig::from_path(&config)?;
            let report = harness::run_sweep(&cfg)?;
            summarize(&report);
            println!("outputs written to {}", cfg.output_dir.display());
            if !report.failures.is_empty() {
                return Err(HarnessError::Numerical(format!("{} sweep cells failed", report.failures.len())));
            }
        }
        Command::Plotdata { report, out } => {
            let text = std::fs::read_to_string(&report)?;
            let parsed: MatchReport = serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", report.display())))?;
            let dir = out.unwrap_or_else(|| report.parent().unwrap_or(Path::new(".")).to_path_buf());
            harness::write_plot_data(&parsed, &dir)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(HarnessError::Hypothesis(report)) => {
            for failure in report.failures() {
                eprintln!("hypothesis failed: {} ({})", failure.name, failure.detail);
            }
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
