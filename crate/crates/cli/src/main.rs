//! Command-line driver: dynamics and scattering sweeps to CSV/JSON files,
//! plus the built-in verification of the headline numbers.

mod verify;

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nonrecip_core::{
    exec, half_max_k, half_max_k_numeric, scattering_matrix, sweep_flux, sweep_k, sweep_time,
    CyclicAtomParams, Error as CoreError, FlowMatrix, Model, Port, ScatteringQuery,
    ScatteringResult, WaveguideSystem,
};

#[derive(Parser)]
#[command(
    name = "nonrecip",
    version,
    about = "Nonreciprocal transition dynamics and single-photon scattering sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Artifact path; defaults to <command>.<format> in the working directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct FluxArgs {
    /// Synthetic flux in radians (stored as the phase of the direct drive)
    #[arg(long, conflicts_with = "phi_over_pi")]
    phi: Option<f64>,
    /// Synthetic flux as a multiple of pi
    #[arg(long)]
    phi_over_pi: Option<f64>,
}

impl FluxArgs {
    fn apply(&self, p: CyclicAtomParams) -> CyclicAtomParams {
        match (self.phi, self.phi_over_pi) {
            (Some(phi), _) => p.with_flux(phi),
            (None, Some(x)) => p.with_flux(x * PI),
            (None, None) => p,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Transition probabilities and isolation on a uniform time grid
    Dynamics {
        /// Atom parameters as a JSON file (exact field names, unknown keys rejected)
        #[arg(long)]
        params: Option<PathBuf>,
        #[command(flatten)]
        flux: FluxArgs,
        /// End of the time grid
        #[arg(long, default_value_t = 2.0)]
        t_max: f64,
        /// Number of grid points including both endpoints
        #[arg(long, default_value_t = 401)]
        steps: usize,
        /// Evolve the full three-level model or the eliminated two-level one
        #[arg(long, default_value = "full")]
        model: Model,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Transition probabilities and isolation on a flux grid over [-pi, pi]
    SweepFlux {
        #[arg(long)]
        params: Option<PathBuf>,
        /// Probe time at which every flux point is evaluated
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Number of flux grid points including both endpoints
        #[arg(long, default_value_t = 721)]
        phi_count: usize,
        #[arg(long, default_value = "full")]
        model: Model,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Single-photon scattering flows on a wave-number grid
    Scattering {
        /// Waveguide system as a JSON file; overrides the flag-built system
        #[arg(long)]
        params: Option<PathBuf>,
        /// Intercavity hopping (units of the atom decay rate)
        #[arg(long, default_value_t = 0.1)]
        xi: f64,
        /// Atom decay rate entering both levels
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Atom-waveguide coupling; defaults to sqrt(gamma * xi)
        #[arg(long)]
        g: Option<f64>,
        /// Magnitude of the surviving coupling j_ba; defaults to 2 * gamma
        #[arg(long)]
        jba_abs: Option<f64>,
        /// Number of interior wave-number grid points
        #[arg(long, default_value_t = 999)]
        k_count: usize,
        /// Include amplitudes and atom-induced intermediates in JSON rows
        #[arg(long)]
        verbose: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Half-maximum point and width of the one-way transmission band
    Fwhm {
        /// Hopping-to-decay ratio xi / gamma
        #[arg(long, default_value_t = 0.5)]
        eta: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Re-derive the headline numbers and report each check
    Verify {
        #[command(flatten)]
        output: OutputArgs,
    },
}

enum Failure {
    /// Bad configuration: flags, files, parameter validation. Exit 2.
    Config(String),
    /// Numeric condition encountered mid-computation. Exit 3.
    Numeric(String),
    /// Verification ran and reported at least one failing check. Exit 1.
    ChecksFailed,
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput(_) => Failure::Config(e.to_string()),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    match std::env::var("NONRECIP_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) => exec::configure_threads(n),
            Err(_) => {
                eprintln!("error: NONRECIP_THREADS must be a nonnegative integer, got '{raw}'");
                return ExitCode::from(2);
            }
        },
        Err(_) => {}
    }

    let cli = Cli::parse();
    match run(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::ChecksFailed) => ExitCode::from(1),
    }
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Dynamics { params, flux, t_max, steps, model, output } => {
            let p = flux.apply(load_atom_params(params.as_deref())?);
            let sweep = sweep_time(&p, t_max, steps, model)?;
            let (path, format) = output.resolve("dynamics");
            let body = match format {
                Format::Csv => sweep.to_csv(),
                Format::Json => to_json(&sweep)?,
            };
            write_artifact(&path, &body)?;
            Ok(format!(
                "wrote {} rows ({} model, t <= {t_max}) to {}",
                sweep.points.len(),
                sweep.model,
                path.display()
            ))
        }
        Command::SweepFlux { params, t, phi_count, model, output } => {
            let p = load_atom_params(params.as_deref())?;
            let sweep = sweep_flux(&p, t, phi_count, model)?;
            let (path, format) = output.resolve("sweep_flux");
            let body = match format {
                Format::Csv => sweep.to_csv(),
                Format::Json => to_json(&sweep)?,
            };
            write_artifact(&path, &body)?;
            Ok(format!(
                "wrote {} rows ({} model, t = {t}) to {}",
                sweep.points.len(),
                sweep.model,
                path.display()
            ))
        }
        Command::Scattering { params, xi, gamma, g, jba_abs, k_count, verbose, output } => {
            let sys = match params {
                Some(path) => load_waveguide(&path)?,
                None => {
                    let mut sys = WaveguideSystem::one_way_optimal(xi, gamma);
                    if let Some(g) = g {
                        sys.g_a = g;
                        sys.g_b = g;
                    }
                    if let Some(jba) = jba_abs {
                        sys.atom.j_ba = nonrecip_core::C64::new(0.0, -jba);
                    }
                    sys
                }
            };
            sys.validate()?;
            let rows = sweep_k(&sys, k_count)?;
            let (path, format) = output.resolve("scattering");
            let body = match format {
                Format::Csv => nonrecip_core::flows_to_csv(&rows),
                Format::Json => scattering_json(&sys, &rows, verbose)?,
            };
            write_artifact(&path, &body)?;
            Ok(format!("wrote {} rows to {}", rows.len(), path.display()))
        }
        Command::Fwhm { eta, output } => {
            let analytic = half_max_k(eta)?;
            let bisect = half_max_k_numeric(eta)?;
            let (path, format) = output.resolve_with_default(Format::Json, "fwhm");
            let record = FwhmRecord {
                eta,
                k_half: analytic.k_half,
                sin_k_half: analytic.sin_k_half(),
                delta_k: analytic.delta_k,
                delta_k_over_pi: analytic.delta_k / PI,
                analytic: analytic.analytic,
                bisection_delta_k: bisect.delta_k,
            };
            let body = match format {
                Format::Json => to_json(&record)?,
                Format::Csv => {
                    let mut s = String::from(
                        "eta,k_half,sin_k_half,delta_k,delta_k_over_pi,analytic,bisection_delta_k\n",
                    );
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        f17(record.eta),
                        f17(record.k_half),
                        f17(record.sin_k_half),
                        f17(record.delta_k),
                        f17(record.delta_k_over_pi),
                        record.analytic,
                        f17(record.bisection_delta_k)
                    ));
                    s
                }
            };
            write_artifact(&path, &body)?;
            Ok(format!(
                "eta = {eta}: delta_k = {:.6} ({:.4} pi), written to {}",
                record.delta_k,
                record.delta_k_over_pi,
                path.display()
            ))
        }
        Command::Verify { output } => {
            let report = verify::verify_paper_claims();
            for check in &report.checks {
                println!("{}", check.line());
            }
            let (path, format) = output.resolve_with_default(Format::Json, "verify");
            let body = match format {
                Format::Json => to_json(&report)?,
                Format::Csv => report.to_csv(),
            };
            write_artifact(&path, &body)?;
            let passed = report.checks.iter().filter(|c| c.pass).count();
            println!(
                "{passed}/{} checks passed, report written to {}",
                report.checks.len(),
                path.display()
            );
            if report.all_pass {
                Ok(String::from("all checks passed"))
            } else {
                Err(Failure::ChecksFailed)
            }
        }
    }
}

impl OutputArgs {
    fn resolve(&self, stem: &str) -> (PathBuf, Format) {
        self.resolve_with_default(Format::Csv, stem)
    }

    fn resolve_with_default(&self, default_format: Format, stem: &str) -> (PathBuf, Format) {
        let format = self.format.unwrap_or(default_format);
        let path = self.out.clone().unwrap_or_else(|| {
            PathBuf::from(format!(
                "{stem}.{}",
                match format {
                    Format::Csv => "csv",
                    Format::Json => "json",
                }
            ))
        });
        (path, format)
    }
}

#[derive(Serialize)]
struct FwhmRecord {
    eta: f64,
    k_half: f64,
    sin_k_half: f64,
    delta_k: f64,
    delta_k_over_pi: f64,
    analytic: bool,
    bisection_delta_k: f64,
}

#[derive(Serialize)]
struct FlowRow<'a> {
    k: f64,
    #[serde(flatten)]
    flows: &'a FlowMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<ScatteringResult>,
}

fn scattering_json(
    sys: &WaveguideSystem,
    rows: &[(f64, FlowMatrix)],
    verbose: bool,
) -> Result<String, Failure> {
    let mut out = Vec::with_capacity(rows.len());
    for (k, flows) in rows {
        let detail = if verbose {
            let q = ScatteringQuery::new(*k, Port::A)?;
            Some(scattering_matrix(sys, &q)?)
        } else {
            None
        };
        out.push(FlowRow { k: *k, flows, detail });
    }
    to_json(&out)
}

fn f17(x: f64) -> String {
    nonrecip_core::text::float17(x)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut body = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Numeric(format!("JSON encoding failed: {e}")))?;
    body.push('\n');
    Ok(body)
}

fn load_atom_params(path: Option<&std::path::Path>) -> Result<CyclicAtomParams, Failure> {
    let Some(path) = path else {
        return Ok(CyclicAtomParams::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let params: CyclicAtomParams = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("invalid parameters in {}: {e}", path.display())))?;
    Ok(params)
}

fn load_waveguide(path: &std::path::Path) -> Result<WaveguideSystem, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let sys: WaveguideSystem = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("invalid parameters in {}: {e}", path.display())))?;
    sys.validate()?;
    Ok(sys)
}

fn write_artifact(path: &std::path::Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}
