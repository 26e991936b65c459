//! `qfi` — command-line access to the quantum Fisher information toolkit.
//!
//! Results go to standard output as JSON (CSV for sweeps with
//! `--format csv`). Computation failures exit with code 1 and a
//! machine-readable `{"error": <code>, "detail": <text>}` object on standard
//! error; usage errors exit with code 2.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qfi_core::convexity::{self, Ensemble};
use qfi_core::experiments::{self, AlphaChoice, Example1Config, ProbeState};
use qfi_core::fisher;
use qfi_core::io;
use qfi_core::linalg::hermitize;
use qfi_core::lindblad;
use qfi_core::{CMatrix, DensityMatrix, Error, KrausChannel, Measurement, C64};

/// Numerical toolkit for quantum Fisher information bounds.
///
/// The environment variable QFI_PRECISION overrides the default support
/// tolerance used when inverting states and solving for logarithmic
/// derivatives; leave it unset for the built-in rank-revealing default.
#[derive(Parser)]
#[command(name = "qfi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct DerivativeArgs {
    /// State file (JSON matrix; validated as a density matrix).
    #[arg(long)]
    state: PathBuf,
    /// Analytic derivative file (JSON matrix).
    #[arg(long, conflicts_with_all = ["finite_diff", "state_plus", "state_minus"])]
    dstate: Option<PathBuf>,
    /// Build the derivative by central finite difference from two displaced
    /// state files.
    #[arg(long, requires_all = ["state_plus", "state_minus"])]
    finite_diff: bool,
    /// State at x + h (with --finite-diff).
    #[arg(long)]
    state_plus: Option<PathBuf>,
    /// State at x - h (with --finite-diff).
    #[arg(long)]
    state_minus: Option<PathBuf>,
    /// Half-width h of the central difference stencil.
    #[arg(long, default_value_t = qfi_core::DEFAULT_FD_STEP)]
    param_step: f64,
}

impl DerivativeArgs {
    fn load(&self) -> Result<(DensityMatrix, CMatrix), Error> {
        let rho = io::load_state(&self.state)?;
        let drho = match (&self.dstate, self.finite_diff) {
            (Some(path), _) => io::load_matrix(path)?,
            (None, true) => {
                let plus = io::load_state(self.state_plus.as_ref().expect("required by clap"))?;
                let minus = io::load_state(self.state_minus.as_ref().expect("required by clap"))?;
                hermitize(
                    &((plus.matrix() - minus.matrix()) / C64::new(2.0 * self.param_step, 0.0)),
                )
            }
            (None, false) => {
                return Err(Error::BadArgument(
                    "supply --dstate or --finite-diff with --state-plus/--state-minus".into(),
                ))
            }
        };
        Ok((rho, drho))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact quantum Fisher information of a state and its derivative.
    Qfi {
        #[command(flatten)]
        family: DerivativeArgs,
    },
    /// Symmetric logarithmic derivative of a state and its derivative.
    Sld {
        #[command(flatten)]
        family: DerivativeArgs,
        /// Also write the SLD matrix to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Classical Fisher information of the statistics of a POVM.
    Cfi {
        #[command(flatten)]
        family: DerivativeArgs,
        /// POVM element files (repeat once per element).
        #[arg(long, required = true)]
        povm: Vec<PathBuf>,
    },
    /// Extended-convexity bound for an explicit ensemble at a point.
    ConvBound {
        /// Comma-separated branch weights.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        weights: Vec<f64>,
        /// Comma-separated weight derivatives.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        dweights: Vec<f64>,
        /// Branch state files, one per weight.
        #[arg(long, required = true)]
        state: Vec<PathBuf>,
        /// Branch state derivative files, one per weight.
        #[arg(long, required = true)]
        dstate: Vec<PathBuf>,
    },
    /// Measurement-independent upper bounds on the QFI of a family.
    ExtBound {
        #[command(flatten)]
        family: DerivativeArgs,
        /// Non-Hermitian logarithmic derivative file; when given, evaluates
        /// Tr[L rho L†] for that operator instead of the gauge-free bounds.
        #[arg(long)]
        nsld: Option<PathBuf>,
    },
    /// Kraus-channel bound 4(<H1> - <H2>^2) at a point.
    ChannelBound {
        /// Kraus operator files at the evaluation point.
        #[arg(long, required = true)]
        kraus: Vec<PathBuf>,
        /// Kraus derivative files, one per operator.
        #[arg(long, required = true)]
        dkraus: Vec<PathBuf>,
        /// Input state file.
        #[arg(long)]
        state: PathBuf,
        /// Also evaluate the bound at this fixed eta.
        #[arg(long, allow_negative_numbers = true)]
        eta: Option<f64>,
    },
    /// Closed-form extended QFI for a Lindblad model.
    LindbladBound {
        /// Model file (hamiltonian, x0, jumps, tau).
        #[arg(long)]
        model: PathBuf,
        /// Initial state file; evolved for the model's tau.
        #[arg(long)]
        state: PathBuf,
        /// Parameter to estimate: "x0" for the Hamiltonian rate, "x1".."xk"
        /// for jump rates.
        #[arg(long, default_value = "x0")]
        param: String,
    },
    /// GHZ dephasing estimation at one probe count.
    Example1 {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long)]
        n: usize,
        /// Decomposition parameter: a real number, or "optimal".
        #[arg(long, default_value = "optimal", allow_hyphen_values = true)]
        alpha: String,
    },
    /// Dephasing-rate estimation closed forms.
    Example2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        x: f64,
        /// Probe preparation.
        #[arg(long, value_enum, default_value_t = Probe::Product)]
        state: Probe,
    },
    /// Probe-count sweep of the GHZ dephasing transition.
    Sweep1 {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        /// Decomposition parameter: a real number, or "optimal".
        #[arg(long, default_value = "optimal", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Probe {
    Product,
    Ghz,
}

fn precision_override() -> Result<Option<f64>, Error> {
    match std::env::var("QFI_PRECISION") {
        Ok(text) => {
            let tol: f64 = text.parse().map_err(|_| {
                Error::BadArgument(format!("QFI_PRECISION is not a number: {text}"))
            })?;
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(Error::BadArgument(format!(
                    "QFI_PRECISION must be a finite non-negative number, got {tol}"
                )));
            }
            Ok(Some(tol))
        }
        Err(_) => Ok(None),
    }
}

fn qfi_with_precision(rho: &DensityMatrix, drho: &CMatrix) -> Result<f64, Error> {
    match precision_override()? {
        Some(tol) => {
            let l = fisher::solve_sld(rho, drho, Some(tol))?;
            Ok((rho.matrix() * l.matrix() * l.matrix()).trace().re.max(0.0))
        }
        None => fisher::qfi(rho, drho),
    }
}

fn parse_alpha(text: &str) -> Result<AlphaChoice, Error> {
    if text.eq_ignore_ascii_case("optimal") {
        return Ok(AlphaChoice::Optimal);
    }
    text.parse::<f64>()
        .map(AlphaChoice::Fixed)
        .map_err(|_| Error::BadArgument(format!("alpha must be a number or \"optimal\": {text}")))
}

fn example1_row(cfg: &Example1Config) -> serde_json::Value {
    let alpha = cfg.resolved_alpha();
    let parts = experiments::example1_fconv(cfg);
    let f_exact = experiments::example1_exact_qfi(cfg);
    let coeffs = experiments::example1_coeffs(alpha, cfg.q, cfg.tau);
    json!({
        "n": cfg.n,
        "alpha": alpha,
        "c1": coeffs.c1,
        "c2": coeffs.c2,
        "f_conv": parts.f_conv,
        "f_classical": parts.f_classical,
        "f_quantum": parts.f_quantum,
        "f_exact": f_exact,
        "err_bound": 1.0 / parts.f_conv.sqrt(),
        "err_exact": 1.0 / f_exact.sqrt(),
        "threshold": experiments::example1_threshold(cfg.q).ok(),
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Qfi { family } => {
            let (rho, drho) = family.load()?;
            println!("{}", json!({ "qfi": qfi_with_precision(&rho, &drho)? }));
        }
        Command::Sld { family, dump } => {
            let (rho, drho) = family.load()?;
            let l = fisher::solve_sld(&rho, &drho, precision_override()?)?;
            let text = io::matrix_to_json(l.matrix());
            if let Some(path) = dump {
                std::fs::write(&path, &text)?;
            }
            println!("{text}");
        }
        Command::Cfi { family, povm } => {
            let (rho, drho) = family.load()?;
            let elements = povm
                .iter()
                .map(|p| io::load_matrix(p))
                .collect::<Result<Vec<_>, _>>()?;
            let m = Measurement::new(elements)?;
            println!(
                "{}",
                json!({ "cfi": fisher::cfi_of_measurement(&rho, &drho, &m)? })
            );
        }
        Command::ConvBound {
            weights,
            dweights,
            state,
            dstate,
        } => {
            if weights.len() != dweights.len()
                || weights.len() != state.len()
                || weights.len() != dstate.len()
            {
                return Err(Error::BadArgument(
                    "weights, dweights, states and dstates must have matching lengths".into(),
                ));
            }
            let states = state
                .iter()
                .map(|p| io::load_state(p))
                .collect::<Result<Vec<_>, _>>()?;
            let dstates = dstate
                .iter()
                .map(|p| io::load_matrix(p))
                .collect::<Result<Vec<_>, _>>()?;
            let ens = Ensemble::new(move |_| weights.clone(), move |_| Ok(states.clone()))
                .with_weight_derivative(move |_| dweights.clone())
                .with_state_derivative(move |_| Ok(dstates.clone()));
            let split = convexity::split_f_conv(&ens, 0.0)?;
            println!(
                "{}",
                json!({
                    "f_conv": split.total(),
                    "classical": split.classical,
                    "quantum": split.quantum,
                })
            );
        }
        Command::ExtBound { family, nsld } => {
            let (rho, drho) = family.load()?;
            match nsld {
                Some(path) => {
                    let l = io::load_matrix(&path)?;
                    println!(
                        "{}",
                        json!({ "extended_qfi": fisher::extended_qfi(&rho, &drho, &l)? })
                    );
                }
                None => {
                    println!(
                        "{}",
                        json!({
                            "qfi": qfi_with_precision(&rho, &drho)?,
                            "uhlmann": fisher::uhlmann_ext_qfi(&rho, &drho)?,
                            "inverse_quadratic": fisher::inverse_quadratic_bound(&rho, &drho)?,
                        })
                    );
                }
            }
        }
        Command::ChannelBound {
            kraus,
            dkraus,
            state,
            eta,
        } => {
            if kraus.len() != dkraus.len() {
                return Err(Error::BadArgument(
                    "need one --dkraus per --kraus operator".into(),
                ));
            }
            let ops = kraus
                .iter()
                .map(|p| io::load_matrix(p))
                .collect::<Result<Vec<_>, _>>()?;
            let dops = dkraus
                .iter()
                .map(|p| io::load_matrix(p))
                .collect::<Result<Vec<_>, _>>()?;
            let rho = io::load_state(&state)?;
            let count = ops.len();
            let ch = KrausChannel::new(count, move |_| ops.clone())
                .with_derivative(move |_| dops.clone());
            let min = convexity::channel_bound_min(&ch, &rho, 0.0)?;
            let mut out = json!({
                "bound": min.bound,
                "h1": min.terms.h1,
                "h2": min.terms.h2,
                "eta_star": min.terms.eta_star,
            });
            if let Some(eta) = eta {
                out["value_at_eta"] = json!(convexity::channel_bound_eta(&ch, &rho, 0.0, eta)?);
            }
            println!("{out}");
        }
        Command::LindbladBound {
            model,
            state,
            param,
        } => {
            let model = io::load_model(&model)?;
            let rho0 = io::load_state(&state)?;
            let rho_tau = lindblad::evolve(&model, &rho0)?;
            let value = if param == "x0" {
                lindblad::ext_qfi_x0(&model, &rho_tau)?
            } else {
                let index: usize = param
                    .strip_prefix('x')
                    .and_then(|s| s.parse().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(|| {
                        Error::BadArgument(format!("param must be x0, x1, ..., got {param}"))
                    })?;
                lindblad::ext_qfi_xa(&model, &rho_tau, index - 1)?
            };
            println!(
                "{}",
                json!({ "param": param, "tau": model.tau, "ext_qfi": value })
            );
        }
        Command::Example1 {
            q,
            tau,
            x,
            n,
            alpha,
        } => {
            let cfg = Example1Config::new(q, tau, x, parse_alpha(&alpha)?, n)?;
            println!("{}", example1_row(&cfg));
        }
        Command::Example2 { n, tau, x, state } => {
            let probe = match state {
                Probe::Product => ProbeState::Product,
                Probe::Ghz => ProbeState::Ghz,
            };
            let v = experiments::example2_ext_qfi(n, tau, x, probe)?;
            println!("{}", json!({ "bound": v.bound, "exact": v.exact }));
        }
        Command::Sweep1 {
            q,
            tau,
            x,
            n_min,
            n_max,
            alpha,
            format,
        } => {
            let template = Example1Config::new(q, tau, x, parse_alpha(&alpha)?, n_min)?;
            let rows = experiments::sweep_example1(&template, n_min, n_max)?;
            match format {
                Format::Csv => print!("{}", experiments::sweep_to_csv(&rows)),
                Format::Json => {
                    let rows: Vec<_> = rows
                        .iter()
                        .map(|r| {
                            json!({
                                "n": r.n,
                                "f_conv": r.f_conv,
                                "f_classical": r.f_classical,
                                "f_quantum": r.f_quantum,
                                "f_exact": r.f_exact,
                                "err_bound": r.err_bound,
                                "err_exact": r.err_exact,
                                "asymp_small_n": r.asymp_small_n,
                                "asymp_large_n": r.asymp_large_n,
                            })
                        })
                        .collect();
                    println!("{}", json!(rows));
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!(
                "{}",
                json!({ "error": err.code(), "detail": err.to_string() })
            );
            ExitCode::FAILURE
        }
    }
}
