use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use periodicgp::bridge::{
    bridge_ensemble, centered_bridge_coefficients, decomposition_check, default_truncation, proof_identity,
    BridgeVariant, DecompositionReport, ProofIdentity,
};
use periodicgp::fit::{default_harmonics, fit_mle, goodness_of_fit, model_coefficients, FitResult, GoodnessOfFit};
use periodicgp::io::{self as pio, RunMetadata};
use periodicgp::regularity::{estimate_holder, fit_decay, predict_regularity, DyadicWindow, RegularityReport};
use periodicgp::spectral::{
    coefficient_round_trip, coeffs_to_covariogram, covariogram_round_trip, covariogram_to_coeffs, empirical_coeffs,
};
use periodicgp::synthesis::{sample_ensemble, sample_path, truncation_index};
use periodicgp::{Covariogram, Error, GridPath, ParametricModel, PathEnsemble, Result, SampledCovariogram,
    SpectralCoefficients, StreamSeed};

/// Periodic stationary Gaussian processes: simulation, spectral transforms, regularity
/// and fitting.
///
/// Exit codes: 0 success, 1 failed check, 2 usage, 3 aliasing, 4 invalid covariance,
/// 5 degenerate data. PERIODICGP_THREADS caps the worker threads.
#[derive(Parser)]
#[command(name = "periodicgp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample paths from the `a/k^p` model, a coefficient file or a bridge construction.
    Simulate(SimulateArgs),
    /// Convert between spectral coefficients and covariogram tables.
    Transform(TransformArgs),
    /// Fit `c_k = a/k^p` to one path by maximum likelihood.
    Fit(FitArgs),
    /// Predicted and estimated path regularity.
    Regularity(RegularityArgs),
    /// Check the centered-bridge decomposition and the series identity behind it.
    BridgeCheck(BridgeCheckArgs),
    /// One path per decay exponent, all sharing the same Gaussian draws.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// `param`, `coeffs` or `bridge:<plain|centered-shift|centered-series|centralized>`.
    #[arg(long, default_value = "param")]
    model: String,
    /// Amplitude of the `param` model.
    #[arg(long)]
    a: Option<f64>,
    /// Decay exponent of the `param` model (> 1/2).
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    /// Coefficient JSON for the `coeffs` model.
    #[arg(long)]
    coeffs: Option<PathBuf>,
    /// Grid size (power of two).
    #[arg(long, default_value_t = 1024)]
    n: usize,
    /// Number of independent paths.
    #[arg(long, default_value_t = 1)]
    paths: usize,
    /// Master seed; path `r` uses stream `r`.
    #[arg(long)]
    seed: Option<u64>,
    /// Truncate where the omitted variance fraction drops below this.
    #[arg(long)]
    eps: Option<f64>,
    /// Highest harmonic (default: all below Nyquist, or the support of a finite coefficient file).
    #[arg(long)]
    k: Option<usize>,
    /// Sine-series terms for the bridge path constructions (default n/2).
    #[arg(long)]
    m: Option<usize>,
    /// Output CSV; metadata goes next to it as `<stem>.meta.json`. Default: stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Coefficient JSON to covariogram table.
    C2g,
    /// Covariogram table to coefficient JSON.
    G2c,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    direction: Direction,
    /// Input file; for g2c the keyword `bridge` selects the centered-bridge covariogram.
    #[arg(long)]
    input: String,
    /// Grid size (c2g; g2c with `bridge`).
    #[arg(long)]
    n: Option<usize>,
    /// Harmonics to extract (g2c, default n/2 - 1).
    #[arg(long)]
    k: Option<usize>,
    /// Report the round-trip residual on stderr.
    #[arg(long)]
    check: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Path CSV.
    #[arg(long)]
    input: PathBuf,
    /// Path column to fit (0-based, excluding `t`).
    #[arg(long, default_value_t = 0)]
    column: usize,
    /// Harmonics used (default n/4).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = periodicgp::fit::DEFAULT_P_BOUNDS.0)]
    p_min: f64,
    #[arg(long, default_value_t = periodicgp::fit::DEFAULT_P_BOUNDS.1)]
    p_max: f64,
    /// Result JSON (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-harmonic residual table CSV.
    #[arg(long)]
    residuals: Option<PathBuf>,
}

#[derive(Args)]
struct RegularityArgs {
    /// Coefficient JSON, or `bridge` for the centered bridge.
    #[arg(long, conflicts_with = "ensemble", required_unless_present = "ensemble")]
    coeffs: Option<String>,
    /// Path ensemble CSV.
    #[arg(long)]
    ensemble: Option<PathBuf>,
    /// Decay-fit window start.
    #[arg(long)]
    k_min: Option<usize>,
    /// Decay-fit window end.
    #[arg(long)]
    k_max: Option<usize>,
    /// Smallest dyadic lag exponent `j` (lag `2^j/n`).
    #[arg(long)]
    j_min: Option<u32>,
    /// Largest dyadic lag exponent.
    #[arg(long)]
    j_max: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BridgeCheckArgs {
    #[arg(long, default_value_t = 20_000)]
    replicates: usize,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    /// Sine-series terms (default n/2).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Terms in each identity partial sum.
    #[arg(long, default_value_t = 1_000_000)]
    terms: u64,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    k_list: Vec<u64>,
    /// Largest accepted identity gap.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Decay exponents, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    p_list: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Highest harmonic (default n/2 - 1).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(pio::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn metadata_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.meta.json"))
}

fn write_metadata(out: &Option<PathBuf>, meta: &RunMetadata) -> Result<()> {
    if let Some(p) = out {
        pio::write_json(pio::create(&metadata_path(p))?, meta)?;
    }
    Ok(())
}

fn read_coefficients(source: &str) -> Result<SpectralCoefficients> {
    if source == "bridge" {
        Ok(centered_bridge_coefficients())
    } else {
        pio::read_coefficients(pio::open(Path::new(source))?)
    }
}

fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Harmonic cutoff for synthesis from coefficients.
fn synthesis_cutoff(c: &SpectralCoefficients, n: usize, k: Option<usize>, eps: Option<f64>) -> Result<usize> {
    if k.is_some() && eps.is_some() {
        return Err(usage("--k and --eps are mutually exclusive"));
    }
    let k_max = match (k, eps) {
        (Some(k), _) => k,
        (None, Some(eps)) => truncation_index(c, eps)?,
        (None, None) => c.support().unwrap_or(n / 2 - 1),
    };
    if 2 * k_max >= n {
        if let Some(eps) = eps {
            log::error!("eps = {eps} needs {k_max} harmonics, beyond the band of grid size {n}");
        }
        return Err(Error::Aliasing { harmonic: k_max, n });
    }
    Ok(k_max)
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let n = args.n;
    periodicgp::grid::check_grid(n, 4)?;
    if args.paths == 0 {
        return Err(usage("--paths must be at least 1"));
    }
    let (kind, variant) = match args.model.split_once(':') {
        Some(("bridge", v)) => ("bridge", Some(v.parse::<BridgeVariant>()?)),
        None if args.model == "param" || args.model == "coeffs" => (args.model.as_str(), None),
        _ => return Err(usage(format!("unknown model '{}' (param | coeffs | bridge:<variant>)", args.model))),
    };
    if kind != "param" && (args.a.is_some() || args.p.is_some()) {
        return Err(usage("--a and --p apply to the param model only"));
    }
    if kind != "coeffs" && args.coeffs.is_some() {
        return Err(usage("--coeffs applies to the coeffs model only"));
    }
    if kind != "bridge" && args.m.is_some() {
        return Err(usage("--m applies to bridge models only"));
    }
    if kind == "bridge" && (args.eps.is_some() || args.k.is_some()) {
        return Err(usage("bridge models take --m, not --k or --eps"));
    }

    let (c, model) = match kind {
        "param" => {
            let p = args.p.ok_or_else(|| usage("the param model needs --p"))?;
            let a = args.a.unwrap_or(1.0);
            let m = ParametricModel::new(a, p)?;
            (Some(model_coefficients(&m, 0)), json!({"kind": "param", "a": a, "p": p}))
        }
        "coeffs" => {
            let path = args.coeffs.as_ref().ok_or_else(|| usage("the coeffs model needs --coeffs"))?;
            let c = pio::read_coefficients(pio::open(path)?)?;
            (Some(c), json!({"kind": "coeffs", "file": path.display().to_string()}))
        }
        _ => (None, json!({"kind": "bridge", "variant": variant.map(|v| v.name())})),
    };
    let seed = resolve_seed(args.seed);

    let mut meta = RunMetadata {
        command: "simulate".into(),
        seed,
        n,
        replicates: args.paths,
        eps: args.eps,
        model: Some(model),
        version: version(),
        ..Default::default()
    };
    let ensemble = match (c, variant) {
        (Some(c), _) => {
            let k_max = synthesis_cutoff(&c, n, args.k, args.eps)?;
            meta.k = k_max;
            let total = c.total_mass();
            meta.tail_fraction = Some(if total > 0.0 { c.tail_energy(k_max) / total } else { 0.0 });
            sample_ensemble(&c, k_max, n, args.paths, seed)?
        }
        (None, Some(v)) => {
            let m = args.m.unwrap_or_else(|| default_truncation(n));
            meta.k = if v == BridgeVariant::CenteredSeries { m.min(n / 2 - 1) } else { m };
            bridge_ensemble(v, n, m, args.paths, seed)?
        }
        (None, None) => unreachable!("model kind resolved above"),
    };
    pio::write_paths(output(&args.out)?, ensemble.paths())?;
    write_metadata(&args.out, &meta)
}

fn transform(args: TransformArgs) -> Result<()> {
    match args.direction {
        Direction::C2g => {
            if args.k.is_some() {
                return Err(usage("--k applies to g2c only"));
            }
            let c = pio::read_coefficients(pio::open(Path::new(&args.input))?)?;
            if c.tail().is_some() {
                log::warn!("the declared tail is not represented in the covariogram table");
            }
            let n = match args.n {
                Some(n) => n,
                None => (2 * c.explicit_len() + 2).next_power_of_two().max(64),
            };
            let g = coeffs_to_covariogram(&c, n)?;
            pio::write_covariogram(output(&args.out)?, g.values())?;
            if args.check {
                eprintln!("round-trip residual: {:.3e}", coefficient_round_trip(&c, n)?);
            }
        }
        Direction::G2c => {
            let table = if args.input == "bridge" {
                let n = args.n.unwrap_or_else(|| Covariogram::centered_bridge().default_grid());
                SampledCovariogram::new(Covariogram::centered_bridge().sample(n)?)?
            } else {
                if args.n.is_some() {
                    return Err(usage("--n is implied by the table size"));
                }
                pio::read_covariogram(pio::open(Path::new(&args.input))?)?
            };
            let n = table.n();
            if n < 4 {
                return Err(usage("covariogram table needs at least 4 points"));
            }
            let k_max = args.k.unwrap_or(n / 2 - 1);
            let extraction = covariogram_to_coeffs(&Covariogram::Sampled(table.clone()), k_max, n)?;
            pio::write_coefficients(output(&args.out)?, &extraction.coefficients)?;
            if args.check {
                eprintln!("round-trip residual: {:.3e}", covariogram_round_trip(&table)?);
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FitReport {
    #[serde(flatten)]
    fit: FitResult,
    goodness_of_fit: GoodnessOfFit,
}

fn fit(args: FitArgs) -> Result<()> {
    let mut paths = pio::read_paths(pio::open(&args.input)?)?;
    if args.column >= paths.len() {
        return Err(usage(format!("column {} requested but the file has {} paths", args.column, paths.len())));
    }
    let path: GridPath = paths.swap_remove(args.column);
    let k_max = args.k.unwrap_or_else(|| default_harmonics(path.n()));
    let result = fit_mle(&path, k_max, (args.p_min, args.p_max))?;
    let gof = goodness_of_fit(&path, &result)?;
    if let Some(p) = &args.residuals {
        let mut w = io::BufWriter::new(pio::create(p)?);
        writeln!(w, "k,sin,cos,standardized")?;
        for r in &gof.residuals {
            writeln!(w, "{},{:.16e},{:.16e},{:.16e}", r.k, r.sin, r.cos, r.standardized)?;
        }
        w.flush()?;
    }
    pio::write_json(output(&args.out)?, &FitReport { fit: result, goodness_of_fit: gof })
}

fn regularity(args: RegularityArgs) -> Result<()> {
    let report: RegularityReport = if let Some(source) = &args.coeffs {
        if args.j_min.is_some() || args.j_max.is_some() {
            return Err(usage("--j-min/--j-max apply to --ensemble only"));
        }
        let c = read_coefficients(source)?;
        let explicit = c.explicit_len();
        if explicit >= 4 || args.k_max.is_some() {
            let k_min = args.k_min.unwrap_or(1);
            let k_max = args.k_max.unwrap_or(explicit);
            let fit = fit_decay(&c, k_min, k_max)?;
            let mut r = predict_regularity(fit.q)?;
            r.diagnostics.decay_fit = Some(fit);
            r.diagnostics.source = Some("coefficient decay fit".into());
            r
        } else {
            let tail = c.tail().ok_or_else(|| {
                Error::TailUnknown("fewer than 4 explicit coefficients and no declared tail".into())
            })?;
            let mut r = predict_regularity(tail.q)?;
            r.diagnostics.source = Some("declared tail".into());
            r
        }
    } else {
        let path = args.ensemble.as_ref().ok_or_else(|| usage("one of --coeffs or --ensemble is required"))?;
        let ensemble = PathEnsemble::new(pio::read_paths(pio::open(path)?)?, None)?;
        let n = ensemble.n();
        let full = DyadicWindow::full(n);
        let window = DyadicWindow { j_min: args.j_min.unwrap_or(full.j_min), j_max: args.j_max.unwrap_or(full.j_max) };
        let k_max = args.k_max.unwrap_or(n / 8);
        let empirical = empirical_coeffs(&ensemble, k_max)?;
        let fit = fit_decay(&empirical.coefficients, args.k_min.unwrap_or(1), k_max)?;
        let holder = estimate_holder(&ensemble, window)?;
        let mut r = predict_regularity(fit.q)?;
        r.diagnostics.decay_fit = Some(fit);
        r.diagnostics.holder_estimate = Some(holder);
        r.diagnostics.source = Some("ensemble".into());
        r
    };
    pio::write_json(output(&args.out)?, &report)
}

#[derive(Serialize)]
struct IdentityCheck {
    #[serde(flatten)]
    identity: ProofIdentity,
    pass: bool,
}

#[derive(Serialize)]
struct BridgeCheckReport {
    seed: u64,
    decomposition: DecompositionReport,
    identities: Vec<IdentityCheck>,
    pass: bool,
}

/// Returns whether every check passed.
fn bridge_check(args: BridgeCheckArgs) -> Result<bool> {
    let seed = resolve_seed(args.seed);
    let m = args.m.unwrap_or_else(|| default_truncation(args.n));
    let decomposition = decomposition_check(args.replicates, args.n, m, seed)?;
    let identities = args
        .k_list
        .iter()
        .map(|&k| {
            let identity = proof_identity(k, args.terms)?;
            Ok(IdentityCheck { pass: identity.gap < args.tolerance, identity })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = decomposition.pass && identities.iter().all(|c| c.pass);
    pio::write_json(output(&args.out)?, &BridgeCheckReport { seed, decomposition, identities, pass })?;
    Ok(pass)
}

fn format_p(p: f64) -> String {
    format!("p{p}")
}

fn sweep(args: SweepArgs) -> Result<()> {
    let n = args.n;
    periodicgp::grid::check_grid(n, 4)?;
    let mut ps = args.p_list.clone();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let k_max = args.k.unwrap_or(n / 2 - 1);
    let seed = resolve_seed(args.seed);
    let draws = StreamSeed::new(seed, 0);
    let paths = ps
        .iter()
        .map(|&p| {
            let c = model_coefficients(&ParametricModel::new(args.a, p)?, 0);
            sample_path(&c, k_max, n, draws)
        })
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = ps.iter().map(|&p| format_p(p)).collect();
    pio::write_named_columns(output(&args.out)?, &names, &paths)?;
    let meta = RunMetadata {
        command: "sweep".into(),
        seed,
        n,
        k: k_max,
        replicates: 1,
        model: Some(json!({"kind": "param", "a": args.a, "p": ps})),
        version: version(),
        ..Default::default()
    };
    write_metadata(&args.out, &meta)
}

fn configure_threads() {
    let Ok(v) = std::env::var("PERIODICGP_THREADS") else {
        return;
    };
    match v.trim().parse::<usize>() {
        Ok(t) if t > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
                log::warn!("could not size the thread pool: {e}");
            }
        }
        _ => log::warn!("ignoring PERIODICGP_THREADS={v}: expected a positive integer"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a).map(|_| true),
        Command::Transform(a) => transform(a).map(|_| true),
        Command::Fit(a) => fit(a).map(|_| true),
        Command::Regularity(a) => regularity(a).map(|_| true),
        Command::BridgeCheck(a) => bridge_check(a),
        Command::Sweep(a) => sweep(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
