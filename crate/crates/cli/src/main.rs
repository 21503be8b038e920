use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use xtransform::moments::MomentSequence;
use xtransform::potential::Density;
use xtransform::profile::{gamma_alpha, t_n, GammaRoute, ProfileEvaluator, ProfileParams, Route};
use xtransform::report::REPORT_SCHEMA;
use xtransform::suites::{self, SuiteConfig};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "xtransform", version, about = "Profile function and exponential-transform verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate M_n(w) (or F_alpha(w)) with an error estimate
    Profile(ProfileArgs),
    /// Run a verification suite; exit code 0 on pass, 1 on fail
    Verify(VerifyArgs),
    /// List the available suites
    Suites,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    w: Option<f64>,
    /// evaluate at w = T_n(xi)
    #[arg(long)]
    xi: Option<f64>,
    /// inverse, series, auto or both
    #[arg(long, default_value = "auto")]
    route: String,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    suite: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    /// ball radius for harmonic-ball
    #[arg(long = "R")]
    radius: Option<f64>,
    /// density JSON file
    #[arg(long)]
    density: Option<PathBuf>,
    /// comma-separated rationals, a JSON array, or a file holding either
    #[arg(long)]
    seq: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// directory for per-point CSV and summary files
    #[arg(long)]
    details: Option<PathBuf>,
}

/// Usage and I/O problems; anything of this kind exits with code 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {}", e.0);
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match cli.command {
        Command::Profile(args) => profile(args),
        Command::Verify(args) => verify(args),
        Command::Suites => {
            for (name, suite) in suites::registry() {
                println!("{name:<20} {}", suite.describe());
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {}", e.0);
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(raw) = std::env::var("XTRANSFORM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| UsageError(format!("XTRANSFORM_THREADS={raw} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), UsageError> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| UsageError(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn profile(args: ProfileArgs) -> Result<bool, UsageError> {
    let params = match (args.n, args.alpha) {
        (Some(_), Some(_)) => return Err(UsageError("give either --n or --alpha, not both".into())),
        (Some(n), None) => ProfileParams::from_dimension(n)?,
        (None, Some(a)) => ProfileParams::from_alpha(a)?,
        (None, None) => return Err(UsageError("one of --n or --alpha is required".into())),
    };
    let w = match (args.w, args.xi, params.dimension()) {
        (Some(w), None, _) => w,
        (None, Some(xi), Some(n)) => t_n(n, xi)?,
        (None, Some(_), None) => return Err(UsageError("--xi needs --n".into())),
        (Some(_), Some(_), _) => return Err(UsageError("give either --w or --xi, not both".into())),
        (None, None, _) => return Err(UsageError("one of --w or --xi is required".into())),
    };
    let ev = match args.tol {
        Some(tol) => ProfileEvaluator::with_options(params, tol, xtransform::profile::DEFAULT_SERIES_ORDER)?,
        None => ProfileEvaluator::new(params)?,
    };
    let mut out = Map::new();
    out.insert("schema".into(), json!(REPORT_SCHEMA));
    out.insert("alpha".into(), json!(params.alpha()));
    if let Some(n) = params.dimension() {
        out.insert("n".into(), json!(n));
    }
    out.insert("w".into(), json!(w));
    if let Some(xi) = args.xi {
        out.insert("xi".into(), json!(xi));
    }
    out.insert("route".into(), json!(args.route));
    out.insert("error_estimate".into(), json!(ev.tolerance()));
    if params.alpha() <= 1.0 {
        out.insert("gamma_alpha".into(), json!(gamma_alpha(params.alpha(), GammaRoute::Digamma)?));
    }
    if args.route == "both" {
        let inverse = ev.eval(w, Route::Inverse)?;
        let series = ev.eval(w, Route::Series)?;
        out.insert("value".into(), json!(inverse));
        out.insert("complement".into(), json!(ev.complement(w, Route::Inverse)?));
        out.insert("values".into(), json!({ "inverse": inverse, "series": series }));
        out.insert("difference".into(), json!((inverse - series).abs()));
    } else {
        let route: Route = args.route.parse()?;
        out.insert("value".into(), json!(ev.eval(w, route)?));
        out.insert("complement".into(), json!(ev.complement(w, route)?));
    }
    let text = serde_json::to_string_pretty(&Value::Object(out))?;
    emit(&text, args.out.as_deref())?;
    Ok(true)
}

fn read_sequence(raw: &str) -> Result<MomentSequence, UsageError> {
    let path = Path::new(raw.trim());
    let text = if path.is_file() {
        fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?
    } else {
        raw.to_owned()
    };
    MomentSequence::parse(&text).map_err(|e| UsageError(format!("--seq: {e}")))
}

fn verify(args: VerifyArgs) -> Result<bool, UsageError> {
    let suite = suites::find(&args.suite).ok_or_else(|| {
        let names: Vec<&str> = suites::registry().keys().copied().collect();
        UsageError(format!("unknown suite `{}`; available: {}", args.suite, names.join(", ")))
    })?;
    let density = match &args.density {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
            Some(Density::from_json(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?)
        }
        None => None,
    };
    let seq = args.seq.as_deref().map(read_sequence).transpose()?;
    let config = SuiteConfig {
        n: args.n,
        alpha: args.alpha,
        w: args.w,
        xi: args.xi,
        radius: args.radius,
        density,
        seq,
        samples: args.samples,
        seed: args.seed,
        tol: args.tol,
    };
    let mut outcome = suite.run(&config)?;
    if let Some(dir) = &args.details {
        fs::create_dir_all(dir).map_err(|e| UsageError(format!("{}: {e}", dir.display())))?;
        match &outcome.details {
            Some(details) => {
                let csv = dir.join(format!("{}.csv", suite.name()));
                let summary = dir.join(format!("{}_summary.json", suite.name()));
                fs::write(&csv, &details.csv).map_err(|e| UsageError(format!("{}: {e}", csv.display())))?;
                let text = serde_json::to_string_pretty(&details.summary)? + "\n";
                fs::write(&summary, text).map_err(|e| UsageError(format!("{}: {e}", summary.display())))?;
                outcome.report.details_path = Some(csv.display().to_string());
            }
            None => eprintln!("note: suite `{}` has no per-point details", suite.name()),
        }
    }
    let report = &outcome.report;
    emit(&report.to_json(), args.out.as_deref())?;
    if args.out.is_some() {
        eprintln!(
            "{}: {} (worst {:e}, tolerance {:e}, {} samples)",
            report.name,
            if report.pass { "pass" } else { "FAIL" },
            report.worst_slack_or_defect,
            report.tolerance,
            report.samples
        );
    }
    Ok(report.pass)
}
