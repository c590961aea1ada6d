//! `siegel`: γ tables, verification suites, moment maps and coordinate
//! round trips from the command line.

mod config;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use siegel_core::coordinates::{kappa, tau};
use siegel_core::heisenberg::{LieElement, SubgroupKind, SubgroupSpec};
use siegel_core::siegel::{moment_map_closed_form, moment_map_subgroup, SiegelPoint};
use siegel_core::spectral::{log_grid, Mode, RadialSymbol, SpectralFunction};
use siegel_core::suite::{run_suite, CRITERIA};
use siegel_core::{Error, C64};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const SCHEMA: u32 = 1;

const GAMMA_HELP: &str = "\
CSV columns, in order: xi, re, im, err, mode
  xi    frequency
  re    real part of gamma(xi)
  im    imaginary part of gamma(xi)
  err   absolute error estimate
  mode  closed | quadrature
JSON output is {\"schema\": 1, \"symbol\", \"lambda\", \"rows\": [{xi, re, im, err, mode}]}.";

#[derive(Parser, Debug)]
#[command(name = "siegel", version, about = "Toeplitz spectra and Heisenberg moment maps on the Siegel domain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the spectral function of a radial symbol on a log-spaced grid.
    #[command(after_help = GAMMA_HELP)]
    Gamma(GammaArgs),
    /// Run the verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// Print the moment map of a subgroup at a point as JSON.
    Moment(MomentArgs),
    /// Print tau(z), kappa(tau(z)) and the round-trip residual as JSON.
    Coords(CoordsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GammaMode {
    Closed,
    Quadrature,
}

#[derive(clap::Args, Debug)]
struct GammaArgs {
    /// const:c, exp:beta, ind:a,b (b may be inf), pow:p or osclog:omega
    #[arg(long, value_parser = parse_symbol)]
    symbol: RadialSymbol,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = parse_lambda)]
    lambda: f64,
    /// lo:hi:count, log-spaced and inclusive
    #[arg(long, value_parser = parse_range)]
    xi: XiRange,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, value_enum, default_value = "closed")]
    mode: GammaMode,
    /// Relative tolerance for quadrature values.
    #[arg(long, default_value_t = 1e-10, value_parser = parse_positive)]
    tol: f64,
    /// Write here (atomically) instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Skip {
    /// Criteria built on the 3-D Toeplitz quadrature.
    Heavy,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    /// Criteria to run, e.g. --only 1,4,5 (default: all).
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
    #[arg(long, value_enum)]
    skip: Option<Skip>,
    /// Override a tolerance, e.g. --tol moment=1e-7 (repeatable).
    #[arg(long = "tol", value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,
    /// TOML file with top-level seed/samples/n/lambda and [tolerances] and
    /// [quadrature] tables.
    #[arg(long, env = "SIEGEL_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true, value_parser = parse_lambda)]
    lambda: Option<f64>,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct SubgroupArg(String);

#[derive(clap::Args, Debug)]
struct MomentArgs {
    /// re,im[;re,im...]:re,im (entries of z' then z_{n+1})
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// center, full, hr, hir, hlr:l or hlir:l
    #[arg(long, default_value = "full", value_parser = parse_subgroup_arg)]
    subgroup: SubgroupArg,
}

#[derive(clap::Args, Debug)]
struct CoordsArgs {
    /// re,im[;re,im...]:re,im (entries of z' then z_{n+1})
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(Clone, Debug)]
struct XiRange {
    lo: f64,
    hi: f64,
    count: usize,
}

fn parse_symbol(s: &str) -> std::result::Result<RadialSymbol, String> {
    RadialSymbol::parse(s).map_err(|e| e.to_string())
}

fn parse_lambda(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > -1.0 {
        Ok(v)
    } else {
        Err(format!("lambda must exceed -1, got {s}"))
    }
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err(format!("must be positive and finite, got {s}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_range(s: &str) -> std::result::Result<XiRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err("expected lo:hi:count".into());
    };
    let range = XiRange {
        lo: parse_positive(lo)?,
        hi: parse_positive(hi)?,
        count: count.parse().map_err(|e| format!("count: {e}"))?,
    };
    if range.hi < range.lo || range.count == 0 {
        return Err("need lo <= hi and count >= 1".into());
    }
    Ok(range)
}

fn parse_tolerance(s: &str) -> std::result::Result<(String, f64), String> {
    let (key, value) = s.split_once('=').ok_or("expected key=value")?;
    let value: f64 = value.trim().parse().map_err(|e| format!("{e}"))?;
    siegel_core::tolerance::Tolerances::default()
        .set(key.trim(), value)
        .map_err(|e| e.to_string())?;
    Ok((key.trim().to_string(), value))
}

fn parse_subgroup_arg(s: &str) -> std::result::Result<SubgroupArg, String> {
    subgroup_kind(s).map(|_| SubgroupArg(s.to_string()))
}

fn subgroup_kind(s: &str) -> std::result::Result<SubgroupKind, String> {
    let ell = |v: &str| v.parse::<usize>().map_err(|e| format!("l: {e}"));
    Ok(match s.split_once(':') {
        None => match s {
            "center" => SubgroupKind::Center,
            "full" => SubgroupKind::Full,
            "hr" => SubgroupKind::HR,
            "hir" => SubgroupKind::HiR,
            _ => return Err(format!("unknown subgroup {s:?}")),
        },
        Some(("hlr", l)) => SubgroupKind::HlR { ell: ell(l)? },
        Some(("hlir", l)) => SubgroupKind::HliR { ell: ell(l)? },
        Some(_) => return Err(format!("unknown subgroup {s:?}")),
    })
}

fn parse_complex(s: &str) -> Result<C64> {
    let (re, im) = s.split_once(',').with_context(|| format!("expected re,im in {s:?}"))?;
    Ok(C64::new(re.trim().parse()?, im.trim().parse()?))
}

/// Parses `re,im[;re,im...]:re,im`.
fn parse_point(s: &str) -> Result<SiegelPoint> {
    let (prime, last) = s.rsplit_once(':').context("expected z' entries, ':' and z_{n+1}")?;
    let z_prime = prime.split(';').map(parse_complex).collect::<Result<Vec<_>>>()?;
    Ok(SiegelPoint::new(z_prime, parse_complex(last)?)?)
}

/// Writes to a temporary file next to `path` and renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(path) => write_atomic(path, bytes),
        None => Ok(std::io::stdout().write_all(bytes)?),
    }
}

#[derive(Serialize)]
struct GammaRow {
    xi: f64,
    re: f64,
    im: f64,
    err: f64,
    mode: String,
}

#[derive(Serialize)]
struct GammaTable<'a> {
    schema: u32,
    symbol: String,
    lambda: f64,
    rows: &'a [GammaRow],
}

fn cmd_gamma(args: GammaArgs) -> Result<ExitCode> {
    let mode = match args.mode {
        GammaMode::Closed => Mode::ClosedForm,
        GammaMode::Quadrature => Mode::Quadrature,
    };
    let sf = SpectralFunction::new(args.symbol.clone(), args.lambda, mode)?;
    let grid = log_grid(args.xi.lo, args.xi.hi, args.xi.count)?;
    let rows = grid
        .iter()
        .map(|&xi| {
            let v = sf.eval(xi, args.tol)?;
            Ok(GammaRow {
                xi,
                re: v.value.re,
                im: v.value.im,
                err: v.error,
                mode: v.mode.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bytes = match args.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &rows {
                w.serialize(row)?;
            }
            w.into_inner()?
        }
        Format::Json => {
            let table = GammaTable {
                schema: SCHEMA,
                symbol: args.symbol.to_string(),
                lambda: args.lambda,
                rows: &rows,
            };
            let mut out = serde_json::to_vec_pretty(&table)?;
            out.push(b'\n');
            out
        }
    };
    emit(args.output.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CheckJson<'a> {
    name: &'a str,
    tolerance: f64,
    residual: f64,
    passed: bool,
    detail: &'a str,
}

#[derive(Serialize)]
struct CriterionJson<'a> {
    id: usize,
    title: &'a str,
    passed: bool,
    within_budget: bool,
    budget_seconds: f64,
    checks: Vec<CheckJson<'a>>,
}

#[derive(Serialize)]
struct Report<'a> {
    schema: u32,
    seed: u64,
    n: usize,
    lambda: f64,
    passed: bool,
    criteria: Vec<CriterionJson<'a>>,
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let mut cfg = match &args.config {
        Some(path) => config::load(path)?,
        None => Default::default(),
    };
    for (key, value) in &args.tolerances {
        cfg.tolerances.set(key, *value)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = args.samples {
        cfg.samples = samples;
    }
    if let Some(n) = args.n {
        anyhow::ensure!(n >= 1, "n must be at least 1");
        cfg.n = n;
    }
    if let Some(lambda) = args.lambda {
        cfg.lambda = lambda;
    }
    let ids: Vec<usize> = if args.only.is_empty() {
        CRITERIA.iter().map(|c| c.id).collect()
    } else {
        for id in &args.only {
            anyhow::ensure!(CRITERIA.iter().any(|c| c.id == *id), "no criterion {id}");
        }
        args.only.clone()
    };
    let results = run_suite(&ids, matches!(args.skip, Some(Skip::Heavy)), &cfg)?;
    for c in &results {
        eprintln!("{}", c.summary());
        for check in c.checks.iter().filter(|k| !k.passed) {
            eprintln!("    failed: {} residual {:e} tolerance {:e} {}", check.name, check.residual, check.tolerance, check.detail);
        }
    }
    let passed = results.iter().all(|c| c.passed());
    let report = Report {
        schema: SCHEMA,
        seed: cfg.seed,
        n: cfg.n,
        lambda: cfg.lambda,
        passed,
        criteria: results
            .iter()
            .map(|c| CriterionJson {
                id: c.info.id,
                title: c.info.title,
                passed: c.passed(),
                within_budget: c.within_budget(),
                budget_seconds: c.info.budget.as_secs_f64(),
                checks: c
                    .checks
                    .iter()
                    .map(|k| CheckJson {
                        name: &k.name,
                        tolerance: k.tolerance,
                        residual: k.residual,
                        passed: k.passed,
                        detail: &k.detail,
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut bytes = serde_json::to_vec_pretty(&report)?;
    bytes.push(b'\n');
    emit(args.output.as_deref(), &bytes)?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn lie_json(x: &LieElement, center_only: bool) -> serde_json::Value {
    if center_only {
        serde_json::json!({ "t": x.t })
    } else {
        let w: Vec<[f64; 2]> = x.w_prime.iter().map(|c| [c.re, c.im]).collect();
        serde_json::json!({ "w_prime": w, "t": x.t })
    }
}

fn cmd_moment(args: MomentArgs) -> Result<ExitCode> {
    let z = parse_point(&args.point)?;
    let kind = subgroup_kind(&args.subgroup.0).map_err(anyhow::Error::msg)?;
    let center_only = kind == SubgroupKind::Center;
    let spec = SubgroupSpec::new(z.n(), kind);
    let mu = match moment_map_closed_form(&spec, &z) {
        Err(Error::Unsupported(_)) => moment_map_subgroup(&spec, &z)?,
        other => other?,
    };
    println!("{}", lie_json(&mu, center_only));
    Ok(ExitCode::SUCCESS)
}

fn cmd_coords(args: CoordsArgs) -> Result<ExitCode> {
    let z = parse_point(&args.point)?;
    let p = tau(&z);
    let back = kappa(&p)?;
    let pair = |c: &C64| [c.re, c.im];
    let out = serde_json::json!({
        "tau": {
            "w_prime": p.w_prime.iter().map(pair).collect::<Vec<_>>(),
            "t": p.t,
            "r": p.r,
        },
        "kappa_tau": back.coords().iter().map(pair).collect::<Vec<_>>(),
        "residual": back.max_abs_diff(&z),
    });
    println!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gamma(a) => cmd_gamma(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Moment(a) => cmd_moment(a),
        Command::Coords(a) => cmd_coords(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
