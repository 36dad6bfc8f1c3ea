//! Command-line front end: coverage curves, worst-case coverage, shortest
//! intervals, threshold-proportional intervals, and the Monte Carlo oracle,
//! emitted as CSV or JSON lines with 17 significant digits.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use threshcov::coverage::{coverage, IntervalSpec, Method};
use threshcov::estimators::{EstimatorKind, ProblemSetup};
use threshcov::infimal::{default_epsilon, theta_grid};
use threshcov::mc::{mc_infimal_scan, simulate_coverage, McConfig};
use threshcov::shortest::{shortest_half_length, standard_half_length, DnSpec};
use threshcov::unknownvar::{coverage_unknown, soft_unknown_half_length, QuadSpec};

#[derive(Parser)]
#[command(
    name = "threshcov",
    version,
    about = "Coverage of confidence intervals centered at thresholding estimators in the Gaussian location model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-sample coverage probability over a sweep of the location parameter
    Coverage(CoverageArgs),
    /// Half-length of the shortest interval with a given worst-case coverage
    Shortest(ShortestArgs),
    /// Scaled shortest half-lengths as a function of sqrt(n) eta, one file
    Figure1(Figure1Args),
    /// Seeded Monte Carlo coverage estimates and worst-case scans
    Mc(McArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Hard,
    Soft,
    Adaptive,
}

impl From<EstimatorArg> for EstimatorKind {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Hard => EstimatorKind::Hard,
            EstimatorArg::Soft => EstimatorKind::Soft,
            EstimatorArg::Adaptive => EstimatorKind::AdaptiveLasso,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OpenArg {
    None,
    Lower,
    Upper,
    Both,
}

impl OpenArg {
    fn flags(self) -> (bool, bool) {
        match self {
            OpenArg::None => (true, true),
            OpenArg::Lower => (false, true),
            OpenArg::Upper => (true, false),
            OpenArg::Both => (false, false),
        }
    }

    fn label(self) -> &'static str {
        match self {
            OpenArg::None => "none",
            OpenArg::Lower => "lower",
            OpenArg::Upper => "upper",
            OpenArg::Both => "both",
        }
    }
}

#[derive(Args)]
struct CoverageArgs {
    #[arg(long, value_enum)]
    estimator: EstimatorArg,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    /// Location parameter; repeatable, accepts lo:hi:step ranges
    #[arg(long, allow_hyphen_values = true, required = true)]
    theta: Vec<String>,
    #[arg(long, value_enum, default_value = "none")]
    open: OpenArg,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Feasible (sigma-hat scaled) interval via quadrature; needs a = b and n >= 2
    #[arg(long)]
    unknown_variance: bool,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ShortestArgs {
    #[arg(long, value_enum)]
    estimator: EstimatorArg,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    eta: f64,
    /// Worst-case coverage level; repeatable, accepts lo:hi:step ranges
    #[arg(long, required = true)]
    delta: Vec<String>,
    /// Solve the t-based feasible equation instead (soft thresholding only)
    #[arg(long)]
    unknown_variance: bool,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct Figure1Args {
    /// Comma-separated coverage levels
    #[arg(long, default_value = "0.5,0.8,0.9,0.95")]
    deltas: String,
    #[arg(long, default_value_t = 5.0)]
    xmax: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long)]
    out: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct McArgs {
    #[arg(long, value_enum)]
    estimator: EstimatorArg,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Half-widths a = b = D eta (threshold-proportional interval)
    #[arg(long)]
    dn: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Vec<String>,
    #[arg(long, value_enum, default_value = "none")]
    open: OpenArg,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long)]
    unknown_variance: bool,
    #[arg(long)]
    reps: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    antithetic: bool,
    /// Scan a worst-case theta grid instead of explicit theta values
    #[arg(long)]
    scan: bool,
    /// Uniform points in the scan grid
    #[arg(long, default_value_t = 33)]
    scan_points: usize,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<String>,
}

/// 17 significant digits, locale-independent.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Expand "lo:hi:step" (inclusive within half a step) or parse a single value.
fn expand_range(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.len() {
        1 => {
            let v: f64 = parts[0]
                .parse()
                .map_err(|_| format!("invalid number: {spec}"))?;
            Ok(vec![v])
        }
        3 => {
            let lo: f64 = parts[0]
                .parse()
                .map_err(|_| format!("invalid range start: {spec}"))?;
            let hi: f64 = parts[1]
                .parse()
                .map_err(|_| format!("invalid range end: {spec}"))?;
            let step: f64 = parts[2]
                .parse()
                .map_err(|_| format!("invalid range step: {spec}"))?;
            if !(step > 0.0) {
                return Err(format!("range step must be positive: {spec}"));
            }
            let count = ((hi - lo) / step + 0.5).floor() as i64;
            if count < 0 {
                return Err(format!("empty range: {spec}"));
            }
            Ok((0..=count).map(|i| lo + step * i as f64).collect())
        }
        _ => Err(format!("expected VALUE or LO:HI:STEP, got {spec}")),
    }
}

fn expand_all(specs: &[String]) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for s in specs {
        out.extend(expand_range(s)?);
    }
    Ok(out)
}

enum Sink {
    Stdout(BufWriter<io::Stdout>),
    File(BufWriter<File>),
}

impl Sink {
    fn open(path: &Option<String>) -> Result<Self, String> {
        match path {
            None => Ok(Sink::Stdout(BufWriter::new(io::stdout()))),
            Some(p) => File::create(p)
                .map(|f| Sink::File(BufWriter::new(f)))
                .map_err(|e| format!("cannot write {p}: {e}")),
        }
    }

    fn line(&mut self, s: &str) -> Result<(), String> {
        let r = match self {
            Sink::Stdout(w) => writeln!(w, "{s}"),
            Sink::File(w) => writeln!(w, "{s}"),
        };
        r.map_err(|e| format!("write failed: {e}"))
    }
}

/// A flat output record: (key, rendered value, quote as JSON string?).
struct Record(Vec<(&'static str, String, bool)>);

impl Record {
    fn csv_header(&self) -> String {
        self.0
            .iter()
            .map(|(k, _, _)| *k)
            .collect::<Vec<_>>()
            .join(",")
    }

    fn csv_row(&self) -> String {
        self.0
            .iter()
            .map(|(_, v, _)| v.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn json_row(&self) -> String {
        let mut s = String::from("{");
        for (i, (k, v, quoted)) in self.0.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            if *quoted {
                let _ = write!(s, "\"{k}\":\"{v}\"");
            } else {
                let _ = write!(s, "\"{k}\":{v}");
            }
        }
        s.push('}');
        s
    }
}

fn emit(sink: &mut Sink, json: bool, first: &mut bool, rec: &Record) -> Result<(), String> {
    if json {
        sink.line(&rec.json_row())
    } else {
        if *first {
            sink.line(&rec.csv_header())?;
            *first = false;
        }
        sink.line(&rec.csv_row())
    }
}

fn method_label(m: Method) -> &'static str {
    m.label()
}

fn run_coverage(args: &CoverageArgs) -> Result<(), String> {
    let kind: EstimatorKind = args.estimator.into();
    let setup = ProblemSetup::new(args.n, args.eta, args.sigma).map_err(|e| e.to_string())?;
    let (lc, uc) = args.open.flags();
    let interval = IntervalSpec::new(args.a, args.b, lc, uc).map_err(|e| e.to_string())?;
    let thetas = expand_all(&args.theta)?;
    if args.unknown_variance && args.a != args.b {
        return Err("unknown-variance coverage is defined for symmetric intervals (a = b)".into());
    }
    let quad = if args.unknown_variance {
        Some(QuadSpec::default_for(&setup).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let mut sink = Sink::open(&args.out)?;
    let mut first = true;
    for theta in thetas {
        let report = match &quad {
            Some(q) => {
                coverage_unknown(kind, &setup, args.a, theta, q).map_err(|e| e.to_string())?
            }
            None => coverage(kind, &setup, &interval, theta),
        };
        let rec = Record(vec![
            ("estimator", kind.label().into(), true),
            ("n", args.n.to_string(), false),
            ("eta", fmt17(args.eta), false),
            ("sigma", fmt17(args.sigma), false),
            ("a", fmt17(args.a), false),
            ("b", fmt17(args.b), false),
            ("open", args.open.label().into(), true),
            ("theta", fmt17(theta), false),
            ("value", fmt17(report.value), false),
            ("method", method_label(report.method).into(), true),
            ("err", fmt17(report.err_estimate), false),
        ]);
        emit(&mut sink, args.json, &mut first, &rec)?;
    }
    Ok(())
}

fn run_shortest(args: &ShortestArgs) -> Result<(), String> {
    let kind: EstimatorKind = args.estimator.into();
    let setup = ProblemSetup::standardized(args.n, args.eta).map_err(|e| e.to_string())?;
    if args.unknown_variance && kind != EstimatorKind::Soft {
        return Err("no closed form; use mc-scan".into());
    }
    let deltas = expand_all(&args.delta)?;
    let mut sink = Sink::open(&args.out)?;
    let mut first = true;
    for delta in deltas {
        let r = if args.unknown_variance {
            soft_unknown_half_length(&setup, delta).map_err(|e| e.to_string())?
        } else {
            shortest_half_length(kind, &setup, delta).map_err(|e| e.to_string())?
        };
        let rec = Record(vec![
            ("estimator", kind.label().into(), true),
            ("n", args.n.to_string(), false),
            ("eta", fmt17(args.eta), false),
            (
                "variance",
                if args.unknown_variance {
                    "unknown"
                } else {
                    "known"
                }
                .into(),
                true,
            ),
            ("delta", fmt17(delta), false),
            ("a_star", fmt17(r.a_star), false),
            ("residual", fmt17(r.residual), false),
        ]);
        emit(&mut sink, args.json, &mut first, &rec)?;
    }
    Ok(())
}

fn run_figure1(args: &Figure1Args) -> Result<(), String> {
    if !(args.step > 0.0 && args.xmax >= 0.0) {
        return Err("figure1 needs step > 0 and xmax >= 0".into());
    }
    let deltas: Vec<f64> = args
        .deltas
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid delta: {s}"))
        })
        .collect::<Result<_, _>>()?;
    let count = (args.xmax / args.step + 0.5).floor() as i64;
    let mut sink = Sink::open(&Some(args.out.clone()))?;
    let mut first = true;
    for &delta in &deltas {
        let standard = standard_half_length(1, delta).map_err(|e| e.to_string())?;
        for i in 0..=count {
            let x = args.step * i as f64;
            // solving at n = 1 with eta = x yields sqrt(n) a* for any n with sqrt(n) eta = x
            let (hard, adaptive, soft) = if x == 0.0 {
                (standard, standard, standard)
            } else {
                let setup = ProblemSetup::standardized(1, x).map_err(|e| e.to_string())?;
                (
                    shortest_half_length(EstimatorKind::Hard, &setup, delta)
                        .map_err(|e| e.to_string())?
                        .a_star,
                    shortest_half_length(EstimatorKind::AdaptiveLasso, &setup, delta)
                        .map_err(|e| e.to_string())?
                        .a_star,
                    shortest_half_length(EstimatorKind::Soft, &setup, delta)
                        .map_err(|e| e.to_string())?
                        .a_star,
                )
            };
            let rec = Record(vec![
                ("sqrt_n_eta", fmt17(x), false),
                ("delta", fmt17(delta), false),
                ("half_hard", fmt17(hard), false),
                ("half_adaptive", fmt17(adaptive), false),
                ("half_soft", fmt17(soft), false),
                ("half_standard", fmt17(standard), false),
            ]);
            emit(&mut sink, args.json, &mut first, &rec)?;
        }
    }
    Ok(())
}

fn run_mc(args: &McArgs) -> Result<(), String> {
    let kind: EstimatorKind = args.estimator.into();
    let setup = ProblemSetup::new(args.n, args.eta, args.sigma).map_err(|e| e.to_string())?;
    let (a, b) = match (args.dn, args.a, args.b) {
        (Some(d), None, None) => {
            let spec = DnSpec::symmetric(d).map_err(|e| e.to_string())?;
            (spec.d_lower * args.eta, spec.d_upper * args.eta)
        }
        (None, Some(a), Some(b)) => (a, b),
        _ => return Err("give either --dn D or both --a and --b".into()),
    };
    let (lc, uc) = args.open.flags();
    let interval = IntervalSpec::new(a, b, lc, uc).map_err(|e| e.to_string())?;
    let mut cfg = McConfig::new(args.reps, args.seed).map_err(|e| e.to_string())?;
    if args.antithetic {
        cfg = cfg.antithetic();
    }
    let variance_known = !args.unknown_variance;

    let points: Vec<(f64, threshcov::mc::McResult)> = if args.scan {
        let grid = theta_grid(&setup, &interval, args.scan_points, default_epsilon(&setup));
        let scan = mc_infimal_scan(kind, &setup, &interval, &grid, variance_known, &cfg)
            .map_err(|e| e.to_string())?;
        scan.points
    } else {
        if args.theta.is_empty() {
            return Err("give --theta values or --scan".into());
        }
        expand_all(&args.theta)?
            .into_iter()
            .map(|t| {
                simulate_coverage(kind, &setup, &interval, t, variance_known, &cfg)
                    .map(|r| (t, r))
                    .map_err(|e| e.to_string())
            })
            .collect::<Result<_, _>>()?
    };

    let mut sink = Sink::open(&args.out)?;
    let mut first = true;
    for (theta, r) in points {
        let rec = Record(vec![
            ("estimator", kind.label().into(), true),
            ("n", args.n.to_string(), false),
            ("eta", fmt17(args.eta), false),
            ("sigma", fmt17(args.sigma), false),
            ("a", fmt17(a), false),
            ("b", fmt17(b), false),
            ("open", args.open.label().into(), true),
            (
                "variance",
                if variance_known { "known" } else { "unknown" }.into(),
                true,
            ),
            ("theta", fmt17(theta), false),
            ("reps", r.replications.to_string(), false),
            ("seed", args.seed.to_string(), false),
            ("coverage_hat", fmt17(r.coverage_hat), false),
            ("std_err", fmt17(r.std_err), false),
        ]);
        emit(&mut sink, args.json, &mut first, &rec)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Coverage(a) => run_coverage(a),
        Command::Shortest(a) => run_shortest(a),
        Command::Figure1(a) => run_figure1(a),
        Command::Mc(a) => run_mc(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
