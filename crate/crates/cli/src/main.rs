use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use thresholds::battery;
use thresholds::bounds::{
    evaluate, BoundArgument, BoundReport, BoundVariant, InequalityCheck, InstanceQuantities,
    LogBase, VerifyOptions,
};
use thresholds::expectation::CoverSearch;
use thresholds::format::format_sig;
use thresholds::measure::{self, McParams, Method, DEFAULT_TOLERANCE};
use thresholds::sequence::{self, Family};
use thresholds::structure::{sigma_k, DimConvention};
use thresholds::upset::InstanceFile;
use thresholds::{Error, UpperSet};

/// Threshold quantities and bound checks for explicit upper sets.
#[derive(Parser, Debug)]
#[command(name = "thresholds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the bound report of one instance as JSON.
    Compute {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a family over a range of sizes; CSV rows on stdout, summary on stderr.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
    },
    /// Run every check and exit nonzero on any violation.
    Verify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
        /// Replace the computed q before evaluating (harness self-test).
        #[arg(long, hide = true)]
        inject_q: Option<f64>,
    },
    /// Print family instances in the instance file format, one per line.
    Family {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Args, Debug)]
struct Source {
    /// Instance file in the JSON instance format.
    #[arg(long, conflicts_with_all = ["family", "battery"])]
    instance: Option<PathBuf>,
    /// Family name: connectivity, principal, singletons, triangle, star, hamiltonian, path.
    #[arg(long, requires = "range")]
    family: Option<String>,
    /// Inclusive size range `A..B`.
    #[arg(long)]
    range: Option<String>,
    /// The builtin regression battery.
    #[arg(long, value_enum)]
    battery: Option<BatteryName>,
}

#[derive(Args, Debug)]
struct Common {
    /// Bound constant.
    #[arg(long = "K")]
    k: Option<f64>,
    #[arg(long, value_enum)]
    log_base: Option<LogBaseArg>,
    /// What the logarithm is taken of.
    #[arg(long = "arg", value_enum)]
    argument: Option<ArgumentArg>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Monte Carlo sample count (required with `--method mc`).
    #[arg(long)]
    samples: Option<u64>,
    /// Monte Carlo seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest t for the σ_{|F₀|-t} emptiness columns.
    #[arg(long, default_value_t = 2)]
    t_max: usize,
    #[arg(long, value_enum, default_value_t = DimConventionArg::Unrestricted)]
    dim_convention: DimConventionArg,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BatteryName {
    Builtin,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LogBaseArg {
    #[value(name = "2")]
    Two,
    E,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ArgumentArg {
    Ell,
    #[value(name = "2ell0")]
    TwoEll0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Enum,
    Ie,
    Mc,
    Auto,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DimConventionArg {
    Unrestricted,
    WithinFamily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// A failure mapped onto the exit-code contract.
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

const EXIT_VIOLATION: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_CAP: u8 = 3;

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Compute { source, common } => compute(&source, &common),
        Command::Sweep { source, common } => sweep(&source, &common),
        Command::Verify {
            source,
            common,
            inject_q,
        } => verify(&source, &common, inject_q),
        Command::Family { source } => family(&source),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_cap() { EXIT_CAP } else { EXIT_INVALID })
        }
    }
}

impl Common {
    fn variant(&self) -> BoundVariant {
        let log_base = match self.log_base {
            None | Some(LogBaseArg::Two) => LogBase::Two,
            Some(LogBaseArg::E) => LogBase::E,
        };
        let argument = match self.argument {
            None | Some(ArgumentArg::TwoEll0) => BoundArgument::TwoEll0,
            Some(ArgumentArg::Ell) => BoundArgument::Ell,
        };
        let k = self.k.unwrap_or(8.0);
        [BoundVariant::bell(), BoundVariant::park_vondrak()]
            .into_iter()
            .find(|v| v.k == k && v.log_base == log_base && v.argument == argument)
            .unwrap_or_else(|| {
                if log_base == LogBase::Two && argument == BoundArgument::Ell {
                    BoundVariant::kk_log_ell(k)
                } else {
                    BoundVariant::custom(k, log_base, argument)
                }
            })
    }

    fn options(&self) -> Result<VerifyOptions, Failure> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidTolerance(self.tol).into());
        }
        if self.k.is_some_and(|k| !(k.is_finite() && k > 0.0)) {
            return Err(Failure::Usage("--K must be a positive number".into()));
        }
        let method = match self.method {
            MethodArg::Enum => Some(Method::Enumeration),
            MethodArg::Ie => Some(Method::InclusionExclusion),
            MethodArg::Auto => None,
            MethodArg::Mc => {
                self.mc_params()?;
                None
            }
        };
        Ok(VerifyOptions {
            tolerance: self.tol,
            method,
            dim_convention: match self.dim_convention {
                DimConventionArg::Unrestricted => DimConvention::Unrestricted,
                DimConventionArg::WithinFamily => DimConvention::WithinFamily,
            },
            ..VerifyOptions::default()
        })
    }

    /// Monte Carlo parameters when `--method mc` was requested.
    fn mc_params(&self) -> Result<Option<McParams>, Failure> {
        if self.method != MethodArg::Mc {
            return Ok(None);
        }
        match self.samples {
            Some(samples) if samples > 0 => Ok(Some(McParams {
                samples,
                seed: self.seed,
            })),
            _ => Err(Error::MissingMcParams.into()),
        }
    }
}

fn load_instance(path: &PathBuf) -> Result<UpperSet, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(UpperSet::from_json(&text)?)
}

fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<usize>, Failure> {
    let bad = || Failure::Usage(format!("range must look like A..B, got {text:?}"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim().parse().map_err(|_| bad())?;
    Ok(a..=b)
}

fn family_range(
    source: &Source,
) -> Result<Option<(Family, std::ops::RangeInclusive<usize>)>, Failure> {
    match (&source.family, &source.range) {
        (Some(name), Some(range)) => Ok(Some((Family::parse(name)?, parse_range(range)?))),
        (None, Some(_)) => Err(Failure::Usage("--range needs --family".into())),
        _ => Ok(None),
    }
}

/// Named instances selected by `--instance`, `--family/--range` or `--battery`.
fn instances(source: &Source) -> Result<Vec<(String, UpperSet)>, Failure> {
    if let Some(path) = &source.instance {
        return Ok(vec![(path.display().to_string(), load_instance(path)?)]);
    }
    if source.battery.is_some() {
        return Ok(battery::builtin()
            .into_iter()
            .map(|b| (b.name, b.upset))
            .collect());
    }
    if let Some((family, range)) = family_range(source)? {
        return range
            .map(|n| Ok((format!("{}({n})", family.name()), family.instance(n)?)))
            .collect();
    }
    Err(Failure::Usage(
        "select an instance with --instance, --family/--range or --battery".into(),
    ))
}

fn report_for(
    f: &UpperSet,
    common: &Common,
    inject_q: Option<f64>,
) -> Result<BoundReport, Failure> {
    let options = common.options()?;
    let mc = common.mc_params()?;
    let mut x = InstanceQuantities::compute(f, &options)?;
    if let Some(q) = inject_q {
        x.q = q;
    }
    let mut report = evaluate(&x, &common.variant(), options.dim_convention);
    if let Some(mc) = mc {
        report.mc_check = Some(measure::mu(
            f,
            x.p_c.clamp(0.0, 1.0),
            Method::MonteCarlo,
            Some(mc),
        )?);
    }
    Ok(report)
}

fn compute(source: &Source, common: &Common) -> Outcome {
    if common.format == Some(Format::Csv) {
        return Err(Failure::Usage("compute emits JSON only".into()));
    }
    let path = source
        .instance
        .as_ref()
        .ok_or_else(|| Failure::Usage("compute needs --instance".into()))?;
    let f = load_instance(path)?;
    println!("{}", report_for(&f, common, None)?.to_json());
    Ok(0)
}

fn sweep(source: &Source, common: &Common) -> Outcome {
    let (family, range) = family_range(source)?
        .ok_or_else(|| Failure::Usage("sweep needs --family and --range".into()))?;
    let options = common.options()?;
    let records = sequence::sweep(family, range, &common.variant(), common.t_max, &options);
    match common.format.unwrap_or(Format::Csv) {
        Format::Csv => print!("{}", sequence::to_csv(&records, common.t_max)),
        Format::Json => println!(
            "{}",
            serde_json::to_string(&records).expect("records serialize")
        ),
    }
    let summary = sequence::summarize(family, &records);
    eprintln!(
        "{}",
        serde_json::to_string(&summary).expect("summary serializes")
    );
    Ok(0)
}

/// One row of the verify table.
#[derive(Serialize)]
struct CheckRow {
    instance: String,
    check: String,
    status: &'static str,
    #[serde(serialize_with = "thresholds::format::sig12_opt")]
    slack: Option<f64>,
}

impl CheckRow {
    fn new(
        instance: &str,
        check: impl Into<String>,
        holds: Option<bool>,
        slack: Option<f64>,
    ) -> Self {
        Self {
            instance: instance.to_string(),
            check: check.into(),
            status: match holds {
                Some(true) => "ok",
                Some(false) => "VIOLATED",
                None => "skipped",
            },
            slack,
        }
    }

    fn from_check(instance: &str, c: &InequalityCheck) -> Self {
        Self::new(instance, c.name, c.holds, c.slack)
    }
}

/// Invariants beyond the report: μ method agreement, witness validity and
/// σ monotonicity.
fn invariant_rows(
    name: &str,
    f: &UpperSet,
    options: &VerifyOptions,
) -> Result<Vec<CheckRow>, Failure> {
    let mut rows = Vec::new();

    let n = f.ground_size();
    if n <= measure::ENUMERATION_CAP && f.min_count() <= measure::INCLUSION_EXCLUSION_CAP {
        let rank = measure::ExactProfile::new(f, Method::Enumeration)?;
        let union = measure::ExactProfile::new(f, Method::InclusionExclusion)?;
        let gap = [0.1, 0.3, 0.5, 0.7, 0.9]
            .iter()
            .map(|&p| (rank.mu(p) - union.mu(p)).abs())
            .fold(0.0, f64::max);
        rows.push(CheckRow::new(
            name,
            "mu_method_agreement",
            Some(gap <= 1e-12),
            Some(1e-12 - gap),
        ));
    } else {
        rows.push(CheckRow::new(name, "mu_method_agreement", None, None));
    }

    let q = CoverSearch::new(f, options.cover)?.expectation_threshold(options.tolerance)?;
    let at = (q.q - q.tolerance).max(0.0);
    let cost = q.witness_cover.cost(at);
    let valid = q.witness_cover.covers(f) && cost <= 0.5;
    rows.push(CheckRow::new(
        name,
        "witness_validity",
        Some(valid),
        Some(0.5 - cost),
    ));

    let m = f.min_count();
    let mut monotone = true;
    let mut previous = sigma_k(f.minimals(), 1)?.value;
    for k in 2..=m {
        let next = sigma_k(f.minimals(), k)?.value;
        monotone &= next.is_subset(&previous);
        previous = next;
    }
    rows.push(CheckRow::new(name, "sigma_monotone", Some(monotone), None));
    Ok(rows)
}

fn verify(source: &Source, common: &Common, inject_q: Option<f64>) -> Outcome {
    let options = common.options()?;
    let list = instances(source)?;
    let mut rows = Vec::new();
    let mut cap_hit = None;
    for (name, f) in &list {
        let report = match report_for(f, common, inject_q) {
            Ok(r) => r,
            Err(Failure::Lib(e)) if e.is_cap() => {
                eprintln!("{name}: {e}");
                cap_hit = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        rows.extend(
            report
                .inequality_checks
                .iter()
                .map(|c| CheckRow::from_check(name, c)),
        );
        if let Some(mc) = &report.mc_check {
            let deviation = (mc.value - 0.5).abs();
            let allowance = 4.0 * mc.std_error;
            rows.push(CheckRow::new(
                name,
                "mc_at_p_c",
                Some(deviation <= allowance),
                Some(allowance - deviation),
            ));
        }
        if inject_q.is_none() {
            rows.extend(invariant_rows(name, f, &options)?);
        }
    }

    match common.format.unwrap_or(Format::Csv) {
        Format::Json => {
            for row in &rows {
                println!("{}", serde_json::to_string(row).expect("row serializes"));
            }
        }
        Format::Csv => print!("{}", table(&rows)),
    }

    let violations: Vec<&CheckRow> = rows.iter().filter(|r| r.status == "VIOLATED").collect();
    for v in &violations {
        eprintln!(
            "violated: {} {} slack {}",
            v.instance,
            v.check,
            v.slack.map_or("-".into(), format_sig)
        );
    }
    if !violations.is_empty() {
        return Ok(EXIT_VIOLATION);
    }
    if let Some(e) = cap_hit {
        return Err(e.into());
    }
    eprintln!(
        "{} instances, {} checks, no violations",
        list.len(),
        rows.len()
    );
    Ok(0)
}

fn table(rows: &[CheckRow]) -> String {
    let mut out = String::from("instance,check,status,slack\n");
    for r in rows {
        let slack = r.slack.map_or(String::new(), format_sig);
        let _ = writeln!(
            out,
            "{},{},{},{}",
            csv_field(&r.instance),
            r.check,
            r.status,
            slack
        );
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn family(source: &Source) -> Outcome {
    let (family, range) = family_range(source)?
        .ok_or_else(|| Failure::Usage("family needs --family and --range".into()))?;
    for n in range {
        let f = family.instance(n)?;
        println!(
            "{}",
            serde_json::to_string(&InstanceFile::from(&f)).expect("instance serializes")
        );
    }
    Ok(0)
}
