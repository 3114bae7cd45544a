//! Command-line front end for the telescoping-law toolkit: verification
//! suites, pmf/cdf tables, seeded sampling, parameter fitting and the
//! threshold test. Artifacts are CSV or JSON and embed their own replay
//! line, so any committed output can be regenerated from its header.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use telescoping::inference::{
    mle_tgeometric, mle_tpoisson_numeric, mom_tgeometric, mom_tpoisson, np_test_tgeometric,
    Calibration, EstimationResult, Method,
};
use telescoping::law::TelescopingLaw;
use telescoping::sample::{derive_seed, sample, DEFAULT_SEED};
use telescoping::verify::{
    ascent_mean_comparison, chi_square_gof, empirical_mean_growth, table1_experiment_with_cap,
    verify_avoiding_first_ascent_with_cap, verify_catalan_convolution,
    verify_first_ascent_law_with_cap, verify_unicyclic_law_with_cap, CheckLine, Table1Report,
    VerificationReport, AVOIDING_CAP, EXHAUSTIVE_CAP, GOF_LEVEL, TABLE_CAP,
};

/// Largest pmf table emitted without an explicit --n truncation; the zeta2
/// table would otherwise run to x = 10⁹.
const PMF_ROW_GUARD: u64 = 10_000_000;

const MLE_TOL: f64 = 1e-9;

type CliError = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(
    name = "telescope",
    version,
    about = "Telescoping-law toolkit: verification, tables, sampling and inference",
    after_help = "Artifacts go to --out if given, else to $TELESCOPE_OUT_DIR under an \
                  auto-generated name, else to stdout. Every artifact embeds its replay line."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification checks and serialize their reports
    Verify(VerifyArgs),
    /// Tabulate pmf and cdf values up to the 1-1e-9 quantile
    Pmf(PmfArgs),
    /// Draw a reproducible sample from a law
    Sample(SampleArgs),
    /// Fit the family parameter to a sample file
    Estimate(EstimateArgs),
    /// Most-powerful threshold test for the tgeometric mean
    Nptest(NptestArgs),
    /// Row census of the nested-reduction events (same as verify --check table1)
    Table1(Table1Args),
    /// Empirical means of the two ascent limit laws against their targets
    AscentCompare(AscentCompareArgs),
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Family {
    Zeta2,
    Tpoisson,
    Tgeometric,
}

impl Family {
    fn label(self) -> &'static str {
        match self {
            Family::Zeta2 => "zeta2",
            Family::Tpoisson => "tpoisson",
            Family::Tgeometric => "tgeometric",
        }
    }
}

#[derive(Args, Clone)]
struct LawArgs {
    /// Distribution family
    #[arg(long, value_enum)]
    law: Family,
    /// Family parameter; required for tpoisson and tgeometric, absent for zeta2
    #[arg(long)]
    theta: Option<f64>,
}

impl LawArgs {
    fn build(&self) -> Result<TelescopingLaw, CliError> {
        match (self.law, self.theta) {
            (Family::Zeta2, None) => Ok(TelescopingLaw::zeta2()),
            (Family::Zeta2, Some(_)) => Err("zeta2 has no free parameter; drop --theta".into()),
            (Family::Tpoisson, Some(t)) => Ok(TelescopingLaw::tpoisson(t)?),
            (Family::Tgeometric, Some(t)) => Ok(TelescopingLaw::tgeometric(t)?),
            (_, None) => Err(format!("--law {} requires --theta", self.law.label()).into()),
        }
    }

    fn replay(&self) -> String {
        match self.theta {
            Some(t) => format!("--law {} --theta {t}", self.law.label()),
            None => format!("--law {}", self.law.label()),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Artifact format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Artifact path; defaults to $TELESCOPE_OUT_DIR/<auto-name>, then stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn ext(&self) -> &'static str {
        match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    /// Emits the artifact and reports where it went.
    fn emit(&self, auto_stem: &str, content: &str) -> Result<Option<PathBuf>, CliError> {
        let path = self.out.clone().or_else(|| {
            std::env::var_os("TELESCOPE_OUT_DIR")
                .map(|dir| PathBuf::from(dir).join(format!("{auto_stem}.{}", self.ext())))
        });
        match path {
            Some(p) => {
                fs::write(&p, content).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
                Ok(Some(p))
            }
            None => {
                print!("{content}");
                Ok(None)
            }
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum CheckName {
    Unicyclic,
    #[value(name = "first-ascent")]
    FirstAscent,
    Avoiding,
    Convolution,
    #[value(name = "table1")]
    Table1,
    Growth,
    Moments,
    Gof,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which check to run
    #[arg(long, value_enum, default_value_t = CheckName::All)]
    check: CheckName,
    /// Size parameter for the selected check (group degree, table bound, ...)
    #[arg(long)]
    n: Option<u64>,
    /// Enumeration cap override for the exhaustive checks
    #[arg(long)]
    cap: Option<u64>,
    /// Replicates / sample size for the Monte Carlo checks
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PmfArgs {
    #[command(flatten)]
    law: LawArgs,
    /// Truncate the table at this x instead of the 1-1e-9 quantile
    #[arg(long)]
    n: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    law: LawArgs,
    /// Number of draws
    #[arg(long)]
    size: usize,
    #[arg(long, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum EstimateMethod {
    Mom,
    Mle,
}

#[derive(Args)]
struct EstimateArgs {
    /// Sample file: one value per line (CSV) or {"values": [...]} (JSON)
    input: PathBuf,
    /// Family to fit (zeta2 has no free parameter)
    #[arg(long, value_enum)]
    law: Family,
    #[arg(long, value_enum, default_value_t = EstimateMethod::Mom)]
    method: EstimateMethod,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum CalibrationArg {
    Mc,
    Clt,
}

#[derive(Args)]
struct NptestArgs {
    /// Sample file: one value per line (CSV) or {"values": [...]} (JSON)
    input: PathBuf,
    /// Null parameter (theta0 > 1)
    #[arg(long)]
    theta0: f64,
    /// Alternative parameter (theta1 > theta0)
    #[arg(long)]
    theta1: f64,
    /// Test level
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Threshold calibration: simulated null batches or the CLT plug-in
    #[arg(long, value_enum, default_value_t = CalibrationArg::Mc)]
    calibration: CalibrationArg,
    #[arg(long, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct Table1Args {
    /// Group degree
    #[arg(long, default_value_t = 4)]
    n: u64,
    /// Enumeration cap override
    #[arg(long)]
    cap: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct AscentCompareArgs {
    /// Replicates per law
    #[arg(long, default_value_t = 10_000)]
    size: usize,
    #[arg(long, value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim().replace('_', "");
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("invalid seed '{s}': {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        // Commands ran, but a verification check failed.
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Verify(args) => cmd_verify(args),
        Command::Pmf(args) => cmd_pmf(args).map(|_| true),
        Command::Sample(args) => cmd_sample(args).map(|_| true),
        Command::Estimate(args) => cmd_estimate(args).map(|_| true),
        Command::Nptest(args) => cmd_nptest(args).map(|_| true),
        Command::Table1(args) => cmd_table1(args.n, args.cap, args.output),
        Command::AscentCompare(args) => cmd_ascent_compare(args).map(|_| true),
    }
}

/// Doubles embedded quotes and wraps any field containing a delimiter, per
/// the usual CSV quoting convention.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn f64_csv(x: f64) -> String {
    format!("{x:.16e}")
}

// ---------------------------------------------------------------------------
// pmf

fn cmd_pmf(args: PmfArgs) -> Result<(), CliError> {
    let law = args.law.build()?;
    let horizon = law.quantile(1.0 - 1e-9)?;
    let end = args.n.map_or(horizon, |n| n.min(horizon));
    let rows = end - law.start() + 1;
    if rows > PMF_ROW_GUARD {
        return Err(format!(
            "pmf table for {law} runs to x = {end} ({rows} rows); pass --n to truncate"
        )
        .into());
    }

    let mut replay = format!("telescope pmf {}", args.law.replay());
    if let Some(n) = args.n {
        write!(replay, " --n {n}").unwrap();
    }

    let content = match args.output.format {
        Format::Csv => {
            let mut s = format!("# replay: {replay} --format csv\nx,pmf,cdf\n");
            for x in law.start()..=end {
                writeln!(s, "{x},{},{}", f64_csv(law.pmf(x)?), f64_csv(law.cdf(x)?)).unwrap();
            }
            s
        }
        Format::Json => {
            let mut table = Vec::new();
            for x in law.start()..=end {
                table.push(json!({"x": x, "pmf": law.pmf(x)?, "cdf": law.cdf(x)?}));
            }
            let doc = json!({
                "config": {
                    "command": "pmf",
                    "law": args.law.law.label(),
                    "theta": args.law.theta,
                    "n": args.n,
                    "replay": format!("{replay} --format json"),
                },
                "rows": table,
            });
            format!("{:#}\n", doc)
        }
    };
    if let Some(p) = args.output.emit(&format!("pmf-{}", slug(&law)), &content)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn slug(law: &TelescopingLaw) -> String {
    law.to_string()
        .replace('(', "-")
        .replace(')', "")
        .replace('.', "_")
}

// ---------------------------------------------------------------------------
// sample

fn cmd_sample(args: SampleArgs) -> Result<(), CliError> {
    if args.size == 0 {
        return Err("--size must be at least 1".into());
    }
    let law = args.law.build()?;
    let batch = sample(law, args.seed, args.size)?;
    let replay = format!(
        "telescope sample {} --size {} --seed {:#x}",
        args.law.replay(),
        args.size,
        args.seed
    );

    let content = match args.output.format {
        Format::Csv => {
            let mut s = format!("# replay: {replay} --format csv\nvalue\n");
            for v in batch.values() {
                writeln!(s, "{v}").unwrap();
            }
            s
        }
        Format::Json => {
            let doc = json!({
                "config": {
                    "command": "sample",
                    "law": args.law.law.label(),
                    "theta": args.law.theta,
                    "size": args.size,
                    "seed": format!("{:#x}", args.seed),
                    "replay": format!("{replay} --format json"),
                },
                "values": batch.values(),
            });
            format!("{:#}\n", doc)
        }
    };
    let stem = format!("sample-{}-n{}-seed{:x}", slug(&law), args.size, args.seed);
    if let Some(p) = args.output.emit(&stem, &content)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// estimate

fn read_sample_file(path: &PathBuf) -> Result<Vec<u64>, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut values = Vec::new();
    if text.trim_start().starts_with('{') {
        let doc: Value = serde_json::from_str(&text)
            .map_err(|e| format!("{} is not valid JSON: {e}", path.display()))?;
        let arr = doc
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| format!("{} lacks a \"values\" array", path.display()))?;
        for v in arr {
            values.push(
                v.as_u64()
                    .ok_or_else(|| format!("non-integer sample value {v}"))?,
            );
        }
    } else {
        for line in text.lines() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t == "value" {
                continue;
            }
            values.push(
                t.parse::<u64>()
                    .map_err(|e| format!("bad sample line '{t}': {e}"))?,
            );
        }
    }
    if values.is_empty() {
        return Err(format!("{} contains no sample values", path.display()).into());
    }
    Ok(values)
}

fn method_label(method: Method) -> &'static str {
    match method {
        Method::Mom => "mom",
        Method::MleClosed => "mle-closed",
        Method::MleNumeric => "mle-numeric",
    }
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let values = read_sample_file(&args.input)?;
    let result: EstimationResult = match (args.law, args.method) {
        (Family::Zeta2, _) => return Err("zeta2 has no free parameter to estimate".into()),
        (Family::Tpoisson, EstimateMethod::Mom) => mom_tpoisson(&values)?,
        (Family::Tpoisson, EstimateMethod::Mle) => mle_tpoisson_numeric(&values, MLE_TOL)?,
        (Family::Tgeometric, EstimateMethod::Mom) => mom_tgeometric(&values)?,
        (Family::Tgeometric, EstimateMethod::Mle) => mle_tgeometric(&values)?,
    };
    let replay = format!(
        "telescope estimate {} --law {} --method {}",
        args.input.display(),
        args.law.label(),
        match args.method {
            EstimateMethod::Mom => "mom",
            EstimateMethod::Mle => "mle",
        }
    );

    let content = match args.output.format {
        Format::Csv => format!(
            "# replay: {replay} --format csv\nlaw,method,size,sample_mean,theta_hat,clamped\n{},{},{},{},{},{}\n",
            args.law.label(),
            method_label(result.method),
            values.len(),
            f64_csv(result.sample_mean),
            f64_csv(result.theta_hat),
            result.clamped
        ),
        Format::Json => {
            let doc = json!({
                "config": {
                    "command": "estimate",
                    "input": args.input.display().to_string(),
                    "law": args.law.label(),
                    "replay": format!("{replay} --format json"),
                },
                "method": method_label(result.method),
                "size": values.len(),
                "sample_mean": result.sample_mean,
                "theta_hat": result.theta_hat,
                "clamped": result.clamped,
            });
            format!("{:#}\n", doc)
        }
    };
    let stem = format!("estimate-{}", args.law.label());
    if let Some(p) = args.output.emit(&stem, &content)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// nptest

fn cmd_nptest(args: NptestArgs) -> Result<(), CliError> {
    let values = read_sample_file(&args.input)?;
    let calibration = match args.calibration {
        CalibrationArg::Mc => Calibration::MonteCarlo,
        CalibrationArg::Clt => Calibration::Clt,
    };
    let result = np_test_tgeometric(
        &values,
        args.theta0,
        args.theta1,
        args.alpha,
        calibration,
        args.seed,
    )?;
    let calibration_label = match args.calibration {
        CalibrationArg::Mc => "mc",
        CalibrationArg::Clt => "clt",
    };
    let replay = format!(
        "telescope nptest {} --theta0 {} --theta1 {} --alpha {} --calibration {} --seed {:#x}",
        args.input.display(),
        args.theta0,
        args.theta1,
        args.alpha,
        calibration_label,
        args.seed
    );

    let content = match args.output.format {
        Format::Csv => format!(
            "# replay: {replay} --format csv\ntheta0,theta1,alpha,n,calibration,seed,statistic,critical_value,reject\n{},{},{},{},{},{:#x},{},{},{}\n",
            args.theta0,
            args.theta1,
            args.alpha,
            values.len(),
            calibration_label,
            args.seed,
            f64_csv(result.statistic),
            f64_csv(result.critical_value),
            result.reject
        ),
        Format::Json => {
            let doc = json!({
                "config": {
                    "command": "nptest",
                    "input": args.input.display().to_string(),
                    "theta0": args.theta0,
                    "theta1": args.theta1,
                    "alpha": args.alpha,
                    "calibration": calibration_label,
                    "seed": format!("{:#x}", args.seed),
                    "replay": format!("{replay} --format json"),
                },
                "n": values.len(),
                "statistic": result.statistic,
                "critical_value": result.critical_value,
                "reject": result.reject,
            });
            format!("{:#}\n", doc)
        }
    };
    if let Some(p) = args.output.emit("nptest", &content)? {
        println!("wrote {}", p.display());
        println!(
            "{} H0: theta = {} against theta = {} at level {} (mean {:.6}, critical value {:.6})",
            if result.reject { "reject" } else { "retain" },
            args.theta0,
            args.theta1,
            args.alpha,
            result.statistic,
            result.critical_value
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// ascent-compare

fn cmd_ascent_compare(args: AscentCompareArgs) -> Result<(), CliError> {
    if args.size == 0 {
        return Err("--size must be at least 1".into());
    }
    let replay = format!(
        "telescope ascent-compare --size {} --seed {:#x}",
        args.size, args.seed
    );
    let mut rows = Vec::new();
    for (stream, law) in [
        (0u64, TelescopingLaw::tpoisson(1.0)?),
        (1u64, TelescopingLaw::tgeometric(2.0)?),
    ] {
        let batch = sample(law, derive_seed(args.seed, stream), args.size)?;
        let target = law.mean().finite().expect("finite mean");
        rows.push((law, batch.mean(), target));
    }

    let content = match args.output.format {
        Format::Csv => {
            let mut s = format!(
                "# replay: {replay} --format csv\nlaw,reps,empirical_mean,target_mean,abs_error\n"
            );
            for (law, mean, target) in &rows {
                writeln!(
                    s,
                    "{},{},{},{},{}",
                    csv_field(&law.to_string()),
                    args.size,
                    f64_csv(*mean),
                    f64_csv(*target),
                    f64_csv((mean - target).abs())
                )
                .unwrap();
            }
            s
        }
        Format::Json => {
            let table: Vec<Value> = rows
                .iter()
                .map(|(law, mean, target)| {
                    json!({
                        "law": law.to_string(),
                        "reps": args.size,
                        "empirical_mean": mean,
                        "target_mean": target,
                        "abs_error": (mean - target).abs(),
                    })
                })
                .collect();
            let doc = json!({
                "config": {
                    "command": "ascent-compare",
                    "size": args.size,
                    "seed": format!("{:#x}", args.seed),
                    "replay": format!("{replay} --format json"),
                },
                "rows": table,
            });
            format!("{:#}\n", doc)
        }
    };
    let stem = format!("ascent-compare-reps{}", args.size);
    if let Some(p) = args.output.emit(&stem, &content)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify / table1

fn cmd_verify(args: VerifyArgs) -> Result<bool, CliError> {
    // The census check keeps whole permutation rows, so it reports through
    // its own serializer rather than the generic line format.
    if args.check == CheckName::Table1 {
        return cmd_table1(args.n.unwrap_or(4), args.cap, args.output);
    }

    let reports = collect_reports(&args)?;
    let all_pass = reports.iter().all(|r| r.pass);

    let replay = verify_replay(&args);
    let content = match args.output.format {
        Format::Csv => {
            let mut s = format!("# replay: {replay} --format csv\n");
            s.push_str("check,parameter,label,expected,observed,pass\n");
            for r in &reports {
                for line in &r.lines {
                    writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        csv_field(&r.check),
                        csv_field(&r.parameter),
                        csv_field(&line.label),
                        csv_field(&line.expected),
                        csv_field(&line.observed),
                        line.pass
                    )
                    .unwrap();
                }
            }
            s
        }
        Format::Json => {
            let table: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "check": r.check,
                        "parameter": r.parameter,
                        "pass": r.pass,
                        "lines": r.lines.iter().map(|l| json!({
                            "label": l.label,
                            "expected": l.expected,
                            "observed": l.observed,
                            "pass": l.pass,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let doc = json!({
                "config": {
                    "command": "verify",
                    "check": check_label(args.check),
                    "seed": format!("{:#x}", args.seed),
                    "replay": format!("{replay} --format json"),
                },
                "pass": all_pass,
                "reports": table,
            });
            format!("{:#}\n", doc)
        }
    };
    let wrote = args
        .output
        .emit(&format!("verify-{}", check_label(args.check)), &content)?;
    if let Some(p) = wrote {
        println!("wrote {}", p.display());
        // The artifact went to a file, so give the terminal the summary.
        for r in &reports {
            print_summary(r);
        }
    }
    Ok(all_pass)
}

fn check_label(check: CheckName) -> &'static str {
    match check {
        CheckName::Unicyclic => "unicyclic",
        CheckName::FirstAscent => "first-ascent",
        CheckName::Avoiding => "avoiding",
        CheckName::Convolution => "convolution",
        CheckName::Table1 => "table1",
        CheckName::Growth => "growth",
        CheckName::Moments => "moments",
        CheckName::Gof => "gof",
        CheckName::All => "all",
    }
}

fn verify_replay(args: &VerifyArgs) -> String {
    let mut replay = format!("telescope verify --check {}", check_label(args.check));
    if let Some(n) = args.n {
        write!(replay, " --n {n}").unwrap();
    }
    if let Some(cap) = args.cap {
        write!(replay, " --cap {cap}").unwrap();
    }
    if let Some(size) = args.size {
        write!(replay, " --size {size}").unwrap();
    }
    write!(replay, " --seed {:#x}", args.seed).unwrap();
    replay
}

fn print_summary(report: &VerificationReport) {
    println!(
        "[{}] {} ({}) in {:.3}s",
        if report.pass { "pass" } else { "FAIL" },
        report.check,
        report.parameter,
        report.runtime.as_secs_f64()
    );
    for line in report.lines.iter().filter(|l| !l.pass) {
        println!(
            "  [FAIL] {}: expected {}, observed {}",
            line.label, line.expected, line.observed
        );
    }
}

fn collect_reports(args: &VerifyArgs) -> Result<Vec<VerificationReport>, CliError> {
    let mut reports = Vec::new();
    let n = args.n.map(|v| v as usize);
    match args.check {
        CheckName::Unicyclic => reports.push(verify_unicyclic_law_with_cap(
            n.unwrap_or(4),
            args.cap.unwrap_or(EXHAUSTIVE_CAP),
        )?),
        CheckName::FirstAscent => reports.push(verify_first_ascent_law_with_cap(
            n.unwrap_or(4),
            args.cap.unwrap_or(EXHAUSTIVE_CAP),
        )?),
        CheckName::Avoiding => reports.push(verify_avoiding_first_ascent_with_cap(
            n.unwrap_or(4),
            args.cap.unwrap_or(AVOIDING_CAP),
        )?),
        CheckName::Convolution => reports.push(verify_catalan_convolution(args.n.unwrap_or(10))?),
        CheckName::Growth => {
            let grid = match n {
                Some(top) => vec![top],
                None => vec![20, 200, 2000],
            };
            reports.push(empirical_mean_growth(
                &grid,
                args.size.unwrap_or(20_000),
                args.seed,
            )?);
        }
        CheckName::Moments => reports.push(ascent_mean_comparison(
            args.size.unwrap_or(20_000),
            args.seed,
        )?),
        CheckName::Gof => reports.extend(gof_reports(args.size.unwrap_or(100_000), args.seed)?),
        CheckName::All => {
            for k in [4, 6] {
                reports.push(verify_unicyclic_law_with_cap(k, EXHAUSTIVE_CAP)?);
                reports.push(verify_first_ascent_law_with_cap(k, EXHAUSTIVE_CAP)?);
            }
            reports.push(verify_avoiding_first_ascent_with_cap(7, AVOIDING_CAP)?);
            reports.push(verify_catalan_convolution(10)?);
            reports.push(table1_summary(table1_experiment_with_cap(4, TABLE_CAP)?));
            reports.push(empirical_mean_growth(&[20, 200, 2000], 20_000, args.seed)?);
            reports.push(ascent_mean_comparison(20_000, args.seed)?);
            reports.extend(gof_reports(100_000, args.seed)?);
        }
        CheckName::Table1 => unreachable!("handled by cmd_table1"),
    }
    Ok(reports)
}

fn gof_reports(size: usize, seed: u64) -> Result<Vec<VerificationReport>, CliError> {
    let laws = [
        TelescopingLaw::zeta2(),
        TelescopingLaw::tpoisson(1.0)?,
        TelescopingLaw::tgeometric(2.0)?,
    ];
    let mut reports = Vec::new();
    for (k, law) in laws.into_iter().enumerate() {
        let batch = sample(law, derive_seed(seed, 90 + k as u64), size)?;
        let gof = chi_square_gof(law, batch.values(), GOF_LEVEL)?;
        reports.push(VerificationReport {
            check: "sampler goodness of fit".into(),
            parameter: format!("{law}, size {size}, {} bins", gof.bins),
            tolerance: Some(GOF_LEVEL),
            lines: vec![CheckLine {
                label: format!(
                    "chi-square p-value ({:.2} on {} df)",
                    gof.statistic, gof.degrees_of_freedom
                ),
                expected: format!(">= {GOF_LEVEL}"),
                observed: format!("{:.6}", gof.p_value),
                pass: gof.pass,
            }],
            pass: gof.pass,
            runtime: gof.runtime,
        });
    }
    Ok(reports)
}

/// Condenses the census into the generic report shape for suite runs.
fn table1_summary(report: Table1Report) -> VerificationReport {
    let expected_counts: Vec<String> = report.rho.iter().map(|r| r.to_string()).collect();
    VerificationReport {
        check: "reduction row census".into(),
        parameter: format!("n = {}", report.n),
        tolerance: None,
        lines: vec![
            CheckLine {
                label: format!(
                    "row sizes {:?} match n! x rho {:?}",
                    report.row_counts, expected_counts
                ),
                expected: "true".into(),
                observed: report.rows_match_rho.to_string(),
                pass: report.rows_match_rho,
            },
            CheckLine {
                label: "row probabilities sum to 1".into(),
                expected: "true".into(),
                observed: report.rho_sum_is_one.to_string(),
                pass: report.rho_sum_is_one,
            },
        ],
        pass: report.pass,
        runtime: report.runtime,
    }
}

fn cmd_table1(n: u64, cap: Option<u64>, output: OutputArgs) -> Result<bool, CliError> {
    let report = table1_experiment_with_cap(n as usize, cap.unwrap_or(TABLE_CAP))?;
    let mut replay = format!("telescope table1 --n {n}");
    if let Some(c) = cap {
        write!(replay, " --cap {c}").unwrap();
    }

    let content = match output.format {
        Format::Csv => {
            let mut s = format!("# replay: {replay} --format csv\n");
            writeln!(s, "# rows_match_rho={}", report.rows_match_rho).unwrap();
            writeln!(s, "# rho_sum_is_one={}", report.rho_sum_is_one).unwrap();
            s.push_str("section,row,permutation,rows_containing\n");
            for (i, row) in report.rows.iter().enumerate() {
                for p in row {
                    writeln!(
                        s,
                        "row,{},{},{}",
                        i + 1,
                        csv_field(&p.to_string()),
                        report.multiplicity[p]
                    )
                    .unwrap();
                }
            }
            for p in &report.excluded {
                writeln!(s, "excluded,,{},0", csv_field(&p.to_string())).unwrap();
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    json!({
                        "row": i + 1,
                        "rho": report.rho[i].to_string(),
                        "permutations": row.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let multiplicity: serde_json::Map<String, Value> = report
                .multiplicity
                .iter()
                .map(|(p, &c)| (p.to_string(), json!(c)))
                .collect();
            let doc = json!({
                "config": {
                    "command": "table1",
                    "n": report.n,
                    "replay": format!("{replay} --format json"),
                },
                "rows": rows,
                "multiplicity": multiplicity,
                "excluded": report.excluded.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "total_row_entries": report.total_row_entries,
                "rows_match_rho": report.rows_match_rho,
                "rho_sum_is_one": report.rho_sum_is_one,
                "pass": report.pass,
            });
            format!("{:#}\n", doc)
        }
    };
    if let Some(p) = output.emit(&format!("table1-n{n}"), &content)? {
        println!("wrote {}", p.display());
        println!(
            "[{}] reduction row census (n = {}): row sizes {:?}, {} excluded",
            if report.pass { "pass" } else { "FAIL" },
            report.n,
            report.row_counts,
            report.excluded.len()
        );
    }
    Ok(report.pass)
}
