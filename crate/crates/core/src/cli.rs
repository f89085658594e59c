//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a checked bound or identity is violated,
//! 2 on usage, input, or I/O errors.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bounds::{check_bound, BoundName, BoundParams, EventownStrength, Verdict};
use crate::constructions::{ConstructionKind, ConstructionSpec};
use crate::decomposition::{greedy_peeling_with_cap, Exactness, TownMode, DEFAULT_SOLVER_CAP};
use crate::error::Error;
use crate::family::{op_count, parse_family, write_family, SetFamily};
use crate::report::{construction_report, emit_csv, emit_report, graph_report, Format, Report};
use crate::search::{default_budget, search_min, SearchOptions};
use crate::spectral::{concentration_check, ConcentrationMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "oelab", version, about = "Odd pair numbers of set families")]
pub struct Cli {
    /// Worker threads (defaults to all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print search progress counters on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Build a named construction and print it in the family text format.
    Construct(ConstructArgs),
    /// Print the odd pair number of a family.
    Op(OpArgs),
    /// Vertex, edge, and odd-vertex counts of the odd pair graph.
    GraphStats(FamilyOut),
    /// Peel a family into independent layers.
    Peel(PeelArgs),
    /// Check a family against a named bound.
    BoundCheck(BoundArgs),
    /// Exhaustive minimum odd pair number over all families of a given size.
    SearchMin(SearchArgs),
    /// Fourier identities and the concentration inequality.
    SpectralCheck(SpectralArgs),
    /// Run a subcommand over a parameter range and tabulate the reports as CSV.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Report format.
    #[arg(long, default_value = "json")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct FamilyOut {
    /// Family file; `-` reads stdin.
    #[arg(long, short, default_value = "-")]
    family: String,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    A,
    B,
}

#[derive(Args, Debug, Clone)]
struct ConstructArgs {
    /// Construction name (e.g. as_extended, eventown_mixed, eventown_blocks).
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Block variant for eventown_blocks.
    #[arg(long, value_enum)]
    variant: Option<Variant>,
    /// Number of eventown members used by product_family.
    #[arg(long)]
    eventown_size: Option<usize>,
    /// Write the family here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write a construction report to this path.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct OpArgs {
    #[arg(long, short, default_value = "-")]
    family: String,
    /// Also write a graph report to this path.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct PeelArgs {
    #[command(flatten)]
    input: FamilyOut,
    #[arg(long)]
    mode: String,
    /// Use maximum (true) or greedy maximal (false) layers.
    #[arg(long, default_value = "true", action = clap::ArgAction::Set)]
    exact: bool,
    /// Largest family handled by the exact layer solver.
    #[arg(long, default_value_t = DEFAULT_SOLVER_CAP)]
    cap: usize,
}

#[derive(Args, Debug, Clone)]
struct BoundArgs {
    #[command(flatten)]
    input: FamilyOut,
    #[arg(long)]
    bound: String,
    #[arg(long)]
    s: Option<u64>,
    /// Rational such as `1/4` or `0.25`.
    #[arg(long)]
    epsilon: Option<String>,
    /// `full` or `half`.
    #[arg(long)]
    strength: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    size: usize,
    #[arg(long)]
    mode: String,
    /// Node budget (defaults to OELAB_BUDGET or 10^9).
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    canonical: bool,
    /// Write the witness family here and reference it from the report.
    #[arg(long)]
    witness_out: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug, Clone)]
struct SpectralArgs {
    #[command(flatten)]
    input: FamilyOut,
    /// Use the characters of `1^⊥` (odd n, even family).
    #[arg(long)]
    restricted: bool,
    /// Include every coefficient numerator in the report.
    #[arg(long)]
    coefficients: bool,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    /// Subcommand to repeat: construct, search-min, or bound-check.
    #[arg(long)]
    command: String,
    /// Inclusive integer range, e.g. `s=1..6`.
    #[arg(long)]
    range: String,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Remaining flags, passed to every run of the subcommand.
    #[arg(last = true)]
    rest: Vec<String>,
}

/// Failure carrying its exit status.
struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

struct Io<'a> {
    stdin: &'a mut (dyn Read + Send),
    stdout: &'a mut (dyn Write + Send),
    stderr: &'a mut (dyn Write + Send),
    verbose: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(
    args: I,
    stdin: &mut (dyn Read + Send),
    stdout: &mut (dyn Write + Send),
    stderr: &mut (dyn Write + Send),
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io {
        stdin,
        stdout,
        stderr,
        verbose: cli.verbose,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            let _ = writeln!(io.stderr, "error: --threads must be positive");
            return EXIT_USAGE;
        }
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let command = cli.command;
    match pool.install(|| dispatch(&command, &mut io)) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(io.stderr, "error: {msg}");
            code
        }
    }
}

fn dispatch(command: &Command, io: &mut Io) -> CliResult<i32> {
    match command {
        Command::Construct(a) => construct(a, io),
        Command::Op(a) => op(a, io),
        Command::Sweep(a) => sweep(a, io),
        other => {
            let (report, out) = report_for(other, io)?;
            let format: Format = out.format.parse()?;
            write_report(&report, format, out.output.as_ref(), io)?;
            Ok(match report.verdict {
                Some(Verdict::Violated) => EXIT_VIOLATED,
                _ => EXIT_OK,
            })
        }
    }
}

fn write_report(report: &Report, format: Format, path: Option<&PathBuf>, io: &mut Io) -> CliResult<()> {
    let text = emit_report(report, format)?;
    match path {
        Some(p) => fs::write(p, text)?,
        None => io.stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_family(path: &str, io: &mut Io) -> CliResult<SetFamily> {
    let text = if path == "-" {
        let mut s = String::new();
        io.stdin.read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure(EXIT_USAGE, format!("{path}: {e}")))?
    };
    Ok(parse_family(&text)?)
}

fn parse_mode(s: &str) -> CliResult<TownMode> {
    Ok(s.parse()?)
}

fn build_spec(a: &ConstructArgs) -> CliResult<ConstructionSpec> {
    let kind = match (a.kind.as_str(), a.variant) {
        ("eventown_blocks", Some(Variant::A)) => ConstructionKind::EventownBlocksA,
        ("eventown_blocks", Some(Variant::B)) => ConstructionKind::EventownBlocksB,
        ("eventown_blocks", None) => {
            return Err(Failure(EXIT_USAGE, "eventown_blocks needs --variant A or B".into()))
        }
        ("oneill_oddtown", _) => ConstructionKind::OddtownK4Triples,
        (k, _) => k.parse()?,
    };
    let mut spec = ConstructionSpec::new(kind);
    spec.n = a.n;
    spec.s = a.s;
    spec.m = a.m;
    spec.eventown_size = a.eventown_size;
    Ok(spec)
}

fn construct(a: &ConstructArgs, io: &mut Io) -> CliResult<i32> {
    let spec = build_spec(a)?;
    let family = spec.build()?;
    let text = write_family(&family);
    match &a.output {
        Some(p) => fs::write(p, &text)?,
        None => io.stdout.write_all(text.as_bytes())?,
    }
    if let Some(p) = &a.report {
        fs::write(p, emit_report(&construction_report(&spec, &family), Format::Json)?)?;
    }
    Ok(EXIT_OK)
}

fn op(a: &OpArgs, io: &mut Io) -> CliResult<i32> {
    let family = read_family(&a.family, io)?;
    writeln!(io.stdout, "{}", op_count(&family))?;
    if let Some(p) = &a.report {
        fs::write(p, emit_report(&graph_report(&family), Format::Json)?)?;
    }
    Ok(EXIT_OK)
}

fn parse_rational(s: &str) -> CliResult<BigRational> {
    let bad = || Failure(EXIT_USAGE, format!("invalid rational {s:?}"));
    let int = |t: &str| t.trim().parse::<BigInt>().map_err(|_| bad());
    let r = if let Some((num, den)) = s.split_once('/') {
        let den = int(den)?;
        if den == BigInt::from(0) {
            return Err(bad());
        }
        BigRational::new(int(num)?, den)
    } else if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{whole}{frac}");
        BigRational::new(int(&digits)?, BigInt::from(10).pow(frac.len() as u32))
    } else {
        BigRational::from_integer(int(s)?)
    };
    Ok(r)
}

/// Runs a report-producing command; returns the report and its output options.
fn report_for<'c>(command: &'c Command, io: &mut Io) -> CliResult<(Report, &'c Output)> {
    Ok(match command {
        Command::GraphStats(a) => (graph_report(&read_family(&a.family, io)?), &a.out),
        Command::Peel(a) => {
            let family = read_family(&a.input.family, io)?;
            let exactness = if a.exact {
                Exactness::Maximum
            } else {
                Exactness::MaximalGreedy
            };
            let trace = greedy_peeling_with_cap(&family, parse_mode(&a.mode)?, exactness, a.cap)?;
            (trace.report_for(&family), &a.input.out)
        }
        Command::BoundCheck(a) => {
            let family = read_family(&a.input.family, io)?;
            let name: BoundName = a.bound.parse()?;
            let params = BoundParams {
                s: a.s,
                epsilon: a.epsilon.as_deref().map(parse_rational).transpose()?,
                strength: a.strength.as_deref().map(str::parse::<EventownStrength>).transpose()?,
            };
            (Report::from(&check_bound(&family, name, &params)?), &a.input.out)
        }
        Command::SearchMin(a) => {
            let opts = SearchOptions {
                budget: a.budget.unwrap_or_else(default_budget),
                canonical: a.canonical,
            };
            let result = search_min(a.n, a.size, parse_mode(&a.mode)?, &opts)?;
            if io.verbose {
                writeln!(
                    io.stderr,
                    "explored {} nodes, pruned {} subtrees, exhaustive={}",
                    result.explored, result.pruned, result.exhaustive
                )?;
            }
            let mut report = Report::from(&result);
            if let (Some(path), Some(w)) = (&a.witness_out, &result.witness) {
                fs::write(path, write_family(w))?;
                report.witness_path = Some(path.display().to_string());
            }
            (report, &a.out)
        }
        Command::SpectralCheck(a) => {
            let family = read_family(&a.input.family, io)?;
            let mode = if a.restricted {
                ConcentrationMode::EvenRestricted
            } else {
                ConcentrationMode::General
            };
            (concentration_check(&family, mode)?.report(a.coefficients), &a.input.out)
        }
        Command::Construct(_) | Command::Op(_) | Command::Sweep(_) => {
            unreachable!("handled by dispatch")
        }
    })
}

fn sweep(a: &SweepArgs, io: &mut Io) -> CliResult<i32> {
    let usage = |m: String| Failure(EXIT_USAGE, m);
    if !["construct", "search-min", "bound-check"].contains(&a.command.as_str()) {
        return Err(usage(format!("sweep supports construct, search-min, bound-check (got {:?})", a.command)));
    }
    let (param, span) = a
        .range
        .split_once('=')
        .ok_or_else(|| usage(format!("range {:?} is not param=a..b", a.range)))?;
    let (lo, hi) = span
        .split_once("..")
        .and_then(|(l, h)| Some((l.parse::<u64>().ok()?, h.parse::<u64>().ok()?)))
        .ok_or_else(|| usage(format!("range {:?} is not param=a..b", a.range)))?;
    if lo > hi || !param.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(usage(format!("invalid range {:?}", a.range)));
    }
    let flag = format!("--{}", param.replace('_', "-"));
    let mut reports = Vec::new();
    let mut violated = false;
    for value in lo..=hi {
        let mut argv = vec!["oelab".to_string(), a.command.clone()];
        argv.extend(a.rest.iter().cloned());
        argv.push(flag.clone());
        argv.push(value.to_string());
        let cli = Cli::try_parse_from(&argv).map_err(|e| usage(e.render().to_string()))?;
        let report = match &cli.command {
            Command::Construct(c) => {
                let spec = build_spec(c)?;
                let mut r = construction_report(&spec, &spec.build()?);
                r.witness = None;
                r
            }
            other => report_for(other, io)?.0,
        };
        violated |= report.verdict == Some(Verdict::Violated);
        reports.push(report);
    }
    let csv = emit_csv(&reports)?;
    match &a.output {
        Some(p) => fs::write(p, csv)?,
        None => io.stdout.write_all(csv.as_bytes())?,
    }
    Ok(if violated { EXIT_VIOLATED } else { EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("oelab").chain(args.iter().copied());
        let code = run(argv, &mut input, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn construct_then_op() {
        let (code, family, _) = run_cli(&["construct", "--kind", "as_extended", "--n", "9", "--s", "3"], "");
        assert_eq!(code, 0);
        let (code, out, _) = run_cli(&["op"], &family);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "5");
    }

    #[test]
    fn bound_check_exit_codes() {
        let (_, family, _) = run_cli(&["construct", "--kind", "eventown_mixed", "--n", "8", "--s", "2"], "");
        let (code, out, _) = run_cli(&["bound-check", "--bound", "eventown_lower_bound", "--strength", "full"], &family);
        assert_eq!(code, 0);
        let r = crate::report::parse_report(&out).unwrap();
        assert_eq!(r.verdict, Some(Verdict::Holds));
        assert_eq!(r.values["slack"].as_rational(), Some(BigRational::from_integer(0.into())));

        // Claiming a larger s than the family supports is not applicable, not an error.
        let (code2, out, _) = run_cli(&["bound-check", "--bound", "oddtown_lower_bound"], &family);
        assert_eq!((code, code2), (0, 0));
        assert!(out.contains("not-applicable"));

        let (code, _, err) = run_cli(&["bound-check", "--bound", "nonsense"], &family);
        assert_eq!(code, 2);
        assert!(err.contains("unknown bound"));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_cli(&["search-min", "--n", "5"], "").0, 2);
        assert_eq!(run_cli(&["construct", "--kind", "nope", "--n", "4"], "").0, 2);
        assert_eq!(run_cli(&["op", "--family", "/nonexistent/file"], "").0, 2);
        assert_eq!(run_cli(&["op"], "n=3\n{1,4}\n").0, 2);
        assert_eq!(run_cli(&["--help"], "").0, 0);
    }

    #[test]
    fn sweep_emits_csv() {
        let (code, out, err) = run_cli(
            &["sweep", "--command", "construct", "--range", "s=1..6", "--", "--kind", "as_extended", "--n", "10"],
            "",
        );
        assert_eq!(code, 0, "{err}");
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 7);
        assert!(lines[0].starts_with("kind,"));
        assert!(lines[6].contains(",8,"));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/4").ok(), Some(BigRational::new(1.into(), 4.into())));
        assert_eq!(parse_rational("0.25").ok(), Some(BigRational::new(1.into(), 4.into())));
        assert_eq!(parse_rational("2").ok(), Some(BigRational::from_integer(2.into())));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.").is_err());
    }
}
