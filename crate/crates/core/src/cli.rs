//! The `hybridspace` command-line workbench.
//!
//! Subcommands: `gen`, `game`, `sat`, `hybrid`, `locate`. Global flags
//! `--seed`, `--jobs` and `--format` apply to all of them. Output is a pure
//! function of the arguments and input files, so repeated runs are
//! byte-identical.
//!
//! Exit codes: 0 success, 2 input or parse error, 3 domain error.

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::game::{self, DigitSource, PredictorProgram};
use crate::hybrid::{self, parse_rational, Convexity, HybridError, OrderedPair};
use crate::locator::{self, LocatorError, Outcome, Strategy};
use crate::sat::{self, SatError};
use crate::dimacs;
use crate::streams::{DigitStream, PatternMask, Radix, StreamError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Io(_) => 1,
        }
    }
}

impl From<HybridError> for CliError {
    fn from(e: HybridError) -> Self {
        match e {
            HybridError::ParseRational(_) => CliError::Input(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<StreamError> for CliError {
    fn from(e: StreamError) -> Self {
        match e {
            StreamError::TruncationExceeded { .. } => CliError::Domain(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<LocatorError> for CliError {
    fn from(e: LocatorError) -> Self {
        match e {
            LocatorError::ZeroDenominator | LocatorError::ZeroBudget => CliError::Input(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<SatError> for CliError {
    fn from(e: SatError) -> Self {
        CliError::Domain(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "hybridspace", version, about = "Digit streams, hybrid-space arithmetic, point location, diagonal games and SAT")]
pub struct Cli {
    /// Seed for every source of randomness.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for exhaustive search.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Output format. Each command has a natural default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the leading digits of a stream.
    Gen(GenArgs),
    /// Play a predictor program against an Alice sequence.
    Game(GameArgs),
    /// Solve, reduce or count over a DIMACS CNF.
    Sat(SatArgs),
    /// Distances, convexity and traversal sums.
    Hybrid(HybridArgs),
    /// Run the point locator against a rational or a square root.
    Locate(LocateArgs),
}

#[derive(Debug, clap::Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["mask", "rational"])))]
pub struct GenArgs {
    /// Repeating mask such as `111xxx`.
    #[arg(long)]
    pub mask: Option<String>,
    /// Rational `p/q` whose fractional digits are streamed.
    #[arg(long)]
    pub rational: Option<String>,
    /// Radix, 2 or 10. Required for rationals; masks default to 10.
    #[arg(long)]
    pub base: Option<u32>,
    /// Number of digits to print.
    #[arg(long)]
    pub n: u64,
    /// Truncate the stream after this many digits.
    #[arg(long)]
    pub truncate: Option<u64>,
    /// Prefix the digits with `0.`.
    #[arg(long)]
    pub leading: bool,
}

#[derive(Debug, clap::Args)]
pub struct GameArgs {
    /// JSON program list.
    #[arg(long)]
    pub programs: PathBuf,
    /// Id of the program playing Bob.
    #[arg(long)]
    pub bob: usize,
    /// `diagonal`, `self`, `constant:D`, `program:ID`, `digits:0101` or `mask:1x0`.
    #[arg(long)]
    pub alice: String,
    #[arg(long)]
    pub max_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SatMode {
    #[value(name = "2sat")]
    TwoSat,
    Brute,
    Reduce,
    Count,
    Convexity,
}

#[derive(Debug, clap::Args)]
pub struct SatArgs {
    #[arg(value_enum)]
    pub mode: SatMode,
    /// DIMACS CNF file (not used by `count` and `convexity`).
    pub file: Option<PathBuf>,
    /// Clause width for `count` and `convexity`.
    #[arg(long)]
    pub k: Option<u32>,
    /// Clause count for `count`.
    #[arg(long)]
    pub n: Option<u32>,
    /// Allow `convexity` for widths above 3.
    #[arg(long)]
    pub extrapolate: bool,
}

#[derive(Debug, clap::Args)]
#[command(group(clap::ArgGroup::new("what").required(true).args(["pairs", "mask", "traverse"])))]
pub struct HybridArgs {
    /// Two ordered pairs `i,j,k,l`.
    #[arg(long, allow_hyphen_values = true)]
    pub pairs: Option<String>,
    /// Pattern mask such as `111111xxx`.
    #[arg(long)]
    pub mask: Option<String>,
    /// First virtual interval length `x1` (rational).
    #[arg(long, requires = "convexities")]
    pub traverse: Option<String>,
    /// Comma-separated convexities, `inf` allowed.
    #[arg(long)]
    pub convexities: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    SternBrocot,
    #[value(alias = "bisection")]
    Bisect,
}

#[derive(Debug, clap::Args)]
pub struct LocateArgs {
    /// `p/q` or `sqrt:n`.
    #[arg(long, allow_hyphen_values = true)]
    pub target: String,
    #[arg(long, value_enum, default_value = "stern-brocot")]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    /// Stop once the bracket is at most this wide.
    #[arg(long)]
    pub width: Option<String>,
}

/// Parse `args` (including the program name) and run, writing results to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(cli, args, out),
        Command::Game(args) => cmd_game(cli, args, out),
        Command::Sat(args) => cmd_sat(cli, args, out),
        Command::Hybrid(args) => cmd_hybrid(cli, args, out),
        Command::Locate(args) => cmd_locate(cli, args, out),
    }
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn radix(base: u32) -> Result<Radix, CliError> {
    Radix::try_from(base).map_err(|e| input(e.to_string()))
}

fn parse_mask(text: &str) -> Result<PatternMask, CliError> {
    text.parse().map_err(|e: StreamError| input(e.to_string()))
}

fn patterned(cli: &Cli, mask: PatternMask, radix: Radix) -> Result<DigitStream, CliError> {
    let seed = match (cli.seed, mask.free_count()) {
        (Some(seed), _) => seed,
        (None, 0) => 0,
        (None, _) => return Err(input("mask has free cells: --seed is required")),
    };
    Ok(DigitStream::patterned(mask, seed, radix)?)
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, value).map_err(|e| CliError::Io(e.into()))?;
    out.write_all(b"\n")?;
    Ok(())
}

fn digits_string(digits: &[u8]) -> String {
    digits.iter().map(|&d| char::from(b'0' + d)).collect()
}

fn cmd_gen(cli: &Cli, args: &GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (kind, stream) = if let Some(mask) = &args.mask {
        let base = radix(args.base.unwrap_or(10))?;
        ("patterned", patterned(cli, parse_mask(mask)?, base)?)
    } else {
        let text = args.rational.as_deref().expect("clap enforces a source");
        let base = radix(args.base.ok_or_else(|| input("--base is required for --rational"))?)?;
        let (p, q) = text.split_once('/').unwrap_or((text, "1"));
        let p: i64 = p.trim().parse().map_err(|_| input(format!("bad numerator in {text:?}")))?;
        let q: u64 = q.trim().parse().map_err(|_| input(format!("bad denominator in {text:?}")))?;
        ("rational", DigitStream::rational(p, q, base)?)
    };
    let (kind, stream) = match args.truncate {
        Some(len) => ("truncated", DigitStream::truncated(stream, len)),
        None => (kind, stream),
    };
    let digits = stream.prefix(args.n)?;
    match cli.format {
        None => {
            let prefix = if args.leading { "0." } else { "" };
            writeln!(out, "{prefix}{}", digits_string(&digits))?;
        }
        Some(Format::Json) => {
            #[derive(Serialize)]
            struct Gen<'a> {
                kind: &'a str,
                base: u8,
                digits: String,
            }
            let mut text = digits_string(&digits);
            if args.leading {
                text.insert_str(0, "0.");
            }
            json_line(out, &Gen { kind, base: stream.radix().value(), digits: text })?;
        }
        Some(Format::Csv) => {
            writeln!(out, "index,digit")?;
            for (i, d) in digits.iter().enumerate() {
                writeln!(out, "{i},{d}")?;
            }
        }
    }
    Ok(())
}

fn alice_source(
    cli: &Cli,
    spec: &str,
    programs: &[PredictorProgram],
    bob: &PredictorProgram,
    max_len: usize,
) -> Result<Box<dyn DigitSource>, CliError> {
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let find = |id: usize| {
        programs.iter().find(|p| p.id() == id).ok_or_else(|| input(format!("no program with id {id}")))
    };
    Ok(match head {
        "diagonal" => {
            let n = max_len.min(programs.len());
            let matrix = game::output_matrix(programs, n);
            Box::new(game::diagonal_digits(&matrix).map_err(|e| CliError::Domain(e.to_string()))?)
        }
        "self" => Box::new(bob.self_consistent_run(max_len)),
        "constant" => {
            let digit: u8 = rest.parse().map_err(|_| input(format!("bad alice spec {spec:?}")))?;
            if digit > 1 {
                return Err(input("constant digit must be 0 or 1"));
            }
            Box::new(vec![digit; max_len])
        }
        "program" => {
            let id: usize = rest.parse().map_err(|_| input(format!("bad alice spec {spec:?}")))?;
            Box::new(find(id)?.self_consistent_run(max_len))
        }
        "digits" => {
            let digits = rest
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(input(format!("bad alice digits {rest:?}"))),
                })
                .collect::<Result<Vec<u8>, _>>()?;
            Box::new(digits)
        }
        "mask" => Box::new(patterned(cli, parse_mask(rest)?, Radix::Binary)?),
        _ => return Err(input(format!("unknown alice spec {spec:?}"))),
    })
}

fn cmd_game(cli: &Cli, args: &GameArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.programs)
        .map_err(|e| input(format!("cannot read {}: {e}", args.programs.display())))?;
    let programs = game::programs_from_json(&text).map_err(|e| input(e.to_string()))?;
    let bob = programs
        .iter()
        .find(|p| p.id() == args.bob)
        .ok_or_else(|| input(format!("no program with id {}", args.bob)))?;
    let alice = alice_source(cli, &args.alice, &programs, bob, args.max_len)?;
    let result = game::play_game(alice.as_ref(), bob, args.max_len);

    match cli.format {
        Some(Format::Csv) => {
            writeln!(out, "position,alice,bob")?;
            for (i, e) in result.transcript.iter().enumerate() {
                writeln!(out, "{i},{},{}", e.alice, e.bob)?;
            }
        }
        _ => {
            #[derive(Serialize)]
            struct Line {
                position: usize,
                alice: u8,
                bob: u8,
            }
            for (position, e) in result.transcript.iter().enumerate() {
                json_line(out, &Line { position, alice: e.alice, bob: e.bob })?;
            }
            json_line(out, &result.outcome)?;
        }
    }
    Ok(())
}

fn read_cnf(args: &SatArgs) -> Result<sat::Cnf, CliError> {
    let path = args.file.as_ref().ok_or_else(|| input("a DIMACS file is required for this mode"))?;
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    dimacs::parse(&text).map_err(|e| input(e.to_string()))
}

fn cmd_sat(cli: &Cli, args: &SatArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let csv = cli.format == Some(Format::Csv);
    let emit_result = |out: &mut dyn Write, result: &sat::SatResult| -> Result<(), CliError> {
        if csv {
            writeln!(out, "verdict,witness")?;
            match result.witness() {
                Some(w) => writeln!(out, "sat,{}", w.values().iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())?,
                None => writeln!(out, "unsat,")?,
            }
            Ok(())
        } else {
            json_line(out, result)
        }
    };
    match args.mode {
        SatMode::TwoSat => emit_result(out, &sat::solve_2sat(&read_cnf(args)?)?),
        SatMode::Brute => emit_result(out, &sat::solve_bruteforce_parallel(&read_cnf(args)?, cli.jobs)?),
        SatMode::Reduce => {
            let cnf = read_cnf(args)?;
            let game = sat::reduce_3sat_to_game(&cnf)?;
            let found = game.search()?;
            #[derive(Serialize)]
            struct Reduce {
                positions: usize,
                verdict: &'static str,
                #[serde(skip_serializing_if = "Option::is_none")]
                guess: Option<String>,
                #[serde(skip_serializing_if = "Option::is_none")]
                witness: Option<sat::Assignment>,
            }
            let report = match found {
                Some((guess, decoding)) => Reduce {
                    positions: game.len(),
                    verdict: "sat",
                    guess: Some(digits_string(&guess)),
                    witness: decoding.result.witness().cloned(),
                },
                None => Reduce { positions: game.len(), verdict: "unsat", guess: None, witness: None },
            };
            if csv {
                writeln!(out, "positions,verdict,guess")?;
                writeln!(out, "{},{},{}", report.positions, report.verdict, report.guess.unwrap_or_default())?;
                Ok(())
            } else {
                json_line(out, &report)
            }
        }
        SatMode::Count => {
            let k = args.k.ok_or_else(|| input("--k is required for count"))?;
            let n = args.n.ok_or_else(|| input("--n is required for count"))?;
            let count = sat::possibility_count(k, n)?;
            if csv {
                writeln!(out, "k,n,count\n{k},{n},{count}")?;
            } else {
                // Written by hand so that big counts stay JSON numbers.
                writeln!(out, "{{\"k\":{k},\"n\":{n},\"count\":{count}}}")?;
            }
            Ok(())
        }
        SatMode::Convexity => {
            let k = args.k.ok_or_else(|| input("--k is required for convexity"))?;
            let c = sat::clause_convexity(k, args.extrapolate)?;
            if csv {
                writeln!(out, "k,convexity\n{k},{c}")?;
            } else {
                #[derive(Serialize)]
                struct Conv {
                    k: u32,
                    convexity: Convexity,
                }
                json_line(out, &Conv { k, convexity: c })?;
            }
            Ok(())
        }
    }
}

fn emit_fields(cli: &Cli, out: &mut dyn Write, fields: &[(&str, serde_json::Value)]) -> Result<(), CliError> {
    if cli.format == Some(Format::Csv) {
        writeln!(out, "key,value")?;
        for (k, v) in fields {
            let v = match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            writeln!(out, "{k},\"{v}\"")?;
        }
        return Ok(());
    }
    // serde_json maps sort their keys; keep declaration order instead.
    let body: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("{}:{}", serde_json::Value::String((*k).into()), v))
        .collect();
    writeln!(out, "{{{}}}", body.join(","))?;
    Ok(())
}

fn rational_value(r: &BigRational) -> serde_json::Value {
    serde_json::Value::String(r.to_string())
}

fn cmd_hybrid(cli: &Cli, args: &HybridArgs, out: &mut dyn Write) -> Result<(), CliError> {
    use serde_json::Value;

    if let Some(text) = &args.pairs {
        let nums = text
            .split(',')
            .map(|s| s.trim().parse::<i64>().map_err(|_| input(format!("bad integer {s:?} in --pairs"))))
            .collect::<Result<Vec<_>, _>>()?;
        let [i, j, k, l] = nums[..] else {
            return Err(input("--pairs takes exactly four integers i,j,k,l"));
        };
        let a = OrderedPair::new(i, j)?;
        let b = OrderedPair::new(k, l)?;
        let virt = hybrid::virtual_distance(&a, &b)?;
        let actual = hybrid::actual_distance(&a, &b)?;
        let sum = hybrid::add_intervals(&a, &b)?;
        let c = hybrid::convexity(&a, &b)?;
        let predictable = hybrid::predictable_fraction(&c)?;
        let big = |v: i128| Value::Number(serde_json::Number::from_i128(v).expect("i128 fits"));
        return emit_fields(cli, out, &[
            ("virtual", big(virt)),
            ("actual", big(actual)),
            ("add", big(sum)),
            ("convexity", Value::String(c.to_string())),
            ("predictable", rational_value(&predictable)),
        ]);
    }
    if let Some(text) = &args.mask {
        let mask = parse_mask(text)?;
        let c = hybrid::pattern_convexity(&mask)?;
        let predictable = hybrid::predictable_fraction(&c)?;
        return emit_fields(cli, out, &[
            ("mask", Value::String(mask.to_string())),
            ("period", Value::from(mask.period())),
            ("free", Value::from(mask.free_count())),
            ("convexity", Value::String(c.to_string())),
            ("predictable", rational_value(&predictable)),
        ]);
    }
    let first = parse_rational(args.traverse.as_deref().expect("clap enforces one option"))?;
    let list = args.convexities.as_deref().expect("clap enforces --convexities");
    let convexities = list
        .split(',')
        .map(|s| match s.trim() {
            "inf" | "infinite" => Ok(Convexity::Infinite),
            other => parse_rational(other).map(Convexity::Finite),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let t = hybrid::traversal_sum(&first, &convexities)?;
    emit_fields(cli, out, &[
        ("bracket_sum", rational_value(&t.bracket_sum)),
        ("total_virtual_all", rational_value(&t.total_virtual_all)),
        ("lengths", Value::Array(t.lengths.iter().map(rational_value).collect())),
    ])
}

fn cmd_locate(cli: &Cli, args: &LocateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cut = if let Some(n) = args.target.strip_prefix("sqrt:") {
        let n: u64 = n.trim().parse().map_err(|_| input(format!("bad sqrt target {:?}", args.target)))?;
        locator::dedekind_cut_sqrt(n)?
    } else {
        let target = parse_rational(&args.target).map_err(|e| input(e.to_string()))?;
        locator::rational_cut(target.numer().clone(), target.denom().clone())?
    };
    let strategy = match args.strategy {
        StrategyArg::SternBrocot => Strategy::SternBrocot,
        StrategyArg::Bisect => Strategy::Bisection,
    };
    let width = args.width.as_deref().map(parse_rational).transpose()?;
    let trace = locator::locate_until(&cut, args.budget, strategy, width.as_ref())?;

    if cli.format == Some(Format::Csv) {
        writeln!(out, "step,alpha,cmp")?;
        for (i, s) in trace.steps().iter().enumerate() {
            writeln!(out, "{},{},{}", i + 1, s.alpha, s.cmp.as_str())?;
        }
        return Ok(());
    }

    #[derive(Serialize)]
    struct StepLine {
        step: usize,
        alpha: String,
        cmp: &'static str,
    }
    for (i, s) in trace.steps().iter().enumerate() {
        json_line(out, &StepLine { step: i + 1, alpha: s.alpha.to_string(), cmp: s.cmp.as_str() })?;
    }

    #[derive(Serialize)]
    struct Final {
        outcome: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        value: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        lo: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        hi: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        width: Option<String>,
        steps: usize,
        rounds: usize,
    }
    let bracket = |name, lo: &BigRational, hi: &BigRational| Final {
        outcome: name,
        value: None,
        lo: Some(lo.to_string()),
        hi: Some(hi.to_string()),
        width: Some((hi - lo).to_string()),
        steps: trace.steps().len(),
        rounds: trace.rounds(),
    };
    let last = match trace.outcome() {
        Outcome::Exact(q) => Final {
            outcome: "exact",
            value: Some(q.to_string()),
            lo: None,
            hi: None,
            width: None,
            steps: trace.steps().len(),
            rounds: trace.rounds(),
        },
        Outcome::Bracket(lo, hi) => bracket("bracket", lo, hi),
        Outcome::BudgetExhausted(lo, hi) => bracket("budget_exhausted", lo, hi),
    };
    json_line(out, &last)
}
