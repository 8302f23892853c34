//! The `wpa` command line: decide, check against the oracle, generate
//! non-congruence instances, and run the scaling benchmark.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::Error;
use crate::frontend::parse;
use crate::json::chain_to_string_pretty;
use crate::oracle::{box_points, Oracle};
use crate::solver::{decide_formula, extract_witness, Decision, Options};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "wpa", version, about = "Decide weak Presburger arithmetic formulas with few negations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide satisfiability and optionally print a witness or the solution set.
    Decide {
        /// Formula file, or `-` for stdin.
        file: PathBuf,
        /// Refuse formulas with more negations than this.
        #[arg(long = "max-neg", value_name = "K")]
        max_neg: Option<usize>,
        #[arg(long)]
        witness: bool,
        /// Write the solution set as JSON.
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
        /// Print the solution set as a chain.
        #[arg(long)]
        show_set: bool,
        /// Evaluate `!E x. !phi` by complementing twice.
        #[arg(long)]
        no_peephole: bool,
    },
    /// Compare the solver with brute-force evaluation on a box.
    Check {
        file: PathBuf,
        /// Box radius: points range over `[-R, R]^n`.
        #[arg(long = "box", value_name = "R")]
        radius: i64,
        #[arg(long = "max-neg", value_name = "K")]
        max_neg: Option<usize>,
        /// Flip the solver's answer at the origin (exercises the mismatch path).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Print a formula for `x != r_i (mod m_i)` for all i.
    GenNoncong {
        /// Comma-separated `m:r` pairs.
        spec: String,
    },
    /// Time the solver on a fixed-weight family of growing size.
    Bench {
        #[arg(long, default_value = "small")]
        suite: String,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::UnknownSymbol { .. } | Error::BadModulus(_) => EXIT_PARSE,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_OTHER,
    }
}

fn read_input(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Decide { file, max_neg, witness, json, show_set, no_peephole } => {
            cmd_decide(&file, max_neg, witness, json.as_ref(), show_set, !no_peephole, out)
        }
        Command::Check { file, radius, max_neg, inject_fault } => cmd_check(&file, radius, max_neg, inject_fault, out),
        Command::GenNoncong { spec } => cmd_gen_noncong(&spec, out),
        Command::Bench { suite } => cmd_bench(&suite, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load(file: &PathBuf, max_neg: Option<usize>, peephole: bool) -> Result<Decision, Error> {
    let text = read_input(file).map_err(|e| Error::PreconditionViolation(format!("{}: {e}", file.display())))?;
    decide_formula(parse(&text)?, max_neg, Options { peephole })
}

fn format_point(d: &Decision, p: &[BigInt]) -> String {
    if p.is_empty() {
        return "()".into();
    }
    let parts: Vec<String> = p.iter().enumerate().map(|(i, v)| format!("{}={v}", d.parsed.name(i + 1))).collect();
    parts.join(", ")
}

fn cmd_decide(
    file: &PathBuf,
    max_neg: Option<usize>,
    witness: bool,
    json: Option<&PathBuf>,
    show_set: bool,
    peephole: bool,
    out: &mut dyn Write,
) -> Result<i32, Error> {
    let d = load(file, max_neg, peephole)?;
    let io = |e: std::io::Error| Error::PreconditionViolation(e.to_string());
    writeln!(out, "{}", if d.satisfiable { "sat" } else { "unsat" }).map_err(io)?;
    if witness && d.satisfiable {
        let p = extract_witness(&d.chain)?.expect("satisfiable chains have points");
        writeln!(out, "witness: {}", format_point(&d, &p)).map_err(io)?;
    }
    if show_set {
        writeln!(out, "set: {}", d.chain).map_err(io)?;
    }
    if let Some(path) = json {
        std::fs::write(path, chain_to_string_pretty(&d.chain) + "\n").map_err(io)?;
    }
    Ok(EXIT_OK)
}

/// Outcome of comparing the solver with the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Agree { points: u64, max_range: i128 },
    Mismatch { point: Vec<i128>, solver: bool, oracle: bool },
    Skipped(String),
}

/// Compares membership on `[-radius, radius]^n` and checks the verdict
/// against the oracle at the witness.
pub fn check_decision(d: &Decision, radius: i64, inject_fault: bool) -> Result<CheckOutcome, Error> {
    let mut oracle = match Oracle::new(&d.parsed.formula) {
        Ok(o) => o,
        Err(s) => return Ok(CheckOutcome::Skipped(s.0)),
    };
    let n = d.chain.dim();
    let mut points = 0u64;
    for p in box_points(n, radius as i128) {
        let big: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
        let mut solver = d.chain.contains(&big);
        if inject_fault && p.iter().all(|&x| x == 0) {
            solver = !solver;
        }
        let truth = match oracle.holds(&p) {
            Ok(t) => t,
            Err(s) => return Ok(CheckOutcome::Skipped(s.0)),
        };
        if solver != truth {
            return Ok(CheckOutcome::Mismatch { point: p, solver, oracle: truth });
        }
        points += 1;
    }
    if d.satisfiable {
        let w = extract_witness(&d.chain)?.expect("satisfiable chains have points");
        let small: Option<Vec<i128>> = w.iter().map(|x| x.to_i64().map(i128::from)).collect();
        if let Some(wp) = small {
            match oracle.holds(&wp) {
                Ok(true) => {}
                Ok(false) => return Ok(CheckOutcome::Mismatch { point: wp, solver: true, oracle: false }),
                Err(s) => return Ok(CheckOutcome::Skipped(s.0)),
            }
        }
    }
    Ok(CheckOutcome::Agree { points, max_range: oracle.max_range })
}

fn cmd_check(
    file: &PathBuf,
    radius: i64,
    max_neg: Option<usize>,
    inject_fault: bool,
    out: &mut dyn Write,
) -> Result<i32, Error> {
    if radius < 0 {
        return Err(Error::PreconditionViolation("box radius must be non-negative".into()));
    }
    let d = load(file, max_neg, true)?;
    let io = |e: std::io::Error| Error::PreconditionViolation(e.to_string());
    match check_decision(&d, radius, inject_fault)? {
        CheckOutcome::Agree { points, max_range } => {
            let verdict = if d.satisfiable { "sat" } else { "unsat" };
            write!(out, "OK: {points} points agree, verdict {verdict}").map_err(io)?;
            if max_range > 0 {
                write!(out, ", nested quantifier range {max_range}").map_err(io)?;
            }
            writeln!(out).map_err(io)?;
            Ok(EXIT_OK)
        }
        CheckOutcome::Mismatch { point, solver, oracle } => {
            let big: Vec<BigInt> = point.iter().map(|&x| BigInt::from(x)).collect();
            writeln!(out, "MISMATCH at ({}): solver={solver} oracle={oracle}", format_point(&d, &big)).map_err(io)?;
            Ok(EXIT_MISMATCH)
        }
        CheckOutcome::Skipped(reason) => {
            writeln!(out, "SKIPPED: {reason}").map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

/// `A y. ((x - r_1 = m_1*y -> y = 3*x + 1) & ...)`, which holds exactly for
/// the `x` avoiding every residue `r_i` modulo `m_i`.
pub fn noncong_formula(pairs: &[(BigInt, BigInt)]) -> Result<String, Error> {
    if pairs.is_empty() {
        return Err(Error::BadModulus("no constraints given".into()));
    }
    let two = BigInt::from(2);
    let mut parts = Vec::with_capacity(pairs.len());
    for (m, r) in pairs {
        if *m < two {
            return Err(Error::BadModulus(m.to_string()));
        }
        if r.sign() == num_bigint::Sign::Minus || r >= m {
            return Err(Error::BadModulus(format!("residue {r} outside [0, {m})")));
        }
        parts.push(format!("(x - {r} = {m}*y -> y = 3*x + 1)"));
    }
    Ok(format!("A y. ({})", parts.join(" & ")))
}

pub fn parse_noncong_spec(spec: &str) -> Result<Vec<(BigInt, BigInt)>, Error> {
    spec.split(',')
        .map(|item| {
            let (m, r) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| Error::BadModulus(format!("expected m:r, found {item:?}")))?;
            let m: BigInt = m.trim().parse().map_err(|_| Error::BadModulus(m.to_string()))?;
            let r: BigInt = r.trim().parse().map_err(|_| Error::BadModulus(format!("bad residue {r:?}")))?;
            Ok((m, r))
        })
        .collect()
}

fn cmd_gen_noncong(spec: &str, out: &mut dyn Write) -> Result<i32, Error> {
    let text = noncong_formula(&parse_noncong_spec(spec)?)?;
    writeln!(out, "{text}").map_err(|e| Error::PreconditionViolation(e.to_string()))?;
    Ok(EXIT_OK)
}

/// A weight-2 formula with `n` variables and `n` equations:
/// `A xn. ((x1 = 2*xn & x2 = x1 + 1 & ... ) -> xn = 3*x1 + 1)`.
pub fn scaling_formula(n: usize) -> String {
    assert!(n >= 2);
    let mut eqs = vec![format!("x1 = 2*x{n}")];
    for i in 2..n {
        eqs.push(format!("x{i} = x{} + 1", i - 1));
    }
    format!("A x{n}. (({}) -> x{n} = 3*x1 + 1)", eqs.join(" & "))
}

pub const SCALING_SIZES: [usize; 4] = [5, 10, 20, 40];
pub const SCALING_RATIO_LIMIT: f64 = 16.0;

/// Best of `reps` wall times for deciding `text`.
pub fn time_decide(text: &str, reps: usize) -> Result<(Duration, Decision), Error> {
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..reps.max(1) {
        let parsed = parse(text)?;
        let t0 = Instant::now();
        let d = decide_formula(parsed, None, Options::default())?;
        best = best.min(t0.elapsed());
        last = Some(d);
    }
    Ok((best, last.unwrap()))
}

fn cmd_bench(suite: &str, out: &mut dyn Write) -> Result<i32, Error> {
    if suite != "small" {
        return Err(Error::PreconditionViolation(format!("unknown suite {suite:?}; available: small")));
    }
    let io = |e: std::io::Error| Error::PreconditionViolation(e.to_string());
    writeln!(out, "fixed weight 2, n variables and n equations").map_err(io)?;
    writeln!(out, "{:>4} {:>6} {:>12} {:>8}", "n", "weight", "time_ms", "ratio").map_err(io)?;
    let mut prev: Option<f64> = None;
    let mut all_ok = true;
    for n in SCALING_SIZES {
        let (t, d) = time_decide(&scaling_formula(n), 3)?;
        let ms = t.as_secs_f64() * 1e3;
        let ratio = prev.map(|p| ms / p);
        if ratio.is_some_and(|r| r > SCALING_RATIO_LIMIT) {
            all_ok = false;
        }
        let shown = ratio.map_or("-".to_string(), |r| format!("{r:.2}"));
        writeln!(out, "{n:>4} {:>6} {ms:>12.3} {shown:>8}", d.weight).map_err(io)?;
        prev = Some(ms);
    }
    writeln!(out, "ratio limit {SCALING_RATIO_LIMIT}: {}", if all_ok { "within" } else { "exceeded" }).map_err(io)?;
    writeln!(out).map_err(io)?;
    writeln!(out, "non-congruence instances").map_err(io)?;
    writeln!(out, "{:<24} {:>6} {:>12} {:>6}", "constraints", "weight", "time_ms", "links").map_err(io)?;
    let moduli: [&[(i64, i64)]; 4] = [&[(2, 0)], &[(2, 0), (3, 1)], &[(2, 0), (3, 1), (5, 2)], &[(2, 1), (3, 2), (5, 4), (7, 6)]];
    for pairs in moduli {
        let big: Vec<(BigInt, BigInt)> = pairs.iter().map(|&(m, r)| (m.into(), r.into())).collect();
        let (t, d) = time_decide(&noncong_formula(&big)?, 1)?;
        let label: Vec<String> = pairs.iter().map(|(m, r)| format!("{m}:{r}")).collect();
        writeln!(out, "{:<24} {:>6} {:>12.3} {:>6}", label.join(","), d.weight, t.as_secs_f64() * 1e3, d.chain.len())
            .map_err(io)?;
    }
    Ok(EXIT_OK)
}
