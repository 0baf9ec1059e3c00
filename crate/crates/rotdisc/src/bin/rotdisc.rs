//! Command-line surface for the rotation-discrepancy toolkit.
//!
//! Every command validates its inputs, computes the full artifact in memory,
//! and only then writes it — to stdout by default, or to `--out <path>`.
//! Identical invocations (including `--seed` for randomized suites) produce
//! byte-identical artifacts.
//!
//! Exit codes: 0 success, 1 usage error, 2 computation error (budget or
//! internal failure), 3 verification failure (suite failure or oracle
//! mismatch in `path --mode both`).

use std::io::Write;
use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

use rotdisc::classify::{
    classification_json, classify, construct_member, cstar, Parity,
};
use rotdisc::discrepancy::{csv_string, path_direct, path_recursive, DiscrepancyPath};
use rotdisc::numkernel::{
    cf_from_rational, cf_from_surd, convergents, parse_decimal, parse_ratio, window_parts,
    CfExpansion, Ratio, Surd,
};
use rotdisc::orbit::Alpha;
use rotdisc::patterns::{
    enumerate_elementary, enumerate_prime, prime_decompose, type_k_primes, EnumBudget,
};
use rotdisc::verify;
use rotdisc::{Error, Result};

/// Largest convergent index the `expand` command will print.
const MAX_EXPAND_DEPTH: u64 = 100_000;

#[derive(Parser)]
#[command(
    name = "rotdisc",
    version,
    about = "Exact local-discrepancy paths of irrational rotations: \
             expansion, path evaluation, boundedness classification, \
             pattern tables, and certified dimension bounds"
)]
struct Cli {
    /// Write the artifact to this file instead of stdout (written only on success).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// The rotation number, given in exactly one of three exact forms.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct AlphaSpec {
    /// Real quadratic surd literal "(a+b*sqrt(d))/e".
    #[arg(long, value_name = "SURD")]
    surd: Option<String>,

    /// Rational literal "p/q" (finite expansion only).
    #[arg(long, value_name = "RAT")]
    rational: Option<String>,

    /// Continued-fraction literal "a0;a1,a2" or "a0;a1,(b1,b2)".
    #[arg(long, value_name = "CF")]
    cf: Option<String>,
}

/// An irrational rotation number: surd or eventually periodic expansion.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct IrrationalSpec {
    /// Real quadratic surd literal "(a+b*sqrt(d))/e".
    #[arg(long, value_name = "SURD")]
    surd: Option<String>,

    /// Continued-fraction literal "a0;a1,a2,(b1,b2)" with nonempty period.
    #[arg(long, value_name = "CF")]
    cf: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PathMode {
    /// Step-by-step orbit membership test.
    Direct,
    /// Level-by-level renormalization fill.
    Recursive,
    /// Run both and fail (exit 3) on the first divergence.
    Both,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PatternKindArg {
    /// Minimal identity-evaluating tuples.
    Elementary,
    /// Tuples with no elementary sub-block.
    Prime,
    /// Prime tuples whose character has vanishing second coordinate.
    TypeKPrime,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ParityArg {
    /// Witness at even index: discrepancy bounded above.
    Even,
    /// Witness at odd index: discrepancy bounded below.
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Parity {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Expand alpha as a continued fraction and list exact convergents.
    Expand {
        #[command(flatten)]
        alpha: AlphaSpec,
        /// Largest convergent index to print (capped at the final term for
        /// finite expansions).
        #[arg(long, default_value_t = 10)]
        depth: u64,
    },
    /// Emit the k-scaled discrepancy path k*D_n as CSV.
    Path {
        #[command(flatten)]
        alpha: IrrationalSpec,
        /// Window c = h/k with 0 < c < 1, gcd(h, k) = 1.
        #[arg(long, value_name = "H/K")]
        c: String,
        /// Number of rotation steps (rows n = 1..=n).
        #[arg(long)]
        n: u64,
        /// Which evaluator to run.
        #[arg(long, value_enum, default_value_t = PathMode::Both)]
        mode: PathMode,
    },
    /// Decide one-sided boundedness of the discrepancy at a rational window.
    Classify {
        #[command(flatten)]
        alpha: IrrationalSpec,
        /// Window c = h/k with 0 < c < 1, gcd(h, k) = 1.
        #[arg(long, value_name = "H/K")]
        c: String,
    },
    /// Enumerate a pattern table for modulus k.
    Patterns {
        /// Modulus k >= 2.
        #[arg(long)]
        k: u64,
        /// Which table to enumerate.
        #[arg(long, value_enum)]
        kind: PatternKindArg,
    },
    /// Split a tuple into a prime core plus elementary insertions.
    Decompose {
        /// Comma-separated residues mod k, e.g. "1,0,0,1,1".
        #[arg(long, value_name = "T1,T2,...")]
        tuple: String,
        /// Modulus k >= 2.
        #[arg(long)]
        k: u64,
    },
    /// Build an expansion extending a prefix whose discrepancy is one-side
    /// bounded at every window with denominator k.
    Construct {
        /// Comma-separated partial quotients b0,b1,... (empty for no prefix).
        #[arg(long, default_value = "", value_name = "B0,B1,...")]
        prefix: String,
        /// Window denominator k >= 2.
        #[arg(long)]
        k: i64,
        /// Requested witness parity (even: bounded above; odd: bounded below).
        #[arg(long, value_enum)]
        parity: ParityArg,
    },
    /// Certify an enclosure for the crossing point c* of the growth factor g.
    Dimension {
        /// Bracket width target (rational, decimal, or scientific notation).
        #[arg(long, value_name = "TOL")]
        tol: String,
    },
    /// Run the bundled property suites and report pass/fail as JSON.
    Verify {
        /// Suites to run; repeatable; "all" or no flag runs every suite.
        #[arg(long, value_name = "NAME")]
        suite: Vec<String>,
        /// Seed for the randomized samples.
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
    },
}

impl AlphaSpec {
    fn to_cf(&self) -> Result<CfExpansion> {
        if let Some(s) = &self.surd {
            cf_from_surd(&s.parse::<Surd>()?)
        } else if let Some(r) = &self.rational {
            cf_from_rational(&parse_ratio(r)?)
        } else if let Some(l) = &self.cf {
            l.parse()
        } else {
            Err(Error::internal("argument parser admitted no alpha form"))
        }
    }
}

impl IrrationalSpec {
    fn to_cf(&self) -> Result<CfExpansion> {
        if let Some(s) = &self.surd {
            cf_from_surd(&s.parse::<Surd>()?)
        } else if let Some(l) = &self.cf {
            let cf: CfExpansion = l.parse()?;
            if cf.is_finite() {
                return Err(Error::invalid(
                    "this command needs an irrational alpha; the expansion is finite",
                ));
            }
            Ok(cf)
        } else {
            Err(Error::internal("argument parser admitted no alpha form"))
        }
    }

    fn to_alpha(&self) -> Result<Alpha> {
        if let Some(s) = &self.surd {
            Alpha::from_surd(&s.parse::<Surd>()?)
        } else {
            Alpha::from_cf(&self.to_cf()?)
        }
    }
}

/// What a command produced: an artifact to write plus an exit code, or a
/// diagnostic-only outcome whose message already went to stderr.
enum Outcome {
    Artifact(String, i32),
    Silent(i32),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            process::exit(code);
        }
    };
    match run(&cli) {
        Ok(code) => process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            process::exit(match err {
                Error::Parse { .. } | Error::InvalidInput(_) => 1,
                Error::Budget(_) | Error::Internal(_) => 2,
            });
        }
    }
}

fn run(cli: &Cli) -> Result<i32> {
    let outcome = match &cli.command {
        Command::Expand { alpha, depth } => cmd_expand(alpha, *depth)?,
        Command::Path { alpha, c, n, mode } => cmd_path(alpha, c, *n, *mode)?,
        Command::Classify { alpha, c } => cmd_classify(alpha, c)?,
        Command::Patterns { k, kind } => cmd_patterns(*k, *kind)?,
        Command::Decompose { tuple, k } => cmd_decompose(tuple, *k)?,
        Command::Construct { prefix, k, parity } => cmd_construct(prefix, *k, *parity)?,
        Command::Dimension { tol } => cmd_dimension(tol)?,
        Command::Verify { suite, seed } => cmd_verify(suite, *seed)?,
    };
    match outcome {
        Outcome::Artifact(artifact, code) => {
            emit(&cli.out, &artifact)?;
            Ok(code)
        }
        Outcome::Silent(code) => Ok(code),
    }
}

/// Writes the fully buffered artifact in one shot so no partial file is left
/// behind on error.
fn emit(out: &Option<PathBuf>, artifact: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, artifact)
            .map_err(|e| Error::internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(artifact.as_bytes())
                .and_then(|()| lock.flush())
                .map_err(|e| Error::internal(format!("cannot write to stdout: {e}")))
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    s.push('\n');
    s
}

fn parse_residue_csv(input: &str) -> Result<Vec<u64>> {
    let t = input.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| Error::parse(input, 0, "expected comma-separated nonnegative integers"))
        })
        .collect()
}

fn parse_bigint_csv(input: &str) -> Result<Vec<BigInt>> {
    let t = input.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|x| {
            x.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::parse(input, 0, "expected comma-separated integers"))
        })
        .collect()
}

fn bigints_as_strings(xs: &[BigInt]) -> Vec<String> {
    xs.iter().map(BigInt::to_string).collect()
}

fn cmd_expand(alpha: &AlphaSpec, depth: u64) -> Result<Outcome> {
    if depth > MAX_EXPAND_DEPTH {
        return Err(Error::invalid(format!(
            "depth must be at most {MAX_EXPAND_DEPTH}"
        )));
    }
    let cf = alpha.to_cf()?;
    let max_index = match cf.last_index() {
        Some(last) => (depth as i64).min(last as i64),
        None => depth as i64,
    };
    let table = convergents(&cf, max_index)?;
    let rows: Vec<serde_json::Value> = table
        .rows()
        .iter()
        .filter(|r| r.n >= 0)
        .map(|r| json!({ "n": r.n, "p": r.p.to_string(), "q": r.q.to_string() }))
        .collect();
    let doc = json!({
        "alpha": cf.to_string(),
        "prefix": bigints_as_strings(cf.prefix()),
        "period": bigints_as_strings(cf.period()),
        "finite": cf.is_finite(),
        "convergents": rows,
    });
    Ok(Outcome::Artifact(pretty(&doc), 0))
}

fn window(c: &str) -> Result<Ratio> {
    let value = parse_ratio(c)?;
    window_parts(&value)?;
    Ok(value)
}

fn cmd_path(alpha: &IrrationalSpec, c: &str, n: u64, mode: PathMode) -> Result<Outcome> {
    if n == 0 {
        return Err(Error::invalid("step count n must be at least 1"));
    }
    let a = alpha.to_alpha()?;
    let c = window(c)?;
    let path = match mode {
        PathMode::Direct => path_direct(&a, &c, n)?,
        PathMode::Recursive => path_recursive(&a, &c, n)?,
        PathMode::Both => {
            let direct = path_direct(&a, &c, n)?;
            let recursive = path_recursive(&a, &c, n)?;
            if let Some(i) = first_divergence(&direct, &recursive) {
                eprintln!(
                    "paths diverge at n = {i}: direct kDn = {}, recursive kDn = {}",
                    direct.values[i], recursive.values[i]
                );
                return Ok(Outcome::Silent(3));
            }
            direct
        }
    };
    Ok(Outcome::Artifact(csv_string(&path), 0))
}

fn first_divergence(a: &DiscrepancyPath, b: &DiscrepancyPath) -> Option<usize> {
    if a.values.len() != b.values.len() {
        return Some(a.values.len().min(b.values.len()));
    }
    a.values.iter().zip(&b.values).position(|(x, y)| x != y)
}

fn cmd_classify(alpha: &IrrationalSpec, c: &str) -> Result<Outcome> {
    let cf = alpha.to_cf()?;
    let (h, k) = window_parts(&parse_ratio(c)?)?;
    let classification = classify(&cf, h, k)?;
    let doc = classification_json(&cf.to_string(), h, k, &classification);
    Ok(Outcome::Artifact(pretty(&doc), 0))
}

fn cmd_patterns(k: u64, kind: PatternKindArg) -> Result<Outcome> {
    let budget = EnumBudget::default();
    let set = match kind {
        PatternKindArg::Elementary => enumerate_elementary(k, &budget)?,
        PatternKindArg::Prime => enumerate_prime(k, &budget)?,
        PatternKindArg::TypeKPrime => type_k_primes(k, &budget)?,
    };
    let doc = serde_json::to_value(&set).expect("pattern sets serialize infallibly");
    Ok(Outcome::Artifact(pretty(&doc), 0))
}

fn cmd_decompose(tuple: &str, k: u64) -> Result<Outcome> {
    let tuple = parse_residue_csv(tuple)?;
    let decomposition = prime_decompose(&tuple, k)?;
    let doc = serde_json::to_value(&decomposition).expect("decompositions serialize infallibly");
    Ok(Outcome::Artifact(pretty(&doc), 0))
}

fn cmd_construct(prefix: &str, k: i64, parity: ParityArg) -> Result<Outcome> {
    let prefix = parse_bigint_csv(prefix)?;
    let expansion = construct_member(&prefix, k, parity.into())?;
    // The verdict for c = h/k depends only on k (divisibility of the
    // denominators), so classify once with h = 1.
    let classification = classify(&expansion, 1, k)?;
    let doc = json!({
        "alpha": expansion.to_string(),
        "prefix": bigints_as_strings(&prefix),
        "k": k,
        "parity": match parity { ParityArg::Even => "even", ParityArg::Odd => "odd" },
        "verdict": classification.verdict,
        "witness_m": classification.witness_m,
        "condition2_m": classification.condition2_m,
    });
    Ok(Outcome::Artifact(pretty(&doc), 0))
}

fn cmd_dimension(tol: &str) -> Result<Outcome> {
    let tolerance = parse_decimal(tol)?;
    let bound = cstar(&tolerance)?;
    Ok(Outcome::Artifact(pretty(&bound.to_json()), 0))
}

fn cmd_verify(suites: &[String], seed: u64) -> Result<Outcome> {
    let report = verify::run(suites, seed)?;
    let code = if report.all_pass { 0 } else { 3 };
    let doc = serde_json::to_value(&report).expect("verify reports serialize infallibly");
    Ok(Outcome::Artifact(pretty(&doc), code))
}
