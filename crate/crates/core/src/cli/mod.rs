//! The `goebel` command line. [`run`] parses arguments, dispatches to the
//! library and returns the process exit code.

mod output;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::json;

pub use output::{format_output, Document, OutputFormat, Table};

use crate::asymptotics::{
    asym_coeffs, c_of_n, c_of_n_series, check_lower_bound_from, convergence_report, epsilon, epsilon_bound_check,
    eulerian_polynomial, expansion_eval, goebel_constant, goebel_constant_at, log_g, somos_constant, somos_sequence,
    AsymptoticExpansion, ValueRecord,
};
use crate::error::{GoebelError, Result};
use crate::exact::{eval_exact, eval_prefix, is_integral, naive_n, DigitBudget, ExactRational, GoebelParams};
use crate::padic::{compute_n, nu_p_factorial, padic_eval, primes_up_to, LemmaRanges, PadicState, PrimePowerContext};
use crate::random_mod::{residue_set, scan_nonintegral_primes, verify_random_theorem};
use crate::real::HighPrecReal;
use crate::report::VerdictReport;
use crate::theorems::{
    build_table, classify_n7, compare_table, reference_table1, verify_min7_reduction, NTable, DEFAULT_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "goebel",
    version,
    about = "Exact, p-adic and asymptotic computations for (k,l)-Goebel sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Plain)]
    format: OutputFormat,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (GOEBEL_JOBS overrides)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Report timing and settings on stderr
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Debug, Args)]
struct Seq {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    l: u32,
}

impl Seq {
    fn params(&self) -> Result<GoebelParams> {
        GoebelParams::new(self.k, self.l)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// g(n) exactly, or log g(n) with --log
    Eval {
        #[command(flatten)]
        seq: Seq,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        log: bool,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// g(1), ..., g(n)
    Prefix {
        #[command(flatten)]
        seq: Seq,
        #[arg(long)]
        n: u64,
    },
    /// First non-integral index N_{k,l}
    Nkl {
        #[command(flatten)]
        seq: Seq,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        /// Use exact rationals instead of the p-adic method
        #[arg(long)]
        naive: bool,
    },
    /// Grid of N_{k,l} for 2 <= k <= kmax, 2 <= l <= lmax
    Table {
        #[arg(long, default_value_t = 17)]
        kmax: u32,
        #[arg(long, default_value_t = 17)]
        lmax: u32,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// C_{k,l}; C(n) with --n; the series C(1..nmax) with --nmax
    Const {
        #[command(flatten)]
        seq: Seq,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        nmax: Option<u64>,
        /// Index at which the tail series are attached
        #[arg(long)]
        depth: Option<u64>,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// The k-Somos constant, or s_n with --n
    Somos {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// a_{k,0}, ..., a_{k,rmax}
    Coeffs {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 6)]
        rmax: u32,
    },
    /// Eulerian polynomial A_r, or rows A_0..A_rmax
    Eulerian {
        #[arg(long)]
        r: Option<u32>,
        #[arg(long)]
        rmax: Option<u32>,
    },
    /// epsilon(n), or bound comparisons for n = 1..nmax
    Epsilon {
        #[command(flatten)]
        seq: Seq,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        nmax: Option<u64>,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Truncated expansion at n and its ratio to g(n)
    Expand {
        #[command(flatten)]
        seq: Seq,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 6)]
        order: u32,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Scaled residuals rho_R(n) for n in n..=nmax
    Converge {
        #[command(flatten)]
        seq: Seq,
        #[arg(long, default_value_t = 14)]
        n: u64,
        #[arg(long, default_value_t = 22)]
        nmax: u64,
        #[arg(long, default_value_t = 5)]
        order: u32,
    },
    /// Residue set of g(n) mod p^r over n < p
    Random {
        #[command(flatten)]
        seq: Seq,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        r: u32,
    },
    /// Primes p <= pmax with g(p) not p-integral
    ScanPrimes {
        #[command(flatten)]
        seq: Seq,
        #[arg(long)]
        pmax: u64,
    },
    /// State of g(n) modulo p^r with the factorial budget
    Padic {
        #[command(flatten)]
        seq: Seq,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: u64,
    },
    /// Compare g(n) with t(n+1) = t(n)^k/(n+1) started from t0
    LowerBound {
        #[command(flatten)]
        seq: Seq,
        /// Start value as a fraction, e.g. 6/5
        #[arg(long)]
        t0: String,
        /// Index of the start value
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long, default_value_t = 10)]
        n: u64,
    },
    /// Exhaustive finite checks
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
}

#[derive(Debug, Subcommand)]
enum Verify {
    /// The four reduction claims and the N = 7 classification
    Main1 {
        #[arg(long, default_value_t = 200)]
        kmax: u32,
        #[arg(long, default_value_t = 200)]
        lmax: u32,
    },
    /// Local properties at p against exact values
    Lemma21 {
        /// Single prime; default checks 2, 3, 5, 7
        #[arg(long)]
        p: Option<u64>,
        /// Exponent; default nu_p(7!) (at least 1)
        #[arg(long)]
        r: Option<u32>,
        #[arg(long, default_value_t = 12)]
        kmax: u32,
        #[arg(long, default_value_t = 9)]
        lmax: u32,
        #[arg(long, default_value_t = 7)]
        n: u64,
    },
    /// The residue-set dichotomy on a grid
    Random {
        #[arg(long, default_value_t = 10)]
        kmax: u32,
        #[arg(long, default_value_t = 10)]
        lmax: u32,
        #[arg(long, default_value_t = 50)]
        pmax: u64,
        #[arg(long, default_value_t = 3)]
        rmax: u32,
    },
    /// Recompute the N table and compare with the bundled one
    Table {
        #[arg(long, default_value_t = 17)]
        kmax: u32,
        #[arg(long, default_value_t = 17)]
        lmax: u32,
    },
}

/// A command's document and whether any check in it failed.
struct Outcome {
    doc: Document,
    failed: bool,
}

impl From<Document> for Outcome {
    fn from(doc: Document) -> Self {
        Outcome { doc, failed: false }
    }
}

pub fn exit_code_for(err: &GoebelError) -> i32 {
    match err {
        GoebelError::InvalidArgument(_) | GoebelError::ValuationOfZero | GoebelError::NonIntegral { .. } => EXIT_USAGE,
        GoebelError::BudgetExceeded { .. }
        | GoebelError::BudgetUnderflow { .. }
        | GoebelError::PrecisionMismatch { .. }
        | GoebelError::Io(_) => EXIT_RESOURCE,
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code. Data goes to stdout or `--out`; diagnostics to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };

    let jobs = std::env::var("GOEBEL_JOBS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .or(cli.jobs)
        .unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_RESOURCE;
        }
    };

    let start = Instant::now();
    let result = pool.install(|| dispatch(&cli.command, cli.format));
    if cli.verbose {
        let _ = writeln!(
            err,
            "[goebel] {:?} format={} jobs={} elapsed={:.3?}",
            cli.command,
            cli.format,
            pool.current_num_threads(),
            start.elapsed()
        );
    }
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code_for(&e);
        }
    };
    let bytes = match format_output(&outcome.doc, cli.format) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code_for(&e);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &bytes),
        None => out.write_all(&bytes),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_RESOURCE;
    }
    if outcome.failed {
        EXIT_VERIFY_FAILED
    } else {
        EXIT_OK
    }
}

fn record(params: GoebelParams, n: u64, v: &HighPrecReal) -> ValueRecord {
    ValueRecord::new(params, n, v)
}

fn record_table(records: &[ValueRecord]) -> Table {
    let mut t = Table::new(["k", "l", "n", "value", "err"]);
    for r in records {
        t.push([
            r.k.to_string(),
            r.l.to_string(),
            r.n.to_string(),
            r.value.clone(),
            r.err.clone(),
        ]);
    }
    t
}

fn records_doc(records: Vec<ValueRecord>) -> Result<Document> {
    let plain = records
        .iter()
        .map(|r| format!("{} {}", r.n, r.value))
        .collect::<Vec<_>>()
        .join("\n");
    Document::new(plain, record_table(&records), records)
}

fn single_value_doc(params: GoebelParams, n: u64, v: &HighPrecReal) -> Result<Document> {
    let rec = record(params, n, v);
    Document::new(rec.value.clone(), record_table(std::slice::from_ref(&rec)), rec)
}

fn reports_doc(reports: &[VerdictReport]) -> Result<Outcome> {
    let mut t = Table::new(["claim", "passed", "checked", "counterexamples"]);
    let mut plain = Vec::new();
    for r in reports {
        t.push([
            r.claim.clone(),
            r.passed.to_string(),
            r.checked.to_string(),
            r.counterexamples.len().to_string(),
        ]);
        plain.push(format!(
            "{} {} ({} checked, {} counterexamples)",
            if r.passed { "PASS" } else { "FAIL" },
            r.claim,
            r.checked,
            r.counterexamples.len()
        ));
        for c in r.counterexamples.iter().take(10) {
            let p = c.p.map(|p| format!(" p={p}")).unwrap_or_default();
            plain.push(format!("  k={} l={} n={}{p}: {}", c.k, c.l, c.n, c.detail));
        }
    }
    Ok(Outcome {
        failed: reports.iter().any(|r| !r.passed),
        doc: Document::new(plain.join("\n"), t, reports)?,
    })
}

fn parse_rational(s: &str) -> Result<ExactRational> {
    s.trim()
        .parse::<ExactRational>()
        .map_err(|_| GoebelError::InvalidArgument(format!("cannot parse {s:?} as a fraction")))
}

fn table_doc(table: &NTable) -> Result<Document> {
    let csv = table.to_csv();
    let mut t = Table::new(["k", "l", "n"]);
    let mut cells = Vec::new();
    for (k, l, v) in table.cells() {
        t.push([k.to_string(), l.to_string(), v.to_string()]);
        cells.push(json!({"k": k, "l": l, "n": v}));
    }
    Ok(Document::new(csv.clone(), t, json!({"cap": table.cap(), "cells": cells}))?.with_raw_csv(csv))
}

fn dispatch(cmd: &Command, _fmt: OutputFormat) -> Result<Outcome> {
    match cmd {
        Command::Eval { seq, n, log, digits } => {
            let params = seq.params()?;
            if *log {
                return Ok(single_value_doc(params, *n, &log_g(params, *n, *digits)?)?.into());
            }
            let g = eval_exact(params, *n, DigitBudget::default())?;
            let integral = is_integral(&g);
            let mut t = Table::new(["k", "l", "n", "value", "integral"]);
            t.push([
                seq.k.to_string(),
                seq.l.to_string(),
                n.to_string(),
                g.to_string(),
                integral.to_string(),
            ]);
            let j = json!({"k": seq.k, "l": seq.l, "n": n, "value": g.to_string(), "integral": integral});
            Ok(Document::new(g.to_string(), t, j)?.into())
        }
        Command::Prefix { seq, n } => {
            let params = seq.params()?;
            let values = eval_prefix(params, *n, DigitBudget::default())?;
            let mut t = Table::new(["n", "value"]);
            let mut plain = Vec::new();
            let mut j = Vec::new();
            for (i, g) in values.iter().enumerate() {
                t.push([(i + 1).to_string(), g.to_string()]);
                plain.push(format!("{} {}", i + 1, g));
                j.push(json!({"n": i + 1, "value": g.to_string()}));
            }
            Ok(Document::new(plain.join("\n"), t, j)?.into())
        }
        Command::Nkl { seq, cap, naive } => {
            let params = seq.params()?;
            let v = if *naive {
                naive_n(params, *cap, DigitBudget::default())?
            } else {
                compute_n(params, *cap)?
            };
            let mut t = Table::new(["k", "l", "cap", "n"]);
            t.push([seq.k.to_string(), seq.l.to_string(), cap.to_string(), v.to_string()]);
            let j = json!({"k": seq.k, "l": seq.l, "cap": cap, "n": v});
            Ok(Document::new(v.to_string(), t, j)?.into())
        }
        Command::Table { kmax, lmax, cap } => {
            let table = build_table(2..=*kmax, 2..=*lmax, *cap)?;
            Ok(table_doc(&table)?.into())
        }
        Command::Const {
            seq,
            n,
            nmax,
            depth,
            digits,
        } => {
            let params = seq.params()?;
            params.require_nondegenerate()?;
            if let Some(nmax) = nmax {
                let ns: Vec<u64> = (1..=*nmax).collect();
                let rows = c_of_n_series(params, &ns, *digits)?;
                return Ok(records_doc(rows.iter().map(|r| record(params, r.n, &r.value)).collect())?.into());
            }
            if let Some(n) = n {
                return Ok(single_value_doc(params, *n, &c_of_n(params, *n, *digits)?)?.into());
            }
            let c = match depth {
                Some(d) => goebel_constant_at(params, *d, *digits)?,
                None => goebel_constant(params, *digits)?,
            };
            let rec = record(params, 0, &c);
            let mut t = Table::new(["k", "l", "value", "err"]);
            t.push([rec.k.to_string(), rec.l.to_string(), rec.value.clone(), rec.err.clone()]);
            let j = json!({"k": rec.k, "l": rec.l, "value": rec.value, "err": rec.err});
            Ok(Document::new(rec.value.clone(), t, j)?.into())
        }
        Command::Somos { k, n, digits } => {
            if let Some(n) = n {
                let s: BigUint = somos_sequence(*n);
                let mut t = Table::new(["n", "value"]);
                t.push([n.to_string(), s.to_string()]);
                let j = json!({"n": n, "value": s.to_string()});
                return Ok(Document::new(s.to_string(), t, j)?.into());
            }
            let s = somos_constant(*k, *digits)?;
            let err = crate::real::rational_to_scientific(&s.err_rational(), 3);
            let mut t = Table::new(["k", "value", "err"]);
            t.push([k.to_string(), s.render(), err.clone()]);
            let j = json!({"k": k, "value": s.render(), "err": err});
            Ok(Document::new(s.render(), t, j)?.into())
        }
        Command::Coeffs { k, rmax } => {
            let coeffs = asym_coeffs(*k, *rmax)?;
            let strs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            let mut t = Table::new(["r", "value"]);
            for (r, c) in strs.iter().enumerate() {
                t.push([r.to_string(), c.clone()]);
            }
            let j: Vec<_> = strs
                .iter()
                .enumerate()
                .map(|(r, c)| json!({"r": r, "value": c}))
                .collect();
            Ok(Document::new(strs.join(", "), t, json!({"k": k, "coeffs": j}))?.into())
        }
        Command::Eulerian { r, rmax } => {
            let rows: Vec<u32> = match (r, rmax) {
                (Some(r), None) => vec![*r],
                (None, Some(m)) => (0..=*m).collect(),
                _ => {
                    return Err(GoebelError::InvalidArgument("give exactly one of --r or --rmax".into()));
                }
            };
            let mut t = Table::new(["r", "j", "coefficient"]);
            let mut plain = Vec::new();
            let mut j = Vec::new();
            for r in rows {
                let a = eulerian_polynomial(r);
                for (i, c) in a.coeffs().iter().enumerate() {
                    t.push([r.to_string(), i.to_string(), c.to_string()]);
                }
                plain.push(if rmax.is_some() {
                    format!("A_{r}(t) = {a}")
                } else {
                    a.to_string()
                });
                let cs: Vec<String> = a.coeffs().iter().map(|c| c.to_string()).collect();
                j.push(json!({"r": r, "coefficients": cs}));
            }
            Ok(Document::new(plain.join("\n"), t, j)?.into())
        }
        Command::Epsilon { seq, n, nmax, digits } => {
            let params = seq.params()?;
            match (n, nmax) {
                (Some(n), None) => Ok(single_value_doc(params, *n, &epsilon(params, *n, *digits)?)?.into()),
                (None, Some(nmax)) => {
                    let mut t = Table::new([
                        "n",
                        "epsilon",
                        "ln_epsilon_upper",
                        "ln_literal_bound",
                        "literal_holds",
                        "ln_derived_bound",
                        "derived_holds",
                    ]);
                    let mut plain = Vec::new();
                    let mut j = Vec::new();
                    for n in 1..=*nmax {
                        let row = epsilon_bound_check(params, n, *digits)?;
                        let fields = [
                            n.to_string(),
                            row.epsilon.render(),
                            format!("{:.6}", row.ln_epsilon_upper),
                            format!("{:.6}", row.ln_literal_bound),
                            row.literal_holds.to_string(),
                            format!("{:.6}", row.ln_derived_bound),
                            row.derived_holds.to_string(),
                        ];
                        plain.push(fields.join(" "));
                        j.push(json!({
                            "k": seq.k, "l": seq.l, "n": n,
                            "value": fields[1], "ln_epsilon_upper": fields[2],
                            "ln_literal_bound": fields[3], "literal_holds": row.literal_holds,
                            "ln_derived_bound": fields[5], "derived_holds": row.derived_holds,
                        }));
                        t.push(fields);
                    }
                    Ok(Document::new(plain.join("\n"), t, j)?.into())
                }
                _ => Err(GoebelError::InvalidArgument("give exactly one of --n or --nmax".into())),
            }
        }
        Command::Expand { seq, n, order, digits } => {
            let params = seq.params()?;
            let exp = AsymptoticExpansion::for_indices(params, *order, *n, *digits)?;
            let lg = log_g(params, *n, *digits)?;
            let v = expansion_eval(&exp, *n, *order, Some(&lg))?;
            let ratio = v.ratio.expect("log g supplied");
            let log_rec = record(params, *n, &v.log_value);
            let ratio_rec = record(params, *n, &ratio);
            let mut t = Table::new(["k", "l", "n", "order", "log_value", "log_err", "ratio", "ratio_err"]);
            t.push([
                seq.k.to_string(),
                seq.l.to_string(),
                n.to_string(),
                order.to_string(),
                log_rec.value.clone(),
                log_rec.err.clone(),
                ratio_rec.value.clone(),
                ratio_rec.err.clone(),
            ]);
            let plain = format!("log {}\nratio {}", log_rec.value, ratio_rec.value);
            let j = json!({"k": seq.k, "l": seq.l, "n": n, "order": order,
                "log_value": log_rec.value, "log_err": log_rec.err,
                "ratio": ratio_rec.value, "ratio_err": ratio_rec.err});
            Ok(Document::new(plain, t, j)?.into())
        }
        Command::Converge { seq, n, nmax, order } => {
            let params = seq.params()?;
            if n > nmax || *n == 0 {
                return Err(GoebelError::InvalidArgument("need 1 <= n <= nmax".into()));
            }
            let ns: Vec<u64> = (*n..=*nmax).collect();
            let report = convergence_report(params, &ns, *order)?;
            Ok(records_doc(report.records())?.into())
        }
        Command::Random { seq, p, r } => {
            let rep = residue_set(seq.params()?, *p, *r)?;
            let residues: Vec<String> = rep.residues.iter().map(|x| x.to_string()).collect();
            let index: Vec<String> = rep.index_set.iter().map(|x| x.to_string()).collect();
            let mut t = Table::new(["k", "l", "p", "r", "n", "residue"]);
            for (n, x) in index.iter().zip(&residues) {
                t.push([
                    seq.k.to_string(),
                    seq.l.to_string(),
                    p.to_string(),
                    r.to_string(),
                    n.clone(),
                    x.clone(),
                ]);
            }
            let plain = format!(
                "verdict: {}\nindex set: {}\nresidues: {}",
                rep.verdict,
                index.join(", "),
                residues.join(", ")
            );
            Ok(Document::new(plain, t, &rep)?.into())
        }
        Command::ScanPrimes { seq, pmax } => {
            let found = scan_nonintegral_primes(seq.params()?, *pmax)?;
            let mut t = Table::new(["p"]);
            for p in &found {
                t.push([p.to_string()]);
            }
            let plain = found.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
            Ok(Document::new(plain, t, &found)?.into())
        }
        Command::Padic { seq, p, r, n } => {
            let params = seq.params()?;
            let ctx = PrimePowerContext::new(*p, *r)?;
            let state = padic_eval(ctx, params, *n)?;
            let used = nu_p_factorial(*p, *n);
            let (plain, residue, budget) = match &state {
                PadicState::NonIntegral => ("non-integral".to_string(), None, None),
                PadicState::Residue { a, budget } => {
                    (format!("{a} mod {p}^{budget}"), Some(a.to_string()), Some(*budget))
                }
            };
            let mut t = Table::new([
                "k",
                "l",
                "p",
                "r",
                "n",
                "nu_p_factorial",
                "integral",
                "residue",
                "budget",
            ]);
            t.push([
                seq.k.to_string(),
                seq.l.to_string(),
                p.to_string(),
                r.to_string(),
                n.to_string(),
                used.to_string(),
                state.is_integral().to_string(),
                residue.clone().unwrap_or_default(),
                budget.map(|b| b.to_string()).unwrap_or_default(),
            ]);
            let j = json!({"k": seq.k, "l": seq.l, "p": p, "r": r, "n": n, "nu_p_factorial": used,
                "integral": state.is_integral(), "residue": residue, "budget": budget});
            Ok(Document::new(plain, t, j)?.into())
        }
        Command::LowerBound { seq, t0, start, n } => {
            let params = seq.params()?;
            let value = parse_rational(t0)?;
            let rep = check_lower_bound_from(params, *start, &value, *n)?;
            let limit = rep.limit.to_decimal(12);
            let mut outcome = reports_doc(std::slice::from_ref(&rep.verdict))?;
            outcome.doc.plain.push_str(&format!(
                "\nlimit of k^-n log t(n): {limit} ({})",
                if rep.limit_positive { "positive" } else { "not positive" }
            ));
            outcome.doc.table.header.push("limit".into());
            outcome.doc.table.rows[0].push(limit.clone());
            outcome.doc.json = json!({"report": rep.verdict, "limit": limit, "limit_positive": rep.limit_positive});
            Ok(outcome)
        }
        Command::Verify { what } => verify(what),
    }
}

fn verify(what: &Verify) -> Result<Outcome> {
    match what {
        Verify::Main1 { kmax, lmax } => {
            let mut reports = verify_min7_reduction()?;
            reports.push(classify_n7(*kmax, *lmax)?);
            reports_doc(&reports)
        }
        Verify::Lemma21 { p, r, kmax, lmax, n } => {
            if *kmax < 2 || *lmax < 2 {
                return Err(GoebelError::InvalidArgument("kmax and lmax must be >= 2".into()));
            }
            let ranges = LemmaRanges {
                ks: (2..=*kmax).collect(),
                ls: (2..=*lmax).collect(),
                n_max: *n,
            };
            let primes = match p {
                Some(p) => vec![*p],
                None => primes_up_to(7),
            };
            let mut reports = Vec::new();
            for q in primes {
                let r = r.unwrap_or_else(|| nu_p_factorial(q, 7).max(1) as u32);
                reports.push(crate::padic::check_key_lemma(&ranges, q, r)?);
            }
            reports_doc(&reports)
        }
        Verify::Random { kmax, lmax, pmax, rmax } => {
            let rep = verify_random_theorem(*kmax, *lmax, *pmax, *rmax)?;
            let mut outcome = reports_doc(&[rep.dichotomy.clone(), rep.lemma.clone()])?;
            outcome.doc.plain.push_str(&format!(
                "\n{} singleton-zero, {} all-distinct ({} with empty index set), {} skipped",
                rep.singleton_zero, rep.all_distinct, rep.empty, rep.skipped
            ));
            outcome.doc.json = serde_json::to_value(&rep).map_err(|e| GoebelError::Io(e.to_string()))?;
            Ok(outcome)
        }
        Verify::Table { kmax, lmax } => {
            let reference = reference_table1()
                .restrict(2..=*kmax, 2..=*lmax)
                .ok_or_else(|| GoebelError::InvalidArgument("the bundled table covers 2..=17 only".into()))?;
            let computed = build_table(2..=*kmax, 2..=*lmax, DEFAULT_CAP)?;
            reports_doc(&[compare_table(&computed, &reference)])
        }
    }
}
