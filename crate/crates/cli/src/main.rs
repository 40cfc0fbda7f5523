//! `oriented`: build oriented transformation monoids, enumerate and classify
//! their endomorphisms, evaluate the counting formulas and run the
//! verification suites.
//!
//! Exit codes: 0 on success, 1 when a check fails (details on stderr),
//! 2 on a usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use oriented_core::counting::total_endomorphisms;
use oriented_core::endo::EndoContext;
use oriented_core::groups::{group_endomorphisms, GroupTag};
use oriented_core::verify::{self, enumerated_type_counts, parse_suites, CheckRecord, Outcome, VerifyRequest};
use oriented_core::{Error, FiniteSemigroup, SemigroupKind};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "oriented", version, about = "Oriented transformation monoids and their endomorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Formula,
    Enumerate,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Tag {
    C,
    D2,
}

#[derive(clap::Args, Clone, Copy)]
struct Budget {
    /// Time limit in seconds for each endomorphism search.
    #[arg(long, env = "ORIENTED_BUDGET", default_value_t = 600.0)]
    budget: f64,
}

impl Budget {
    fn duration(self) -> Result<Duration> {
        Duration::try_from_secs_f64(self.budget).map_err(|_| usage(format!("invalid budget {}", self.budget)))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a monoid and write its elements and generators as JSON.
    Build {
        #[arg(long, value_parser = parse_kind)]
        kind: SemigroupKind,
        #[arg(long)]
        n: usize,
        /// JSON output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the Cayley table in binary form.
        #[arg(long)]
        cayley: Option<PathBuf>,
    },
    /// Endomorphisms of C_n or D_2n.
    Groups {
        #[arg(long, value_enum)]
        tag: Tag,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "json")]
        report: Emit,
    },
    /// Enumerate and classify every endomorphism of a monoid.
    Endos {
        #[arg(long, value_parser = parse_kind)]
        kind: SemigroupKind,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
        #[command(flatten)]
        budget: Budget,
    },
    /// Endomorphism counts from the formulas, the search, or both.
    Count {
        #[arg(long, value_parser = parse_kind)]
        kind: SemigroupKind,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "formula")]
        mode: Mode,
        #[command(flatten)]
        budget: Budget,
    },
    /// Per-type counts for a range of kinds and chain sizes.
    Table {
        /// Comma-separated kinds, or `all` for the six oriented kinds.
        #[arg(long, default_value = "all")]
        kinds: String,
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "formula")]
        mode: Mode,
        /// Largest n for which the search runs in enumerate/both mode.
        #[arg(long, default_value_t = 4)]
        enumerate_max: usize,
        /// Shorthand for `--emit csv`.
        #[arg(long)]
        csv: bool,
        #[arg(long, value_enum, default_value = "csv")]
        emit: Emit,
        #[command(flatten)]
        budget: Budget,
    },
    /// Run verification suites.
    Verify {
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Comma-separated kinds, or `all` (the six oriented kinds plus c and d2).
        #[arg(long, default_value = "all")]
        kind: String,
        #[arg(long)]
        n: usize,
        /// Run every n from `--n` up to this value.
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
        #[command(flatten)]
        budget: Budget,
    },
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// A failed check; the payload has already gone to stderr.
#[derive(Debug)]
struct CheckFailed;

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("check failed")
    }
}

impl std::error::Error for CheckFailed {}

fn parse_kind(s: &str) -> std::result::Result<SemigroupKind, String> {
    SemigroupKind::from_tag(s).map_err(|e| e.to_string())
}

fn parse_kind_list(s: &str, all: &[SemigroupKind]) -> Result<Vec<SemigroupKind>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(all.to_vec());
    }
    s.split(',')
        .map(|t| SemigroupKind::from_tag(t.trim()).map_err(|e| usage(e.to_string())))
        .collect()
}

/// Library errors caused by the arguments are usage errors.
fn lib(e: Error) -> anyhow::Error {
    match e {
        Error::Domain(_) | Error::Unsupported(_) | Error::Capacity { .. } | Error::Precondition(_) => usage(e.to_string()),
        other => other.into(),
    }
}

fn write_json<T: Serialize>(value: &T) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn build(kind: SemigroupKind, n: usize, out: Option<PathBuf>, cayley: Option<PathBuf>) -> Result<()> {
    let s = FiniteSemigroup::build(kind, n).map_err(lib)?;
    if let Some(path) = &cayley {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(f);
        s.write_cayley(&mut w)?;
        w.flush()?;
    }
    match out {
        Some(path) => {
            let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(f);
            serde_json::to_writer_pretty(&mut w, &s.to_json())?;
            writeln!(w)?;
            w.flush()?;
            println!("{kind} n={n}: {} elements, {} generators", s.len(), s.generators().len());
        }
        None => write_json(&s.to_json())?,
    }
    Ok(())
}

fn groups(tag: Tag, n: usize, report: Emit) -> Result<()> {
    let tag = match tag {
        Tag::C => GroupTag::C,
        Tag::D2 => GroupTag::D2,
    };
    let r = group_endomorphisms(tag, n).map_err(lib)?;
    match report {
        Emit::Json => write_json(&r),
        Emit::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout());
            w.write_record(["g", "h", "family", "automorphism"])?;
            for e in &r.endomorphisms {
                let h = e.h.map(|w| w.to_string()).unwrap_or_default();
                w.write_record([e.g.to_string(), h, e.family.clone(), e.automorphism.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }
        Emit::Text => {
            println!("{} endomorphisms, {} automorphisms", r.total_endomorphisms, r.total_automorphisms);
            Ok(())
        }
    }
}

fn endos(kind: SemigroupKind, n: usize, emit: Emit, budget: Duration) -> Result<()> {
    let s = FiniteSemigroup::build(kind, n).map_err(lib)?;
    let ctx = EndoContext::new(&s).map_err(lib)?;
    let mut found = ctx.enumerate(Some(budget))?;
    let mut failed = false;
    for m in &mut found {
        match ctx.classify(m) {
            Ok(t) => m.tag = Some(t),
            Err(e) => {
                failed = true;
                eprintln!("{}", json!({ "error": e.to_string(), "kind": kind, "n": n, "elements": s.elements(), "images": m.images }));
            }
        }
    }
    match emit {
        Emit::Json => write_json(&found.iter().map(|m| m.to_json(&s)).collect::<Vec<_>>())?,
        Emit::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout());
            w.write_record(["type", "params", "images"])?;
            for m in &found {
                let j = m.to_json(&s);
                let ty = j["type"].as_str().unwrap_or("").to_string();
                let images = m.images.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
                w.write_record([ty, j["params"].to_string(), images])?;
            }
            w.flush()?;
        }
        Emit::Text => {
            let counts = enumerated_type_counts(&found.iter().map(|m| m.tag.ok_or(Error::Unclassifiable(String::new()))).collect::<Vec<_>>());
            println!("{} endomorphisms", found.len());
            for (t, c) in counts {
                println!("T{t} {c}");
            }
        }
    }
    if failed {
        return Err(CheckFailed.into());
    }
    Ok(())
}

fn count_report(kind: SemigroupKind, n: usize, mode: Mode, budget: Duration) -> Result<oriented_core::counting::CountReport> {
    let mut report = total_endomorphisms(kind, n as u64).map_err(lib)?;
    if mode == Mode::Formula {
        return Ok(report);
    }
    if kind.is_group() {
        let tag = if kind == SemigroupKind::C { GroupTag::C } else { GroupTag::D2 };
        let r = group_endomorphisms(tag, n).map_err(lib)?;
        report.enumerated_total = Some(r.total_endomorphisms.into());
        return Ok(report);
    }
    let (_, pairs) = verify::enumerate_and_classify(kind, n, Some(budget)).map_err(lib)?;
    let tags: Vec<_> = pairs.into_iter().map(|(_, t)| t).collect();
    report.enumerated_total = Some(tags.len().into());
    report.enumerated_types = Some(
        enumerated_type_counts(&tags)
            .into_iter()
            .map(|(t, c)| (format!("T{t}"), c))
            .collect(),
    );
    Ok(report)
}

fn count(kind: SemigroupKind, n: usize, mode: Mode, budget: Duration) -> Result<()> {
    let report = count_report(kind, n, mode, budget)?;
    write_json(&report)?;
    if mode == Mode::Both && !report.consistent() {
        eprintln!("{}", json!({ "error": "formula and enumeration disagree", "report": report }));
        return Err(CheckFailed.into());
    }
    Ok(())
}

#[derive(Serialize)]
struct TableRow {
    kind: SemigroupKind,
    n: usize,
    #[serde(rename = "T1")]
    t1: String,
    #[serde(rename = "T2")]
    t2: String,
    #[serde(rename = "T34_7")]
    t3_7: String,
    #[serde(rename = "T4")]
    t4: String,
    #[serde(rename = "T5")]
    t5: String,
    #[serde(rename = "T6")]
    t6: String,
    total: String,
    enumerated: String,
}

#[allow(clippy::too_many_arguments)]
fn table(kinds: &str, n_min: usize, n_max: usize, mode: Mode, enumerate_max: usize, emit: Emit, budget: Duration) -> Result<()> {
    let kinds = parse_kind_list(kinds, &SemigroupKind::TARGETS)?;
    if let Some(k) = kinds.iter().find(|k| !k.is_target()) {
        return Err(usage(format!("table covers the six oriented kinds, not {k}")));
    }
    if n_min < 3 || n_max < n_min {
        return Err(usage(format!("need 3 <= n-min <= n-max, got {n_min}..{n_max}")));
    }
    let mut rows = Vec::new();
    let mut inconsistent = Vec::new();
    for &kind in &kinds {
        for n in n_min..=n_max {
            let m = if n <= enumerate_max { mode } else { Mode::Formula };
            let report = match count_report(kind, n, m, budget) {
                Ok(r) => r,
                Err(e) if e.downcast_ref::<Error>().is_some_and(|e| matches!(e, Error::BudgetExceeded(_))) => {
                    count_report(kind, n, Mode::Formula, budget)?
                }
                Err(e) => return Err(e),
            };
            if !report.consistent() {
                inconsistent.push(report.clone());
            }
            let t = report.types.as_ref().expect("oriented kinds have subtotals");
            rows.push(TableRow {
                kind,
                n,
                t1: t.t1.to_string(),
                t2: t.t2.to_string(),
                t3_7: t.t3_7.to_string(),
                t4: t.t4.to_string(),
                t5: t.t5.to_string(),
                t6: t.t6.to_string(),
                total: report.formula_total.to_string(),
                enumerated: report.enumerated_total.map(|e| e.to_string()).unwrap_or_default(),
            });
        }
    }
    match emit {
        Emit::Json => write_json(&rows)?,
        _ => {
            let mut w = csv::Writer::from_writer(io::stdout());
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    if !inconsistent.is_empty() {
        eprintln!("{}", json!({ "error": "formula and enumeration disagree", "reports": inconsistent }));
        return Err(CheckFailed.into());
    }
    Ok(())
}

fn verify_cmd(suite: &str, kind: &str, n: usize, n_max: Option<usize>, emit: Emit, budget: Duration) -> Result<()> {
    let suites = parse_suites(suite).map_err(lib)?;
    let all: Vec<SemigroupKind> = SemigroupKind::TARGETS.into_iter().chain([SemigroupKind::C, SemigroupKind::D2]).collect();
    let kinds = parse_kind_list(kind, &all)?;
    let n_max = n_max.unwrap_or(n);
    if n < 3 || n_max < n {
        return Err(usage(format!("need 3 <= n <= n-max, got {n}..{n_max}")));
    }
    let req = VerifyRequest {
        suites,
        kinds,
        ns: (n..=n_max).collect(),
        budget: Some(budget),
    };
    let records = verify::run(&req);
    if records.is_empty() {
        return Err(usage(format!("no checks of suite {suite:?} apply to kind {kind:?}")));
    }
    match emit {
        Emit::Json => write_json(&records)?,
        Emit::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout());
            w.write_record(["kind", "n", "suite", "check", "outcome", "detail"])?;
            for r in &records {
                w.write_record([
                    r.kind.tag().to_string(),
                    r.n.to_string(),
                    r.suite.to_string(),
                    r.check.clone(),
                    format!("{:?}", r.outcome).to_lowercase(),
                    r.detail.clone(),
                ])?;
            }
            w.flush()?;
        }
        Emit::Text => {
            for r in &records {
                let o = match r.outcome {
                    Outcome::Pass => "pass",
                    Outcome::Fail => "FAIL",
                    Outcome::Skipped => "skip",
                };
                println!("{o} {} {} {} {}: {}", r.kind.tag(), r.n, r.suite, r.check, r.detail);
            }
        }
    }
    let failures: Vec<&CheckRecord> = records.iter().filter(|r| !r.passed()).collect();
    if !failures.is_empty() {
        for f in failures {
            eprintln!("{}", serde_json::to_string(f)?);
        }
        return Err(CheckFailed.into());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build { kind, n, out, cayley } => build(kind, n, out, cayley),
        Command::Groups { tag, n, report } => groups(tag, n, report),
        Command::Endos { kind, n, emit, budget } => endos(kind, n, emit, budget.duration()?),
        Command::Count { kind, n, mode, budget } => count(kind, n, mode, budget.duration()?),
        Command::Table {
            kinds,
            n_min,
            n_max,
            mode,
            enumerate_max,
            csv,
            emit,
            budget,
        } => {
            let emit = if csv { Emit::Csv } else { emit };
            table(&kinds, n_min, n_max, mode, enumerate_max, emit, budget.duration()?)
        }
        Command::Verify {
            suite,
            kind,
            n,
            n_max,
            emit,
            budget,
        } => verify_cmd(&suite, &kind, n, n_max, emit, budget.duration()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<CheckFailed>() => ExitCode::from(1),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_lists() {
        let all = parse_kind_list("all", &SemigroupKind::TARGETS).unwrap();
        assert_eq!(all, SemigroupKind::TARGETS.to_vec());
        let two = parse_kind_list("op, pori", &SemigroupKind::TARGETS).unwrap();
        assert_eq!(two, vec![SemigroupKind::OP, SemigroupKind::PORI]);
        assert!(parse_kind_list("op,nope", &SemigroupKind::TARGETS).unwrap_err().is::<Usage>());
    }

    #[test]
    fn argument_errors_are_usage() {
        assert!(lib(Error::Domain("n".into())).is::<Usage>());
    }

    #[test]
    fn budget_rejects_negative() {
        assert!(Budget { budget: -1.0 }.duration().is_err());
        assert_eq!(Budget { budget: 1.5 }.duration().unwrap(), Duration::from_millis(1500));
    }

    #[test]
    fn cli_definition_is_valid() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
