use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;

use quadtuple::construct::{
    construct_quadruple_with, verify_quadruple, ConstructError, ConstructOptions,
    ConstructionTrace, FactorizationChoice, Quadruple, QuadrupleDoc, TargetN, VerificationReport,
    DEFAULT_RETRY_BUDGET,
};
use quadtuple::counterex::{
    build_reports, enumerate_counterexample_rings, write_jsonl, CounterexError,
    CounterexampleReport, ReportDoc, ReportOptions, DEFAULT_T_CAP,
};
use quadtuple::pellsolve::{solve_norm_eq, PellError};
use quadtuple::quadring::{Factorizer, RingOptions};
use quadtuple::repr::{
    certify_nonrepresentable, classify_n, search_repr_with, NClass, NonRepCertificate,
    SearchOptions, DEFAULT_SEARCH_BOUND,
};
use quadtuple::{QuadInt, RingCtx, RingError};

const EXIT_FOUND: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_RING: u8 = 4;
const EXIT_HYPOTHESIS: u8 = 5;
const EXIT_BUDGET: u8 = 6;

#[derive(Parser)]
#[command(name = "quadtuple", version, about = "D(n) quadruples in Z[√d]")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Accept radicands that are not square-free.
    #[arg(long, global = true)]
    allow_nonsquarefree: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve x² − d·y² = N.
    Pell(PellArgs),
    /// Build a D(4m+2 + 4k√d) quadruple.
    Construct(ConstructArgs),
    /// Check a quadruple pair by pair.
    Verify(VerifyArgs),
    /// Certify or search whether n is a difference of two squares.
    Checkrepr(CheckreprArgs),
    /// Counterexample reports over the d(α) family.
    Counterexamples(CounterexArgs),
}

#[derive(Args)]
struct PellArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: BigInt,
    #[arg(long, allow_hyphen_values = true)]
    norm: BigInt,
    #[arg(long, default_value_t = 5)]
    limit: usize,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: BigInt,
    #[arg(long, allow_hyphen_values = true)]
    m: BigInt,
    #[arg(long, allow_hyphen_values = true)]
    k: BigInt,
    #[arg(long, default_value_t = 0)]
    unit_index: u32,
    #[arg(long, default_value = "first")]
    factorization: FactorizationChoice,
    #[arg(long, default_value_t = DEFAULT_RETRY_BUDGET)]
    retry_budget: u32,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: BigInt,
    #[arg(long, allow_hyphen_values = true)]
    n: QuadInt,
    /// Four elements `a,b`.
    #[arg(long, num_args = 4, required = true, allow_hyphen_values = true)]
    elements: Vec<QuadInt>,
    /// Six witnesses in pair order 12 13 14 23 24 34.
    #[arg(long, num_args = 6, allow_hyphen_values = true)]
    witnesses: Option<Vec<QuadInt>>,
}

#[derive(Args)]
struct CheckreprArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: BigInt,
    #[arg(long, allow_hyphen_values = true)]
    n: QuadInt,
    #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND,
          value_parser = clap::value_parser!(u64).range(1..))]
    bound: u64,
    /// Skip y₁ + y₂ even when n ≡ 2 (mod 4).
    #[arg(long)]
    parity_pruning: bool,
}

#[derive(Args)]
struct CounterexArgs {
    /// Inclusive range `lo..hi`.
    #[arg(long, value_parser = parse_alpha_range, allow_hyphen_values = true)]
    alpha: (i64, i64),
    #[arg(long, default_value_t = 0)]
    t: u64,
    #[arg(long, default_value_t = DEFAULT_T_CAP)]
    t_cap: u64,
    /// Write the JSON-lines archive here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_alpha_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
    let lo: i64 = lo.parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: i64 = hi.parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<RingError> for Failure {
    fn from(e: RingError) -> Self {
        let code = match e {
            RingError::NotSquareFree(_) => EXIT_RING,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<PellError> for Failure {
    fn from(e: PellError) -> Self {
        let code = match &e {
            PellError::NormCapExceeded { .. } | PellError::ScanCapExceeded { .. } => EXIT_BUDGET,
            PellError::Hypothesis(_) => EXIT_HYPOTHESIS,
            PellError::SquareRadicand(_) | PellError::ZeroNorm => EXIT_USAGE,
            _ => EXIT_FOUND,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ConstructError> for Failure {
    fn from(e: ConstructError) -> Self {
        let code = match &e {
            ConstructError::OddMPlusK { .. } | ConstructError::Hypothesis(_) => EXIT_HYPOTHESIS,
            ConstructError::RetryBudgetExhausted { .. } => EXIT_BUDGET,
            ConstructError::Pell(p) => return Failure::from(p.clone()),
            ConstructError::Ring(r) => return Failure::from(r.clone()),
            _ => EXIT_FOUND,
        };
        Failure::new(code, e.to_string())
    }
}

/// What a command produced: a JSON document, its text rendering, and the
/// exit code.
struct Outcome {
    json: String,
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = ring_options(cli.allow_nonsquarefree).and_then(|opts| match &cli.command {
        Command::Pell(a) => cmd_pell(a, &opts),
        Command::Construct(a) => cmd_construct(a, &opts),
        Command::Verify(a) => cmd_verify(a, &opts),
        Command::Checkrepr(a) => cmd_checkrepr(a, &opts),
        Command::Counterexamples(a) => cmd_counterexamples(a),
    });
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match result {
        Ok(o) => {
            match cli.format {
                Format::Json => writeln!(out, "{}", o.json),
                Format::Text => write!(out, "{}", o.text),
            }
            .expect("stdout");
            o.code
        }
        Err(f) => {
            if cli.format == Format::Json {
                let doc = serde_json::json!({ "error": f.message, "exit_code": f.code });
                writeln!(out, "{doc}").expect("stdout");
            }
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    ExitCode::from(code)
}

fn ring_options(allow_non_square_free: bool) -> Result<RingOptions, Failure> {
    let factorizer = Factorizer::from_env().map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    Ok(RingOptions {
        allow_non_square_free,
        factorizer,
    })
}

fn ring(d: &BigInt, opts: &RingOptions) -> Result<RingCtx, Failure> {
    RingCtx::with_options(d.clone(), *opts).map_err(|e| match e {
        RingError::NotSquareFree(_) => Failure::new(
            EXIT_RING,
            format!("{e} (pass --allow-nonsquarefree to accept it)"),
        ),
        other => other.into(),
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

#[derive(Serialize)]
struct PellDoc {
    d: String,
    norm: String,
    fundamental_unit: QuadInt,
    solvable: bool,
    representatives: Vec<QuadInt>,
    solutions: Vec<QuadInt>,
}

fn cmd_pell(a: &PellArgs, opts: &RingOptions) -> Result<Outcome, Failure> {
    let ctx = ring(&a.d, opts)?;
    let classes = solve_norm_eq(&ctx, &a.norm)?;
    let doc = PellDoc {
        d: a.d.to_string(),
        norm: a.norm.to_string(),
        fundamental_unit: ctx.fundamental_unit().as_quad(),
        solvable: classes.is_solvable(),
        representatives: classes.representatives.clone(),
        solutions: classes.enumerate(a.limit),
    };
    let mut text = format!(
        "d = {}, N = {}\nfundamental unit: {}\n",
        doc.d, doc.norm, doc.fundamental_unit
    );
    if doc.solvable {
        text += &format!("representatives: {}\n", join(&doc.representatives));
        text += &format!(
            "first {} solutions: {}\n",
            doc.solutions.len(),
            join(&doc.solutions)
        );
    } else {
        text += "no solutions\n";
    }
    let code = if doc.solvable { 0 } else { EXIT_INCONCLUSIVE };
    Ok(Outcome {
        json: to_json(&doc),
        text,
        code,
    })
}

fn join(xs: &[QuadInt]) -> String {
    xs.iter()
        .map(|x| format!("({x})"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct ConstructDoc {
    #[serde(flatten)]
    quadruple: QuadrupleDoc,
    trace: ConstructionTrace,
    verified: bool,
}

fn cmd_construct(a: &ConstructArgs, opts: &RingOptions) -> Result<Outcome, Failure> {
    let ctx = ring(&a.d, opts)?;
    let target = TargetN::new(a.m.clone(), a.k.clone());
    let copts = ConstructOptions {
        retry_budget: a.retry_budget,
    };
    let (quad, trace) =
        construct_quadruple_with(&ctx, &target, a.unit_index, a.factorization, &copts)?;
    let report = verify_quadruple(&ctx, &quad);
    if !report.all_pass || !report.witnesses_agree_with_oracle() {
        return Err(Failure::new(
            EXIT_FOUND,
            "constructed quadruple failed verification",
        ));
    }
    let doc = ConstructDoc {
        quadruple: quad.to_document(&ctx),
        trace,
        verified: true,
    };
    let mut text = format!("D({}) quadruple in Z[√{}]:\n", quad.n, a.d);
    for e in &quad.elements {
        text += &format!("  {e}\n");
    }
    text += &pair_table(&report);
    Ok(Outcome {
        json: to_json(&doc),
        text,
        code: 0,
    })
}

fn pair_table(report: &VerificationReport) -> String {
    let mut text = String::new();
    for p in &report.pairs {
        let root = p
            .oracle_root
            .as_ref()
            .map_or_else(|| "-".to_string(), |r| format!("({r})²"));
        text += &format!(
            "  {}: {} = {}  {}\n",
            p.pair,
            p.value,
            root,
            if p.pass { "ok" } else { "FAIL" }
        );
    }
    if !report.nonzero_distinct {
        text += "  elements are not nonzero and distinct\n";
    }
    text
}

#[derive(Serialize)]
struct VerifyDoc {
    d: String,
    n: QuadInt,
    #[serde(flatten)]
    report: VerificationReport,
}

fn cmd_verify(a: &VerifyArgs, opts: &RingOptions) -> Result<Outcome, Failure> {
    let ctx = ring(&a.d, opts)?;
    let elements: [QuadInt; 4] = a.elements.clone().try_into().expect("clap enforces 4");
    let mut witnesses: [Option<QuadInt>; 6] = Default::default();
    if let Some(ws) = &a.witnesses {
        for (slot, w) in witnesses.iter_mut().zip(ws) {
            *slot = Some(w.clone());
        }
    }
    let quad = Quadruple {
        elements,
        n: a.n.clone(),
        witnesses,
    };
    let report = verify_quadruple(&ctx, &quad);
    let code = if report.all_pass { 0 } else { EXIT_FOUND };
    let text = format!(
        "{}{}\n",
        pair_table(&report),
        if report.all_pass {
            "all pairs pass"
        } else {
            "verification failed"
        }
    );
    let doc = VerifyDoc {
        d: a.d.to_string(),
        n: a.n.clone(),
        report,
    };
    Ok(Outcome {
        json: to_json(&doc),
        text,
        code,
    })
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum ReprOutcome {
    Certified,
    Found,
    NoneWithinBound,
    OutOfOracleRange,
}

#[derive(Serialize)]
struct CheckreprDoc {
    d: String,
    n: QuadInt,
    class: NClass,
    outcome: ReprOutcome,
    certificate: Option<NonRepCertificate>,
    pair: Option<(QuadInt, QuadInt)>,
    bound: Option<String>,
}

fn cmd_checkrepr(a: &CheckreprArgs, opts: &RingOptions) -> Result<Outcome, Failure> {
    let ctx = ring(&a.d, opts)?;
    let mut doc = CheckreprDoc {
        d: a.d.to_string(),
        n: a.n.clone(),
        class: classify_n(&a.n),
        outcome: ReprOutcome::Certified,
        certificate: None,
        pair: None,
        bound: None,
    };
    let (text, code) = if let Some(cert) = certify_nonrepresentable(&ctx, &a.n) {
        let text = format!(
            "certified: {} = 2·({}) with Nm({}) = 1 is not a difference of two squares\n",
            a.n, cert.u, cert.u
        );
        doc.certificate = Some(cert);
        (text, 0)
    } else {
        doc.bound = Some(a.bound.to_string());
        let sopts = SearchOptions {
            bound: a.bound,
            parity_pruning: a.parity_pruning,
        };
        match search_repr_with(&ctx, &a.n, &sopts) {
            Ok(Some((p, q))) => {
                let text = format!("found: ({}) = ({p})² − ({q})²\n", a.n);
                doc.outcome = ReprOutcome::Found;
                doc.pair = Some((p, q));
                (text, EXIT_FOUND)
            }
            Ok(None) => {
                doc.outcome = ReprOutcome::NoneWithinBound;
                ("none within bound\n".to_string(), EXIT_INCONCLUSIVE)
            }
            Err(e) => {
                doc.outcome = ReprOutcome::OutOfOracleRange;
                (format!("inconclusive: {e}\n"), EXIT_INCONCLUSIVE)
            }
        }
    };
    Ok(Outcome {
        json: to_json(&doc),
        text,
        code,
    })
}

#[derive(Serialize)]
struct Summary {
    eligible: usize,
    ineligible: usize,
    verified: usize,
}

#[derive(Serialize)]
struct Ineligible {
    alpha: i64,
    d: String,
}

#[derive(Serialize)]
struct StageFailure {
    alpha: i64,
    d: String,
    error: String,
}

#[derive(Serialize)]
struct CounterexDoc {
    reports: Vec<ReportDoc>,
    ineligible: Vec<Ineligible>,
    failures: Vec<StageFailure>,
    summary: Summary,
}

fn cmd_counterexamples(a: &CounterexArgs) -> Result<Outcome, Failure> {
    let (lo, hi) = a.alpha;
    let candidates = enumerate_counterexample_rings(lo, hi)
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    let t = i64::try_from(a.t).map_err(|_| Failure::new(EXIT_USAGE, "t out of range"))?;
    if a.t > a.t_cap {
        let e = CounterexError::TCapExceeded {
            t: a.t,
            cap: a.t_cap,
        };
        return Err(Failure::new(EXIT_BUDGET, e.to_string()));
    }
    let built = build_reports(&candidates, t, &ReportOptions { t_cap: a.t_cap });

    let mut reports: Vec<CounterexampleReport> = Vec::new();
    let mut ineligible = Vec::new();
    let mut failures = Vec::new();
    let mut text = String::new();
    for (c, r) in candidates.iter().zip(built) {
        match r {
            None => {
                text += &format!(
                    "alpha {:>4}  d = {}  ineligible (not square-free)\n",
                    c.alpha, c.d
                );
                ineligible.push(Ineligible {
                    alpha: c.alpha,
                    d: c.d.to_string(),
                });
            }
            Some(Ok(rep)) => {
                text += &format!(
                    "alpha {:>4}  d = {}  n = {}  {}\n",
                    c.alpha,
                    c.d,
                    rep.n,
                    if rep.verified {
                        "verified"
                    } else {
                        "NOT verified"
                    }
                );
                reports.push(rep);
            }
            Some(Err(e)) => {
                text += &format!("alpha {:>4}  d = {}  failed: {e}\n", c.alpha, c.d);
                failures.push(StageFailure {
                    alpha: c.alpha,
                    d: c.d.to_string(),
                    error: e.to_string(),
                });
            }
        }
    }
    let summary = Summary {
        eligible: reports.len() + failures.len(),
        ineligible: ineligible.len(),
        verified: reports.iter().filter(|r| r.verified).count(),
    };
    text += &format!(
        "summary: eligible {}, ineligible {}, verified {}\n",
        summary.eligible, summary.ineligible, summary.verified
    );
    if let Some(path) = &a.out {
        let file = File::create(path)
            .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        write_jsonl(&mut w, &reports)
            .and_then(|_| w.flush())
            .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    }
    let code = if summary.verified == summary.eligible {
        0
    } else {
        EXIT_FOUND
    };
    let doc = CounterexDoc {
        reports: reports.iter().map(|r| r.to_doc()).collect(),
        ineligible,
        failures,
        summary,
    };
    Ok(Outcome {
        json: to_json(&doc),
        text,
        code,
    })
}
