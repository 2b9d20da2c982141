//! `credal`: load JSON documents, run one library operation, print a JSON
//! report on stdout and a short summary on stderr.
//!
//! Exit codes: 0 success, 1 failed reproduce assertions, 2 unreadable or
//! malformed input, 3 violated mathematical precondition.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use credal_core::coherence::check_partial_measure;
use credal_core::coherence::tarski::MAX_TUPLE_LEN;
use credal_core::dominance::DEFAULT_PROJECTION_TOL;
use credal_core::families::EXPERIMENT_TRUNCATION;
use credal_core::inaccuracy::{score, score_countable, DEFAULT_SERIES_TERMS, DEFAULT_SERIES_TOL};
use credal_core::io::{self, DocError, NumberFormat, SpaceRef};
use credal_core::{
    check_countable_coherence, compare, find_dominator, project_coherent, reproduce_example, sampled_atoms,
    stability_report, CoherenceOptions, CredalError, Credence, DominanceOptions, InaccuracyMeasure, NumericMode,
    OpinionSpace, ReproduceOptions, SeriesPolicy,
};

#[derive(Parser)]
#[command(name = "credal", version, about = "Coherence and accuracy dominance for credence functions")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Tolerance: coherence epsilon, projection gap or series tail bound, by verb.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Truncation for countable families (overrides the space document).
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Seed for randomized searches; the CREDAL_SEED variable takes precedence.
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Arithmetic for finite computations and number output.
    #[arg(long, global = true, value_enum, default_value = "float")]
    mode: Mode,
    /// Worker threads for batch experiments.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Also write the per-atom (or per-assertion) table as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Maximum number of series terms summed on countable spaces.
    #[arg(long, global = true)]
    series_terms: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Float,
    Rational,
}

#[derive(Subcommand)]
enum Verb {
    /// Decide (countable) coherence.
    Coherence {
        /// Credence document.
        #[arg(short, value_name = "CREDENCE")]
        c: PathBuf,
        /// Space document; defaults to the one the credence names.
        #[arg(short, value_name = "SPACE")]
        s: Option<PathBuf>,
        /// Also run the partial-measure oracle (explicit spaces).
        #[arg(long)]
        tarski: bool,
    },
    /// Inaccuracy at every atom.
    Score {
        /// Credence document.
        #[arg(short, value_name = "CREDENCE")]
        c: PathBuf,
        /// Space document; defaults to the one the credence names.
        #[arg(short, value_name = "SPACE")]
        s: Option<PathBuf>,
        /// Inaccuracy measure document.
        #[arg(short, value_name = "MEASURE")]
        m: PathBuf,
    },
    /// Project onto the coherent credences and verify the Pythagorean inequality.
    Project {
        /// Credence document.
        #[arg(short, value_name = "CREDENCE")]
        c: PathBuf,
        /// Space document; defaults to the one the credence names.
        #[arg(short, value_name = "SPACE")]
        s: Option<PathBuf>,
        /// Inaccuracy measure document.
        #[arg(short, value_name = "MEASURE")]
        m: PathBuf,
    },
    /// Compare two credences, or construct a dominator with --repair.
    Dominance {
        /// Credence document.
        #[arg(short, value_name = "CREDENCE")]
        c: PathBuf,
        /// Credence compared against `-c`; it is read on the same space.
        #[arg(short, value_name = "CREDENCE")]
        d: Option<PathBuf>,
        /// Space document; defaults to the one the credence names.
        #[arg(short, value_name = "SPACE")]
        s: Option<PathBuf>,
        /// Inaccuracy measure document.
        #[arg(short, value_name = "MEASURE")]
        m: PathBuf,
        /// Construct a coherent dominator of `-c` instead of comparing.
        #[arg(long)]
        repair: bool,
    },
    /// Compactness verdict and the compactified space.
    Compactify {
        /// Space document.
        #[arg(short, value_name = "SPACE")]
        s: PathBuf,
        /// Length of signed sequences searched for a compactness witness.
        #[arg(long, default_value_t = 16)]
        depth: usize,
    },
    /// Atoms of the (truncated) quotient and its valuation matrix.
    Quotient {
        /// Space document.
        #[arg(short, value_name = "SPACE")]
        s: PathBuf,
    },
    /// Stability facts and falsification search.
    Stability {
        /// Space document.
        #[arg(short, value_name = "SPACE")]
        s: PathBuf,
        /// Inaccuracy measure document.
        #[arg(short, value_name = "MEASURE")]
        m: PathBuf,
        /// Candidate pairs tried by the falsification search.
        #[arg(long, default_value_t = 1000)]
        budget: usize,
    },
    /// Run a named experiment: tails-inv-sqrt (ex4.1), initial-segments-zero
    /// (ex4.2), walsh, partition-bound (partition_theorem).
    Reproduce {
        id: String,
        /// Random instances for sampled experiments.
        #[arg(long)]
        samples: Option<usize>,
        /// Candidate evaluations per credence in adversarial searches.
        #[arg(long)]
        budget: Option<usize>,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("invalid seed `{s}`: {e}"))
}

enum Failure {
    Parse(String),
    Precondition(CredalError),
    Assertions,
}

impl From<CredalError> for Failure {
    fn from(e: CredalError) -> Self {
        Failure::Precondition(e)
    }
}

type Outcome = Result<Json, Failure>;

struct Ctx {
    common: Common,
    fmt: NumberFormat,
    seed: u64,
}

impl Ctx {
    fn mode(&self) -> NumericMode {
        self.fmt.mode
    }

    fn policy(&self) -> SeriesPolicy {
        SeriesPolicy {
            truncation: self.common.series_terms.unwrap_or(DEFAULT_SERIES_TERMS),
            tol: self.common.tol.unwrap_or(DEFAULT_SERIES_TOL),
        }
    }

    fn coherence_opts(&self) -> CoherenceOptions {
        let mut o = CoherenceOptions { mode: self.mode(), ..Default::default() };
        if let Some(t) = self.common.tol {
            o.eps_coh = t;
        }
        o
    }

    fn dominance_opts(&self) -> DominanceOptions {
        DominanceOptions {
            mode: self.mode(),
            tol: self.common.tol.unwrap_or(DEFAULT_PROJECTION_TOL),
            series: SeriesPolicy { tol: DEFAULT_SERIES_TOL, ..self.policy() },
            ..Default::default()
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn doc_err(path: &Path, e: DocError) -> Failure {
    match e {
        DocError::Parse { location, message } => Failure::Parse(format!("{}: {location}: {message}", path.display())),
        DocError::Invalid(e) => Failure::Precondition(e),
    }
}

fn load_space_file(path: &Path, ctx: &Ctx) -> Result<OpinionSpace, Failure> {
    let space = io::parse_space(&read(path)?).map_err(|e| doc_err(path, e))?;
    apply_truncation(space, ctx)
}

fn apply_truncation(space: OpinionSpace, ctx: &Ctx) -> Result<OpinionSpace, Failure> {
    match ctx.common.truncation {
        Some(k) if space.is_symbolic() => Ok(space.with_truncation(k)?),
        _ => Ok(space),
    }
}

/// A credence and its space: `-s` wins, then the document's own reference.
fn load_credence(c: &Path, s: Option<&Path>, ctx: &Ctx) -> Result<(Credence, OpinionSpace), Failure> {
    let doc = io::parse_credence(&read(c)?).map_err(|e| doc_err(c, e))?;
    let space = match (s, doc.space) {
        (Some(p), _) => load_space_file(p, ctx)?,
        (None, Some(SpaceRef::Inline(space))) => apply_truncation(space, ctx)?,
        (None, Some(SpaceRef::Path(p))) => {
            let p = c.parent().unwrap_or(Path::new(".")).join(p);
            load_space_file(&p, ctx)?
        }
        (None, None) => return Err(Failure::Parse(format!("{}: no space given (use -s)", c.display()))),
    };
    Ok((doc.credence, space))
}

fn load_measure(path: &Path) -> Result<InaccuracyMeasure, Failure> {
    io::parse_measure(&read(path)?).map_err(|e| doc_err(path, e))
}

fn write_csv(ctx: &Ctx, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), Failure> {
    let Some(path) = &ctx.common.csv else { return Ok(()) };
    let io_err = |e: csv::Error| Failure::Parse(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(&r).map_err(io_err)?;
    }
    w.flush().map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn cell(v: &Json) -> String {
    match v {
        Json::String(s) => s.clone(),
        Json::Null => String::new(),
        Json::Object(o) if o.contains_key("inf") => "inf".into(),
        Json::Object(o) => o.get("value").or_else(|| o.get("partial")).map_or(String::new(), cell),
        other => other.to_string(),
    }
}

fn per_atom_csv(ctx: &Ctx, report: &Json, cols: &[&str]) -> Result<(), Failure> {
    let rows = report["per_atom"]
        .as_array()
        .map(|a| a.iter().map(|r| cols.iter().map(|c| cell(&r[*c])).collect()).collect())
        .unwrap_or_default();
    write_csv(ctx, cols, rows)
}

fn coherence(c: &Path, s: Option<&Path>, tarski: bool, ctx: &Ctx) -> Outcome {
    let (cred, space) = load_credence(c, s, ctx)?;
    let v = check_countable_coherence(&cred, &space, &ctx.coherence_opts())?;
    let mut report = io::coherence_to_json(&v, &ctx.fmt);
    if tarski {
        let n = space.prop_count().unwrap_or(0);
        let len = (n + 1).min(MAX_TUPLE_LEN);
        let violations = check_partial_measure(&cred, &space, len)?;
        report["tarski"] = json!({
            "max_tuple_len": len,
            "violations": violations.len(),
            "first": violations.first().map(|v| json!({ "phis": v.phis, "psis": v.psis })),
        });
    }
    eprintln!("coherence: {:?}", v.status);
    Ok(report)
}

fn score_verb(c: &Path, s: Option<&Path>, m: &Path, ctx: &Ctx) -> Outcome {
    let (cred, space) = load_credence(c, s, ctx)?;
    let measure = load_measure(m)?;
    let mut per_atom = Vec::new();
    if space.is_symbolic() && space.prop_count().is_none() {
        let policy = ctx.policy();
        for a in sampled_atoms(&space, space.truncation_default())? {
            let v = score_countable(&cred, &measure, &a, &space, &policy)?;
            per_atom.push(json!({
                "atom": a.id,
                "world": a.representative.as_ref().map_or(Json::Null, io::world_to_json),
                "score": ctx.fmt.series(&v),
                "tag": v.tag,
                "terms_used": v.terms_used,
            }));
        }
    } else {
        let k = space.prop_count().unwrap_or(1);
        let (atoms, _) = space.build_quotient(k.max(1))?;
        let exact = ctx.mode() == NumericMode::Rational && measure.generator.is_exact();
        for a in &atoms {
            let value = if exact {
                let n = a.signature.len();
                let vals = cred.exact_values(n).filter(|_| cred.len().map_or(true, |l| l == n));
                let Some(vals) = vals else {
                    return Err(CredalError::InvalidArgument("credence length does not match the space".into()).into());
                };
                let w = measure.weights.take_exact(n)?;
                let r = measure.score_signature_exact(&vals, &w, &a.signature).expect("exact generator");
                json!({ "value": ctx.fmt.rational(&r) })
            } else {
                ctx.fmt.ext(score(&cred, &measure, a, &space)?)
            };
            per_atom.push(json!({
                "atom": a.id,
                "world": a.representative.as_ref().map_or(Json::Null, io::world_to_json),
                "score": value,
            }));
        }
    }
    eprintln!("score: {} atoms", per_atom.len());
    let report = json!({ "measure": measure.name, "per_atom": per_atom });
    per_atom_csv(ctx, &report, &["atom", "world", "score"])?;
    Ok(report)
}

fn project(c: &Path, s: Option<&Path>, m: &Path, ctx: &Ctx) -> Outcome {
    let (cred, space) = load_credence(c, s, ctx)?;
    let measure = load_measure(m)?;
    let pr = project_coherent(&cred, &measure, &space, &ctx.dominance_opts())?;
    let report = io::projection_to_json(&pr, &ctx.fmt);
    eprintln!(
        "project: gap {} ({}, {} iterations), worst Pythagorean slack {}",
        pr.gap, pr.method, pr.iterations, pr.pythagorean.worst_slack
    );
    let rows = report["pythagorean"]["per_atom"]
        .as_array()
        .map(|a| a.iter().map(|r| ["atom", "lhs", "rhs", "slack"].iter().map(|c| cell(&r[*c])).collect()).collect())
        .unwrap_or_default();
    write_csv(ctx, &["atom", "lhs", "rhs", "slack"], rows)?;
    Ok(report)
}

fn dominance(c: &Path, d: Option<&Path>, s: Option<&Path>, m: &Path, repair: bool, ctx: &Ctx) -> Outcome {
    let (cred, space) = load_credence(c, s, ctx)?;
    let measure = load_measure(m)?;
    let opts = ctx.dominance_opts();
    let report = if repair {
        let r = find_dominator(&cred, &measure, &space, &opts)?;
        let mut report = io::dominance_to_json(&r.verdict, &ctx.fmt);
        report["case"] = json!(r.case);
        report["dominator"] = io::credence_to_json(&r.dominator, &ctx.fmt)["values"].clone();
        if let Some(pr) = &r.projection {
            report["pi_c"] = io::credence_to_json(&pr.pi, &ctx.fmt)["values"].clone();
            report["gap"] = ctx.fmt.value(&pr.gap);
            report["pythagorean_worst_slack"] = ctx.fmt.float(pr.pythagorean.worst_slack);
            report["projection"] = io::projection_to_json(pr, &ctx.fmt);
        }
        eprintln!("dominance --repair: {:?} via {:?}", r.verdict.relation, r.case);
        report
    } else {
        let Some(d) = d else {
            return Err(Failure::Parse("dominance needs -d <credence> unless --repair is given".into()));
        };
        // the second credence is read on the first one's space
        let other = io::parse_credence(&read(d)?).map_err(|e| doc_err(d, e))?.credence;
        let v = compare(&cred, &other, &measure, &space, &opts)?;
        eprintln!("dominance: d {:?} c", v.relation);
        io::dominance_to_json(&v, &ctx.fmt)
    };
    per_atom_csv(ctx, &report, &["atom", "world", "score_c", "score_d", "comparison"])?;
    Ok(report)
}

fn compactify(s: &Path, depth: usize, ctx: &Ctx) -> Outcome {
    let space = load_space_file(s, ctx)?;
    let report = space.search_compactness_witness(depth)?;
    let comp = space.compactify()?;
    eprintln!("compactify: {:?}, {} added point(s)", report.verdict, comp.added_points.len());
    Ok(json!({
        "compactness": report,
        "structure": space.analyze_structure(),
        "added_points": comp.added_points,
        "space": io::space_to_json(&comp.space),
    }))
}

fn quotient(s: &Path, ctx: &Ctx) -> Outcome {
    let space = load_space_file(s, ctx)?;
    let k = if space.is_symbolic() { space.truncation_default() } else { 1 };
    let (atoms, matrix) = space.build_quotient(k)?;
    let rows: Vec<Vec<String>> = atoms
        .iter()
        .map(|a| {
            let sig: String = a.signature.iter().map(|b| if *b { '1' } else { '0' }).collect();
            vec![a.id.to_string(), a.representative.as_ref().map_or(String::new(), |w| w.to_string()), sig]
        })
        .collect();
    write_csv(ctx, &["atom", "world", "signature"], rows)?;
    eprintln!("quotient: {} atoms over {} propositions", matrix.n_atoms(), matrix.n_props());
    Ok(json!({
        "truncation": space.is_symbolic().then_some(k),
        "atoms": atoms.iter().map(|a| json!({
            "id": a.id,
            "world": a.representative.as_ref().map_or(Json::Null, io::world_to_json),
            "signature": a.signature.iter().map(|b| u8::from(*b)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    }))
}

fn stability(s: &Path, m: &Path, budget: usize, ctx: &Ctx) -> Outcome {
    let space = load_space_file(s, ctx)?;
    let measure = load_measure(m)?;
    let facts = stability_report(&space, &measure, budget, ctx.seed)?;
    for f in &facts {
        eprintln!("stability: {:?} {:?} ({})", f.property, f.status, f.source.as_deref().unwrap_or("search"));
    }
    Ok(json!({ "facts": io::stability_to_json(&facts, &ctx.fmt) }))
}

fn reproduce(id: &str, samples: Option<usize>, budget: Option<usize>, ctx: &Ctx) -> Outcome {
    let defaults = ReproduceOptions::default();
    let opts = ReproduceOptions {
        seed: ctx.seed,
        truncation: ctx.common.truncation.unwrap_or(EXPERIMENT_TRUNCATION),
        samples,
        budget: budget.unwrap_or(defaults.budget),
        jobs: ctx.common.jobs,
    };
    let report = reproduce_example(id, &opts)?;
    for a in &report.assertions {
        eprintln!("{} {}: {}", if a.pass { "PASS" } else { "FAIL" }, a.name, a.details);
    }
    let rows = report.assertions.iter().map(|a| vec![a.name.clone(), a.pass.to_string(), a.details.clone()]).collect();
    write_csv(ctx, &["name", "pass", "details"], rows)?;
    let json = serde_json::to_value(&report).expect("serializable report");
    if report.all_assertions_pass {
        Ok(json)
    } else {
        emit(&json);
        Err(Failure::Assertions)
    }
}

fn run(cli: Cli) -> Outcome {
    let seed = match std::env::var("CREDAL_SEED") {
        Ok(v) => parse_seed(&v).map_err(|e| Failure::Parse(format!("CREDAL_SEED: {e}")))?,
        Err(_) => cli.common.seed.unwrap_or(credal_core::families::EXPERIMENT_SEED),
    };
    let fmt = NumberFormat::new(match cli.common.mode {
        Mode::Float => NumericMode::Float,
        Mode::Rational => NumericMode::Rational,
    });
    let ctx = Ctx { common: cli.common, fmt, seed };
    match &cli.verb {
        Verb::Coherence { c, s, tarski } => coherence(c, s.as_deref(), *tarski, &ctx),
        Verb::Score { c, s, m } => score_verb(c, s.as_deref(), m, &ctx),
        Verb::Project { c, s, m } => project(c, s.as_deref(), m, &ctx),
        Verb::Dominance { c, d, s, m, repair } => dominance(c, d.as_deref(), s.as_deref(), m, *repair, &ctx),
        Verb::Compactify { s, depth } => compactify(s, *depth, &ctx),
        Verb::Quotient { s } => quotient(s, &ctx),
        Verb::Stability { s, m, budget } => stability(s, m, *budget, &ctx),
        Verb::Reproduce { id, samples, budget } => reproduce(id, *samples, *budget, &ctx),
    }
}

/// Pretty JSON on stdout; a closed pipe is not an error.
fn emit(report: &Json) {
    let mut out = std::io::stdout().lock();
    if serde_json::to_writer_pretty(&mut out, report).is_ok() {
        let _ = writeln!(out);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            emit(&report);
            ExitCode::SUCCESS
        }
        Err(Failure::Assertions) => ExitCode::from(1),
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Precondition(e)) => {
            emit(&json!({ "error": e.name(), "message": e.to_string() }));
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::from(3)
        }
    }
}
