//! The `algturan` command line: argument and config handling, artifact
//! output, and the regression harness.
//!
//! Every subcommand writes into its output directory:
//!
//! * `summary.json`: deterministic results with a `schema_version` field;
//! * `manifest.json`: the resolved config, budget, worker count and timings;
//! * CSV tables and hypergraph witness files where relevant.
//!
//! Config files are TOML. Top-level keys apply to every subcommand, a
//! `[<subcommand>]` table overrides them, a `[budget]` table sets caps, and
//! flags override everything. Keys use the flag names with `_` for `-`.
//!
//! Exit codes: 0 success, 1 failed assertion, 2 usage error, 3 budget exceeded.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::analysis::{dichotomy_scan, exponent_scan, lemma2_calibration, AnalysisError, VanishingInstance};
use crate::construction::{
    derive_params, run_construction, Budget, ConstructionError, ConstructionParams, FSource, Overrides,
};
use crate::field::FieldCtx;
use crate::hypergraph::{count_pattern, Hypergraph, Pattern};
use crate::oracle::{exact_turan_cached, OracleError, TuranCache, TuranInstance, DEFAULT_SLOT_CAP};
use crate::poly::BlockShape;

pub const SCHEMA_VERSION: u32 = 1;
pub const OUT_ENV: &str = "ALGTURAN_OUT";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Assertion(String),
    Budget(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) | CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Assertion(m) => write!(f, "assertion failed: {m}"),
            CliError::Budget(m) => write!(f, "budget exceeded: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        if e.is_budget() {
            return CliError::Budget(e.to_string());
        }
        match e {
            ConstructionError::CertificateFailed(_) => CliError::Assertion(e.to_string()),
            ConstructionError::InvalidSizes(_)
            | ConstructionError::InvalidPattern(_)
            | ConstructionError::GuardViolated(_)
            | ConstructionError::Field(_) => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Construction(c) => c.into(),
            AnalysisError::PreconditionViolated { .. } | AnalysisError::InvalidInstance(_) | AnalysisError::TooFewPoints(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::TooLarge { .. } => CliError::Budget(e.to_string()),
            OracleError::Cache(_) => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Failure(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "algturan", version, about = "Random algebraic constructions and Turán-number experiments")]
pub struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $ALGTURAN_OUT/<command>, else runs/<command>).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; never affects results.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub max_vertices: Option<u64>,
    #[arg(long, global = true)]
    pub max_edge_scan: Option<u64>,
    #[arg(long, global = true)]
    pub max_sequence_scan: Option<u64>,
    #[arg(long, global = true)]
    pub max_basis: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive b, t, s and the default degree.
    Params(FamilyArgs),
    /// Run the deletion construction once.
    Construct(ConstructArgs),
    /// Count copies of a pattern in a hypergraph file.
    Count(CountArgs),
    /// Exact generalized Turán number by branch and bound.
    TuranExact(TuranArgs),
    /// Monte Carlo check of the vanishing probability q^{-|U|}.
    Lemma2Mc(Lemma2Args),
    /// Extension-set size histogram and dichotomy band.
    Dichotomy(DichotomyArgs),
    /// Log-log fit of pattern copies against surviving vertices.
    ExponentScan(ExponentArgs),
    /// Re-run a suite of configs and diff against expected summaries.
    Regress(RegressArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Params(_) => "params",
            Command::Construct(_) => "construct",
            Command::Count(_) => "count",
            Command::TuranExact(_) => "turan-exact",
            Command::Lemma2Mc(_) => "lemma2-mc",
            Command::Dichotomy(_) => "dichotomy",
            Command::ExponentScan(_) => "exponent-scan",
            Command::Regress(_) => "regress",
        }
    }
}

/// Part sizes, pattern, field and threshold options shared by the
/// construction-based subcommands.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilyArgs {
    /// Uniformity; must equal the number of part sizes plus one.
    #[arg(long)]
    pub r: Option<usize>,
    /// Part sizes s_1,...,s_{r-1}, ascending.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Pattern H: edge, K<m>, K<a>,<b>,..., P<v> or a canonical general form.
    #[arg(long)]
    pub pattern: Option<String>,
    /// Field order.
    #[arg(long)]
    pub q: Option<u64>,
    /// Per-block degree bound (default b*s).
    #[arg(long)]
    pub degree: Option<u32>,
    /// Bad-sequence threshold; estimated by a dichotomy scan when absent.
    #[arg(long)]
    pub c: Option<usize>,
    /// Tail size p of the forbidden configuration (default c).
    #[arg(long)]
    pub tail: Option<usize>,
    #[arg(long)]
    pub estimate_q: Option<u64>,
    #[arg(long)]
    pub estimate_samples: Option<usize>,
    #[arg(long)]
    pub estimate_seed: Option<u64>,
    /// Treat failed lemma guards as errors.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub full_fidelity: Option<bool>,
}

impl FamilyArgs {
    pub fn params(&self, default_q: u64) -> Result<ConstructionParams, CliError> {
        let sizes = self.sizes.clone().unwrap_or_else(|| vec![2]);
        let r = sizes.len() + 1;
        if let Some(given) = self.r {
            if given != r {
                return Err(CliError::Usage(format!("--r {given} does not match {} part sizes (r = {r})", sizes.len())));
            }
        }
        let pattern = Pattern::parse(self.pattern.as_deref().unwrap_or("edge"), r)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let q = self.q.unwrap_or(default_q);
        let ctx = FieldCtx::with_order(q).map_err(|e| CliError::Usage(format!("--q {q}: {e}")))?;
        let overrides = Overrides {
            degree: self.degree,
            bad_threshold: self.c,
            tail_size: self.tail,
            estimate_q: self.estimate_q,
            estimate_samples: self.estimate_samples,
            estimate_seed: self.estimate_seed,
            full_fidelity: self.full_fidelity.unwrap_or(false),
        };
        Ok(derive_params(&sizes, &pattern, (ctx.characteristic(), ctx.degree()), &overrides)?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstructArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CountArgs {
    /// Hypergraph file in `r n m` text format.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub pattern: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct TuranArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    /// Forbidden pattern.
    #[arg(long)]
    pub forbid: Option<String>,
    /// Counted pattern (default: edge).
    #[arg(long)]
    pub count: Option<String>,
    #[arg(long)]
    pub slot_cap: Option<usize>,
    /// Directory of cached results.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct Lemma2Args {
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of disjoint r-sets in U.
    #[arg(long)]
    pub sets: Option<usize>,
    /// Largest accepted |z| when the guards hold.
    #[arg(long)]
    pub z_max: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct DichotomyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ExponentArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    /// Field orders to sweep.
    #[arg(long, value_delimiter = ',')]
    pub qs: Option<Vec<u64>>,
    #[arg(long)]
    pub seeds_per_q: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fail unless |slope - target| is at most this.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct RegressArgs {
    #[arg(long)]
    pub suite: Option<PathBuf>,
}

/// What a subcommand produced, before it is written to disk.
#[derive(Debug, Default)]
pub struct Outcome {
    pub summary: Map<String, Value>,
    pub tables: Vec<(String, String)>,
    pub files: Vec<(String, String)>,
    pub message: String,
    /// Per-stage wall clock, recorded in the manifest only.
    pub timings: Vec<(String, f64)>,
    /// Set when the run completed but an assertion failed.
    pub failure: Option<String>,
}

fn summary_of<T: Serialize>(command: &str, value: &T) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    if let Value::Object(fields) = serde_json::to_value(value).expect("serializable summary") {
        m.extend(fields);
    }
    m
}

fn csv_table<T: Serialize>(rows: impl IntoIterator<Item = T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("csv row");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8 csv")
}

fn strip_nulls(v: Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(m.into_iter().filter(|(_, v)| !v.is_null()).map(|(k, v)| (k, strip_nulls(v))).collect()),
        other => other,
    }
}

fn overlay(base: &mut Map<String, Value>, top: &Value) {
    if let Value::Object(m) = top {
        for (k, v) in m {
            if !v.is_null() {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

/// Parsed TOML config as JSON.
pub fn load_config(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let value: toml::Value = toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::to_value(value).map_err(|e| CliError::Usage(e.to_string()))
}

/// Merges top-level config scalars, the `[command]` table and the flags.
pub fn merge_args<T: Serialize + DeserializeOwned>(config: Option<&Value>, command: &str, flags: &T) -> Result<T, CliError> {
    let mut merged = Map::new();
    if let Some(Value::Object(cfg)) = config {
        for (k, v) in cfg {
            if !v.is_object() {
                merged.insert(k.clone(), v.clone());
            }
        }
        if let Some(section) = cfg.get(command) {
            overlay(&mut merged, section);
        }
    }
    let flags = strip_nulls(serde_json::to_value(flags).expect("serializable args"));
    overlay(&mut merged, &flags);
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(format!("config for `{command}`: {e}")))
}

/// Budget from the `[budget]` config table and the cap flags.
pub fn merge_budget(config: Option<&Value>, cli: &Cli) -> Result<Budget, CliError> {
    let mut budget = match config.and_then(|c| c.get("budget")) {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| CliError::Usage(format!("[budget]: {e}")))?,
        None => Budget::default(),
    };
    if let Some(v) = cli.max_vertices {
        budget.max_vertices = v;
    }
    if let Some(v) = cli.max_edge_scan {
        budget.max_edge_scan = v as u128;
    }
    if let Some(v) = cli.max_sequence_scan {
        budget.max_sequence_scan = v as u128;
    }
    if let Some(v) = cli.max_basis {
        budget.max_basis = v as u128;
    }
    Ok(budget)
}

pub fn run_params(args: &FamilyArgs) -> Result<Outcome, CliError> {
    let p = args.params(49)?;
    let mut message = format!("b={} t={} s={} degree={} (default {})", p.b, p.t, p.s, p.degree, p.b * p.s);
    for w in &p.warnings {
        message.push_str(&format!("\nwarning: {w}"));
    }
    Ok(Outcome { summary: summary_of("params", &p), message, ..Default::default() })
}

pub fn run_construct(args: &ConstructArgs, budget: &Budget) -> Result<Outcome, CliError> {
    let params = args.family.params(5)?;
    let seed = args.seed.unwrap_or(0);
    let res = run_construction(&params, seed, budget, &FSource::Random)?;
    let s = &res.summary;
    let message = format!(
        "q={} N={} edges={} bad={} removed={} N'={} edges'={} copies={} c={} ({}) certificate={}",
        s.q,
        s.vertices,
        s.edges,
        s.bad_sequences,
        s.removed_vertices,
        s.vertices_after,
        s.edges_after,
        s.copies.unordered_copies,
        s.bad_threshold,
        s.threshold.mode(),
        s.certificate
    );
    #[derive(Serialize)]
    struct BadRow {
        sequence: String,
        size: usize,
        removed: u32,
    }
    let bad = res.report.bad.iter().map(|(seq, w)| BadRow {
        sequence: seq.groups().iter().map(|g| g.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join("|"),
        size: *w,
        removed: seq.min_vertex(),
    });
    Ok(Outcome {
        summary: summary_of("construct", s),
        tables: vec![("bad_sequences".into(), csv_table(bad))],
        files: vec![
            ("g_prime.hg".into(), res.g_prime.to_text()),
            ("polynomial.txt".into(), res.polynomial.to_text()),
        ],
        message,
        timings: res.timings.iter().map(|t| (t.stage.clone(), t.seconds)).collect(),
        failure: None,
    })
}

pub fn run_count(args: &CountArgs) -> Result<Outcome, CliError> {
    let path = args.graph.as_ref().ok_or_else(|| CliError::Usage("--graph is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let g = Hypergraph::from_text(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let pattern = Pattern::parse(args.pattern.as_deref().unwrap_or("edge"), g.uniformity())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let c = count_pattern(&g, &pattern).map_err(|e| CliError::Usage(e.to_string()))?;
    let message = format!(
        "labeled={} automorphisms={} unordered={}{}",
        c.labeled_embeddings,
        c.automorphisms,
        c.unordered_copies,
        c.ordered_tuples.map(|o| format!(" ordered={o}")).unwrap_or_default()
    );
    let mut summary = summary_of("count", &c);
    summary.insert("pattern".into(), json!(pattern.canonical()));
    summary.insert("vertices".into(), json!(g.vertex_count()));
    summary.insert("edges".into(), json!(g.edge_count()));
    Ok(Outcome { summary, message, ..Default::default() })
}

pub fn run_turan(args: &TuranArgs) -> Result<Outcome, CliError> {
    let n = args.n.ok_or_else(|| CliError::Usage("--n is required".into()))?;
    let r = args.r.unwrap_or(2);
    let forbid = args.forbid.as_deref().ok_or_else(|| CliError::Usage("--forbid is required".into()))?;
    let usage = |e: crate::hypergraph::GraphError| CliError::Usage(e.to_string());
    let forbidden = Pattern::parse(forbid, r).map_err(usage)?;
    let counted = Pattern::parse(args.count.as_deref().unwrap_or("edge"), r).map_err(usage)?;
    let inst = TuranInstance::new(n, forbidden, counted)?;
    let cache = args.cache.as_ref().map(TuranCache::new);
    let (res, cached) = exact_turan_cached(&inst, args.slot_cap.unwrap_or(DEFAULT_SLOT_CAP), cache.as_ref())?;
    let summary = summary_of(
        "turan-exact",
        &json!({
            "n": n,
            "r": r,
            "forbidden": inst.forbidden.canonical(),
            "counted": inst.counted.canonical(),
            "max_count": res.max_count,
            "witness_edges": res.witness.edge_count(),
        }),
    );
    let message = format!("{}{}", res.max_count, if cached { " (cached)" } else { "" });
    Ok(Outcome { summary, files: vec![("witness.hg".into(), res.witness.to_text())], message, ..Default::default() })
}

pub fn run_lemma2(args: &Lemma2Args, budget: &Budget) -> Result<Outcome, CliError> {
    let q = args.q.unwrap_or(7);
    let ctx = Arc::new(FieldCtx::with_order(q).map_err(|e| CliError::Usage(format!("--q {q}: {e}")))?);
    let shape = BlockShape::new(args.r.unwrap_or(2), args.b.unwrap_or(1), args.d.unwrap_or(2))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let sets = args.sets.unwrap_or(1);
    if ((sets * shape.r) as u128) > (q as u128).pow(shape.b as u32) {
        return Err(CliError::Usage(format!("{sets} disjoint {}-sets do not fit in F_{q}^{}", shape.r, shape.b)));
    }
    let inst = VanishingInstance::disjoint(shape, &ctx, sets)?;
    let trials = args.trials.unwrap_or(20000);
    let res = lemma2_calibration(shape, &ctx, &inst, trials, args.seed.unwrap_or(0), budget)?;
    let z_max = args.z_max.unwrap_or(3.0);
    let mut summary = summary_of("lemma2-mc", &res);
    summary.insert("q".into(), json!(q));
    summary.insert("shape".into(), json!(shape));
    summary.insert("sets".into(), json!(sets));
    summary.insert("guards".into(), json!({"u_pairs": inst.guard_u_pairs, "v_pairs": inst.guard_v_pairs, "size": inst.guard_size}));
    #[derive(Serialize)]
    struct Row {
        q: u64,
        sets: usize,
        trials: usize,
        vanished: usize,
        empirical: f64,
        exact: f64,
        z_score: f64,
    }
    let row = Row { q, sets, trials, vanished: res.vanished, empirical: res.empirical, exact: res.exact, z_score: res.z_score };
    let failure = (res.guards_hold && res.z_score.abs() > z_max).then(|| format!("|z| = {:.3} > {z_max}", res.z_score.abs()));
    Ok(Outcome {
        summary,
        tables: vec![("calibration".into(), csv_table([row]))],
        message: format!("empirical={:.6} exact={:.6} z={:.3} [{}]", res.empirical, res.exact, res.z_score, res.label),
        failure,
        ..Default::default()
    })
}

pub fn run_dichotomy(args: &DichotomyArgs, budget: &Budget) -> Result<Outcome, CliError> {
    let params = args.family.params(49)?;
    let rep = dichotomy_scan(&params, args.samples.unwrap_or(1000), args.seed.unwrap_or(0), budget, &FSource::Random)?;
    #[derive(Serialize)]
    struct Bin {
        size: usize,
        count: usize,
    }
    let hist = csv_table(rep.histogram.iter().map(|(&size, &count)| Bin { size, count }));
    let strict = params.degree as usize == params.b * params.s;
    let failure = (!rep.band_empty && strict).then(|| format!("{} samples inside the band", rep.violations.len()));
    let mut files = Vec::new();
    if !rep.violations.is_empty() {
        files.push(("violations.json".into(), serde_json::to_string_pretty(&rep.violations).unwrap()));
    }
    let mut report = rep.clone();
    report.violations.clear();
    let message = format!(
        "small_side_max={} large_side_min={} c_est={} band=({:.3}, {:.3}) empty={}",
        rep.small_side_max,
        rep.large_side_min.map_or("-".into(), |v| v.to_string()),
        rep.c_est,
        rep.band.0,
        rep.band.1,
        rep.band_empty
    );
    let mut summary = summary_of("dichotomy", &report);
    summary.remove("sizes");
    summary.insert("violation_count".into(), json!(rep.violations.len()));
    Ok(Outcome { summary, tables: vec![("histogram".into(), hist)], files, message, failure, ..Default::default() })
}

pub fn run_exponent(args: &ExponentArgs, budget: &Budget) -> Result<Outcome, CliError> {
    let params = args.family.params(5)?;
    let qs = args.qs.clone().unwrap_or_else(|| vec![3, 4, 5, 7, 8, 9]);
    let scan = exponent_scan(&params, &qs, args.seeds_per_q.unwrap_or(10), args.seed.unwrap_or(0), budget)?;
    let failure = args.tolerance.and_then(|tol| {
        ((scan.slope - scan.target).abs() > tol)
            .then(|| format!("slope {:.4} outside {} +- {tol}", scan.slope, scan.target_exact))
    });
    let message = format!("slope={:.4} target={} ({:.4}) c={}", scan.slope, scan.target_exact, scan.target, scan.bad_threshold);
    let mut summary = summary_of("exponent-scan", &scan);
    summary.remove("rows");
    summary.remove("points");
    Ok(Outcome {
        summary,
        tables: vec![("cells".into(), csv_table(&scan.rows)), ("points".into(), csv_table(&scan.points))],
        message,
        failure,
        ..Default::default()
    })
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Suite {
    pub case: Vec<SuiteCase>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteCase {
    pub name: String,
    pub command: String,
    pub args: Map<String, Value>,
    pub expected: Option<Map<String, Value>>,
    /// Absolute tolerance per numeric field.
    pub tolerance: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDiff {
    pub case: String,
    pub field: String,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

fn lookup<'a>(v: &'a Map<String, Value>, path: &str) -> Option<&'a Value> {
    let mut parts = path.split('.');
    let mut cur = v.get(parts.next()?)?;
    for p in parts {
        cur = cur.get(p)?;
    }
    Some(cur)
}

/// Compares expected fields (dotted paths) against a summary.
pub fn diff_summary(case: &str, summary: &Map<String, Value>, expected: &Map<String, Value>, tol: &Map<String, Value>) -> Vec<FieldDiff> {
    expected
        .iter()
        .map(|(field, want)| {
            let got = lookup(summary, field);
            let ok = match (want.as_f64(), got.and_then(Value::as_f64)) {
                (Some(w), Some(g)) => (w - g).abs() <= tol.get(field).and_then(Value::as_f64).unwrap_or(0.0),
                _ => got == Some(want),
            };
            FieldDiff {
                case: case.into(),
                field: field.clone(),
                expected: want.to_string(),
                actual: got.map_or("<missing>".into(), Value::to_string),
                ok,
            }
        })
        .collect()
}

pub fn run_regress(args: &RegressArgs, budget: &Budget, out: &Path) -> Result<Outcome, CliError> {
    let path = args.suite.as_ref().ok_or_else(|| CliError::Usage("--suite is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let suite: Suite = toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut diffs = Vec::new();
    let mut failed = Vec::new();
    let mut message = Vec::new();
    for case in &suite.case {
        let expected = case
            .expected
            .as_ref()
            .ok_or_else(|| CliError::Failure(format!("MissingBaseline: case `{}` has no expected table", case.name)))?;
        if case.command == "regress" {
            return Err(CliError::Usage(format!("case `{}`: suites cannot nest", case.name)));
        }
        let outcome = execute(&case.command, &Value::Object(case.args.clone()), budget, &out.join(&case.name))?;
        write_outcome(&out.join(&case.name), &case.command, &outcome, &json!(case.args), budget, 0)?;
        let d = diff_summary(&case.name, &outcome.summary, expected, &case.tolerance);
        let bad: Vec<&FieldDiff> = d.iter().filter(|f| !f.ok).collect();
        if bad.is_empty() && outcome.failure.is_none() {
            message.push(format!("{}: pass", case.name));
        } else {
            failed.push(case.name.clone());
            message.push(format!("{}: FAIL", case.name));
            for f in bad {
                message.push(format!("  {}: expected {} got {}", f.field, f.expected, f.actual));
            }
            if let Some(why) = &outcome.failure {
                message.push(format!("  {why}"));
            }
        }
        diffs.extend(d);
    }
    message.push(format!("{} cases, {} failed", suite.case.len(), failed.len()));
    let summary = summary_of("regress", &json!({"cases": suite.case.len(), "failed": failed}));
    let failure = (!failed.is_empty()).then(|| format!("{} of {} cases failed", failed.len(), suite.case.len()));
    Ok(Outcome { summary, tables: vec![("diffs".into(), csv_table(&diffs))], message: message.join("\n"), failure, ..Default::default() })
}

fn parse_args<T: DeserializeOwned>(command: &str, args: &Value) -> Result<T, CliError> {
    serde_json::from_value(args.clone()).map_err(|e| CliError::Usage(format!("args for `{command}`: {e}")))
}

/// Runs a subcommand from a resolved JSON config, as recorded in manifests.
pub fn execute(command: &str, args: &Value, budget: &Budget, out: &Path) -> Result<Outcome, CliError> {
    match command {
        "params" => run_params(&parse_args(command, args)?),
        "construct" => run_construct(&parse_args(command, args)?, budget),
        "count" => run_count(&parse_args(command, args)?),
        "turan-exact" => run_turan(&parse_args(command, args)?),
        "lemma2-mc" => run_lemma2(&parse_args(command, args)?, budget),
        "dichotomy" => run_dichotomy(&parse_args(command, args)?, budget),
        "exponent-scan" => run_exponent(&parse_args(command, args)?, budget),
        "regress" => run_regress(&parse_args(command, args)?, budget, out),
        other => Err(CliError::Usage(format!("unknown command `{other}`"))),
    }
}

fn write_outcome(
    dir: &Path,
    command: &str,
    outcome: &Outcome,
    config: &Value,
    budget: &Budget,
    workers: usize,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| io_err(&p, e))
    };
    write("summary.json", &(serde_json::to_string_pretty(&outcome.summary).unwrap() + "\n"))?;
    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "budget": budget,
        "workers": workers,
        "timings": outcome.timings.iter().map(|(k, v)| json!({"stage": k, "seconds": v})).collect::<Vec<_>>(),
    });
    write("manifest.json", &(serde_json::to_string_pretty(&manifest).unwrap() + "\n"))?;
    for (name, body) in &outcome.tables {
        write(&format!("{name}.csv"), body)?;
    }
    for (name, body) in &outcome.files {
        write(name, body)?;
    }
    Ok(())
}

fn resolved_config(cli: &Cli, config: Option<&Value>) -> Result<Value, CliError> {
    let name = cli.command.name();
    let v = match &cli.command {
        Command::Params(a) => serde_json::to_value(merge_args(config, name, a)?),
        Command::Construct(a) => serde_json::to_value(merge_args(config, name, a)?),
        Command::Count(a) => serde_json::to_value(merge_args(config, name, a)?),
        Command::TuranExact(a) => serde_json::to_value(merge_args(config, name, a)?),
        Command::Lemma2Mc(a) => serde_json::to_value(merge_args(config, name, a)?),
        Command::Dichotomy(a) => serde_json::to_value(merge_args(config, name, a)?),
        Command::ExponentScan(a) => serde_json::to_value(merge_args(config, name, a)?),
        Command::Regress(a) => serde_json::to_value(merge_args(config, name, a)?),
    };
    Ok(strip_nulls(v.expect("serializable args")))
}

/// Output directory for a command.
pub fn output_dir(explicit: Option<&Path>, config: Option<&Value>, command: &str) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = config.and_then(|c| c.get("out")).and_then(Value::as_str) {
        return PathBuf::from(p);
    }
    let base = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("runs"));
    base.join(command)
}

fn run_cli(cli: &Cli) -> Result<Outcome, CliError> {
    let config = cli.config.as_deref().map(load_config).transpose()?;
    let command = cli.command.name();
    let args = resolved_config(cli, config.as_ref())?;
    let budget = merge_budget(config.as_ref(), cli)?;
    let out = output_dir(cli.out.as_deref(), config.as_ref(), command);
    let workers = cli
        .workers
        .or_else(|| config.as_ref().and_then(|c| c.get("workers")).and_then(Value::as_u64).map(|w| w as usize))
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let start = Instant::now();
    let mut outcome = pool.install(|| execute(command, &args, &budget, &out))?;
    outcome.timings.push(("total".to_string(), start.elapsed().as_secs_f64()));
    write_outcome(&out, command, &outcome, &args, &budget, pool.current_num_threads())?;
    Ok(outcome)
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_cli(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.message);
            match outcome.failure {
                Some(why) => {
                    eprintln!("assertion failed: {why}");
                    1
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_sections() {
        let cfg: Value = serde_json::to_value(
            toml::from_str::<toml::Value>("seed = 3\nq = 11\n[construct]\nq = 7\nsizes = [2]\n[budget]\nmax_vertices = 99\n")
                .unwrap(),
        )
        .unwrap();
        let flags = ConstructArgs { seed: Some(5), ..Default::default() };
        let merged = merge_args(Some(&cfg), "construct", &flags).unwrap();
        assert_eq!(merged.seed, Some(5));
        assert_eq!(merged.family.q, Some(7));
        assert_eq!(merged.family.sizes, Some(vec![2]));
        let other = merge_args(Some(&cfg), "dichotomy", &DichotomyArgs::default()).unwrap();
        assert_eq!((other.family.q, other.seed), (Some(11), Some(3)));
    }

    #[test]
    fn config_round_trips_through_toml() {
        let args = ExponentArgs {
            family: FamilyArgs { sizes: Some(vec![2]), pattern: Some("K3".into()), c: Some(6), ..Default::default() },
            qs: Some(vec![3, 4, 5]),
            seeds_per_q: Some(2),
            seed: Some(1),
            tolerance: Some(0.3),
        };
        let text = toml::to_string(&strip_nulls(serde_json::to_value(&args).unwrap())).unwrap();
        let back: ExponentArgs = toml::from_str(&text).unwrap();
        assert_eq!(back, args);
    }

    #[test]
    fn diffs_respect_tolerances() {
        let summary: Map<String, Value> = serde_json::from_str(r#"{"a": 1.0, "b": {"c": "x"}, "d": 5}"#).unwrap();
        let expected: Map<String, Value> = serde_json::from_str(r#"{"a": 1.05, "b.c": "x", "d": 6, "e": 1}"#).unwrap();
        let tol: Map<String, Value> = serde_json::from_str(r#"{"a": 0.1}"#).unwrap();
        let d = diff_summary("t", &summary, &expected, &tol);
        let ok: Vec<(&str, bool)> = d.iter().map(|f| (f.field.as_str(), f.ok)).collect();
        assert_eq!(ok, vec![("a", true), ("b.c", true), ("d", false), ("e", false)]);
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::Usage(String::new()).exit_code(), 2);
        assert_eq!(CliError::Budget(String::new()).exit_code(), 3);
        assert_eq!(CliError::Assertion(String::new()).exit_code(), 1);
        let e: CliError = ConstructionError::BudgetExceeded { stage: "x", estimate: 2, cap: 1 }.into();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn family_validation() {
        let bad_r = FamilyArgs { r: Some(3), sizes: Some(vec![2]), ..Default::default() };
        assert!(matches!(bad_r.params(5), Err(CliError::Usage(_))));
        let bad_q = FamilyArgs { q: Some(6), ..Default::default() };
        assert!(matches!(bad_q.params(5), Err(CliError::Usage(_))));
        let p = FamilyArgs::default().params(5).unwrap();
        assert_eq!((p.b, p.s, p.degree), (2, 4, 8));
    }
}
