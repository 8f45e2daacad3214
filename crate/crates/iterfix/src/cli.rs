//! Command-line front end.
//!
//! Four subcommands wire the library into reproducible experiments:
//! `table1` reprints the built-in benchmark table and verifies it against
//! the embedded golden values, `run` executes one scheme and records its
//! trace, `compare` tabulates several schemes side by side, and `check`
//! hunts for counterexamples to a named condition.
//!
//! Exit codes are a stable contract: 0 means success or
//! no_counterexample_found, 1 means a counterexample or a golden-table
//! mismatch, 2 means a usage or validation error.
//!
//! Every command writes its fully resolved settings (seed included) as
//! `config.txt` next to its outputs; passing that file back through
//! `--config` reproduces the outputs bitwise. Explicit flags override
//! config-file values, which override built-in defaults.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::conditions::{
    check_condition_c, check_condition_da, check_condition_i, check_lemma1,
    check_quasi_nonexpansive, ConditionId, RateFn, DEFAULT_ALPHA_GRID, DEFAULT_PAIR_BUDGET,
    DEFAULT_POINT_BUDGET, DEFAULT_PQ_BUDGET, DEFAULT_TOL,
};
use crate::config::{self, ConfigFile, KvBlock, MappingStanza};
use crate::diagnostics::{compare_schemes, golden_column, summarize, table1_setup};
use crate::error::{Error, Result};
use crate::mapping::{Catalog, FixedPointSet, MappingSpec};
use crate::numfmt::g17;
use crate::schemes::{run_scheme, ParamSchedule, ScheduleRule, SchemeId, StopCriteria};
use crate::space::{Domain, NormKind, Point};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

// stdout may close early (e.g. piping into `head`); results also land in
// files, so a failed write is not worth more than a silent shrug.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! say_raw {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

/// Parses `std::env::args` and runs the selected command, returning the
/// process exit code. Library and validation errors print to stderr and
/// map to exit 2; counterexamples and golden mismatches are ordinary
/// results and map to exit 1.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests land here too; clap distinguishes
            // them from genuine usage errors via the exit code.
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let outcome = match cli.command {
        Command::Table1(args) => cmd_table1(args),
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Check(args) => cmd_check(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

#[derive(Parser)]
#[command(
    name = "iterfix",
    version,
    about = "Fixed-point iteration schemes, condition checkers, and convergence diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the built-in 20-row benchmark table and verify it against the
    /// embedded golden values
    Table1(Table1Args),
    /// Run one scheme on one mapping and record the full trace
    Run(RunArgs),
    /// Run several schemes side by side and tabulate their iterates
    Compare(CompareArgs),
    /// Search for a counterexample to a named condition
    Check(CheckArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Config file supplying values for any flag not given explicitly
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for output files [default: .]
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Args)]
struct MappingArgs {
    /// Mapping id from the catalog or from a config-file [mapping] stanza
    #[arg(long, value_name = "ID", conflicts_with = "map_expr")]
    map: Option<String>,
    /// Inline expression mapping; needs --domain, gets the id "adhoc"
    #[arg(long, value_name = "EXPR", requires = "domain")]
    map_expr: Option<String>,
    /// Domain for --map-expr, per-coordinate bounds like "0,1 ; 0,1"
    #[arg(long, value_name = "BOUNDS")]
    domain: Option<String>,
    /// Declared fixed points for --map-expr, points joined by ';'
    #[arg(long, value_name = "POINTS", requires = "map_expr")]
    fixed_points: Option<String>,
    /// Extra sampler points for --map-expr, points joined by ';'
    #[arg(long, value_name = "POINTS", requires = "map_expr")]
    special_points: Option<String>,
}

#[derive(Args)]
struct Table1Args {
    /// Number of recorded iterates; golden comparison covers rows 1..=20
    #[arg(long, value_name = "N")]
    iterations: Option<usize>,
    /// Starting coordinate; the golden comparison only applies at 0.9
    #[arg(long, value_name = "X")]
    x1: Option<f64>,
    /// What to print: aligned text or the CSV [default: text]
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Scheme: picard, mann, noor, or thakur
    #[arg(long, value_name = "SCHEME")]
    scheme: Option<String>,
    #[command(flatten)]
    mapping: MappingArgs,
    /// Starting point, comma-separated coordinates
    #[arg(long, value_name = "POINT")]
    x1: Option<String>,
    /// Schedule a_n: a constant or an expression in n [default: 0.85]
    #[arg(long, value_name = "VALUE")]
    a: Option<String>,
    /// Schedule b_n [default: 0.65]
    #[arg(long, value_name = "VALUE")]
    b: Option<String>,
    /// Schedule c_n [default: 0.45]
    #[arg(long, value_name = "VALUE")]
    c: Option<String>,
    /// Recorded points x_1 ..= x_N [default: 20]
    #[arg(long, value_name = "N")]
    n: Option<usize>,
    /// Stop at the first point whose residual is at or below this
    #[arg(long, value_name = "TOL")]
    residual_tol: Option<f64>,
    /// Stop at the first point whose error is at or below this; needs --reference
    #[arg(long, value_name = "TOL")]
    error_tol: Option<f64>,
    /// Reference fixed point for error tracking
    #[arg(long, value_name = "POINT")]
    reference: Option<String>,
    /// Norm: euclidean, max, or sum [default: euclidean]
    #[arg(long, value_name = "NORM")]
    norm: Option<String>,
    /// Seed recorded in the resolved config [default: 0]
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Also report whether all three schedules agree and stay in (1/2, 1)
    #[arg(long)]
    strict_schedule: bool,
    /// What to print: the summary or the trace CSV [default: text]
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Comma-separated scheme list [default: noor,thakur]
    #[arg(long, value_name = "LIST")]
    schemes: Option<String>,
    #[command(flatten)]
    mapping: MappingArgs,
    /// Starting point, comma-separated coordinates
    #[arg(long, value_name = "POINT")]
    x1: Option<String>,
    /// Schedule a_n [default: 0.85]
    #[arg(long, value_name = "VALUE")]
    a: Option<String>,
    /// Schedule b_n [default: 0.65]
    #[arg(long, value_name = "VALUE")]
    b: Option<String>,
    /// Schedule c_n [default: 0.45]
    #[arg(long, value_name = "VALUE")]
    c: Option<String>,
    /// Recorded points per scheme [default: 20]
    #[arg(long, value_name = "N")]
    n: Option<usize>,
    /// Reference fixed point [default: the mapping's first declared fixed point]
    #[arg(long, value_name = "POINT")]
    reference: Option<String>,
    /// Error level the summary reports first-hit iterations for [default: 1e-6]
    #[arg(long, value_name = "TOL")]
    target_error: Option<f64>,
    /// Norm: euclidean, max, or sum [default: euclidean]
    #[arg(long, value_name = "NORM")]
    norm: Option<String>,
    /// Seed recorded in the resolved config [default: 0]
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// What to print: aligned text or the CSV [default: text]
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CheckArgs {
    /// Condition to falsify: quasi, C, Da, lemma1, or I
    #[arg(long, value_name = "NAME")]
    condition: Option<String>,
    #[command(flatten)]
    mapping: MappingArgs,
    /// Violation threshold [default: 1e-9]
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,
    /// Sample budget [defaults: 10000 points for quasi and I, 100000 pairs for C and lemma1]
    #[arg(long, value_name = "N")]
    budget: Option<u64>,
    /// Da only: the parameter a in (1/2, 1) [default: 0.75]
    #[arg(long, value_name = "A")]
    a: Option<f64>,
    /// Da only: number of alpha grid points over [a, 1] [default: 16]
    #[arg(long, value_name = "N")]
    alpha_grid: Option<usize>,
    /// Da only: base-point budget [default: 10000]
    #[arg(long, value_name = "N")]
    x_budget: Option<u64>,
    /// Da only: admissible-pair budget per base point [default: 100]
    #[arg(long, value_name = "N")]
    pq_budget: Option<u64>,
    /// I only: the rate function h(r), e.g. "r / 2"
    #[arg(long, value_name = "EXPR")]
    h: Option<String>,
    /// Norm: euclidean, max, or sum [default: euclidean]
    #[arg(long, value_name = "NORM")]
    norm: Option<String>,
    /// Sampling seed [default: 0]
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

// Config-file plumbing. Each command accepts exactly the [run] keys it
// resolves; anything else in the stanza is a typo worth rejecting.

const TABLE1_KEYS: &[&str] = &["command", "x1", "n", "seed"];
const RUN_KEYS: &[&str] = &[
    "command",
    "map",
    "scheme",
    "x1",
    "a",
    "b",
    "c",
    "n",
    "residual_tol",
    "error_tol",
    "reference",
    "norm",
    "seed",
];
const COMPARE_KEYS: &[&str] = &[
    "command",
    "map",
    "schemes",
    "x1",
    "a",
    "b",
    "c",
    "n",
    "reference",
    "target_error",
    "norm",
    "seed",
];
const CHECK_KEYS: &[&str] = &[
    "command",
    "map",
    "condition",
    "tol",
    "budget",
    "a",
    "alpha_grid",
    "x_budget",
    "pq_budget",
    "h",
    "norm",
    "seed",
];

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile> {
    match path {
        Some(p) => config::load(p),
        None => Ok(ConfigFile::default()),
    }
}

/// Returns the [run] block after checking it targets this command and
/// carries no unknown keys.
fn guard_command<'c>(
    cfg: &'c ConfigFile,
    command: &str,
    keys: &[&str],
) -> Result<Option<&'c KvBlock>> {
    let Some(kv) = &cfg.run else { return Ok(None) };
    if let Some(declared) = kv.get("command") {
        if declared != command {
            return Err(Error::BadParameter {
                name: "command",
                detail: format!("the config file targets `{declared}`, not `{command}`"),
            });
        }
    }
    for k in kv.keys() {
        if !keys.contains(&k) {
            return Err(Error::BadParameter {
                name: "config",
                detail: format!("unknown [run] key {k:?} for `{command}`"),
            });
        }
    }
    Ok(Some(kv))
}

/// Flag value if given, else the config-file value, else None.
fn resolve<T>(flag: Option<T>, kv: Option<&KvBlock>, key: &'static str) -> Result<Option<T>>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match kv.and_then(|kv| kv.get(key)) {
        Some(s) => s.parse::<T>().map(Some).map_err(|e| Error::BadParameter {
            name: key,
            detail: format!("cannot parse {s:?}: {e}"),
        }),
        None => Ok(None),
    }
}

/// Like [`resolve`], for flags clap hands over as strings (points, scheme
/// and condition names) that still need parsing into their target type.
fn resolve_parsed<T>(
    flag: &Option<String>,
    kv: Option<&KvBlock>,
    key: &'static str,
) -> Result<Option<T>>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    resolve(flag.clone(), kv, key)?
        .map(|s| {
            s.parse::<T>().map_err(|e| Error::BadParameter {
                name: key,
                detail: format!("cannot parse {s:?}: {e}"),
            })
        })
        .transpose()
}

fn required<T>(value: Option<T>, key: &'static str) -> Result<T> {
    value.ok_or(Error::BadParameter {
        name: key,
        detail: "required; give the flag or a config-file entry".to_string(),
    })
}

fn resolve_rule(
    flag: &Option<String>,
    kv: Option<&KvBlock>,
    key: &'static str,
    default: f64,
) -> Result<ScheduleRule> {
    let source = flag
        .clone()
        .or_else(|| kv.and_then(|kv| kv.get(key)).map(str::to_string));
    match source {
        Some(s) => ScheduleRule::parse(&s),
        None => Ok(ScheduleRule::constant(default)),
    }
}

fn resolve_norm(flag: &Option<String>, kv: Option<&KvBlock>) -> Result<NormKind> {
    Ok(resolve_parsed::<NormKind>(flag, kv, "norm")?.unwrap_or(NormKind::Euclidean))
}

fn parse_point_list(s: &str, key: &'static str) -> Result<Vec<Point>> {
    let points: Result<Vec<Point>> = s.split(';').map(|t| t.trim().parse::<Point>()).collect();
    let points = points?;
    if points.is_empty() {
        return Err(Error::BadParameter {
            name: key,
            detail: "empty point list".to_string(),
        });
    }
    Ok(points)
}

/// Registers config-file mappings, then picks the run's mapping from
/// --map-expr, --map, or the config `map` key, in that order.
fn resolve_mapping(
    args: &MappingArgs,
    kv: Option<&KvBlock>,
    cfg: &ConfigFile,
) -> Result<Arc<MappingSpec>> {
    let catalog = Catalog::with_builtins();
    for stanza in &cfg.mappings {
        let spec = stanza.to_spec()?;
        spec.validate()?;
        catalog.register(spec)?;
    }
    if let Some(expr) = &args.map_expr {
        let domain = Domain::parse(args.domain.as_deref().expect("clap requires --domain"))?;
        let mut spec = MappingSpec::from_expr("adhoc", domain, expr)?;
        if let Some(s) = &args.fixed_points {
            spec = spec.with_fixed_points(parse_point_list(s, "fixed_points")?);
        }
        if let Some(s) = &args.special_points {
            spec = spec.with_special_points(parse_point_list(s, "special_points")?);
        }
        spec.validate()?;
        let id = catalog.register(spec)?;
        return catalog.lookup(&id);
    }
    let id = resolve(args.map.clone(), kv, "map")?;
    catalog.lookup(&required(id, "map")?)
}

/// Expression mappings re-emit their defining stanza so the resolved
/// config is self-contained; builtins are referenced by id alone.
fn stanza_for(spec: &MappingSpec) -> Option<MappingStanza> {
    spec.expr_source().map(|src| MappingStanza {
        id: spec.id().to_string(),
        domain: spec.domain().clone(),
        expr: src.to_string(),
        fixed_points: spec
            .known_fixed_points()
            .and_then(|set| set.points())
            .map(<[Point]>::to_vec),
        special_points: spec.special_points().to_vec(),
    })
}

fn render_config(mapping: Option<&MappingSpec>, run_entries: &[(String, String)]) -> String {
    let mut out = String::new();
    if let Some(stanza) = mapping.and_then(stanza_for) {
        out.push_str(&stanza.render());
        out.push('\n');
    }
    out.push_str(&config::render_run(run_entries));
    out
}

fn out_dir(common: &CommonArgs) -> Result<PathBuf> {
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    say!("wrote {}", path.display());
    Ok(())
}

fn kv(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

fn cmd_table1(args: Table1Args) -> Result<i32> {
    let cfg = load_config(&args.common.config)?;
    let block = guard_command(&cfg, "table1", TABLE1_KEYS)?;
    let x1 = resolve(args.x1, block, "x1")?.unwrap_or(0.9);
    let n = resolve(args.iterations, block, "n")?.unwrap_or(20);
    let seed: u64 = resolve(None, block, "seed")?.unwrap_or(0);
    let format = args.format.unwrap_or(Format::Text);

    let setup = table1_setup();
    let schemes = [SchemeId::Noor, SchemeId::Thakur];
    let table = compare_schemes(
        &setup.mapping,
        &schemes,
        &Point::scalar(x1)?,
        &setup.schedule,
        n,
        &setup.reference,
        NormKind::Euclidean,
    )?;

    match format {
        Format::Text => say_raw!("{}", table.render_text()),
        Format::Csv => say_raw!("{}", table.to_csv()),
    }

    // String comparison against the embedded goldens, only meaningful from
    // the reference start. Rows past 20 have no golden counterpart.
    let mut mismatch = None;
    let checkable = if x1 == 0.9 { n.min(20) } else { 0 };
    if checkable > 0 {
        'rows: for i in 0..checkable {
            for (j, scheme) in schemes.iter().enumerate() {
                let want = golden_column(*scheme).expect("both schemes carry goldens")[i];
                let got = table.cell(i, j);
                if got != want {
                    mismatch = Some((i + 1, *scheme, got, want));
                    break 'rows;
                }
            }
        }
        match &mismatch {
            None => say!("golden check: ok ({} cells)", checkable * 2),
            Some((row, scheme, got, want)) => say!(
                "golden check: MISMATCH at n = {row}, {}: printed {got}, expected {want}",
                scheme.name()
            ),
        }
    } else {
        say!("golden check: skipped (x1 = {x1}, reference table starts at 0.9)");
    }

    let entries = vec![
        kv("command", "table1"),
        kv("x1", x1),
        kv("n", n),
        kv("seed", seed),
    ];
    let dir = out_dir(&args.common)?;
    write_file(&dir, "table1.csv", &table.to_csv())?;
    write_file(&dir, "noor.dat", &table.gnuplot_data(0))?;
    write_file(&dir, "thakur.dat", &table.gnuplot_data(1))?;
    write_file(&dir, "config.txt", &render_config(None, &entries))?;

    Ok(if mismatch.is_some() {
        EXIT_COUNTEREXAMPLE
    } else {
        EXIT_PASS
    })
}

fn cmd_run(args: RunArgs) -> Result<i32> {
    let cfg = load_config(&args.common.config)?;
    let block = guard_command(&cfg, "run", RUN_KEYS)?;
    let t = resolve_mapping(&args.mapping, block, &cfg)?;
    let scheme: SchemeId = required(resolve_parsed(&args.scheme, block, "scheme")?, "scheme")?;
    let x1: Point = required(resolve_parsed(&args.x1, block, "x1")?, "x1")?;
    let schedule = ParamSchedule {
        a: resolve_rule(&args.a, block, "a", 0.85)?,
        b: resolve_rule(&args.b, block, "b", 0.65)?,
        c: resolve_rule(&args.c, block, "c", 0.45)?,
    };
    let n = resolve(args.n, block, "n")?.unwrap_or(20);
    let stop = StopCriteria {
        max_iterations: n,
        residual_tol: resolve(args.residual_tol, block, "residual_tol")?,
        error_tol: resolve(args.error_tol, block, "error_tol")?,
    };
    let reference: Option<Point> = resolve_parsed(&args.reference, block, "reference")?;
    let norm = resolve_norm(&args.norm, block)?;
    let seed: u64 = resolve(args.seed, block, "seed")?.unwrap_or(0);
    let format = args.format.unwrap_or(Format::Text);

    let trace = run_scheme(scheme, &t, &x1, &schedule, &stop, reference.as_ref(), norm)?;

    match format {
        Format::Text => {
            say!("scheme = {}", scheme.name());
            say!("mapping = {}", t.id());
            say!("norm = {}", norm.name());
            say!("recorded = {}", trace.len());
            let final_x: Vec<String> = trace.final_point().coords().iter().map(|&c| g17(c)).collect();
            say!("final_x = {}", final_x.join(","));
            say!("final_residual = {}", g17(trace.final_residual()));
            if let Some(e) = trace.final_error() {
                say!("final_error = {}", g17(e));
            }
            say!("stop_reason = {}", trace.stop_reason);
        }
        Format::Csv => say_raw!("{}", trace.csv_string()),
    }
    if args.strict_schedule {
        let status = schedule.strict_band_status(n)?;
        match status.reason {
            None => say!("strict_band = yes"),
            Some(reason) => say!("strict_band = no ({reason})"),
        }
    }

    let mut entries = vec![
        kv("command", "run"),
        kv("map", t.id()),
        kv("scheme", scheme.name()),
        kv("x1", &x1),
        kv("a", schedule.a.describe()),
        kv("b", schedule.b.describe()),
        kv("c", schedule.c.describe()),
        kv("n", n),
    ];
    if let Some(tol) = stop.residual_tol {
        entries.push(kv("residual_tol", format!("{tol:e}")));
    }
    if let Some(tol) = stop.error_tol {
        entries.push(kv("error_tol", format!("{tol:e}")));
    }
    if let Some(p) = &reference {
        entries.push(kv("reference", p));
    }
    entries.push(kv("norm", norm.name()));
    entries.push(kv("seed", seed));

    let dir = out_dir(&args.common)?;
    write_file(&dir, "trace.csv", &trace.csv_string())?;
    write_file(&dir, "config.txt", &render_config(Some(&t), &entries))?;
    Ok(EXIT_PASS)
}

fn parse_scheme_list(s: &str) -> Result<Vec<SchemeId>> {
    let schemes: Result<Vec<SchemeId>> = s
        .split(',')
        .map(|t| t.trim().parse::<SchemeId>())
        .collect();
    schemes
}

fn cmd_compare(args: CompareArgs) -> Result<i32> {
    let cfg = load_config(&args.common.config)?;
    let block = guard_command(&cfg, "compare", COMPARE_KEYS)?;
    let t = resolve_mapping(&args.mapping, block, &cfg)?;
    let schemes = parse_scheme_list(
        &resolve(args.schemes.clone(), block, "schemes")?.unwrap_or_else(|| "noor,thakur".into()),
    )?;
    let x1: Point = required(resolve_parsed(&args.x1, block, "x1")?, "x1")?;
    let schedule = ParamSchedule {
        a: resolve_rule(&args.a, block, "a", 0.85)?,
        b: resolve_rule(&args.b, block, "b", 0.65)?,
        c: resolve_rule(&args.c, block, "c", 0.45)?,
    };
    let n = resolve(args.n, block, "n")?.unwrap_or(20);
    let reference: Point = match resolve_parsed(&args.reference, block, "reference")? {
        Some(p) => p,
        None => match t.require_fixed_points("compare")? {
            FixedPointSet::Points(pts) => pts[0].clone(),
            FixedPointSet::WholeDomain => t.domain().center(),
        },
    };
    let target_error = resolve(args.target_error, block, "target_error")?.unwrap_or(1e-6);
    let norm = resolve_norm(&args.norm, block)?;
    let seed: u64 = resolve(args.seed, block, "seed")?.unwrap_or(0);
    let format = args.format.unwrap_or(Format::Text);

    let table = compare_schemes(&t, &schemes, &x1, &schedule, n, &reference, norm)?;
    let summary = summarize(&table, &reference, norm, target_error, 1e-12)?;

    match format {
        Format::Text => say_raw!("{}", table.render_text()),
        Format::Csv => say_raw!("{}", table.to_csv()),
    }
    for s in &summary.per_scheme {
        let rate = s
            .empirical_rate
            .map(|r| g17(r))
            .unwrap_or_else(|| "n/a".into());
        let hits = s
            .iterations_to
            .map(|i| i.to_string())
            .unwrap_or_else(|| "never".into());
        say!(
            "{}: final_error = {}, rate = {rate}, reaches {target_error:e} at n = {hits}, fejer_violations = {}",
            s.scheme.name(),
            g17(s.final_error),
            s.fejer_violations
        );
    }

    let scheme_names: Vec<&str> = schemes.iter().map(|s| s.name()).collect();
    let entries = vec![
        kv("command", "compare"),
        kv("map", t.id()),
        kv("schemes", scheme_names.join(",")),
        kv("x1", &x1),
        kv("a", schedule.a.describe()),
        kv("b", schedule.b.describe()),
        kv("c", schedule.c.describe()),
        kv("n", n),
        kv("reference", &reference),
        kv("target_error", format!("{target_error:e}")),
        kv("norm", norm.name()),
        kv("seed", seed),
    ];
    let dir = out_dir(&args.common)?;
    write_file(&dir, "compare.csv", &table.to_csv())?;
    for (j, scheme) in schemes.iter().enumerate() {
        write_file(&dir, &format!("{}.dat", scheme.name()), &table.gnuplot_data(j))?;
    }
    write_file(&dir, "config.txt", &render_config(Some(&t), &entries))?;
    Ok(EXIT_PASS)
}

fn cmd_check(args: CheckArgs) -> Result<i32> {
    let cfg = load_config(&args.common.config)?;
    let block = guard_command(&cfg, "check", CHECK_KEYS)?;
    let t = resolve_mapping(&args.mapping, block, &cfg)?;
    let condition: ConditionId =
        required(resolve_parsed(&args.condition, block, "condition")?, "condition")?;
    let tol = resolve(args.tol, block, "tol")?.unwrap_or(DEFAULT_TOL);
    let norm = resolve_norm(&args.norm, block)?;
    let seed: u64 = resolve(args.seed, block, "seed")?.unwrap_or(0);

    let budget = resolve(args.budget, block, "budget")?;
    let a = resolve(args.a, block, "a")?;
    let alpha_grid = resolve(args.alpha_grid, block, "alpha_grid")?;
    let x_budget = resolve(args.x_budget, block, "x_budget")?;
    let pq_budget = resolve(args.pq_budget, block, "pq_budget")?;
    let h = resolve(args.h.clone(), block, "h")?;

    // Reject settings that the chosen condition cannot use; a silently
    // ignored budget or rate function would misstate what was checked.
    let reject = |name: &'static str| -> Result<()> {
        Err(Error::BadParameter {
            name,
            detail: format!("does not apply to condition {condition}"),
        })
    };
    if condition != ConditionId::ConditionDa {
        if a.is_some() {
            reject("a")?;
        }
        if alpha_grid.is_some() {
            reject("alpha_grid")?;
        }
        if x_budget.is_some() {
            reject("x_budget")?;
        }
        if pq_budget.is_some() {
            reject("pq_budget")?;
        }
    } else if budget.is_some() {
        return Err(Error::BadParameter {
            name: "budget",
            detail: "condition Da takes --x-budget and --pq-budget".to_string(),
        });
    }
    if condition != ConditionId::ConditionI && h.is_some() {
        reject("h")?;
    }

    let mut entries = vec![
        kv("command", "check"),
        kv("map", t.id()),
        kv("condition", condition.name()),
        kv("tol", format!("{tol:e}")),
    ];
    let report = match condition {
        ConditionId::QuasiNonexpansive => {
            let budget = budget.unwrap_or(DEFAULT_POINT_BUDGET);
            entries.push(kv("budget", budget));
            check_quasi_nonexpansive(&t, norm, budget, seed, tol)?
        }
        ConditionId::ConditionC => {
            let budget = budget.unwrap_or(DEFAULT_PAIR_BUDGET);
            entries.push(kv("budget", budget));
            check_condition_c(&t, norm, budget, seed, tol)?
        }
        ConditionId::ConditionDa => {
            let a = a.unwrap_or(0.75);
            let alpha_grid = alpha_grid.unwrap_or(DEFAULT_ALPHA_GRID);
            let x_budget = x_budget.unwrap_or(DEFAULT_POINT_BUDGET);
            let pq_budget = pq_budget.unwrap_or(DEFAULT_PQ_BUDGET);
            entries.push(kv("a", a));
            entries.push(kv("alpha_grid", alpha_grid));
            entries.push(kv("x_budget", x_budget));
            entries.push(kv("pq_budget", pq_budget));
            check_condition_da(&t, a, alpha_grid, norm, x_budget, pq_budget, seed, tol)?
        }
        ConditionId::Lemma1 => {
            let budget = budget.unwrap_or(DEFAULT_PAIR_BUDGET);
            entries.push(kv("budget", budget));
            check_lemma1(&t, norm, budget, seed, tol)?
        }
        ConditionId::ConditionI => {
            let h = RateFn::parse(&required(h, "h")?)?;
            let budget = budget.unwrap_or(DEFAULT_POINT_BUDGET);
            entries.push(kv("budget", budget));
            entries.push(kv("h", h.source()));
            check_condition_i(&t, &h, norm, budget, seed, tol)?
        }
    };
    entries.push(kv("norm", norm.name()));
    entries.push(kv("seed", seed));

    let text = report.to_text();
    say_raw!("{text}");
    let dir = out_dir(&args.common)?;
    write_file(&dir, "report.txt", &text)?;
    write_file(&dir, "config.txt", &render_config(Some(&t), &entries))?;

    Ok(if report.passed() {
        EXIT_PASS
    } else {
        EXIT_COUNTEREXAMPLE
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(pairs: &[(&str, &str)]) -> KvBlock {
        KvBlock::new(
            pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
    }

    #[test]
    fn flags_override_config_values_which_override_defaults() {
        let kv = block(&[("n", "7")]);
        assert_eq!(resolve(Some(3usize), Some(&kv), "n").unwrap(), Some(3));
        assert_eq!(resolve(None::<usize>, Some(&kv), "n").unwrap(), Some(7));
        assert_eq!(resolve(None::<usize>, None, "n").unwrap(), None);
    }

    #[test]
    fn config_parse_failures_name_the_key() {
        let kv = block(&[("n", "many")]);
        match resolve(None::<usize>, Some(&kv), "n") {
            Err(Error::BadParameter { name: "n", detail }) => {
                assert!(detail.contains("many"), "{detail}");
            }
            other => panic!("expected a parameter error, got {other:?}"),
        }
    }

    #[test]
    fn command_guard_rejects_mismatches_and_stray_keys() {
        let mut cfg = ConfigFile::default();
        cfg.run = Some(block(&[("command", "run"), ("x1", "0.9")]));
        assert!(guard_command(&cfg, "run", RUN_KEYS).unwrap().is_some());
        assert!(guard_command(&cfg, "check", CHECK_KEYS).is_err());

        cfg.run = Some(block(&[("budget", "10")]));
        assert!(guard_command(&cfg, "check", CHECK_KEYS).unwrap().is_some());
        assert!(guard_command(&cfg, "run", RUN_KEYS).is_err());
    }

    #[test]
    fn scheme_lists_parse_with_whitespace() {
        let schemes = parse_scheme_list("noor, thakur").unwrap();
        assert_eq!(schemes, vec![SchemeId::Noor, SchemeId::Thakur]);
        assert!(parse_scheme_list("noor,cesaro").is_err());
    }

    #[test]
    fn expression_mappings_emit_their_stanza_builtins_do_not() {
        let catalog = Catalog::with_builtins();
        let builtin = catalog.lookup("paper_example").unwrap();
        assert!(stanza_for(&builtin).is_none());

        let spec = MappingSpec::from_expr("adhoc", Domain::parse("0,1").unwrap(), "x / 2")
            .unwrap()
            .with_fixed_points(vec![Point::scalar(0.0).unwrap()]);
        let stanza = stanza_for(&spec).unwrap();
        let text = render_config(Some(&spec), &[("command".into(), "run".into())]);
        assert!(text.starts_with("[mapping]\n"));
        assert!(text.contains("expr = x / 2"));
        assert!(text.contains("[run]\ncommand = run\n"));
        assert_eq!(stanza.id, "adhoc");
    }

    #[test]
    fn cli_declaration_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
