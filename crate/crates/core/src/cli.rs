//! Command-line front end.
//!
//! Exit codes: 0 on success (or when a compared order holds), 3 when a
//! compared order or theorem check fails, 2 on any input or runtime error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::value::RawValue;

use crate::bench::{
    counterexample_probe, run_scenario, DroppedHypothesis, TheoremId, TheoremScenario,
};
use crate::certify::{
    order_curve, verdict_from_curve, Curve, Grid, GridPolicy, Order, Tolerance, DEFAULT_GRID_COUNT,
    MIN_GRID_COUNT,
};
use crate::error::{Error, Result};
use crate::lifetime::{GompertzMakeham, LifetimeModel, WeibullG};
use crate::majorization::{
    chain_majorize_solve_2x2, implication_suite, pn_membership, ParamMatrix,
};
use crate::montecarlo::{ks_distance, sample};
use crate::system::{Structure, SystemSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ORDER_FAILS: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "stochord",
    version,
    about = "Certify stochastic orders between series and parallel systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify an order between two systems described in a JSON config.
    Compare(CompareArgs),
    /// Run the randomized bench for one ordering theorem.
    VerifyTheorem(VerifyArgs),
    /// Report which majorization relations hold between two vectors or 2-row matrices.
    Majorize(MajorizeArgs),
    /// Draw lifetimes by inverse transform and report the KS distance.
    Sample(SampleArgs),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Number of grid points.
    #[arg(long = "grid", default_value_t = DEFAULT_GRID_COUNT)]
    pub points: usize,
    /// Right end of the grid; defaults to where both survival functions fall below 1e-6.
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Grid spacing.
    #[arg(long, default_value = "log", value_parser = parse_policy)]
    pub policy: GridPolicy,
}

impl GridArgs {
    fn validate(&self) -> Result<()> {
        if self.points < MIN_GRID_COUNT {
            return Err(Error::Usage(format!(
                "--grid must be at least {MIN_GRID_COUNT}"
            )));
        }
        if let Some(x) = self.xmax {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::Usage(format!(
                    "--xmax must be positive and finite, got {x}"
                )));
            }
        }
        Ok(())
    }
}

fn parse_policy(s: &str) -> std::result::Result<GridPolicy, String> {
    match s {
        "log" => Ok(GridPolicy::LogSpaced),
        "linear" => Ok(GridPolicy::Linear),
        other => Err(format!(
            "unknown grid policy {other:?}; expected log or linear"
        )),
    }
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// JSON file with `lhs`, `rhs` and an optional `order`.
    #[arg(long)]
    pub config: PathBuf,
    /// Order to certify (`lhs <= rhs`); overrides the config's `order`.
    #[arg(long)]
    pub order: Option<Order>,
    /// Exchange the two systems.
    #[arg(long)]
    pub swap: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Directory for `curve.csv` and `verdict.txt`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Theorem id, e.g. T3.1.
    pub id: String,
    /// Number of random instances.
    #[arg(long, default_value_t = crate::bench::DEFAULT_INSTANCE_COUNT)]
    pub count: usize,
    /// RNG seed [default: 0].
    #[arg(long, env = "STOCHORD_SEED")]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Drop one hypothesis (shape, pn, weak-super) and report without asserting.
    #[arg(long)]
    pub probe: Option<DroppedHypothesis>,
    /// Skip the worked example as instance 0.
    #[arg(long)]
    pub no_example: bool,
    /// Directory for `report.txt` and `curve.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MajorizeArgs {
    /// Comma-separated vector.
    #[arg(long, allow_hyphen_values = true, requires = "b", conflicts_with_all = ["matrix_a", "matrix_b"])]
    pub a: Option<String>,
    /// Comma-separated vector, same length as `--a`.
    #[arg(long, allow_hyphen_values = true, requires = "a")]
    pub b: Option<String>,
    /// JSON file holding a 2-row matrix, e.g. `[[4.8, 3.4], [2.5, 1.6]]`.
    #[arg(long, requires = "matrix_b")]
    pub matrix_a: Option<PathBuf>,
    /// JSON file holding the second 2-row matrix.
    #[arg(long, requires = "matrix_a")]
    pub matrix_b: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// `weibull-g` (`wg`) with the exponential baseline, or `gompertz-makeham` (`gm`).
    #[arg(long)]
    pub family: String,
    /// Scale parameter of either family.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Shape (W-G) or exponential rate (GM).
    #[arg(long)]
    pub beta: Option<f64>,
    /// W-G baseline scale.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// GM Makeham term.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Number of draws.
    #[arg(long = "n", default_value_t = 1000)]
    pub count: usize,
    /// RNG seed [default: 0].
    #[arg(long, env = "STOCHORD_SEED")]
    pub seed: Option<u64>,
    /// Directory for `samples.csv` and `summary.txt`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    let mut stdout = std::io::stdout().lock();
    let (code, text) = match &cli.command {
        Command::Compare(a) => cmd_compare(a)?,
        Command::VerifyTheorem(a) => cmd_verify_theorem(a)?,
        Command::Majorize(a) => (EXIT_OK, cmd_majorize(a)?),
        Command::Sample(a) => (EXIT_OK, cmd_sample(a)?),
    };
    stdout.write_all(text.as_bytes())?;
    Ok(code)
}

/// Shortest round-trip decimal, in exponent form outside `[1e-5, 1e16)`.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn curve_csv(curve: &Curve) -> String {
    let mut s = String::from("x,lhs,rhs,diff\n");
    for r in &curve.rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            format_number(r.x),
            format_number(r.lhs),
            format_number(r.rhs),
            format_number(r.diff)
        );
    }
    s
}

/// Write `contents` to `dir/name` through a temporary file and rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name))
        .map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

// ---- compare ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareFile<'a> {
    #[serde(default)]
    order: Option<String>,
    #[serde(borrow)]
    lhs: SystemFile<'a>,
    #[serde(borrow)]
    rhs: SystemFile<'a>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile<'a> {
    family: Family,
    structure: StructureName,
    #[serde(borrow)]
    components: Vec<&'a RawValue>,
}

#[derive(Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Family {
    WeibullG,
    GompertzMakeham,
}

#[derive(Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum StructureName {
    Series,
    Parallel,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentFile {
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    lambda: Option<f64>,
}

/// Two systems and an optional order parsed from a compare config.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareConfig {
    pub order: Option<Order>,
    pub lhs: SystemSpec,
    pub rhs: SystemSpec,
}

fn line_of(text: &str, raw: &RawValue) -> usize {
    let offset = raw.get().as_ptr() as usize - text.as_ptr() as usize;
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn build_system(text: &str, name: &str, sys: &SystemFile<'_>) -> Result<SystemSpec> {
    let mut components = Vec::with_capacity(sys.components.len());
    for (k, raw) in sys.components.iter().enumerate() {
        let line = line_of(text, raw);
        let at = |msg: String| Error::Config(format!("line {line}: {name}.components[{k}]: {msg}"));
        let c: ComponentFile = serde_json::from_str(raw.get()).map_err(|e| at(e.to_string()))?;
        let need = |v: Option<f64>, field: &str| v.ok_or_else(|| at(format!("missing `{field}`")));
        let model: LifetimeModel = match sys.family {
            Family::WeibullG => {
                if c.lambda.is_some() {
                    return Err(at("`lambda` is not a weibull-g parameter".into()));
                }
                WeibullG::exponential(
                    need(c.alpha, "alpha")?,
                    need(c.beta, "beta")?,
                    need(c.gamma, "gamma")?,
                )
                .map_err(|e| at(e.to_string()))?
                .into()
            }
            Family::GompertzMakeham => {
                if c.gamma.is_some() {
                    return Err(at("`gamma` is not a gompertz-makeham parameter".into()));
                }
                GompertzMakeham::new(
                    need(c.alpha, "alpha")?,
                    need(c.beta, "beta")?,
                    need(c.lambda, "lambda")?,
                )
                .map_err(|e| at(e.to_string()))?
                .into()
            }
        };
        components.push(model);
    }
    let structure = match sys.structure {
        StructureName::Series => Structure::Series,
        StructureName::Parallel => Structure::Parallel,
    };
    SystemSpec::new(components, structure).map_err(|e| Error::Config(format!("{name}: {e}")))
}

/// Parse a compare config; errors carry the offending line.
pub fn parse_compare_config(text: &str) -> Result<CompareConfig> {
    let file: CompareFile<'_> =
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let order = file.order.as_deref().map(str::parse::<Order>).transpose()?;
    Ok(CompareConfig {
        order,
        lhs: build_system(text, "lhs", &file.lhs)?,
        rhs: build_system(text, "rhs", &file.rhs)?,
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn describe(spec: &SystemSpec) -> String {
    let parts: Vec<String> = spec
        .components()
        .iter()
        .map(|c| match c {
            LifetimeModel::WeibullG(w) => {
                format!("W-G({}, {}, {})", w.alpha(), w.beta(), w.gamma())
            }
            LifetimeModel::GompertzMakeham(g) => {
                format!("GM({}, {}, {})", g.alpha(), g.beta(), g.lambda())
            }
        })
        .collect();
    format!("{} [{}]", spec.structure(), parts.join(", "))
}

fn cmd_compare(args: &CompareArgs) -> Result<(i32, String)> {
    args.grid.validate()?;
    let cfg = parse_compare_config(&read_text(&args.config)?)?;
    let order = args.order.or(cfg.order).ok_or_else(|| {
        Error::Usage("no order given: pass --order or set `order` in the config".into())
    })?;
    let (lhs, rhs) = if args.swap {
        (cfg.rhs, cfg.lhs)
    } else {
        (cfg.lhs, cfg.rhs)
    };
    let grid = Grid::for_pair(
        &lhs,
        &rhs,
        args.grid.points,
        args.grid.policy,
        args.grid.xmax,
    )?;
    let curve = order_curve(order, &lhs, &rhs, &grid);
    let verdict = verdict_from_curve(&curve, &grid, Tolerance::default());
    let text = format!(
        "lhs: {}\nrhs: {}\n{verdict}\n",
        describe(&lhs),
        describe(&rhs)
    );
    if let Some(dir) = &args.out {
        write_atomic(dir, "curve.csv", &curve_csv(&curve))?;
        write_atomic(dir, "verdict.txt", &text)?;
    }
    let code = if verdict.holds {
        EXIT_OK
    } else {
        EXIT_ORDER_FAILS
    };
    Ok((code, text))
}

// ---- verify-theorem ----

fn cmd_verify_theorem(args: &VerifyArgs) -> Result<(i32, String)> {
    let id: TheoremId = args.id.parse()?;
    args.grid.validate()?;
    let scenario = TheoremScenario::new(id)
        .with_count(args.count)
        .with_seed(args.seed.unwrap_or(0))
        .with_grid(args.grid.points, args.grid.policy, args.grid.xmax)
        .with_example(!args.no_example);
    let (report, informational) = match args.probe {
        Some(dropped) => (counterexample_probe(&scenario, dropped)?, true),
        None => (run_scenario(&scenario)?, false),
    };
    let text = report.to_string();
    if let Some(dir) = &args.out {
        write_atomic(dir, "report.txt", &text)?;
        if let Some(curve) = &report.curve {
            write_atomic(dir, "curve.csv", &curve_csv(curve))?;
        }
    }
    let code = if informational || report.all_passed() {
        EXIT_OK
    } else {
        EXIT_ORDER_FAILS
    };
    Ok((code, text))
}

// ---- majorize ----

fn parse_vector(s: &str, flag: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Usage(format!("{flag}: cannot parse {t:?}: {e}")))
        })
        .collect()
}

fn read_matrix(path: &Path) -> Result<ParamMatrix> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(&read_text(path)?)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let [top, bottom]: [Vec<f64>; 2] = rows
        .try_into()
        .map_err(|_| Error::Config(format!("{}: expected exactly two rows", path.display())))?;
    ParamMatrix::new(top, bottom).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn cmd_majorize(args: &MajorizeArgs) -> Result<String> {
    let mut out = String::new();
    match (&args.a, &args.b, &args.matrix_a, &args.matrix_b) {
        (Some(a), Some(b), None, None) => {
            let a = parse_vector(a, "--a")?;
            let b = parse_vector(b, "--b")?;
            let s = implication_suite(&a, &b)?;
            let _ = writeln!(out, "plain={}", s.plain);
            let _ = writeln!(out, "weak_sub={}", s.weak_sub);
            let _ = writeln!(out, "weak_super={}", s.weak_super);
        }
        (None, None, Some(pa), Some(pb)) => {
            let a = read_matrix(pa)?;
            let b = read_matrix(pb)?;
            match chain_majorize_solve_2x2(&a, &b) {
                Some(l) => {
                    let _ = writeln!(out, "chain_2x2=true lambda={}", format_number(l));
                }
                None => {
                    let _ = writeln!(out, "chain_2x2=false");
                }
            }
            let _ = writeln!(out, "pn_a={}", pn_membership(&a));
            let _ = writeln!(out, "pn_b={}", pn_membership(&b));
        }
        _ => {
            return Err(Error::Usage(
                "give either --a and --b or --matrix-a and --matrix-b".into(),
            ))
        }
    }
    Ok(out)
}

// ---- sample ----

fn cmd_sample(args: &SampleArgs) -> Result<String> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Error::Usage(format!("--{flag} is required for this family")))
    };
    let model: LifetimeModel = match args.family.as_str() {
        "wg" | "weibull-g" => WeibullG::exponential(
            need(args.alpha, "alpha")?,
            need(args.beta, "beta")?,
            need(args.gamma, "gamma")?,
        )?
        .into(),
        "gm" | "gompertz-makeham" => GompertzMakeham::new(
            need(args.alpha, "alpha")?,
            need(args.beta, "beta")?,
            need(args.lambda, "lambda")?,
        )?
        .into(),
        other => {
            return Err(Error::Usage(format!(
                "unknown family {other:?}; expected weibull-g or gompertz-makeham"
            )))
        }
    };
    let seed = args.seed.unwrap_or(0);
    let batch = sample(&model, args.count, seed)?;
    let ks = ks_distance(&batch, &model);
    let summary = format!(
        "family: {}\nn: {}\nseed: {seed}\nmedian: {}\nmodel_median: {}\nks: {}\n",
        args.family,
        batch.len(),
        format_number(batch.median()),
        format_number(model.quantile(0.5)?),
        format_number(ks),
    );
    if let Some(dir) = &args.out {
        let mut csv = String::from("index,value\n");
        for (i, v) in batch.values.iter().enumerate() {
            let _ = writeln!(csv, "{i},{}", format_number(*v));
        }
        write_atomic(dir, "samples.csv", &csv)?;
        write_atomic(dir, "summary.txt", &summary)?;
    }
    Ok(summary)
}
