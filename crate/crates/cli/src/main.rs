//! `ginidex`: command-line access to the extended Gini index library.
//!
//! JSON reports go to stdout and carry `schema_version`; CSV outputs use
//! fixed headers. Exit codes: 0 success, 2 usage, 3 parse or numeric
//! failure, 4 insufficient sample, 5 degenerate data.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ginidex::dataset::{gdp2023, parse_dataset, parse_size_list};
use ginidex::estimators::{estimate, heatmap, Algorithm, IndexKind, IndexSpec, Sample};
use ginidex::gamma::{gamma_mle, GammaParams};
use ginidex::inference::{format_significant, gof_test, run_simulation, GofMethod, SimulationPlan, MIN_BOOTSTRAP};
use ginidex::population::{
    gamma_index, index_lorenz, index_quantile_covariance, index_survival, DistributionModel, EmpiricalModel, IndexValue,
};
use ginidex::specfun::Tolerance;
use ginidex::{Error, QuadratureConfig};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "ginidex", version, about = "Extended lower and upper Gini indices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Population index of a gamma model or of a data file's empirical law.
    Index(IndexArgs),
    /// Sample estimator for one (m, i, kind).
    Estimate(EstimateArgs),
    /// Maximum-likelihood gamma fit.
    Fit(FitArgs),
    /// Monte Carlo bias and MSE under a gamma model (CSV).
    Simulate(SimulateArgs),
    /// KS and CvM goodness of fit of a fitted gamma.
    Gof(GofArgs),
    /// Estimates over all (m, i) with i <= m <= m-max (CSV).
    Heatmap(HeatmapArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    Gdp2023,
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
struct DataSource {
    /// CSV file with one observation per row.
    #[arg(long, value_name = "FILE")]
    data: Option<PathBuf>,
    /// Bundled dataset.
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
}

#[derive(Args)]
struct DataArgs {
    #[command(flatten)]
    source: DataSource,
    /// Column to read from a CSV file with a header.
    #[arg(long, requires = "data")]
    column: Option<String>,
    /// Reorder observations before estimating.
    #[arg(long, value_enum, default_value = "none")]
    sort: SortOrder,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SortOrder {
    None,
    Asc,
    Desc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Lower,
    Upper,
    Combined,
}

impl From<Kind> for IndexKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Lower => IndexKind::Lower,
            Kind::Upper => IndexKind::Upper,
            Kind::Combined => IndexKind::Combined,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    Gamma,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Repr {
    Survival,
    Quantile,
    Lorenz,
    /// Single-integral gamma formula (gamma models only).
    Gamma,
    All,
}

#[derive(Args)]
#[group(id = "model", required = true, multiple = false)]
struct ModelSource {
    #[arg(long, value_enum, requires_all = ["alpha", "lambda"])]
    dist: Option<Dist>,
    #[arg(long, value_name = "FILE")]
    data: Option<PathBuf>,
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
}

#[derive(Args)]
struct IndexArgs {
    #[command(flatten)]
    model: ModelSource,
    /// Gamma shape.
    #[arg(long, requires = "dist")]
    alpha: Option<f64>,
    /// Gamma rate.
    #[arg(long, requires = "dist")]
    lambda: Option<f64>,
    #[arg(long, requires = "data")]
    column: Option<String>,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, value_enum, default_value = "survival")]
    repr: Repr,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Brute,
    Weighted,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    i: usize,
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, value_enum, default_value = "weighted")]
    algorithm: AlgorithmArg,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    i: usize,
    /// Sample sizes, e.g. `10,30,50,100,200` or `10..200:10`.
    #[arg(long)]
    sizes: String,
    #[arg(long)]
    reps: usize,
    #[arg(long, env = "GINIDEX_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GofMethodArg {
    /// Plug-in p-values, exact KS law.
    Plugin,
    /// Plug-in p-values, limiting KS law.
    PluginAsymptotic,
    /// Parametric bootstrap with refitting.
    Bootstrap,
}

#[derive(Args)]
struct GofArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum, default_value = "plugin")]
    method: GofMethodArg,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = MIN_BOOTSTRAP)]
    boot: usize,
    #[arg(long, env = "GINIDEX_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct HeatmapArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long = "m-max")]
    m_max: usize,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::SizeGuard { .. } => 2,
        Error::InsufficientSample { .. } => 4,
        Error::Degenerate(_) => 5,
        Error::Replication { source, .. } => exit_code(source),
        _ => 3,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

fn load(source: &DataSource, column: Option<&str>) -> Result<Sample, Failure> {
    match (&source.data, source.fixture) {
        (Some(path), _) => {
            let bytes = std::fs::read(path)
                .map_err(|e| Failure { code: 3, message: format!("cannot read {}: {e}", path.display()) })?;
            Ok(parse_dataset(&bytes, column)?)
        }
        (None, Some(Fixture::Gdp2023)) => Ok(gdp2023()),
        (None, None) => Err(Failure::usage("no data source given")),
    }
}

fn load_data(args: &DataArgs) -> Result<Sample, Failure> {
    let sample = load(&args.source, args.column.as_deref())?;
    if args.sort == SortOrder::None {
        return Ok(sample);
    }
    let mut values = sample.sorted_values();
    if args.sort == SortOrder::Desc {
        values.reverse();
    }
    Ok(Sample::new(values)?)
}

fn with_schema(mut value: Value) -> Value {
    if let Value::Object(map) = &mut value {
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    value
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize")
}

fn render(value: Value) -> String {
    let mut s = serde_json::to_string_pretty(&with_schema(value)).expect("JSON values serialize");
    s.push('\n');
    s
}

fn index_paths(
    model: &dyn DistributionModel,
    gamma: Option<&GammaParams>,
    m: usize,
    kind: IndexKind,
    repr: Repr,
    cfg: &QuadratureConfig,
) -> Result<Vec<IndexValue>, Failure> {
    let one = |r: Repr| -> Result<IndexValue, Failure> {
        Ok(match r {
            Repr::Survival => index_survival(model, m, kind, cfg)?,
            Repr::Quantile => index_quantile_covariance(model, m, kind, cfg)?,
            Repr::Lorenz => index_lorenz(model, m, kind, cfg)?,
            Repr::Gamma => match gamma {
                Some(p) => gamma_index(p, m, kind, cfg)?,
                None => return Err(Failure::usage("--repr gamma needs --dist gamma")),
            },
            Repr::All => unreachable!(),
        })
    };
    if repr != Repr::All {
        return Ok(vec![one(repr)?]);
    }
    let mut paths = vec![Repr::Survival, Repr::Quantile, Repr::Lorenz];
    if gamma.is_some() {
        paths.push(Repr::Gamma);
    }
    paths.into_iter().map(one).collect()
}

fn cmd_index(args: &IndexArgs) -> Result<String, Failure> {
    let kind: IndexKind = args.kind.into();
    IndexSpec::new(args.m, 1, kind)?;
    let cfg = QuadratureConfig::default();
    let (values, model_json) = if args.model.dist.is_some() {
        let (Some(alpha), Some(lambda)) = (args.alpha, args.lambda) else {
            return Err(Failure::usage("--dist gamma needs --alpha and --lambda"));
        };
        let params = GammaParams::new(alpha, lambda)?;
        let cfg = cfg.with_initial_scale(params.mean());
        let values = index_paths(&params, Some(&params), args.m, kind, args.repr, &cfg)?;
        (values, json!({"dist": "gamma", "alpha": alpha, "lambda": lambda}))
    } else {
        let source = DataSource { data: args.model.data.clone(), fixture: args.model.fixture };
        let sample = load(&source, args.column.as_deref())?;
        let model = EmpiricalModel::from_sample(&sample);
        let cfg = QuadratureConfig { max_intervals: 5000 + 4 * sample.len(), ..cfg }.with_initial_scale(sample.mean());
        let values = index_paths(&model, None, args.m, kind, args.repr, &cfg)?;
        (values, json!({"dist": "empirical", "n": sample.len()}))
    };
    let base = json!({"model": model_json, "m": args.m, "kind": kind});
    let mut out = base.as_object().cloned().unwrap_or_default();
    if let [single] = values[..] {
        out.insert("value".into(), json!(single.value));
        out.insert("representation".into(), json!(single.representation));
        out.insert("est_error".into(), json!(single.est_error));
    } else {
        let mut gap = 0.0f64;
        for a in &values {
            for b in &values {
                gap = gap.max((a.value - b.value).abs());
            }
        }
        out.insert("values".into(), to_json(&values));
        out.insert("max_gap".into(), json!(gap));
    }
    Ok(render(Value::Object(out)))
}

fn cmd_estimate(args: &EstimateArgs) -> Result<String, Failure> {
    let sample = load_data(&args.data)?;
    let spec = IndexSpec::new(args.m, args.i, args.kind.into())?;
    let algorithm = match args.algorithm {
        AlgorithmArg::Brute => Algorithm::BruteForce,
        AlgorithmArg::Weighted => Algorithm::Weighted,
    };
    let r = estimate(&sample, spec, algorithm)?;
    Ok(render(json!({
        "value": r.value,
        "n": r.n,
        "m": spec.m,
        "i": spec.i,
        "kind": spec.kind,
        "algorithm": r.algorithm,
    })))
}

fn cmd_fit(args: &FitArgs) -> Result<String, Failure> {
    let sample = load_data(&args.data)?;
    let fit = gamma_mle(&sample, &Tolerance::default())?;
    Ok(render(json!({
        "alpha": fit.params.alpha(),
        "lambda": fit.params.lambda(),
        "log_likelihood": fit.log_likelihood,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "n": sample.len(),
    })))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<String, Failure> {
    let plan = SimulationPlan {
        params: GammaParams::new(args.alpha, args.lambda)?,
        spec: IndexSpec::new(args.m, args.i, IndexKind::Lower)?,
        sample_sizes: parse_size_list(&args.sizes).map_err(|e| Failure::usage(e.to_string()))?,
        replications: args.reps,
        master_seed: args.seed,
    };
    plan.validate().map_err(|e| match e {
        Error::InsufficientSample { .. } => Failure::usage(e.to_string()),
        other => other.into(),
    })?;
    Ok(run_simulation(&plan, args.threads)?.to_csv())
}

fn cmd_gof(args: &GofArgs) -> Result<String, Failure> {
    let sample = load_data(&args.data)?;
    let method = match args.method {
        GofMethodArg::Plugin => GofMethod::PluginExact,
        GofMethodArg::PluginAsymptotic => GofMethod::PluginAsymptotic,
        GofMethodArg::Bootstrap => GofMethod::ParametricBootstrap { replicates: args.boot, seed: args.seed },
    };
    let report = gof_test(&sample, method, args.threads)?;
    Ok(render(to_json(&report)))
}

fn cmd_heatmap(args: &HeatmapArgs) -> Result<String, Failure> {
    let sample = load_data(&args.data)?;
    let grid = heatmap(&sample, args.kind.into(), args.m_max)?;
    let mut out = String::from("m,i,value\n");
    for c in &grid.cells {
        out.push_str(&format!("{},{},{}\n", c.m, c.i, format_significant(c.value, 6)));
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Index(a) => cmd_index(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Gof(a) => cmd_gof(a),
        Command::Heatmap(a) => cmd_heatmap(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
