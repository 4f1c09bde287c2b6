use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use sparse_eb::experiments::{self, ExperimentConfig, MonteCarlo, RadiusScale};
use sparse_eb::posterior::product_posterior;
use sparse_eb::{io, oracle, posterior, selector, uq};
use sparse_eb::{CenterMethod, NoiseSpec, Observation, Signal};

use crate::manifest::{data_error, RunManifest};

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
pub enum Command {
    /// Draw X = theta + sigma * xi and write it as CSV.
    Simulate(SimulateArgs),
    /// Penalized subset selection with the threshold and radius.
    Select(SelectArgs),
    /// Point estimate: thresholded, posterior mean, or product-prior.
    Estimate(EstimateArgs),
    /// Exact draws from the subset posterior.
    Sample(SampleArgs),
    /// Tau-oracle set and rate of a known signal.
    Oracle(OracleArgs),
    /// Excessive bias ratio and membership in the EBR class.
    Ebr(EbrArgs),
    /// Confidence ball around a point estimate.
    Ball(BallArgs),
    /// Theory constants for a noise moment condition.
    Constants(ConstantsArgs),
    /// Coverage and size of the thresholding ball over a (p, A) grid.
    Table1(Table1Args),
    /// Posterior mass outside growing balls around theta.
    Contraction(ContractionArgs),
    /// Posterior mass on oversized subsets.
    Dimcheck(DimcheckArgs),
    /// Tau-rate of the selected set relative to the oracle.
    Selq(SelqArgs),
    /// Rerun a recorded manifest.
    Replay(ReplayArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Select(_) => "select",
            Command::Estimate(_) => "estimate",
            Command::Sample(_) => "sample",
            Command::Oracle(_) => "oracle",
            Command::Ebr(_) => "ebr",
            Command::Ball(_) => "ball",
            Command::Constants(_) => "constants",
            Command::Table1(_) => "table1",
            Command::Contraction(_) => "contraction",
            Command::Dimcheck(_) => "dimcheck",
            Command::Selq(_) => "selq",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Manifest path (default: `<out>.manifest.json`, or stderr without --out).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DataArgs {
    /// Observations, CSV (one value per line) or a JSON array.
    #[arg(long = "x")]
    pub x: PathBuf,
    #[arg(long)]
    pub sigma: f64,
}

impl DataArgs {
    fn load(&self) -> Result<Observation> {
        Ok(Observation::new(io::read_vector(&self.x)?, self.sigma)?)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseFamily {
    GaussianIid,
    UniformBounded,
    Rademacher,
    StudentTStress,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct NoiseArgs {
    #[arg(long, value_enum, default_value = "gaussian-iid")]
    pub noise: NoiseFamily,
    /// Half-width for uniform-bounded noise (default sqrt(3)).
    #[arg(long)]
    pub bound: Option<f64>,
    /// Degrees of freedom for student-t-stress noise.
    #[arg(long)]
    pub df: Option<f64>,
}

impl NoiseArgs {
    fn spec(&self) -> Result<NoiseSpec> {
        let spec = match self.noise {
            NoiseFamily::GaussianIid => NoiseSpec::GaussianIid,
            NoiseFamily::Rademacher => NoiseSpec::Rademacher,
            NoiseFamily::UniformBounded => {
                NoiseSpec::UniformBounded { bound: self.bound.unwrap_or(3f64.sqrt()) }
            }
            NoiseFamily::StudentTStress => match self.df {
                Some(df) => NoiseSpec::StudentTStress { df },
                None => {
                    return Err(sparse_eb::Error::Config("student-t-stress needs --df".into()).into())
                }
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A signal from a file, or `p` trailing spikes of height `A` in dimension `n`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SignalArgs {
    #[arg(long, conflicts_with_all = ["n", "p", "amplitude"])]
    pub theta: Option<PathBuf>,
    #[arg(long, requires_all = ["p", "amplitude"])]
    pub n: Option<usize>,
    #[arg(long, requires_all = ["n", "amplitude"])]
    pub p: Option<usize>,
    #[arg(long = "A", requires_all = ["n", "p"], allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
}

impl SignalArgs {
    fn load(&self) -> Result<Signal> {
        match (&self.theta, self.n, self.p, self.amplitude) {
            (Some(path), ..) => Ok(Signal::new(io::read_vector(path)?)?),
            (None, Some(n), Some(p), Some(a)) => Ok(Signal::spikes(n, p, a)?),
            _ => Err(sparse_eb::Error::Config("give --theta or all of --n --p --A".into()).into()),
        }
    }
}

fn default_kappa() -> f64 {
    0.7
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    #[arg(long)]
    pub sigma: f64,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = default_kappa())]
    pub kappa: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    Threshold,
    Shrinkage,
    Product,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = default_kappa())]
    pub kappa: f64,
    #[arg(long, value_enum, default_value = "shrinkage")]
    pub method: EstimateMethod,
    /// Slab variance factor for the product prior.
    #[arg(long = "K")]
    pub k_factor: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = default_kappa())]
    pub kappa: f64,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub theta: PathBuf,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Restrict to sets of at least this size.
    #[arg(long)]
    pub k_min: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EbrArgs {
    #[arg(long)]
    pub theta: PathBuf,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Membership threshold on the ratio.
    #[arg(long)]
    pub t: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BallArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = default_kappa())]
    pub kappa: f64,
    #[arg(long = "M", default_value_t = 1.0)]
    pub inflation: f64,
    #[arg(long, value_enum, default_value = "threshold")]
    pub center: CenterArg,
    /// Report whether this signal lies in the ball.
    #[arg(long)]
    pub theta: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenterArg {
    Threshold,
    Shrinkage,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long = "B")]
    pub b: f64,
    #[arg(long, default_value_t = default_kappa())]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Table1Args {
    /// Experiment config (JSON). Without it the published design is used.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, value_enum)]
    pub radius_scale: Option<RadiusScaleArg>,
    /// Replace each cell's M by the smallest value reaching this coverage.
    #[arg(long = "calibrate-M")]
    pub calibrate_m: Option<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Resolved config recorded in the manifest.
    #[arg(skip)]
    pub resolved: Option<ExperimentConfig>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusScaleArg {
    SqrtM,
    M,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct McArgs {
    #[arg(long, default_value_t = 0.7)]
    pub kappa: f64,
    #[arg(long)]
    pub sigma: f64,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub replications: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ContractionArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    #[command(flatten)]
    pub mc: McArgs,
    /// Comma-separated M values.
    #[arg(long = "M-grid", value_delimiter = ',', required = true)]
    pub m_grid: Vec<f64>,
    #[arg(long = "M0", default_value_t = 1.0)]
    pub m0: f64,
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
    /// Smallest mass used in the log-affine fit.
    #[arg(long, default_value_t = 1e-3)]
    pub fit_floor: f64,
    /// Also write a whitespace-separated `M mass` file.
    #[arg(long)]
    pub dat: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DimcheckArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long = "M-grid", value_delimiter = ',', required = true)]
    pub m_grid: Vec<f64>,
    /// Also estimate the masses from this many posterior draws per dataset.
    #[arg(long)]
    pub draws: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SelqArgs {
    #[command(flatten)]
    pub signal: SignalArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Overrides the recorded output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the recorded output directory (table1).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

enum Body {
    Json(Value),
    Text(String),
    /// Files already written to this directory.
    Dir(PathBuf),
}

struct Outcome {
    body: Body,
    seed: Option<u64>,
    config: Value,
}

pub fn dispatch(command: Command, threads: Option<usize>, argv: Vec<String>) -> Result<()> {
    let command = match command {
        Command::Replay(replay) => replayed(&replay)?,
        other => other,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()?;
    let start = Instant::now();
    let name = command.name();
    let output = output_of(&command);
    let outcome = pool.install(|| run(command))?;
    let manifest = RunManifest::new(name, argv, outcome.config, outcome.seed, start.elapsed());
    match outcome.body {
        Body::Dir(dir) => manifest.write(&dir.join("manifest.json")),
        Body::Json(value) => emit(&output, &(serde_json::to_string_pretty(&value)? + "\n"), &manifest),
        Body::Text(text) => emit(&output, &text, &manifest),
    }
}

fn output_of(command: &Command) -> OutputArgs {
    match command {
        Command::Simulate(a) => a.output.clone(),
        Command::Select(a) => a.output.clone(),
        Command::Estimate(a) => a.output.clone(),
        Command::Sample(a) => a.output.clone(),
        Command::Oracle(a) => a.output.clone(),
        Command::Ebr(a) => a.output.clone(),
        Command::Ball(a) => a.output.clone(),
        Command::Constants(a) => a.output.clone(),
        Command::Contraction(a) => a.output.clone(),
        Command::Dimcheck(a) => a.output.clone(),
        Command::Selq(a) => a.output.clone(),
        Command::Table1(_) | Command::Replay(_) => OutputArgs::default(),
    }
}

fn emit(output: &OutputArgs, text: &str, manifest: &RunManifest) -> Result<()> {
    match &output.out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            let default = PathBuf::from(format!("{}.manifest.json", path.display()));
            manifest.write(output.manifest.as_ref().unwrap_or(&default))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            match &output.manifest {
                Some(path) => manifest.write(path),
                None => {
                    eprintln!("{}", serde_json::to_string(manifest)?);
                    Ok(())
                }
            }
        }
    }
}

fn replayed(args: &ReplayArgs) -> Result<Command> {
    let manifest = RunManifest::read(&args.manifest)?;
    let config = manifest.config;
    let bad = |e: serde_json::Error| data_error(format!("manifest config: {e}"));
    let mut command = match manifest.subcommand.as_str() {
        "simulate" => Command::Simulate(serde_json::from_value(config).map_err(bad)?),
        "select" => Command::Select(serde_json::from_value(config).map_err(bad)?),
        "estimate" => Command::Estimate(serde_json::from_value(config).map_err(bad)?),
        "sample" => Command::Sample(serde_json::from_value(config).map_err(bad)?),
        "oracle" => Command::Oracle(serde_json::from_value(config).map_err(bad)?),
        "ebr" => Command::Ebr(serde_json::from_value(config).map_err(bad)?),
        "ball" => Command::Ball(serde_json::from_value(config).map_err(bad)?),
        "constants" => Command::Constants(serde_json::from_value(config).map_err(bad)?),
        "table1" => Command::Table1(serde_json::from_value(config).map_err(bad)?),
        "contraction" => Command::Contraction(serde_json::from_value(config).map_err(bad)?),
        "dimcheck" => Command::Dimcheck(serde_json::from_value(config).map_err(bad)?),
        "selq" => Command::Selq(serde_json::from_value(config).map_err(bad)?),
        other => return Err(data_error(format!("manifest names unknown subcommand {other:?}"))),
    };
    if let Some(out) = &args.out {
        let output = match &mut command {
            Command::Simulate(a) => &mut a.output,
            Command::Select(a) => &mut a.output,
            Command::Estimate(a) => &mut a.output,
            Command::Sample(a) => &mut a.output,
            Command::Oracle(a) => &mut a.output,
            Command::Ebr(a) => &mut a.output,
            Command::Ball(a) => &mut a.output,
            Command::Constants(a) => &mut a.output,
            Command::Contraction(a) => &mut a.output,
            Command::Dimcheck(a) => &mut a.output,
            Command::Selq(a) => &mut a.output,
            Command::Table1(_) | Command::Replay(_) => {
                return Err(sparse_eb::Error::Config("table1 replays take --out-dir".into()).into())
            }
        };
        output.out = Some(out.clone());
        output.manifest = None;
    }
    if let (Some(dir), Command::Table1(a)) = (&args.out_dir, &mut command) {
        a.out_dir = dir.clone();
    }
    Ok(command)
}

fn to_json<T: Serialize>(value: &T) -> Result<Value> {
    Ok(serde_json::to_value(value)?)
}

fn json_outcome<T: Serialize, A: Serialize>(value: &T, args: &A, seed: Option<u64>) -> Result<Outcome> {
    Ok(Outcome { body: Body::Json(to_json(value)?), seed, config: to_json(args)? })
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Select(a) => {
            let x = a.data.load()?;
            json_outcome(&selector::select(&x, a.kappa)?, &a, None)
        }
        Command::Estimate(a) => estimate(a),
        Command::Sample(a) => {
            let x = a.data.load()?;
            let post = posterior::build(&x, a.kappa)?;
            json_outcome(&post.sample(&x, a.seed, a.count)?, &a, Some(a.seed))
        }
        Command::Oracle(a) => {
            let theta = Signal::new(io::read_vector(&a.theta)?)?;
            let report = match a.k_min {
                Some(k) => oracle::restricted_tau_oracle(&theta, a.sigma, a.tau, k)?,
                None => oracle::tau_oracle(&theta, a.sigma, a.tau)?,
            };
            json_outcome(&report, &a, None)
        }
        Command::Ebr(a) => {
            let theta = Signal::new(io::read_vector(&a.theta)?)?;
            let report = oracle::tau_oracle(&theta, a.sigma, a.tau)?;
            let member = oracle::ebr_member(&theta, a.sigma, a.tau, a.t)?;
            let value = json!({ "tau": a.tau, "t": a.t, "ebr_ratio": report.ebr_ratio, "member": member });
            json_outcome(&value, &a, None)
        }
        Command::Ball(a) => ball(a),
        Command::Constants(a) => {
            let constants = uq::theory_constants(a.beta, a.b, a.kappa)?;
            let value = json!({
                "constants": constants,
                "rho": a.rho,
                "tau_bar": constants.tau_bar(a.rho)?,
                "normal_tau_bar": constants.normal_tau_bar(a.rho)?,
            });
            json_outcome(&value, &a, None)
        }
        Command::Table1(a) => table1(a),
        Command::Contraction(a) => contraction(a),
        Command::Dimcheck(a) => dimcheck(a),
        Command::Selq(a) => selq(a),
        Command::Replay(_) => unreachable!("replay is resolved before running"),
    }
}

fn simulate(a: SimulateArgs) -> Result<Outcome> {
    let theta = a.signal.load()?;
    let x = sparse_eb::simulate(&theta, a.sigma, &a.noise.spec()?, a.seed)?;
    Ok(Outcome {
        body: Body::Text(io::format_vector_csv(x.x())),
        seed: Some(a.seed),
        config: to_json(&a)?,
    })
}

fn estimate(a: EstimateArgs) -> Result<Outcome> {
    let x = a.data.load()?;
    let value = match a.method {
        EstimateMethod::Threshold => {
            json!({ "method": "threshold", "estimate": selector::hard_threshold_estimate(&x, a.kappa)? })
        }
        EstimateMethod::Shrinkage => {
            let post = posterior::build(&x, a.kappa)?;
            json!({
                "method": "shrinkage",
                "estimate": posterior::shrinkage_mean(&post, &x)?,
                "inclusion": post.inclusion,
            })
        }
        EstimateMethod::Product => {
            let k = a
                .k_factor
                .ok_or_else(|| sparse_eb::Error::Config("product method needs --K".into()))?;
            let prod = product_posterior(&x, a.kappa, k)?;
            json!({
                "method": "product",
                "estimate": prod.mean,
                "median": prod.median,
                "inclusion": prod.inclusion,
            })
        }
    };
    json_outcome(&value, &a, None)
}

fn ball(a: BallArgs) -> Result<Outcome> {
    let x = a.data.load()?;
    let center = match a.center {
        CenterArg::Threshold => CenterMethod::Threshold,
        CenterArg::Shrinkage => CenterMethod::Shrinkage,
    };
    let ball = uq::confidence_ball(&x, a.kappa, a.inflation, center)?;
    let mut value = json!({ "ball": ball });
    if let Some(path) = &a.theta {
        let theta = Signal::new(io::read_vector(path)?)?;
        value["distance_sq"] = json!(uq::squared_distance(ball.center.theta(), theta.theta())?);
        value["covers"] = json!(uq::covers(&ball, &theta)?);
    }
    json_outcome(&value, &a, None)
}

fn resolve_table1(a: &Table1Args) -> Result<ExperimentConfig> {
    let mut config = match (&a.resolved, &a.config) {
        (Some(resolved), _) => resolved.clone(),
        (None, Some(path)) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| data_error(format!("config {}: {e}", path.display())))?
        }
        (None, None) => {
            let seed = a
                .seed
                .ok_or_else(|| sparse_eb::Error::Config("table1 needs --seed or a config".into()))?;
            ExperimentConfig::published(seed)
        }
    };
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    if let Some(r) = a.replications {
        config.replications = r;
    }
    if let Some(k) = a.kappa {
        config.kappa = k;
    }
    if let Some(scale) = a.radius_scale {
        config.radius_scale = match scale {
            RadiusScaleArg::SqrtM => RadiusScale::SqrtM,
            RadiusScaleArg::M => RadiusScale::M,
        };
    }
    config.validate()?;
    Ok(config)
}

fn table1(mut a: Table1Args) -> Result<Outcome> {
    let config = resolve_table1(&a)?;
    let rows = match a.calibrate_m {
        Some(target) => experiments::table1_calibrated(&config, target)?,
        None => experiments::table1(&config)?,
    };
    fs::create_dir_all(&a.out_dir)
        .with_context(|| format!("creating {}", a.out_dir.display()))?;
    write_rows_csv(&a.out_dir.join("table1.csv"), &rows)?;
    fs::write(a.out_dir.join("table1.json"), serde_json::to_string_pretty(&rows)? + "\n")?;
    let seed = config.seed;
    a.resolved = Some(config);
    a.config = None;
    Ok(Outcome { body: Body::Dir(a.out_dir.clone()), seed: Some(seed), config: to_json(&a)? })
}

fn write_rows_csv(path: &Path, rows: &[experiments::ExperimentRow]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .with_context(|| format!("writing {}", path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

fn contraction(a: ContractionArgs) -> Result<Outcome> {
    let theta = a.signal.load()?;
    let mc = MonteCarlo { replications: a.mc.replications, draws: a.draws };
    let curve = experiments::contraction_curve(
        &theta,
        a.mc.sigma,
        a.mc.kappa,
        &a.mc.noise.spec()?,
        a.mc.seed,
        &a.m_grid,
        a.m0,
        mc,
    )?;
    if let Some(path) = &a.dat {
        let text: String = curve.iter().map(|c| format!("{:?} {:?}\n", c.m, c.mass)).collect();
        fs::write(path, format!("# M mass\n{text}"))?;
    }
    let fit = experiments::log_affine_fit(&curve, a.fit_floor);
    json_outcome(&json!({ "curve": curve, "fit": fit }), &a, Some(a.mc.seed))
}

fn dimcheck(a: DimcheckArgs) -> Result<Outcome> {
    let theta = a.signal.load()?;
    let noise = a.mc.noise.spec()?;
    let (sigma, kappa, seed, reps) = (a.mc.sigma, a.mc.kappa, a.mc.seed, a.mc.replications);
    let exact = experiments::dimension_check(&theta, sigma, kappa, &noise, seed, &a.m_grid, reps)?;
    let mut value = json!({ "exact": exact });
    if let Some(draws) = a.draws {
        let mc = MonteCarlo { replications: reps, draws };
        value["sampled"] =
            to_json(&experiments::dimension_check_sampled(&theta, sigma, kappa, &noise, seed, &a.m_grid, mc)?)?;
    }
    json_outcome(&value, &a, Some(seed))
}

fn selq(a: SelqArgs) -> Result<Outcome> {
    let theta = a.signal.load()?;
    let runs = experiments::selector_quality(
        &theta,
        a.mc.sigma,
        a.mc.kappa,
        a.tau,
        &a.mc.noise.spec()?,
        a.mc.seed,
        a.mc.replications,
    )?;
    let mut ratios: Vec<f64> = runs.iter().filter_map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let median = (!ratios.is_empty()).then(|| ratios[ratios.len() / 2]);
    json_outcome(&json!({ "median_ratio": median, "runs": runs }), &a, Some(a.mc.seed))
}
