//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::cost::{evaluate_cost, Constraints, CostReport};
use crate::error::{Error, Result};
use crate::evolution::MutationOp;
use crate::pdk::Pdk;
use crate::proxy::{accuracy_score, calibrate, CalibrationSample, ProxyConfig, ScoreBundle};
use crate::search::{
    default_baselines, hypervolume, objective_points, run_search, Scheduler, SearchConfig,
    SearchResult,
};
use crate::topology::{make_baseline, BaselineStyle, Gene};

pub const SEED_ENV: &str = "PTC_FORGE_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ptc-forge", version, about = "Topology search for photonic tensor cores")]
pub struct Cli {
    /// Worker threads for evaluation (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the evolutionary search and write front.json, history.jsonl and
    /// manifest.json.
    Search(SearchArgs),
    /// Print the cost report of a gene.
    Cost(CostArgs),
    /// Print the proxy scores of one or more genes.
    Score(ScoreArgs),
    /// Emit a manual design as a gene.
    Baseline(BaselineArgs),
    /// Run one search per grid point and write a CSV summary.
    Sweep(SweepArgs),
    /// Fit proxy weights to measured accuracies.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SearchOpts {
    /// Matrix size.
    #[arg(long)]
    pub k: Option<usize>,
    /// Preset name (`gf`, `custom`) or PDK file.
    #[arg(long, default_value = "gf")]
    pub pdk: String,
    /// Constraint file (TOML or JSON).
    #[arg(long)]
    pub constraints: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub pop: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long = "p-mu0")]
    pub p_mu0: Option<f64>,
    #[arg(long = "p-co")]
    pub p_co: Option<f64>,
    /// Iterations in the local-search phase.
    #[arg(long)]
    pub phase2: Option<usize>,
    /// Search config file (TOML or JSON); flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub opts: SearchOpts,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Also write the operator trace to trace.log.
    #[arg(long)]
    pub trace: bool,
    /// Rerun exactly the configuration recorded in a manifest.
    #[arg(long, conflicts_with = "config")]
    pub replay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    /// Gene file (JSON or text form).
    pub gene: PathBuf,
    #[arg(long, default_value = "gf")]
    pub pdk: String,
    /// Constraint file to check the gene against.
    #[arg(long)]
    pub constraints: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Gene files (JSON or text form).
    #[arg(required = true)]
    pub genes: Vec<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print a CSV score table (the `calibrate` input) instead of JSON.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long)]
    pub style: BaselineStyleArg,
    #[arg(long)]
    pub k: usize,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit the single-line text form.
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BaselineStyleArg {
    #[value(alias = "mzi")]
    MziClements,
    Butterfly,
    #[value(alias = "mmi")]
    MmiInterlaced,
}

impl From<BaselineStyleArg> for BaselineStyle {
    fn from(s: BaselineStyleArg) -> Self {
        match s {
            BaselineStyleArg::MziClements => BaselineStyle::MziClements,
            BaselineStyleArg::Butterfly => BaselineStyle::Butterfly,
            BaselineStyleArg::MmiInterlaced => BaselineStyle::MmiInterlaced,
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub opts: SearchOpts,
    /// One of pop_size, iters, p_mu0, scheduler, operator-ablation.
    #[arg(long)]
    pub axis: String,
    /// Comma-separated grid values; operator-ablation defaults to every
    /// operator.
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<String>,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// CSV with columns `id,accuracy`.
    #[arg(long)]
    pub accuracy: PathBuf,
    /// CSV with columns `id,s_zico,s_param,s_sparsity` (as written by
    /// `score --csv`).
    #[arg(long)]
    pub scores: PathBuf,
    /// Grid resolution on the weight simplex.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InfeasibleConstraints { .. } => EXIT_INFEASIBLE,
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::InvalidPermutation(_)
        | Error::InvalidPartition(_)
        | Error::IllegalGene(_)
        | Error::MissingPdkEntry(_)
        | Error::InvalidPdk(_) => EXIT_CONFIG,
        Error::NotApplicable(_) | Error::Io(_) => EXIT_INTERNAL,
    }
}

/// Parse arguments, run, and return the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be positive");
            return EXIT_CONFIG;
        }
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut out = std::io::stdout().lock();
    let result = match cli.command {
        Command::Search(a) => cmd_search(&a, &mut out),
        Command::Cost(a) => cmd_cost(&a, &mut out),
        Command::Score(a) => cmd_score(&a, &mut out),
        Command::Baseline(a) => cmd_baseline(&a, &mut out),
        Command::Sweep(a) => cmd_sweep(&a, &mut out),
        Command::Calibrate(a) => cmd_calibrate(&a, &mut out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

/// TOML or JSON by extension; unknown extensions try TOML first.
pub fn load_structured<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_to_string(path)?;
    let what = path.display();
    let json = |t: &str| serde_json::from_str(t).map_err(|e| Error::Config(format!("{what}: {e}")));
    let toml = |t: &str| toml::from_str(t).map_err(|e| Error::Config(format!("{what}: {e}")));
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => json(&text),
        Some("toml") => toml(&text),
        _ => toml(&text).or_else(|_| json(&text)),
    }
}

pub fn load_constraints(path: &Path) -> Result<Constraints> {
    let c: Constraints = load_structured(path)?;
    c.validate()?;
    Ok(c)
}

/// Gene from a file holding either the JSON object or the text form.
pub fn load_gene(path: &Path) -> Result<Gene> {
    let text = read_to_string(path)?;
    let t = text.trim();
    if t.starts_with('{') {
        Gene::from_json(t)
    } else {
        Gene::from_text(t)
    }
}

/// `PTC_FORGE_SEED` when set, else the flag, else `fallback`.
pub fn resolve_seed(flag: Option<u64>, fallback: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV} = `{v}` is not an unsigned integer"))),
        Err(_) => Ok(flag.unwrap_or(fallback)),
    }
}

/// Merge config file, flags and environment into a search configuration.
pub fn build_config(opts: &SearchOpts) -> Result<SearchConfig> {
    let mut cfg = match &opts.config {
        Some(p) => load_structured::<SearchConfig>(p)?,
        None => SearchConfig::new(opts.k.unwrap_or(16)),
    };
    if let Some(k) = opts.k {
        if opts.config.is_some() && k != cfg.k {
            cfg.b_range = crate::evolution::SearchSpace::default_block_range(k);
            cfg.ports.clear();
        }
        cfg.k = k;
    }
    if let Some(p) = &opts.constraints {
        cfg.constraints = Some(load_constraints(p)?);
    }
    cfg.seed = resolve_seed(opts.seed, cfg.seed)?;
    if let Some(v) = opts.pop {
        cfg.pop_size = v;
    }
    if let Some(v) = opts.iters {
        cfg.max_iters = v;
    }
    if let Some(v) = opts.p_mu0 {
        cfg.p_mu0 = v;
    }
    if let Some(v) = opts.p_co {
        cfg.p_co = v;
    }
    if let Some(v) = opts.phase2 {
        cfg.phase2_iters = v;
    }
    if cfg.max_iters > 0 && cfg.phase2_iters >= cfg.max_iters && opts.phase2.is_none() {
        // keep the default quarter split when only --iters was given
        cfg.phase2_iters = cfg.max_iters / 4;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Everything needed to rerun a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: SearchConfig,
    pub pdk: Pdk,
    pub seed: u64,
    pub duration_s: f64,
    pub evaluations: usize,
    pub outputs: Vec<String>,
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn print_front(result: &SearchResult, out: &mut dyn std::io::Write) -> Result<()> {
    writeln!(out, "#   B   Score    {}", CostReport::table_header()).map_err(io_err)?;
    for (i, ind) in result.front.iter().enumerate() {
        writeln!(
            out,
            "{:<3} {:<3} {:<8.4} {}",
            i,
            ind.gene.active_blocks,
            ind.objectives.score,
            ind.cost.table_row()
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// Run a search and write its outputs under `out_dir`.
pub fn execute_search(
    cfg: &SearchConfig,
    pdk: &Pdk,
    out_dir: &Path,
    trace: bool,
) -> Result<(SearchResult, RunManifest)> {
    let start = Instant::now();
    let mut cfg = cfg.clone();
    cfg.trace = trace;
    // record resolved constraints so the manifest does not depend on the
    // default derivation
    cfg.constraints = Some(cfg.constraints(pdk)?);
    let result = run_search(&cfg, pdk, &default_baselines(cfg.k))?;

    fs::create_dir_all(out_dir)?;
    let front = out_dir.join("front.json");
    let history = out_dir.join("history.jsonl");
    write_atomic(&front, result.front_json().as_bytes())?;
    write_atomic(&history, result.history_jsonl().as_bytes())?;
    let mut outputs = vec![front.display().to_string(), history.display().to_string()];
    if trace {
        let p = out_dir.join("trace.log");
        write_atomic(&p, result.trace_text().as_bytes())?;
        outputs.push(p.display().to_string());
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.seed,
        config: cfg,
        pdk: pdk.clone(),
        duration_s: start.elapsed().as_secs_f64(),
        evaluations: result.evaluations,
        outputs,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_atomic(&out_dir.join("manifest.json"), text.as_bytes())?;
    Ok((result, manifest))
}

pub fn cmd_search(a: &SearchArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let (cfg, pdk) = match &a.replay {
        Some(p) => {
            let m: RunManifest = load_structured(p)?;
            m.pdk.validate()?;
            (m.config, m.pdk)
        }
        None => (build_config(&a.opts)?, Pdk::resolve(&a.opts.pdk)?),
    };
    let (result, _) = execute_search(&cfg, &pdk, &a.out_dir, a.trace)?;
    print_front(&result, out)?;
    writeln!(
        out,
        "{} front members, {} evaluations; outputs in {}",
        result.front.len(),
        result.evaluations,
        a.out_dir.display()
    )
    .map_err(io_err)?;
    Ok(())
}

#[derive(Serialize)]
struct CostOutput<'a> {
    report: &'a CostReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    feasible: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    violated: Vec<String>,
}

pub fn cmd_cost(a: &CostArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let gene = load_gene(&a.gene)?;
    let pdk = Pdk::resolve(&a.pdk)?;
    let report = evaluate_cost(&gene.decode()?, &pdk)?;
    let verdict = match &a.constraints {
        Some(p) => Some(crate::cost::check_constraints(&report, &load_constraints(p)?)),
        None => None,
    };
    if a.json {
        let o = CostOutput {
            report: &report,
            feasible: verdict.as_ref().map(|v| v.feasible),
            violated: verdict.as_ref().map(|v| v.violated.clone()).unwrap_or_default(),
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&o).expect("serializes")).map_err(io_err)?;
    } else {
        writeln!(out, "{}", CostReport::table_header()).map_err(io_err)?;
        writeln!(out, "{}", report.table_row()).map_err(io_err)?;
        writeln!(
            out,
            "insertion loss {:.3} dB, laser {:.3} mW, path {:.1} um",
            report.insertion_loss, report.laser_power, report.longest_path
        )
        .map_err(io_err)?;
        if let Some(v) = verdict {
            if v.feasible {
                writeln!(out, "feasible").map_err(io_err)?;
            } else {
                writeln!(out, "violates: {}", v.violated.join(", ")).map_err(io_err)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ScoreRow {
    id: String,
    s_zico: f64,
    s_param: f64,
    s_sparsity: f64,
}

fn gene_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn cmd_score(a: &ScoreArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let seed = resolve_seed(a.seed, 0)?;
    let cfg = ProxyConfig::default();
    let mut bundles = Vec::new();
    for p in &a.genes {
        let t = load_gene(p)?.decode()?;
        bundles.push((gene_id(p), accuracy_score(&t, &cfg, seed)?));
    }
    if a.csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        for (id, b) in &bundles {
            w.serialize(ScoreRow {
                id: id.clone(),
                s_zico: b.s_zico,
                s_param: b.s_param,
                s_sparsity: b.s_sparsity,
            })
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.write_all(&bytes).map_err(io_err)?;
    } else if bundles.len() == 1 {
        let text = serde_json::to_string_pretty(&bundles[0].1).expect("serializes");
        writeln!(out, "{text}").map_err(io_err)?;
    } else {
        let map: Vec<serde_json::Value> = bundles
            .iter()
            .map(|(id, b)| serde_json::json!({ "id": id, "scores": b }))
            .collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&map).expect("serializes")).map_err(io_err)?;
    }
    Ok(())
}

pub fn cmd_baseline(a: &BaselineArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let gene = make_baseline(a.style.into(), a.k)?;
    let text = if a.text {
        gene.to_text() + "\n"
    } else {
        serde_json::to_string_pretty(&gene).expect("serializes") + "\n"
    };
    match &a.out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => out.write_all(text.as_bytes()).map_err(io_err),
    }
}

/// Sweepable hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    PopSize,
    Iters,
    PMu0,
    Scheduler,
    OperatorAblation,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::PopSize => "pop_size",
            SweepAxis::Iters => "iters",
            SweepAxis::PMu0 => "p_mu0",
            SweepAxis::Scheduler => "scheduler",
            SweepAxis::OperatorAblation => "operator-ablation",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "pop_size" | "pop" => Ok(SweepAxis::PopSize),
            "iters" | "max_iters" => Ok(SweepAxis::Iters),
            "p_mu0" => Ok(SweepAxis::PMu0),
            "scheduler" => Ok(SweepAxis::Scheduler),
            "operator_ablation" => Ok(SweepAxis::OperatorAblation),
            _ => Err(Error::Config(format!(
                "unknown sweep axis `{s}` (expected pop_size, iters, p_mu0, scheduler, operator-ablation)"
            ))),
        }
    }
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: String,
    pub seed: u64,
    pub front_size: usize,
    pub evaluations: usize,
    pub best_score: f64,
    pub best_cd: f64,
    pub best_ee: f64,
    pub p_avg: f64,
    /// Front hypervolume against the reference shared by all rows.
    pub hypervolume: f64,
}

fn apply_sweep_value(cfg: &mut SearchConfig, axis: SweepAxis, v: &str) -> Result<()> {
    let bad = || Error::Config(format!("bad sweep value `{v}` for {}", axis.name()));
    match axis {
        SweepAxis::PopSize => cfg.pop_size = v.parse().map_err(|_| bad())?,
        SweepAxis::Iters => {
            cfg.max_iters = v.parse().map_err(|_| bad())?;
            cfg.phase2_iters = cfg.max_iters / 4;
        }
        SweepAxis::PMu0 => cfg.p_mu0 = v.parse().map_err(|_| bad())?,
        SweepAxis::Scheduler => {
            cfg.scheduler = match v {
                "constant" => Scheduler::Constant,
                "two-stage" | "two_stage" | "cosine" => Scheduler::TwoStage,
                _ => return Err(bad()),
            }
        }
        SweepAxis::OperatorAblation => {
            cfg.disabled_ops.clear();
            if v != "none" {
                cfg.disabled_ops.insert(v.parse::<MutationOp>()?);
            }
        }
    }
    cfg.validate()
}

/// Run every grid point; rows share one hypervolume reference point.
pub fn run_sweep(base: &SearchConfig, pdk: &Pdk, axis: SweepAxis, values: &[String]) -> Result<Vec<SweepRow>> {
    let values: Vec<String> = if values.is_empty() {
        match axis {
            SweepAxis::OperatorAblation => std::iter::once("none".to_string())
                .chain(MutationOp::ALL.iter().map(|o| o.name().to_string()))
                .collect(),
            SweepAxis::Scheduler => vec!["constant".into(), "two-stage".into()],
            _ => return Err(Error::Config("--values is required for this axis".into())),
        }
    } else {
        values.to_vec()
    };
    let mut runs = Vec::new();
    for v in &values {
        let mut cfg = base.clone();
        apply_sweep_value(&mut cfg, axis, v)?;
        let r = run_search(&cfg, pdk, &default_baselines(cfg.k))?;
        runs.push((v.clone(), cfg.seed, r));
    }
    let all: Vec<[f64; 3]> = runs.iter().flat_map(|(_, _, r)| objective_points(&r.front)).collect();
    let reference = crate::search::shared_reference(&all, &[]);
    let axis_name = axis.name().to_string();
    Ok(runs
        .into_iter()
        .map(|(value, seed, r)| {
            let last = r.history.last().expect("history has the initial entry");
            SweepRow {
                axis: axis_name.clone(),
                value,
                seed,
                front_size: r.front.len(),
                evaluations: r.evaluations,
                best_score: last.best.score,
                best_cd: last.best.cd,
                best_ee: last.best.ee,
                p_avg: last.p_avg,
                hypervolume: hypervolume(&objective_points(&r.front), reference),
            }
        })
        .collect())
}

pub fn cmd_sweep(a: &SweepArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let axis: SweepAxis = a.axis.parse()?;
    let cfg = build_config(&a.opts)?;
    let pdk = Pdk::resolve(&a.opts.pdk)?;
    let rows = run_sweep(&cfg, &pdk, axis, &a.values)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    let path = a.out_dir.join("sweep.csv");
    write_atomic(&path, &bytes)?;
    out.write_all(&bytes).map_err(io_err)?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct AccuracyRow {
    id: String,
    accuracy: f64,
}

fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn cmd_calibrate(a: &CalibrateArgs, out: &mut dyn std::io::Write) -> Result<()> {
    let acc: Vec<AccuracyRow> = read_csv(&a.accuracy)?;
    let scores: Vec<ScoreRow> = read_csv(&a.scores)?;
    let weights = crate::proxy::ProxyWeights::default();
    let mut samples = Vec::new();
    for row in &acc {
        let s = scores
            .iter()
            .find(|s| s.id == row.id)
            .ok_or_else(|| Error::Config(format!("no scores for `{}`", row.id)))?;
        samples.push(CalibrationSample {
            id: row.id.clone(),
            accuracy: row.accuracy,
            scores: ScoreBundle::new(&weights, s.s_zico, s.s_param, s.s_sparsity),
        });
    }
    let result = calibrate(&samples, a.steps)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&result).expect("serializes")).map_err(io_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::InfeasibleConstraints { binding: "area".into() }), 3);
        assert_eq!(exit_code(&Error::Io("x".into())), 4);
    }

    #[test]
    fn sweep_axes_parse() {
        assert_eq!("operator-ablation".parse::<SweepAxis>().unwrap(), SweepAxis::OperatorAblation);
        assert_eq!("pop_size".parse::<SweepAxis>().unwrap(), SweepAxis::PopSize);
        assert!("temperature".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["ptc-forge", "frobnicate"]), 2);
        assert_eq!(run(["ptc-forge", "baseline", "--style", "butterfly"]), 2);
    }
}
