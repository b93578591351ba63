//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 data error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::budget::{allocate_budget, Characteristics};
use crate::error::Error;
use crate::features::{extract_features, FEATURE_NAMES};
use crate::generator::{enumerate_grid, generate_instance, BenchmarkGrid};
use crate::harness::{
    export_instance, format_real, label_rows, load_instances, read_dataset, read_results, run_matrix, summarize_means,
    summarize_status, write_dataset, write_means, write_results, write_status_counts, MatrixOptions,
};
use crate::instance::Instance;
use crate::ml::eval::write_sweep;
use crate::ml::{evaluate, fit, select_and_solve, stratified_split, sweep, LabeledDataset, ModelSpec, TrainedModel};
use crate::solver::{solve, Budget, ClockMode, SolveOutcome, SolverId};

#[derive(Parser, Debug)]
#[command(
    name = "greenjsp",
    version,
    about = "Energy-aware job-shop solving and solver selection"
)]
pub struct Cli {
    /// File of `key=value` lines supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate one instance file per grid configuration.
    Gen(GenArgs),
    /// Print the time budget allocated to an instance, in ms.
    Budget(BudgetArgs),
    /// Run one or all solvers on an instance.
    Solve(SolveArgs),
    /// Run the solver matrix over a directory of instances.
    Batch(BatchArgs),
    /// Print the feature vector of an instance as CSV.
    Featurize(FeaturizeArgs),
    /// Join results with instance features and label each row.
    Dataset(DatasetArgs),
    /// Stratified train/test split of a dataset CSV.
    Split(SplitArgs),
    /// Train one model family, or cross-validate all of them with `sweep`.
    Train(TrainArgs),
    /// Evaluate a model on a labeled dataset.
    Evaluate(EvaluateArgs),
    /// Recommend a solver for an instance, optionally running it.
    Select(SelectArgs),
    /// Status counts and per-size means from a results CSV.
    Report(ReportArgs),
    /// Flat key/array text export of an instance.
    Export(ExportArgs),
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GenArgs {
    /// Grid TOML file, or the preset `desk` / `paper`.
    #[arg(long)]
    pub grid: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the grid's master seed.
    #[arg(long)]
    pub master_seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BudgetArgs {
    #[arg(long)]
    pub instance: PathBuf,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// bnb, gls, sa or all.
    #[arg(long, default_value = "all")]
    pub solver: String,
    /// Milliseconds, or `auto` for the allocated budget.
    #[arg(long, default_value = "auto")]
    pub budget: String,
    #[arg(long)]
    pub budget_cap: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// wall or work.
    #[arg(long, default_value = "wall")]
    pub clock: ClockMode,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BatchArgs {
    #[arg(long)]
    pub instances: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub budget_cap: Option<u64>,
    /// Fixed budget in ms for every instance.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, default_value = "wall")]
    pub clock: ClockMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated subset of bnb,gls,sa, or all.
    #[arg(long, default_value = "all")]
    pub solvers: String,
    /// Append-only record of completed pairs; existing entries are reused.
    #[arg(long)]
    pub journal: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FeaturizeArgs {
    #[arg(long)]
    pub instance: PathBuf,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct DatasetArgs {
    #[arg(long)]
    pub results: PathBuf,
    #[arg(long)]
    pub instances: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SplitArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TrainArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Model family, or `sweep`.
    #[arg(long)]
    pub model: String,
    /// Model file, or the ranking CSV for `sweep`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cross-validation folds for `sweep`.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    /// Report directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SelectArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub run: bool,
    #[arg(long, default_value = "auto")]
    pub budget: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "wall")]
    pub clock: ClockMode,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReportArgs {
    #[arg(long)]
    pub results: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExportArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Usage(m),
            e => Failure::Data(e),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Data(Error::io(path, e))
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> std::result::Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", n + 1))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Inserts config entries as flags right after the subcommand name, skipping
/// keys given explicitly on the command line.
fn merge_config(argv: Vec<String>) -> std::result::Result<Vec<String>, String> {
    let mut path = None;
    let mut rest = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a file")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let entries = parse_config(&text)?;
    let Some(sub) = rest.iter().skip(1).position(|a| !a.starts_with('-')).map(|i| i + 1) else {
        return Ok(rest);
    };
    let given = |k: &str| {
        let flag = format!("--{k}");
        rest.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
    };
    let mut injected = Vec::new();
    for (k, v) in entries {
        if given(&k) {
            continue;
        }
        match v.as_str() {
            "true" => injected.push(format!("--{k}")),
            "false" => {}
            _ => injected.push(format!("--{k}={v}")),
        }
    }
    rest.splice(sub + 1..sub + 1, injected);
    Ok(rest)
}

/// The resolved arguments as `key=value` lines, loadable with `--config`.
fn resolved(cmd: &Command) -> String {
    let v = serde_json::to_value(cmd).expect("arguments serialize");
    let mut s = String::new();
    if let Some((name, args)) = v.as_object().and_then(|o| o.iter().next()) {
        s += &format!("# resolved configuration for `{name}`\n");
        for (k, v) in args.as_object().into_iter().flatten() {
            match v {
                serde_json::Value::Null => {}
                serde_json::Value::String(t) => s += &format!("{k}={t}\n"),
                other => s += &format!("{k}={other}\n"),
            }
        }
    }
    s
}

/// Runs the CLI on `argv` (program name first), writing results to `out` and
/// diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<String> = argv
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(m) => {
            let _ = writeln!(err, "error: {m}");
            return 1;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            return match e.kind() {
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    let _ = write!(err, "{}", resolved(&cli.command));
    match dispatch(&cli.command, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {}", e.to_string().replace('\n', " "));
            2
        }
    }
}

fn parse_solvers(s: &str) -> std::result::Result<Vec<SolverId>, Failure> {
    if s == "all" {
        return Ok(SolverId::ALL.to_vec());
    }
    let mut v: Vec<SolverId> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(Failure::Usage))
        .collect::<std::result::Result<_, _>>()?;
    v.sort();
    v.dedup();
    Ok(v)
}

fn budget_ms(spec: &str, inst: &Instance, cap: Option<u64>) -> std::result::Result<u64, Failure> {
    let ms = if spec == "auto" {
        allocate_budget(&Characteristics::from(inst))
    } else {
        spec.parse()
            .map_err(|_| Failure::Usage(format!("--budget expects milliseconds or `auto`, got `{spec}`")))?
    };
    Ok(cap.map_or(ms, |c| ms.min(c)))
}

#[derive(Serialize)]
struct OutcomeRecord {
    solver: SolverId,
    status: String,
    makespan: Option<i64>,
    energy: Option<i64>,
    tardiness: Option<i64>,
    scalarized: Option<f64>,
    solve_time_ms: u64,
    budget_ms: u64,
    seed: u64,
}

impl From<&SolveOutcome> for OutcomeRecord {
    fn from(o: &SolveOutcome) -> Self {
        OutcomeRecord {
            solver: o.solver,
            status: o.status.to_string(),
            makespan: o.objective.map(|b| b.makespan),
            energy: o.objective.map(|b| b.energy),
            tardiness: o.objective.map(|b| b.tardiness),
            scalarized: o.value(),
            solve_time_ms: o.solve_time_ms,
            budget_ms: o.budget_ms,
            seed: o.seed,
        }
    }
}

fn print_json<T: Serialize>(out: &mut dyn Write, v: &T) -> CliResult {
    let line = serde_json::to_string(v).map_err(|e| Failure::Data(e.into()))?;
    writeln!(out, "{line}").map_err(io_err(Path::new("<stdout>")))
}

fn create_dir(dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

fn create_file(path: &Path) -> std::result::Result<std::fs::File, Failure> {
    std::fs::File::create(path).map_err(io_err(path))
}

fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match cmd {
        Command::Gen(a) => {
            let mut grid = match a.grid.as_str() {
                "desk" if !Path::new("desk").exists() => BenchmarkGrid::desk(),
                "paper" if !Path::new("paper").exists() => BenchmarkGrid::paper(),
                path => BenchmarkGrid::read(path)?,
            };
            if let Some(s) = a.master_seed {
                grid.master_seed = s;
            }
            let _ = writeln!(err, "master_seed={}", grid.master_seed);
            create_dir(&a.out)?;
            let configs = enumerate_grid(&grid);
            for c in &configs {
                generate_instance(c).write(a.out.join(format!("{}.json", c.id())))?;
            }
            let _ = writeln!(out, "{} instances written to {}", configs.len(), a.out.display());
        }
        Command::Budget(a) => {
            let inst = Instance::read(&a.instance)?;
            let _ = writeln!(out, "{}", allocate_budget(&Characteristics::from(&inst)));
        }
        Command::Solve(a) => {
            let inst = Instance::read(&a.instance)?;
            let solvers = parse_solvers(&a.solver)?;
            let ms = budget_ms(&a.budget, &inst, a.budget_cap)?;
            for s in solvers {
                let o = solve(s, &inst, Budget { ms, clock: a.clock }, a.seed)?;
                print_json(out, &OutcomeRecord::from(&o))?;
            }
        }
        Command::Batch(a) => {
            let opts = MatrixOptions {
                solvers: parse_solvers(&a.solvers)?,
                parallelism: a.jobs.max(1),
                budget_override: a.budget,
                budget_cap: a.budget_cap,
                clock: a.clock,
                seed: a.seed,
                journal: a.journal.clone(),
            };
            let rows = run_matrix(&a.instances, &opts)?;
            write_results(&a.out, &rows)?;
            let _ = writeln!(out, "{} instances, results in {}", rows.len(), a.out.display());
        }
        Command::Featurize(a) => {
            let f = extract_features(&Instance::read(&a.instance)?)?;
            let _ = writeln!(out, "{}", FEATURE_NAMES.join(","));
            let row: Vec<String> = f.to_array().iter().map(|v| format_real(*v)).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        Command::Dataset(a) => {
            let results = read_results(&a.results)?;
            let instances: BTreeMap<String, Instance> = load_instances(&a.instances)?
                .into_iter()
                .map(|i| (i.id.clone(), i))
                .collect();
            let labeled = label_rows(&results, &instances)?;
            write_dataset(&a.out, &labeled.rows)?;
            let _ = writeln!(
                out,
                "{} rows ({} dropped without any schedule) written to {}",
                labeled.rows.len(),
                labeled.dropped,
                a.out.display()
            );
        }
        Command::Split(a) => {
            let rows = read_dataset(&a.dataset)?;
            let (train, test) = stratified_split(&LabeledDataset::from_rows(&rows), a.fraction, a.seed)?;
            let pick = |idx: &[usize]| idx.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>();
            write_dataset(&a.train, &pick(&train))?;
            write_dataset(&a.test, &pick(&test))?;
            let _ = writeln!(out, "train {} rows, test {} rows", train.len(), test.len());
        }
        Command::Train(a) => {
            let data = LabeledDataset::from_rows(&read_dataset(&a.dataset)?);
            if a.model == "sweep" {
                let reports = sweep(&data, a.folds, a.seed)?;
                write_sweep(create_file(&a.out)?, &reports)?;
                for r in &reports {
                    let _ = writeln!(out, "{:<24} {}", r.family, format_real(r.mean));
                }
            } else {
                let model = fit(&ModelSpec::named(&a.model, a.seed)?, &data)?;
                model.write(&a.out)?;
                let _ = writeln!(
                    out,
                    "{} trained on {} rows, saved to {}",
                    a.model,
                    data.len(),
                    a.out.display()
                );
            }
        }
        Command::Evaluate(a) => {
            let model = TrainedModel::read(&a.model)?;
            let data = LabeledDataset::from_rows(&read_dataset(&a.dataset)?);
            let report = evaluate(&model, &data)?;
            report.write_dir(&a.out)?;
            let _ = write!(out, "{}", report.summary());
        }
        Command::Select(a) => {
            let model = TrainedModel::read(&a.model)?;
            let inst = Instance::read(&a.instance)?;
            let budget = if a.run {
                Some(Budget {
                    ms: budget_ms(&a.budget, &inst, None)?,
                    clock: a.clock,
                })
            } else {
                None
            };
            let sel = select_and_solve(&model, &inst, budget, a.run, a.seed)?;
            #[derive(Serialize)]
            struct Record {
                solver: SolverId,
                features: BTreeMap<&'static str, f64>,
                outcome: Option<OutcomeRecord>,
            }
            let features = FEATURE_NAMES.iter().copied().zip(sel.features.to_array()).collect();
            print_json(
                out,
                &Record {
                    solver: sel.solver,
                    features,
                    outcome: sel.outcome.as_ref().map(OutcomeRecord::from),
                },
            )?;
        }
        Command::Report(a) => {
            let results = read_results(&a.results)?;
            create_dir(&a.out)?;
            let path = a.out.join("status_counts.csv");
            write_status_counts(create_file(&path)?, &summarize_status(&results))?;
            let path = a.out.join("means_by_jm.csv");
            write_means(create_file(&path)?, &summarize_means(&results))?;
            let _ = writeln!(
                out,
                "status_counts.csv and means_by_jm.csv written to {}",
                a.out.display()
            );
        }
        Command::Export(a) => {
            let text = export_instance(&Instance::read(&a.instance)?);
            match &a.out {
                Some(p) => std::fs::write(p, text).map_err(io_err(p))?,
                None => {
                    let _ = write!(out, "{text}");
                }
            }
        }
    }
    Ok(())
}
