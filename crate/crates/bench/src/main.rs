use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qbench::config::{DatasetSpec, ReducerChoice, RunConfig};
use qbench::output::{emit_plotdata, parse_results, reports_from_results, write_outputs};
use qbench::pipeline::{run_benchmark, RunManifest};
use qbench::sweep::{run_matrix, sweep_configs};
use qbench::BenchError;

#[derive(Parser)]
#[command(name = "bench", version, about = "Benchmark classical and quantum classifiers on reduced tabular data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one dataset with one reducer.
    Run(RunArgs),
    /// Run every dataset × reducer pair with all seven models.
    Sweep(SweepArgs),
    /// Turn a results.csv into grouped-bar plot data, one file per dataset.
    Plotdata(PlotArgs),
}

/// Settings shared by `run` and `sweep`; each overrides the config file.
#[derive(Args)]
struct Overrides {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV path; implies a custom dataset unless --dataset is given.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Target column of the CSV.
    #[arg(long)]
    target: Option<String>,
    /// Comma-separated columns to drop.
    #[arg(long)]
    drop: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long)]
    n_test: Option<usize>,
    #[arg(long)]
    n_qubits: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    /// QSVC feature map: angle or zz.
    #[arg(long)]
    featuremap: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    vqc_epochs: Option<usize>,
    #[arg(long)]
    vqc_layers: Option<usize>,
    #[arg(long)]
    vqc_lr: Option<f64>,
    /// Cross-validate the VQC as well.
    #[arg(long)]
    cv_all: bool,
    /// Cross-validate over every row instead of the training subsample.
    #[arg(long)]
    full_data: bool,
    /// Skip z-scoring before reduction.
    #[arg(long)]
    no_standardize: bool,
    /// Extra `key=value` settings, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    /// uci_credit, bank_fraud or custom.
    #[arg(long)]
    dataset: Option<String>,
    /// svd, pca, skpp, lda, lda_split or none.
    #[arg(long)]
    reducer: Option<String>,
    /// Comma-separated: lr, knn, cart, nb, svm, qsvc, vqc.
    #[arg(long)]
    models: Option<String>,
    #[command(flatten)]
    common: Overrides,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated dataset presets; ignored when --data is given.
    #[arg(long, default_value = "uci_credit,bank_fraud")]
    datasets: String,
    #[arg(long, default_value = "svd,pca,skpp,lda_split")]
    reducers: String,
    #[command(flatten)]
    common: Overrides,
}

#[derive(Args)]
struct PlotArgs {
    /// results.csv written by `run` or `sweep`.
    #[arg(long)]
    results: PathBuf,
    /// Output directory; defaults to `plotdata/` next to the results file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep only these models (comma-separated).
    #[arg(long)]
    models: Option<String>,
    /// Keep only these reducers (comma-separated).
    #[arg(long)]
    reducers: Option<String>,
}

fn list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

fn build_config(dataset: Option<&str>, common: &Overrides) -> Result<RunConfig, BenchError> {
    let mut c = RunConfig::default();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        c.apply_text(&text)?;
    }
    match (dataset, &common.data) {
        (Some(d), _) => c.set("dataset", d)?,
        (None, Some(_)) => c.set("dataset", "custom")?,
        (None, None) => {}
    }
    let mut put = |k: &str, v: Option<String>| v.map_or(Ok(()), |v| c.set(k, &v));
    put("data", common.data.as_ref().map(|p| p.display().to_string()))?;
    put("target", common.target.clone())?;
    put("drop", common.drop.clone())?;
    put("seed", common.seed.map(|v| v.to_string()))?;
    put("out_dir", common.out.as_ref().map(|p| p.display().to_string()))?;
    put("n_train", common.n_train.map(|v| v.to_string()))?;
    put("n_test", common.n_test.map(|v| v.to_string()))?;
    put("n_qubits", common.n_qubits.map(|v| v.to_string()))?;
    put("folds", common.folds.map(|v| v.to_string()))?;
    put("featuremap", common.featuremap.clone())?;
    put("reps", common.reps.map(|v| v.to_string()))?;
    put("vqc_epochs", common.vqc_epochs.map(|v| v.to_string()))?;
    put("vqc_layers", common.vqc_layers.map(|v| v.to_string()))?;
    put("vqc_lr", common.vqc_lr.map(|v| v.to_string()))?;
    put("cv_all", common.cv_all.then(|| "true".into()))?;
    put("full_data", common.full_data.then(|| "true".into()))?;
    put("standardize", common.no_standardize.then(|| "false".into()))?;
    for kv in &common.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| BenchError::Config(format!("expected KEY=VALUE, got `{kv}`")))?;
        c.set(k, v)?;
    }
    Ok(c)
}

fn summarize(manifests: &[RunManifest]) {
    for m in manifests {
        if let Some(e) = &m.error {
            eprintln!("{} / {}: {e}", m.config.dataset.name, m.config.reducer);
        }
        for o in &m.outcomes {
            match &o.result {
                Ok(r) => println!("{}: {r}", m.config.dataset.name),
                Err(f) => eprintln!("{} / {} / {}: failed at {f}", m.config.dataset.name, m.config.reducer, o.model),
            }
        }
    }
}

fn finish(manifests: &[RunManifest], out: &std::path::Path) -> Result<(), BenchError> {
    write_outputs(manifests, out)?;
    summarize(manifests);
    println!("results written to {}", out.display());
    if manifests.iter().all(RunManifest::all_succeeded) {
        Ok(())
    } else {
        Err(BenchError::Runtime("some models or runs failed; see manifest.txt".into()))
    }
}

fn run(args: RunArgs) -> Result<(), BenchError> {
    let mut c = build_config(args.dataset.as_deref(), &args.common)?;
    if let Some(r) = &args.reducer {
        c.set("reducer", r)?;
    }
    if let Some(m) = &args.models {
        c.set("models", m)?;
    }
    let manifest = run_benchmark(&c)?;
    finish(&[manifest], &c.out_dir)
}

fn sweep(args: SweepArgs) -> Result<(), BenchError> {
    let base = build_config(None, &args.common)?;
    let datasets: Vec<DatasetSpec> = if args.common.data.is_some() {
        vec![base.dataset.clone()]
    } else {
        list(&args.datasets).iter().map(|d| d.parse().map(DatasetSpec::preset)).collect::<Result<_, BenchError>>()?
    };
    let reducers: Vec<ReducerChoice> = list(&args.reducers).iter().map(|r| r.parse()).collect::<Result<_, _>>()?;
    let configs = sweep_configs(&base, &datasets, &reducers);
    for c in &configs {
        c.validate()?;
    }
    let manifests = run_matrix(&configs);
    let data_missing = !manifests.is_empty() && manifests.iter().all(|m| m.error.is_some());
    let res = finish(&manifests, &base.out_dir);
    if data_missing {
        return Err(BenchError::Data("no sweep configuration could load its dataset".into()));
    }
    res
}

fn plotdata(args: PlotArgs) -> Result<(), BenchError> {
    let text = std::fs::read_to_string(&args.results)
        .map_err(|e| BenchError::Data(format!("cannot read {}: {e}", args.results.display())))?;
    let rows = parse_results(&text)?;
    let keep_models = args.models.as_deref().map(list);
    let keep_reducers = args.reducers.as_deref().map(list);
    let out = args
        .out
        .unwrap_or_else(|| args.results.parent().map(|p| p.join("plotdata")).unwrap_or_else(|| "plotdata".into()));
    let mut written = 0;
    for (dataset, reports) in reports_from_results(&rows) {
        let reports: Vec<_> = reports
            .into_iter()
            .filter(|r| keep_models.as_ref().is_none_or(|m| m.contains(&r.model)))
            .filter(|r| keep_reducers.as_ref().is_none_or(|m| m.contains(&r.reducer)))
            .collect();
        if reports.is_empty() {
            continue;
        }
        let path = out.join(format!("{dataset}.txt"));
        emit_plotdata(&reports, &path)?;
        println!("{}", path.display());
        written += 1;
    }
    if written == 0 {
        return Err(BenchError::Data("no complete results matched the filters".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Plotdata(a) => plotdata(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
