use crate::config::{DatasetSpec, ModelChoice, ReducerChoice, RunConfig};
use crate::pipeline::{run_benchmark, RunManifest};

/// One config per dataset × reducer, each running all seven models, in
/// (dataset name, reducer) order.
pub fn sweep_configs(base: &RunConfig, datasets: &[DatasetSpec], reducers: &[ReducerChoice]) -> Vec<RunConfig> {
    let mut out = Vec::new();
    for d in datasets {
        for &r in reducers {
            out.push(RunConfig { dataset: d.clone(), reducer: r, models: ModelChoice::ALL.to_vec(), ..base.clone() });
        }
    }
    out.sort_by(|a, b| (&a.dataset.name, a.reducer).cmp(&(&b.dataset.name, b.reducer)));
    out
}

/// Runs each config in order. A config that fails outright yields a
/// manifest carrying the error, and the sweep moves on.
pub fn run_matrix(configs: &[RunConfig]) -> Vec<RunManifest> {
    configs
        .iter()
        .map(|c| run_benchmark(c).unwrap_or_else(|e| RunManifest::failed(c.clone(), &e)))
        .collect()
}
