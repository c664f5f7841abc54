//! GRNN vs. backpropagation benchmark.
//!
//! For each dataset: z-score the inputs, pick σ (fixed or holdout search),
//! train the GRNN and the BP network, and record each model's MSE on the
//! training rows together with the wall time of its training loop. Loading,
//! normalization and σ search are outside both timers.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::bp::{BpNetwork, TrainConfig};
use crate::data::{normalize, Dataset, NormStats};
use crate::grnn::{select_sigma, GrnnModel, SigmaSearch};
use crate::{Error, Result};

pub const TABLE_HEADER: &str = "dataset,grnn_mse,grnn_time_s,bp_mse,bp_time_s,sigma,seed";

#[derive(Clone, Debug, PartialEq)]
pub enum SigmaPolicy {
    Fixed(f64),
    Auto(SigmaSearch),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BpSettings {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for BpSettings {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            hidden: 10,
            epochs: t.epochs,
            learning_rate: t.learning_rate,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub sigma: SigmaPolicy,
    pub bp: BpSettings,
    pub seed: u64,
    /// Datasets benchmarked concurrently.
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sigma: SigmaPolicy::Auto(SigmaSearch::default()),
            bp: BpSettings::default(),
            seed: 0,
            threads: 1,
        }
    }
}

/// One row of the results table. `None` marks a value lost to a failure,
/// described in `failure`.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub dataset: String,
    pub grnn_mse: Option<f64>,
    pub grnn_time_s: Option<f64>,
    pub bp_mse: Option<f64>,
    pub bp_time_s: Option<f64>,
    pub sigma: Option<f64>,
    pub sigma_search_time_s: Option<f64>,
    pub bp: BpSettings,
    pub seed: u64,
    pub failure: Option<String>,
}

impl BenchResult {
    fn failed(dataset: String, config: &BenchConfig, why: String) -> Self {
        Self {
            dataset,
            grnn_mse: None,
            grnn_time_s: None,
            bp_mse: None,
            bp_time_s: None,
            sigma: None,
            sigma_search_time_s: None,
            bp: config.bp,
            seed: config.seed,
            failure: Some(why),
        }
    }

    pub fn is_failure(&self) -> bool {
        self.failure.is_some()
    }
}

/// A result plus the trained models and the normalized data they saw, for
/// writing prediction files. Both models take normalized inputs; attach
/// `norm_stats` to the GRNN to query it with raw rows.
#[derive(Clone, Debug)]
pub struct BenchRun {
    pub result: BenchResult,
    pub normalized: Option<Dataset>,
    pub norm_stats: Option<NormStats>,
    pub grnn: Option<GrnnModel>,
    pub bp: Option<BpNetwork>,
}

/// Points at which [`run_benchmark_observed`] reports progress. The timer
/// events fire immediately outside the timed region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Normalized,
    SigmaSelected,
    GrnnTimerStart,
    GrnnTimerStop,
    BpTimerStart,
    BpTimerStop,
}

pub fn run_benchmark(datasets: Vec<Result<Dataset>>, config: &BenchConfig) -> Vec<BenchRun> {
    run_benchmark_observed(datasets, config, &|_, _| {})
}

/// Runs every dataset, isolating failures to their own row. Results keep the
/// input order.
pub fn run_benchmark_observed(
    datasets: Vec<Result<Dataset>>,
    config: &BenchConfig,
    observer: &(dyn Fn(&str, Phase) + Sync),
) -> Vec<BenchRun> {
    let job = |(i, ds): (usize, Result<Dataset>)| match ds {
        Ok(ds) => run_one(&ds, config, observer),
        Err(e) => BenchRun {
            result: BenchResult::failed(format!("dataset{i}"), config, e.to_string()),
            normalized: None,
            norm_stats: None,
            grnn: None,
            bp: None,
        },
    };
    let threads = config.threads.max(1);
    if threads == 1 {
        return datasets.into_iter().enumerate().map(job).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| datasets.into_par_iter().enumerate().map(job).collect()),
        Err(_) => datasets.into_iter().enumerate().map(job).collect(),
    }
}

fn run_one(ds: &Dataset, config: &BenchConfig, observer: &(dyn Fn(&str, Phase) + Sync)) -> BenchRun {
    let name = ds.name.clone();
    let fail = |why: String| BenchRun {
        result: BenchResult::failed(name.clone(), config, why),
        normalized: None,
        norm_stats: None,
        grnn: None,
        bp: None,
    };
    if ds.is_empty() {
        return fail("dataset has no rows".into());
    }
    let (norm, stats) = match normalize(ds) {
        Ok(v) => v,
        Err(e) => return fail(e.to_string()),
    };
    observer(&name, Phase::Normalized);

    let search_start = Instant::now();
    let sigma = match &config.sigma {
        SigmaPolicy::Fixed(s) => Ok(*s),
        SigmaPolicy::Auto(search) => {
            let search = SigmaSearch {
                seed: config.seed,
                ..search.clone()
            };
            select_sigma(&norm, &search).map(|c| c.sigma)
        }
    };
    let search_time = search_start.elapsed().as_secs_f64();
    let sigma = match sigma {
        Ok(s) => s,
        Err(e) => return fail(e.to_string()),
    };
    observer(&name, Phase::SigmaSelected);

    let mut result = BenchResult {
        dataset: name.clone(),
        grnn_mse: None,
        grnn_time_s: None,
        bp_mse: None,
        bp_time_s: None,
        sigma: Some(sigma),
        sigma_search_time_s: matches!(config.sigma, SigmaPolicy::Auto(_)).then_some(search_time),
        bp: config.bp,
        seed: config.seed,
        failure: None,
    };
    let mut failures = Vec::new();

    observer(&name, Phase::GrnnTimerStart);
    let start = Instant::now();
    let trained = GrnnModel::train(norm.patterns(), sigma);
    let grnn_time = start.elapsed().as_secs_f64();
    observer(&name, Phase::GrnnTimerStop);
    let grnn = match trained {
        Ok(m) => {
            match m.mse(&norm.inputs, &norm.targets) {
                Ok(mse) => {
                    result.grnn_mse = Some(mse);
                    result.grnn_time_s = Some(grnn_time);
                }
                Err(e) => failures.push(format!("grnn: {e}")),
            }
            Some(m)
        }
        Err(e) => {
            failures.push(format!("grnn: {e}"));
            None
        }
    };

    let bp = match BpNetwork::new(norm.d_in(), config.bp.hidden, norm.d_out(), config.seed) {
        Ok(mut net) => {
            let tc = TrainConfig {
                epochs: config.bp.epochs,
                learning_rate: config.bp.learning_rate,
            };
            observer(&name, Phase::BpTimerStart);
            let report = net.train(&norm.inputs, &norm.targets, &tc);
            observer(&name, Phase::BpTimerStop);
            match report {
                Ok(r) => {
                    result.bp_mse = Some(r.final_mse);
                    result.bp_time_s = Some(r.wall_time_s);
                    Some(net)
                }
                Err(e) => {
                    failures.push(format!("bp: {e}"));
                    None
                }
            }
        }
        Err(e) => {
            failures.push(format!("bp: {e}"));
            None
        }
    };

    if !failures.is_empty() {
        result.failure = Some(failures.join("; "));
    }
    BenchRun {
        result,
        normalized: Some(norm),
        norm_stats: Some(stats),
        grnn,
        bp,
    }
}

fn sci(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.3e}"))
}

/// Renders the results table as CSV text.
pub fn format_table(results: &[BenchResult]) -> String {
    let mut s = String::from(TABLE_HEADER);
    s.push('\n');
    for r in results {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.dataset,
            sci(r.grnn_mse),
            sci(r.grnn_time_s),
            sci(r.bp_mse),
            sci(r.bp_time_s),
            sci(r.sigma),
            r.seed
        );
    }
    s
}

pub fn emit_table(results: &[BenchResult], path: impl AsRef<Path>) -> Result<()> {
    if results.is_empty() {
        return Err(Error::EmptyInput("benchmark results"));
    }
    let path = path.as_ref();
    std::fs::write(path, format_table(results)).map_err(|e| Error::io(path, e))
}

/// Writes `row,target_1..m,grnn_1..m,bp_1..m` for every row of `dataset`.
/// A missing model yields `NA` columns. `dataset` inputs must be in the
/// space the models were trained on.
pub fn emit_predictions(
    grnn: Option<&GrnnModel>,
    bp: Option<&BpNetwork>,
    dataset: &Dataset,
    path: impl AsRef<Path>,
) -> Result<()> {
    let m = dataset.d_out();
    if let Some(g) = grnn {
        crate::error::check_dim(g.d_in(), dataset.d_in())?;
        crate::error::check_dim(g.d_out(), m)?;
    }
    if let Some(n) = bp {
        crate::error::check_dim(n.d_in(), dataset.d_in())?;
        crate::error::check_dim(n.d_out(), m)?;
    }
    let grnn_pred = grnn.map(|g| g.predict_batch(&dataset.inputs)).transpose()?;
    let bp_pred = bp.map(|n| n.predict_batch(&dataset.inputs)).transpose()?;

    let mut s = String::from("row");
    for prefix in ["target", "grnn", "bp"] {
        for j in 1..=m {
            let _ = write!(s, ",{prefix}_{j}");
        }
    }
    s.push('\n');
    let na = vec!["NA".to_string(); m];
    let cells = |pred: &Option<Vec<Vec<f64>>>, i: usize| -> Vec<String> {
        pred.as_ref()
            .map_or_else(|| na.clone(), |p| p[i].iter().map(|v| v.to_string()).collect())
    };
    for i in 0..dataset.rows() {
        let _ = write!(s, "{i}");
        for v in &dataset.targets[i] {
            let _ = write!(s, ",{v}");
        }
        for c in cells(&grnn_pred, i).into_iter().chain(cells(&bp_pred, i)) {
            let _ = write!(s, ",{c}");
        }
        s.push('\n');
    }
    let path = path.as_ref();
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}
