//! Datasets: in-memory representation, z-score normalization, seeded splits,
//! CSV ingestion and synthetic benchmark stand-ins.

mod csv;
pub mod standins;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, check_finite};
use crate::grnn::Pattern;
use crate::{Error, Result};

pub use self::csv::{load_csv, load_dir, write_csv, CsvSpec};
pub use standins::{benchmark_suite, synthetic_simplefit};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Fitting,
    Classification,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Fitting => "fitting",
            Task::Classification => "classification",
        }
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fitting" => Ok(Task::Fitting),
            "classification" => Ok(Task::Classification),
            other => Err(Error::InvalidParameter(format!("unknown task `{other}`"))),
        }
    }
}

/// Row-major inputs and targets with column metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub task: Task,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
    pub input_names: Vec<String>,
    pub target_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        task: Task,
        inputs: Vec<Vec<f64>>,
        targets: Vec<Vec<f64>>,
    ) -> Result<Self> {
        check_dim(inputs.len(), targets.len())?;
        let d_in = inputs.first().map_or(0, Vec::len);
        let d_out = targets.first().map_or(0, Vec::len);
        for (x, t) in inputs.iter().zip(&targets) {
            check_dim(d_in, x.len())?;
            check_dim(d_out, t.len())?;
            check_finite(x, "dataset input")?;
            check_finite(t, "dataset target")?;
        }
        if task == Task::Classification {
            for (i, t) in targets.iter().enumerate() {
                let ones = t.iter().filter(|&&v| v == 1.0).count();
                let zeros = t.iter().filter(|&&v| v == 0.0).count();
                if ones != 1 || ones + zeros != t.len() {
                    return Err(Error::InvalidParameter(format!(
                        "classification target row {i} is not one-hot"
                    )));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            task,
            input_names: (1..=d_in).map(|i| format!("x{i}")).collect(),
            target_names: (1..=d_out).map(|i| format!("y{i}")).collect(),
            inputs,
            targets,
        })
    }

    pub fn with_column_names(mut self, inputs: Vec<String>, targets: Vec<String>) -> Result<Self> {
        check_dim(self.d_in(), inputs.len())?;
        check_dim(self.d_out(), targets.len())?;
        self.input_names = inputs;
        self.target_names = targets;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn d_in(&self) -> usize {
        self.input_names.len()
    }

    pub fn d_out(&self) -> usize {
        self.target_names.len()
    }

    pub fn patterns(&self) -> Vec<Pattern> {
        self.inputs
            .iter()
            .zip(&self.targets)
            .map(|(x, y)| Pattern {
                x: x.clone(),
                y: y.clone(),
            })
            .collect()
    }

    fn subset(&self, idx: &[usize]) -> Self {
        Self {
            name: self.name.clone(),
            task: self.task,
            inputs: idx.iter().map(|&i| self.inputs[i].clone()).collect(),
            targets: idx.iter().map(|&i| self.targets[i].clone()).collect(),
            input_names: self.input_names.clone(),
            target_names: self.target_names.clone(),
        }
    }
}

/// Per-input-column z-score parameters (population standard deviation).
#[derive(Clone, Debug, PartialEq)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Columns that were constant in the fitting data; they pass through
    /// unchanged (mean 0, std 1).
    pub constant: Vec<bool>,
}

impl NormStats {
    pub fn fit(inputs: &[Vec<f64>]) -> Result<Self> {
        let first = inputs.first().ok_or(Error::EmptyInput("dataset"))?;
        let d = first.len();
        let n = inputs.len() as f64;
        let mut mean = vec![0.0; d];
        for x in inputs {
            check_dim(d, x.len())?;
            for (m, v) in mean.iter_mut().zip(x) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for x in inputs {
            for ((s, v), m) in var.iter_mut().zip(x).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let mut std: Vec<f64> = var.iter().map(|s| (s / n).sqrt()).collect();
        let mut constant = vec![false; d];
        for j in 0..d {
            if std[j] <= 1e-12 * mean[j].abs().max(1.0) {
                constant[j] = true;
                mean[j] = 0.0;
                std[j] = 1.0;
            }
        }
        Ok(Self { mean, std, constant })
    }

    pub fn from_parts(mean: Vec<f64>, std: Vec<f64>) -> Result<Self> {
        let n = mean.len();
        Self::from_parts_flagged(mean, std, vec![false; n])
    }

    pub fn from_parts_flagged(mean: Vec<f64>, std: Vec<f64>, constant: Vec<bool>) -> Result<Self> {
        check_dim(mean.len(), std.len())?;
        check_dim(mean.len(), constant.len())?;
        check_finite(&mean, "norm mean")?;
        if std.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidParameter("norm stddev must be positive".into()));
        }
        Ok(Self { mean, std, constant })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn has_constant(&self) -> bool {
        self.constant.iter().any(|&c| c)
    }

    /// Applies the transform. `x` must have [`NormStats::dim`] entries.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim());
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

/// Z-scores every input column; targets are untouched.
pub fn normalize(dataset: &Dataset) -> Result<(Dataset, NormStats)> {
    let stats = NormStats::fit(&dataset.inputs)?;
    let mut out = dataset.clone();
    for x in &mut out.inputs {
        *x = stats.apply(x);
    }
    Ok((out, stats))
}

pub fn apply_norm(stats: &NormStats, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(stats.dim(), x.len())?;
    Ok(stats.apply(x))
}

/// Seeded shuffle split into `(train, rest)`. Both parts are nonempty.
pub fn split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let n = dataset.rows();
    if n < 2 {
        return Err(Error::EmptyInput("split needs at least two rows"));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = ((train_fraction * n as f64).round() as usize).clamp(1, n - 1);
    Ok((dataset.subset(&idx[..n_train]), dataset.subset(&idx[n_train..])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn column(values: &[f64]) -> Dataset {
        Dataset::new(
            "c",
            Task::Fitting,
            values.iter().map(|&v| vec![v]).collect(),
            values.iter().map(|_| vec![0.0]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn z_score_two_values() {
        let (n, s) = normalize(&column(&[0.0, 2.0])).unwrap();
        assert_eq!(n.inputs, vec![vec![-1.0], vec![1.0]]);
        assert_eq!(s.mean, vec![1.0]);
        assert_eq!(s.std, vec![1.0]);
        assert!(!s.has_constant());
    }

    #[test]
    fn standardized_column_is_fixed_point() {
        let (n, _) = normalize(&column(&[-1.0, 1.0, -1.0, 1.0])).unwrap();
        for (a, b) in n.inputs.iter().zip([-1.0, 1.0, -1.0, 1.0]) {
            assert!((a[0] - b).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_column_flagged_and_unchanged() {
        let ds = Dataset::new(
            "c",
            Task::Fitting,
            vec![vec![3.3, 0.0], vec![3.3, 1.0], vec![3.3, 2.0]],
            vec![vec![0.0]; 3],
        )
        .unwrap();
        let (n, s) = normalize(&ds).unwrap();
        assert!(s.constant[0] && !s.constant[1]);
        assert!(n.inputs.iter().all(|x| x[0] == 3.3));
    }

    #[test]
    fn targets_untouched_and_apply_reproduces() {
        let ds = Dataset::new(
            "c",
            Task::Fitting,
            vec![vec![1.0, 10.0], vec![2.0, 30.0], vec![4.0, 20.0]],
            vec![vec![5.0], vec![6.0], vec![7.0]],
        )
        .unwrap();
        let (n, s) = normalize(&ds).unwrap();
        assert_eq!(n.targets, ds.targets);
        for (raw, norm) in ds.inputs.iter().zip(&n.inputs) {
            assert_eq!(&apply_norm(&s, raw).unwrap(), norm);
        }
        assert!(apply_norm(&s, &[1.0]).is_err());
    }

    #[test]
    fn split_sizes_and_determinism() {
        let ds = column(&(0..100).map(f64::from).collect::<Vec<_>>());
        let (a, b) = split(&ds, 0.8, 7).unwrap();
        assert_eq!((a.rows(), b.rows()), (80, 20));
        let mut all: Vec<f64> = a.inputs.iter().chain(&b.inputs).map(|x| x[0]).collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..100).map(f64::from).collect::<Vec<_>>());
        assert_eq!(split(&ds, 0.8, 7).unwrap(), (a, b));
        assert!(split(&ds, 1.0, 7).is_err());
        assert!(split(&ds, 0.0, 7).is_err());
    }

    #[test]
    fn rejects_bad_one_hot() {
        assert!(Dataset::new("c", Task::Classification, vec![vec![0.0]], vec![vec![1.0, 1.0]]).is_err());
        assert!(Dataset::new("c", Task::Classification, vec![vec![0.0]], vec![vec![0.5, 0.5]]).is_err());
        assert!(Dataset::new("c", Task::Classification, vec![vec![0.0]], vec![vec![0.0, 1.0]]).is_ok());
    }

    #[test]
    fn rejects_ragged_and_nan() {
        assert!(Dataset::new("c", Task::Fitting, vec![vec![0.0], vec![0.0, 1.0]], vec![vec![0.0]; 2]).is_err());
        assert!(Dataset::new("c", Task::Fitting, vec![vec![f64::NAN]], vec![vec![0.0]]).is_err());
        assert!(Dataset::new("c", Task::Fitting, vec![vec![0.0]], vec![]).is_err());
    }

    proptest! {
        #[test]
        fn normalized_columns_are_standard(
            rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..60)
        ) {
            let ds = Dataset::new("p", Task::Fitting, rows.clone(), vec![vec![0.0]; rows.len()]).unwrap();
            let (n, s) = normalize(&ds).unwrap();
            let count = n.rows() as f64;
            for j in 0..3 {
                if s.constant[j] { continue; }
                let mean: f64 = n.inputs.iter().map(|x| x[j]).sum::<f64>() / count;
                let var: f64 = n.inputs.iter().map(|x| (x[j] - mean).powi(2)).sum::<f64>() / count;
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!((var.sqrt() - 1.0).abs() < 1e-9);
            }
        }
    }
}
