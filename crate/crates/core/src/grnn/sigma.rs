//! Holdout grid search for the smoothing parameter.

use rayon::prelude::*;

use super::sq_dist;
use crate::data::{split, Dataset};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaSearch {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SigmaSearch {
    fn default() -> Self {
        Self {
            min: 1e-3,
            max: 10.0,
            steps: 25,
            train_fraction: 0.8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaChoice {
    pub sigma: f64,
    pub holdout_mse: f64,
    /// `(sigma, holdout mse)` for every grid point, in grid order.
    pub grid: Vec<(f64, f64)>,
}

/// `steps` log-spaced values from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && min.is_finite() && max.is_finite()) || steps == 0 {
        return Err(Error::InvalidParameter(format!(
            "bad sigma grid [{min}, {max}] x {steps}"
        )));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let (a, b) = (min.ln(), max.ln());
    Ok((0..steps)
        .map(|i| {
            if i == 0 {
                min
            } else if i == steps - 1 {
                max
            } else {
                (a + (b - a) * i as f64 / (steps - 1) as f64).exp()
            }
        })
        .collect())
}

/// Picks σ from a log-spaced grid by training on a seeded split of `dataset`
/// and scoring the held-out rows. Ties go to the smaller σ.
///
/// The inputs are used as given; normalize first if the model will be.
pub fn select_sigma(dataset: &Dataset, search: &SigmaSearch) -> Result<SigmaChoice> {
    let grid = log_grid(search.min, search.max, search.steps)?;
    if dataset.rows() < 2 {
        return Err(Error::EmptyInput("sigma search needs at least two rows"));
    }
    let (train, hold) = split(dataset, search.train_fraction, search.seed)?;
    let scales: Vec<f64> = grid.iter().map(|s| 1.0 / (2.0 * s * s)).collect();
    let d_out = dataset.d_out();

    // Distances are computed once per held-out row and reused for every σ.
    let per_row: Vec<Vec<f64>> = hold
        .inputs
        .par_iter()
        .zip(hold.targets.par_iter())
        .map(|(q, t)| {
            let dist: Vec<f64> = train.inputs.iter().map(|x| sq_dist(q, x)).collect();
            let d_min = dist.iter().copied().fold(f64::INFINITY, f64::min);
            let mut acc = vec![0.0; d_out];
            scales
                .iter()
                .map(|scale| {
                    acc.iter_mut().for_each(|a| *a = 0.0);
                    let mut total = 0.0;
                    for (d, y) in dist.iter().zip(&train.targets) {
                        let w = (-(d - d_min) * scale).exp();
                        total += w;
                        for (a, v) in acc.iter_mut().zip(y) {
                            *a += w * v;
                        }
                    }
                    acc.iter()
                        .zip(t)
                        .map(|(a, v)| {
                            let e = a / total - v;
                            e * e
                        })
                        .sum::<f64>()
                })
                .collect()
        })
        .collect();

    let denom = (hold.rows() * d_out) as f64;
    let scored: Vec<(f64, f64)> = grid
        .iter()
        .enumerate()
        .map(|(g, &s)| (s, per_row.iter().map(|r| r[g]).sum::<f64>() / denom))
        .collect();
    let (sigma, holdout_mse) = scored
        .iter()
        .copied()
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    Ok(SigmaChoice {
        sigma,
        holdout_mse,
        grid: scored,
    })
}
