//! Series-parallel identification: a GRNN predicts the next plant output from
//! measured past outputs and inputs.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::control::{quad_altitude_step, QuadAltitudeState, QuadParams};
use crate::data::{Dataset, Task};
use crate::grnn::GrnnModel;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlantSpec {
    /// `y(k+1) = a y(k) + b u(k)`
    LinearFirstOrder { a: f64, b: f64 },
    /// `y(k+1) = y(k) / (1 + y(k)²) + u(k)³`
    NonlinearBenchmark,
    /// Altitude of [`crate::control`]'s quadcopter, starting at rest; `u` is thrust.
    QuadAltitude { params: QuadParams, dt: f64 },
}

impl PlantSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PlantSpec::LinearFirstOrder { a, b } if !(a.is_finite() && b.is_finite()) => {
                Err(Error::InvalidParameter("plant parameters must be finite".into()))
            }
            PlantSpec::QuadAltitude { dt, .. } if !(dt > 0.0 && dt <= 0.1) => {
                Err(Error::InvalidParameter(format!("dt must lie in (0, 0.1], got {dt}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LagConfig {
    pub n_y: usize,
    pub n_u: usize,
}

impl Default for LagConfig {
    fn default() -> Self {
        Self { n_y: 1, n_u: 1 }
    }
}

impl LagConfig {
    pub fn new(n_y: usize, n_u: usize) -> Result<Self> {
        if n_u == 0 {
            return Err(Error::InvalidParameter("n_u must be at least 1".into()));
        }
        Ok(Self { n_y, n_u })
    }

    pub fn width(&self) -> usize {
        self.n_y + self.n_u
    }

    pub fn max_lag(&self) -> usize {
        self.n_y.max(self.n_u)
    }
}

/// Output trajectory of the plant driven by `u`, with `y[0] = y0`.
pub fn simulate_plant(spec: &PlantSpec, u: &[f64], y0: f64) -> Result<Vec<f64>> {
    spec.validate()?;
    if u.iter().any(|v| !v.is_finite()) || !y0.is_finite() {
        return Err(Error::NonFinite("plant input"));
    }
    let mut y = Vec::with_capacity(u.len());
    if u.is_empty() {
        return Ok(y);
    }
    y.push(y0);
    let mut quad = QuadAltitudeState { z: y0, vz: 0.0 };
    for (k, &uk) in u[..u.len() - 1].iter().enumerate() {
        let yk = y[k];
        let next = match *spec {
            PlantSpec::LinearFirstOrder { a, b } => a * yk + b * uk,
            PlantSpec::NonlinearBenchmark => yk / (1.0 + yk * yk) + uk * uk * uk,
            PlantSpec::QuadAltitude { params, dt } => {
                quad = quad_altitude_step(&params, quad, uk, dt).map_err(|_| Error::BlowUp { step: k })?;
                quad.z
            }
        };
        if !next.is_finite() {
            return Err(Error::BlowUp { step: k });
        }
        y.push(next);
    }
    Ok(y)
}

/// Regressor row for time `k`: `(y(k-1) .. y(k-n_y), u(k-1) .. u(k-n_u))`.
pub fn regressor(u: &[f64], y: &[f64], lags: &LagConfig, k: usize) -> Vec<f64> {
    debug_assert!(k >= lags.max_lag());
    let mut row = Vec::with_capacity(lags.width());
    row.extend((1..=lags.n_y).map(|i| y[k - i]));
    row.extend((1..=lags.n_u).map(|i| u[k - i]));
    row
}

pub fn build_sysid_dataset(u: &[f64], y: &[f64], lags: &LagConfig) -> Result<Dataset> {
    if u.len() != y.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            got: y.len(),
        });
    }
    let m = lags.max_lag();
    if u.len() <= m {
        return Err(Error::InvalidParameter(format!(
            "sequences of length {} are too short for lag {m}",
            u.len()
        )));
    }
    let inputs = (m..u.len()).map(|k| regressor(u, y, lags, k)).collect();
    let targets = (m..u.len()).map(|k| vec![y[k]]).collect();
    let mut names: Vec<String> = (1..=lags.n_y).map(|i| format!("y_lag{i}")).collect();
    names.extend((1..=lags.n_u).map(|i| format!("u_lag{i}")));
    Dataset::new("sysid", Task::Fitting, inputs, targets)?.with_column_names(names, vec!["y".into()])
}

/// Uniform random excitation in `[lo, hi]`.
pub fn excitation(len: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(lo..=hi)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentReport {
    pub mse: f64,
    /// Time indices of the evaluated rows.
    pub k: Vec<usize>,
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    pub y_hat: Vec<f64>,
}

impl IdentReport {
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut s = String::from("k,u,y,y_hat\n");
        for i in 0..self.k.len() {
            let _ = writeln!(s, "{},{},{},{}", self.k[i], self.u[i], self.y[i], self.y_hat[i]);
        }
        std::fs::write(path, s).map_err(|e| Error::io(path, e))
    }
}

/// Drives the true plant with `test_u` and predicts every output from the
/// measured history. Predictions are never fed back.
pub fn evaluate_identifier(
    model: &GrnnModel,
    spec: &PlantSpec,
    lags: &LagConfig,
    test_u: &[f64],
    y0: f64,
) -> Result<IdentReport> {
    if model.d_in() != lags.width() {
        return Err(Error::Dimension {
            expected: lags.width(),
            got: model.d_in(),
        });
    }
    let y = simulate_plant(spec, test_u, y0)?;
    let m = lags.max_lag();
    if y.len() <= m {
        return Err(Error::InvalidParameter("test sequence shorter than the lag window".into()));
    }
    let rows: Vec<Vec<f64>> = (m..y.len()).map(|k| regressor(test_u, &y, lags, k)).collect();
    let y_hat: Vec<f64> = model.predict_batch(&rows)?.into_iter().map(|v| v[0]).collect();
    let y_true = y[m..].to_vec();
    let mse = crate::metrics::mse_scalar(&y_hat, &y_true).expect("nonempty");
    Ok(IdentReport {
        mse,
        k: (m..y.len()).collect(),
        u: test_u[m..].to_vec(),
        y: y_true,
        y_hat,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentConfig {
    pub plant: PlantSpec,
    pub lags: LagConfig,
    pub sigma: f64,
    pub train_steps: usize,
    pub test_steps: usize,
    pub u_range: (f64, f64),
    pub y0: f64,
    pub seed: u64,
}

impl Default for IdentConfig {
    fn default() -> Self {
        Self {
            plant: PlantSpec::LinearFirstOrder { a: 0.5, b: 1.0 },
            lags: LagConfig::default(),
            sigma: 0.05,
            train_steps: 4000,
            test_steps: 400,
            u_range: (-1.0, 1.0),
            y0: 0.0,
            seed: 0,
        }
    }
}

/// The sinusoidal test input `center + amp · sin(k / 10)`.
pub fn sine_input(len: usize, center: f64, amp: f64) -> Vec<f64> {
    (0..len).map(|k| center + amp * (k as f64 / 10.0).sin()).collect()
}

/// Trains on random excitation and evaluates on a sinusoid centred in the
/// excitation range with a quarter of its width as amplitude.
pub fn identify(config: &IdentConfig) -> Result<(GrnnModel, IdentReport)> {
    let (lo, hi) = config.u_range;
    if !(hi > lo) {
        return Err(Error::InvalidParameter("u range must be nonempty".into()));
    }
    let u = excitation(config.train_steps, lo, hi, config.seed);
    let y = simulate_plant(&config.plant, &u, config.y0)?;
    let ds = build_sysid_dataset(&u, &y, &config.lags)?;
    let model = GrnnModel::train(ds.patterns(), config.sigma)?;
    let test_u = sine_input(config.test_steps, 0.5 * (lo + hi), 0.25 * (hi - lo));
    let report = evaluate_identifier(&model, &config.plant, &config.lags, &test_u, config.y0)?;
    Ok((model, report))
}
