//! Synthetic stand-ins for the eight benchmark datasets.
//!
//! The original benchmark files are bundled with a commercial toolbox and are
//! not redistributable, so each generator below produces a deterministic
//! dataset with the same task, row count and input/output shape, built from a
//! simple generative story in the original's units. Every generator documents
//! where its shape departs from the commonly cited description.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Dataset, Task};
use crate::{Error, Result};

/// A generated dataset plus human-readable provenance notes, written into the
/// `.spec` sidecar as `note=` lines.
#[derive(Clone, Debug)]
pub struct StandIn {
    pub dataset: Dataset,
    pub notes: Vec<String>,
}

/// `y = sin(x) + 0.5 sin(3x)` on `n` equally spaced points of `[0, 10]`.
pub fn synthetic_simplefit(n: usize) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("simplefit needs n >= 2, got {n}")));
    }
    let step = 10.0 / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
    let inputs = xs.iter().map(|&x| vec![x]).collect();
    let targets = xs.iter().map(|&x| vec![x.sin() + 0.5 * (3.0 * x).sin()]).collect();
    Dataset::new("simplefit", Task::Fitting, inputs, targets)?
        .with_column_names(vec!["x".into()], vec!["y".into()])
}

/// All eight stand-ins in benchmark order.
pub fn benchmark_suite(seed: u64) -> Result<Vec<StandIn>> {
    Ok(vec![
        StandIn {
            dataset: synthetic_simplefit(94)?,
            notes: vec!["synthetic 1-in/1-out smooth curve, 94 rows".into()],
        },
        abalone(seed)?,
        building_energy(seed)?,
        cholesterol(seed)?,
        engine(seed)?,
        breast_cancer(seed)?,
        iris(seed)?,
        thyroid(seed)?,
    ])
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gauss(rng: &mut ChaCha8Rng, mean: f64, sd: f64) -> f64 {
    Normal::new(mean, sd).expect("valid normal").sample(rng)
}

fn one_hot(k: usize, label: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[label] = 1.0;
    v
}

/// 4177 rows, 8 inputs (sex code and seven shell measurements), 1 output (rings).
pub fn abalone(seed: u64) -> Result<StandIn> {
    let mut rng = rng_for(seed, 1);
    let mut inputs = Vec::with_capacity(4177);
    let mut targets = Vec::with_capacity(4177);
    for _ in 0..4177 {
        let rings = gauss(&mut rng, 9.9, 3.2).round().clamp(1.0, 29.0);
        let sex = if rings < 8.0 && rng.gen_bool(0.7) {
            2.0
        } else {
            f64::from(rng.gen_range(0u8..2))
        };
        let length = (0.72 * (1.0 - (-rings / 6.0).exp()) + gauss(&mut rng, 0.0, 0.05)).max(0.08);
        let diameter = (0.79 * length + gauss(&mut rng, 0.0, 0.015)).max(0.05);
        let height = (0.34 * diameter + gauss(&mut rng, 0.0, 0.012)).max(0.01);
        let whole = (6.4 * length.powi(3) * (1.0 + gauss(&mut rng, 0.0, 0.1))).max(0.002);
        let shucked = whole * (0.43 + gauss(&mut rng, 0.0, 0.04)).clamp(0.2, 0.7);
        let viscera = whole * (0.22 + gauss(&mut rng, 0.0, 0.02)).clamp(0.1, 0.4);
        let shell = whole * (0.27 + 0.006 * (rings - 10.0) + gauss(&mut rng, 0.0, 0.03)).clamp(0.1, 0.6);
        inputs.push(vec![sex, length, diameter, height, whole, shucked, viscera, shell]);
        targets.push(vec![rings]);
    }
    let ds = Dataset::new("abalone", Task::Fitting, inputs, targets)?.with_column_names(
        names(&["sex", "length", "diameter", "height", "whole_weight", "shucked_weight", "viscera_weight", "shell_weight"]),
        names(&["rings"]),
    )?;
    Ok(StandIn {
        dataset: ds,
        notes: vec![
            "synthetic stand-in: growth curve for shell size, allometric weights, integer rings 1..29".into(),
            "sex coded 0=M 1=F 2=I".into(),
        ],
    })
}

/// 4208 hourly rows, 14 weather/calendar inputs, 3 outputs (electricity,
/// cold water, hot water) scaled to roughly [0, 1].
pub fn building_energy(seed: u64) -> Result<StandIn> {
    use std::f64::consts::TAU;
    let mut rng = rng_for(seed, 2);
    let n = 4208;
    let mut temps = Vec::with_capacity(n);
    let mut solars = Vec::with_capacity(n);
    let mut inputs = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for k in 0..n {
        let hour = (k % 24) as f64;
        let day = (k / 24) as f64 + 90.0;
        let weekday = if (k / 24) % 7 < 5 { 1.0 } else { 0.0 };
        let holiday = if rng.gen_bool(0.02) { 1.0 } else { 0.0 };
        let season = (TAU * (day - 200.0) / 365.0).cos();
        let diurnal = (TAU * (hour - 15.0) / 24.0).cos();
        let temp = 15.0 + 10.0 * season + 5.0 * diurnal + gauss(&mut rng, 0.0, 1.0);
        let humidity = (60.0 - 1.2 * (temp - 15.0) + gauss(&mut rng, 0.0, 5.0)).clamp(10.0, 100.0);
        let sun = (TAU * (hour - 6.0) / 24.0).sin().max(0.0);
        let solar = sun * (700.0 + 200.0 * season) * rng.gen_range(0.5..1.0);
        let wind = (3.0 + gauss(&mut rng, 0.0, 1.5)).abs();
        let pressure = 1013.0 + gauss(&mut rng, 0.0, 6.0);
        temps.push(temp);
        solars.push(solar);
        let lag = |v: &[f64], l: usize| v[k.saturating_sub(l)];
        inputs.push(vec![
            (TAU * day / 365.0).sin(),
            (TAU * day / 365.0).cos(),
            (TAU * hour / 24.0).sin(),
            (TAU * hour / 24.0).cos(),
            weekday,
            holiday,
            temp,
            humidity,
            solar,
            wind,
            lag(&temps, 1),
            lag(&temps, 3),
            lag(&solars, 1),
            pressure,
        ]);
        let occupied = weekday * (1.0 - holiday) * if (8.0..19.0).contains(&hour) { 1.0 } else { 0.15 };
        let elec = 0.25 + 0.45 * occupied + 0.012 * (temp - 22.0).max(0.0) + gauss(&mut rng, 0.0, 0.02);
        let cold = 0.04 * (temp - 18.0).max(0.0) + 0.0003 * solar + 0.1 * occupied + gauss(&mut rng, 0.0, 0.02);
        let hot = 0.03 * (15.0 - temp).max(0.0) + 0.25 * occupied + 0.05 + gauss(&mut rng, 0.0, 0.02);
        targets.push(vec![elec, cold, hot]);
    }
    let ds = Dataset::new("building_energy", Task::Fitting, inputs, targets)?.with_column_names(
        names(&[
            "doy_sin", "doy_cos", "hour_sin", "hour_cos", "weekday", "holiday", "temperature", "humidity",
            "solar", "wind", "temperature_lag1", "temperature_lag3", "solar_lag1", "pressure",
        ]),
        names(&["electricity", "cold_water", "hot_water"]),
    )?;
    Ok(StandIn {
        dataset: ds,
        notes: vec![
            "synthetic stand-in: hourly weather and calendar drivers of three building loads".into(),
            "14 inputs used (the dataset description also mentions 4 inputs; 14 is the coherent shape)".into(),
        ],
    })
}

/// 264 rows, 21 spectral inputs, 3 outputs (LDL, VLDL, HDL in mmol/L).
pub fn cholesterol(seed: u64) -> Result<StandIn> {
    let mut rng = rng_for(seed, 3);
    let peaks = [(5.0, 3.0), (10.0, 4.0), (15.0, 2.5)];
    let mut inputs = Vec::with_capacity(264);
    let mut targets = Vec::with_capacity(264);
    for _ in 0..264 {
        let conc = [rng.gen_range(1.0..5.0), rng.gen_range(0.1..1.5), rng.gen_range(0.6..2.2)];
        let baseline = gauss(&mut rng, 0.2, 0.02);
        let spectrum = (0..21)
            .map(|w| {
                let w = w as f64;
                let signal: f64 = conc
                    .iter()
                    .zip(&peaks)
                    .map(|(c, (mu, width))| c * (-(w - mu) * (w - mu) / (2.0 * width * width)).exp())
                    .sum();
                baseline + 0.1 * signal + gauss(&mut rng, 0.0, 0.002)
            })
            .collect();
        inputs.push(spectrum);
        targets.push(conc.to_vec());
    }
    let ds = Dataset::new("cholesterol", Task::Fitting, inputs, targets)?.with_column_names(
        (1..=21).map(|i| format!("band{i}")).collect(),
        names(&["ldl", "vldl", "hdl"]),
    )?;
    Ok(StandIn {
        dataset: ds,
        notes: vec![
            "synthetic stand-in: 21-band absorbance spectra mixing three lipoprotein peaks".into(),
            "shape follows the conventional public dataset (264 rows, 3 outputs); the 264-output/4208-row description is incoherent".into(),
        ],
    })
}

/// 1199 rows, 2 inputs (fuel rate, speed), 2 outputs (torque kN·m, NOx g/s).
pub fn engine(seed: u64) -> Result<StandIn> {
    let mut rng = rng_for(seed, 4);
    let mut inputs = Vec::with_capacity(1199);
    let mut targets = Vec::with_capacity(1199);
    for _ in 0..1199 {
        let fuel: f64 = rng.gen_range(0.0..1.0);
        let speed: f64 = rng.gen_range(0.1..1.0);
        let torque = 1.2 * fuel * (1.0 - 0.8 * (speed - 0.55).powi(2)) + gauss(&mut rng, 0.0, 0.01);
        let nox = 2.5 * fuel.powf(1.5) * (0.5 + speed) + gauss(&mut rng, 0.0, 0.02);
        inputs.push(vec![fuel, speed]);
        targets.push(vec![torque, nox]);
    }
    let ds = Dataset::new("engine", Task::Fitting, inputs, targets)?
        .with_column_names(names(&["fuel_rate", "speed"]), names(&["torque", "nox"]))?;
    Ok(StandIn {
        dataset: ds,
        notes: vec!["synthetic stand-in: smooth engine maps in scaled units".into()],
    })
}

/// 699 rows, 9 cytology scores, 2 classes (benign, malignant).
pub fn breast_cancer(seed: u64) -> Result<StandIn> {
    let mut rng = rng_for(seed, 5);
    let mut inputs = Vec::with_capacity(699);
    let mut targets = Vec::with_capacity(699);
    for i in 0..699 {
        let malignant = i >= 458;
        let (mu, sd) = if malignant { (7.0, 2.0) } else { (2.3, 1.2) };
        let x = (0..9).map(|_| gauss(&mut rng, mu, sd).clamp(1.0, 10.0)).collect();
        inputs.push(x);
        targets.push(one_hot(2, usize::from(malignant)));
    }
    let ds = Dataset::new("breast_cancer", Task::Classification, inputs, targets)?.with_column_names(
        names(&[
            "clump_thickness", "cell_size", "cell_shape", "adhesion", "epithelial_size", "bare_nuclei",
            "chromatin", "nucleoli", "mitoses",
        ]),
        names(&["benign", "malignant"]),
    )?;
    Ok(StandIn {
        dataset: ds,
        notes: vec![
            "synthetic stand-in: 458 benign / 241 malignant rows with continuous scores in [1, 10]".into(),
            "shape follows the conventional public dataset (9 inputs, 2 classes); the 4-input/3-class/150-row description matches iris".into(),
        ],
    })
}

/// 150 rows, 4 measurements, 3 species (50 each), drawn from per-class
/// Gaussians with the classic per-species means and deviations.
pub fn iris(seed: u64) -> Result<StandIn> {
    let mut rng = rng_for(seed, 6);
    let classes = [
        ([5.006, 3.428, 1.462, 0.246], [0.352, 0.379, 0.174, 0.105]),
        ([5.936, 2.770, 4.260, 1.326], [0.516, 0.314, 0.470, 0.198]),
        ([6.588, 2.974, 5.552, 2.026], [0.636, 0.322, 0.552, 0.275]),
    ];
    let mut inputs = Vec::with_capacity(150);
    let mut targets = Vec::with_capacity(150);
    for (c, (mu, sd)) in classes.iter().enumerate() {
        for _ in 0..50 {
            inputs.push((0..4).map(|j| gauss(&mut rng, mu[j], sd[j]).max(0.1)).collect());
            targets.push(one_hot(3, c));
        }
    }
    let ds = Dataset::new("iris", Task::Classification, inputs, targets)?.with_column_names(
        names(&["sepal_length", "sepal_width", "petal_length", "petal_width"]),
        names(&["setosa", "versicolor", "virginica"]),
    )?;
    Ok(StandIn {
        dataset: ds,
        notes: vec!["synthetic stand-in: class-conditional Gaussians, unrounded so inputs are distinct".into()],
    })
}

/// 7200 rows, 21 inputs (6 continuous hormone/age readings scaled to [0, 1]
/// plus 15 binary history flags), 3 classes (normal, hyperfunction, subnormal).
pub fn thyroid(seed: u64) -> Result<StandIn> {
    let mut rng = rng_for(seed, 7);
    let mut inputs = Vec::with_capacity(7200);
    let mut targets = Vec::with_capacity(7200);
    for _ in 0..7200 {
        let u: f64 = rng.gen_range(0.0..1.0);
        let class = if u < 0.926 {
            0
        } else if u < 0.949 {
            1
        } else {
            2
        };
        let (tsh, t3, tt4, fti) = match class {
            0 => (0.002, 0.020, 0.105, 0.110),
            1 => (0.0005, 0.035, 0.180, 0.190),
            _ => (0.030, 0.012, 0.060, 0.060),
        };
        let pos = |rng: &mut ChaCha8Rng, m: f64, rel: f64| (m * (1.0 + gauss(rng, 0.0, rel))).clamp(0.0, 1.0);
        let age = rng.gen_range(0.01..0.95);
        let cont = [
            age,
            pos(&mut rng, tsh, 0.5),
            pos(&mut rng, t3, 0.25),
            pos(&mut rng, tt4, 0.2),
            pos(&mut rng, 0.095, 0.15),
            pos(&mut rng, fti, 0.2),
        ];
        let mut x = Vec::with_capacity(21);
        for f in 0..15 {
            let p = match (f, class) {
                (2, 1) | (7, 2) => 0.4,
                (0, _) => 0.31,
                _ => 0.03,
            };
            x.push(if rng.gen_bool(p) { 1.0 } else { 0.0 });
        }
        x.extend_from_slice(&cont);
        inputs.push(x);
        targets.push(one_hot(3, class));
    }
    let mut input_names: Vec<String> = (1..=15).map(|i| format!("flag{i}")).collect();
    input_names.extend(names(&["age", "tsh", "t3", "tt4", "t4u", "fti"]));
    let ds = Dataset::new("thyroid", Task::Classification, inputs, targets)?
        .with_column_names(input_names, names(&["normal", "hyperfunction", "subnormal"]))?;
    Ok(StandIn {
        dataset: ds,
        notes: vec!["synthetic stand-in: class-dependent hormone levels, 92.6% normal".into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplefit_shape_and_values() {
        let ds = synthetic_simplefit(94).unwrap();
        assert_eq!(ds.rows(), 94);
        assert_eq!(ds.inputs[0], vec![0.0]);
        assert_eq!(ds.targets[0], vec![0.0]);
        assert_eq!(ds.inputs[93], vec![10.0]);
        assert!(synthetic_simplefit(1).is_err());
        for n in [2, 3, 94, 1000] {
            let ds = synthetic_simplefit(n).unwrap();
            assert_eq!(ds.rows(), n);
            assert!(ds.targets.iter().all(|t| t[0].abs() <= 1.5));
        }
    }

    #[test]
    fn suite_shapes() {
        let suite = benchmark_suite(0).unwrap();
        let shapes: Vec<(&str, usize, usize, usize)> = suite
            .iter()
            .map(|s| (s.dataset.name.as_str(), s.dataset.rows(), s.dataset.d_in(), s.dataset.d_out()))
            .collect();
        assert_eq!(
            shapes,
            vec![
                ("simplefit", 94, 1, 1),
                ("abalone", 4177, 8, 1),
                ("building_energy", 4208, 14, 3),
                ("cholesterol", 264, 21, 3),
                ("engine", 1199, 2, 2),
                ("breast_cancer", 699, 9, 2),
                ("iris", 150, 4, 3),
                ("thyroid", 7200, 21, 3),
            ]
        );
    }

    #[test]
    fn suite_is_deterministic() {
        let a = benchmark_suite(3).unwrap();
        let b = benchmark_suite(3).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.dataset, y.dataset);
        }
    }

    #[test]
    fn thyroid_class_balance() {
        let ds = thyroid(0).unwrap().dataset;
        let normal = ds.targets.iter().filter(|t| t[0] == 1.0).count() as f64 / ds.rows() as f64;
        assert!((normal - 0.926).abs() < 0.02, "{normal}");
    }
}
