//! One-hidden-layer feedforward network trained by full-batch gradient
//! descent: `y = W2 · tanh(W1 · x + b1) + b2`.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, check_finite};
use crate::grnn::{parse_floats, Header};
use crate::{Error, Result};

/// Weights are row-major: `w1` is `hidden x d_in`, `w2` is `d_out x hidden`.
#[derive(Clone, Debug, PartialEq)]
pub struct BpNetwork {
    d_in: usize,
    hidden: usize,
    d_out: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

/// Parameter-shaped gradient set.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl Gradients {
    fn zeros_like(net: &BpNetwork) -> Self {
        Self {
            w1: vec![0.0; net.w1.len()],
            b1: vec![0.0; net.b1.len()],
            w2: vec![0.0; net.w2.len()],
            b2: vec![0.0; net.b2.len()],
        }
    }

    fn scale(&mut self, s: f64) {
        for v in self.iter_mut() {
            *v *= s;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.w1.iter().chain(&self.b1).chain(&self.w2).chain(&self.b2)
    }

    fn iter_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w1
            .iter_mut()
            .chain(self.b1.iter_mut())
            .chain(self.w2.iter_mut())
            .chain(self.b2.iter_mut())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            learning_rate: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub final_mse: f64,
    pub epochs_run: usize,
    /// Seconds spent in the training loop only.
    pub wall_time_s: f64,
    /// MSE after each epoch's update.
    pub mse_history: Vec<f64>,
}

impl BpNetwork {
    /// Uniform initialization in `±1/sqrt(fan_in)` for every weight and bias.
    pub fn new(d_in: usize, hidden: usize, d_out: usize, seed: u64) -> Result<Self> {
        if d_in == 0 || hidden == 0 || d_out == 0 {
            return Err(Error::InvalidParameter(format!(
                "network sizes must be positive (got {d_in}-{hidden}-{d_out})"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize, fan_in: usize| -> Vec<f64> {
            let r = 1.0 / (fan_in as f64).sqrt();
            (0..n).map(|_| rng.gen_range(-r..=r)).collect()
        };
        let w1 = draw(hidden * d_in, d_in);
        let b1 = draw(hidden, d_in);
        let w2 = draw(d_out * hidden, hidden);
        let b2 = draw(d_out, hidden);
        Ok(Self {
            d_in,
            hidden,
            d_out,
            w1,
            b1,
            w2,
            b2,
        })
    }

    pub fn from_parts(
        d_in: usize,
        hidden: usize,
        d_out: usize,
        w1: Vec<f64>,
        b1: Vec<f64>,
        w2: Vec<f64>,
        b2: Vec<f64>,
    ) -> Result<Self> {
        if d_in == 0 || hidden == 0 || d_out == 0 {
            return Err(Error::InvalidParameter("network sizes must be positive".into()));
        }
        check_dim(hidden * d_in, w1.len())?;
        check_dim(hidden, b1.len())?;
        check_dim(d_out * hidden, w2.len())?;
        check_dim(d_out, b2.len())?;
        let net = Self {
            d_in,
            hidden,
            d_out,
            w1,
            b1,
            w2,
            b2,
        };
        check_finite(&net.flat(), "network parameters")?;
        Ok(net)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    /// All parameters in `w1, b1, w2, b2` order.
    pub fn flat(&self) -> Vec<f64> {
        self.w1.iter().chain(&self.b1).chain(&self.w2).chain(&self.b2).copied().collect()
    }

    pub fn set_flat(&mut self, values: &[f64]) -> Result<()> {
        check_dim(self.param_count(), values.len())?;
        let (a, rest) = values.split_at(self.w1.len());
        let (b, rest) = rest.split_at(self.b1.len());
        let (c, d) = rest.split_at(self.w2.len());
        self.w1.copy_from_slice(a);
        self.b1.copy_from_slice(b);
        self.w2.copy_from_slice(c);
        self.b2.copy_from_slice(d);
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.d_in, x.len())?;
        let mut h = vec![0.0; self.hidden];
        let mut y = vec![0.0; self.d_out];
        self.forward_into(x, &mut h, &mut y);
        Ok(y)
    }

    pub fn predict_batch(&self, inputs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        inputs.iter().map(|x| self.forward(x)).collect()
    }

    fn forward_into(&self, x: &[f64], h: &mut [f64], y: &mut [f64]) {
        for (k, hk) in h.iter_mut().enumerate() {
            let row = &self.w1[k * self.d_in..(k + 1) * self.d_in];
            let a: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b1[k];
            *hk = a.tanh();
        }
        for (j, yj) in y.iter_mut().enumerate() {
            let row = &self.w2[j * self.hidden..(j + 1) * self.hidden];
            *yj = row.iter().zip(h.iter()).map(|(w, v)| w * v).sum::<f64>() + self.b2[j];
        }
    }

    /// Exact gradient of `Σ_j (y_j - t_j)²` for one sample.
    pub fn gradients(&self, x: &[f64], t: &[f64]) -> Result<Gradients> {
        check_dim(self.d_in, x.len())?;
        check_dim(self.d_out, t.len())?;
        let mut g = Gradients::zeros_like(self);
        let mut scratch = Scratch::new(self);
        self.accumulate(x, t, &mut g, &mut scratch);
        Ok(g)
    }

    /// Gradient of the full-batch MSE (mean over rows and outputs), together
    /// with that MSE at the current parameters.
    pub fn batch_gradients(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<(Gradients, f64)> {
        self.check_data(inputs, targets)?;
        let mut g = Gradients::zeros_like(self);
        let mut scratch = Scratch::new(self);
        let mut sse = 0.0;
        for (x, t) in inputs.iter().zip(targets) {
            sse += self.accumulate(x, t, &mut g, &mut scratch);
        }
        let denom = (inputs.len() * self.d_out) as f64;
        g.scale(1.0 / denom);
        Ok((g, sse / denom))
    }

    pub fn apply(&mut self, g: &Gradients, learning_rate: f64) {
        let params = self
            .w1
            .iter_mut()
            .chain(self.b1.iter_mut())
            .chain(self.w2.iter_mut())
            .chain(self.b2.iter_mut());
        for (p, d) in params.zip(g.iter()) {
            *p -= learning_rate * d;
        }
    }

    pub fn mse(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64> {
        self.check_data(inputs, targets)?;
        let preds = self.predict_batch(inputs)?;
        Ok(crate::metrics::mse(&preds, targets).expect("nonempty"))
    }

    /// Full-batch gradient descent. Aborts with [`Error::Divergence`] as soon
    /// as the MSE or any parameter becomes non-finite.
    pub fn train(&mut self, inputs: &[Vec<f64>], targets: &[Vec<f64>], config: &TrainConfig) -> Result<TrainReport> {
        if config.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be at least 1".into()));
        }
        if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "learning rate must be positive, got {}",
                config.learning_rate
            )));
        }
        self.check_data(inputs, targets)?;

        let start = Instant::now();
        let mut history = Vec::with_capacity(config.epochs);
        for epoch in 0..config.epochs {
            let (g, mse) = self.batch_gradients(inputs, targets)?;
            if !mse.is_finite() {
                return Err(Error::Divergence { epoch, mse });
            }
            if epoch > 0 {
                history.push(mse);
            }
            self.apply(&g, config.learning_rate);
            if self.flat().iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { epoch, mse: f64::NAN });
            }
        }
        let final_mse = self.mse(inputs, targets)?;
        if !final_mse.is_finite() {
            return Err(Error::Divergence {
                epoch: config.epochs - 1,
                mse: final_mse,
            });
        }
        history.push(final_mse);
        let wall_time_s = start.elapsed().as_secs_f64();
        Ok(TrainReport {
            final_mse,
            epochs_run: config.epochs,
            wall_time_s,
            mse_history: history,
        })
    }

    fn check_data(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<()> {
        if inputs.is_empty() {
            return Err(Error::EmptyInput("training data"));
        }
        check_dim(inputs.len(), targets.len())?;
        for (x, t) in inputs.iter().zip(targets) {
            check_dim(self.d_in, x.len())?;
            check_dim(self.d_out, t.len())?;
        }
        Ok(())
    }

    /// Adds one sample's gradient into `g`; returns its squared error.
    fn accumulate(&self, x: &[f64], t: &[f64], g: &mut Gradients, s: &mut Scratch) -> f64 {
        self.forward_into(x, &mut s.h, &mut s.y);
        let mut sse = 0.0;
        for j in 0..self.d_out {
            let e = s.y[j] - t[j];
            sse += e * e;
            s.dy[j] = 2.0 * e;
        }
        s.dh.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.d_out {
            let dy = s.dy[j];
            g.b2[j] += dy;
            let off = j * self.hidden;
            for k in 0..self.hidden {
                g.w2[off + k] += dy * s.h[k];
                s.dh[k] += dy * self.w2[off + k];
            }
        }
        for k in 0..self.hidden {
            let da = s.dh[k] * (1.0 - s.h[k] * s.h[k]);
            g.b1[k] += da;
            let off = k * self.d_in;
            for i in 0..self.d_in {
                g.w1[off + i] += da * x[i];
            }
        }
        sse
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("bpnn v1 d_in={} hidden={} d_out={}\n", self.d_in, self.hidden, self.d_out);
        for (label, v) in [("w1", &self.w1), ("b1", &self.b1), ("w2", &self.w2), ("b2", &self.b2)] {
            s.push_str(label);
            for x in v {
                let _ = write!(s, ",{x}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        parse_network(text, Path::new("<text>"))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_network(&text, path)
    }
}

struct Scratch {
    h: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
    dh: Vec<f64>,
}

impl Scratch {
    fn new(net: &BpNetwork) -> Self {
        Self {
            h: vec![0.0; net.hidden],
            y: vec![0.0; net.d_out],
            dy: vec![0.0; net.d_out],
            dh: vec![0.0; net.hidden],
        }
    }
}

fn parse_network(text: &str, path: &Path) -> Result<BpNetwork> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or_else(|| Error::parse(path, 1, "empty network file"))?;
    let header = Header::parse(head, "bpnn", path)?;
    let d_in: usize = header.require("d_in", path)?;
    let hidden: usize = header.require("hidden", path)?;
    let d_out: usize = header.require("d_out", path)?;
    let mut blocks = Vec::with_capacity(4);
    for label in ["w1", "b1", "w2", "b2"] {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 0, format!("missing `{label}` line")))?;
        let rest = line
            .strip_prefix(label)
            .and_then(|r| r.strip_prefix(','))
            .ok_or_else(|| Error::parse(path, no, format!("expected `{label},...`")))?;
        blocks.push(parse_floats(rest, no, path)?);
    }
    if let Some((no, _)) = lines.next() {
        return Err(Error::parse(path, no, "unexpected trailing content"));
    }
    let b2 = blocks.pop().expect("four blocks");
    let w2 = blocks.pop().expect("four blocks");
    let b1 = blocks.pop().expect("four blocks");
    let w1 = blocks.pop().expect("four blocks");
    BpNetwork::from_parts(d_in, hidden, d_out, w1, b1, w2, b2).map_err(|e| Error::parse(path, 0, e.to_string()))
}
