//! The GRNN estimator.
//!
//! Training stores every pattern once. Prediction for a query `x` is
//!
//! ```text
//! D_i = |x - X_i|^2
//! w_i = exp(-D_i / 2σ²) / Σ_k exp(-D_k / 2σ²)
//! ŷ   = Σ_i w_i Y_i
//! ```
//!
//! The exponentials are evaluated after subtracting `min_i D_i`, which leaves
//! the normalized weights unchanged but keeps at least one raw weight equal to
//! one. When every other weight underflows the result degrades to an equal
//! split over the nearest pattern(s) instead of `0/0`.

mod format;
mod sigma;

use rayon::prelude::*;

use crate::data::NormStats;
use crate::error::{check_dim, check_finite};
use crate::growth::GrowthPolicy;
use crate::{Error, Result};

pub use format::{read_model, write_model};
pub(crate) use format::{parse_floats, Header};
pub use sigma::{log_grid, select_sigma, SigmaChoice, SigmaSearch};

/// One stored exemplar.
#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Pattern {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_finite(&x, "pattern input")?;
        check_finite(&y, "pattern output")?;
        Ok(Self { x, y })
    }
}

/// Squared Euclidean distance between two inputs.
pub fn squared_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dim(a.len(), b.len())?;
    Ok(sq_dist(a, b))
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| {
            let d = p - q;
            d * d
        })
        .sum()
}

/// A trained GRNN: the pattern store, the smoothing parameter and, optionally,
/// the input normalization applied to queries before the distance.
///
/// Stored inputs live in normalized space; queries passed to the public
/// methods are raw and are normalized here when stats are attached.
#[derive(Clone, Debug, PartialEq)]
pub struct GrnnModel {
    patterns: Vec<Pattern>,
    sigma: f64,
    d_in: usize,
    d_out: usize,
    norm: Option<NormStats>,
    policy: Option<GrowthPolicy>,
}

impl GrnnModel {
    /// Single-pass training: validates and stores every pattern in order.
    pub fn train(patterns: Vec<Pattern>, sigma: f64) -> Result<Self> {
        let first = patterns.first().ok_or(Error::EmptyInput("patterns"))?;
        let (d_in, d_out) = (first.x.len(), first.y.len());
        let mut model = Self::empty(d_in, d_out, sigma)?;
        for p in &patterns {
            model.check_pattern(p)?;
        }
        model.patterns = patterns;
        Ok(model)
    }

    /// A model with no patterns yet, for incremental use through the growth gate.
    pub fn empty(d_in: usize, d_out: usize, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if d_in == 0 || d_out == 0 {
            return Err(Error::InvalidParameter(
                "input and output dimensions must be positive".into(),
            ));
        }
        Ok(Self {
            patterns: Vec::new(),
            sigma,
            d_in,
            d_out,
            norm: None,
            policy: None,
        })
    }

    pub fn with_norm_stats(mut self, stats: NormStats) -> Result<Self> {
        check_dim(self.d_in, stats.dim())?;
        self.norm = Some(stats);
        Ok(self)
    }

    pub fn with_policy(mut self, policy: GrowthPolicy) -> Self {
        self.policy = Some(policy);
        self
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn set_sigma(&mut self, sigma: f64) -> Result<()> {
        check_sigma(sigma)?;
        self.sigma = sigma;
        Ok(())
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn norm_stats(&self) -> Option<&NormStats> {
        self.norm.as_ref()
    }

    pub fn policy(&self) -> Option<&GrowthPolicy> {
        self.policy.as_ref()
    }

    /// Normalized kernel weights of every stored pattern for a raw query.
    pub fn kernel_weights(&self, x: &[f64]) -> Result<Vec<f64>> {
        let q = self.prepare_query(x)?;
        let mut w = Vec::with_capacity(self.len());
        let total = self.raw_weights(&q, &mut w);
        w.iter_mut().for_each(|v| *v /= total);
        Ok(w)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        let q = self.prepare_query(x)?;
        let mut w = Vec::with_capacity(self.len());
        Ok(self.predict_prepared(&q, &mut w))
    }

    /// Predicts every row of `xs`. Rows are evaluated in parallel; each row's
    /// result is identical to a sequential [`GrnnModel::predict`] call.
    pub fn predict_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        xs.par_iter()
            .map_init(
                || Vec::with_capacity(self.len()),
                |w, x| {
                    let q = self.prepare_query(x)?;
                    Ok(self.predict_prepared(&q, w))
                },
            )
            .collect()
    }

    /// Mean squared error of the model's predictions against the outputs of
    /// `patterns`, averaged over rows and output components.
    pub fn training_mse(&self, patterns: &[Pattern]) -> Result<f64> {
        if patterns.is_empty() {
            return Err(Error::EmptyInput("patterns"));
        }
        let (xs, ts): (Vec<_>, Vec<_>) = patterns.iter().map(|p| (p.x.clone(), p.y.clone())).unzip();
        self.mse(&xs, &ts)
    }

    /// Same as [`GrnnModel::training_mse`] over row-major input/target matrices.
    pub fn mse(&self, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64> {
        check_dim(inputs.len(), targets.len())?;
        for t in targets {
            check_dim(self.d_out, t.len())?;
        }
        let preds = self.predict_batch(inputs)?;
        crate::metrics::mse(&preds, targets).ok_or(Error::EmptyInput("patterns"))
    }

    /// Index and squared distance of the stored pattern nearest to a raw query.
    /// Ties resolve to the lowest index.
    pub fn nearest(&self, x: &[f64]) -> Result<Option<(usize, f64)>> {
        check_dim(self.d_in, x.len())?;
        check_finite(x, "query")?;
        let q = self.normalize_query(x);
        Ok(self.nearest_normalized(&q))
    }

    pub(crate) fn nearest_normalized(&self, q: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in self.patterns.iter().enumerate() {
            let d = sq_dist(q, &p.x);
            if best.map_or(true, |(_, b)| d < b) {
                best = Some((i, d));
            }
        }
        best
    }

    pub(crate) fn normalize_query(&self, x: &[f64]) -> Vec<f64> {
        match &self.norm {
            Some(stats) => stats.apply(x),
            None => x.to_vec(),
        }
    }

    pub(crate) fn check_pattern(&self, p: &Pattern) -> Result<()> {
        check_dim(self.d_in, p.x.len())?;
        check_dim(self.d_out, p.y.len())?;
        check_finite(&p.x, "pattern input")?;
        check_finite(&p.y, "pattern output")
    }

    /// Stores an already-normalized pattern.
    pub(crate) fn push_normalized(&mut self, p: Pattern) {
        self.patterns.push(p);
    }

    pub(crate) fn remove(&mut self, index: usize) -> Pattern {
        self.patterns.remove(index)
    }

    pub(crate) fn predict_normalized(&self, q: &[f64]) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.len());
        self.predict_prepared(q, &mut w)
    }

    fn prepare_query(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.is_empty() {
            return Err(Error::EmptyModel);
        }
        check_dim(self.d_in, x.len())?;
        check_finite(x, "query")?;
        Ok(self.normalize_query(x))
    }

    /// Fills `w` with shifted, unnormalized weights and returns their sum (≥ 1).
    fn raw_weights(&self, q: &[f64], w: &mut Vec<f64>) -> f64 {
        w.clear();
        let mut d_min = f64::INFINITY;
        for p in &self.patterns {
            let d = sq_dist(q, &p.x);
            d_min = d_min.min(d);
            w.push(d);
        }
        let scale = 1.0 / (2.0 * self.sigma * self.sigma);
        let mut total = 0.0;
        for v in w.iter_mut() {
            *v = (-(*v - d_min) * scale).exp();
            total += *v;
        }
        total
    }

    fn predict_prepared(&self, q: &[f64], w: &mut Vec<f64>) -> Vec<f64> {
        let total = self.raw_weights(q, w);
        let mut out = vec![0.0; self.d_out];
        let mut lo = vec![f64::INFINITY; self.d_out];
        let mut hi = vec![f64::NEG_INFINITY; self.d_out];
        for (wi, p) in w.iter().zip(&self.patterns) {
            for j in 0..self.d_out {
                let y = p.y[j];
                out[j] += wi * y;
                lo[j] = lo[j].min(y);
                hi[j] = hi[j].max(y);
            }
        }
        // Rounding in the weighted sum can step an ulp outside the hull of the
        // stored outputs.
        for j in 0..self.d_out {
            out[j] = (out[j] / total).clamp(lo[j], hi[j]);
        }
        out
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "sigma must be positive and finite, got {sigma}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: &[f64], y: &[f64]) -> Pattern {
        Pattern::new(x.to_vec(), y.to_vec()).unwrap()
    }

    fn two_point(sigma: f64) -> GrnnModel {
        GrnnModel::train(vec![p(&[0.0], &[0.0]), p(&[2.0], &[1.0])], sigma).unwrap()
    }

    #[test]
    fn squared_distance_cases() {
        assert_eq!(squared_distance(&[1.5, -2.0], &[1.5, -2.0]).unwrap(), 0.0);
        assert_eq!(squared_distance(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 8.0);
        assert_eq!(squared_distance(&[0.0], &[2.0]).unwrap(), 4.0);
        assert!(matches!(
            squared_distance(&[0.0], &[1.0, 2.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn single_pattern_weight_is_one() {
        let m = GrnnModel::train(vec![p(&[4.0, 1.0], &[3.7])], 0.3).unwrap();
        assert_eq!(m.kernel_weights(&[-100.0, 7.0]).unwrap(), vec![1.0]);
        assert_eq!(m.predict(&[1e5, -1e5]).unwrap(), vec![3.7]);
    }

    #[test]
    fn symmetric_query_splits_evenly() {
        let w = two_point(1.0).kernel_weights(&[1.0]).unwrap();
        assert_eq!(w, vec![0.5, 0.5]);
    }

    #[test]
    fn two_point_weights_and_prediction() {
        // D = (0.25, 2.25), so the weight ratio is exp(-1).
        let e = (-1.0f64).exp();
        let m = two_point(1.0);
        let w = m.kernel_weights(&[0.5]).unwrap();
        assert!((w[0] - 1.0 / (1.0 + e)).abs() < 1e-15);
        assert!((w[1] - e / (1.0 + e)).abs() < 1e-15);
        assert!((w[0] - 0.7311).abs() < 1e-4 && (w[1] - 0.2689).abs() < 1e-4);
        let y = m.predict(&[0.5]).unwrap()[0];
        assert!((y - 1.0 / (1.0 + 1.0f64.exp())).abs() < 1e-15);
        assert!((y - 0.26894).abs() < 1e-5);
    }

    #[test]
    fn tiny_sigma_recalls_nearest() {
        // Naive evaluation would be 0/0 here.
        let m = two_point(1e-4);
        assert_eq!(m.predict(&[0.4]).unwrap(), vec![0.0]);
        assert_eq!(m.kernel_weights(&[0.4]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn far_query_ties_split_equally() {
        let m = GrnnModel::train(
            vec![p(&[-1.0], &[2.0]), p(&[1.0], &[4.0]), p(&[3.0], &[100.0])],
            1e-3,
        )
        .unwrap();
        assert_eq!(m.kernel_weights(&[0.0]).unwrap(), vec![0.5, 0.5, 0.0]);
        assert_eq!(m.predict(&[0.0]).unwrap(), vec![3.0]);
    }

    #[test]
    fn duplicate_inputs_are_averaged() {
        let m = GrnnModel::train(vec![p(&[1.0], &[0.0]), p(&[1.0], &[1.0])], 0.5).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.predict(&[1.0]).unwrap(), vec![0.5]);
    }

    #[test]
    fn train_errors() {
        assert!(matches!(GrnnModel::train(vec![], 1.0), Err(Error::EmptyInput(_))));
        assert!(GrnnModel::train(vec![p(&[0.0], &[0.0])], 0.0).is_err());
        assert!(GrnnModel::train(vec![p(&[0.0], &[0.0])], -1.0).is_err());
        assert!(GrnnModel::train(vec![p(&[0.0], &[0.0])], f64::NAN).is_err());
        let mixed = vec![p(&[0.0], &[0.0]), p(&[1.0], &[0.0, 1.0])];
        assert!(matches!(GrnnModel::train(mixed, 1.0), Err(Error::Dimension { .. })));
        assert!(Pattern::new(vec![f64::NAN], vec![0.0]).is_err());
    }

    #[test]
    fn train_keeps_every_pattern_in_order() {
        let pats: Vec<_> = (0..94).map(|i| p(&[i as f64], &[(i * i) as f64])).collect();
        let m = GrnnModel::train(pats.clone(), 0.1).unwrap();
        assert_eq!(m.len(), 94);
        assert_eq!(m.patterns(), &pats[..]);
        assert_eq!(GrnnModel::train(vec![p(&[1.0], &[2.0])], 1.0).unwrap().len(), 1);
    }

    #[test]
    fn empty_model_rejects_queries() {
        let m = GrnnModel::empty(1, 1, 1.0).unwrap();
        assert!(matches!(m.predict(&[0.0]), Err(Error::EmptyModel)));
        assert!(matches!(m.kernel_weights(&[0.0]), Err(Error::EmptyModel)));
    }

    #[test]
    fn query_dimension_checked() {
        assert!(matches!(two_point(1.0).predict(&[0.0, 1.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn training_mse_cases() {
        let pats: Vec<_> = (0..10).map(|i| p(&[i as f64], &[(i as f64).sin()])).collect();
        let m = GrnnModel::train(pats.clone(), 0.05).unwrap();
        assert!(m.training_mse(&pats).unwrap() <= 1e-12);
        assert!(m.training_mse(&[]).is_err());

        let one = GrnnModel::train(vec![p(&[0.0], &[1.0])], 1.0).unwrap();
        assert_eq!(one.training_mse(&[p(&[0.0], &[0.0])]).unwrap(), 1.0);
        assert_eq!(one.training_mse(&[p(&[3.0], &[1.0])]).unwrap(), 0.0);
    }

    #[test]
    fn norm_stats_apply_to_queries() {
        let stats = NormStats::from_parts(vec![10.0], vec![2.0]).unwrap();
        let m = two_point(1.0).with_norm_stats(stats).unwrap();
        // raw 11 -> normalized 0.5
        let y = m.predict(&[11.0]).unwrap()[0];
        assert!((y - 1.0 / (1.0 + 1.0f64.exp())).abs() < 1e-15);
    }

    #[test]
    fn batch_matches_sequential() {
        let pats: Vec<_> = (0..30)
            .map(|i| p(&[(i as f64 * 0.37).sin(), i as f64 * 0.1], &[(i % 7) as f64]))
            .collect();
        let m = GrnnModel::train(pats, 0.2).unwrap();
        let qs: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64).cos(), i as f64 * 0.05]).collect();
        let batch = m.predict_batch(&qs).unwrap();
        for (q, b) in qs.iter().zip(&batch) {
            assert_eq!(&m.predict(q).unwrap(), b);
        }
    }
}
