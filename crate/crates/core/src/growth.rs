//! Bounded growth of the pattern store.
//!
//! A candidate is admitted when the store is empty, when it is farther than
//! the novelty radius from every stored input, or when it lies inside the
//! radius but the current prediction misses its output by more than the error
//! gate. At capacity the most redundant stored pattern (smallest distance to
//! its own nearest neighbour, lowest index on ties) is evicted first.

use crate::grnn::{sq_dist, GrnnModel, Pattern};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthPolicy {
    /// Squared distance to the nearest stored input above which a candidate is
    /// admitted unconditionally.
    pub novelty_radius: f64,
    /// Largest per-component prediction error tolerated before a near
    /// duplicate is admitted anyway.
    pub error_gate: f64,
    pub max_patterns: usize,
}

impl GrowthPolicy {
    pub fn new(novelty_radius: f64, error_gate: f64, max_patterns: usize) -> Result<Self> {
        let ok = novelty_radius.is_finite()
            && novelty_radius >= 0.0
            && error_gate.is_finite()
            && error_gate >= 0.0
            && max_patterns >= 1;
        if ok {
            Ok(Self {
                novelty_radius,
                error_gate,
                max_patterns,
            })
        } else {
            Err(Error::InvalidParameter(format!(
                "growth policy needs delta >= 0, epsilon >= 0, max_patterns >= 1 \
                 (got {novelty_radius}, {error_gate}, {max_patterns})"
            )))
        }
    }
}

/// Which clause of the gate decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    Empty,
    Novel,
    Corrective,
    Redundant,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Admission {
    pub insert: bool,
    pub reason: Reason,
    /// Squared distance to the nearest stored input, if any.
    pub nearest: Option<f64>,
}

impl GrnnModel {
    /// Evaluates the admission gate for a raw (unnormalized) candidate.
    pub fn should_insert(&self, candidate: &Pattern, policy: &GrowthPolicy) -> Result<Admission> {
        self.check_pattern(candidate)?;
        let q = self.normalize_query(&candidate.x);
        Ok(self.admission(&q, &candidate.y, policy))
    }

    /// Offers a raw candidate to the store under `policy`. Returns whether it
    /// was stored. The pattern count never exceeds `policy.max_patterns`.
    pub fn insert_bounded(&mut self, candidate: &Pattern, policy: &GrowthPolicy) -> Result<bool> {
        self.check_pattern(candidate)?;
        let q = self.normalize_query(&candidate.x);
        if !self.admission(&q, &candidate.y, policy).insert {
            return Ok(false);
        }
        while self.len() >= policy.max_patterns {
            let victim = self.most_redundant().expect("store is nonempty at capacity");
            self.remove(victim);
        }
        self.push_normalized(Pattern {
            x: q,
            y: candidate.y.clone(),
        });
        Ok(true)
    }

    /// Index of the stored pattern closest to its own nearest neighbour.
    pub fn most_redundant(&self) -> Option<usize> {
        let pats = self.patterns();
        if pats.len() <= 1 {
            return (!pats.is_empty()).then_some(0);
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, a) in pats.iter().enumerate() {
            let nn = pats
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, b)| sq_dist(&a.x, &b.x))
                .fold(f64::INFINITY, f64::min);
            if best.map_or(true, |(_, d)| nn < d) {
                best = Some((i, nn));
            }
        }
        best.map(|(i, _)| i)
    }

    fn admission(&self, q: &[f64], y: &[f64], policy: &GrowthPolicy) -> Admission {
        let Some((_, d)) = self.nearest_normalized(q) else {
            return Admission {
                insert: true,
                reason: Reason::Empty,
                nearest: None,
            };
        };
        let reason = if d > policy.novelty_radius {
            Reason::Novel
        } else {
            let pred = self.predict_normalized(q);
            let err = pred
                .iter()
                .zip(y)
                .map(|(p, t)| (p - t).abs())
                .fold(0.0, f64::max);
            if err > policy.error_gate {
                Reason::Corrective
            } else {
                Reason::Redundant
            }
        };
        Admission {
            insert: reason != Reason::Redundant,
            reason,
            nearest: Some(d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: &[f64], y: &[f64]) -> Pattern {
        Pattern::new(x.to_vec(), y.to_vec()).unwrap()
    }

    fn policy(d: f64, e: f64, n: usize) -> GrowthPolicy {
        GrowthPolicy::new(d, e, n).unwrap()
    }

    #[test]
    fn policy_validation() {
        assert!(GrowthPolicy::new(-1.0, 0.0, 1).is_err());
        assert!(GrowthPolicy::new(0.0, -1.0, 1).is_err());
        assert!(GrowthPolicy::new(0.0, 0.0, 0).is_err());
        assert!(GrowthPolicy::new(0.0, 0.0, 1).is_ok());
    }

    #[test]
    fn empty_model_admits() {
        let m = GrnnModel::empty(1, 1, 1.0).unwrap();
        let a = m.should_insert(&p(&[3.0], &[1.0]), &policy(0.1, 0.1, 10)).unwrap();
        assert!(a.insert);
        assert_eq!(a.reason, Reason::Empty);
    }

    #[test]
    fn exact_duplicate_rejected() {
        let m = GrnnModel::train(vec![p(&[1.0, 2.0], &[3.0])], 0.5).unwrap();
        let a = m.should_insert(&p(&[1.0, 2.0], &[3.0]), &policy(0.1, 0.1, 10)).unwrap();
        assert!(!a.insert);
        assert_eq!(a.reason, Reason::Redundant);
    }

    #[test]
    fn distance_clause_fires_before_error_clause() {
        // Nearest squared distance is 0.25 > delta, so the candidate is novel
        // even though the model already predicts its output.
        let m = GrnnModel::train(vec![p(&[0.0], &[0.0]), p(&[2.0], &[1.0])], 1.0).unwrap();
        let cand = p(&[0.5], &[0.26894]);
        let a = m.should_insert(&cand, &policy(0.01, 0.05, 10)).unwrap();
        assert!(a.insert);
        assert_eq!(a.reason, Reason::Novel);
        assert_eq!(a.nearest, Some(0.25));
        // With the candidate inside the radius the error gate decides.
        let a = m.should_insert(&cand, &policy(0.3, 0.05, 10)).unwrap();
        assert!(!a.insert);
        assert_eq!(a.reason, Reason::Redundant);
        let a = m.should_insert(&p(&[0.5], &[0.9]), &policy(0.3, 0.05, 10)).unwrap();
        assert!(a.insert);
        assert_eq!(a.reason, Reason::Corrective);
    }

    #[test]
    fn dimension_mismatch() {
        let m = GrnnModel::empty(2, 1, 1.0).unwrap();
        assert!(m.should_insert(&p(&[1.0], &[1.0]), &policy(0.1, 0.1, 10)).is_err());
    }

    #[test]
    fn capacity_one_replaces() {
        let mut m = GrnnModel::train(vec![p(&[0.0], &[0.0])], 1.0).unwrap();
        let cand = p(&[10.0], &[5.0]);
        assert!(m.insert_bounded(&cand, &policy(0.1, 0.1, 1)).unwrap());
        assert_eq!(m.patterns(), &[cand][..]);
    }

    #[test]
    fn duplicate_insert_is_idempotent() {
        let mut m = GrnnModel::empty(1, 1, 0.5).unwrap();
        let pol = policy(1e-3, 0.0, 10);
        let c = p(&[0.3], &[0.7]);
        assert!(m.insert_bounded(&c, &pol).unwrap());
        let before = m.clone();
        assert!(!m.insert_bounded(&c, &pol).unwrap());
        assert_eq!(m, before);
    }

    #[test]
    fn eviction_removes_tightest_pair_member() {
        let mut m = GrnnModel::train(
            vec![p(&[0.0], &[0.0]), p(&[5.0], &[0.0]), p(&[5.1], &[0.0]), p(&[9.0], &[0.0])],
            1.0,
        )
        .unwrap();
        assert_eq!(m.most_redundant(), Some(1));
        assert!(m.insert_bounded(&p(&[20.0], &[1.0]), &policy(0.1, 0.1, 4)).unwrap());
        let xs: Vec<f64> = m.patterns().iter().map(|p| p.x[0]).collect();
        assert_eq!(xs, vec![0.0, 5.1, 9.0, 20.0]);
    }

    #[test]
    fn normalized_store() {
        let stats = crate::data::NormStats::from_parts(vec![10.0], vec![2.0]).unwrap();
        let mut m = GrnnModel::empty(1, 1, 0.5).unwrap().with_norm_stats(stats).unwrap();
        m.insert_bounded(&p(&[12.0], &[1.0]), &policy(0.1, 0.1, 5)).unwrap();
        assert_eq!(m.patterns()[0].x, vec![1.0]);
        assert_eq!(m.predict(&[12.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn stream_respects_capacity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pol = policy(1e-3, 0.05, 100);
        let mut m = GrnnModel::empty(3, 1, 0.2).unwrap();
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y = vec![rng.gen_range(-1.0..1.0)];
            m.insert_bounded(&Pattern::new(x, y).unwrap(), &pol).unwrap();
            assert!(m.len() <= 100);
        }
        assert_eq!(m.len(), 100);
    }

    proptest! {
        #[test]
        fn rejected_candidates_are_already_predicted(
            xs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..40),
            delta in 0.0f64..0.5,
            eps in 0.0f64..0.5,
        ) {
            let pol = policy(delta, eps, 15);
            let mut m = GrnnModel::empty(1, 1, 0.3).unwrap();
            for (x, y) in xs {
                let c = p(&[x], &[y]);
                let inserted = m.insert_bounded(&c, &pol).unwrap();
                prop_assert!(m.len() <= 15);
                if !inserted {
                    let pred = m.predict(&[x]).unwrap()[0];
                    prop_assert!((pred - y).abs() <= eps);
                }
            }
        }
    }
}
