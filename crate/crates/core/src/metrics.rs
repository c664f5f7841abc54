//! Error measures shared by the estimators.

/// Mean squared error over every row and output component.
///
/// `predictions` and `targets` are row-major with equal shapes. Returns `None`
/// when there is nothing to average.
pub fn mse(predictions: &[Vec<f64>], targets: &[Vec<f64>]) -> Option<f64> {
    assert_eq!(predictions.len(), targets.len(), "row count mismatch");
    let mut sum = 0.0;
    let mut count = 0usize;
    for (p, t) in predictions.iter().zip(targets) {
        assert_eq!(p.len(), t.len(), "column count mismatch");
        for (a, b) in p.iter().zip(t) {
            let e = a - b;
            sum += e * e;
        }
        count += p.len();
    }
    (count > 0).then(|| sum / count as f64)
}

/// Mean squared error between two scalar sequences.
pub fn mse_scalar(predictions: &[f64], targets: &[f64]) -> Option<f64> {
    assert_eq!(predictions.len(), targets.len(), "length mismatch");
    if predictions.is_empty() {
        return None;
    }
    let sum: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Some(sum / predictions.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_match_is_zero() {
        let y = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert_eq!(mse(&y, &y), Some(0.0));
    }

    #[test]
    fn single_unit_error() {
        assert_eq!(mse(&[vec![1.0]], &[vec![0.0]]), Some(1.0));
        assert_eq!(mse_scalar(&[1.0], &[0.0]), Some(1.0));
    }

    #[test]
    fn empty_is_none() {
        assert_eq!(mse(&[], &[]), None);
        assert_eq!(mse_scalar(&[], &[]), None);
    }
}
