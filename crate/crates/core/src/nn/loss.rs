use ndarray::{Array2, ArrayView2, Axis, Zip};

use super::{NnError, Result};

/// Probabilities are clamped here before the logarithm.
pub const LOG_CLAMP: f64 = 1e-12;

/// Row-wise softmax, shifted by the row maximum.
pub fn softmax_rows(logits: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut out = logits.to_owned();
    for mut row in out.axis_iter_mut(Axis(0)) {
        let max = row.fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        row.mapv_inplace(|x| (x - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|x| x / sum);
    }
    out
}

fn same_shape(a: &ArrayView2<'_, f64>, b: &ArrayView2<'_, f64>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(NnError::Shape(format!("{:?} vs {:?}", a.dim(), b.dim())));
    }
    Ok(())
}

/// −Σᵢ Σⱼ yᵢⱼ log pᵢⱼ summed over the batch, and its gradient with respect
/// to the pre-softmax logits, p − y.
pub fn cce_loss(probs: ArrayView2<'_, f64>, onehot: ArrayView2<'_, f64>) -> Result<(f64, Array2<f64>)> {
    same_shape(&probs, &onehot)?;
    let mut loss = 0.0;
    Zip::from(&probs).and(&onehot).for_each(|&p, &y| {
        if y != 0.0 {
            loss -= y * p.max(LOG_CLAMP).ln();
        }
    });
    Ok((loss, &probs - &onehot))
}

/// (1/N) Σᵢ ‖predᵢ − targetᵢ‖² and its gradient 2(pred − target)/N.
pub fn mse_loss(pred: ArrayView2<'_, f64>, target: ArrayView2<'_, f64>) -> Result<(f64, Array2<f64>)> {
    same_shape(&pred, &target)?;
    let n = pred.nrows().max(1) as f64;
    let residual = &pred - &target;
    let loss = residual.iter().map(|r| r * r).sum::<f64>() / n;
    Ok((loss, residual * (2.0 / n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn cce_examples() {
        let y = array![[1.0, 0.0, 0.0]];
        assert_eq!(cce_loss(y.view(), y.view()).unwrap().0, 0.0);
        let u = array![[1.0 / 3.0; 3]];
        assert!((cce_loss(u.view(), y.view()).unwrap().0 - 3f64.ln()).abs() < 1e-15);
        let p = array![[0.7, 0.2, 0.1]];
        let (l, g) = cce_loss(p.view(), y.view()).unwrap();
        assert!((l - 0.35667).abs() < 1e-5);
        assert!((g - array![[-0.3, 0.2, 0.1]]).iter().all(|d| d.abs() < 1e-15));
        let zero = array![[0.0, 1.0, 0.0]];
        assert!((cce_loss(zero.view(), y.view()).unwrap().0 + LOG_CLAMP.ln()).abs() < 1e-12);
    }

    #[test]
    fn mse_examples() {
        let t = Array2::<f64>::zeros((1, 12));
        assert_eq!(mse_loss(t.view(), t.view()).unwrap().0, 0.0);
        let mut p = t.clone();
        p[[0, 0]] = 0.1;
        assert!((mse_loss(p.view(), t.view()).unwrap().0 - 0.01).abs() < 1e-17);
        assert!(mse_loss(p.view(), Array2::zeros((2, 12)).view()).is_err());
    }

    #[test]
    fn mse_matches_per_sample_recomputation() {
        let p = Array2::from_shape_fn((5, 12), |(i, j)| ((i * 12 + j) as f64 * 0.37).sin());
        let t = Array2::from_shape_fn((5, 12), |(i, j)| ((i * 12 + j) as f64 * 0.11).cos());
        let direct: f64 = p
            .rows()
            .into_iter()
            .zip(t.rows())
            .map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>())
            .sum::<f64>()
            / 5.0;
        assert!((mse_loss(p.view(), t.view()).unwrap().0 - direct).abs() < 1e-15);
    }

    #[test]
    fn softmax_is_normalized() {
        let l = array![[1000.0, 999.0, 990.0], [0.0, 0.0, 0.0]];
        let p = softmax_rows(l.view());
        for row in p.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|&x| x > 0.0 && x < 1.0));
        }
    }
}
