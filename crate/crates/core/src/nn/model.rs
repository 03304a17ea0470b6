use ndarray::{Array1, Array2, ArrayView2, ArrayView3, Axis, Zip};
use ndarray::linalg::general_mat_mul;

use super::cells::{GruCache, LstmCache};
use super::loss::{cce_loss, mse_loss, softmax_rows};
use super::params::{DenseParams, ModelParams, RecurrentParams};
use super::{Activation, LossKind, NnError, Result};

/// Scalar batch loss with its gradient in [`ModelParams::flatten`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct LossValue {
    pub value: f64,
    pub grad: Vec<f64>,
}

#[derive(Debug, Clone)]
enum CellCache {
    Gru(GruCache),
    Lstm(LstmCache),
    None,
}

/// Activations retained by [`ModelParams::forward_cached`].
#[derive(Debug, Clone)]
pub struct ModelCache {
    cell: CellCache,
    /// Input to each dense layer, then the network output.
    activations: Vec<Array2<f64>>,
    /// Pre-activation of each dense layer.
    pre: Vec<Array2<f64>>,
}

impl DenseParams {
    fn forward(&self, a: &Array2<f64>) -> Result<(Array2<f64>, Array2<f64>)> {
        if a.ncols() != self.w.ncols() {
            return Err(NnError::Shape(format!("dense layer expects {} inputs, got {}", self.w.ncols(), a.ncols())));
        }
        let mut pre = a.dot(&self.w.t());
        pre += &self.b.view().insert_axis(Axis(0));
        let out = match self.activation {
            Activation::Relu => pre.mapv(|x| x.max(0.0)),
            Activation::Identity => pre.clone(),
            Activation::Softmax => softmax_rows(pre.view()),
        };
        Ok((pre, out))
    }
}

impl ModelParams {
    /// Network outputs for a batch laid out as steps × batch × input.
    pub fn forward_batch(&self, x: ArrayView3<'_, f64>) -> Result<Array2<f64>> {
        Ok(self.forward_cached(x)?.1)
    }

    /// Output for one sequence (steps × input).
    pub fn forward(&self, sequence: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        let out = self.forward_batch(sequence.insert_axis(Axis(1)))?;
        Ok(out.index_axis_move(Axis(0), 0))
    }

    pub fn forward_cached(&self, x: ArrayView3<'_, f64>) -> Result<(ModelCache, Array2<f64>)> {
        let (steps, b, d) = x.dim();
        if d != self.input {
            return Err(NnError::Shape(format!("model expects {} features per step, got {d}", self.input)));
        }
        if steps == 0 || b == 0 {
            return Err(NnError::Shape("empty batch".into()));
        }
        let (head_in, cell) = match &self.cell {
            Some(RecurrentParams::Gru(g)) => {
                let h0 = Array2::zeros((b, g.hidden()));
                let (h, c) = g.forward_batch(x, h0.view())?;
                (h, CellCache::Gru(c))
            }
            Some(RecurrentParams::Lstm(l)) => {
                let h0 = Array2::zeros((b, l.hidden()));
                let (h, c) = l.forward_batch(x, h0.view(), h0.view())?;
                (h, CellCache::Lstm(c))
            }
            None => (x.index_axis(Axis(0), steps - 1).to_owned(), CellCache::None),
        };
        let mut activations = vec![head_in];
        let mut pre = Vec::with_capacity(self.dense.len());
        for layer in &self.dense {
            let (z, a) = layer.forward(activations.last().expect("non-empty"))?;
            pre.push(z);
            activations.push(a);
        }
        let out = activations.last().expect("non-empty").clone();
        Ok((ModelCache { cell, activations, pre }, out))
    }

    /// Loss of the batch and the gradient of every parameter. Softmax heads
    /// take one-hot targets and summed cross-entropy; other heads take
    /// regression targets and the mean squared residual norm.
    pub fn loss_and_grad(&self, x: ArrayView3<'_, f64>, targets: ArrayView2<'_, f64>) -> Result<LossValue> {
        let (value, grads) = self.loss_and_param_grads(x, targets)?;
        Ok(LossValue { value, grad: grads.flatten() })
    }

    pub fn loss_kind(&self) -> LossKind {
        self.architecture().loss_kind()
    }

    /// Batch loss without gradients.
    pub fn loss(&self, x: ArrayView3<'_, f64>, targets: ArrayView2<'_, f64>) -> Result<f64> {
        let out = self.forward_batch(x)?;
        Ok(match self.loss_kind() {
            LossKind::CrossEntropy => cce_loss(out.view(), targets)?.0,
            LossKind::MeanSquared => mse_loss(out.view(), targets)?.0,
        })
    }

    pub fn loss_and_param_grads(&self, x: ArrayView3<'_, f64>, targets: ArrayView2<'_, f64>) -> Result<(f64, ModelParams)> {
        let (value, grads, _) = self.backprop(x, targets)?;
        Ok((value, grads))
    }

    /// Loss, parameter gradients and the network outputs of one batch.
    pub fn backprop(
        &self,
        x: ArrayView3<'_, f64>,
        targets: ArrayView2<'_, f64>,
    ) -> Result<(f64, ModelParams, Array2<f64>)> {
        let (cache, out) = self.forward_cached(x)?;
        let last = self.dense.len() - 1;
        let (value, mut delta) = match self.loss_kind() {
            // gradient already taken with respect to the softmax logits
            LossKind::CrossEntropy => cce_loss(out.view(), targets)?,
            LossKind::MeanSquared => {
                let (v, mut g) = mse_loss(out.view(), targets)?;
                if self.dense[last].activation == Activation::Relu {
                    relu_mask(&mut g, &cache.pre[last]);
                }
                (v, g)
            }
        };

        let mut grads = self.zeros_like();
        for k in (0..self.dense.len()).rev() {
            let a_in = &cache.activations[k];
            let g = &mut grads.dense[k];
            general_mat_mul(1.0, &delta.t(), a_in, 0.0, &mut g.w);
            g.b = delta.sum_axis(Axis(0));
            let mut d_in = delta.dot(&self.dense[k].w);
            if k > 0 {
                match self.dense[k - 1].activation {
                    Activation::Relu => relu_mask(&mut d_in, &cache.pre[k - 1]),
                    Activation::Identity => {}
                    Activation::Softmax => unreachable!("softmax only on the output layer"),
                }
            }
            delta = d_in;
        }

        match (&self.cell, &cache.cell, &mut grads.cell) {
            (Some(RecurrentParams::Gru(p)), CellCache::Gru(c), Some(RecurrentParams::Gru(g))) => {
                *g = p.backward_batch(x, c, delta).0;
            }
            (Some(RecurrentParams::Lstm(p)), CellCache::Lstm(c), Some(RecurrentParams::Lstm(g))) => {
                *g = p.backward_batch(x, c, delta).0;
            }
            (None, CellCache::None, None) => {}
            _ => unreachable!("cache built from the same parameters"),
        }
        Ok((value, grads, out))
    }
}

fn relu_mask(g: &mut Array2<f64>, pre: &Array2<f64>) {
    Zip::from(g).and(pre).for_each(|g, &z| {
        if z <= 0.0 {
            *g = 0.0;
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{init_params, Architecture, CellKind};
    use ndarray::Array3;

    fn batch(steps: usize, b: usize, d: usize, phase: f64) -> Array3<f64> {
        Array3::from_shape_fn((steps, b, d), |(t, i, j)| ((t * 13 + i * 7 + j) as f64 * 0.31 + phase).sin().abs())
    }

    fn onehots(b: usize) -> Array2<f64> {
        Array2::from_shape_fn((b, 3), |(i, j)| if i % 3 == j { 1.0 } else { 0.0 })
    }

    #[test]
    fn zero_model_predicts_uniform() {
        let m = ModelParams::zeros(&Architecture::classifier(CellKind::Gru, 4)).unwrap();
        let p = m.forward(batch(7, 1, 4, 0.0).index_axis(Axis(1), 0)).unwrap();
        assert!(p.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn softmax_outputs_are_distributions() {
        let m = init_params(&Architecture::classifier(CellKind::Lstm, 4), 1).unwrap();
        let out = m.forward_batch(batch(7, 20, 4, 0.5).view()).unwrap();
        for row in out.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|&p| p > 0.0 && p < 1.0));
        }
    }

    #[test]
    fn zero_model_bias_gradient_is_mean_residual() {
        // With all weights zero every softmax row is uniform; the output-bias
        // gradient of the summed loss is Σ (p − y) = B·mean(p − y).
        let m = ModelParams::zeros(&Architecture::classifier(CellKind::Gru, 4)).unwrap();
        let b = 6;
        let y = onehots(b);
        let (_, g) = m.loss_and_param_grads(batch(7, b, 4, 0.2).view(), y.view()).unwrap();
        let want = (Array2::from_elem((b, 3), 1.0 / 3.0) - &y).mean_axis(Axis(0)).unwrap() * b as f64;
        assert!((&g.dense[1].b - &want).iter().all(|d| d.abs() < 1e-15));
    }

    #[test]
    fn duplicated_batch_doubles_gradient() {
        let m = init_params(&Architecture::classifier(CellKind::Gru, 4), 2).unwrap();
        let x = batch(7, 5, 4, 0.0);
        let y = onehots(5);
        let x2 = ndarray::concatenate(Axis(1), &[x.view(), x.view()]).unwrap();
        let y2 = ndarray::concatenate(Axis(0), &[y.view(), y.view()]).unwrap();
        let g1 = m.loss_and_grad(x.view(), y.view()).unwrap();
        let g2 = m.loss_and_grad(x2.view(), y2.view()).unwrap();
        assert!((g2.value - 2.0 * g1.value).abs() <= 1e-12 * g1.value.abs());
        for (a, b) in g1.grad.iter().zip(&g2.grad) {
            assert!((b - 2.0 * a).abs() <= 1e-12 * a.abs().max(1e-12), "{a} {b}");
        }
    }

    #[test]
    fn wrong_feature_width_is_a_shape_error() {
        let m = init_params(&Architecture::classifier(CellKind::Gru, 4), 2).unwrap();
        assert!(matches!(m.forward_batch(batch(7, 2, 16, 0.0).view()), Err(NnError::Shape(_))));
    }
}
