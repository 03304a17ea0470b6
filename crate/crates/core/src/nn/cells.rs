//! Batched GRU and LSTM forward passes with per-step caches, and their
//! backpropagation through the full unrolled sequence.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, ArrayView3, Axis, Zip};

use super::params::{GruParams, LstmParams};
use super::{NnError, Result};

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn add_bias(a: &mut Array2<f64>, b: &Array1<f64>) {
    *a += &b.view().insert_axis(Axis(0));
}

/// x_t for every step stacked into a (steps·batch) × input matrix.
fn stacked(x: &ArrayView3<'_, f64>) -> Array2<f64> {
    let (t, b, d) = x.dim();
    x.as_standard_layout().into_owned().into_shape_with_order((t * b, d)).expect("contiguous")
}

/// a += bᵀ·c
fn acc_tn(a: &mut Array2<f64>, b: &ArrayView2<'_, f64>, c: &ArrayView2<'_, f64>) {
    general_mat_mul(1.0, &b.t(), c, 1.0, a);
}

fn check_input(x: &ArrayView3<'_, f64>, input: usize, hidden: usize, h0: &ArrayView2<'_, f64>) -> Result<()> {
    let (t, b, d) = x.dim();
    if t == 0 || b == 0 {
        return Err(NnError::Shape("empty sequence batch".into()));
    }
    if d != input {
        return Err(NnError::Shape(format!("input width {d}, cell expects {input}")));
    }
    if h0.dim() != (b, hidden) {
        return Err(NnError::Shape(format!("initial state {:?}, expected ({b}, {hidden})", h0.dim())));
    }
    Ok(())
}

/// Activations of one GRU forward pass.
#[derive(Debug, Clone)]
pub struct GruCache {
    h_prev: Vec<Array2<f64>>,
    z: Vec<Array2<f64>>,
    r: Vec<Array2<f64>>,
    cand: Vec<Array2<f64>>,
    rh: Vec<Array2<f64>>,
}

impl GruCache {
    pub fn update_gates(&self) -> &[Array2<f64>] {
        &self.z
    }

    pub fn reset_gates(&self) -> &[Array2<f64>] {
        &self.r
    }
}

impl GruParams {
    /// Runs the cell over `x` (steps × batch × input) from `h0` (batch ×
    /// hidden) and returns the final hidden state.
    pub fn forward_batch(&self, x: ArrayView3<'_, f64>, h0: ArrayView2<'_, f64>) -> Result<(Array2<f64>, GruCache)> {
        let (h_dim, d) = (self.hidden(), self.input());
        check_input(&x, d, h_dim, &h0)?;
        let (steps, b, _) = x.dim();
        let xs = stacked(&x);
        let xz = xs.dot(&self.w_z.t());
        let xr = xs.dot(&self.w_r.t());
        let xh = xs.dot(&self.w_h.t());

        let mut cache = GruCache {
            h_prev: Vec::with_capacity(steps),
            z: Vec::with_capacity(steps),
            r: Vec::with_capacity(steps),
            cand: Vec::with_capacity(steps),
            rh: Vec::with_capacity(steps),
        };
        let mut h = h0.to_owned();
        for t in 0..steps {
            let rows = s![t * b..(t + 1) * b, ..];
            let mut z = xz.slice(rows).to_owned();
            general_mat_mul(1.0, &h, &self.u_z.t(), 1.0, &mut z);
            add_bias(&mut z, &self.b_z);
            z.mapv_inplace(sigmoid);

            let mut r = xr.slice(rows).to_owned();
            general_mat_mul(1.0, &h, &self.u_r.t(), 1.0, &mut r);
            add_bias(&mut r, &self.b_r);
            r.mapv_inplace(sigmoid);

            let rh = &r * &h;
            let mut cand = xh.slice(rows).to_owned();
            general_mat_mul(1.0, &rh, &self.u_h.t(), 1.0, &mut cand);
            add_bias(&mut cand, &self.b_h);
            cand.mapv_inplace(f64::tanh);

            // h_t = (1 − z) ⊙ h_{t−1} + z ⊙ h̃_t
            let next = Zip::from(&z).and(&h).and(&cand).map_collect(|&z, &hp, &c| (1.0 - z) * hp + z * c);
            cache.h_prev.push(std::mem::replace(&mut h, next));
            cache.z.push(z);
            cache.r.push(r);
            cache.cand.push(cand);
            cache.rh.push(rh);
        }
        Ok((h, cache))
    }

    /// Gradients of all cell parameters and of h0 given ∂L/∂h_T.
    pub fn backward_batch(
        &self,
        x: ArrayView3<'_, f64>,
        cache: &GruCache,
        dh_final: Array2<f64>,
    ) -> (GruParams, Array2<f64>) {
        let (steps, b, d) = x.dim();
        let h_dim = self.hidden();
        let mut g = GruParams::zeros(h_dim, d);
        let mut dz_all = Array2::zeros((steps * b, h_dim));
        let mut dr_all = Array2::zeros((steps * b, h_dim));
        let mut dc_all = Array2::zeros((steps * b, h_dim));
        let mut dh = dh_final;
        for t in (0..steps).rev() {
            let (hp, z, r, cand, rh) = (&cache.h_prev[t], &cache.z[t], &cache.r[t], &cache.cand[t], &cache.rh[t]);
            let dc = Zip::from(&dh).and(z).and(cand).map_collect(|&dh, &z, &c| dh * z * (1.0 - c * c));
            let dz = Zip::from(&dh)
                .and(cand)
                .and(hp)
                .and(z)
                .map_collect(|&dh, &c, &hp, &z| dh * (c - hp) * z * (1.0 - z));
            let mut dh_prev = Zip::from(&dh).and(z).map_collect(|&dh, &z| dh * (1.0 - z));
            let drh = dc.dot(&self.u_h);
            let dr = Zip::from(&drh).and(hp).and(r).map_collect(|&d, &hp, &r| d * hp * r * (1.0 - r));
            Zip::from(&mut dh_prev).and(&drh).and(r).for_each(|o, &d, &r| *o += d * r);
            general_mat_mul(1.0, &dz, &self.u_z, 1.0, &mut dh_prev);
            general_mat_mul(1.0, &dr, &self.u_r, 1.0, &mut dh_prev);

            acc_tn(&mut g.u_z, &dz.view(), &hp.view());
            acc_tn(&mut g.u_r, &dr.view(), &hp.view());
            acc_tn(&mut g.u_h, &dc.view(), &rh.view());
            g.b_z += &dz.sum_axis(Axis(0));
            g.b_r += &dr.sum_axis(Axis(0));
            g.b_h += &dc.sum_axis(Axis(0));

            let rows = s![t * b..(t + 1) * b, ..];
            dz_all.slice_mut(rows).assign(&dz);
            dr_all.slice_mut(rows).assign(&dr);
            dc_all.slice_mut(rows).assign(&dc);
            dh = dh_prev;
        }
        let xs = stacked(&x);
        acc_tn(&mut g.w_z, &dz_all.view(), &xs.view());
        acc_tn(&mut g.w_r, &dr_all.view(), &xs.view());
        acc_tn(&mut g.w_h, &dc_all.view(), &xs.view());
        (g, dh)
    }
}

/// Activations of one LSTM forward pass.
#[derive(Debug, Clone)]
pub struct LstmCache {
    h_prev: Vec<Array2<f64>>,
    c_prev: Vec<Array2<f64>>,
    f: Vec<Array2<f64>>,
    i: Vec<Array2<f64>>,
    o: Vec<Array2<f64>>,
    cand: Vec<Array2<f64>>,
    tanh_c: Vec<Array2<f64>>,
    c_final: Array2<f64>,
}

impl LstmCache {
    pub fn final_cell(&self) -> &Array2<f64> {
        &self.c_final
    }
}

impl LstmParams {
    fn split(w: &Array2<f64>, hidden: usize) -> (ArrayView2<'_, f64>, ArrayView2<'_, f64>) {
        (w.slice(s![.., ..hidden]), w.slice(s![.., hidden..]))
    }

    /// Runs the cell from (h0, c0) and returns the final hidden state.
    pub fn forward_batch(
        &self,
        x: ArrayView3<'_, f64>,
        h0: ArrayView2<'_, f64>,
        c0: ArrayView2<'_, f64>,
    ) -> Result<(Array2<f64>, LstmCache)> {
        let (h_dim, d) = (self.hidden(), self.input());
        check_input(&x, d, h_dim, &h0)?;
        if c0.dim() != h0.dim() {
            return Err(NnError::Shape(format!("cell state {:?}, expected {:?}", c0.dim(), h0.dim())));
        }
        let (steps, b, _) = x.dim();
        let xs = stacked(&x);
        let weights = [&self.w_f, &self.w_i, &self.w_o, &self.w_c];
        let biases = [&self.b_f, &self.b_i, &self.b_o, &self.b_c];
        let xg: Vec<Array2<f64>> = weights.iter().map(|w| xs.dot(&Self::split(w, h_dim).1.t())).collect();

        let mut cache = LstmCache {
            h_prev: Vec::with_capacity(steps),
            c_prev: Vec::with_capacity(steps),
            f: Vec::with_capacity(steps),
            i: Vec::with_capacity(steps),
            o: Vec::with_capacity(steps),
            cand: Vec::with_capacity(steps),
            tanh_c: Vec::with_capacity(steps),
            c_final: Array2::zeros((0, 0)),
        };
        let mut h = h0.to_owned();
        let mut c = c0.to_owned();
        for t in 0..steps {
            let rows = s![t * b..(t + 1) * b, ..];
            let mut gates: Vec<Array2<f64>> = (0..4)
                .map(|k| {
                    let mut a = xg[k].slice(rows).to_owned();
                    general_mat_mul(1.0, &h, &Self::split(weights[k], h_dim).0.t(), 1.0, &mut a);
                    add_bias(&mut a, biases[k]);
                    a
                })
                .collect();
            let mut cand = gates.pop().expect("four gates");
            cand.mapv_inplace(f64::tanh);
            for g in &mut gates {
                g.mapv_inplace(sigmoid);
            }
            let [f, i, o]: [Array2<f64>; 3] = gates.try_into().expect("three sigmoid gates");
            // c_t = f ⊙ c_{t−1} + i ⊙ c̃_t,  h_t = o ⊙ tanh(c_t)
            let c_next = Zip::from(&f).and(&c).and(&i).and(&cand).map_collect(|&f, &c, &i, &g| f * c + i * g);
            let tanh_c = c_next.mapv(f64::tanh);
            let h_next = &o * &tanh_c;
            cache.h_prev.push(std::mem::replace(&mut h, h_next));
            cache.c_prev.push(std::mem::replace(&mut c, c_next));
            cache.f.push(f);
            cache.i.push(i);
            cache.o.push(o);
            cache.cand.push(cand);
            cache.tanh_c.push(tanh_c);
        }
        cache.c_final = c;
        Ok((h, cache))
    }

    /// Gradients of all cell parameters and of (h0, c0) given ∂L/∂h_T.
    pub fn backward_batch(
        &self,
        x: ArrayView3<'_, f64>,
        cache: &LstmCache,
        dh_final: Array2<f64>,
    ) -> (LstmParams, Array2<f64>, Array2<f64>) {
        let (steps, b, d) = x.dim();
        let h_dim = self.hidden();
        let mut g = LstmParams::zeros(h_dim, d);
        let mut d_all: Vec<Array2<f64>> = (0..4).map(|_| Array2::zeros((steps * b, h_dim))).collect();
        let mut dh = dh_final;
        let mut dc = Array2::zeros(dh.dim());
        let weights = [&self.w_f, &self.w_i, &self.w_o, &self.w_c];
        for t in (0..steps).rev() {
            let (f, i, o, cand, tc) = (&cache.f[t], &cache.i[t], &cache.o[t], &cache.cand[t], &cache.tanh_c[t]);
            let (hp, cp) = (&cache.h_prev[t], &cache.c_prev[t]);
            Zip::from(&mut dc).and(&dh).and(o).and(tc).for_each(|dc, &dh, &o, &tc| *dc += dh * o * (1.0 - tc * tc));
            let d_o = Zip::from(&dh).and(tc).and(o).map_collect(|&dh, &tc, &o| dh * tc * o * (1.0 - o));
            let d_f = Zip::from(&dc).and(cp).and(f).map_collect(|&dc, &cp, &f| dc * cp * f * (1.0 - f));
            let d_i = Zip::from(&dc).and(cand).and(i).map_collect(|&dc, &g, &i| dc * g * i * (1.0 - i));
            let d_c = Zip::from(&dc).and(i).and(cand).map_collect(|&dc, &i, &g| dc * i * (1.0 - g * g));
            let grads = [d_f, d_i, d_o, d_c];

            let mut dh_prev = Array2::zeros(dh.dim());
            let rows = s![t * b..(t + 1) * b, ..];
            for (k, dg) in grads.iter().enumerate() {
                general_mat_mul(1.0, dg, &Self::split(weights[k], h_dim).0, 1.0, &mut dh_prev);
                d_all[k].slice_mut(rows).assign(dg);
            }
            let gw = [&mut g.w_f, &mut g.w_i, &mut g.w_o, &mut g.w_c];
            for (k, w) in gw.into_iter().enumerate() {
                let mut wh = w.slice_mut(s![.., ..h_dim]);
                general_mat_mul(1.0, &grads[k].t(), hp, 1.0, &mut wh);
            }
            let gb = [&mut g.b_f, &mut g.b_i, &mut g.b_o, &mut g.b_c];
            for (k, bias) in gb.into_iter().enumerate() {
                *bias += &grads[k].sum_axis(Axis(0));
            }
            dc = &dc * f;
            dh = dh_prev;
        }
        let xs = stacked(&x);
        let gw = [&mut g.w_f, &mut g.w_i, &mut g.w_o, &mut g.w_c];
        for (k, w) in gw.into_iter().enumerate() {
            let mut wx = w.slice_mut(s![.., h_dim..]);
            general_mat_mul(1.0, &d_all[k].t(), &xs, 1.0, &mut wx);
        }
        (g, dh, dc)
    }
}

/// Final hidden state of a GRU over one sequence (steps × input).
pub fn gru_forward(params: &GruParams, sequence: ArrayView2<'_, f64>, h0: ArrayView1<'_, f64>) -> Result<(Array1<f64>, GruCache)> {
    let x = sequence.insert_axis(Axis(1));
    let (h, cache) = params.forward_batch(x, h0.insert_axis(Axis(0)))?;
    Ok((h.index_axis_move(Axis(0), 0), cache))
}

/// Final (hidden, cell) state of an LSTM over one sequence.
pub fn lstm_forward(
    params: &LstmParams,
    sequence: ArrayView2<'_, f64>,
    h0: ArrayView1<'_, f64>,
    c0: ArrayView1<'_, f64>,
) -> Result<(Array1<f64>, Array1<f64>, LstmCache)> {
    let x = sequence.insert_axis(Axis(1));
    let (h, cache) = params.forward_batch(x, h0.insert_axis(Axis(0)), c0.insert_axis(Axis(0)))?;
    let c = cache.c_final.row(0).to_owned();
    Ok((h.index_axis_move(Axis(0), 0), c, cache))
}
