use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Activation, Architecture, CellKind, NnError, Result};

/// Update (z), reset (r) and candidate (h) gate weights. `w_*` map the input
/// (hidden × input), `u_*` the previous hidden state (hidden × hidden).
#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub w_z: Array2<f64>,
    pub w_r: Array2<f64>,
    pub w_h: Array2<f64>,
    pub u_z: Array2<f64>,
    pub u_r: Array2<f64>,
    pub u_h: Array2<f64>,
    pub b_z: Array1<f64>,
    pub b_r: Array1<f64>,
    pub b_h: Array1<f64>,
}

/// Forget, input, output and candidate gate weights acting on the
/// concatenation [h_{t−1}, x_t], each hidden × (hidden + input).
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub w_f: Array2<f64>,
    pub w_i: Array2<f64>,
    pub w_o: Array2<f64>,
    pub w_c: Array2<f64>,
    pub b_f: Array1<f64>,
    pub b_i: Array1<f64>,
    pub b_o: Array1<f64>,
    pub b_c: Array1<f64>,
}

/// y = act(W x + b) with W out × in.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseParams {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecurrentParams {
    Gru(GruParams),
    Lstm(LstmParams),
}

/// A recurrent cell (optional) followed by dense layers. Gradients share this
/// type.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub input: usize,
    pub cell: Option<RecurrentParams>,
    pub dense: Vec<DenseParams>,
}

impl GruParams {
    pub fn zeros(hidden: usize, input: usize) -> Self {
        let w = || Array2::zeros((hidden, input));
        let u = || Array2::zeros((hidden, hidden));
        let b = || Array1::zeros(hidden);
        Self { w_z: w(), w_r: w(), w_h: w(), u_z: u(), u_r: u(), u_h: u(), b_z: b(), b_r: b(), b_h: b() }
    }

    pub fn hidden(&self) -> usize {
        self.b_z.len()
    }

    pub fn input(&self) -> usize {
        self.w_z.ncols()
    }

    fn matrices(&self) -> [&Array2<f64>; 6] {
        [&self.w_z, &self.w_r, &self.w_h, &self.u_z, &self.u_r, &self.u_h]
    }

    fn matrices_mut(&mut self) -> [&mut Array2<f64>; 6] {
        [&mut self.w_z, &mut self.w_r, &mut self.w_h, &mut self.u_z, &mut self.u_r, &mut self.u_h]
    }

    fn biases(&self) -> [&Array1<f64>; 3] {
        [&self.b_z, &self.b_r, &self.b_h]
    }
}

impl LstmParams {
    pub fn zeros(hidden: usize, input: usize) -> Self {
        let w = || Array2::zeros((hidden, hidden + input));
        let b = || Array1::zeros(hidden);
        Self { w_f: w(), w_i: w(), w_o: w(), w_c: w(), b_f: b(), b_i: b(), b_o: b(), b_c: b() }
    }

    pub fn hidden(&self) -> usize {
        self.b_f.len()
    }

    pub fn input(&self) -> usize {
        self.w_f.ncols() - self.hidden()
    }

    fn matrices(&self) -> [&Array2<f64>; 4] {
        [&self.w_f, &self.w_i, &self.w_o, &self.w_c]
    }

    fn matrices_mut(&mut self) -> [&mut Array2<f64>; 4] {
        [&mut self.w_f, &mut self.w_i, &mut self.w_o, &mut self.w_c]
    }

    fn biases(&self) -> [&Array1<f64>; 4] {
        [&self.b_f, &self.b_i, &self.b_o, &self.b_c]
    }
}

impl DenseParams {
    pub fn zeros(inputs: usize, outputs: usize, activation: Activation) -> Self {
        Self { w: Array2::zeros((outputs, inputs)), b: Array1::zeros(outputs), activation }
    }
}

impl RecurrentParams {
    pub fn kind(&self) -> CellKind {
        match self {
            RecurrentParams::Gru(_) => CellKind::Gru,
            RecurrentParams::Lstm(_) => CellKind::Lstm,
        }
    }

    pub fn hidden(&self) -> usize {
        match self {
            RecurrentParams::Gru(g) => g.hidden(),
            RecurrentParams::Lstm(l) => l.hidden(),
        }
    }

    // Flattening order: weight matrices row-major in declaration order, then biases.
    fn tensors(&self) -> Vec<&[f64]> {
        fn slice(a: &Array2<f64>) -> &[f64] {
            a.as_slice().expect("standard layout")
        }
        fn bslice(a: &Array1<f64>) -> &[f64] {
            a.as_slice().expect("standard layout")
        }
        match self {
            RecurrentParams::Gru(g) => {
                g.matrices().into_iter().map(slice).chain(g.biases().into_iter().map(bslice)).collect()
            }
            RecurrentParams::Lstm(l) => {
                l.matrices().into_iter().map(slice).chain(l.biases().into_iter().map(bslice)).collect()
            }
        }
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        match self {
            RecurrentParams::Gru(g) => {
                let (m, b) = split_gru(g);
                m.into_iter().chain(b).collect()
            }
            RecurrentParams::Lstm(l) => {
                let (m, b) = split_lstm(l);
                m.into_iter().chain(b).collect()
            }
        }
    }
}

fn split_gru(g: &mut GruParams) -> (Vec<&mut [f64]>, Vec<&mut [f64]>) {
    let GruParams { w_z, w_r, w_h, u_z, u_r, u_h, b_z, b_r, b_h } = g;
    let m = [w_z, w_r, w_h, u_z, u_r, u_h].into_iter().map(|a| a.as_slice_mut().expect("standard layout"));
    let b = [b_z, b_r, b_h].into_iter().map(|a| a.as_slice_mut().expect("standard layout"));
    (m.collect(), b.collect())
}

fn split_lstm(l: &mut LstmParams) -> (Vec<&mut [f64]>, Vec<&mut [f64]>) {
    let LstmParams { w_f, w_i, w_o, w_c, b_f, b_i, b_o, b_c } = l;
    let m = [w_f, w_i, w_o, w_c].into_iter().map(|a| a.as_slice_mut().expect("standard layout"));
    let b = [b_f, b_i, b_o, b_c].into_iter().map(|a| a.as_slice_mut().expect("standard layout"));
    (m.collect(), b.collect())
}

impl ModelParams {
    /// All-zero parameters for `arch`.
    pub fn zeros(arch: &Architecture) -> Result<Self> {
        arch.validate()?;
        let cell = arch.cell.map(|k| match k {
            CellKind::Gru => RecurrentParams::Gru(GruParams::zeros(arch.hidden, arch.input)),
            CellKind::Lstm => RecurrentParams::Lstm(LstmParams::zeros(arch.hidden, arch.input)),
        });
        let mut width = arch.head_input();
        let mut dense = Vec::with_capacity(arch.dense.len());
        for &(n, act) in &arch.dense {
            dense.push(DenseParams::zeros(width, n, act));
            width = n;
        }
        Ok(Self { input: arch.input, cell, dense })
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(&self.architecture()).expect("architecture of an existing model is valid")
    }

    pub fn architecture(&self) -> Architecture {
        Architecture {
            cell: self.cell.as_ref().map(RecurrentParams::kind),
            input: self.input,
            hidden: self.cell.as_ref().map_or(0, RecurrentParams::hidden),
            dense: self.dense.iter().map(|d| (d.b.len(), d.activation)).collect(),
        }
    }

    fn tensors(&self) -> Vec<&[f64]> {
        let mut out = self.cell.as_ref().map_or_else(Vec::new, RecurrentParams::tensors);
        for d in &self.dense {
            out.push(d.w.as_slice().expect("standard layout"));
            out.push(d.b.as_slice().expect("standard layout"));
        }
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = self.cell.as_mut().map_or_else(Vec::new, RecurrentParams::tensors_mut);
        for d in &mut self.dense {
            out.push(d.w.as_slice_mut().expect("standard layout"));
            out.push(d.b.as_slice_mut().expect("standard layout"));
        }
        out
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for t in self.tensors() {
            out.extend_from_slice(t);
        }
        out
    }

    /// Copies `data` into the parameters in [`ModelParams::flatten`] order.
    pub fn assign(&mut self, data: &[f64]) -> Result<()> {
        if data.len() != self.param_count() {
            return Err(NnError::Shape(format!(
                "{} values for a model with {} parameters",
                data.len(),
                self.param_count()
            )));
        }
        let mut offset = 0;
        for t in self.tensors_mut() {
            t.copy_from_slice(&data[offset..offset + t.len()]);
            offset += t.len();
        }
        Ok(())
    }

    pub fn unflatten(arch: &Architecture, data: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(arch)?;
        m.assign(data)?;
        Ok(m)
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }
}

fn glorot(a: &mut Array2<f64>, fan_in: usize, fan_out: usize, rng: &mut ChaCha8Rng) {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    a.mapv_inplace(|_| rng.gen_range(-limit..limit));
}

/// Glorot-uniform weights, one draw per entry in flatten order; zero biases.
/// Each gate matrix is treated as its own layer for the fan computation.
pub fn init_params(arch: &Architecture, seed: u64) -> Result<ModelParams> {
    let mut m = ModelParams::zeros(arch)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rng = &mut rng;
    match &mut m.cell {
        Some(RecurrentParams::Gru(g)) => {
            let (h, d) = (g.hidden(), g.input());
            for (k, w) in g.matrices_mut().into_iter().enumerate() {
                glorot(w, if k < 3 { d } else { h }, h, rng);
            }
        }
        Some(RecurrentParams::Lstm(l)) => {
            let (h, d) = (l.hidden(), l.input());
            for w in l.matrices_mut() {
                glorot(w, h + d, h, rng);
            }
        }
        None => {}
    }
    for d in &mut m.dense {
        let (out, inp) = d.w.dim();
        glorot(&mut d.w, inp, out, rng);
    }
    Ok(m)
}
