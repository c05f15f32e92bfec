use crate::error::{Error, Result};
use crate::numerics::{Matrix, Rng};

/// Elementwise transfer function applied after every affine map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transfer {
    Sigmoid,
}

impl Transfer {
    pub fn tag(self) -> u32 {
        match self {
            Transfer::Sigmoid => 0,
        }
    }

    pub fn from_tag(tag: u32) -> Option<Self> {
        match tag {
            0 => Some(Transfer::Sigmoid),
            _ => None,
        }
    }

    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Transfer::Sigmoid => 1.0 / (1.0 + (-v).exp()),
        }
    }

    /// Derivative expressed through the activation output `y = f(v)`.
    #[inline]
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Transfer::Sigmoid => y * (1.0 - y),
        }
    }
}

/// One tied-weight layer: the encoder applies `weight`, the decoder its transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    /// `out × in`
    pub weight: Matrix,
    /// length `out`
    pub b_enc: Vec<f64>,
    /// length `in`
    pub b_dec: Vec<f64>,
}

impl LayerParams {
    pub fn zeros(input: usize, output: usize) -> Self {
        LayerParams {
            weight: Matrix::zeros(output, input),
            b_enc: vec![0.0; output],
            b_dec: vec![0.0; input],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn num_params(&self) -> usize {
        self.weight.as_slice().len() + self.b_enc.len() + self.b_dec.len()
    }

    pub fn slices(&self) -> [&[f64]; 3] {
        [self.weight.as_slice(), &self.b_enc, &self.b_dec]
    }

    pub fn slices_mut(&mut self) -> [&mut [f64]; 3] {
        [self.weight.as_mut_slice(), &mut self.b_enc, &mut self.b_dec]
    }

    fn check(&self) -> Result<()> {
        if self.b_enc.len() != self.output_dim() || self.b_dec.len() != self.input_dim() {
            return Err(Error::dim(format!(
                "layer {}x{} has bias lengths {} (encoder) and {} (decoder)",
                self.output_dim(),
                self.input_dim(),
                self.b_enc.len(),
                self.b_dec.len()
            )));
        }
        Ok(())
    }
}

/// Stacked tied-weight autoencoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<LayerParams>,
    transfer: Transfer,
}

impl Network {
    pub fn new(layers: Vec<LayerParams>, transfer: Transfer) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::arg("a network needs at least one layer"));
        }
        for l in &layers {
            l.check()?;
        }
        for (i, w) in layers.windows(2).enumerate() {
            if w[0].output_dim() != w[1].input_dim() {
                return Err(Error::dim(format!(
                    "layer {i} outputs {} but layer {} expects {}",
                    w[0].output_dim(),
                    i + 1,
                    w[1].input_dim()
                )));
            }
        }
        Ok(Network { layers, transfer })
    }

    pub fn layers(&self) -> &[LayerParams] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [LayerParams] {
        &mut self.layers
    }

    pub fn into_layers(self) -> Vec<LayerParams> {
        self.layers
    }

    pub fn transfer(&self) -> Transfer {
        self.transfer
    }

    /// Layer widths from input to code, e.g. `[d, 500, 500, 2000, N_c]`.
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(LayerParams::output_dim))
            .collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn code_dim(&self) -> usize {
        self.layers.last().expect("non-empty").output_dim()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(LayerParams::num_params).sum()
    }

    pub fn param_slices(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(LayerParams::slices).collect()
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(LayerParams::slices_mut)
            .collect()
    }

    fn encode_layer(&self, layer: &LayerParams, h: &Matrix) -> Matrix {
        let mut a = h.matmul_t(&layer.weight).expect("checked dims");
        a.add_row_vector(&layer.b_enc);
        a.map_inplace(|v| self.transfer.apply(v));
        a
    }

    fn decode_layer(&self, layer: &LayerParams, g: &Matrix) -> Matrix {
        let mut u = g.matmul(&layer.weight).expect("checked dims");
        u.add_row_vector(&layer.b_dec);
        u.map_inplace(|v| self.transfer.apply(v));
        u
    }

    /// Encoder activations `[x, h_1, …, h_L]`; the last entry is the code.
    pub(crate) fn encode_trace(&self, x: &Matrix) -> Result<Vec<Matrix>> {
        if x.cols() != self.input_dim() {
            return Err(Error::dim(format!(
                "network expects {} inputs, data has {}",
                self.input_dim(),
                x.cols()
            )));
        }
        let mut trace = Vec::with_capacity(self.layers.len() + 1);
        trace.push(x.clone());
        for layer in &self.layers {
            let next = self.encode_layer(layer, trace.last().expect("non-empty"));
            trace.push(next);
        }
        Ok(trace)
    }

    /// Decoder activations indexed like the encoder: entry `l` is the
    /// reconstruction of `h_l`, so entry 0 is `x̃` and entry `L` the code itself.
    pub(crate) fn decode_trace(&self, code: &Matrix) -> Result<Vec<Matrix>> {
        if code.cols() != self.code_dim() {
            return Err(Error::dim(format!(
                "network has code dimension {}, input has {}",
                self.code_dim(),
                code.cols()
            )));
        }
        let l = self.layers.len();
        let mut trace = vec![Matrix::zeros(0, 0); l + 1];
        trace[l] = code.clone();
        for i in (0..l).rev() {
            trace[i] = self.decode_layer(&self.layers[i], &trace[i + 1]);
        }
        Ok(trace)
    }

    /// Codes for the rows of `x`.
    pub fn encode(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.input_dim() {
            return Err(Error::dim(format!(
                "network expects {} inputs, data has {}",
                self.input_dim(),
                x.cols()
            )));
        }
        let mut h = x.clone();
        for layer in &self.layers {
            h = self.encode_layer(layer, &h);
        }
        Ok(h)
    }

    /// Maps codes back to input space through the transposed weights.
    pub fn decode(&self, code: &Matrix) -> Result<Matrix> {
        if code.cols() != self.code_dim() {
            return Err(Error::dim(format!(
                "network has code dimension {}, input has {}",
                self.code_dim(),
                code.cols()
            )));
        }
        let mut g = code.clone();
        for layer in self.layers.iter().rev() {
            g = self.decode_layer(layer, &g);
        }
        Ok(g)
    }

    pub fn reconstruct(&self, x: &Matrix) -> Result<Matrix> {
        self.decode(&self.encode(x)?)
    }
}

/// Glorot-uniform weights on `±√(6 / (fan_in + fan_out))`, zero biases, sigmoid transfer.
pub fn init_glorot(dims: &[usize], rng: &mut Rng) -> Result<Network> {
    if dims.len() < 2 {
        return Err(Error::arg(format!(
            "need at least input and code dimensions, got {dims:?}"
        )));
    }
    if dims.contains(&0) {
        return Err(Error::arg(format!(
            "layer widths must be positive, got {dims:?}"
        )));
    }
    let layers = dims
        .windows(2)
        .map(|w| {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let mut layer = LayerParams::zeros(fan_in, fan_out);
            for v in layer.weight.as_mut_slice() {
                *v = rng.uniform_in(-bound, bound);
            }
            layer
        })
        .collect();
    Network::new(layers, Transfer::Sigmoid)
}
