//! The mini-batch objective and its exact gradient.
//!
//! For a batch `X_k` (k × d) with prior block `P_k` (k × k):
//!
//! ```text
//! L = (1 − λ)/(k·d) · Σᵢ ‖xᵢ − x̃ᵢ‖²  +  λ · ‖C_k/‖C_k‖_F − P_k/‖P_k‖_F‖_F
//! ```
//!
//! with `C_k = H·Hᵀ` the Gram matrix of the batch codes `H`.

use log::warn;

use super::network::{LayerParams, Network};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Below this code-Gram norm the code term is dropped during training.
pub const MIN_CODE_GRAM_NORM: f64 = 1e-12;

/// Below this code loss the code gradient is taken to be zero (the loss has a
/// cusp at its minimum).
const CODE_LOSS_CUSP: f64 = 1e-12;

/// Squared Euclidean reconstruction error `‖x − x̃‖²`.
pub fn reconstruction_loss(x: &[f64], x_tilde: &[f64]) -> Result<f64> {
    if x.len() != x_tilde.len() {
        return Err(Error::dim(format!(
            "reconstruction of length {} for input of length {}",
            x_tilde.len(),
            x.len()
        )));
    }
    Ok(crate::numerics::sq_dist(x, x_tilde))
}

/// Components of the batch objective; `total = (1 − λ)·recon + λ·code`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchLoss {
    pub total: f64,
    /// Mean squared error per sample and input dimension.
    pub recon: f64,
    /// Normalized Frobenius distance between code Gram and prior.
    pub code: f64,
}

/// Parameter-shaped gradient, one entry per network layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerParams>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Gradients {
            layers: net
                .layers()
                .iter()
                .map(|l| LayerParams::zeros(l.input_dim(), l.output_dim()))
                .collect(),
        }
    }

    pub fn slices(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(LayerParams::slices).collect()
    }

    pub fn norm(&self) -> f64 {
        self.slices()
            .iter()
            .flat_map(|s| s.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::arg(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    Ok(())
}

fn check_prior(x: &Matrix, prior: &Matrix) -> Result<()> {
    if prior.shape() != (x.rows(), x.rows()) {
        return Err(Error::dim(format!(
            "prior block {:?} does not match a batch of {} samples",
            prior.shape(),
            x.rows()
        )));
    }
    Ok(())
}

/// Code term value and `∂L_c/∂C` for the Gram matrix `c` against `prior`.
fn code_term(c: &Matrix, prior: &Matrix, need_grad: bool) -> Result<(f64, Option<Matrix>)> {
    let nc = c.frobenius_norm();
    let np = prior.frobenius_norm();
    if !(np > 0.0) {
        return Err(Error::degenerate("prior block has zero Frobenius norm"));
    }
    if !(nc > 0.0) {
        return Err(Error::degenerate(
            "code Gram matrix has zero Frobenius norm",
        ));
    }
    let diff = Matrix::from_fn(c.rows(), c.cols(), |i, j| {
        c[(i, j)] / nc - prior[(i, j)] / np
    });
    let loss = diff.frobenius_norm();
    if !need_grad {
        return Ok((loss, None));
    }
    if loss <= CODE_LOSS_CUSP {
        return Ok((loss, Some(Matrix::zeros(c.rows(), c.cols()))));
    }
    // L = ‖Ĉ − P̂‖ with Ĉ = C/‖C‖:  ∂L/∂Ĉ = D/L,  ∂L/∂C = (M − Ĉ⟨M, Ĉ⟩)/‖C‖.
    let mut inner = 0.0;
    for (d, &cv) in diff.as_slice().iter().zip(c.as_slice()) {
        inner += (d / loss) * (cv / nc);
    }
    let grad = Matrix::from_fn(c.rows(), c.cols(), |i, j| {
        (diff[(i, j)] / loss - c[(i, j)] / nc * inner) / nc
    });
    Ok((loss, Some(grad)))
}

/// Evaluates the batch objective without gradients.
pub fn batch_loss(net: &Network, x: &Matrix, prior: &Matrix, lambda: f64) -> Result<BatchLoss> {
    check_lambda(lambda)?;
    check_prior(x, prior)?;
    let code = net.encode(x)?;
    let recon_x = net.decode(&code)?;
    let (k, d) = x.shape();
    let sse: f64 = x
        .row_iter()
        .zip(recon_x.row_iter())
        .map(|(a, b)| crate::numerics::sq_dist(a, b))
        .sum();
    let recon = sse / (k * d) as f64;
    let code_part = if lambda > 0.0 {
        code_term(&code.gram(), prior, false)?.0
    } else {
        code_term(&code.gram(), prior, false).map_or(0.0, |(l, _)| l)
    };
    Ok(BatchLoss {
        total: (1.0 - lambda) * recon + lambda * code_part,
        recon,
        code: code_part,
    })
}

/// Exact gradient of [`batch_loss`] with respect to every parameter.
///
/// Each tied weight collects both its encoder-path and decoder-path terms.
pub fn gradients(net: &Network, x: &Matrix, prior: &Matrix, lambda: f64) -> Result<Gradients> {
    loss_and_gradients(net, x, prior, lambda, false).map(|(_, g)| g)
}

/// Loss and gradient in one pass. With `guard` set, a vanishing code Gram
/// matrix drops the code term for this batch instead of failing.
pub fn loss_and_gradients(
    net: &Network,
    x: &Matrix,
    prior: &Matrix,
    lambda: f64,
    guard: bool,
) -> Result<(BatchLoss, Gradients)> {
    check_lambda(lambda)?;
    check_prior(x, prior)?;
    let transfer = net.transfer();
    let enc = net.encode_trace(x)?;
    let n_layers = net.layers().len();
    let code = &enc[n_layers];
    let dec = net.decode_trace(code)?;
    let (k, d) = x.shape();

    let sse: f64 = x
        .row_iter()
        .zip(dec[0].row_iter())
        .map(|(a, b)| crate::numerics::sq_dist(a, b))
        .sum();
    let recon = sse / (k * d) as f64;

    let gram = code.gram();
    let (code_loss, code_grad) = if lambda > 0.0 {
        match code_term(&gram, prior, true) {
            Ok((l, g)) => (l, g),
            Err(Error::Degenerate(msg))
                if guard
                    && gram.frobenius_norm() < MIN_CODE_GRAM_NORM
                    && prior.frobenius_norm() > 0.0 =>
            {
                warn!("skipping code term for this batch: {msg}");
                (f64::NAN, None)
            }
            Err(e) => return Err(e),
        }
    } else {
        (code_term(&gram, prior, false).map_or(0.0, |(l, _)| l), None)
    };
    let code_contrib = if code_loss.is_nan() { 0.0 } else { code_loss };
    let loss = BatchLoss {
        total: (1.0 - lambda) * recon + lambda * code_contrib,
        recon,
        code: code_loss,
    };

    let mut grads = Gradients::zeros_like(net);
    let layers = net.layers();

    // ∂L/∂h_L accumulates the decoder path and the code term.
    let mut d_code = Matrix::zeros(code.rows(), code.cols());

    if lambda < 1.0 {
        let scale = (1.0 - lambda) * 2.0 / (k * d) as f64;
        let mut d_out = dec[0].sub(x)?.scale(scale);
        for l in 0..n_layers {
            // dec[l] = σ(dec[l + 1]·W_l + b_dec_l)
            let out = &dec[l];
            let mut du = d_out;
            for (g, &y) in du.as_mut_slice().iter_mut().zip(out.as_slice()) {
                *g *= transfer.derivative_from_output(y);
            }
            let lg = &mut grads.layers[l];
            lg.b_dec = du.sum_rows();
            lg.weight = dec[l + 1].t_matmul(&du)?;
            d_out = du.matmul_t(&layers[l].weight)?;
        }
        d_code = d_out;
    }

    if let Some(g) = code_grad {
        // C = H·Hᵀ  ⇒  ∂L/∂H = λ(G + Gᵀ)·H
        let sym = g.add(&g.transpose())?.scale(lambda);
        d_code = d_code.add(&sym.matmul(code)?)?;
    }

    let mut d_h = d_code;
    for l in (0..n_layers).rev() {
        // enc[l + 1] = σ(enc[l]·W_lᵀ + b_enc_l)
        let out = &enc[l + 1];
        let mut da = d_h;
        for (g, &y) in da.as_mut_slice().iter_mut().zip(out.as_slice()) {
            *g *= transfer.derivative_from_output(y);
        }
        let lg = &mut grads.layers[l];
        lg.b_enc = da.sum_rows();
        let w_enc = da.t_matmul(&enc[l])?;
        for (acc, v) in lg.weight.as_mut_slice().iter_mut().zip(w_enc.as_slice()) {
            *acc += v;
        }
        if l > 0 {
            d_h = da.matmul(&layers[l].weight)?;
        } else {
            break;
        }
    }
    Ok((loss, grads))
}
