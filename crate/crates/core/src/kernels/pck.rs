//! Probabilistic cluster kernel: averaged posterior inner products over an
//! ensemble of Gaussian mixtures with varying component counts and seeds.

use rayon::prelude::*;

use super::gmm::{fit_gmm, EmConfig, GmmModel};
use super::matrix::KernelMatrix;
use crate::error::{Error, Result};
use crate::numerics::{Matrix, Rng};

/// Mixture fitted with initialization `q` (1-based) and `g` components.
#[derive(Debug, Clone, PartialEq)]
pub struct PckMember {
    pub q: usize,
    pub g: usize,
    pub model: GmmModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PckEnsemble {
    pub members: Vec<PckMember>,
    pub num_inits: usize,
    pub max_components: usize,
    /// Normalizer, `num_inits · (max_components − 1)`.
    pub z: f64,
}

impl PckEnsemble {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].model.dim()
    }

    pub fn get(&self, q: usize, g: usize) -> Option<&GmmModel> {
        self.members
            .iter()
            .find(|m| m.q == q && m.g == g)
            .map(|m| &m.model)
    }

    fn posteriors(&self, x: &Matrix) -> Result<Vec<Matrix>> {
        if x.cols() != self.dim() {
            return Err(Error::dim(format!(
                "ensemble fitted on dimension {}, data has {}",
                self.dim(),
                x.cols()
            )));
        }
        self.members
            .par_iter()
            .map(|m| m.model.posteriors(x))
            .collect()
    }
}

/// Stream index for member `(q, g)`; each member draws from its own stream.
fn stream_index(q: usize, g: usize) -> u64 {
    ((q as u64) << 32) | g as u64
}

/// Fits `q_count · (g_max − 1)` mixtures: `g = 2..=g_max` components, each
/// with `q_count` independent initializations.
pub fn fit_pck(x: &Matrix, q_count: usize, g_max: usize, rng: &mut Rng) -> Result<PckEnsemble> {
    fit_pck_with(x, q_count, g_max, &EmConfig::default(), rng)
}

pub fn fit_pck_with(
    x: &Matrix,
    q_count: usize,
    g_max: usize,
    config: &EmConfig,
    rng: &mut Rng,
) -> Result<PckEnsemble> {
    if g_max < 2 {
        return Err(Error::arg(format!("PCK needs G >= 2, got {g_max}")));
    }
    if q_count < 1 {
        return Err(Error::arg("PCK needs Q >= 1"));
    }
    if x.rows() < g_max {
        return Err(Error::arg(format!(
            "PCK with G={g_max} needs at least {g_max} samples, got {}",
            x.rows()
        )));
    }
    let base = rng.next_u64();
    let jobs: Vec<(usize, usize)> = (1..=q_count)
        .flat_map(|q| (2..=g_max).map(move |g| (q, g)))
        .collect();
    let members = jobs
        .into_par_iter()
        .map(|(q, g)| {
            let mut member_rng = Rng::with_stream(base, stream_index(q, g));
            fit_gmm(x, g, &mut member_rng, config).map(|model| PckMember { q, g, model })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PckEnsemble {
        members,
        num_inits: q_count,
        max_components: g_max,
        z: (q_count * (g_max - 1)) as f64,
    })
}

/// `κ(a, b) = (1/Z) Σ_q Σ_g π_a(q,g)ᵀ π_b(q,g)` between the rows of `xa` and `xb`.
///
/// When `xa` and `xb` are the same matrix the result is exactly symmetric.
pub fn pck_kernel(ens: &PckEnsemble, xa: &Matrix, xb: &Matrix) -> Result<KernelMatrix> {
    let same = std::ptr::eq(xa, xb) || xa == xb;
    let pa = ens.posteriors(xa)?;
    let pb = if same {
        None
    } else {
        Some(ens.posteriors(xb)?)
    };
    let mut k = Matrix::zeros(xa.rows(), xb.rows());
    for (i, post_a) in pa.iter().enumerate() {
        let term = match &pb {
            None => post_a.gram(),
            Some(pb) => post_a.matmul_t(&pb[i])?,
        };
        for (acc, v) in k.as_mut_slice().iter_mut().zip(term.as_slice()) {
            *acc += v;
        }
    }
    let inv_z = 1.0 / ens.z;
    k.map_inplace(|v| v * inv_z);
    if same {
        KernelMatrix::new_square(k)
    } else {
        KernelMatrix::new(k)
    }
}
