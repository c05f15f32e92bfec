//! Kernel PCA on an uncentered kernel matrix, Nyström out-of-sample
//! projection, and ordinary PCA for code-space operations.

use crate::error::{Error, Result};
use crate::kernels::KernelMatrix;
use crate::numerics::{sym_eig, Matrix};

/// Leading eigenpairs of a training kernel, with non-positive eigenvalues dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct KpcaModel {
    /// Descending, strictly positive.
    pub eigenvalues: Vec<f64>,
    /// `n × m`, orthonormal columns.
    pub eigenvectors: Matrix,
    /// Components asked for; `eigenvalues.len()` may be smaller.
    pub requested: usize,
}

impl KpcaModel {
    pub fn components(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn num_train(&self) -> usize {
        self.eigenvectors.rows()
    }

    /// Number of requested components that were dropped for non-positive eigenvalues.
    pub fn dropped(&self) -> usize {
        self.requested - self.components()
    }

    /// Keeps only the leading `m` components.
    pub fn truncate(&self, m: usize) -> KpcaModel {
        let m = m.min(self.components());
        KpcaModel {
            eigenvalues: self.eigenvalues[..m].to_vec(),
            eigenvectors: self.eigenvectors.leading_cols(m),
            requested: m,
        }
    }
}

/// Top-`m` eigenpairs of `k`. Eigenvalues `≤ 0` are excluded, shrinking `m`.
pub fn kpca_fit(k: &KernelMatrix, m: usize) -> Result<KpcaModel> {
    let n = k.rows();
    if m < 1 || m > n {
        return Err(Error::arg(format!(
            "components must lie in 1..={n}, got {m}"
        )));
    }
    let eig = sym_eig(k)?;
    let kept = eig.values[..m].iter().take_while(|&&v| v > 0.0).count();
    Ok(KpcaModel {
        eigenvalues: eig.values[..kept].to_vec(),
        eigenvectors: eig.vectors.leading_cols(kept),
        requested: m,
    })
}

/// Training projections `Z_m = E_m Λ_m^{1/2}`.
pub fn kpca_project(model: &KpcaModel) -> Matrix {
    let mut z = model.eigenvectors.clone();
    let roots: Vec<f64> = model.eigenvalues.iter().map(|v| v.sqrt()).collect();
    for i in 0..z.rows() {
        for (v, r) in z.row_mut(i).iter_mut().zip(&roots) {
            *v *= r;
        }
    }
    z
}

/// Low-rank kernel `Z·Zᵀ`.
pub fn kernel_reconstruction(z: &Matrix) -> KernelMatrix {
    KernelMatrix::new(z.gram()).expect("finite projections give a finite Gram matrix")
}

/// Out-of-sample projections `K_cross · E_m · Λ_m^{−1/2}` for `t` new points,
/// where `k_cross` is `t × n` against the training set in training order.
pub fn nystrom_project(model: &KpcaModel, k_cross: &Matrix) -> Result<Matrix> {
    if k_cross.cols() != model.num_train() {
        return Err(Error::dim(format!(
            "cross kernel has {} columns, model was fitted on {} samples",
            k_cross.cols(),
            model.num_train()
        )));
    }
    let mut z = k_cross.matmul(&model.eigenvectors)?;
    let inv_roots: Vec<f64> = model.eigenvalues.iter().map(|v| 1.0 / v.sqrt()).collect();
    for i in 0..z.rows() {
        for (v, r) in z.row_mut(i).iter_mut().zip(&inv_roots) {
            *v *= r;
        }
    }
    Ok(z)
}

/// Mean-centered linear PCA.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `dim × m`, orthonormal columns.
    pub directions: Matrix,
    /// Variance along each direction, descending.
    pub variances: Vec<f64>,
    /// Total variance of the fitted data.
    pub total_variance: f64,
}

impl PcaModel {
    pub fn components(&self) -> usize {
        self.directions.cols()
    }
}

/// PCA of the rows of `c` keeping `m` directions.
pub fn pca_fit(c: &Matrix, m: usize) -> Result<PcaModel> {
    let (n, dim) = c.shape();
    if m < 1 || m > n.min(dim) {
        return Err(Error::arg(format!(
            "components must lie in 1..={}, got {m}",
            n.min(dim)
        )));
    }
    let mean = c.column_means();
    let mut centered = c.clone();
    let neg: Vec<f64> = mean.iter().map(|v| -v).collect();
    centered.add_row_vector(&neg);
    let mut cov = centered.t_matmul(&centered)?.scale(1.0 / n as f64);
    // Exact symmetry for the eigensolver.
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    let eig = sym_eig(&cov)?;
    let total_variance = cov.diag().iter().sum();
    Ok(PcaModel {
        mean,
        directions: eig.vectors.leading_cols(m),
        variances: eig.values[..m].iter().map(|v| v.max(0.0)).collect(),
        total_variance,
    })
}

/// Scores `(c − mean) · directions`.
pub fn pca_project(model: &PcaModel, c: &Matrix) -> Result<Matrix> {
    if c.cols() != model.mean.len() {
        return Err(Error::dim(format!(
            "PCA fitted on {} columns, input has {}",
            model.mean.len(),
            c.cols()
        )));
    }
    let mut centered = c.clone();
    let neg: Vec<f64> = model.mean.iter().map(|v| -v).collect();
    centered.add_row_vector(&neg);
    centered.matmul(&model.directions)
}

/// `mean + scores · directionsᵀ`.
pub fn pca_backproject(model: &PcaModel, scores: &Matrix) -> Result<Matrix> {
    if scores.cols() != model.components() {
        return Err(Error::dim(format!(
            "{} scores per row for a {}-component model",
            scores.cols(),
            model.components()
        )));
    }
    let mut out = scores.matmul_t(&model.directions)?;
    out.add_row_vector(&model.mean);
    Ok(out)
}
