//! Pre-images by kernel ridge regression: learn a map from projected
//! feature vectors back to input space with an RBF kernel on the projections.

use crate::error::{Error, Result};
use crate::kernels::rbf_kernel;
use crate::numerics::{pairwise_sq_dists, solve_spd, Matrix};

/// Default ridge grid searched by [`grid_search_reg`].
pub const DEFAULT_REG_GRID: [f64; 6] = [1e-3, 1e-2, 0.1, 0.5, 1.0, 10.0];

#[derive(Debug, Clone, PartialEq)]
pub struct KrrModel {
    /// `n × d` dual coefficients.
    pub alpha: Matrix,
    /// `n × m` training projections.
    pub z_train: Matrix,
    pub sigma: f64,
    pub reg: f64,
    /// Clamp predictions into `[0, 1]` (pixel data).
    pub clamp_unit: bool,
}

/// Median of all pairwise Euclidean distances between the rows of `z`.
pub fn median_sigma(z: &Matrix) -> Result<f64> {
    let n = z.rows();
    if n < 2 {
        return Err(Error::degenerate(format!(
            "median distance needs at least 2 points, got {n}"
        )));
    }
    let d2 = pairwise_sq_dists(z, z)?;
    let mut dists: Vec<f64> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            dists.push(d2[(i, j)].sqrt());
        }
    }
    dists.sort_by(f64::total_cmp);
    let mid = dists.len() / 2;
    let median = if dists.len() % 2 == 0 {
        0.5 * (dists[mid - 1] + dists[mid])
    } else {
        dists[mid]
    };
    if !(median > 0.0) {
        return Err(Error::degenerate("median pairwise distance is zero"));
    }
    Ok(median)
}

/// Solves `(K_Z + reg·I)·alpha = X` with `K_Z` the RBF kernel of `z`.
pub fn krr_fit(z: &Matrix, x: &Matrix, sigma: f64, reg: f64) -> Result<KrrModel> {
    if z.rows() != x.rows() {
        return Err(Error::dim(format!(
            "{} projections for {} targets",
            z.rows(),
            x.rows()
        )));
    }
    if !(reg >= 0.0) {
        return Err(Error::arg(format!("ridge must be >= 0, got {reg}")));
    }
    let mut k = rbf_kernel(z, z, sigma)?.into_matrix();
    for i in 0..k.rows() {
        k[(i, i)] += reg;
    }
    let alpha = solve_spd(&k, x)?;
    Ok(KrrModel {
        alpha,
        z_train: z.clone(),
        sigma,
        reg,
        clamp_unit: false,
    })
}

impl KrrModel {
    pub fn with_clamp(mut self, clamp_unit: bool) -> Self {
        self.clamp_unit = clamp_unit;
        self
    }
}

/// `rbf(Z_new, Z_train)·alpha`, clamped to `[0, 1]` when the model says so.
pub fn krr_predict(model: &KrrModel, z_new: &Matrix) -> Result<Matrix> {
    if z_new.cols() != model.z_train.cols() {
        return Err(Error::dim(format!(
            "model expects {}-dimensional projections, got {}",
            model.z_train.cols(),
            z_new.cols()
        )));
    }
    let k = rbf_kernel(z_new, &model.z_train, model.sigma)?;
    let mut out = k.matmul(&model.alpha)?;
    if model.clamp_unit {
        out.map_inplace(|v| v.clamp(0.0, 1.0));
    }
    Ok(out)
}

/// Held-out data for choosing the ridge.
#[derive(Debug, Clone, Copy)]
pub struct Holdout<'a> {
    pub z: &'a Matrix,
    pub x: &'a Matrix,
}

/// Outcome of a ridge search: the winner and every candidate's validation MSE.
#[derive(Debug, Clone, PartialEq)]
pub struct RegSearch {
    pub best: f64,
    pub scores: Vec<(f64, f64)>,
}

/// Picks the ridge with the lowest held-out mean squared error; ties go to the smaller ridge.
pub fn grid_search_reg(
    z: &Matrix,
    x: &Matrix,
    sigma: f64,
    candidates: &[f64],
    holdout: Holdout<'_>,
    clamp_unit: bool,
) -> Result<RegSearch> {
    if candidates.is_empty() {
        return Err(Error::arg("no ridge candidates"));
    }
    if holdout.z.rows() != holdout.x.rows() || holdout.z.rows() == 0 {
        return Err(Error::dim(
            "holdout projections and targets must be non-empty and aligned",
        ));
    }
    let mut scores = Vec::with_capacity(candidates.len());
    for &reg in candidates {
        let model = krr_fit(z, x, sigma, reg)?.with_clamp(clamp_unit);
        let pred = krr_predict(&model, holdout.z)?;
        let err = pred.sub(holdout.x)?;
        let mse = err.as_slice().iter().map(|v| v * v).sum::<f64>() / err.as_slice().len() as f64;
        scores.push((reg, mse));
    }
    let best = scores
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)))
        .map(|(reg, _)| reg)
        .expect("non-empty");
    Ok(RegSearch { best, scores })
}
