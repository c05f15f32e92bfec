//! Diagonal-covariance Gaussian mixtures fitted by expectation-maximization.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Rng};

/// Responsibility mass below which a component is considered empty and re-seeded.
pub const EMPTY_COMPONENT_MASS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmConfig {
    pub max_iters: usize,
    /// Stop once the relative change of the average log-likelihood drops below this.
    pub tol: f64,
    pub variance_floor: f64,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig {
            max_iters: 100,
            tol: 1e-6,
            variance_floor: 1e-6,
        }
    }
}

/// Fitted mixture with diagonal covariances.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmModel {
    pub weights: Vec<f64>,
    /// `g × d`
    pub means: Matrix,
    /// `g × d`, each entry at least the variance floor.
    pub variances: Matrix,
    /// Average per-sample log-likelihood evaluated before each M-step and at the end.
    pub log_likelihood_trace: Vec<f64>,
    /// Components re-seeded because they lost all responsibility.
    pub reseeds: usize,
}

impl GmmModel {
    pub fn num_components(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means.cols()
    }

    /// Final average log-likelihood on the training data.
    pub fn log_likelihood(&self) -> f64 {
        *self
            .log_likelihood_trace
            .last()
            .unwrap_or(&f64::NEG_INFINITY)
    }

    fn check_dim(&self, x: &Matrix) -> Result<()> {
        if x.cols() != self.dim() {
            return Err(Error::dim(format!(
                "model has dimension {}, data has {}",
                self.dim(),
                x.cols()
            )));
        }
        Ok(())
    }

    /// Unnormalized log posteriors `log w_j + log N(x_i | μ_j, Σ_j)` (n × g).
    fn joint_log_density(&self, x: &Matrix) -> Matrix {
        let g = self.num_components();
        let d = self.dim();
        let consts: Vec<f64> = (0..g)
            .map(|j| {
                let log_det: f64 = self
                    .variances
                    .row(j)
                    .iter()
                    .map(|v| (2.0 * PI * v).ln())
                    .sum();
                self.weights[j].ln() - 0.5 * log_det
            })
            .collect();
        let inv_var = self.variances.map(|v| 1.0 / v);
        Matrix::from_fn(x.rows(), g, |i, j| {
            let xi = x.row(i);
            let mu = self.means.row(j);
            let iv = inv_var.row(j);
            let mut q = 0.0;
            for k in 0..d {
                let diff = xi[k] - mu[k];
                q += diff * diff * iv[k];
            }
            consts[j] - 0.5 * q
        })
    }

    /// Normalizes log densities row-wise in place; returns the per-row log-sum-exp.
    fn normalize_rows(log_dens: &mut Matrix) -> Vec<f64> {
        let mut lse = Vec::with_capacity(log_dens.rows());
        for i in 0..log_dens.rows() {
            let row = log_dens.row_mut(i);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            for v in row.iter_mut() {
                *v = (*v - max).exp();
                sum += *v;
            }
            for v in row.iter_mut() {
                *v /= sum;
            }
            lse.push(max + sum.ln());
        }
        lse
    }

    /// Posterior component probabilities, one row per sample.
    pub fn posteriors(&self, x: &Matrix) -> Result<Matrix> {
        self.check_dim(x)?;
        let mut p = self.joint_log_density(x);
        GmmModel::normalize_rows(&mut p);
        Ok(p)
    }

    /// Average log-likelihood of `x` under the model.
    pub fn score(&self, x: &Matrix) -> Result<f64> {
        self.check_dim(x)?;
        let mut p = self.joint_log_density(x);
        let lse = GmmModel::normalize_rows(&mut p);
        Ok(lse.iter().sum::<f64>() / x.rows().max(1) as f64)
    }
}

fn column_variances(x: &Matrix, floor: f64) -> Vec<f64> {
    let mean = x.column_means();
    let n = x.rows() as f64;
    let mut var = vec![0.0; x.cols()];
    for row in x.row_iter() {
        for ((v, &xi), &m) in var.iter_mut().zip(row).zip(&mean) {
            *v += (xi - m) * (xi - m);
        }
    }
    var.into_iter().map(|v| (v / n).max(floor)).collect()
}

/// Posterior probabilities of each component for each row of `x`.
pub fn gmm_posteriors(model: &GmmModel, x: &Matrix) -> Result<Matrix> {
    model.posteriors(x)
}

/// Fits a `g`-component diagonal Gaussian mixture to the rows of `x`.
///
/// Initialization picks `g` distinct rows as means, uniform weights, and the
/// per-dimension sample variance for every component.
pub fn fit_gmm(x: &Matrix, g: usize, rng: &mut Rng, config: &EmConfig) -> Result<GmmModel> {
    let (n, d) = x.shape();
    if g < 1 || n < g {
        return Err(Error::arg(format!(
            "a {g}-component mixture needs at least {g} samples, got {n}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::arg("GMM input has non-finite entries"));
    }
    let floor = config.variance_floor;
    let global_var = column_variances(x, floor);
    let init = rng.sample_indices(n, g);
    let mut model = GmmModel {
        weights: vec![1.0 / g as f64; g],
        means: x.select_rows(&init),
        variances: Matrix::from_fn(g, d, |_, k| global_var[k]),
        log_likelihood_trace: Vec::new(),
        reseeds: 0,
    };

    for iter in 0..=config.max_iters {
        let mut resp = model.joint_log_density(x);
        let lse = GmmModel::normalize_rows(&mut resp);
        let ll = lse.iter().sum::<f64>() / n as f64;
        if let Some(&prev) = model.log_likelihood_trace.last() {
            model.log_likelihood_trace.push(ll);
            if ((ll - prev) / prev.abs().max(f64::MIN_POSITIVE)).abs() < config.tol {
                break;
            }
        } else {
            model.log_likelihood_trace.push(ll);
        }
        if iter == config.max_iters {
            break;
        }

        // M-step.
        let mass = resp.sum_rows();
        let weighted_sum = resp.t_matmul(x)?;
        for j in 0..g {
            model.weights[j] = mass[j] / n as f64;
            if mass[j] < EMPTY_COMPONENT_MASS {
                let pick = rng.below(n);
                model.means.row_mut(j).copy_from_slice(x.row(pick));
                model.variances.row_mut(j).copy_from_slice(&global_var);
                model.reseeds += 1;
                continue;
            }
            let mu: Vec<f64> = weighted_sum.row(j).iter().map(|s| s / mass[j]).collect();
            let mut var = vec![0.0; d];
            for i in 0..n {
                let r = resp[(i, j)];
                if r == 0.0 {
                    continue;
                }
                for ((v, &xi), &m) in var.iter_mut().zip(x.row(i)).zip(&mu) {
                    *v += r * (xi - m) * (xi - m);
                }
            }
            for v in var.iter_mut() {
                *v = (*v / mass[j]).max(floor);
            }
            model.means.row_mut(j).copy_from_slice(&mu);
            model.variances.row_mut(j).copy_from_slice(&var);
        }
        let total: f64 = model.weights.iter().sum();
        for w in model.weights.iter_mut() {
            *w /= total;
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_blobs, BlobSpec};

    #[test]
    fn single_component_closed_form() {
        let mut rng = Rng::new(1);
        let x = Matrix::from_fn(50, 3, |_, j| rng.normal() * (j + 1) as f64);
        let model = fit_gmm(&x, 1, &mut Rng::new(0), &EmConfig::default()).unwrap();
        let mean = x.column_means();
        let var = column_variances(&x, 1e-6);
        for k in 0..3 {
            assert!((model.means[(0, k)] - mean[k]).abs() < 1e-12);
            assert!((model.variances[(0, k)] - var[k]).abs() < 1e-12);
        }
        assert_eq!(model.weights, vec![1.0]);
    }

    #[test]
    fn constant_data_hits_variance_floor() {
        let x = Matrix::filled(10, 2, 0.3);
        let model = fit_gmm(&x, 1, &mut Rng::new(0), &EmConfig::default()).unwrap();
        assert!(model.variances.as_slice().iter().all(|&v| v == 1e-6));
    }

    #[test]
    fn recovers_separated_means() {
        // Two clusters at 0 and 10 along every axis, unit std.
        let sep = 10.0;
        let mut rng = Rng::new(5);
        let x = Matrix::from_fn(
            200,
            2,
            |i, _| if i % 2 == 0 { 0.0 } else { sep } + rng.normal(),
        );
        let model = fit_gmm(&x, 2, &mut Rng::new(3), &EmConfig::default()).unwrap();
        let mut means: Vec<f64> = (0..2).map(|j| model.means[(j, 0)]).collect();
        means.sort_by(f64::total_cmp);
        let true_sep = sep * 2f64.sqrt();
        for (m, t) in means.iter().zip([0.0, sep]) {
            assert!((m - t).abs() < 0.1 * true_sep, "mean {m} vs {t}");
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let data = make_blobs(&BlobSpec::new(90, 4, 3, 2.0), &mut Rng::new(2)).unwrap();
        let a = fit_gmm(data.samples(), 3, &mut Rng::new(8), &EmConfig::default()).unwrap();
        let b = fit_gmm(data.samples(), 3, &mut Rng::new(8), &EmConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn log_likelihood_never_decreases() {
        let data = make_blobs(&BlobSpec::new(120, 5, 3, 1.0), &mut Rng::new(6)).unwrap();
        for seed in 0..5 {
            let m = fit_gmm(data.samples(), 6, &mut Rng::new(seed), &EmConfig::default()).unwrap();
            for w in m.log_likelihood_trace.windows(2) {
                assert!(w[1] - w[0] >= -1e-9, "{} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn too_few_samples() {
        let x = Matrix::zeros(2, 2);
        assert!(matches!(
            fit_gmm(&x, 3, &mut Rng::new(0), &EmConfig::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn posterior_examples() {
        let model = GmmModel {
            weights: vec![0.5, 0.5],
            means: Matrix::from_rows(&[[0.0, 0.0], [10.0, 10.0]]).unwrap(),
            variances: Matrix::filled(2, 2, 1.0),
            log_likelihood_trace: vec![],
            reseeds: 0,
        };
        let x = Matrix::from_rows(&[[0.0, 0.0], [4.0, 6.0], [10.0, 10.0]]).unwrap();
        let p = gmm_posteriors(&model, &x).unwrap();
        // Direct density ratio at component A's mean: the normalizing
        // constants cancel, leaving exp(0) / (exp(0) + exp(-100)).
        let expected = 1.0 / (1.0 + (-100f64).exp());
        assert!((p[(0, 0)] - expected).abs() < 1e-15);
        assert!(p[(0, 0)] > 0.99);
        for i in 0..3 {
            assert!((p.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(gmm_posteriors(&model, &Matrix::zeros(1, 3)).is_err());

        let one = GmmModel {
            weights: vec![1.0],
            means: Matrix::zeros(1, 2),
            variances: Matrix::filled(1, 2, 1e-6),
            log_likelihood_trace: vec![],
            reseeds: 0,
        };
        let far = Matrix::from_rows(&[[1e3, -1e3], [0.0, 0.0]]).unwrap();
        assert_eq!(
            gmm_posteriors(&one, &far).unwrap(),
            Matrix::filled(2, 1, 1.0)
        );
    }
}
