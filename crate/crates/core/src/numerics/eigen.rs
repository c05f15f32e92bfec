//! Symmetric eigendecomposition and Cholesky solves.
//!
//! The eigensolver reduces the matrix to tridiagonal form with Householder
//! reflections and then runs the implicit QL iteration with Wilkinson shifts
//! (the `tred2`/`tql2` pair from EISPACK, by way of JAMA). Deflation happens when
//! an off-diagonal entry drops below machine epsilon relative to the local
//! diagonal mass, which is tighter than `1e-12·‖A‖_F` on the residual.

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Relative tolerance used when validating that an input is symmetric.
pub const SYMMETRY_TOL: f64 = 1e-9;

const MAX_QL_ITERS: usize = 64;

/// Eigenvalues sorted in descending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymEigen {
    /// `E · diag(λ) · Eᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.vectors.rows();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for (v, &l) in scaled.row_mut(i).iter_mut().zip(&self.values) {
                *v *= l;
            }
        }
        scaled
            .matmul_t(&self.vectors)
            .expect("eigenvector matrix is square")
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Each eigenvector is signed so that its first component of magnitude above
/// `1e-10` is positive. For repeated eigenvalues any orthonormal basis of the
/// eigenspace may be returned.
pub fn sym_eig(a: &Matrix) -> Result<SymEigen> {
    if !a.is_square() {
        return Err(Error::dim(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::arg("matrix has non-finite entries"));
    }
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric(format!(
            "max asymmetry {:.3e} exceeds {SYMMETRY_TOL:e} of max entry {:.3e}",
            a.asymmetry(),
            a.max_abs()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(SymEigen {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        });
    }

    // Work on the exactly symmetric part.
    let mut v = Matrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    ql_implicit(&mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = v.select_cols(&order);
    for j in 0..n {
        let flip = (0..n)
            .map(|i| vectors[(i, j)])
            .find(|x| x.abs() > 1e-10)
            .is_some_and(|x| x < 0.0);
        if flip {
            for i in 0..n {
                vectors[(i, j)] = -vectors[(i, j)];
            }
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Householder reduction to tridiagonal form. On return `v` holds the
/// accumulated orthogonal transform, `d` the diagonal and `e[1..]` the
/// subdiagonal.
fn tridiagonalize(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal matrix `(d, e)`, rotating `v`.
fn ql_implicit(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERS {
                    return Err(Error::degenerate(format!(
                        "QL iteration did not converge for eigenvalue {l}"
                    )));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let vk = v.row_mut(k);
                        let h = vk[i + 1];
                        vk[i + 1] = s * vk[i] + c * h;
                        vk[i] = c * vk[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Lower-triangular Cholesky factor `L` with `A = L·Lᵀ`.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::dim(format!(
            "Cholesky needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric(format!(
            "max asymmetry {:.3e}",
            a.asymmetry()
        )));
    }
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "pivot {j} is {diag:.3e}"
            )));
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            let (ri, rj) = (l.row(i), l.row(j));
            for k in 0..j {
                s -= ri[k] * rj[k];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `A·X = B` for symmetric positive-definite `A`.
pub fn solve_spd(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if b.rows() != a.rows() {
        return Err(Error::dim(format!(
            "right-hand side has {} rows, system has order {}",
            b.rows(),
            a.rows()
        )));
    }
    let l = cholesky(a)?;
    let n = a.rows();
    let m = b.cols();
    // Forward substitution L·Y = B, one row of Y at a time across all columns.
    let mut y = b.clone();
    for i in 0..n {
        for k in 0..i {
            let lik = l[(i, k)];
            if lik == 0.0 {
                continue;
            }
            for j in 0..m {
                let yk = y[(k, j)];
                y[(i, j)] -= lik * yk;
            }
        }
        let lii = l[(i, i)];
        for v in y.row_mut(i) {
            *v /= lii;
        }
    }
    // Back substitution Lᵀ·X = Y.
    let mut x = y;
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let lki = l[(k, i)];
            if lki == 0.0 {
                continue;
            }
            for j in 0..m {
                let xk = x[(k, j)];
                x[(i, j)] -= lki * xk;
            }
        }
        let lii = l[(i, i)];
        for v in x.row_mut(i) {
            *v /= lii;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rng;

    fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| rng.normal())
    }

    #[test]
    fn diagonal_case() {
        let a = Matrix::from_diag(&[1.0, 3.0]);
        let eig = sym_eig(&a).unwrap();
        assert_eq!(eig.values, vec![3.0, 1.0]);
        assert_eq!(
            eig.vectors,
            Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap()
        );
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let eig = sym_eig(&Matrix::identity(4)).unwrap();
        assert_eq!(eig.values, vec![1.0; 4]);
        let ete = eig.vectors.t_matmul(&eig.vectors).unwrap();
        assert!(ete.sub(&Matrix::identity(4)).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn gram_matrix_reconstructs() {
        let mut rng = Rng::new(11);
        let x = random_matrix(&mut rng, 10, 10);
        let a = x.t_matmul(&x).unwrap();
        let eig = sym_eig(&a).unwrap();
        let err = eig.reconstruct().sub(&a).unwrap().frobenius_norm();
        assert!(err <= 1e-8 * a.frobenius_norm(), "err {err}");
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        for (j, &l) in eig.values.iter().enumerate() {
            let v = Matrix::from_vec(10, 1, eig.vectors.column(j)).unwrap();
            let av = a.matmul(&v).unwrap();
            let resid = av.sub(&v.scale(l)).unwrap().frobenius_norm();
            assert!(resid <= 1e-8 * a.frobenius_norm());
        }
    }

    #[test]
    fn sign_convention_makes_leading_component_positive() {
        let mut rng = Rng::new(5);
        let x = random_matrix(&mut rng, 6, 6);
        let eig = sym_eig(&x.gram()).unwrap();
        for j in 0..6 {
            let first = eig
                .vectors
                .column(j)
                .into_iter()
                .find(|v| v.abs() > 1e-10)
                .unwrap();
            assert!(first > 0.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            sym_eig(&Matrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
        let a = Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eig(&a), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn tiny_orders() {
        let eig = sym_eig(&Matrix::from_rows(&[[-2.5]]).unwrap()).unwrap();
        assert_eq!(eig.values, vec![-2.5]);
        assert_eq!(eig.vectors[(0, 0)], 1.0);
        let eig = sym_eig(&Matrix::zeros(0, 0)).unwrap();
        assert!(eig.values.is_empty());
    }

    #[test]
    fn spd_identity_and_scalar_systems() {
        let mut rng = Rng::new(3);
        let b = random_matrix(&mut rng, 4, 3);
        assert_eq!(solve_spd(&Matrix::identity(4), &b).unwrap(), b);
        let x = solve_spd(&Matrix::identity(3).scale(2.0), &Matrix::identity(3)).unwrap();
        assert!(x.sub(&Matrix::identity(3).scale(0.5)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn spd_residual() {
        let mut rng = Rng::new(8);
        let m = random_matrix(&mut rng, 8, 8);
        let a = m.t_matmul(&m).unwrap().add(&Matrix::identity(8)).unwrap();
        let b = random_matrix(&mut rng, 8, 5);
        let x = solve_spd(&a, &b).unwrap();
        let resid = a.matmul(&x).unwrap().sub(&b).unwrap().frobenius_norm();
        assert!(resid <= 1e-8 * b.frobenius_norm());
    }

    #[test]
    fn indefinite_system_is_rejected() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        let err = solve_spd(&a, &Matrix::identity(2)).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite(_)));
        let err = solve_spd(&Matrix::identity(2), &Matrix::zeros(3, 1)).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }
}
