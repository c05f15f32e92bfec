use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::ops::Deref;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::{pairwise_sq_dists, Matrix, SYMMETRY_TOL};

/// A matrix of kernel evaluations between two sample sets.
///
/// Square kernels over a single sample set are symmetric with a nonnegative
/// diagonal; rectangular cross-kernels carry no such structure.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix(Matrix);

impl KernelMatrix {
    /// Wraps a cross-kernel (or any finite matrix) without structural checks.
    pub fn new(values: Matrix) -> Result<Self> {
        if !values.is_finite() {
            return Err(Error::arg("kernel matrix has non-finite entries"));
        }
        Ok(KernelMatrix(values))
    }

    /// Wraps a kernel over one sample set, checking symmetry and the diagonal.
    pub fn new_square(values: Matrix) -> Result<Self> {
        if !values.is_symmetric(SYMMETRY_TOL) {
            return Err(Error::NotSymmetric(format!(
                "kernel of shape {:?} has asymmetry {:.3e}",
                values.shape(),
                values.asymmetry()
            )));
        }
        if let Some((i, v)) = values
            .diag()
            .into_iter()
            .enumerate()
            .find(|(_, v)| *v < 0.0)
        {
            return Err(Error::arg(format!(
                "kernel diagonal entry {i} is negative ({v})"
            )));
        }
        KernelMatrix::new(values)
    }

    pub fn values(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Rows and columns `idx`, as used to cut a mini-batch prior out of the full prior.
    pub fn submatrix(&self, idx: &[usize]) -> KernelMatrix {
        KernelMatrix(self.0.select(idx, idx))
    }

    /// Rows `rows`, columns `cols`.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> KernelMatrix {
        KernelMatrix(self.0.select(rows, cols))
    }

    /// Permutes rows and columns so that equal labels are contiguous (stable by index).
    pub fn sorted_by_labels(&self, labels: &[usize]) -> Result<KernelMatrix> {
        if !self.0.is_square() || labels.len() != self.0.rows() {
            return Err(Error::dim(
                "label sort needs a square kernel with one label per row",
            ));
        }
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by_key(|&i| labels[i]);
        Ok(self.submatrix(&order))
    }

    /// Writes the little-endian binary layout: `u64` rows, `u64` cols, then row-major `f64`s.
    pub fn write_binary(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(&(self.0.rows() as u64).to_le_bytes())?;
        w.write_all(&(self.0.cols() as u64).to_le_bytes())?;
        for v in self.0.as_slice() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(r: &mut impl Read) -> Result<KernelMatrix> {
        let mut word = [0u8; 8];
        r.read_exact(&mut word)
            .map_err(|_| Error::format("kernel.rows", "truncated header"))?;
        let rows = u64::from_le_bytes(word) as usize;
        r.read_exact(&mut word)
            .map_err(|_| Error::format("kernel.cols", "truncated header"))?;
        let cols = u64::from_le_bytes(word) as usize;
        let count = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::format("kernel.cols", "size overflows"))?;
        let mut payload = Vec::new();
        r.read_to_end(&mut payload)?;
        if payload.len() != count * 8 {
            return Err(Error::format(
                "kernel.values",
                format!("expected {} bytes, found {}", count * 8, payload.len()),
            ));
        }
        let data = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        KernelMatrix::new(Matrix::from_vec(rows, cols, data)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_binary(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<KernelMatrix> {
        KernelMatrix::read_binary(&mut BufReader::new(File::open(path)?))
    }

    /// Headerless CSV, one matrix row per line, 17 significant digits.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        for row in self.0.row_iter() {
            let line: Vec<String> = row.iter().map(|&v| crate::fmt_f64(v)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

impl Deref for KernelMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

impl AsRef<Matrix> for KernelMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

/// Gaussian kernel `exp(−‖a − b‖² / (2σ²))` between the rows of `xa` and `xb`.
pub fn rbf_kernel(xa: &Matrix, xb: &Matrix, sigma: f64) -> Result<KernelMatrix> {
    if !(sigma > 0.0) {
        return Err(Error::arg(format!(
            "RBF width must be positive, got {sigma}"
        )));
    }
    let mut k = pairwise_sq_dists(xa, xb)?;
    let scale = 1.0 / (2.0 * sigma * sigma);
    k.map_inplace(|d| (-d * scale).exp());
    Ok(KernelMatrix(k))
}

/// Supervised 0/1 kernel: 1 iff two samples share a label.
pub fn ideal_kernel(labels: &[usize]) -> KernelMatrix {
    let n = labels.len();
    KernelMatrix(Matrix::from_fn(n, n, |i, j| {
        if labels[i] == labels[j] {
            1.0
        } else {
            0.0
        }
    }))
}

fn checked_norms(c: &Matrix, p: &Matrix) -> Result<(f64, f64)> {
    if c.shape() != p.shape() {
        return Err(Error::dim(format!(
            "kernel shapes {:?} and {:?} differ",
            c.shape(),
            p.shape()
        )));
    }
    let (nc, np) = (c.frobenius_norm(), p.frobenius_norm());
    if !(nc > 0.0) || !(np > 0.0) {
        return Err(Error::degenerate(format!(
            "kernel alignment needs nonzero norms, got {nc:.3e} and {np:.3e}"
        )));
    }
    Ok((nc, np))
}

/// Kernel alignment `⟨C, P⟩_F / (‖C‖_F ‖P‖_F)`.
pub fn alignment(c: &Matrix, p: &Matrix) -> Result<f64> {
    let (nc, np) = checked_norms(c, p)?;
    Ok((c.frobenius_inner(p)? / (nc * np)).clamp(-1.0, 1.0))
}

/// Normalized Frobenius distance `‖C/‖C‖_F − P/‖P‖_F‖_F`, which equals
/// `√(2 − 2·alignment(C, P))`.
pub fn code_loss(c: &Matrix, p: &Matrix) -> Result<f64> {
    let (nc, np) = checked_norms(c, p)?;
    let sum: f64 = c
        .as_slice()
        .iter()
        .zip(p.as_slice())
        .map(|(&a, &b)| {
            let d = a / nc - b / np;
            d * d
        })
        .sum();
    Ok(sum.sqrt())
}
