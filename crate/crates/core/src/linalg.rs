//! Small dense helpers shared across modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result};

/// The 2×2 symplectic block `[[0, 1], [−1, 0]]`.
pub fn j2() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
}

/// Integer power of a square matrix; `k = 0` gives the identity.
pub fn mat_pow(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn max_abs_vec(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().fold(0.0_f64, |acc, s| acc.max(*s))
}

/// Largest entry of `|M − Mᵀ|` together with its position.
pub fn max_asymmetry(m: &DMatrix<f64>) -> (f64, usize, usize) {
    let mut worst = (0.0, 0, 0);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)]).abs();
            if d > worst.0 {
                worst = (d, i, j);
            }
        }
    }
    worst
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn ensure_square(m: &DMatrix<f64>, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be square, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub fn ensure_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} has non-finite entries")))
    }
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Copies `block` into `dst` with its top-left corner at `(r, c)`.
pub fn set_block(dst: &mut DMatrix<f64>, r: usize, c: usize, block: &DMatrix<f64>) {
    dst.view_mut((r, c), (block.nrows(), block.ncols())).copy_from(block);
}

/// Block-diagonal concatenation.
pub fn block_diag(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        set_block(&mut out, r, c, b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Row-major nested representation used by the JSON reports.
pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}
