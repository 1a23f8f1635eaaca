//! Matrix exponentials.
//!
//! [`expm`] is the general scaling-and-squaring Padé exponential.
//! [`HamiltonianFlow`] is an exact spectral propagator for generators
//! `A = 2ΘR` with `R ≻ 0`: with `R = LLᵀ`, `A` is similar to the real
//! skew-symmetric `K = 2LᵀΘL`, and
//!
//! ```text
//! e^{Kt} = cos(√(KᵀK) t) + K · sin(√(KᵀK) t) / √(KᵀK)
//! ```
//!
//! Both functions of `KᵀK` are entire, so they are evaluated stably from a
//! symmetric eigendecomposition. The phases are exact in `t`, which keeps
//! long-horizon runs free of secular drift.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::linalg::{self, symmetrize};
use crate::system::{hamiltonian_from_drift, SymplecticForm};
use crate::{Error, Result};

/// `e^{A}` by scaling and squaring with Padé approximants.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.is_empty() {
        return a.clone();
    }
    if a.iter().all(|v| *v == 0.0) {
        return DMatrix::identity(a.nrows(), a.ncols());
    }
    a.exp()
}

#[derive(Debug, Clone)]
pub struct HamiltonianFlow {
    left_cos: DMatrix<f64>,
    left_sin: DMatrix<f64>,
    right: DMatrix<f64>,
    freqs: DVector<f64>,
}

impl HamiltonianFlow {
    /// Flow of `ẋ = 2ΘRx`. Fails unless `R` is symmetric positive definite.
    pub fn new(r: &DMatrix<f64>, form: &SymplecticForm) -> Result<Self> {
        let n = linalg::ensure_square(r, "Hamiltonian matrix")?;
        if n != form.dim() {
            return Err(Error::DimensionMismatch(format!(
                "Hamiltonian is {n}×{n}, form is {}×{}",
                form.dim(),
                form.dim()
            )));
        }
        let chol = Cholesky::new(symmetrize(r)).ok_or_else(|| {
            Error::InvalidArgument("Hamiltonian matrix is not positive definite".into())
        })?;
        let l = chol.l();
        let lt = l.transpose();
        let k = &lt * form.matrix() * &l * 2.0;
        let gram = symmetrize(&(k.transpose() * &k));
        let eig = SymmetricEigen::new(gram);
        let v = eig.eigenvectors;
        let freqs = eig.eigenvalues.map(|e| e.max(0.0).sqrt());

        let lt_inv = lt
            .clone()
            .solve_upper_triangular(&DMatrix::identity(n, n))
            .ok_or_else(|| Error::Numerical("Cholesky factor is singular".into()))?;
        Ok(Self {
            left_cos: &lt_inv * &v,
            left_sin: &lt_inv * &k * &v,
            right: v.transpose() * lt,
            freqs,
        })
    }

    /// Flow of an arbitrary drift, recovering `R = −½ΘA` first.
    pub fn from_drift(a: &DMatrix<f64>) -> Result<Self> {
        let form = SymplecticForm::for_dim(linalg::ensure_square(a, "drift matrix")?)?;
        let r = hamiltonian_from_drift(a, &form)?;
        Self::new(&r, &form)
    }

    pub fn dim(&self) -> usize {
        self.freqs.len()
    }

    /// Oscillation frequencies of the flow (each appears twice).
    pub fn frequencies(&self) -> &DVector<f64> {
        &self.freqs
    }

    fn weights(&self, t: f64) -> (DVector<f64>, DVector<f64>) {
        let cos = self.freqs.map(|b| (b * t).cos());
        let sinc = self.freqs.map(|b| if b > 0.0 { (b * t).sin() / b } else { t });
        (cos, sinc)
    }

    /// `e^{At}`.
    pub fn propagator(&self, t: f64) -> DMatrix<f64> {
        let (cos, sinc) = self.weights(t);
        let mut rc = self.right.clone();
        let mut rs = self.right.clone();
        for (i, (c, s)) in cos.iter().zip(sinc.iter()).enumerate() {
            rc.row_mut(i).scale_mut(*c);
            rs.row_mut(i).scale_mut(*s);
        }
        &self.left_cos * rc + &self.left_sin * rs
    }

    /// `e^{At} x0`.
    pub fn apply(&self, t: f64, x0: &DVector<f64>) -> DVector<f64> {
        let modal = &self.right * x0;
        let (cos, sinc) = self.weights(t);
        &self.left_cos * modal.component_mul(&cos) + &self.left_sin * modal.component_mul(&sinc)
    }

    /// Precomputes the modal coordinates of `x0` for repeated evaluation.
    pub fn modal(&self, x0: &DVector<f64>) -> DVector<f64> {
        &self.right * x0
    }

    pub fn apply_modal(&self, t: f64, modal: &DVector<f64>) -> DVector<f64> {
        let (cos, sinc) = self.weights(t);
        &self.left_cos * modal.component_mul(&cos) + &self.left_sin * modal.component_mul(&sinc)
    }
}
