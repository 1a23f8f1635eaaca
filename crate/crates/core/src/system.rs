//! Closed linear quantum systems `ẋ = Ax` with `A = 2ΘR`.
//!
//! Quadratures are interleaved, `(q₁, p₁, q₂, p₂, …)`, so the symplectic
//! form is block diagonal with 2×2 blocks `J = [[0, 1], [−1, 0]]`.
//! Commutation preservation is checked at the matrix level:
//! `e^{At} Θ e^{Aᵀt} = Θ` for all `t ≥ 0`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::flow::expm;
use crate::linalg::{self, max_abs, max_asymmetry};
use crate::{Error, Result};

/// Default absolute tolerance for symmetry / realizability checks.
pub const REALIZABILITY_TOL: f64 = 1e-10;

/// Tolerance for accepting a Hamiltonian matrix as symmetric.
pub const HAMILTONIAN_SYMMETRY_TOL: f64 = 1e-12;

/// `Θ = diag(J, …, J)` for `n_modes` oscillator modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n_modes: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument(
                "symplectic form needs at least one mode".into(),
            ));
        }
        let dim = 2 * n_modes;
        let mut matrix = DMatrix::zeros(dim, dim);
        for k in 0..n_modes {
            matrix[(2 * k, 2 * k + 1)] = 1.0;
            matrix[(2 * k + 1, 2 * k)] = -1.0;
        }
        Ok(Self { n_modes, matrix })
    }

    /// Form matching a state dimension; the dimension must be even and positive.
    pub fn for_dim(dim: usize) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "state dimension must be even and positive, got {dim}"
            )));
        }
        Self::new(dim / 2)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `Θ⁻¹ = −Θ`, exact since `Θ² = −I`.
    pub fn inverse(&self) -> DMatrix<f64> {
        -&self.matrix
    }
}

pub fn build_symplectic(n_modes: usize) -> Result<SymplecticForm> {
    SymplecticForm::new(n_modes)
}

fn check_dim(m: &DMatrix<f64>, form: &SymplecticForm, what: &str) -> Result<()> {
    let n = linalg::ensure_square(m, what)?;
    if n != form.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {n}×{n} but the symplectic form is {}×{}",
            form.dim(),
            form.dim()
        )));
    }
    linalg::ensure_finite(m, what)
}

/// `A = 2ΘR`. `R` must be symmetric to 1e−12.
pub fn drift_from_hamiltonian(r: &DMatrix<f64>, form: &SymplecticForm) -> Result<DMatrix<f64>> {
    check_dim(r, form, "Hamiltonian matrix")?;
    let (asymmetry, row, col) = max_asymmetry(r);
    if asymmetry > HAMILTONIAN_SYMMETRY_TOL {
        return Err(Error::RealizabilityViolation { row, col, asymmetry });
    }
    Ok(form.matrix() * r * 2.0)
}

/// Recovers `R = −½ΘA`, failing unless the result is symmetric to
/// [`REALIZABILITY_TOL`].
pub fn hamiltonian_from_drift(a: &DMatrix<f64>, form: &SymplecticForm) -> Result<DMatrix<f64>> {
    hamiltonian_from_drift_tol(a, form, REALIZABILITY_TOL)
}

pub fn hamiltonian_from_drift_tol(
    a: &DMatrix<f64>,
    form: &SymplecticForm,
    tol: f64,
) -> Result<DMatrix<f64>> {
    check_dim(a, form, "drift matrix")?;
    let r = form.matrix() * a * -0.5;
    let asymmetry = max_abs(&(&r - r.transpose()));
    if asymmetry > tol {
        return Err(Error::NotRealizable { asymmetry, tolerance: tol });
    }
    Ok(linalg::symmetrize(&r))
}

/// A closed system `ẋ = Ax`, optionally carrying its Hamiltonian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSystem {
    drift: DMatrix<f64>,
    form: SymplecticForm,
    hamiltonian: Option<DMatrix<f64>>,
}

impl ClosedSystem {
    /// Builds `A = 2ΘR` from a symmetric `R`.
    pub fn from_hamiltonian(r: DMatrix<f64>) -> Result<Self> {
        let form = SymplecticForm::for_dim(linalg::ensure_square(&r, "Hamiltonian matrix")?)?;
        let drift = drift_from_hamiltonian(&r, &form)?;
        Ok(Self { drift, form, hamiltonian: Some(r) })
    }

    /// Wraps an arbitrary drift. No Hamiltonian is attached; see
    /// [`ClosedSystem::with_recovered_hamiltonian`].
    pub fn from_drift(a: DMatrix<f64>) -> Result<Self> {
        let form = SymplecticForm::for_dim(linalg::ensure_square(&a, "drift matrix")?)?;
        linalg::ensure_finite(&a, "drift matrix")?;
        Ok(Self { drift: a, form, hamiltonian: None })
    }

    /// Attaches `R = −½ΘA`, failing if the drift is not realizable.
    pub fn with_recovered_hamiltonian(mut self) -> Result<Self> {
        self.hamiltonian = Some(hamiltonian_from_drift(&self.drift, &self.form)?);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.drift.nrows()
    }

    pub fn drift(&self) -> &DMatrix<f64> {
        &self.drift
    }

    pub fn form(&self) -> &SymplecticForm {
        &self.form
    }

    pub fn hamiltonian(&self) -> Option<&DMatrix<f64>> {
        self.hamiltonian.as_ref()
    }
}

/// Mean values of the quadrature operators.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureState(pub DVector<f64>);

impl QuadratureState {
    pub fn new(values: Vec<f64>) -> Self {
        Self(DVector::from_vec(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutationSample {
    pub t: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutationReport {
    pub samples: Vec<CommutationSample>,
    pub tolerance: f64,
    pub max_residual: f64,
    pub passed: bool,
}

/// Max-norm residual `‖e^{At}Θe^{Aᵀt} − Θ‖` at each requested time.
pub fn commutation_residual(a: &DMatrix<f64>, form: &SymplecticForm, t: f64) -> f64 {
    propagator_commutation_residual(&expm(&(a * t)), form)
}

/// `‖ΦΘΦᵀ − Θ‖` in the max norm for a given propagator `Φ`.
pub fn propagator_commutation_residual(phi: &DMatrix<f64>, form: &SymplecticForm) -> f64 {
    let evolved = phi * form.matrix() * phi.transpose();
    max_abs(&(evolved - form.matrix()))
}

pub fn check_commutation_preservation(
    system: &ClosedSystem,
    times: &[f64],
    tol: f64,
) -> CommutationReport {
    let samples: Vec<CommutationSample> = times
        .iter()
        .map(|&t| CommutationSample {
            t,
            residual: commutation_residual(system.drift(), system.form(), t),
        })
        .collect();
    let max_residual = samples.iter().fold(0.0_f64, |m, s| m.max(s.residual));
    let passed = samples.iter().all(|s| s.residual < tol);
    CommutationReport { samples, tolerance: tol, max_residual, passed }
}

/// `½ xᵀRx`.
pub fn hamiltonian_energy(system: &ClosedSystem, state: &QuadratureState) -> Result<f64> {
    let r = system
        .hamiltonian()
        .ok_or_else(|| Error::InvalidState("system carries no Hamiltonian".into()))?;
    if state.len() != system.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has length {} but the system has dimension {}",
            state.len(),
            system.dim()
        )));
    }
    Ok(0.5 * state.values().dot(&(r * state.values())))
}
