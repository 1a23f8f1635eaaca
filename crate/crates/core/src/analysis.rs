//! Positivity and convergence certificates for the observer chain.
//!
//! `A_o = 2ΘR_o` where `R_o` has diagonal blocks `ω_iI` and off-diagonal
//! blocks `±μ_{i+1}J`. With `a_i = q_i + ı p_i` the quadratic form becomes
//! `a†R̃_oa` for a Hermitian tridiagonal `R̃_o`, which splits into the rank-one
//! plant term `μ₁ e₁e₁†` and a chain term that is a sum of squares
//! `Σ μ_{k+1} |ı a_k + a_{k+1}|²`. The chain term vanishes only along
//! `(1, −ı, −1, ı, …)`, which the plant term does not annihilate, so
//! `R_o ≻ 0` whenever `μ₁ > 0`.
//!
//! Conservation of `x_eᵀR_ox_e` then bounds `‖e^{2ΘR_ot}‖₂` by
//! `√(λmax/λmin)`, and the closed-form integral gives the `C/T` decay of the
//! time average. This is the only module that uses complex arithmetic.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::flow::{expm, HamiltonianFlow};
use crate::linalg::{self, j2, max_abs, set_block, spectral_norm, symmetrize};
use crate::observer::chain_drift;
use crate::system::SymplecticForm;
use crate::{Error, Result};

/// Relative slack on spectral-bound comparisons.
pub const BOUND_SLACK: f64 = 1e-9;

/// `λmin / λmax` at or below which a matrix counts as singular.
pub const PD_REL_TOL: f64 = 1e-12;

/// Unchecked `R_o` assembly from gains and detunings.
pub fn ro_matrix(mu: &[f64], omega: &[f64]) -> DMatrix<f64> {
    assert_eq!(mu.len(), omega.len(), "mu and omega lengths differ");
    let n = mu.len();
    let j = j2();
    let mut r = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        set_block(&mut r, 2 * i, 2 * i, &(DMatrix::identity(2, 2) * omega[i]));
        if i + 1 < n {
            set_block(&mut r, 2 * i, 2 * i + 2, &(&j * mu[i + 1]));
            set_block(&mut r, 2 * i + 2, 2 * i, &(&j * -mu[i + 1]));
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoMatrix {
    matrix: DMatrix<f64>,
    mu: Vec<f64>,
    omega: Vec<f64>,
}

impl RoMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn form(&self) -> SymplecticForm {
        SymplecticForm::new(self.n()).expect("nonempty chain")
    }
}

/// Builds `R_o` and checks `2ΘR_o` against the chain drift.
///
/// `μ₁` only enters through `ω`, so `μ₁ = 0` is accepted here; the chain
/// gains `μ₂..μ_N` must be positive.
pub fn build_ro(mu: &[f64], omega: &[f64]) -> Result<RoMatrix> {
    if mu.is_empty() || mu.len() != omega.len() {
        return Err(Error::DimensionMismatch(format!(
            "need matching nonempty gain/detuning lists, got {} and {}",
            mu.len(),
            omega.len()
        )));
    }
    if !(mu[0] >= 0.0 && mu[0].is_finite()) {
        return Err(Error::InvalidArgument(format!("mu_1 must be nonnegative, got {}", mu[0])));
    }
    if let Some((i, m)) = mu.iter().enumerate().skip(1).find(|(_, m)| !(**m > 0.0 && m.is_finite())) {
        return Err(Error::InvalidArgument(format!("mu[{}] must be positive, got {m}", i + 1)));
    }
    if omega.iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidArgument("detunings must be finite".into()));
    }
    let matrix = ro_matrix(mu, omega);
    let form = SymplecticForm::new(mu.len())?;
    let a_o = chain_drift(mu, omega);
    let mismatch = max_abs(&(form.matrix() * &matrix * 2.0 - &a_o));
    if mismatch > 1e-13 * max_abs(&a_o).max(1.0) {
        return Err(Error::Numerical(format!("2ΘR_o differs from A_o by {mismatch:.3e}")));
    }
    Ok(RoMatrix { matrix, mu: mu.to_vec(), omega: omega.to_vec() })
}

/// `a_i = q_i + ı p_i`.
pub fn complex_embedding(x: &DVector<f64>) -> DVector<Complex64> {
    assert!(x.len().is_multiple_of(2), "quadrature vector must have even length");
    DVector::from_fn(x.len() / 2, |i, _| Complex64::new(x[2 * i], x[2 * i + 1]))
}

/// `a†Ma`.
pub fn hermitian_form(m: &DMatrix<Complex64>, a: &DVector<Complex64>) -> Complex64 {
    a.dotc(&(m * a))
}

#[derive(Debug, Clone)]
pub struct HermitianReduction {
    pub matrix: DMatrix<Complex64>,
    /// `μ₁` in the top-left corner, zero elsewhere.
    pub plant_part: DMatrix<Complex64>,
    /// `R̃_o − plant_part`.
    pub chain_part: DMatrix<Complex64>,
    pub mu: Vec<f64>,
}

pub fn hermitian_reduce(ro: &RoMatrix) -> HermitianReduction {
    let n = ro.n();
    let i = Complex64::i();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = Complex64::from(ro.omega()[k]);
        if k + 1 < n {
            let mu = ro.mu()[k + 1];
            m[(k, k + 1)] = -i * mu;
            m[(k + 1, k)] = i * mu;
        }
    }
    let mut plant_part = DMatrix::<Complex64>::zeros(n, n);
    plant_part[(0, 0)] = Complex64::from(ro.mu()[0]);
    let chain_part = &m - &plant_part;
    HermitianReduction { matrix: m, plant_part, chain_part, mu: ro.mu().to_vec() }
}

/// `Σ_k μ_{k+1} |ı a_k + a_{k+1}|²`.
pub fn chain_sum_of_squares(mu: &[f64], a: &DVector<Complex64>) -> f64 {
    (0..a.len().saturating_sub(1))
        .map(|k| mu[k + 1] * (Complex64::i() * a[k] + a[k + 1]).norm_sqr())
        .sum()
}

/// `v = (1, −ı, −1, ı, …, (−ı)^{N−1})`.
pub fn chain_null_vector(n: usize) -> DVector<Complex64> {
    let step = -Complex64::i();
    let mut v = DVector::from_element(n, Complex64::from(1.0));
    for k in 1..n {
        v[k] = v[k - 1] * step;
    }
    v
}

/// Real embedding of `span_ℂ{v}`: the columns are the quadrature vectors of
/// `v` and `ıv`.
pub fn chain_null_direction_real(n: usize) -> DMatrix<f64> {
    let v = chain_null_vector(n);
    let mut out = DMatrix::zeros(2 * n, 2);
    for k in 0..n {
        let iv = Complex64::i() * v[k];
        out[(2 * k, 0)] = v[k].re;
        out[(2 * k + 1, 0)] = v[k].im;
        out[(2 * k, 1)] = iv.re;
        out[(2 * k + 1, 1)] = iv.im;
    }
    out
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PositivityCheck {
    pub is_pd: bool,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Positive definiteness by Cholesky, with the spectrum edges from a
/// symmetric eigendecomposition. Numerically singular matrices
/// (`λmin ≤ PD_REL_TOL·λmax`) are reported as not definite.
pub fn check_positive_definite(r: &DMatrix<f64>) -> PositivityCheck {
    let ev = linalg::sym_eigenvalues(r);
    let lambda_min = ev.first().copied().unwrap_or(f64::NAN);
    let lambda_max = ev.last().copied().unwrap_or(f64::NAN);
    let is_pd = lambda_min > PD_REL_TOL * lambda_max.abs() && Cholesky::new(symmetrize(r)).is_some();
    PositivityCheck { is_pd, lambda_min, lambda_max }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    /// `max |R̃_{o2} − Σ μ_{k+1} w_k w_k†|`, `w_k = −ı e_k + e_{k+1}`.
    pub sum_of_squares_residual: f64,
    pub plant_part_rank: usize,
    pub chain_part_min_eigenvalue: f64,
    /// `‖R̃_{o2} v‖`.
    pub null_residual: f64,
    /// `v†R̃_{o1}v`, equal to `μ₁`.
    pub plant_quadratic: f64,
}

/// Checks each step of the positivity argument numerically.
pub fn lemma_split(red: &HermitianReduction) -> Result<LemmaReport> {
    let n = red.mu.len();
    let scale = red.mu.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale;

    let p = &red.plant_part;
    let plant_ok = p[(0, 0)].im == 0.0
        && p[(0, 0)].re >= 0.0
        && p.iter().enumerate().all(|(idx, z)| idx == 0 || *z == Complex64::from(0.0));
    if !plant_ok {
        return Err(Error::LemmaViolation("plant part is not μ₁ e₁e₁†".into()));
    }
    let plant_part_rank = usize::from(p[(0, 0)].re > 0.0);

    let mut sos = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n.saturating_sub(1) {
        let mut w = DVector::<Complex64>::zeros(n);
        w[k] = -Complex64::i();
        w[k + 1] = Complex64::from(1.0);
        sos += &w * w.adjoint() * Complex64::from(red.mu[k + 1]);
    }
    let sum_of_squares_residual = (&red.chain_part - sos).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if sum_of_squares_residual > tol {
        return Err(Error::LemmaViolation(format!(
            "chain part is not the sum of squares Σμ|ıa_k + a_(k+1)|² (residual {sum_of_squares_residual:.3e})"
        )));
    }

    let chain_part_min_eigenvalue = SymmetricEigen::new(red.chain_part.clone())
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, v| m.min(*v));
    if chain_part_min_eigenvalue < -tol {
        return Err(Error::LemmaViolation(format!(
            "chain part has negative eigenvalue {chain_part_min_eigenvalue:.3e}"
        )));
    }

    let v = chain_null_vector(n);
    let null_residual = (&red.chain_part * &v).norm();
    if null_residual > tol * (n as f64).sqrt() {
        return Err(Error::LemmaViolation(format!(
            "(1, −ı, −1, ı, …) is not in the chain null space (residual {null_residual:.3e})"
        )));
    }
    let plant_quadratic = hermitian_form(&red.plant_part, &v).re;
    if !(plant_quadratic > 0.0) {
        return Err(Error::LemmaViolation(
            "plant part annihilates the chain null vector (μ₁ = 0)".into(),
        ));
    }

    Ok(LemmaReport {
        sum_of_squares_residual,
        plant_part_rank,
        chain_part_min_eigenvalue,
        null_residual,
        plant_quadratic,
    })
}

fn check_form_dim(r: &DMatrix<f64>, form: &SymplecticForm) -> Result<()> {
    let n = linalg::ensure_square(r, "Hamiltonian matrix")?;
    if n != form.dim() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {n}×{n}, form is {}×{}",
            form.dim(),
            form.dim()
        )));
    }
    Ok(())
}

fn require_pd(r: &DMatrix<f64>) -> Result<PositivityCheck> {
    let pd = check_positive_definite(r);
    if !pd.is_pd {
        return Err(Error::InvalidArgument(format!(
            "matrix is not positive definite (λmin = {:.3e})",
            pd.lambda_min
        )));
    }
    Ok(pd)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpBoundSample {
    pub t: f64,
    pub norm: f64,
    /// `max |e^{Aᵀt}Re^{At} − R| / max |R|`.
    pub conservation_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpBoundReport {
    pub bound: f64,
    pub samples: Vec<ExpBoundSample>,
    pub max_ratio: f64,
    pub max_conservation_residual: f64,
    pub passed: bool,
}

/// Checks `‖e^{2ΘRt}‖₂ ≤ √(λmax/λmin)` and conservation of `xᵀRx` at each
/// time. Uses the Padé exponential, independent of [`HamiltonianFlow`].
pub fn exp_norm_bound(r: &DMatrix<f64>, form: &SymplecticForm, times: &[f64]) -> Result<ExpBoundReport> {
    check_form_dim(r, form)?;
    let pd = require_pd(r)?;
    let bound = (pd.lambda_max / pd.lambda_min).sqrt();
    let a = form.matrix() * r * 2.0;
    let r_scale = max_abs(r);
    let samples: Vec<ExpBoundSample> = times
        .iter()
        .map(|&t| {
            let phi = expm(&(&a * t));
            let conserved = phi.transpose() * r * &phi;
            ExpBoundSample {
                t,
                norm: spectral_norm(&phi),
                conservation_residual: max_abs(&(conserved - r)) / r_scale,
            }
        })
        .collect();
    let max_ratio = samples.iter().fold(0.0_f64, |m, s| m.max(s.norm / bound));
    let max_conservation_residual = samples.iter().fold(0.0_f64, |m, s| m.max(s.conservation_residual));
    let passed = samples.iter().all(|s| s.norm <= bound * (1.0 + BOUND_SLACK));
    Ok(ExpBoundReport { bound, samples, max_ratio, max_conservation_residual, passed })
}

/// `∫₀ᵀ e^{2ΘRt} dt = ½ e^{2ΘRT} R⁻¹Θ⁻¹ − ½ R⁻¹Θ⁻¹`.
pub fn time_average_integral(r: &DMatrix<f64>, form: &SymplecticForm, horizon: f64) -> Result<DMatrix<f64>> {
    check_form_dim(r, form)?;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be nonnegative, got {horizon}")));
    }
    let r_inv_theta_inv = r_inv_theta_inv(r, form)?;
    let flow = HamiltonianFlow::new(r, form)?;
    let n = r.nrows();
    Ok((flow.propagator(horizon) - DMatrix::identity(n, n)) * r_inv_theta_inv * 0.5)
}

fn r_inv_theta_inv(r: &DMatrix<f64>, form: &SymplecticForm) -> Result<DMatrix<f64>> {
    let chol = Cholesky::new(symmetrize(r))
        .ok_or_else(|| Error::InvalidArgument("matrix is singular or indefinite".into()))?;
    Ok(chol.inverse() * form.inverse())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvergenceCertificate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `√(λmax/λmin)`.
    pub exp_bound: f64,
    /// `C` with `‖(1/T)∫₀ᵀe^{2ΘRt}dt‖₂ ≤ C/T`.
    pub avg_constant: f64,
}

impl ConvergenceCertificate {
    pub fn envelope(&self, horizon: f64) -> f64 {
        self.avg_constant / horizon
    }
}

pub fn convergence_certificate(r: &DMatrix<f64>, form: &SymplecticForm) -> Result<ConvergenceCertificate> {
    check_form_dim(r, form)?;
    let pd = require_pd(r)?;
    let exp_bound = (pd.lambda_max / pd.lambda_min).sqrt();
    let avg_constant = 0.5 * (exp_bound + 1.0) * spectral_norm(&r_inv_theta_inv(r, form)?);
    Ok(ConvergenceCertificate {
        lambda_min: pd.lambda_min,
        lambda_max: pd.lambda_max,
        exp_bound,
        avg_constant,
    })
}
