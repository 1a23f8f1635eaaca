//! Closed-form realization of the distributed observer.
//!
//! The plant is a single oscillator with `A_p = 0` and output `z_p = αᵀx_p`.
//! It couples directly to observer element 1 through `H_c = x_pᵀ R_c x_{o1}`
//! with `R_c = αβᵀ`, `β = −μ₁α`. Elements `i` and `i+1` interact with gain
//! `μ_{i+1}` via optical links, and element `i` reads out the quadrature
//! `αᵀ(−J)^{i−1} x_{oi} / ‖α‖²`, a quarter-turn further along the chain at
//! every step.

use nalgebra::{DMatrix, DVector, Vector2};
use serde::Serialize;

use crate::analysis::ro_matrix;
use crate::flow::HamiltonianFlow;
use crate::linalg::{j2, mat_pow, max_abs, set_block, to_rows};
use crate::system::{ClosedSystem, SymplecticForm};
use crate::{Error, Result};

/// Absolute tolerance on `A_o x̄_o + B_o z_p` for unit-scale instances.
pub const STEADY_TOL: f64 = 1e-12;

/// Tolerance on `C_o x̄_o / z_p = 1`.
pub const READOUT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantSpec {
    alpha: Vector2<f64>,
}

impl PlantSpec {
    pub fn new(alpha: [f64; 2]) -> Result<Self> {
        let alpha = Vector2::from(alpha);
        if !alpha.iter().all(|v| v.is_finite()) || alpha.norm() == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "plant coupling direction must be finite and nonzero, got {alpha:?}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> Vector2<f64> {
        self.alpha
    }

    /// `C_p = αᵀ` as a 1×2 row.
    pub fn c_p(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(1, 2, self.alpha.as_slice())
    }

    pub fn output(&self, x_p: &[f64; 2]) -> f64 {
        self.alpha[0] * x_p[0] + self.alpha[1] * x_p[1]
    }
}

/// Chain parameters in cavity form: `μ₁` plus the decay rates
/// `κ_{1b}, κ_{2a}, κ_{2b}, …, κ_{(N−1)a}, κ_{(N−1)b}, κ_{Na}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    mu_1: f64,
    kappas: Vec<f64>,
}

impl ChainParams {
    pub fn new(mu_1: f64, kappas: Vec<f64>) -> Result<Self> {
        if !(mu_1 > 0.0 && mu_1.is_finite()) {
            return Err(Error::InvalidArgument(format!("mu_1 must be positive, got {mu_1}")));
        }
        if !kappas.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "kappa list must have even length 2(N−1), got {}",
                kappas.len()
            )));
        }
        if let Some((i, k)) = kappas.iter().enumerate().find(|(_, k)| !(**k > 0.0 && k.is_finite())) {
            return Err(Error::InvalidArgument(format!("kappa[{i}] must be positive, got {k}")));
        }
        Ok(Self { mu_1, kappas })
    }

    pub fn n(&self) -> usize {
        self.kappas.len() / 2 + 1
    }

    pub fn mu_1(&self) -> f64 {
        self.mu_1
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    /// `κ_{ia}` for `i ∈ 2..=N` (1-based element numbering).
    pub fn kappa_a(&self, i: usize) -> f64 {
        assert!(i >= 2 && i <= self.n(), "κ_a defined for elements 2..=N");
        self.kappas[2 * i - 3]
    }

    /// `κ_{ib}` for `i ∈ 1..N`.
    pub fn kappa_b(&self, i: usize) -> f64 {
        assert!(i >= 1 && i < self.n(), "κ_b defined for elements 1..N");
        self.kappas[2 * i - 2]
    }
}

/// `μ_i = ¼√(κ_{(i−1)b} κ_{ia})` for `i ≥ 2`; `μ₁` is copied.
pub fn gains_from_kappas(params: &ChainParams) -> Vec<f64> {
    let mut mu = vec![params.mu_1()];
    mu.extend((2..=params.n()).map(|i| 0.25 * (params.kappa_b(i - 1) * params.kappa_a(i)).sqrt()));
    mu
}

/// How `κ_{(i−1)b}` and `κ_{ia}` share a prescribed gain `μ_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaSplit {
    /// `κ_{(i−1)b} = κ_{ia} = 4μ_i`.
    Balanced,
    /// `κ_{(i−1)b} = 4μ_i·r`, `κ_{ia} = 4μ_i/r`.
    Ratio(f64),
}

/// Inverse design: decay rates that realise the gains `μ`.
pub fn kappas_from_gains(mu: &[f64], split: KappaSplit) -> Result<ChainParams> {
    check_gains(mu)?;
    let r = match split {
        KappaSplit::Balanced => 1.0,
        KappaSplit::Ratio(r) if r > 0.0 && r.is_finite() => r,
        KappaSplit::Ratio(r) => {
            return Err(Error::InvalidArgument(format!("kappa split ratio must be positive, got {r}")))
        }
    };
    let kappas = mu[1..].iter().flat_map(|m| [4.0 * m * r, 4.0 * m / r]).collect();
    ChainParams::new(mu[0], kappas)
}

/// `ω_i = μ_i + μ_{i+1}` for `i < N`, `ω_N = μ_N`.
pub fn detunings_from_gains(mu: &[f64]) -> Vec<f64> {
    (0..mu.len()).map(|i| mu[i] + mu.get(i + 1).copied().unwrap_or(0.0)).collect()
}

fn check_gains(mu: &[f64]) -> Result<()> {
    if mu.is_empty() {
        return Err(Error::InvalidArgument("gain list is empty".into()));
    }
    if let Some((i, m)) = mu.iter().enumerate().find(|(_, m)| !(**m > 0.0 && m.is_finite())) {
        return Err(Error::InvalidArgument(format!("mu[{}] must be positive, got {m}", i + 1)));
    }
    Ok(())
}

/// Block-tridiagonal chain drift: diagonal `2ω_iJ`, super-diagonal
/// `−2μ_{i+1}I`, sub-diagonal `+2μ_{i+1}I`.
pub fn chain_drift(mu: &[f64], omega: &[f64]) -> DMatrix<f64> {
    assert_eq!(mu.len(), omega.len(), "mu and omega lengths differ");
    let n = mu.len();
    let j = j2();
    let eye = DMatrix::<f64>::identity(2, 2);
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        set_block(&mut a, 2 * i, 2 * i, &(&j * (2.0 * omega[i])));
        if i + 1 < n {
            set_block(&mut a, 2 * i, 2 * i + 2, &(&eye * (-2.0 * mu[i + 1])));
            set_block(&mut a, 2 * i + 2, 2 * i, &(&eye * (2.0 * mu[i + 1])));
        }
    }
    a
}

/// Block rows `J^{i−1}`, so that `x̄_o = pattern · α · z_p`.
pub fn steady_pattern(n: usize) -> DMatrix<f64> {
    let j = j2();
    let mut p = DMatrix::zeros(2 * n, 2);
    for i in 0..n {
        set_block(&mut p, 2 * i, 0, &mat_pow(&j, i % 4));
    }
    p
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObserverRealization {
    pub alpha: Vector2<f64>,
    pub beta: Vector2<f64>,
    pub mu: Vec<f64>,
    pub omega: Vec<f64>,
    pub a_o: DMatrix<f64>,
    /// Column acting on the scalar `z_p`; the `x_p` form is `b_o · αᵀ`.
    pub b_o: DVector<f64>,
    pub c_o: DMatrix<f64>,
    pub r_c: DMatrix<f64>,
    pub pattern: DMatrix<f64>,
    /// True when `ω` was supplied rather than derived from `μ`.
    pub omega_overridden: bool,
}

impl ObserverRealization {
    pub fn n(&self) -> usize {
        self.mu.len()
    }

    /// `B_o` in the form acting on `x_p` (2N×2).
    pub fn b_o_plant(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.b_o.len(), 2, |r, c| self.b_o[r] * self.alpha[c])
    }
}

pub fn build_observer(plant: &PlantSpec, mu: &[f64]) -> Result<ObserverRealization> {
    check_gains(mu)?;
    let omega = detunings_from_gains(mu);
    let mut real = build_observer_with_detunings(plant, mu, &omega)?;
    real.omega_overridden = false;
    Ok(real)
}

/// Builds the realization with caller-supplied detunings. Detunings that do
/// not follow [`detunings_from_gains`] give a non-physical observer whose
/// steady vector is no longer stationary; this exists to exhibit that.
pub fn build_observer_with_detunings(
    plant: &PlantSpec,
    mu: &[f64],
    omega: &[f64],
) -> Result<ObserverRealization> {
    check_gains(mu)?;
    if omega.len() != mu.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} detunings supplied for {} elements",
            omega.len(),
            mu.len()
        )));
    }
    if omega.iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidArgument("detunings must be finite".into()));
    }
    let n = mu.len();
    let alpha = plant.alpha();
    let beta = alpha * -mu[0];
    let j = j2();
    let jm = j.fixed_view::<2, 2>(0, 0).clone_owned();

    let mut b_o = DVector::zeros(2 * n);
    b_o.rows_mut(0, 2).copy_from(&(jm * beta * 2.0));

    let norm_sq = alpha.norm_squared();
    let minus_j = -&j;
    let alpha_row = DMatrix::from_row_slice(1, 2, alpha.as_slice());
    let mut c_o = DMatrix::zeros(n, 2 * n);
    for i in 0..n {
        let row = &alpha_row * mat_pow(&minus_j, i % 4) / norm_sq;
        set_block(&mut c_o, i, 2 * i, &row);
    }

    let r_c = DMatrix::from_fn(2, 2, |r, c| alpha[r] * beta[c]);

    Ok(ObserverRealization {
        alpha,
        beta,
        mu: mu.to_vec(),
        omega: omega.to_vec(),
        a_o: chain_drift(mu, omega),
        b_o,
        c_o,
        r_c,
        pattern: steady_pattern(n),
        omega_overridden: true,
    })
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub x_bar: DVector<f64>,
    pub residual: f64,
    pub tolerance: f64,
}

fn steady_tolerance(real: &ObserverRealization, z_p: f64) -> f64 {
    let scale = z_p.abs() * real.alpha.norm() * max_abs(&real.a_o).max(1.0);
    STEADY_TOL * scale.max(1.0)
}

/// `x̄_o = pattern·α·z_p` and `‖A_o x̄_o + B_o z_p‖₂`, without judging it.
pub fn steady_residual(real: &ObserverRealization, z_p: f64) -> SteadyState {
    let x_bar = &real.pattern * real.alpha * z_p;
    let residual = (&real.a_o * &x_bar + &real.b_o * z_p).norm();
    SteadyState { x_bar, residual, tolerance: steady_tolerance(real, z_p) }
}

/// The steady observer configuration; errors if it is not stationary.
pub fn steady_vector(real: &ObserverRealization, z_p: f64) -> Result<SteadyState> {
    let st = steady_residual(real, z_p);
    if !(st.residual <= st.tolerance) {
        return Err(Error::ConstructionInconsistency { residual: st.residual, tolerance: st.tolerance });
    }
    Ok(st)
}

/// `C_o x̄_o / z_p`, which must be the all-ones vector.
pub fn consensus_readout(real: &ObserverRealization) -> Result<DVector<f64>> {
    let readout = &real.c_o * (&real.pattern * real.alpha);
    let deviation = readout.iter().fold(0.0_f64, |m, v| m.max((v - 1.0).abs()));
    if !(deviation <= READOUT_TOL) {
        return Err(Error::ReadoutOrientation { deviation });
    }
    Ok(readout)
}

/// Plant plus observer as one closed system over `(x_p, x_{o1}, …, x_{oN})`.
#[derive(Debug, Clone)]
pub struct AugmentedSystem {
    pub a_a: DMatrix<f64>,
    pub form: SymplecticForm,
    pub c_p_row: DMatrix<f64>,
    pub c_o_block: DMatrix<f64>,
    pub r_a: DMatrix<f64>,
}

impl AugmentedSystem {
    pub fn dim(&self) -> usize {
        self.a_a.nrows()
    }

    pub fn n_observers(&self) -> usize {
        self.c_o_block.nrows()
    }

    pub fn closed_system(&self) -> Result<ClosedSystem> {
        ClosedSystem::from_hamiltonian(self.r_a.clone())
    }

    pub fn flow(&self) -> Result<AugmentedFlow> {
        AugmentedFlow::new(self)
    }
}

/// Exact propagator of the augmented system.
///
/// `A_a` is not diagonalizable: `z_p` is conserved and its conjugate
/// quadrature grows linearly. With `ẋ_p = P x_o`, `ẋ_o = A_o x_o + Q x_p`
/// and `QP = 0`, the input `Q x_p` is constant and
///
/// ```text
/// e^{A_a t} = [ I + P G Q   P F ]     F = A_o⁻¹(e^{A_o t} − I)
///             [ F Q         E   ]     G = A_o⁻¹(F − t I)
/// ```
///
/// with `E = e^{A_o t}` from the observer's spectral flow.
#[derive(Debug, Clone)]
pub struct AugmentedFlow {
    observer: HamiltonianFlow,
    a_o_inv: DMatrix<f64>,
    p: DMatrix<f64>,
    q: DMatrix<f64>,
}

impl AugmentedFlow {
    pub fn new(aug: &AugmentedSystem) -> Result<Self> {
        let dim = aug.dim();
        let m = dim - 2;
        let a = &aug.a_a;
        let scale = max_abs(a).max(1.0);
        if max_abs(&a.view((0, 0), (2, 2)).into_owned()) > 0.0 {
            return Err(Error::InvalidArgument("plant block of the augmented drift is not zero".into()));
        }
        let p = a.view((0, 2), (2, m)).into_owned();
        let q = a.view((2, 0), (m, 2)).into_owned();
        let a_o = a.view((2, 2), (m, m)).into_owned();
        let qp = max_abs(&(&q * &p));
        if qp > 1e-12 * scale * scale {
            return Err(Error::InvalidArgument(format!("plant drive is not conserved, |QP| = {qp:.3e}")));
        }
        let r_o = aug.r_a.view((2, 2), (m, m)).into_owned();
        let observer = HamiltonianFlow::new(&r_o, &SymplecticForm::new(m / 2)?)?;
        let a_o_inv = a_o
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("observer drift is singular".into()))?;
        Ok(Self { observer, a_o_inv, p, q })
    }

    /// `e^{A_a t}`.
    pub fn propagator(&self, t: f64) -> DMatrix<f64> {
        let m = self.a_o_inv.nrows();
        let e = self.observer.propagator(t);
        let eye = DMatrix::<f64>::identity(m, m);
        let f = &self.a_o_inv * (&e - &eye);
        let g = &self.a_o_inv * (&f - &eye * t);
        let mut phi = DMatrix::zeros(m + 2, m + 2);
        set_block(&mut phi, 0, 0, &(DMatrix::identity(2, 2) + &self.p * &g * &self.q));
        set_block(&mut phi, 0, 2, &(&self.p * &f));
        set_block(&mut phi, 2, 0, &(&f * &self.q));
        set_block(&mut phi, 2, 2, &e);
        phi
    }
}

pub fn assemble_augmented(real: &ObserverRealization) -> Result<AugmentedSystem> {
    let n = real.n();
    let dim = 2 + 2 * n;
    let j = j2();

    let mut a_a = DMatrix::zeros(dim, dim);
    set_block(&mut a_a, 0, 2, &(&j * &real.r_c * 2.0));
    set_block(&mut a_a, 2, 0, &(&j * real.r_c.transpose() * 2.0));
    set_block(&mut a_a, 2, 2, &real.a_o);

    let mut r_a = DMatrix::zeros(dim, dim);
    set_block(&mut r_a, 0, 2, &real.r_c);
    set_block(&mut r_a, 2, 0, &real.r_c.transpose());
    set_block(&mut r_a, 2, 2, &ro_matrix(&real.mu, &real.omega));

    let form = SymplecticForm::new(n + 1)?;
    let mismatch = max_abs(&(form.matrix() * &r_a * 2.0 - &a_a));
    if mismatch > 1e-12 * max_abs(&a_a).max(1.0) {
        return Err(Error::Numerical(format!(
            "augmented drift differs from 2Θ_aR_a by {mismatch:.3e}"
        )));
    }

    let mut c_p_row = DMatrix::zeros(1, dim);
    c_p_row[(0, 0)] = real.alpha[0];
    c_p_row[(0, 1)] = real.alpha[1];
    let mut c_o_block = DMatrix::zeros(n, dim);
    set_block(&mut c_o_block, 0, 2, &real.c_o);

    Ok(AugmentedSystem { a_a, form, c_p_row, c_o_block, r_a })
}

/// Serializable view of a realization (matrices as row-major nested arrays).
#[derive(Debug, Clone, Serialize)]
pub struct RealizationRecord {
    pub n: usize,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub mu: Vec<f64>,
    pub omega: Vec<f64>,
    pub omega_overridden: bool,
    pub a_o: Vec<Vec<f64>>,
    pub b_o: Vec<f64>,
    pub c_o: Vec<Vec<f64>>,
    pub r_c: Vec<Vec<f64>>,
}

impl From<&ObserverRealization> for RealizationRecord {
    fn from(r: &ObserverRealization) -> Self {
        Self {
            n: r.n(),
            alpha: [r.alpha[0], r.alpha[1]],
            beta: [r.beta[0], r.beta[1]],
            mu: r.mu.clone(),
            omega: r.omega.clone(),
            omega_overridden: r.omega_overridden,
            a_o: to_rows(&r.a_o),
            b_o: r.b_o.iter().copied().collect(),
            c_o: to_rows(&r.c_o),
            r_c: to_rows(&r.r_c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plant(a: [f64; 2]) -> PlantSpec {
        PlantSpec::new(a).unwrap()
    }

    #[test]
    fn gains_from_equal_kappas() {
        let p = ChainParams::new(1.0, vec![4.0, 4.0]).unwrap();
        assert_eq!(gains_from_kappas(&p), vec![1.0, 1.0]);
        let p = ChainParams::new(1.0, vec![16.0, 1.0]).unwrap();
        assert_eq!(gains_from_kappas(&p), vec![1.0, 1.0]);
        let p = ChainParams::new(2.5, vec![]).unwrap();
        assert_eq!(gains_from_kappas(&p), vec![2.5]);
    }

    #[test]
    fn kappa_indexing_follows_element_numbering() {
        let p = ChainParams::new(1.0, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(p.n(), 3);
        assert_eq!(p.kappa_b(1), 1.0);
        assert_eq!(p.kappa_a(2), 2.0);
        assert_eq!(p.kappa_b(2), 3.0);
        assert_eq!(p.kappa_a(3), 4.0);
    }

    #[test]
    fn chain_params_validation() {
        assert!(ChainParams::new(0.0, vec![]).is_err());
        assert!(ChainParams::new(1.0, vec![1.0]).is_err());
        assert!(ChainParams::new(1.0, vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn balanced_inverse_design() {
        let p = kappas_from_gains(&[1.0, 1.0], KappaSplit::Balanced).unwrap();
        assert_eq!(p.kappas(), &[4.0, 4.0]);
        let p = kappas_from_gains(&[1.0, 0.25], KappaSplit::Balanced).unwrap();
        assert_eq!(p.kappas(), &[1.0, 1.0]);
        assert!(kappas_from_gains(&[1.0, 0.0], KappaSplit::Balanced).is_err());
        assert!(kappas_from_gains(&[1.0, 1.0], KappaSplit::Ratio(-2.0)).is_err());
    }

    #[test]
    fn inverse_design_round_trips() {
        let mu = [0.7, 1.3, 0.2, 5.0];
        for split in [KappaSplit::Balanced, KappaSplit::Ratio(3.0), KappaSplit::Ratio(0.1)] {
            let back = gains_from_kappas(&kappas_from_gains(&mu, split).unwrap());
            for (a, b) in back.iter().zip(&mu) {
                assert!((a - b).abs() < 1e-14, "{split:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn detuning_rules() {
        assert_eq!(detunings_from_gains(&[1.0, 1.0, 1.0]), vec![2.0, 2.0, 1.0]);
        assert_eq!(detunings_from_gains(&[2.0, 1.0]), vec![3.0, 1.0]);
        assert_eq!(detunings_from_gains(&[5.0]), vec![5.0]);
    }

    #[test]
    fn single_element_detuning_is_stationary() {
        let real = build_observer(&plant([0.6, -0.8]), &[5.0]).unwrap();
        assert!(steady_residual(&real, 1.7).residual < 1e-12);
    }

    #[test]
    fn two_element_realization_by_hand() {
        let real = build_observer(&plant([1.0, 0.0]), &[1.0, 1.0]).unwrap();
        // 2·[[2J, −I], [I, J]]
        #[rustfmt::skip]
        let a_o = DMatrix::from_row_slice(4, 4, &[
             0.0,  4.0, -2.0,  0.0,
            -4.0,  0.0,  0.0, -2.0,
             2.0,  0.0,  0.0,  2.0,
             0.0,  2.0, -2.0,  0.0,
        ]);
        assert_eq!(real.a_o, a_o);
        assert_eq!(real.b_o, DVector::from_vec(vec![0.0, 2.0, 0.0, 0.0]));
        #[rustfmt::skip]
        let c_o = DMatrix::from_row_slice(2, 4, &[
            1.0, 0.0, 0.0,  0.0,
            0.0, 0.0, 0.0, -1.0,
        ]);
        assert_eq!(real.c_o, c_o);
        assert_eq!(real.omega, vec![2.0, 1.0]);
        assert_eq!(real.beta, Vector2::new(-1.0, 0.0));
    }

    #[test]
    fn coupling_hamiltonian_spectrum() {
        let alpha = [3.0, -4.0];
        let real = build_observer(&plant(alpha), &[0.5, 2.0, 1.0]).unwrap();
        let ev = crate::linalg::sym_eigenvalues(&real.r_c);
        assert!((ev[0] + 0.5 * 25.0).abs() < 1e-12);
        assert!(ev[1].abs() < 1e-12);
        assert_eq!(real.r_c, real.r_c.transpose());
    }

    #[test]
    fn readout_rows_have_unit_norm_for_unit_alpha() {
        let real = build_observer(&plant([0.0, 1.0]), &[1.0, 2.0, 3.0, 4.0]).unwrap();
        for i in 0..4 {
            assert!((real.c_o.row(i).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn readout_rows_scale_with_inverse_alpha_norm() {
        let real = build_observer(&plant([3.0, 4.0]), &[1.0, 1.0, 1.0]).unwrap();
        for i in 0..3 {
            assert!((real.c_o.row(i).norm() - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn four_element_steady_vector() {
        let real = build_observer(&plant([1.0, 0.0]), &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let st = steady_vector(&real, 1.0).unwrap();
        assert_eq!(st.x_bar, DVector::from_vec(vec![1.0, 0.0, 0.0, -1.0, -1.0, 0.0, 0.0, 1.0]));
        assert!(st.residual < 1e-12);
    }

    #[test]
    fn zero_output_steady_vector() {
        let real = build_observer(&plant([1.0, 2.0]), &[1.0, 3.0]).unwrap();
        let st = steady_vector(&real, 0.0).unwrap();
        assert_eq!(st.x_bar, DVector::zeros(4));
        assert_eq!(st.residual, 0.0);
    }

    #[test]
    fn three_element_steady_residual() {
        let real = build_observer(&plant([1.0, 1.0]), &[2.0, 1.0, 0.5]).unwrap();
        assert!(steady_vector(&real, 1.0).unwrap().residual < 1e-12);
    }

    #[test]
    fn perturbed_detuning_breaks_stationarity() {
        let p = plant([1.0, 0.0]);
        let mu = [1.0, 1.0, 1.0];
        let mut omega = detunings_from_gains(&mu);
        omega[1] += 1e-3;
        let real = build_observer_with_detunings(&p, &mu, &omega).unwrap();
        assert!(real.omega_overridden);
        let st = steady_residual(&real, 1.0);
        assert!((st.residual - 2e-3).abs() < 1e-12);
        assert!(matches!(steady_vector(&real, 1.0), Err(Error::ConstructionInconsistency { .. })));
    }

    #[test]
    fn readout_is_all_ones() {
        let real = build_observer(&plant([1.0, 0.0]), &[1.0; 4]).unwrap();
        assert_eq!(consensus_readout(&real).unwrap(), DVector::from_element(4, 1.0));
        let real = build_observer(&plant([0.3, -2.0]), &[0.9]).unwrap();
        assert!((consensus_readout(&real).unwrap()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wrong_readout_orientation_is_caught() {
        let mut real = build_observer(&plant([1.0, 0.0]), &[1.0, 1.0]).unwrap();
        // Alternative reading ((−J)α)ᵀ flips the sign of element 2.
        real.c_o[(1, 3)] = 1.0;
        assert!(matches!(consensus_readout(&real), Err(Error::ReadoutOrientation { .. })));
    }

    #[test]
    fn single_element_augmented_by_hand() {
        let real = build_observer(&plant([1.0, 0.0]), &[1.0]).unwrap();
        let aug = assemble_augmented(&real).unwrap();
        // Ordering (q_p, p_p, q₁, p₁): plant rows 2Jαβᵀ, observer rows
        // 2Jβαᵀ on x_p plus 2ω₁J.
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            0.0, 0.0,  0.0, 0.0,
            0.0, 0.0,  2.0, 0.0,
            0.0, 0.0,  0.0, 2.0,
            2.0, 0.0, -2.0, 0.0,
        ]);
        assert_eq!(aug.a_a, expected);
    }

    #[test]
    fn plant_output_is_conserved_by_drift() {
        let real = build_observer(&plant([0.4, 1.1]), &[1.5, 0.3, 2.0]).unwrap();
        let aug = assemble_augmented(&real).unwrap();
        let cons = &aug.c_p_row * &aug.a_a;
        assert!(max_abs(&cons) < 1e-15);
        assert_eq!(aug.r_a.view((0, 0), (2, 2)).clone_owned(), DMatrix::zeros(2, 2));
        assert_eq!(aug.r_a.view((0, 2), (2, 2)).clone_owned(), real.r_c);
    }

    #[test]
    fn augmented_spectrum_is_imaginary() {
        let real = build_observer(&plant([1.0, -0.5]), &[0.8, 1.7, 0.4, 2.2]).unwrap();
        let aug = assemble_augmented(&real).unwrap();
        let max_re = aug
            .a_a
            .complex_eigenvalues()
            .iter()
            .fold(0.0_f64, |m, z| m.max(z.re.abs()));
        assert!(max_re < 1e-10, "max |Re λ| = {max_re}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(PlantSpec::new([0.0, 0.0]).is_err());
        let p = plant([1.0, 0.0]);
        assert!(build_observer(&p, &[1.0, 0.0, 1.0]).is_err());
        assert!(build_observer(&p, &[]).is_err());
        assert!(build_observer_with_detunings(&p, &[1.0, 1.0], &[2.0]).is_err());
    }

    #[test]
    fn augmented_flow_matches_expm() {
        let p = PlantSpec::new([0.6, -1.3]).unwrap();
        for mu in [vec![1.0], vec![1.0, 1.0, 1.0], vec![0.4, 2.5, 1.1, 0.7]] {
            let aug = assemble_augmented(&build_observer(&p, &mu).unwrap()).unwrap();
            let flow = aug.flow().unwrap();
            for t in [0.0, 0.3, 2.0, 7.5] {
                let exact = crate::flow::expm(&(&aug.a_a * t));
                assert!(max_abs(&(flow.propagator(t) - exact)) < 1e-11, "μ = {mu:?}, t = {t}");
            }
        }
    }

    #[test]
    fn augmented_flow_preserves_commutators_at_long_times() {
        let aug = assemble_augmented(&build_observer(&plant([1.0, 0.0]), &[1.0, 1.0, 1.0]).unwrap()).unwrap();
        let flow = aug.flow().unwrap();
        for t in [10.0, 100.0, 1000.0] {
            let res = crate::system::propagator_commutation_residual(&flow.propagator(t), &aug.form);
            assert!(res < 1e-8, "t = {t}: {res:.3e}");
        }
        // Large gains: entries grow like t·μ²‖α‖², so only the scaled residual is meaningful.
        let aug = assemble_augmented(&build_observer(&plant([2.5, 1.5]), &[9.0, 7.5, 10.0, 8.0, 9.5]).unwrap()).unwrap();
        let phi = aug.flow().unwrap().propagator(100.0);
        let res = crate::system::propagator_commutation_residual(&phi, &aug.form);
        assert!(res < 1e-12 * max_abs(&phi).powi(2), "{res:.3e}");
    }
}
