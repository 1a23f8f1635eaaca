//! Mean-value trajectories of the augmented plant–observer system and the
//! time-averaged consensus evidence.
//!
//! Generators `2ΘR` with `R ≻ 0` are propagated with the exact spectral flow.
//! Anything else, including the augmented drift itself (its plant block is
//! not positive definite and has a nilpotent part), uses matrix exponentials
//! on the sample grid, and the result says so through `fallback`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::analysis::{convergence_certificate, ro_matrix, time_average_integral, ConvergenceCertificate};
use crate::flow::{expm, HamiltonianFlow};
use crate::linalg::{self, log_log_slope, spectral_norm};
use crate::observer::{steady_residual, AugmentedSystem, ObserverRealization};
use crate::system::SymplecticForm;
use crate::{Error, Result};

/// Relative tolerance on `z_p` constancy: `drift < ZP_DRIFT_TOL·(1 + |z_p(0)|)`.
pub const ZP_DRIFT_TOL: f64 = 1e-9;

/// Upper limit on the number of samples in one run.
pub const MAX_SAMPLES: f64 = 1e7;

/// Absolute allowance added to per-element consensus bounds, in units of
/// `1 + |z_p|`.
pub const CONSENSUS_FLOOR: f64 = 1e-9;

/// Samples between direct re-evaluations of `e^{At}` on the fallback path.
const ANCHOR_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Method {
    Exact,
    /// Classical RK4 with steps no longer than `dt`. Diagnostic only.
    Rk4 { dt: f64 },
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub states: Vec<DVector<f64>>,
    /// The exact spectral flow was unavailable and exponentials were used.
    pub fallback: bool,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.first().is_some_and(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidArgument("times must start at or after 0".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("times must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// `x(t_k) = e^{At_k} x0` at each requested time.
pub fn propagate(a: &DMatrix<f64>, x0: &DVector<f64>, times: &[f64], method: Method) -> Result<Propagation> {
    let mut states = Vec::with_capacity(times.len());
    let fallback = propagate_with(a, x0, times, method, |_, x| states.push(x.clone()))?;
    Ok(Propagation { states, fallback })
}

/// Streaming form of [`propagate`]: `visit(k, x(t_k))` is called in order.
/// Returns whether the exponential fallback was used.
pub fn propagate_with(
    a: &DMatrix<f64>,
    x0: &DVector<f64>,
    times: &[f64],
    method: Method,
    visit: impl FnMut(usize, &DVector<f64>),
) -> Result<bool> {
    let n = linalg::ensure_square(a, "drift")?;
    if x0.len() != n {
        return Err(Error::DimensionMismatch(format!("state has {} entries, drift is {n}×{n}", x0.len())));
    }
    check_times(times)?;
    match method {
        Method::Exact => Ok(propagate_exact(a, x0, times, visit)),
        Method::Rk4 { dt } => propagate_rk4(a, x0, times, dt, visit).map(|_| false),
    }
}

fn propagate_exact(
    a: &DMatrix<f64>,
    x0: &DVector<f64>,
    times: &[f64],
    mut visit: impl FnMut(usize, &DVector<f64>),
) -> bool {
    if let Ok(flow) = HamiltonianFlow::from_drift(a) {
        let modal = flow.modal(x0);
        for (k, t) in times.iter().enumerate() {
            visit(k, &flow.apply_modal(*t, &modal));
        }
        return false;
    }
    log::debug!("spectral flow unavailable, propagating with matrix exponentials");
    let mut step: Option<(f64, DMatrix<f64>)> = None;
    let mut prev_t = 0.0;
    let mut x = x0.clone();
    for (k, &t) in times.iter().enumerate() {
        x = if k % ANCHOR_EVERY == 0 {
            expm(&(a * t)) * x0
        } else {
            let h = t - prev_t;
            let cached = step.as_ref().is_some_and(|(ch, _)| (ch - h).abs() <= 1e-14 * h.abs().max(1.0));
            if !cached {
                step = Some((h, expm(&(a * h))));
            }
            &step.as_ref().expect("step cached").1 * &x
        };
        visit(k, &x);
        prev_t = t;
    }
    true
}

fn propagate_rk4(
    a: &DMatrix<f64>,
    x0: &DVector<f64>,
    times: &[f64],
    dt: f64,
    mut visit: impl FnMut(usize, &DVector<f64>),
) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("RK4 step must be positive, got {dt}")));
    }
    let mut x = x0.clone();
    let mut t = 0.0;
    for (k, &target) in times.iter().enumerate() {
        let span = target - t;
        if span > 0.0 {
            let m = (span / dt).ceil().max(1.0) as usize;
            let h = span / m as f64;
            for _ in 0..m {
                let k1 = a * &x;
                let k2 = a * (&x + &k1 * (0.5 * h));
                let k3 = a * (&x + &k2 * (0.5 * h));
                let k4 = a * (&x + &k3 * h);
                x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            }
        }
        t = target;
        visit(k, &x);
    }
    Ok(())
}

/// Grid on `[0, T]` with every checkpoint as a grid point and spacing at
/// most `dt` inside each segment.
pub fn sample_grid(horizon: f64, dt: f64, checkpoints: &[f64]) -> Result<Vec<f64>> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    if !(dt > 0.0 && dt < horizon) {
        return Err(Error::InvalidArgument(format!("sample_dt must lie in (0, {horizon}), got {dt}")));
    }
    if horizon / dt > MAX_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "horizon/sample_dt = {:.3e} exceeds the {MAX_SAMPLES:.0e} sample limit",
            horizon / dt
        )));
    }
    let mut breaks: Vec<f64> = checkpoints.iter().copied().filter(|c| *c > 0.0 && *c < horizon).collect();
    breaks.push(horizon);
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    let mut grid = vec![0.0];
    let mut start = 0.0;
    for end in breaks {
        let m = ((end - start) / dt).ceil().max(1.0) as usize;
        let h = (end - start) / m as f64;
        grid.extend((1..m).map(|k| start + k as f64 * h));
        grid.push(end);
        start = end;
    }
    Ok(grid)
}

/// `min(0.01, 0.1/max ω_i)`.
pub fn default_sample_dt(omega: &[f64]) -> f64 {
    let w = omega.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if w > 0.0 {
        (0.1 / w).min(0.01)
    } else {
        0.01
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub initial_plant: [f64; 2],
    pub initial_observer: DVector<f64>,
    pub horizon: f64,
    pub sample_dt: f64,
    pub method: Method,
    /// Extra times that must fall on the grid.
    pub checkpoints: Vec<f64>,
}

impl SimulationConfig {
    pub fn new(initial_plant: [f64; 2], initial_observer: DVector<f64>, horizon: f64, sample_dt: f64) -> Self {
        Self { initial_plant, initial_observer, horizon, sample_dt, method: Method::Exact, checkpoints: Vec::new() }
    }

    pub fn initial_state(&self) -> DVector<f64> {
        let mut x = DVector::zeros(2 + self.initial_observer.len());
        x[0] = self.initial_plant[0];
        x[1] = self.initial_plant[1];
        x.rows_mut(2, self.initial_observer.len()).copy_from(&self.initial_observer);
        x
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub z_p: Vec<f64>,
    pub z_o: Vec<Vec<f64>>,
    /// `(1/t)∫₀ᵗ z_o` by the trapezoid rule; equal to `z_o(0)` at `t = 0`.
    pub running_avg_z_o: Vec<Vec<f64>>,
    pub max_z_p_drift: f64,
    pub fallback: bool,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_observers(&self) -> usize {
        self.z_o.first().map_or(0, Vec::len)
    }

    /// Sample index of the grid point `t`.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = self.times.partition_point(|s| *s < t);
        [k.checked_sub(1), Some(k)]
            .into_iter()
            .flatten()
            .filter(|&i| i < self.times.len())
            .find(|&i| (self.times[i] - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}

fn validate(aug: &AugmentedSystem, config: &SimulationConfig) -> Result<()> {
    if config.initial_observer.len() != 2 * aug.n_observers() {
        return Err(Error::DimensionMismatch(format!(
            "initial observer state has {} entries, expected {}",
            config.initial_observer.len(),
            2 * aug.n_observers()
        )));
    }
    if !config.initial_plant.iter().chain(config.initial_observer.iter()).all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("initial state must be finite".into()));
    }
    Ok(())
}

/// Samples `z_p` and `z_o` on the grid and accumulates running averages.
pub fn simulate(aug: &AugmentedSystem, config: &SimulationConfig) -> Result<TimeSeries> {
    validate(aug, config)?;
    let times = sample_grid(config.horizon, config.sample_dt, &config.checkpoints)?;
    let x0 = config.initial_state();

    let n = aug.n_observers();
    let c_p = aug.c_p_row.row(0).transpose();
    let mut z_p = Vec::with_capacity(times.len());
    let mut z_o: Vec<Vec<f64>> = Vec::with_capacity(times.len());
    let mut running = Vec::with_capacity(times.len());
    let mut integral = vec![0.0; n];
    let fallback = propagate_with(&aug.a_a, &x0, &times, config.method, |k, x| {
        z_p.push(c_p.dot(x));
        let zo: Vec<f64> = (&aug.c_o_block * x).iter().copied().collect();
        if k == 0 {
            running.push(zo.clone());
        } else {
            let h = times[k] - times[k - 1];
            let prev = &z_o[k - 1];
            for i in 0..n {
                integral[i] += 0.5 * h * (prev[i] + zo[i]);
            }
            running.push(integral.iter().map(|v| v / times[k]).collect());
        }
        z_o.push(zo);
    })?;

    let z0 = z_p[0];
    let max_z_p_drift = z_p.iter().fold(0.0_f64, |m, z| m.max((z - z0).abs()));
    let tolerance = ZP_DRIFT_TOL * (1.0 + z0.abs());
    if !(max_z_p_drift < tolerance) {
        return Err(Error::IntegratorAccuracy { drift: max_z_p_drift, tolerance });
    }
    Ok(TimeSeries { times, z_p, z_o, running_avg_z_o: running, max_z_p_drift, fallback })
}

#[derive(Debug, Clone, Serialize)]
pub struct HorizonPoint {
    pub t: f64,
    /// `|(1/T)∫₀ᵀ z_{oi} − z_p|` per element.
    pub per_element_error: Vec<f64>,
    /// `C/T·‖x_e(0)‖·‖C_{oi}‖` plus the absolute floor.
    pub per_element_bound: Vec<f64>,
    /// `‖C_o (1/T)∫₀ᵀ e^{A_ot} dt‖₂`.
    pub matrix_residual: f64,
    /// `C/T·‖C_o‖₂`.
    pub matrix_bound: f64,
    /// `C/T`.
    pub certificate_envelope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsensusReport {
    pub z_p: f64,
    pub z_p_drift: f64,
    pub initial_error_norm: f64,
    pub certificate: ConvergenceCertificate,
    pub horizons: Vec<HorizonPoint>,
    /// Log-log slope of the matrix residual against `T`.
    pub slope: Option<f64>,
    /// Log-log slope of the envelope `C/T` (−1 by construction).
    pub envelope_slope: Option<f64>,
    pub trajectory_pass: bool,
    pub matrix_pass: bool,
    pub passed: bool,
    pub fallback: bool,
}

impl ConsensusReport {
    pub fn max_error_at(&self, t: f64) -> Option<f64> {
        self.horizons
            .iter()
            .find(|h| h.t == t)
            .map(|h| h.per_element_error.iter().fold(0.0_f64, |m, e| m.max(*e)))
    }
}

/// Simulates up to the largest horizon and checks the time-averaged errors
/// against the certificate envelope at every horizon.
pub fn consensus_report(
    aug: &AugmentedSystem,
    real: &ObserverRealization,
    config: &SimulationConfig,
    horizons: &[f64],
) -> Result<ConsensusReport> {
    consensus_run(aug, real, config, horizons).map(|(rep, _)| rep)
}

/// [`consensus_report`] together with the simulated series it was read from.
pub fn consensus_run(
    aug: &AugmentedSystem,
    real: &ObserverRealization,
    config: &SimulationConfig,
    horizons: &[f64],
) -> Result<(ConsensusReport, TimeSeries)> {
    if horizons.is_empty() {
        return Err(Error::InvalidArgument("no horizons given".into()));
    }
    if horizons.windows(2).any(|w| !(w[1] > w[0])) || !(horizons[0] > 0.0) {
        return Err(Error::InvalidArgument("horizons must be positive and increasing".into()));
    }
    let t_max = *horizons.last().expect("nonempty");
    let mut cfg = config.clone();
    cfg.horizon = t_max;
    cfg.checkpoints = horizons.to_vec();
    let ts = simulate(aug, &cfg)?;

    let z_p = ts.z_p[0];
    let x_e0 = &cfg.initial_observer - steady_residual(real, z_p).x_bar;
    let e_norm = x_e0.norm();

    let r_o = ro_matrix(&real.mu, &real.omega);
    let form = SymplecticForm::new(real.n())?;
    let certificate = convergence_certificate(&r_o, &form)?;
    let c_o_norm = spectral_norm(&real.c_o);
    let row_norms: Vec<f64> = (0..real.n()).map(|i| real.c_o.row(i).norm()).collect();
    let floor = CONSENSUS_FLOOR * (1.0 + z_p.abs());

    let mut points = Vec::with_capacity(horizons.len());
    for &t in horizons {
        let k = ts
            .index_of(t)
            .ok_or_else(|| Error::Numerical(format!("horizon {t} missing from the sample grid")))?;
        let per_element_error: Vec<f64> = ts.running_avg_z_o[k].iter().map(|a| (a - z_p).abs()).collect();
        let env = certificate.envelope(t);
        let per_element_bound = row_norms.iter().map(|r| env * e_norm * r + floor).collect();
        let integral = time_average_integral(&r_o, &form, t)?;
        points.push(HorizonPoint {
            t,
            per_element_error,
            per_element_bound,
            matrix_residual: spectral_norm(&(&real.c_o * integral)) / t,
            matrix_bound: env * c_o_norm,
            certificate_envelope: env,
        });
    }

    let trajectory_pass = points
        .iter()
        .all(|p| p.per_element_error.iter().zip(&p.per_element_bound).all(|(e, b)| e <= b));
    let matrix_pass = points.iter().all(|p| p.matrix_residual <= p.matrix_bound);
    let ts_: Vec<f64> = points.iter().map(|p| p.t).collect();
    let slope = log_log_slope(&ts_, &points.iter().map(|p| p.matrix_residual).collect::<Vec<_>>());
    let envelope_slope = log_log_slope(&ts_, &points.iter().map(|p| p.certificate_envelope).collect::<Vec<_>>());

    let report = ConsensusReport {
        z_p,
        z_p_drift: ts.max_z_p_drift,
        initial_error_norm: e_norm,
        certificate,
        horizons: points,
        slope,
        envelope_slope,
        trajectory_pass,
        matrix_pass,
        passed: trajectory_pass && matrix_pass,
        fallback: ts.fallback,
    };
    Ok((report, ts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{j2, max_abs_vec};
    use crate::observer::{assemble_augmented, build_observer, build_observer_with_detunings, PlantSpec};

    fn canonical() -> (ObserverRealization, AugmentedSystem) {
        let real = build_observer(&PlantSpec::new([1.0, 0.0]).unwrap(), &[1.0, 1.0, 1.0]).unwrap();
        let aug = assemble_augmented(&real).unwrap();
        (real, aug)
    }

    #[test]
    fn zero_drift_freezes_state() {
        let x0 = DVector::from_vec(vec![1.0, -2.0]);
        let p = propagate(&DMatrix::zeros(2, 2), &x0, &[0.0, 1.0, 50.0], Method::Exact).unwrap();
        assert!(p.states.iter().all(|x| x == &x0));
        assert!(p.fallback);
    }

    #[test]
    fn rotation_at_quarter_period() {
        let x0 = DVector::from_vec(vec![1.0, 0.0]);
        let t = std::f64::consts::FRAC_PI_2;
        let p = propagate(&(j2() * 2.0), &x0, &[t], Method::Exact).unwrap();
        assert!(!p.fallback);
        assert!((&p.states[0] - DVector::from_vec(vec![-1.0, 0.0])).amax() < 1e-14);
    }

    #[test]
    fn exact_and_rk4_agree() {
        let real = build_observer(&PlantSpec::new([0.6, -0.8]).unwrap(), &[0.7, 1.3, 0.4]).unwrap();
        let x0 = DVector::from_vec(vec![0.3, -1.0, 0.2, 0.5, -0.7, 1.1]);
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
        let ex = propagate(&real.a_o, &x0, &times, Method::Exact).unwrap();
        let rk = propagate(&real.a_o, &x0, &times, Method::Rk4 { dt: 1e-3 }).unwrap();
        let diff = ex.states.iter().zip(&rk.states).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
    }

    #[test]
    fn fallback_matches_direct_exponential() {
        let (_, aug) = canonical();
        let x0 = DVector::from_vec(vec![1.0, 0.5, 0.0, 0.2, -0.3, 0.0, 0.1, 0.4]);
        let times = sample_grid(50.0, 0.01, &[]).unwrap();
        let p = propagate(&aug.a_a, &x0, &times, Method::Exact).unwrap();
        assert!(p.fallback);
        for k in [1, 63, 65, 2500, times.len() - 1] {
            let direct = expm(&(&aug.a_a * times[k])) * &x0;
            assert!((&p.states[k] - direct).amax() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn grid_contains_checkpoints() {
        let g = sample_grid(10.0, 0.3, &[1.0, 2.5]).unwrap();
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 10.0);
        assert!(g.contains(&1.0) && g.contains(&2.5));
        assert!(g.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 0.3 + 1e-15));
        assert!(sample_grid(1.0, 2.0, &[]).is_err());
        assert!(sample_grid(1e8, 1.0, &[]).is_err());
    }

    #[test]
    fn steady_start_stays_at_consensus() {
        let (real, aug) = canonical();
        let x_bar = steady_residual(&real, 1.0).x_bar;
        let cfg = SimulationConfig::new([1.0, 0.0], x_bar, 100.0, 0.01);
        let ts = simulate(&aug, &cfg).unwrap();
        for zo in &ts.z_o {
            assert!(zo.iter().all(|v| (v - 1.0).abs() < 1e-9));
        }
    }

    #[test]
    fn zero_state_stays_zero() {
        let (_, aug) = canonical();
        let cfg = SimulationConfig::new([0.0, 0.0], DVector::zeros(6), 10.0, 0.01);
        let ts = simulate(&aug, &cfg).unwrap();
        assert!(ts.z_o.iter().flatten().chain(&ts.z_p).all(|v| *v == 0.0));
    }

    #[test]
    fn plant_output_is_constant() {
        let (_, aug) = canonical();
        let cfg = SimulationConfig::new([0.8, -0.4], DVector::from_vec(vec![0.1, 0.9, -0.5, 0.3, 0.0, 1.0]), 200.0, 0.01);
        let ts = simulate(&aug, &cfg).unwrap();
        assert!(ts.max_z_p_drift < 1e-9 * 1.8);
        let spread = ts.z_o.iter().map(|z| z[0]).fold(f64::NEG_INFINITY, f64::max)
            - ts.z_o.iter().map(|z| z[0]).fold(f64::INFINITY, f64::min);
        assert!(spread > 0.1);
    }

    #[test]
    fn running_average_is_trapezoid() {
        let (_, aug) = canonical();
        let cfg = SimulationConfig::new([1.0, 0.0], DVector::zeros(6), 5.0, 0.05);
        let ts = simulate(&aug, &cfg).unwrap();
        let k = ts.len() - 1;
        let mut acc = 0.0;
        for j in 1..=k {
            acc += 0.5 * (ts.times[j] - ts.times[j - 1]) * (ts.z_o[j][2] + ts.z_o[j - 1][2]);
        }
        assert!((acc / ts.times[k] - ts.running_avg_z_o[k][2]).abs() < 1e-12);
    }

    #[test]
    fn error_dynamics_match_chain_flow() {
        let (real, aug) = canonical();
        let x_o0 = DVector::from_vec(vec![0.4, 0.0, -0.2, 0.7, 0.0, 0.3]);
        let cfg = SimulationConfig::new([1.0, 0.0], x_o0.clone(), 20.0, 0.01);
        let times = sample_grid(cfg.horizon, cfg.sample_dt, &[]).unwrap();
        let full = propagate(&aug.a_a, &cfg.initial_state(), &times, Method::Exact).unwrap();
        let x_bar = steady_residual(&real, 1.0).x_bar;
        let err = propagate(&real.a_o, &(&x_o0 - &x_bar), &times, Method::Exact).unwrap();
        assert!(!err.fallback);
        for (xf, xe) in full.states.iter().zip(&err.states) {
            let d = xf.rows(2, 6).clone_owned() - &x_bar - xe;
            assert!(max_abs_vec(&d) < 1e-9);
        }
    }

    #[test]
    fn canonical_consensus_decays() {
        let (real, aug) = canonical();
        let cfg = SimulationConfig::new([1.0, 0.0], DVector::zeros(6), 1000.0, 0.01);
        let rep = consensus_report(&aug, &real, &cfg, &[100.0, 1000.0]).unwrap();
        assert!(rep.passed, "{rep:?}");
        let (e2, e3) = (rep.max_error_at(100.0).unwrap(), rep.max_error_at(1000.0).unwrap());
        assert!(e3 * 10.0 <= e2 * 1.0001 || e3 < 1e-6, "{e2} {e3}");
        assert!((rep.envelope_slope.unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn steady_start_has_zero_error() {
        let (real, aug) = canonical();
        let cfg = SimulationConfig::new([1.0, 0.0], steady_residual(&real, 1.0).x_bar, 100.0, 0.01);
        let rep = consensus_report(&aug, &real, &cfg, &[10.0, 100.0]).unwrap();
        assert!(rep.passed);
        assert!(rep.horizons.iter().flat_map(|h| &h.per_element_error).all(|e| *e < 1e-9));
    }

    #[test]
    fn detuned_chain_fails_consensus() {
        let plant = PlantSpec::new([1.0, 0.0]).unwrap();
        let real = build_observer_with_detunings(&plant, &[1.0, 1.0, 1.0], &[2.0, 2.001, 1.0]).unwrap();
        let aug = assemble_augmented(&real).unwrap();
        let cfg = SimulationConfig::new([1.0, 0.0], steady_residual(&real, 1.0).x_bar, 100.0, 0.01);
        let rep = consensus_report(&aug, &real, &cfg, &[10.0, 100.0]).unwrap();
        assert!(!rep.trajectory_pass);
    }
}
