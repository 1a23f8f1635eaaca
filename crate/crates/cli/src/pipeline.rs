//! build → verify → simulate → report.

use std::io::Write;
use std::path::Path;

use nalgebra::DVector;
use qchain_core::analysis::{
    build_ro, check_positive_definite, complex_embedding, convergence_certificate, exp_norm_bound, hermitian_form,
    hermitian_reduce, lemma_split, ConvergenceCertificate,
};
use qchain_core::linalg::{max_abs, spectral_norm, to_rows};
use qchain_core::network::{build_chain_network_with_detunings, verify_noise_cancellation};
use qchain_core::observer::{
    assemble_augmented, build_observer, build_observer_with_detunings, consensus_readout, gains_from_kappas,
    kappas_from_gains, steady_residual, AugmentedSystem, ChainParams, KappaSplit, ObserverRealization, PlantSpec,
    RealizationRecord,
};
use qchain_core::sim::{consensus_run, default_sample_dt, propagate, ConsensusReport, Method, SimulationConfig, TimeSeries};
use qchain_core::system::{hamiltonian_from_drift, propagator_commutation_residual, REALIZABILITY_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ChainSpec, ExperimentConfig, ObserverInit, ObserverKeyword};
use crate::error::CliError;

pub const REPORT_VERSION: u32 = 1;

/// A constructed experiment.
#[derive(Debug, Clone)]
pub struct Instance {
    pub config: ExperimentConfig,
    pub plant: PlantSpec,
    /// Cavity parameters, either as given or from the balanced inverse design.
    pub params: ChainParams,
    pub real: ObserverRealization,
    pub aug: AugmentedSystem,
}

impl Instance {
    pub fn build(config: &ExperimentConfig) -> Result<Self, CliError> {
        config.validate()?;
        let plant = PlantSpec::new(config.plant.alpha)?;
        let (mu, params) = match config.chain_spec()? {
            ChainSpec::Gains(mu) => {
                let params = kappas_from_gains(&mu, KappaSplit::Balanced)?;
                (mu, params)
            }
            ChainSpec::Cavities { mu_1, kappas } => {
                let params = ChainParams::new(mu_1, kappas)?;
                (gains_from_kappas(&params), params)
            }
        };
        let real = match config.debug.as_ref().and_then(|d| d.omega_override.as_ref()) {
            Some(omega) => {
                log::warn!("detunings overridden by debug.omega_override; the observer is not physical");
                build_observer_with_detunings(&plant, &mu, omega)?
            }
            None => build_observer(&plant, &mu)?,
        };
        let aug = assemble_augmented(&real)?;
        Ok(Self { config: config.clone(), plant, params, real, aug })
    }

    pub fn n(&self) -> usize {
        self.real.n()
    }

    pub fn z_p(&self) -> f64 {
        self.plant.output(&self.config.initial.plant)
    }

    pub fn initial_observer(&self) -> DVector<f64> {
        match &self.config.initial.observer {
            ObserverInit::Values(v) => DVector::from_column_slice(v),
            ObserverInit::Keyword(ObserverKeyword::Zero) => DVector::zeros(2 * self.n()),
            ObserverInit::Keyword(ObserverKeyword::Steady) => steady_residual(&self.real, self.z_p()).x_bar,
        }
    }

    pub fn sample_dt(&self) -> f64 {
        self.config.sample_dt.unwrap_or_else(|| default_sample_dt(&self.real.omega))
    }

    pub fn simulation_config(&self) -> SimulationConfig {
        let horizon = *self.config.horizons.last().expect("validated");
        SimulationConfig::new(self.config.initial.plant, self.initial_observer(), horizon, self.sample_dt())
    }

    pub fn certificate(&self) -> Option<ConvergenceCertificate> {
        let ro = build_ro(&self.real.mu, &self.real.omega).ok()?;
        convergence_certificate(ro.matrix(), &ro.form()).ok()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub name: String,
    pub n: usize,
    pub mu: Vec<f64>,
    pub omega: Vec<f64>,
    pub omega_overridden: bool,
    pub kappas: Vec<f64>,
    pub dims: Dims,
    pub r_c: Vec<Vec<f64>>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub is_positive_definite: bool,
    pub certificate: Option<ConvergenceCertificate>,
    pub realization: RealizationRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct Dims {
    pub a_o: [usize; 2],
    pub b_o: [usize; 2],
    pub c_o: [usize; 2],
    pub a_a: [usize; 2],
}

pub fn summarize(inst: &Instance) -> Summary {
    let real = &inst.real;
    let ro = qchain_core::analysis::ro_matrix(&real.mu, &real.omega);
    let pd = check_positive_definite(&ro);
    Summary {
        name: inst.config.name.clone(),
        n: real.n(),
        mu: real.mu.clone(),
        omega: real.omega.clone(),
        omega_overridden: real.omega_overridden,
        kappas: inst.params.kappas().to_vec(),
        dims: Dims {
            a_o: [real.a_o.nrows(), real.a_o.ncols()],
            b_o: [real.b_o.len(), 1],
            c_o: [real.c_o.nrows(), real.c_o.ncols()],
            a_a: [inst.aug.a_a.nrows(), inst.aug.a_a.ncols()],
        },
        r_c: to_rows(&real.r_c),
        lambda_min: pd.lambda_min,
        lambda_max: pd.lambda_max,
        is_positive_definite: pd.is_pd,
        certificate: inst.certificate(),
        realization: RealizationRecord::from(real),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn below(name: &str, residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: residual <= tolerance, residual, tolerance, detail: None }
    }

    fn failed(name: &str, tolerance: f64, detail: String) -> Self {
        Self { name: name.into(), passed: false, residual: f64::NAN, tolerance, detail: Some(detail) }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn failed(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
    }
}

/// Times at which commutation preservation is checked.
pub const COMMUTATION_TIMES: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

/// `k` log-spaced points on `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..k).map(|i| 10f64.powf(a + (b - a) * i as f64 / (k - 1) as f64)).collect()
}

/// Relative energy change of `½xᵀR_ax` along the augmented flow. The
/// denominator is `|E(0)|`, floored at `10⁻³·½‖R_a‖‖x(0)‖²`.
pub fn energy_drift(aug: &AugmentedSystem, x0: &DVector<f64>, times: &[f64]) -> Result<f64, CliError> {
    let energy = |x: &DVector<f64>| 0.5 * x.dot(&(&aug.r_a * x));
    let e0 = energy(x0);
    let denom = e0.abs().max(1e-3 * 0.5 * spectral_norm(&aug.r_a) * x0.norm_squared());
    let prop = propagate(&aug.a_a, x0, times, Method::Exact)?;
    Ok(prop.states.iter().map(|x| (energy(x) - e0).abs() / denom).fold(0.0, f64::max))
}

/// The full check suite. `tol_scale` multiplies every tolerance.
pub fn verify(inst: &Instance, seed: u64, tol_scale: f64) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let real = &inst.real;
    let aug = &inst.aug;
    let mut checks = Vec::new();

    let tol = REALIZABILITY_TOL * tol_scale;
    checks.push(match hamiltonian_from_drift(&aug.a_a, &aug.form) {
        Ok(r) => CheckResult::below("realizability", max_abs(&(r - &aug.r_a)), tol),
        Err(e) => CheckResult::failed("realizability", tol, e.to_string()),
    });

    let tol = 1e-8 * tol_scale;
    let commutation = aug.flow().map(|flow| {
        COMMUTATION_TIMES
            .iter()
            .map(|&t| propagator_commutation_residual(&flow.propagator(t), &aug.form))
            .fold(0.0, f64::max)
    });
    checks.push(match commutation {
        Ok(res) => CheckResult::below("commutation", res, tol),
        Err(e) => CheckResult::failed("commutation", tol, e.to_string()),
    });

    let tol = 1e-9 * tol_scale;
    let x0 = DVector::from_fn(aug.dim(), |_, _| rng.random_range(-1.0..1.0));
    checks.push(match energy_drift(aug, &x0, &log_space(1.0, 1e3, 10)) {
        Ok(d) => CheckResult::below("energy_conservation", d, tol),
        Err(e) => CheckResult::failed("energy_conservation", tol, e.to_string()),
    });

    let tol = 1e-12 * tol_scale;
    if inst.n() >= 2 {
        let net = build_chain_network_with_detunings(&inst.plant, &inst.params, &real.omega)
            .and_then(|net| net.reduce());
        match net {
            Ok(red) => {
                checks.push(CheckResult::below("noise_cancellation", verify_noise_cancellation(&red), tol));
                checks.push(CheckResult::below("network_reduction", max_abs(&(&red.drift - &aug.a_a)), tol));
            }
            Err(e) => checks.push(CheckResult::failed("noise_cancellation", tol, e.to_string())),
        }
    } else {
        let skip = "single element: no field links";
        checks.push(CheckResult::below("noise_cancellation", 0.0, tol).with_detail(skip));
        checks.push(CheckResult::below("network_reduction", 0.0, tol).with_detail(skip));
    }

    match build_ro(&real.mu, &real.omega) {
        Ok(ro) => {
            let pd = check_positive_definite(ro.matrix());
            checks.push(CheckResult {
                name: "positive_definite".into(),
                passed: pd.is_pd,
                residual: pd.lambda_min,
                tolerance: 0.0,
                detail: Some(format!("lambda_min = {:.6e}, lambda_max = {:.6e}", pd.lambda_min, pd.lambda_max)),
            });

            let red = hermitian_reduce(&ro);
            let tol = 1e-12 * tol_scale;
            checks.push(match lemma_split(&red) {
                Ok(rep) => CheckResult::below("positivity_split", rep.sum_of_squares_residual.max(rep.null_residual), tol),
                Err(e) => CheckResult::failed("positivity_split", tol, e.to_string()),
            });

            let mut worst: f64 = 0.0;
            for _ in 0..100 {
                let x = DVector::from_fn(ro.matrix().nrows(), |_, _| rng.random_range(-1.0..1.0));
                let q = x.dot(&(ro.matrix() * &x));
                let c = hermitian_form(&red.matrix, &complex_embedding(&x));
                worst = worst.max((q - c.re).abs().max(c.im.abs()) / q.abs().max(f64::MIN_POSITIVE));
            }
            checks.push(CheckResult::below("quadratic_form", worst, 1e-12 * tol_scale));

            let name = "exp_norm_bound";
            checks.push(match exp_norm_bound(ro.matrix(), &ro.form(), &log_space(1e-2, 1e3, 50)) {
                Ok(rep) => CheckResult {
                    name: name.into(),
                    passed: rep.passed,
                    residual: rep.max_ratio,
                    tolerance: 1.0 + 1e-9 * tol_scale,
                    detail: Some(format!("bound = {:.9}", rep.bound)),
                },
                Err(e) => CheckResult::failed(name, 1.0, e.to_string()),
            });
        }
        Err(e) => checks.push(CheckResult::failed("positive_definite", 0.0, e.to_string())),
    }

    let st = steady_residual(real, 1.0);
    checks.push(CheckResult::below("steady_vector", st.residual, st.tolerance * tol_scale));

    let tol = 1e-12 * tol_scale;
    checks.push(match consensus_readout(real) {
        Ok(v) => CheckResult::below("consensus_readout", v.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max), tol),
        Err(e) => CheckResult::failed("consensus_readout", tol, e.to_string()),
    });

    let passed = checks.iter().all(|c| c.passed);
    VerificationReport { checks, passed }
}

pub fn simulate(inst: &Instance) -> Result<(ConsensusReport, TimeSeries), CliError> {
    Ok(consensus_run(&inst.aug, &inst.real, &inst.simulation_config(), &inst.config.horizons)?)
}

/// Columns `t, z_p, z_o_1..N, avg_z_o_1..N`, every `stride`-th sample plus
/// the last one.
pub fn write_csv(ts: &TimeSeries, path: &Path, stride: usize) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let n = ts.n_observers();
    let mut header = vec!["t".to_string(), "z_p".to_string()];
    header.extend((1..=n).map(|i| format!("z_o_{i}")));
    header.extend((1..=n).map(|i| format!("avg_z_o_{i}")));
    let io = |e: csv::Error| CliError::io(path, e.into());
    w.write_record(&header).map_err(io)?;
    let last = ts.len().saturating_sub(1);
    let mut record = Vec::with_capacity(2 + 2 * n);
    for k in (0..ts.len()).filter(|k| k % stride == 0 || *k == last) {
        record.clear();
        record.push(format!("{:.16e}", ts.times[k]));
        record.push(format!("{:.16e}", ts.z_p[k]));
        record.extend(ts.z_o[k].iter().map(|v| format!("{v:.16e}")));
        record.extend(ts.running_avg_z_o[k].iter().map(|v| format!("{v:.16e}")));
        w.write_record(&record).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

/// JSON to `out`, or to standard output.
pub fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepParam {
    /// 1-based gain index.
    Mu(usize),
}

impl SweepParam {
    pub fn parse(name: &str, n: usize) -> Result<Self, CliError> {
        let idx = name
            .strip_prefix("mu_")
            .and_then(|k| k.parse::<usize>().ok())
            .ok_or_else(|| CliError::Usage(format!("unknown sweep parameter `{name}` (expected mu_1..mu_{n})")))?;
        if idx == 0 || idx > n {
            return Err(CliError::Usage(format!("sweep parameter `{name}` out of range for N = {n}")));
        }
        Ok(SweepParam::Mu(idx))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub avg_constant: f64,
    pub consensus_error: f64,
    pub passed: bool,
}

/// Config with one gain replaced; the chain is rewritten in gain form.
pub fn swept_config(config: &ExperimentConfig, param: SweepParam, value: f64) -> Result<ExperimentConfig, CliError> {
    let mut mu = match config.chain_spec()? {
        ChainSpec::Gains(mu) => mu,
        ChainSpec::Cavities { mu_1, kappas } => gains_from_kappas(&ChainParams::new(mu_1, kappas)?),
    };
    let SweepParam::Mu(i) = param;
    mu[i - 1] = value;
    let mut cfg = config.clone();
    cfg.chain = crate::config::ChainConfig { mu: Some(mu), mu_1: None, kappas: None };
    Ok(cfg)
}

pub fn sweep_row(config: &ExperimentConfig, param: SweepParam, value: f64) -> Result<SweepRow, CliError> {
    let inst = Instance::build(&swept_config(config, param, value)?)?;
    let (rep, _) = simulate(&inst)?;
    let last = *inst.config.horizons.last().expect("validated");
    Ok(SweepRow {
        value,
        lambda_min: rep.certificate.lambda_min,
        lambda_max: rep.certificate.lambda_max,
        avg_constant: rep.certificate.avg_constant,
        consensus_error: rep.max_error_at(last).unwrap_or(f64::NAN),
        passed: rep.passed,
    })
}

pub fn write_sweep_csv(rows: &[SweepRow], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::io(Path::new("<sweep>"), e.into());
    w.write_record(["value", "lambda_min", "lambda_max", "avg_constant", "consensus_error", "passed"]).map_err(io)?;
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.value),
            format!("{:.16e}", r.lambda_min),
            format!("{:.16e}", r.lambda_max),
            format!("{:.16e}", r.avg_constant),
            format!("{:.16e}", r.consensus_error),
            r.passed.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(Path::new("<sweep>"), e))
}
