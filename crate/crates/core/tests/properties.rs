use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use qchain_core::analysis::{
    build_ro, chain_null_direction_real, chain_sum_of_squares, check_positive_definite, complex_embedding,
    exp_norm_bound, hermitian_form, hermitian_reduce, lemma_split,
};
use qchain_core::flow::{expm, HamiltonianFlow};
use qchain_core::linalg::{j2, mat_pow, max_abs, spectral_norm};
use qchain_core::observer::{
    assemble_augmented, build_observer, build_observer_with_detunings, consensus_readout, detunings_from_gains,
    steady_residual, steady_vector, PlantSpec,
};
use qchain_core::system::{
    commutation_residual, drift_from_hamiltonian, hamiltonian_from_drift, SymplecticForm,
};

fn gains(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3..=10.0f64, 1..=max_n)
}

fn alpha() -> impl Strategy<Value = [f64; 2]> {
    (0.0..std::f64::consts::TAU, 0.1..5.0f64).prop_map(|(th, r)| [r * th.cos(), r * th.sin()])
}

fn symmetric(max_modes: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max_modes).prop_flat_map(|m| {
        let n = 2 * m;
        prop::collection::vec(-2.0..2.0f64, n * n).prop_map(move |v| {
            let m = DMatrix::from_vec(n, n, v);
            (&m + m.transpose()) * 0.5
        })
    })
}

fn positive_definite(max_modes: usize) -> impl Strategy<Value = DMatrix<f64>> {
    symmetric(max_modes).prop_map(|s| {
        let n = s.nrows();
        &s * &s + DMatrix::identity(n, n) * 0.2
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_round_trip(r in symmetric(6)) {
        let form = SymplecticForm::for_dim(r.nrows()).unwrap();
        let a = drift_from_hamiltonian(&r, &form).unwrap();
        let back = hamiltonian_from_drift(&a, &form).unwrap();
        prop_assert!(max_abs(&(back - &r)) < 1e-12);
    }

    #[test]
    fn commutation_preserved(r in symmetric(6), t in 0.0..50.0f64) {
        let form = SymplecticForm::for_dim(r.nrows()).unwrap();
        let a = drift_from_hamiltonian(&r, &form).unwrap();
        let scale = expm(&(&a * t)).norm().powi(2).max(1.0);
        prop_assert!(commutation_residual(&a, &form, t) < 1e-8 * scale);
    }

    #[test]
    fn energy_conserved(r in positive_definite(5), t in 0.0..100.0f64, seed in any::<u64>()) {
        let n = r.nrows();
        let x0 = DVector::from_fn(n, |i, _| ((seed >> (i % 60)) & 0xff) as f64 / 128.0 - 1.0 + 0.01);
        let form = SymplecticForm::for_dim(n).unwrap();
        let x = HamiltonianFlow::new(&r, &form).unwrap().apply(t, &x0);
        let (e0, e1) = (x0.dot(&(&r * &x0)), x.dot(&(&r * &x)));
        prop_assert!((e1 - e0).abs() <= 1e-9 * e0.abs());
    }

    #[test]
    fn exp_bound_for_any_positive_hamiltonian(r in positive_definite(4), t in 0.0..30.0f64) {
        let form = SymplecticForm::for_dim(r.nrows()).unwrap();
        prop_assert!(exp_norm_bound(&r, &form, &[t]).unwrap().passed);
    }

    #[test]
    fn chain_hamiltonian_positive(mu in gains(16)) {
        let ro = build_ro(&mu, &detunings_from_gains(&mu)).unwrap();
        let pd = check_positive_definite(ro.matrix());
        prop_assert!(pd.is_pd && pd.lambda_min > 0.0);
        prop_assert!(lemma_split(&hermitian_reduce(&ro)).is_ok());
    }

    #[test]
    fn chain_drift_is_realizable(mu in gains(16)) {
        let omega = detunings_from_gains(&mu);
        let ro = build_ro(&mu, &omega).unwrap();
        let real = build_observer(&PlantSpec::new([1.0, 0.0]).unwrap(), &mu).unwrap();
        let a = drift_from_hamiltonian(ro.matrix(), &ro.form()).unwrap();
        prop_assert!(max_abs(&(a - &real.a_o)) < 1e-13);
    }

    #[test]
    fn quadratic_forms_match(mu in gains(8), xs in prop::collection::vec(-3.0..3.0f64, 16)) {
        let ro = build_ro(&mu, &detunings_from_gains(&mu)).unwrap();
        let n = 2 * mu.len();
        let x = DVector::from_iterator(n, xs.into_iter().cycle().take(n));
        let real = x.dot(&(ro.matrix() * &x));
        let cplx = hermitian_form(&hermitian_reduce(&ro).matrix, &complex_embedding(&x));
        prop_assert!((real - cplx.re).abs() <= 1e-12 * real.abs().max(1.0));
    }

    #[test]
    fn sum_of_squares(mu in gains(8), re in prop::collection::vec(-2.0..2.0f64, 8), im in prop::collection::vec(-2.0..2.0f64, 8)) {
        let ro = build_ro(&mu, &detunings_from_gains(&mu)).unwrap();
        let red = hermitian_reduce(&ro);
        let a = DVector::from_fn(mu.len(), |i, _| Complex64::new(re[i], im[i]));
        let direct = hermitian_form(&red.chain_part, &a).re;
        prop_assert!((direct - chain_sum_of_squares(&mu, &a)).abs() < 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn readout_is_all_ones(mu in gains(16), a in alpha()) {
        let real = build_observer(&PlantSpec::new(a).unwrap(), &mu).unwrap();
        let ones = consensus_readout(&real).unwrap();
        prop_assert!(ones.iter().all(|v| (v - 1.0).abs() < 1e-12));
        for i in 0..real.n() {
            let row = real.c_o.view((i, 2 * i), (1, 2)).clone_owned();
            let alpha = DMatrix::from_column_slice(2, 1, &a);
            let on = (&row * mat_pow(&j2(), i % 4) * &alpha)[(0, 0)];
            let off = (&row * mat_pow(&j2(), (i + 1) % 4) * &alpha)[(0, 0)];
            prop_assert!((on - 1.0).abs() < 1e-12 && off.abs() < 1e-12);
            prop_assert!((real.c_o.row(i).norm() - 1.0 / alpha.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn steady_vector_is_stationary(mu in gains(16), a in alpha(), z in -3.0..3.0f64) {
        let real = build_observer(&PlantSpec::new(a).unwrap(), &mu).unwrap();
        prop_assert!(steady_vector(&real, z).is_ok());
    }

    #[test]
    fn detuning_rule_is_necessary(mu in gains(8), k in 0usize..8, sign in prop::bool::ANY) {
        let k = k % mu.len();
        let mut omega = detunings_from_gains(&mu);
        omega[k] += if sign { 1e-3 } else { -1e-3 };
        let real = build_observer_with_detunings(&PlantSpec::new([1.0, 0.0]).unwrap(), &mu, &omega).unwrap();
        let st = steady_residual(&real, 1.0);
        prop_assert!(st.residual > 1e-4);
        prop_assert!(steady_vector(&real, 1.0).is_err());
    }

    #[test]
    fn augmented_plant_output_constant(mu in gains(6), a in alpha()) {
        let real = build_observer(&PlantSpec::new(a).unwrap(), &mu).unwrap();
        let aug = assemble_augmented(&real).unwrap();
        let drift_of_zp = &aug.c_p_row * &aug.a_a;
        prop_assert!(max_abs(&drift_of_zp) < 1e-12);
    }
}

#[test]
fn vanishing_plant_gain_null_space() {
    for n in 1..=16 {
        let mut mu: Vec<f64> = (0..n).map(|i| 0.5 + 0.37 * i as f64).collect();
        mu[0] = 0.0;
        let ro = build_ro(&mu, &detunings_from_gains(&mu)).unwrap();
        let pd = check_positive_definite(ro.matrix());
        assert!(pd.lambda_min.abs() < 1e-10, "N = {n}");
        let eig = nalgebra::SymmetricEigen::new(ro.matrix().clone());
        let null: Vec<usize> = (0..2 * n).filter(|&i| eig.eigenvalues[i].abs() < 1e-10).collect();
        assert_eq!(null.len(), 2, "N = {n}");
        let basis = DMatrix::from_columns(&null.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
        let target = chain_null_direction_real(n).normalize();
        let target = nalgebra::linalg::QR::new(target).q();
        let sines = (&target - &basis * (basis.transpose() * &target)).norm();
        assert!(sines < 1e-8, "N = {n}: {sines:e}");
    }
}

#[test]
fn spectral_bound_matches_golden_ratio() {
    let ro = build_ro(&[1.0, 1.0], &[2.0, 1.0]).unwrap();
    let rep = exp_norm_bound(ro.matrix(), &ro.form(), &[0.1, 1.0, 10.0, 100.0]).unwrap();
    assert!((rep.bound - 2.618034).abs() < 1e-6);
    assert!(rep.samples.iter().all(|s| s.norm <= rep.bound * (1.0 + 1e-9)));
    assert!(rep.samples.iter().all(|s| (spectral_norm(&expm(&(ro.form().matrix() * ro.matrix() * (2.0 * s.t)))) - s.norm).abs() < 1e-9));
}
