use mqcb::detectors::{
    binary_error_sum, build_split_detector, compose_with_binary, holevo_helstrom, pgm,
    recursive_detector, wedge, Detector, SubDetectorStrategy,
};
use mqcb::linalg::{eigvalsh, Complex64, ComplexMatrix};
use mqcb::states::{classical_state, density_from_matrix, pure_state, random_density, DensityMatrix, Ensemble};
use mqcb::Error;

const CAP: usize = 4096;

fn basis(d: usize, k: usize) -> DensityMatrix {
    let mut p = vec![0.0; d];
    p[k] = 1.0;
    classical_state(&p).unwrap()
}

fn helstrom_error_oracle(rho1: &DensityMatrix, rho2: &DensityMatrix) -> f64 {
    let diff = rho1.matrix().try_sub(rho2.matrix()).unwrap();
    1.0 - eigvalsh(&diff).unwrap().iter().map(|x| x.abs()).sum::<f64>() / 2.0
}

/// A random qubit state placed in the top-left block of a qutrit.
fn embedded_qubit(seed: u64) -> DensityMatrix {
    let q = random_density(2, 2, seed).unwrap();
    let mut m = ComplexMatrix::zeros(3, 3);
    for i in 0..2 {
        for j in 0..2 {
            m.data_mut()[i * 3 + j] = q.matrix().data()[i * 2 + j];
        }
    }
    density_from_matrix(m).unwrap()
}

#[test]
fn helstrom_matches_trace_norm_on_random_pairs() {
    for seed in 0..100u64 {
        let rank = 1 + (seed % 2) as usize;
        let rho1 = random_density(2, rank, 2 * seed).unwrap();
        let rho2 = random_density(2, 2, 2 * seed + 1).unwrap();
        let hh = holevo_helstrom(&rho1, &rho2).unwrap();
        let expected = helstrom_error_oracle(&rho1, &rho2);
        assert!((binary_error_sum(&rho1, &rho2, &hh).unwrap() - expected).abs() <= 1e-10);
        assert!((wedge(&rho1, &rho2).unwrap().trace().re - expected).abs() <= 1e-10);
        assert!(hh.projection_defect().unwrap() <= 1e-9);
    }
}

#[test]
fn helstrom_rejects_mismatched_dimensions() {
    let err = holevo_helstrom(&basis(2, 0), &basis(3, 0)).unwrap_err();
    assert!(matches!(err, Error::DimensionMismatch { .. }));
}

#[test]
fn wedge_of_equal_states_is_the_state() {
    let rho = random_density(3, 3, 4).unwrap();
    let w = wedge(&rho, &rho).unwrap();
    assert!(w.max_abs_diff(rho.matrix()) <= 1e-12);
    assert!((w.trace().re - 1.0).abs() <= 1e-12);
}

#[test]
fn wedge_of_orthogonal_pure_states_vanishes() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = pure_state(&[Complex64::new(s, 0.0), Complex64::new(s, 0.0)]).unwrap();
    let minus = pure_state(&[Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]).unwrap();
    assert!(wedge(&plus, &minus).unwrap().max_abs() <= 1e-12);
}

#[test]
fn pgm_is_within_twice_helstrom() {
    for seed in 0..50u64 {
        let rho1 = random_density(2, 2, 500 + 2 * seed).unwrap();
        let rho2 = random_density(2, 1, 501 + 2 * seed).unwrap();
        let states = [rho1.clone(), rho2.clone()];
        let g = pgm(&states).unwrap();
        assert!(g.validity().unwrap().is_valid());
        let err_pgm = g.error_sum(&states).unwrap();
        let err_hh = helstrom_error_oracle(&rho1, &rho2);
        assert!(err_pgm <= 2.0 * err_hh + 1e-12, "seed {seed}: {err_pgm} vs {err_hh}");
        assert!(err_pgm >= err_hh - 1e-12);
    }
}

#[test]
fn pgm_on_orthogonal_states_adds_the_kernel_share() {
    let states = [basis(3, 0), basis(3, 1)];
    let g = pgm(&states).unwrap();
    assert!(g.element(0).max_abs_diff(&ComplexMatrix::from_diag(&[1.0, 0.0, 0.5])) <= 1e-12);
    assert!(g.element(1).max_abs_diff(&ComplexMatrix::from_diag(&[0.0, 1.0, 0.5])) <= 1e-12);
    assert!(g.error_sum(&states).unwrap().abs() <= 1e-12);
}

#[test]
fn pgm_of_identical_states_is_uniform() {
    let rho = random_density(3, 2, 9).unwrap();
    let g = pgm(&[rho.clone(), rho.clone(), rho]).unwrap();
    let third = ComplexMatrix::identity(3).scale(1.0 / 3.0);
    for e in g.elements() {
        assert!(e.max_abs_diff(&third) <= 1e-10);
    }
}

#[test]
fn composing_with_zero_partials_gives_back_helstrom() {
    let rho1 = random_density(2, 2, 1).unwrap();
    let rho2 = random_density(2, 2, 2).unwrap();
    let hh = holevo_helstrom(&rho1, &rho2).unwrap();
    let (det, trace) = compose_with_binary(&[ComplexMatrix::zeros(2, 2)], &hh).unwrap();
    assert!(det.element(0).max_abs_diff(hh.element(0)) <= 1e-12);
    assert!(det.element(1).max_abs_diff(hh.element(1)) <= 1e-12);
    assert!(trace.r_squared_holds());
}

#[test]
fn composing_with_half_identity_halves_the_binary_test() {
    let hh = holevo_helstrom(&random_density(2, 2, 3).unwrap(), &random_density(2, 1, 4).unwrap()).unwrap();
    let half = ComplexMatrix::identity(2).scale(0.5);
    let (det, trace) = compose_with_binary(&[half], &hh).unwrap();
    assert!(det.element(0).max_abs_diff(&hh.element(0).scale(0.5)) <= 1e-12);
    assert!(det.element(1).max_abs_diff(&hh.element(1).scale(0.5)) <= 1e-12);
    assert!(trace.q.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) <= 1e-12);
    assert!(det.validity().unwrap().is_valid());
}

#[test]
fn composition_rejects_infeasible_partials() {
    let hh = holevo_helstrom(&basis(2, 0), &basis(2, 1)).unwrap();
    let identity = ComplexMatrix::identity(2);
    assert!(matches!(
        compose_with_binary(&[identity.clone()], &hh),
        Err(Error::PartialsEqualIdentity)
    ));
    assert!(matches!(
        compose_with_binary(&[identity.scale(0.7), identity.scale(0.7)], &hh),
        Err(Error::PartialsExceedIdentity { .. })
    ));
}

#[test]
fn split_detector_is_perfect_on_orthogonal_triples() {
    let ensemble = Ensemble::new((0..3).map(|k| basis(3, k)).collect()).unwrap();
    for strategy in [SubDetectorStrategy::Pgm, SubDetectorStrategy::Recursive] {
        let split = build_split_detector(&ensemble, 2, 0.5, strategy, CAP).unwrap();
        let powered = ensemble.tensor_powers(2, CAP).unwrap();
        assert!(split.detector.error_sum(&powered).unwrap().abs() <= 1e-9);
        assert_eq!((split.report.n1, split.report.n2), (1, 1));
    }
}

#[test]
fn split_detector_reduces_to_the_binary_term_when_the_third_state_is_orthogonal() {
    let ensemble = Ensemble::new(vec![embedded_qubit(21), embedded_qubit(22), basis(3, 2)]).unwrap();
    let split = build_split_detector(&ensemble, 2, 0.5, SubDetectorStrategy::Pgm, CAP).unwrap();
    let powered = ensemble.tensor_powers(2, CAP).unwrap();
    let err = split.detector.error_sum(&powered).unwrap();
    let expected = wedge(&powered[0], &powered[1]).unwrap().trace().re;
    assert!((err - expected).abs() <= 1e-9, "{err} vs {expected}");
    assert!(split.report.sub1_err_sm.abs() <= 1e-9);
    assert!(split.report.sub2_err_sm.abs() <= 1e-9);
}

#[test]
fn split_detector_respects_its_preconditions() {
    let ensemble = Ensemble::new((0..3).map(|k| random_density(2, 2, k).unwrap()).collect()).unwrap();
    assert!(matches!(
        build_split_detector(&ensemble, 1, 0.5, SubDetectorStrategy::Pgm, CAP),
        Err(Error::SplitTooSmall { .. })
    ));
    assert!(matches!(
        build_split_detector(&ensemble, 6, 0.5, SubDetectorStrategy::Pgm, 32),
        Err(Error::DimensionCapExceeded { .. })
    ));
}

#[test]
fn recursive_detector_on_two_states_is_helstrom() {
    let rho1 = random_density(2, 2, 31).unwrap();
    let rho2 = random_density(2, 2, 32).unwrap();
    let ensemble = Ensemble::new(vec![rho1.clone(), rho2.clone()]).unwrap();
    let det = recursive_detector(&ensemble, 3, 0.5, CAP).unwrap();
    let expected = holevo_helstrom(&rho1.tensor_power(3, CAP).unwrap(), &rho2.tensor_power(3, CAP).unwrap()).unwrap();
    assert_eq!(det, expected);
}

#[test]
fn recursive_split_on_three_states_uses_binary_sub_tests() {
    let states: Vec<DensityMatrix> = (0..3).map(|k| random_density(2, 2, 40 + k).unwrap()).collect();
    let ensemble = Ensemble::new(states.clone()).unwrap();
    let split = build_split_detector(&ensemble, 4, 0.5, SubDetectorStrategy::Recursive, CAP).unwrap();
    let p = |k: usize| states[k].tensor_power(2, CAP).unwrap();
    let sub1 = helstrom_error_oracle(&p(0), &p(2));
    let sub2 = helstrom_error_oracle(&p(1), &p(2));
    assert!((split.report.sub1_err_sm - sub1).abs() <= 1e-10);
    assert!((split.report.sub2_err_sm - sub2).abs() <= 1e-10);
}

#[test]
fn recursive_detector_on_four_qubits_is_valid() {
    let states: Vec<DensityMatrix> = (0..4).map(|k| random_density(2, 2, 60 + k).unwrap()).collect();
    let ensemble = Ensemble::new(states).unwrap();
    let det: Detector = recursive_detector(&ensemble, 4, 0.5, CAP).unwrap();
    assert_eq!(det.len(), 4);
    assert!(det.validity().unwrap().is_valid());
    let err = det.error_sum(&ensemble.tensor_powers(4, CAP).unwrap()).unwrap();
    assert!(err.is_finite() && (0.0..=4.0).contains(&err));
}
