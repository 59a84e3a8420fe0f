//! Randomized invariants of the linear algebra, states, distances and detectors.

use proptest::prelude::*;

use mqcb::chernoff::{chernoff_distance, chernoff_distance_sampled, mqcb, PairwiseChernoff};
use mqcb::detectors::{holevo_helstrom, pgm, wedge, compose_with_binary};
use mqcb::evaluation::{error_sum, exponent_estimate, ExponentFit};
use mqcb::linalg::{
    eigh, eigh_jacobi, eigh_tridiagonal, matrix_power, positive_part, sqrt_psd, support_projection,
    trace_norm, Complex64, ComplexMatrix,
};
use mqcb::rng::SeededRng;
use mqcb::states::{density_from_matrix, random_density, DensityMatrix, Ensemble};

fn random_hermitian(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = SeededRng::new(seed);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let z = if i == j {
                Complex64::new(rng.normal_pair().0, 0.0)
            } else {
                rng.complex_normal()
            };
            m.data_mut()[i * dim + j] = z;
            m.data_mut()[j * dim + i] = z.conj();
        }
    }
    m
}

fn random_psd(dim: usize, rank: usize, seed: u64) -> ComplexMatrix {
    random_density(dim, rank, seed).unwrap().into_matrix().scale(dim as f64)
}

fn max_offdiag_identity(m: &ComplexMatrix) -> f64 {
    m.max_abs_diff(&ComplexMatrix::identity(m.rows()))
}

fn qubit(seed: u64, rank: usize) -> DensityMatrix {
    random_density(2, rank, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigh_reconstructs_and_is_orthonormal(dim in 1usize..48, seed in any::<u64>()) {
        let h = random_hermitian(dim, seed);
        let eig = eigh(&h).unwrap();
        let residual = eig.reconstruct().try_sub(&h).unwrap().frobenius_norm();
        prop_assert!(residual / (1.0 + h.frobenius_norm()) <= 1e-9);
        let v = &eig.eigenvectors;
        prop_assert!(max_offdiag_identity(&v.adjoint().matmul(v).unwrap()) <= 1e-10);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn both_eigensolvers_agree(dim in 2usize..24, seed in any::<u64>()) {
        let h = random_hermitian(dim, seed);
        let a = eigh_jacobi(&h).unwrap();
        let b = eigh_tridiagonal(&h).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn matrix_power_is_additive(dim in 1usize..6, rank in 1usize..6, seed in any::<u64>(),
                                s in 0.0f64..=1.0, t in 0.0f64..=1.0) {
        let rank = rank.min(dim);
        let a = random_psd(dim, rank, seed);
        prop_assert!(matrix_power(&a, 1.0).unwrap().max_abs_diff(&a) <= 1e-10);
        let lhs = matrix_power(&a, s).unwrap().matmul(&matrix_power(&a, t).unwrap()).unwrap();
        let rhs = matrix_power(&a, s + t).unwrap();
        // Exponent zero gives the support projection, so the identity holds on the support.
        let p = support_projection(&a).unwrap();
        let lhs = p.matmul(&lhs).unwrap().matmul(&p).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-8);
    }

    #[test]
    fn positive_parts_decompose(dim in 1usize..10, seed in any::<u64>()) {
        let a = random_hermitian(dim, seed);
        let plus = positive_part(&a).unwrap();
        let minus = positive_part(&a.scale(-1.0)).unwrap();
        prop_assert!(plus.try_sub(&minus).unwrap().max_abs_diff(&a) <= 1e-10);
        prop_assert!(plus.matmul(&minus).unwrap().max_abs() <= 1e-10 * (1.0 + a.max_abs()).powi(2));
    }

    #[test]
    fn square_root_squares_back(dim in 1usize..10, rank in 1usize..10, seed in any::<u64>()) {
        let a = random_psd(dim, rank.min(dim), seed);
        let root = sqrt_psd(&a).unwrap();
        prop_assert!(root.matmul(&root).unwrap().max_abs_diff(&a) <= 1e-9);
    }

    #[test]
    fn kron_is_associative(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, dc in 1usize..4) {
        let a = random_hermitian(da, seed);
        let b = random_hermitian(db, seed.wrapping_add(1));
        let c = random_hermitian(dc, seed.wrapping_add(2));
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        prop_assert!(left.max_abs_diff(&right) <= 1e-12 * (1.0 + left.max_abs()));
    }

    #[test]
    fn random_states_are_valid_and_reproducible(dim in 1usize..6, rank in 1usize..6, seed in any::<u64>()) {
        let rank = rank.min(dim);
        let rho = random_density(dim, rank, seed).unwrap();
        prop_assert_eq!(&rho, &random_density(dim, rank, seed).unwrap());
        prop_assert!(density_from_matrix(rho.matrix().clone()).is_ok());
        let eig = eigh(rho.matrix()).unwrap();
        let support = eig.eigenvalues.iter().filter(|&&x| x > 1e-12).count();
        prop_assert_eq!(support, rank);
    }

    #[test]
    fn tensor_powers_split(seed in any::<u64>(), a in 1usize..4, b in 1usize..4) {
        let rho = qubit(seed, 2);
        let whole = rho.tensor_power(a + b, 4096).unwrap();
        let parts = rho.tensor_power(a, 4096).unwrap().matrix().kron(rho.tensor_power(b, 4096).unwrap().matrix());
        prop_assert!(whole.matrix().max_abs_diff(&parts) <= 1e-12);
    }

    #[test]
    fn product_elements_factorize(seed in any::<u64>(), n1 in 1usize..3, n2 in 1usize..3) {
        let rho = qubit(seed, 2);
        let a = random_psd(1 << n1, 1 << n1, seed.wrapping_add(10));
        let b = random_psd(1 << n2, 1 << n2, seed.wrapping_add(11));
        let joint = rho.tensor_power(n1 + n2, 4096).unwrap().matrix().trace_product(&a.kron(&b)).unwrap();
        let left = rho.tensor_power(n1, 4096).unwrap().matrix().trace_product(&a).unwrap();
        let right = rho.tensor_power(n2, 4096).unwrap().matrix().trace_product(&b).unwrap();
        prop_assert!((joint - left * right).norm() <= 1e-12 * (1.0 + joint.norm()));
    }

    #[test]
    fn chernoff_is_symmetric_and_nonnegative(s1 in any::<u64>(), s2 in any::<u64>(),
                                              r1 in 1usize..=3, r2 in 1usize..=3) {
        let rho1 = random_density(3, r1, s1).unwrap();
        let rho2 = random_density(3, r2, s2).unwrap();
        let ab = chernoff_distance(&rho1, &rho2).unwrap();
        let ba = chernoff_distance(&rho2, &rho1).unwrap();
        prop_assert!(ab.xi >= 0.0);
        if ab.xi.is_finite() {
            prop_assert!((ab.xi - ba.xi).abs() <= 1e-9);
        } else {
            prop_assert!(ba.xi.is_infinite());
        }
        prop_assert!(chernoff_distance(&rho1, &rho1).unwrap().xi <= 1e-8);
    }

    #[test]
    fn chernoff_curve_is_midpoint_convex(s1 in any::<u64>(), s2 in any::<u64>()) {
        let res = chernoff_distance_sampled(&qubit(s1, 2), &qubit(s2, 2), 101).unwrap();
        let f: Vec<f64> = res.curve_samples.unwrap().iter().map(|&(_, f)| f).collect();
        for i in 0..f.len() {
            for j in (i + 2..f.len()).step_by(2) {
                prop_assert!(f[(i + j) / 2] <= (f[i] + f[j]) / 2.0 + 1e-9);
            }
        }
        prop_assert!(f.iter().all(|&v| v >= res.f_min - 1e-9));
    }

    #[test]
    fn mqcb_is_the_smallest_pair(seed in any::<u64>(), r in 2usize..5) {
        let states: Vec<DensityMatrix> = (0..r as u64).map(|k| qubit(seed.wrapping_add(k), 2)).collect();
        let ensemble = Ensemble::new(states).unwrap();
        let m = mqcb(&ensemble).unwrap();
        let pw = PairwiseChernoff::compute(&ensemble).unwrap();
        for (i, j) in pw.pairs() {
            prop_assert!(m.value <= pw.xi(i, j));
        }
        prop_assert_eq!(m.value, pw.xi(m.pair.0, m.pair.1));
    }

    #[test]
    fn helstrom_is_a_projective_optimum(s1 in any::<u64>(), s2 in any::<u64>(), dim in 2usize..4) {
        let rho1 = random_density(dim, dim, s1).unwrap();
        let rho2 = random_density(dim, dim, s2).unwrap();
        let hh = holevo_helstrom(&rho1, &rho2).unwrap();
        prop_assert!(hh.validity().unwrap().is_valid());
        prop_assert!(hh.projection_defect().unwrap() <= 1e-9);
        let diff = rho1.matrix().try_sub(rho2.matrix()).unwrap();
        let expected = 1.0 - trace_norm(&diff).unwrap() / 2.0;
        prop_assert!((wedge(&rho1, &rho2).unwrap().trace().re - expected).abs() <= 1e-10);
        let err = hh.error_sum(&[rho1, rho2]).unwrap();
        prop_assert!((err - expected).abs() <= 1e-10);
    }

    #[test]
    fn composition_keeps_its_invariants(seed in any::<u64>(), u in 0.05f64..0.95) {
        let rho1 = qubit(seed, 2);
        let rho2 = qubit(seed.wrapping_add(1), 1);
        let partial = qubit(seed.wrapping_add(2), 2).into_matrix().scale(u);
        let hh = holevo_helstrom(&rho1, &rho2).unwrap();
        let (det, trace) = compose_with_binary(std::slice::from_ref(&partial), &hh).unwrap();
        prop_assert!(det.validity().unwrap().is_valid());
        prop_assert!(trace.r_squared_holds());
        let sum12 = det.element(0).try_add(det.element(1)).unwrap();
        prop_assert!(sum12.max_abs_diff(&trace.q) <= 1e-9);
    }

    #[test]
    fn errors_and_successes_add_to_the_count(seed in any::<u64>(), r in 2usize..5, n in 1usize..3) {
        let states: Vec<DensityMatrix> = (0..r as u64).map(|k| qubit(seed.wrapping_add(k), 2)).collect();
        let ensemble = Ensemble::new(states).unwrap();
        let powered = ensemble.tensor_powers(n, 4096).unwrap();
        let det = pgm(&powered).unwrap();
        prop_assert!(det.validity().unwrap().is_valid());
        let rep = error_sum(&ensemble, n, &det, 4096).unwrap();
        prop_assert!((rep.err_sm + rep.succ_sm - r as f64).abs() <= 1e-9);
    }

    #[test]
    fn exponent_fit_recovers_exact_slopes(rate in 0.01f64..2.0, offset in -1.0f64..1.0) {
        let rows: Vec<(usize, f64)> = (1..=8).map(|n| (n, (offset - rate * n as f64).exp())).collect();
        let series = exponent_estimate(&rows, 4).unwrap();
        match series.fit {
            ExponentFit::Slope { slope, points } => {
                prop_assert_eq!(points, 4);
                prop_assert!((slope - rate).abs() <= 1e-9);
            }
            other => prop_assert!(false, "unexpected fit {:?}", other),
        }
    }
}
