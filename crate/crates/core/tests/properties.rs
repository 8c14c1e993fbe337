use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;

use skqd::bounds::{chebyshev_filter, failure_bound, filter_bound, sparsity_shift};
use skqd::fermion::{
    build_siam_position, one_rdm, BasisRotation, DeterminantSector, SectorHamiltonian, SiamParams,
};
use skqd::krylov::{assemble_pairwise, assemble_toeplitz, solve_gevp};
use skqd::linalg::{expm_multiply, seeded_unit_vector, to_dense, ExpmvOptions};
use skqd::propagate::{born_sample, krylov_states, EvolutionMethod, EvolutionPlan};
use skqd::spin::build_tfim_open;
use skqd::sqd::{collect_samples, SampleSet, SubspaceProblem};
use skqd::state::{format_bits, parse_bits};
use skqd::{spectrum_summary, Basis, Hamiltonian, SpectrumLimits, StateVector, C64};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

fn random_state(basis: Basis, seed: u64) -> StateVector {
    let dim = basis.dim();
    StateVector::new(basis, seeded_unit_vector(dim, seed)).unwrap()
}

/// Orthogonal matrix from the QR factor of a seeded random matrix.
fn random_rotation(n: usize, seed: u64) -> BasisRotation {
    let v = seeded_unit_vector(n * n, seed);
    let m = DMatrix::from_fn(n, n, |r, c| v[r * n + c].re);
    BasisRotation::new(m.qr().q()).unwrap()
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn bitstrings_round_trip(bits in any::<u64>(), n in 1usize..=64) {
        let masked = if n == 64 { bits } else { bits & ((1u64 << n) - 1) };
        prop_assert_eq!(parse_bits(&format_bits(masked, n)).unwrap(), (masked, n));
    }

    #[test]
    fn tfim_is_hermitian(n in 2usize..=6, h1 in -2.0f64..2.0, h2 in -2.0f64..2.0) {
        let h = build_tfim_open(n, h1, h2).unwrap();
        let m = to_dense(&h);
        prop_assert!((&m - m.adjoint()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn krylov_matrices_are_toeplitz_and_variational(
        n in 3usize..=6, h1 in 0.05f64..1.5, h2 in 0.0f64..1.0, d in 1usize..=8, dt in 0.05f64..1.0,
    ) {
        let h = build_tfim_open(n, h1, h2).unwrap();
        let e0 = spectrum_summary(&h, &SpectrumLimits::default()).unwrap().e0;
        let psi0 = StateVector::basis_state(Basis::spin(n), 0).unwrap();
        let plan = EvolutionPlan::new(dt, d, EvolutionMethod::ExactEigen).unwrap();
        let states = krylov_states(&h, &psi0, &plan).unwrap();
        prop_assert!(states.iter().all(|v| (v.norm() - 1.0).abs() < 1e-10));
        let t = assemble_toeplitz(&h, &states).unwrap();
        let p = assemble_pairwise(&h, &states).unwrap();
        prop_assert!(t.hermiticity_defect() < 1e-12);
        prop_assert!(p.toeplitz_defect() < 1e-10);
        prop_assert!((&t.s - &p.s).iter().all(|z| z.norm() < 1e-10));
        let sol = solve_gevp(&t, 1e-10).unwrap();
        prop_assert!(sol.energy >= e0 - 1e-9);
    }

    #[test]
    fn sampled_subspaces_are_variational_and_nested(n in 3usize..=7, h1 in 0.05f64..1.0, m in 1usize..200, seed in any::<u64>()) {
        let h = build_tfim_open(n, h1, 0.2).unwrap();
        let e0 = spectrum_summary(&h, &SpectrumLimits::default()).unwrap().e0;
        let psi0 = StateVector::basis_state(Basis::spin(n), 0).unwrap();
        let plan = EvolutionPlan::new(0.4, 5, EvolutionMethod::ExactEigen).unwrap();
        let states = krylov_states(&h, &psi0, &plan).unwrap();
        let samples = collect_samples(&states, m, seed).unwrap();
        prop_assert_eq!(samples.total(), (m * states.len()) as u64);
        let support = samples.support();
        let half = SubspaceProblem::build(&h, support[..support.len().div_ceil(2)].to_vec()).unwrap();
        let full = SubspaceProblem::build(&h, support).unwrap();
        prop_assert!(full.energy <= half.energy + 1e-12);
        prop_assert!(full.energy >= e0 - 1e-9);
    }

    #[test]
    fn sample_sets_round_trip_through_tsv(n in 1usize..=20, draws in prop::collection::vec((any::<u64>(), 1u64..50), 1..30)) {
        let mut s = SampleSet::new(n).unwrap();
        for (b, c) in draws {
            s.add(b & ((1u64 << n) - 1), c).unwrap();
        }
        let back = SampleSet::read_tsv(s.to_tsv().as_bytes()).unwrap();
        prop_assert_eq!(back.counts(), s.counts());
        prop_assert_eq!(back.n_bits(), n);
    }

    #[test]
    fn born_sampling_conserves_shots(n in 1usize..=6, m in 0usize..500, seed in any::<u64>()) {
        let v = random_state(Basis::spin(n), seed);
        let counts = born_sample(&v, m, seed, 3).unwrap();
        prop_assert_eq!(counts.values().sum::<u64>(), m as u64);
        prop_assert!(counts.keys().all(|&b| b < (1u64 << n)));
    }

    #[test]
    fn evolution_is_unitary_and_composes(n in 2usize..=6, t1 in -2.0f64..2.0, t2 in -2.0f64..2.0, seed in any::<u64>()) {
        let h = build_tfim_open(n, 0.7, 0.3).unwrap();
        let v = random_state(Basis::spin(n), seed);
        let opts = ExpmvOptions { tol: 1e-13, ..Default::default() };
        let a = expm_multiply(&h, v.amplitudes(), t1, &opts).unwrap();
        let b = expm_multiply(&h, &a, t2, &opts).unwrap();
        let c = expm_multiply(&h, v.amplitudes(), t1 + t2, &opts).unwrap();
        let norm: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-10);
        prop_assert!(b.iter().zip(&c).all(|(x, y)| (x - y).norm() < 1e-9));
    }

    #[test]
    fn filter_is_normalized_and_bounded(a in 0.05f64..1.5, dp in 1usize..=60, theta in -std::f64::consts::PI..std::f64::consts::PI) {
        prop_assert_eq!(chebyshev_filter(0.0, a, dp).unwrap(), 1.0);
        let p = chebyshev_filter(theta, a, dp).unwrap();
        prop_assert!(p.is_finite());
        if theta.abs() >= a {
            prop_assert!(p.abs() <= filter_bound(a, dp) + 1e-12);
        }
    }

    #[test]
    fn failure_bounds_are_ordered(l in 1usize..100, p in 0.0f64..1.0, m in 0u64..10_000) {
        let f = failure_bound(l, p, m);
        prop_assert!(f.tight <= f.loose.min(1.0) + 1e-15);
        prop_assert!((0.0..=1.0).contains(&f.tight));
        prop_assert!(failure_bound(l, p, m + 1).tight <= f.tight);
    }

    #[test]
    fn sparsity_shift_moves_both_equally(alpha in 0.0f64..1.0, beta in 0.0f64..1.0, e in 0.0f64..2.0) {
        let s = sparsity_shift(alpha, beta, e);
        prop_assert!(((alpha - s.alpha) - (beta - s.beta)).abs() < 1e-15);
        prop_assert!(s.alpha <= alpha && s.beta <= beta);
        prop_assert_eq!(s.negative, s.alpha < 0.0 || s.beta < 0.0);
    }
}

proptest! {
    #![proptest_config(cases(6))]

    #[test]
    fn orbital_rotations_preserve_the_spectrum(u in 0.0f64..6.0, seed in any::<u64>()) {
        let ham = build_siam_position(&SiamParams::symmetric(3, u)).unwrap();
        let sector = Arc::new(DeterminantSector::half_filling(ham.n_modes()).unwrap());
        let rotated = ham.rotate(&random_rotation(ham.n_modes(), seed)).unwrap();
        let a = to_dense(&SectorHamiltonian::new(ham, sector.clone()).unwrap()).symmetric_eigenvalues();
        let b = to_dense(&SectorHamiltonian::new(rotated, sector).unwrap()).symmetric_eigenvalues();
        let mut a: Vec<f64> = a.iter().copied().collect();
        let mut b: Vec<f64> = b.iter().copied().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        prop_assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
    }

    #[test]
    fn one_rdm_has_fixed_trace_and_bounded_occupations(n_up in 0usize..=4, n_down in 0usize..=4, seed in any::<u64>()) {
        let sector = Arc::new(DeterminantSector::new(4, n_up, n_down).unwrap());
        let v = random_state(Basis::Sector(sector), seed);
        let rdm = one_rdm(&v).unwrap();
        prop_assert!((rdm.trace() - (n_up + n_down) as f64).abs() < 1e-10);
        prop_assert!(rdm.occupations().iter().all(|&x| (-1e-10..=2.0 + 1e-10).contains(&x)));
    }
}

#[test]
fn expectation_is_real_for_complex_states() {
    let h = build_tfim_open(4, 0.5, 0.5).unwrap();
    let amps: Vec<C64> = (0..16)
        .map(|i| C64::from_polar(0.25, i as f64 * 0.7))
        .collect();
    let v = StateVector::new(Basis::spin(4), amps).unwrap();
    let hv = h.apply(&v).unwrap();
    assert!(v.inner(&hv).unwrap().im.abs() < 1e-12);
}
