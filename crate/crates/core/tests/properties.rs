mod common;

use openmap::analysis::{discord, g2_series, Measured};
use openmap::dynamics::{evolve, reduced, trajectory, TimeGrid};
use openmap::linalg::{c, eig_hermitian, kron, partial_trace, unitary_from_hamiltonian, Complex64, ComplexMatrix};
use openmap::maps::{
    closed_form_eigs, extract_map, reshuffle, reshuffle_matrix, template_tilted, unreshuffle, validate_supermatrix,
    SuperMatrixA,
};
use openmap::models::{fermion_hamiltonian, h_drift, h_effective, h_total, ModelParams, Topology};
use openmap::spin::{embed, pauli, state_of_bloch, Axis, BlochVector, DensityMatrix};
use openmap::states::{build_initial, catalogue, InitialStateSpec, StateFamily, TiltPartner};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
}

fn matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(complex(), n * n).prop_map(move |v| ComplexMatrix::from_row_major(n, n, &v).unwrap())
}

/// Gaussian-integer entries, so products are exact.
fn integer_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec((-8i32..8, -8i32..8), n * n).prop_map(move |v| {
        let v: Vec<Complex64> = v.into_iter().map(|(a, b)| c(a.into(), b.into())).collect();
        ComplexMatrix::from_row_major(n, n, &v).unwrap()
    })
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n).prop_map(|m| (&m + &m.adjoint()).scale_real(0.5))
}

fn bloch() -> impl Strategy<Value = BlochVector> {
    (0.0..=1.0f64, 0.0..std::f64::consts::PI, 0.0..2.0 * std::f64::consts::PI)
        .prop_map(|(len, th, ph)| BlochVector::new(len * th.sin() * ph.cos(), len * th.sin() * ph.sin(), len * th.cos()))
}

fn params() -> impl Strategy<Value = ModelParams> {
    (-10.0..10.0f64, -10.0..10.0f64, -6.0..6.0f64, 0.0..10.0f64)
        .prop_map(|(e, ek, v, j)| ModelParams::new(e, ek, v).with_j_zz(j))
}

fn topology() -> impl Strategy<Value = Topology> {
    prop_oneof![
        Just(Topology::Closed),
        Just(Topology::BathTwoOnQubit2),
        Just(Topology::BathOneOnBoth)
    ]
}

fn z_only_spec() -> impl Strategy<Value = InitialStateSpec> {
    prop_oneof![
        prop_oneof![Just("00"), Just("01"), Just("10"), Just("11")].prop_map(InitialStateSpec::pure),
        (0.0..std::f64::consts::PI).prop_map(|a| InitialStateSpec::entangled(a.cos(), a.sin())),
        (0.0..=1.0f64).prop_map(InitialStateSpec::mixture),
    ]
}

fn comm_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.commutator(b).max_abs()
}

proptest! {
    #[test]
    fn kron_is_associative(a in integer_matrix(2), b in integer_matrix(2), c in integer_matrix(2)) {
        prop_assert_eq!(kron(&kron(&a, &b), &c), kron(&a, &kron(&b, &c)));
    }

    #[test]
    fn partial_trace_of_product(a in matrix(2), b in matrix(4)) {
        let pt = partial_trace(&kron(&a, &b), 3, &[1]).unwrap();
        prop_assert!(pt.max_abs_diff(&a.scale(b.trace())) < 1e-12);
    }

    #[test]
    fn unitary_group_law(h in hermitian(4), t1 in -2.0..2.0f64, t2 in -2.0..2.0f64) {
        let u1 = unitary_from_hamiltonian(&h, t1).unwrap();
        let u2 = unitary_from_hamiltonian(&h, t2).unwrap();
        let u12 = unitary_from_hamiltonian(&h, t1 + t2).unwrap();
        prop_assert!((&u1 * &u2).max_abs_diff(&u12) < 1e-10);
    }

    #[test]
    fn eigenvalue_sum_is_trace(h in hermitian(4)) {
        let s: f64 = eig_hermitian(&h).unwrap().eigenvalues.iter().sum();
        prop_assert!((s - h.trace().re).abs() < 1e-12);
    }

    #[test]
    fn bloch_states_are_valid(a in bloch()) {
        let rho = state_of_bloch(&a).unwrap();
        prop_assert!(rho.check().passes(1e-12, 1e-12, 1e-10));
        prop_assert!((rho.purity() - 0.5 * (1.0 + a.norm() * a.norm())).abs() < 1e-12);
    }

    #[test]
    fn embedded_operators_on_distinct_sites_commute(a in hermitian(2), b in hermitian(2), i in 1usize..=4, j in 1usize..=4) {
        prop_assume!(i != j);
        let x = embed(&a, i, 4).unwrap();
        let y = embed(&b, j, 4).unwrap();
        prop_assert!(comm_norm(&x, &y) < 1e-12);
    }

    #[test]
    fn hamiltonians_are_hermitian(p in params(), topo in topology()) {
        prop_assert!(h_effective(&p).hermiticity_residual() < 1e-14);
        prop_assert!(h_drift(&p).hermiticity_residual() < 1e-14);
        prop_assert!(h_total(&p, topo).hermiticity_residual() < 1e-14);
        prop_assert!(fermion_hamiltonian(&p).hermiticity_residual() < 1e-14);
    }

    #[test]
    fn jordan_wigner_spectrum(p in params()) {
        let spin = eig_hermitian(&h_effective(&p)).unwrap().eigenvalues;
        let shift = 0.5 * (p.epsilon + p.varepsilon_k0);
        let fermi: Vec<f64> = eig_hermitian(&fermion_hamiltonian(&p)).unwrap().eigenvalues.iter().map(|e| e - shift).collect();
        prop_assert!(common::max_sorted_diff(&spin, &fermi) < 1e-12);
    }

    #[test]
    fn excitation_number_is_conserved(p in params()) {
        let n = &embed(&pauli(Axis::Z), 1, 2).unwrap() + &embed(&pauli(Axis::Z), 2, 2).unwrap();
        prop_assert!(comm_norm(&n, &h_effective(&p)) < 1e-12);
    }

    #[test]
    fn mixture_formula(p in 0.0..=1.0f64, a in bloch(), b in bloch(), c in bloch(), d in bloch()) {
        let spec = InitialStateSpec::new(StateFamily::Mixture { p, state_i: [a, b], state_ii: [c, d] });
        let rho = build_initial(&spec, Topology::Closed).unwrap();
        let s = |v: &BlochVector| state_of_bloch(v).unwrap().matrix().clone();
        let want = &kron(&s(&a), &s(&b)).scale_real(1.0 - p) + &kron(&s(&c), &s(&d)).scale_real(p);
        prop_assert!(rho.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn evolution_preserves_trace_and_purity(spec in z_only_spec(), p in params(), topo in topology(), t in 0.0..2.0f64) {
        let spec = spec.with_bath(topo.bath_qubits());
        let rho0 = build_initial(&spec, topo).unwrap();
        let out = evolve(&rho0, &h_total(&p, topo), t).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!((out.purity() - rho0.purity()).abs() < 1e-10);
    }

    #[test]
    fn z_only_inputs_stay_on_the_axis(spec in z_only_spec(), p in params(), topo in topology(), t in 0.0..2.0f64) {
        let spec = spec.with_bath(topo.bath_qubits());
        let out = evolve(&build_initial(&spec, topo).unwrap(), &h_total(&p, topo), t).unwrap();
        let red = reduced(&out, topo).unwrap();
        prop_assert!(red.matrix()[(0, 1)].norm() < 1e-10);
    }

    #[test]
    fn symmetric_bath_populations_ignore_coupling(spec in z_only_spec(), p in params(), j in 0.0..10.0f64, t in 0.0..2.0f64) {
        let spec = spec.with_bath(1);
        let rho0 = build_initial(&spec, Topology::BathOneOnBoth).unwrap();
        let a = reduced(&evolve(&rho0, &h_total(&p, Topology::BathOneOnBoth), t).unwrap(), Topology::BathOneOnBoth).unwrap();
        let b = reduced(&evolve(&rho0, &h_total(&p.with_j_zz(j), Topology::BathOneOnBoth), t).unwrap(), Topology::BathOneOnBoth).unwrap();
        prop_assert!((a.matrix()[(0, 0)] - b.matrix()[(0, 0)]).norm() < 1e-10);
    }

    #[test]
    fn reshuffle_round_trip(m in matrix(4)) {
        prop_assert_eq!(reshuffle_matrix(&reshuffle_matrix(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn unitary_channels_are_valid_maps(h in hermitian(2), t in -3.0..3.0f64) {
        let u = unitary_from_hamiltonian(&h, t).unwrap();
        let a = SuperMatrixA::from_kraus(&[u]).unwrap();
        let rep = validate_supermatrix(&a);
        prop_assert!(rep.all_pass());
        let b = reshuffle(&a).unwrap();
        prop_assert!((b.trace() - 2.0).abs() < 1e-12);
        prop_assert_eq!(unreshuffle(&b), a);
    }

    #[test]
    fn template_spectrum_matches_closed_form(
        a1 in prop_oneof![-1.0..-0.01f64, 0.01..1.0f64],
        b1 in -1.0..1.0f64, b2 in -1.0..1.0f64, b3 in -1.0..1.0f64,
    ) {
        let b = template_tilted(a1, b1, b2, b3).unwrap();
        prop_assert!((b.trace() - 2.0).abs() < 1e-12);
        prop_assert!(b.entries().hermiticity_residual() < 1e-15);
        prop_assert!(common::max_sorted_diff(b.eigenvalues(), &closed_form_eigs(a1, b1, b2, b3)) < 1e-9);
    }

    #[test]
    fn extracted_maps_are_trace_two_and_hermitian(
        a1 in -0.7..0.7f64, frac in -1.0..1.0f64, p in params(), partner in prop_oneof![Just(TiltPartner::Down), Just(TiltPartner::Mirrored)]
    ) {
        prop_assume!(a1.abs() > 1e-3);
        let a3 = frac * (1.0 - a1 * a1).sqrt();
        let spec = InitialStateSpec::tilted(a1, a3, partner);
        let grid = TimeGrid::new(0.1, 0.9, 5).unwrap();
        let traj = trajectory(&spec, &p, Topology::Closed, &grid).unwrap();
        let rho0 = traj.initial_reduced();
        for s in &traj.samples {
            let b = extract_map(&traj, &traj.initial_bloch, s.t).unwrap();
            prop_assert!((b.trace() - 2.0).abs() < 1e-10);
            prop_assert!(b.entries().hermiticity_residual() < 1e-10);
            let out = b.apply(rho0.matrix()).unwrap();
            prop_assert!(out.max_abs_diff(s.reduced_state.matrix()) < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn discord_is_local_unitary_invariant(seed in any::<u64>(), mix in 0.0..1.0f64, angle in 0.0..std::f64::consts::PI) {
        let mut rng = common::rng(seed);
        let psi = [c(0.0, 0.0), c(angle.cos(), 0.0), c(angle.sin(), 0.0), c(0.0, 0.0)];
        let pure = DensityMatrix::from_pure(&psi).unwrap();
        let rho = &pure.matrix().scale_real(1.0 - mix) + &ComplexMatrix::from_diagonal(&[
            c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0),
        ]).scale_real(mix);
        let rho = DensityMatrix::new(rho).unwrap();
        let u = kron(&common::random_su2(&mut rng), &common::random_su2(&mut rng));
        let rotated = DensityMatrix::new(&(&u * rho.matrix()) * &u.adjoint()).unwrap();
        let d0 = discord(&rho, Measured::Environment).unwrap().value;
        let d1 = discord(&rotated, Measured::Environment).unwrap().value;
        prop_assert!((d0 - d1).abs() < 1e-6, "{} vs {}", d0, d1);
        prop_assert!(d0 >= -1e-9);
    }

    #[test]
    fn entangled_pairs_have_positive_discord(angle in 0.05..(std::f64::consts::FRAC_PI_2 - 0.05)) {
        let spec = InitialStateSpec::entangled(angle.cos(), angle.sin());
        let rho = build_initial(&spec, Topology::Closed).unwrap();
        prop_assert!(discord(&rho, Measured::Environment).unwrap().value > 1e-6);
    }

    #[test]
    fn product_mixtures_have_zero_discord(p in prop_oneof![Just(0.0), Just(1.0)], a in bloch(), b in bloch(), c in bloch(), d in bloch()) {
        let spec = InitialStateSpec::new(StateFamily::Mixture { p, state_i: [a, b], state_ii: [c, d] });
        let rho = build_initial(&spec, Topology::Closed).unwrap();
        prop_assert!(discord(&rho, Measured::Environment).unwrap().value.abs() < 1e-9);
    }
}

#[test]
fn catalogue_states_are_valid() {
    for s in catalogue() {
        let rho = build_initial(&s.spec, s.natural_topology()).unwrap();
        assert!(rho.check().passes(1e-12, 1e-12, 1e-10), "{}", s.name);
    }
}

#[test]
fn maps_are_physical_on_their_domain() {
    let grid = TimeGrid::default();
    for s in catalogue() {
        let topo = s.natural_topology();
        for j in [0.1, 8.0] {
            let p = ModelParams::new(-8.0, -2.0, 4.0).with_j_zz(j);
            let traj = trajectory(&s.spec, &p, topo, &grid).unwrap();
            let rho0 = traj.initial_reduced();
            for sample in &traj.samples {
                let b = extract_map(&traj, &traj.initial_bloch, sample.t).unwrap();
                let out = DensityMatrix::with_tolerance(b.apply(rho0.matrix()).unwrap(), 1e-10, 1e-10);
                assert!(out.is_ok(), "{} t = {}", s.name, sample.t);
            }
        }
    }
}

#[test]
fn z_families_are_completely_positive_under_every_topology() {
    let grid = TimeGrid::default();
    let p = ModelParams::new(-8.0, -2.0, 4.0);
    let z_family = |name: &str| ["A1", "A2", "A3", "A4", "A5", "A6"].iter().any(|pre| name.starts_with(pre));
    for s in catalogue().into_iter().filter(|s| z_family(s.name)) {
        for topo in Topology::ALL {
            let spec = s.spec.clone().with_bath(topo.bath_qubits());
            for j in [0.1, 1.0, 8.0] {
                let traj = trajectory(&spec, &p.with_j_zz(j), topo, &grid).unwrap();
                for sample in &traj.samples {
                    let b = extract_map(&traj, &traj.initial_bloch, sample.t).unwrap();
                    assert!(b.min_eigenvalue() >= -1e-10, "{} {topo} J={j} t={}", s.name, sample.t);
                }
            }
        }
    }
}

#[test]
fn symmetric_bath_g2_ignores_coupling() {
    let grid = TimeGrid::default();
    let p = ModelParams::new(-8.0, -2.0, 4.0);
    for bits in ["00", "01", "10", "11"] {
        let spec = InitialStateSpec::pure(bits).with_bath(1);
        let base = g2_series(&spec, &p.with_j_zz(0.1), Topology::BathOneOnBoth, &grid).unwrap();
        for j in [1.0, 8.0] {
            let other = g2_series(&spec, &p.with_j_zz(j), Topology::BathOneOnBoth, &grid).unwrap();
            assert!(base.max_abs_difference(&other) < 1e-10);
        }
    }
}

#[test]
fn g2_is_bounded() {
    let grid = TimeGrid::default();
    let p = ModelParams::new(-8.0, -2.0, 4.0).with_j_zz(8.0);
    for s in catalogue() {
        let series = g2_series(&s.spec, &p, s.natural_topology(), &grid).unwrap();
        assert!(series.samples.iter().all(|&(_, g)| (0.0..=1.0 + 1e-10).contains(&g)), "{}", s.name);
    }
}
