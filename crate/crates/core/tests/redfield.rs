use liouville_blocks::blocks::{commutator_norm, number_superoperator};
use liouville_blocks::fock::{annihilation, build_basis, vectorize, BasisRef, Operator, Statistics};
use liouville_blocks::linalg::{kron_add, max_abs, CMatrix};
use liouville_blocks::random::{random_hermitian, RandomizedRates};
use liouville_blocks::redfield::{
    assemble_liouvillian, assemble_with_model, bath_rate, check_conditions, decompose_channels, grading,
    jump_decompose, psa_pairs, BathSpec, Channel, Liouvillian, PsaPolicy, SecularMode, ThermalMeanRule,
    TwoSpinSystem,
};
use liouville_blocks::{Error, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MU: f64 = 0.031_622_776_601_683_79;

fn scenario_baths() -> [BathSpec; 2] {
    [
        BathSpec::ohmic(MU, 1.0, 10.0).unwrap(),
        BathSpec::ohmic(MU, 0.1, 10.0).unwrap(),
    ]
}

fn random_density(basis: &BasisRef, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_hermitian(&mut rng, basis.dim(), 1.0);
    let rho = &a * &a;
    let tr = rho.trace();
    Operator::new(basis.clone(), rho / tr).unwrap()
}

#[test]
fn thermal_rates_frozen() {
    // Values from 2πμ²ω e^{−ω/ω_c}/(1 − e^{−ω/T}) and its Boltzmann partner.
    let bath = BathSpec::ohmic(MU, 1.0, 10.0).unwrap();
    let (down, s) = bath_rate(&bath, 1.0);
    let (up, _) = bath_rate(&bath, -1.0);
    assert!((down - 0.008993950744025396).abs() < 1e-16);
    assert!((up - 0.0033086895736355406).abs() < 1e-16);
    assert_eq!(s, 0.0);
}

#[test]
fn rate_formula_reimplemented() {
    let oracle = |mu: f64, t: f64, wc: f64, w: f64| {
        let j = |x: f64| x * (-x / wc).exp();
        let pref = 2.0 * std::f64::consts::PI * mu * mu;
        if w > 0.0 {
            pref * j(w) * (1.0 + 1.0 / ((w / t).exp() - 1.0))
        } else {
            pref * j(-w) / ((-w / t).exp() - 1.0)
        }
    };
    for &(t, wc) in &[(0.3, 5.0), (1.0, 10.0), (2.5, 2.0)] {
        let bath = BathSpec::ohmic(0.05, t, wc).unwrap();
        for &w in &[-3.0, -0.7, -0.01, 0.01, 0.5, 1.0, 4.0] {
            let (g, _) = bath_rate(&bath, w);
            let o = oracle(0.05, t, wc, w);
            assert!((g - o).abs() <= 1e-13 * o.abs().max(1e-300), "ω = {w}: {g} vs {o}");
        }
    }
}

#[test]
fn single_mode_ladder_decomposition() {
    let basis = build_basis(1, Statistics::Bosonic, 2).unwrap();
    let a = annihilation(&basis, 0).unwrap();
    let h = &(&a.adjoint() * &a) * 1.3;
    let dec = jump_decompose(&h, &(&a + &a.adjoint()), 1e-9).unwrap();
    let freqs = dec.frequencies();
    assert_eq!(freqs.len(), 2);
    assert!((freqs[0] + 1.3).abs() < 1e-12 && (freqs[1] - 1.3).abs() < 1e-12);
    let down = dec.component(1.3, 1e-9).unwrap();
    assert!(down.operator.distance(&a).unwrap() < 1e-12);
    assert_eq!(down.delta, Some(-1));
}

#[test]
fn two_spin_sigma1x_components() {
    for &(w1, w2, lam) in &[(1.0, 1.0, 0.01), (1.0, 0.8, 0.3)] {
        let sys = TwoSpinSystem::new(w1, w2, lam).unwrap();
        let d = &sys.diagonalization;
        let dec = jump_decompose(&sys.hamiltonian, &sys.couplings.sigma1x, 1e-9).unwrap();
        let mut freqs = dec.frequencies();
        freqs.sort_by(f64::total_cmp);
        let expected = [-2.0 * d.e1, -2.0 * d.e2, 2.0 * d.e2, 2.0 * d.e1];
        assert_eq!(freqs.len(), 4);
        for (f, e) in freqs.iter().zip(expected) {
            assert!((f - e).abs() < 1e-12);
        }
        let f1 = annihilation(&sys.basis, 0).unwrap();
        let f2 = annihilation(&sys.basis, 1).unwrap();
        let c = (d.theta + d.phi).cos();
        let s = (d.theta + d.phi).sin();
        let a1 = dec.component(2.0 * d.e1, 1e-9).unwrap();
        let a2 = dec.component(2.0 * d.e2, 1e-9).unwrap();
        assert!(a1.operator.distance(&(&f1 * c)).unwrap() < 1e-12);
        assert!(a2.operator.distance(&(&f2 * s)).unwrap() < 1e-12);
    }
}

#[test]
fn non_hermitian_hamiltonian_rejected() {
    let basis = build_basis(1, Statistics::Fermionic, 1).unwrap();
    let c = annihilation(&basis, 0).unwrap();
    assert!(matches!(
        jump_decompose(&c, &c.adjoint(), 1e-9),
        Err(Error::NotHermitian { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_is_complete(seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = build_basis(1, Statistics::Bosonic, (dim - 1) as u32).unwrap();
        let h = Operator::new(basis.clone(), random_hermitian(&mut rng, dim, 1.0)).unwrap();
        let a = Operator::new(basis.clone(), random_hermitian(&mut rng, dim, 1.0)).unwrap();
        let dec = jump_decompose(&h, &a, 1e-9).unwrap();
        prop_assert!(dec.resum(&basis).distance(&a).unwrap() < 1e-12);
        for comp in &dec.components {
            let mirror = dec.component(-comp.frequency, 1e-9).unwrap();
            prop_assert!(mirror.operator.distance(&comp.operator.adjoint()).unwrap() < 1e-12);
            // [H, Â(ω)] = −ω Â(ω)
            let comm = h.commutator(&comp.operator).unwrap();
            prop_assert!(comm.distance(&(&comp.operator * -comp.frequency)).unwrap() < 1e-10);
        }
    }
}

#[test]
fn secular_pairs_of_the_worked_scenario() {
    let sys = TwoSpinSystem::new(1.0, 1.0, 0.01).unwrap();
    let d = &sys.diagonalization;
    let policy = PsaPolicy::from_coupling(MU).unwrap();
    assert!((policy.tau_r - 1000.0).abs() < 1e-9);
    let (a, b) = (2.0 * d.e1, 2.0 * d.e2);
    let pairs = psa_pairs(&[-a, -b, b, a], &policy);
    let has = |x: f64, y: f64| pairs.iter().any(|&(p, q)| (p - x).abs() < 1e-12 && (q - y).abs() < 1e-12);
    assert!(has(a, b) && has(b, a));
    assert!(!has(a, -a) && !has(-b, b));
    assert_eq!(pairs.len(), 8);
}

#[test]
fn full_secular_keeps_diagonal_pairs() {
    let policy = PsaPolicy::from_coupling(MU).unwrap().with_mode(SecularMode::FullSecular);
    let pairs = psa_pairs(&[1.0, 1.02], &policy);
    assert_eq!(pairs, vec![(1.0, 1.0), (1.02, 1.02)]);
    let none = PsaPolicy::from_coupling(MU).unwrap().with_mode(SecularMode::None);
    assert_eq!(psa_pairs(&[1.0, 1.02], &none).len(), 4);
}

#[test]
fn chi_must_exceed_one() {
    assert!(PsaPolicy::new(100.0, 1.0, SecularMode::Partial, 1e-9).is_err());
    assert!(PsaPolicy::from_coupling(MU).unwrap().with_chi(0.5).is_err());
}

#[test]
fn single_mode_decay_matches_operator_form() {
    let basis = build_basis(1, Statistics::Bosonic, 3).unwrap();
    let a = annihilation(&basis, 0).unwrap();
    let h = &(&a.adjoint() * &a) * 1.0;
    let bath = BathSpec::ohmic(0.05, 0.0, 10.0).unwrap();
    let policy = PsaPolicy::from_coupling(0.05).unwrap().with_mode(SecularMode::FullSecular);
    let l = assemble_liouvillian(&h, &[Channel::new("x", &a + &a.adjoint(), 0)], &[bath], &policy).unwrap();
    let gamma = bath.rate(1.0);
    let rho = random_density(&basis, 3);
    let ad = a.adjoint();
    let n = &ad * &a;
    let jump = &(&a * &rho) * &ad;
    let anti = n.anticommutator(&rho).unwrap();
    let diss = &(&jump - &(&anti * 0.5)) * gamma;
    let unitary = &h.commutator(&rho).unwrap() * C64::new(0.0, -1.0);
    let expected = &diss + &unitary;
    assert!(l.apply(&rho).unwrap().distance(&expected).unwrap() < 1e-14);
}

#[test]
fn unrestricted_policy_equals_partial_when_all_gaps_are_small() {
    let sys = TwoSpinSystem::new(1.0, 0.9, 0.2).unwrap();
    // Threshold 100 exceeds every frequency difference.
    let partial = PsaPolicy::new(1.0, 100.0, SecularMode::Partial, 1e-9).unwrap();
    let none = partial.with_mode(SecularMode::None);
    let l1 = sys.global_liouvillian(&scenario_baths(), &partial).unwrap();
    let l2 = sys.global_liouvillian(&scenario_baths(), &none).unwrap();
    assert_eq!(l1.matrix(), l2.matrix());
    assert_eq!(l1.provenance().unwrap().dropped, 0);
}

#[test]
fn generators_preserve_trace_and_hermiticity() {
    let sys = TwoSpinSystem::new(1.0, 1.0, 0.01).unwrap();
    let mut gens: Vec<Liouvillian> = [SecularMode::Partial, SecularMode::FullSecular, SecularMode::None]
        .iter()
        .map(|&m| {
            let p = PsaPolicy::from_coupling(MU).unwrap().with_mode(m);
            sys.global_liouvillian(&scenario_baths(), &p).unwrap()
        })
        .collect();
    gens.push(sys.local_liouvillian(&scenario_baths()).unwrap());
    for l in &gens {
        assert!(l.trace_defect() < 1e-10);
        assert!(l.hermiticity_preservation_defect() < 1e-12);
        let rho = random_density(&sys.basis, 11);
        assert!(l.apply(&rho).unwrap().trace().norm() < 1e-12);
    }
}

#[test]
fn provenance_records_policy() {
    let sys = TwoSpinSystem::new(1.0, 1.0, 0.01).unwrap();
    let policy = PsaPolicy::from_coupling(MU).unwrap();
    let l = sys.global_liouvillian(&scenario_baths(), &policy).unwrap();
    let p = l.provenance().unwrap();
    assert_eq!(p.mode, SecularMode::Partial);
    assert_eq!(p.chi, policy.chi);
    assert!((p.threshold - 0.1).abs() < 1e-12);
    assert_eq!(p.channel_labels, vec!["sigma1x".to_string(), "sigma2x".to_string()]);
    assert_eq!(p.coefficient_rule, "arithmetic_mean");
    assert!(p.dropped > 0);
    // Only same-bath terms carry weight under the mean rule.
    assert!(p.kept.iter().all(|t| t.alpha == t.beta));
}

/// Each building block of a retained term commutes with the number
/// superoperator on its own.
#[test]
fn termwise_commutation_with_number_superoperator() {
    let sys = TwoSpinSystem::new(1.0, 1.0, 0.01).unwrap();
    let policy = PsaPolicy::from_coupling(MU).unwrap();
    let l = sys.global_liouvillian(&scenario_baths(), &policy).unwrap();
    let decomposed = decompose_channels(&sys.hamiltonian, &sys.global_channels(), policy.freq_tol).unwrap();
    let n_super = number_superoperator(&sys.basis).matrix();
    let comm = |m: &CMatrix| max_abs(&(&n_super * m - m * &n_super));
    let n = sys.basis.dim();
    let id = CMatrix::identity(n, n);
    let lift = |a: &CMatrix, b: &CMatrix| {
        let mut out = CMatrix::zeros(n * n, n * n);
        kron_add(&mut out, C64::new(1.0, 0.0), a, b);
        out
    };
    assert_eq!(comm(&lift(sys.hamiltonian.matrix(), &id)), 0.0);
    let kept = &l.provenance().unwrap().kept;
    assert!(!kept.is_empty());
    for t in kept {
        let ab = decomposed[t.beta].jumps.component(t.omega, 1e-12).unwrap().operator.matrix();
        let aa = decomposed[t.alpha].jumps.component(t.omega_p, 1e-12).unwrap().operator.matrix();
        let k = aa.adjoint() * ab;
        assert!(comm(&lift(ab, &aa.conjugate())) < 1e-12);
        assert!(comm(&lift(&k, &id)) < 1e-12);
        assert!(comm(&lift(&id, &k.transpose())) < 1e-12);
    }
}

#[test]
fn perturbed_coefficients_keep_the_symmetry() {
    let sys = TwoSpinSystem::new(1.0, 1.0, 0.01).unwrap();
    let policy = PsaPolicy::from_coupling(MU).unwrap();
    let decomposed = decompose_channels(&sys.hamiltonian, &sys.global_channels(), policy.freq_tol).unwrap();
    let n_super = number_superoperator(&sys.basis).matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let base = ThermalMeanRule {
            baths: scenario_baths().to_vec(),
        };
        let model = RandomizedRates::new(base, &decomposed, &policy, &mut rng, 0.8);
        let l = assemble_with_model(&sys.hamiltonian, &decomposed, &model, &policy).unwrap();
        assert!(commutator_norm(&n_super, &l).unwrap() < 1e-12);
        assert!(l.hermiticity_preservation_defect() < 1e-12);
    }
}

#[test]
fn two_spin_conditions_hold() {
    let sys = TwoSpinSystem::new(1.0, 1.0, 0.01).unwrap();
    let policy = PsaPolicy::from_coupling(MU).unwrap();
    let decomposed = decompose_channels(&sys.hamiltonian, &sys.global_channels(), policy.freq_tol).unwrap();
    let d = &sys.diagonalization;
    let report = check_conditions(&[2.0 * d.e1, 2.0 * d.e2], &decomposed, &policy);
    assert!(report.condition_one && report.condition_two && report.symmetry_predicted);
}

fn two_boson_setup(e1: f64, e2: f64) -> (BasisRef, Operator, Operator, Operator) {
    let basis = build_basis(2, Statistics::Bosonic, 2).unwrap();
    let a1 = annihilation(&basis, 0).unwrap();
    let a2 = annihilation(&basis, 1).unwrap();
    let h = &(&(&a1.adjoint() * &a1) * e1) + &(&(&a2.adjoint() * &a2) * e2);
    (basis, h, a1, a2)
}

/// The report's prediction is confirmed by evaluating `[𝒩, ℒ]` directly.
fn prediction_matches_brute_force(e1: f64, e2: f64, coupling: Operator, h: &Operator, basis: &BasisRef) -> bool {
    let policy = PsaPolicy::from_coupling(MU).unwrap();
    let bath = BathSpec::ohmic(MU, 0.5, 10.0).unwrap();
    let channels = [Channel::new("q", coupling, 0)];
    let decomposed = decompose_channels(h, &channels, policy.freq_tol).unwrap();
    let report = check_conditions(&[e1, e2], &decomposed, &policy);
    let l = assemble_liouvillian(h, &channels, &[bath], &policy).unwrap();
    let norm = number_superoperator(basis).commutator_norm(&l).unwrap();
    assert_eq!(report.symmetry_predicted, norm < 1e-12, "norm {norm:.3e}, report {report:?}");
    report.symmetry_predicted
}

#[test]
fn pair_annihilation_channel() {
    let (basis, h, a1, a2) = two_boson_setup(1.0, 1.0);
    let pair = &a1 * &a2;
    let coupling = &pair + &pair.adjoint();
    let decomposed = decompose_channels(&h, &[Channel::new("q", coupling.clone(), 0)], 1e-9).unwrap();
    let report = check_conditions(&[1.0, 1.0], &decomposed, &PsaPolicy::from_coupling(MU).unwrap());
    assert!(!report.condition_one);
    assert_eq!(grading(&pair), Some(-2));
    assert!(prediction_matches_brute_force(1.0, 1.0, coupling, &h, &basis));
}

#[test]
fn mixed_grading_at_close_frequencies_breaks_the_symmetry() {
    // a₁ at E₁ and a₁a₂ at E₁ + E₂ are paired when E₂ is below the threshold.
    let (basis, h, a1, a2) = two_boson_setup(1.0, 0.01);
    let q = &a1 + &(&a1 * &a2);
    let coupling = &q + &q.adjoint();
    assert!(!prediction_matches_brute_force(1.0, 0.01, coupling, &h, &basis));
}

#[test]
fn bath_index_checked() {
    let sys = TwoSpinSystem::new(1.0, 1.0, 0.01).unwrap();
    let policy = PsaPolicy::from_coupling(MU).unwrap();
    let one = [scenario_baths()[0]];
    assert!(assemble_liouvillian(&sys.hamiltonian, &sys.global_channels(), &one, &policy).is_err());
    assert!(matches!(
        assemble_liouvillian(&sys.hamiltonian, &[], &one, &policy),
        Err(Error::EmptyJumpSet)
    ));
}

#[test]
fn vectorized_identity_is_a_left_null_vector() {
    let sys = TwoSpinSystem::new(1.0, 0.8, 0.3).unwrap();
    let policy = PsaPolicy::from_coupling(MU).unwrap();
    let l = sys.global_liouvillian(&scenario_baths(), &policy).unwrap();
    let id = vectorize(&Operator::identity(&sys.basis)).into_vector();
    let row = id.adjoint() * l.matrix();
    assert!(row.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
}
