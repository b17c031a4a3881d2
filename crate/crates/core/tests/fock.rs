use liouville_blocks::fock::{
    annihilation, apply_super, build_basis, creation, devectorize, left_super, number_operator, parity_operator,
    right_super, vectorize, BasisRef, Operator, Statistics,
};
use liouville_blocks::linalg::{max_abs, max_abs_vec, CMatrix};
use liouville_blocks::{Error, C64};
use proptest::prelude::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn fermions(m: usize) -> BasisRef {
    build_basis(m, Statistics::Fermionic, 1).unwrap()
}

#[test]
fn fermionic_basis_order() {
    let b = fermions(2);
    let states: Vec<Vec<u32>> = b.states().to_vec();
    assert_eq!(states, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
}

#[test]
fn bosonic_basis_order() {
    let b = build_basis(1, Statistics::Bosonic, 3).unwrap();
    assert_eq!(b.states().to_vec(), vec![vec![0], vec![1], vec![2], vec![3]]);
}

#[test]
fn index_of_inverts_states() {
    let b = fermions(3);
    assert_eq!(b.dim(), 8);
    for (k, s) in b.states().iter().enumerate() {
        assert_eq!(b.index_of(s), Some(k));
    }
    assert_eq!(b.state(b.index_of(&[1, 0, 1]).unwrap()), &[1, 0, 1]);
}

#[test]
fn fermionic_statistics_force_single_occupation() {
    let b = build_basis(2, Statistics::Fermionic, 5).unwrap();
    assert_eq!(b.n_max(), 1);
    assert_eq!(b.dim(), 4);
}

#[test]
fn invalid_dimensions_rejected() {
    assert!(matches!(
        build_basis(0, Statistics::Bosonic, 2),
        Err(Error::InvalidDimension(_))
    ));
    assert!(matches!(
        build_basis(2, Statistics::Bosonic, 0),
        Err(Error::InvalidDimension(_))
    ));
}

#[test]
fn single_fermion_annihilator() {
    let b = fermions(1);
    let c1 = annihilation(&b, 0).unwrap();
    let expected = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    assert_eq!(c1.matrix(), &expected);
}

#[test]
fn mode_index_out_of_range() {
    let b = fermions(2);
    assert!(annihilation(&b, 2).is_err());
}

#[test]
fn canonical_anticommutation_is_exact() {
    for m in 1..=3 {
        let b = fermions(m);
        let id = Operator::identity(&b);
        for j in 0..m {
            for k in 0..m {
                let cj = annihilation(&b, j).unwrap();
                let ckd = creation(&b, k).unwrap();
                let anti = cj.anticommutator(&ckd).unwrap();
                let expected = if j == k { id.clone() } else { Operator::zeros(&b) };
                assert_eq!(anti.distance(&expected).unwrap(), 0.0);
                let ck = annihilation(&b, k).unwrap();
                assert_eq!(max_abs(cj.anticommutator(&ck).unwrap().matrix()), 0.0);
            }
        }
    }
}

#[test]
fn boson_ladder_element() {
    let b = build_basis(1, Statistics::Bosonic, 3).unwrap();
    let a = annihilation(&b, 0).unwrap();
    assert!((a.matrix()[(2, 3)].re - 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn boson_commutator_defect_only_at_top_level() {
    let n_max = 4;
    let b = build_basis(2, Statistics::Bosonic, n_max).unwrap();
    for k in 0..2 {
        let a = annihilation(&b, k).unwrap();
        let comm = a.commutator(&a.adjoint()).unwrap();
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                let expected = if i != j {
                    0.0
                } else if b.state(i)[k] == n_max {
                    -(n_max as f64)
                } else {
                    1.0
                };
                assert!((comm.matrix()[(i, j)] - c(expected)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn number_and_parity_operators() {
    let b = fermions(2);
    let n = number_operator(&b);
    let p = parity_operator(&b);
    let diag_n: Vec<f64> = (0..4).map(|i| n.matrix()[(i, i)].re).collect();
    let diag_p: Vec<f64> = (0..4).map(|i| p.matrix()[(i, i)].re).collect();
    assert_eq!(diag_n, vec![0.0, 1.0, 1.0, 2.0]);
    assert_eq!(diag_p, vec![1.0, -1.0, -1.0, 1.0]);
    assert_eq!((&p * &p).distance(&Operator::identity(&b)).unwrap(), 0.0);
    assert_eq!(max_abs(n.commutator(&p).unwrap().matrix()), 0.0);
    assert_eq!(n.matrix()[(3, 3)], c(2.0));
}

#[test]
fn vectorized_identity() {
    let b = fermions(1);
    let v = vectorize(&Operator::identity(&b));
    let got: Vec<C64> = v.vector().iter().copied().collect();
    assert_eq!(got, vec![c(1.0), c(0.0), c(0.0), c(1.0)]);
}

#[test]
fn identity_superoperators() {
    let b = fermions(2);
    let id = Operator::identity(&b);
    let big = CMatrix::identity(16, 16);
    assert_eq!(left_super(&id), big);
    assert_eq!(right_super(&id), big);
}

#[test]
fn inner_product_rejects_foreign_basis() {
    let b1 = fermions(1);
    let b2 = build_basis(1, Statistics::Bosonic, 1).unwrap();
    let v1 = vectorize(&Operator::identity(&b1));
    let v2 = vectorize(&Operator::identity(&b2));
    assert!(matches!(v1.inner(&v2), Err(Error::BasisMismatch)));
}

#[test]
fn superoperator_dimension_checked() {
    let s = left_super(&Operator::identity(&fermions(2)));
    let o = Operator::identity(&fermions(1));
    assert!(matches!(apply_super(&s, &o), Err(Error::DimensionMismatch { .. })));
}

fn random_operator(basis: &BasisRef, values: &[(f64, f64)]) -> Operator {
    let n = basis.dim();
    let m = CMatrix::from_fn(n, n, |i, j| {
        let (re, im) = values[i * n + j];
        C64::new(re, im)
    });
    Operator::new(basis.clone(), m).unwrap()
}

fn basis_strategy() -> impl Strategy<Value = BasisRef> {
    prop_oneof![
        (1usize..=3).prop_map(|m| build_basis(m, Statistics::Fermionic, 1).unwrap()),
        (1u32..=3).prop_map(|n| build_basis(1, Statistics::Bosonic, n).unwrap()),
        (1u32..=2).prop_map(|n| build_basis(2, Statistics::Bosonic, n).unwrap()),
    ]
}

fn operator_pair() -> impl Strategy<Value = (Operator, Operator)> {
    basis_strategy().prop_flat_map(|b| {
        let n = b.dim();
        let entries = proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n);
        (Just(b), entries.clone(), entries)
            .prop_map(|(b, x, y)| (random_operator(&b, &x), random_operator(&b, &y)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip((o, _) in operator_pair()) {
        let back = devectorize(&vectorize(&o));
        prop_assert_eq!(back.matrix(), o.matrix());
    }

    #[test]
    fn hilbert_schmidt_inner_product((o, r) in operator_pair()) {
        let lhs = vectorize(&o).inner(&vectorize(&r)).unwrap();
        let rhs = (&o.adjoint() * &r).trace();
        prop_assert!((lhs - rhs).norm() < 1e-12);
        let frob: f64 = o.matrix().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((vectorize(&o).inner(&vectorize(&o)).unwrap() - c(frob)).norm() < 1e-12);
    }

    #[test]
    fn left_and_right_products((o, r) in operator_pair()) {
        let vr = vectorize(&r);
        let left = left_super(&o) * vr.vector();
        let right = right_super(&o) * vr.vector();
        prop_assert!(max_abs_vec(&(left - vectorize(&(&o * &r)).vector())) < 1e-12);
        prop_assert!(max_abs_vec(&(right - vectorize(&(&r * &o)).vector())) < 1e-12);
    }

    #[test]
    fn commutator_superoperator((o, r) in operator_pair()) {
        let s = left_super(&o) - right_super(&o);
        let got = apply_super(&s, &r).unwrap();
        let expected = o.commutator(&r).unwrap();
        prop_assert!(got.distance(&expected).unwrap() < 1e-12);
    }
}
