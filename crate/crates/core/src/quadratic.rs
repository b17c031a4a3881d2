//! Spin models rewritten as free fermions.
//!
//! Two coupled spins `H = ω₁/2 σ₁ᶻ + ω₂/2 σ₂ᶻ + λ σ₁ˣσ₂ˣ` are diagonalised
//! by a Jordan-Wigner mapping, a Bogoliubov transformation (angle θ) and a
//! rotation (angle φ), giving `H = E₁(2f₁†f₁ − 1) + E₂(2f₂†f₂ − 1)`.
//!
//! The canonical spin basis used here is the tensor-product basis indexed by
//! bits `(s₁, s₂)` with `s = 1` meaning spin up (`σᶻ = +1`), in the order
//! `|00⟩, |01⟩, |10⟩, |11⟩` (index `2·s₁ + s₂`). The fermionic eigenbasis is
//! the two-mode [`FockBasis`](crate::fock::FockBasis) order
//! `|00⟩_f, |01⟩_f, |10⟩_f, |11⟩_f`.

use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fock::{annihilation, number_operator, BasisRef, Operator, Statistics};
use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Closed-form diagonalisation of two `σˣσˣ`-coupled spins.
#[derive(Clone, Debug)]
pub struct TwoSpinDiagonalization {
    pub omega1: f64,
    pub omega2: f64,
    pub lambda: f64,
    /// Bogoliubov angle, `tan 2θ = 2λ/ω₊`.
    pub theta: f64,
    /// Rotation angle, `tan 2φ = 2λ/ω₋`.
    pub phi: f64,
    pub e1: f64,
    pub e2: f64,
    /// Column `k` holds fermionic eigenstate `k` (order `|00⟩_f … |11⟩_f`)
    /// expanded in the canonical spin basis.
    pub eigenbasis_map: DMatrix<f64>,
}

/// Both angles use `atan2` so that `|01⟩_f` always carries energy
/// `−E₁ + E₂` with `E₁ ≥ E₂`, including for `ω₁ < ω₂`. For `ω₋ = 0` this
/// gives `φ = π/4·sign(λ)`; for `ω₋ = λ = 0` it gives `φ = 0`.
pub fn diagonalize_two_spin(omega1: f64, omega2: f64, lambda: f64) -> Result<TwoSpinDiagonalization> {
    if !(omega1 > 0.0 && omega2 > 0.0) {
        return Err(Error::Domain(format!(
            "spin frequencies must be positive, got ω₁ = {omega1}, ω₂ = {omega2}"
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::Domain("coupling λ must be finite".into()));
    }
    let omega_plus = omega1 + omega2;
    let omega_minus = omega1 - omega2;
    let theta = 0.5 * (2.0 * lambda).atan2(omega_plus);
    let phi = if omega_minus == 0.0 {
        if lambda == 0.0 {
            0.0
        } else {
            FRAC_PI_4 * lambda.signum()
        }
    } else {
        0.5 * (2.0 * lambda).atan2(omega_minus)
    };

    let r_plus = (lambda * lambda + omega_plus * omega_plus / 4.0).sqrt();
    let r_minus = (lambda * lambda + omega_minus * omega_minus / 4.0).sqrt();
    let e1 = 0.5 * (r_plus + r_minus);
    let e2 = 0.5 * (r_plus - r_minus);

    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    // Rows: canonical |00⟩,|01⟩,|10⟩,|11⟩; columns: |00⟩_f,|01⟩_f,|10⟩_f,|11⟩_f.
    #[rustfmt::skip]
    let eigenbasis_map = DMatrix::from_row_slice(4, 4, &[
        -ct, 0.0, 0.0,  st,
        0.0,  cp, -sp, 0.0,
        0.0, -sp, -cp, 0.0,
         st, 0.0, 0.0,  ct,
    ]);

    Ok(TwoSpinDiagonalization {
        omega1,
        omega2,
        lambda,
        theta,
        phi,
        e1,
        e2,
        eigenbasis_map,
    })
}

impl TwoSpinDiagonalization {
    /// `E₁(2f₁†f₁ − 1) + E₂(2f₂†f₂ − 1)` on a two-mode fermionic basis.
    pub fn fermionic_hamiltonian(&self, basis: &BasisRef) -> Result<Operator> {
        check_two_fermion_basis(basis)?;
        let energies: Vec<f64> = basis
            .states()
            .iter()
            .map(|occ| {
                self.e1 * (2.0 * occ[0] as f64 - 1.0) + self.e2 * (2.0 * occ[1] as f64 - 1.0)
            })
            .collect();
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            4,
            energies.into_iter().map(|e| Complex64::new(e, 0.0)),
        ));
        Operator::hermitian(basis.clone(), m, "two-spin Hamiltonian")
    }

    /// Expresses an operator given in the canonical spin basis in the
    /// fermionic eigenbasis: `Uᵀ O U`.
    pub fn to_eigenbasis(&self, spin_op: &DMatrix<f64>) -> DMatrix<f64> {
        self.eigenbasis_map.transpose() * spin_op * &self.eigenbasis_map
    }

    /// Same as [`to_eigenbasis`](Self::to_eigenbasis), wrapped as an
    /// operator on `basis`.
    pub fn spin_operator_in_eigenbasis(&self, spin_op: &DMatrix<f64>, basis: &BasisRef) -> Result<Operator> {
        check_two_fermion_basis(basis)?;
        let m = self.to_eigenbasis(spin_op).map(|x| Complex64::new(x, 0.0));
        Operator::new(basis.clone(), m)
    }
}

/// Single-spin factors in the `(down, up)` ordering.
fn pauli(kind: char) -> DMatrix<f64> {
    match kind {
        'x' => DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        'z' => DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]),
        // σ⁻ = |down⟩⟨up|
        '-' => DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        '+' => DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]),
        _ => DMatrix::identity(2, 2),
    }
}

/// Spin operators of the two-spin system in the canonical basis.
#[derive(Clone, Debug)]
pub struct CanonicalSpinOperators {
    pub sigma1x: DMatrix<f64>,
    pub sigma2x: DMatrix<f64>,
    pub sigma1z: DMatrix<f64>,
    pub sigma2z: DMatrix<f64>,
    pub sigma1_minus: DMatrix<f64>,
    pub sigma2_minus: DMatrix<f64>,
}

pub fn canonical_spin_operators() -> CanonicalSpinOperators {
    let id = pauli('1');
    let first = |k: char| pauli(k).kronecker(&id);
    let second = |k: char| id.kronecker(&pauli(k));
    CanonicalSpinOperators {
        sigma1x: first('x'),
        sigma2x: second('x'),
        sigma1z: first('z'),
        sigma2z: second('z'),
        sigma1_minus: first('-'),
        sigma2_minus: second('-'),
    }
}

/// `ω₁/2 σ₁ᶻ + ω₂/2 σ₂ᶻ + λ σ₁ˣσ₂ˣ` in the canonical spin basis.
pub fn spin_hamiltonian(omega1: f64, omega2: f64, lambda: f64) -> DMatrix<f64> {
    let ops = canonical_spin_operators();
    &ops.sigma1z * (omega1 / 2.0) + &ops.sigma2z * (omega2 / 2.0) + (&ops.sigma1x * &ops.sigma2x) * lambda
}

/// Spin operators written through the fermionic modes `f₁`, `f₂`.
#[derive(Clone, Debug)]
pub struct SpinCouplings {
    pub sigma1x: Operator,
    pub sigma2x: Operator,
    pub sigma1z: Operator,
    pub sigma2z: Operator,
    /// `P = (2f₁†f₁ − 1)(2f₂†f₂ − 1)`.
    pub parity: Operator,
}

/// Builds `σ₁ˣ, σ₂ˣ, σ₁ᶻ, σ₂ᶻ, P` from the closed-form fermionic
/// expressions (not by conjugating the spin matrices).
pub fn spin_coupling_operators(d: &TwoSpinDiagonalization, basis: &BasisRef) -> Result<SpinCouplings> {
    check_two_fermion_basis(basis)?;
    let f1 = annihilation(basis, 0)?;
    let f2 = annihilation(basis, 1)?;
    let f1d = f1.adjoint();
    let f2d = f2.adjoint();
    let id = Operator::identity(basis);
    let n1 = &f1d * &f1;
    let n2 = &f2d * &f2;
    let parity = &(&(&n1 * 2.0) - &id) * &(&(&n2 * 2.0) - &id);

    let (tp, tm) = (d.theta + d.phi, d.theta - d.phi);
    let sigma1x = &(&(&f1d + &f1) * tp.cos()) + &(&(&f2d + &f2) * tp.sin());
    let sigma2x = &(&(&parity * &(&f2d - &f2)) * tm.cos()) + &(&(&parity * &(&f1d - &f1)) * tm.sin());

    let c2t = (2.0 * d.theta).cos();
    let c2p = (2.0 * d.phi).cos();
    let (st, ct) = d.theta.sin_cos();
    let (sp, cp) = d.phi.sin_cos();
    let pair = &(&f1 * &f2) + &(&f2d * &f1d);
    let z_common = |na: &Operator, nb: &Operator, hop: Operator| -> Operator {
        let diag = &(&(na * (c2t + c2p)) + &(nb * (c2t - c2p))) - &(&id * c2t);
        let mix = &(&hop * (cp * sp)) + &(&pair * (ct * st));
        &diag - &(&mix * 2.0)
    };
    let hop1 = &(&f1 * &f2d) + &(&f2 * &f1d);
    let hop2 = &(&f1d * &f2) + &(&f2d * &f1);
    let sigma1z = z_common(&n1, &n2, hop1);
    let sigma2z = z_common(&n2, &n1, hop2);

    Ok(SpinCouplings {
        sigma1x,
        sigma2x,
        sigma1z,
        sigma2z,
        parity,
    })
}

fn check_two_fermion_basis(basis: &BasisRef) -> Result<()> {
    if basis.mode_count() != 2 || basis.statistics() != Statistics::Fermionic {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

/// Excitation-preserving spin chain
/// `Σ ω_k/2 σ_kᶻ + Σ J_k (σ⁺_{k+1}σ⁻_k + h.c.)`, with the convention
/// `σ_kᶻ = n_k − 1/2` of the Jordan-Wigner mapping.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinChainSpec {
    pub omegas: Vec<f64>,
    pub couplings: Vec<f64>,
}

impl SpinChainSpec {
    pub fn new(omegas: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if omegas.is_empty() {
            return Err(Error::InvalidDimension("spin chain needs at least one site".into()));
        }
        if couplings.len() + 1 != omegas.len() {
            return Err(Error::LengthMismatch(format!(
                "{} sites need {} couplings, got {}",
                omegas.len(),
                omegas.len() - 1,
                couplings.len()
            )));
        }
        Ok(SpinChainSpec { omegas, couplings })
    }

    pub fn sites(&self) -> usize {
        self.omegas.len()
    }
}

/// Quadratic fermionic form of the chain,
/// `Σ ω_k/2 (c_k†c_k − 1/2) + Σ J_k (c_{k+1}†c_k + h.c.)`.
pub fn jordan_wigner_chain(spec: &SpinChainSpec, basis: &BasisRef) -> Result<Operator> {
    if basis.statistics() != Statistics::Fermionic {
        return Err(Error::BasisMismatch);
    }
    if basis.mode_count() != spec.sites() || spec.couplings.len() + 1 != spec.sites() {
        return Err(Error::LengthMismatch(format!(
            "chain with {} sites on a {}-mode basis",
            spec.sites(),
            basis.mode_count()
        )));
    }
    let id = Operator::identity(basis);
    let modes: Vec<Operator> = (0..spec.sites())
        .map(|k| annihilation(basis, k))
        .collect::<Result<_>>()?;
    let mut h = Operator::zeros(basis);
    for (k, (&omega, c)) in spec.omegas.iter().zip(&modes).enumerate() {
        let nk = &c.adjoint() * c;
        h = &h + &(&(&nk - &(&id * 0.5)) * (omega / 2.0));
        if let Some(&j) = spec.couplings.get(k) {
            let hop = &modes[k + 1].adjoint() * c;
            h = &h + &(&(&hop + &hop.adjoint()) * j);
        }
    }
    let m = h.into_matrix();
    Operator::hermitian(basis.clone(), m, "spin-chain Hamiltonian")
}

/// Local Pauli `σ_kˣ` of a spin chain in the occupation basis (spin up ↔
/// occupied). In fermionic language this carries the Jordan-Wigner string.
pub fn chain_sigma_x(basis: &BasisRef, k: usize) -> Result<Operator> {
    if basis.statistics() != Statistics::Fermionic {
        return Err(Error::BasisMismatch);
    }
    if k >= basis.mode_count() {
        return Err(Error::ModeIndex {
            index: k,
            modes: basis.mode_count(),
        });
    }
    let n = basis.dim();
    let mut m = CMatrix::zeros(n, n);
    for (col, occ) in basis.states().iter().enumerate() {
        let mut flipped = occ.clone();
        flipped[k] ^= 1;
        let row = basis.index_of(&flipped).expect("flipped state lies in the basis");
        m[(row, col)] = Complex64::new(1.0, 0.0);
    }
    Operator::new(basis.clone(), m)
}

/// Total excitation number of the chain (alias for [`number_operator`]).
pub fn chain_excitations(basis: &BasisRef) -> Operator {
    number_operator(basis)
}
